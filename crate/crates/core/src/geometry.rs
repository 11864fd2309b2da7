//! Angles, poses and bearings.
//!
//! World frame is z-up. Yaw is measured counterclockwise from +x and kept in
//! (-pi, pi]. Relative bearings are positive when the target lies to the
//! agent's right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle<T: Scalar>(a: T) -> Result<T> {
    if !a.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap_finite(a))
}

/// Same as [`wrap_angle`] for values already known to be finite.
pub(crate) fn wrap_finite<T: Scalar>(a: T) -> T {
    let pi = T::PI();
    // values already in range are returned untouched so wrapping is idempotent
    if a > -pi && a <= pi {
        return a;
    }
    let tau = T::two_pi();
    let mut r = a % tau;
    if r < T::zero() {
        r = r + tau;
    }
    if r > pi {
        r = r - tau;
    }
    if r <= -pi {
        pi
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub yaw: T,
}

impl<T: Scalar> Pose<T> {
    /// Builds a pose, normalizing the yaw.
    pub fn new(x: T, y: T, z: T, yaw: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("pose position"));
        }
        Ok(Self {
            x,
            y,
            z,
            yaw: wrap_angle(yaw)?,
        })
    }

    pub fn position(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit heading vector in the xy-plane.
    pub fn heading(&self) -> [T; 2] {
        [self.yaw.cos(), self.yaw.sin()]
    }

    pub fn with_yaw(mut self, yaw: T) -> Self {
        self.yaw = wrap_finite(yaw);
        self
    }
}

/// Target bearing relative to the agent heading, positive to the right.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelativeBearing<T>(pub T);

impl<T: Scalar> RelativeBearing<T> {
    pub fn radians(self) -> T {
        self.0
    }

    pub fn degrees(self) -> T {
        self.0.to_degrees()
    }

    pub fn from_degrees(deg: T) -> Self {
        Self(wrap_finite(deg.to_radians()))
    }
}

pub fn relative_bearing<T: Scalar>(pose: &Pose<T>, target_xy: [T; 2]) -> Result<RelativeBearing<T>> {
    let dx = target_xy[0] - pose.x;
    let dy = target_xy[1] - pose.y;
    if !(dx.is_finite() && dy.is_finite()) {
        return Err(Error::NonFinite("bearing input"));
    }
    if dx == T::zero() && dy == T::zero() {
        return Err(Error::ZeroSeparation);
    }
    let ccw = dy.atan2(dx) - pose.yaw;
    Ok(RelativeBearing(wrap_finite(-ccw)))
}

pub fn horizontal_distance<T: Scalar>(pose: &Pose<T>, target: [T; 3]) -> T {
    (target[0] - pose.x).hypot(target[1] - pose.y)
}

pub fn distance3<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}
