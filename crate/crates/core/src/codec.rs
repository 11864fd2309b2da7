//! 99-bin numerical action tokens, intrinsic landing detection and the
//! constant-cruise velocity mapping.
//!
//! Each action dimension is mapped onto an endpoint-inclusive uniform grid
//! of [`NUM_BINS`] levels, so `0`, the range limits and (for symmetric
//! ranges) exact zero are all representable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{wrap_finite, Pose};
use crate::scalar::Scalar;

pub const NUM_BINS: u8 = 99;
pub const MAX_TOKEN: u8 = NUM_BINS - 1;
/// Cruise speed used by the velocity-duration mapping, m/s.
pub const CRUISE_SPEED: f64 = 1.0;

/// Continuous 3-DoF command: forward and vertical displacement in meters,
/// yaw change in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action<T> {
    pub dx: T,
    pub dz: T,
    pub dpsi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    Forward,
    Vertical,
    Yaw,
}

impl Dim {
    pub const ALL: [Dim; 3] = [Dim::Forward, Dim::Vertical, Dim::Yaw];

    pub fn name(self) -> &'static str {
        match self {
            Dim::Forward => "dx",
            Dim::Vertical => "dz",
            Dim::Yaw => "dpsi",
        }
    }

    pub fn range<T: Scalar>(self) -> (T, T) {
        match self {
            Dim::Forward => (T::zero(), T::lit(5.0)),
            Dim::Vertical => (T::lit(-5.0), T::lit(5.0)),
            Dim::Yaw => (-T::PI(), T::PI()),
        }
    }

    /// Width of one quantization step.
    pub fn bin_width<T: Scalar>(self) -> T {
        let (lo, hi) = self.range::<T>();
        (hi - lo) / T::lit(f64::from(MAX_TOKEN))
    }

    /// Token that decodes to exactly zero.
    pub fn zero_token(self) -> u8 {
        match self {
            Dim::Forward => 0,
            Dim::Vertical | Dim::Yaw => MAX_TOKEN / 2,
        }
    }
}

impl<T: Scalar> Action<T> {
    pub fn new(dx: T, dz: T, dpsi: T) -> Self {
        Self { dx, dz, dpsi }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn get(&self, dim: Dim) -> T {
        match dim {
            Dim::Forward => self.dx,
            Dim::Vertical => self.dz,
            Dim::Yaw => self.dpsi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for dim in Dim::ALL {
            let v = self.get(dim);
            if !v.is_finite() {
                return Err(Error::NonFinite(dim.name()));
            }
            let (lo, hi) = dim.range::<T>();
            if v < lo || v > hi {
                return Err(Error::OutOfRange {
                    field: dim.name(),
                    value: v.to_f64().unwrap_or(f64::NAN),
                    lo: lo.to_f64().unwrap_or(f64::NAN),
                    hi: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// Token triple, one value in `0..=98` per dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenTriple {
    pub cx: u8,
    pub cz: u8,
    pub cpsi: u8,
}

impl TokenTriple {
    pub fn new(cx: u8, cz: u8, cpsi: u8) -> Result<Self> {
        let t = Self { cx, cz, cpsi };
        t.validate()?;
        Ok(t)
    }

    /// Label used for terminal frames: zero displacement in every dimension.
    pub const ZERO: TokenTriple = TokenTriple {
        cx: 0,
        cz: MAX_TOKEN / 2,
        cpsi: MAX_TOKEN / 2,
    };

    pub fn get(&self, dim: Dim) -> u8 {
        match dim {
            Dim::Forward => self.cx,
            Dim::Vertical => self.cz,
            Dim::Yaw => self.cpsi,
        }
    }

    pub fn set(&mut self, dim: Dim, c: u8) {
        match dim {
            Dim::Forward => self.cx = c,
            Dim::Vertical => self.cz = c,
            Dim::Yaw => self.cpsi = c,
        }
    }

    fn validate(&self) -> Result<()> {
        for dim in Dim::ALL {
            let value = self.get(dim);
            if value > MAX_TOKEN {
                return Err(Error::TokenOutOfRange {
                    field: dim.name(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Either the LAND marker or a numerical token triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionTokens {
    Land,
    Triple(TokenTriple),
}

impl ActionTokens {
    pub fn is_land(&self) -> bool {
        matches!(self, ActionTokens::Land)
    }

    pub fn triple(&self) -> Option<TokenTriple> {
        match self {
            ActionTokens::Land => None,
            ActionTokens::Triple(t) => Some(*t),
        }
    }
}

impl fmt::Display for ActionTokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionTokens::Land => f.write_str("LAND"),
            ActionTokens::Triple(t) => write!(f, "{} {} {}", t.cx, t.cz, t.cpsi),
        }
    }
}

impl FromStr for ActionTokens {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "LAND" {
            return Ok(ActionTokens::Land);
        }
        let parts: Vec<&str> = s.split(' ').collect();
        if parts.len() != 3 {
            return Err(format!("expected LAND or three tokens, got {s:?}"));
        }
        let mut vals = [0u8; 3];
        for (slot, p) in vals.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| format!("bad token {p:?}"))?;
        }
        TokenTriple::new(vals[0], vals[1], vals[2])
            .map(ActionTokens::Triple)
            .map_err(|e| e.to_string())
    }
}

impl Serialize for ActionTokens {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionTokens {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn quantize_dim<T: Scalar>(dim: Dim, v: T) -> u8 {
    let (lo, hi) = dim.range::<T>();
    let max = T::lit(f64::from(MAX_TOKEN));
    let c = ((v - lo) * max / (hi - lo)).round();
    let c = c.max(T::zero()).min(max);
    c.to_u8().unwrap_or(0)
}

fn dequantize_dim<T: Scalar>(dim: Dim, c: u8) -> T {
    let (lo, hi) = dim.range::<T>();
    // lerp form keeps the endpoints and the midpoint exact
    let t = T::lit(f64::from(c)) / T::lit(f64::from(MAX_TOKEN));
    let v = lo * (T::one() - t) + hi * t;
    v.max(lo).min(hi)
}

/// Quantizes an in-range action. Out-of-range values are rejected rather
/// than clamped.
pub fn quantize<T: Scalar>(a: &Action<T>) -> Result<TokenTriple> {
    a.validate()?;
    Ok(TokenTriple {
        cx: quantize_dim(Dim::Forward, a.dx),
        cz: quantize_dim(Dim::Vertical, a.dz),
        cpsi: quantize_dim(Dim::Yaw, a.dpsi),
    })
}

pub fn dequantize<T: Scalar>(t: &ActionTokens) -> Result<Action<T>> {
    match t {
        ActionTokens::Land => Err(Error::LandHasNoDecode),
        ActionTokens::Triple(t) => dequantize_triple(t),
    }
}

pub fn dequantize_triple<T: Scalar>(t: &TokenTriple) -> Result<Action<T>> {
    t.validate()?;
    Ok(Action {
        dx: dequantize_dim(Dim::Forward, t.cx),
        dz: dequantize_dim(Dim::Vertical, t.cz),
        dpsi: dequantize_dim(Dim::Yaw, t.cpsi),
    })
}

/// True when the decoded action is within one bin of zero in every
/// dimension.
pub fn is_near_zero<T: Scalar>(a: &Action<T>) -> bool {
    // relative slack absorbs rounding in the decoded boundary bin
    let slack = T::one() + T::lit(1e-9);
    Dim::ALL
        .iter()
        .all(|&d| a.get(d).abs() <= d.bin_width::<T>() * slack)
}

/// Dual-condition landing check: the LAND marker, or near-zero offsets.
pub fn is_landing(t: &ActionTokens) -> bool {
    match t {
        ActionTokens::Land => true,
        ActionTokens::Triple(triple) => dequantize_triple::<f64>(triple)
            .map(|a| is_near_zero(&a))
            .unwrap_or(false),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityCommand<T> {
    pub vx: T,
    pub vy: T,
    pub vz: T,
    pub yaw_target: T,
    pub duration: T,
}

impl<T: Scalar> VelocityCommand<T> {
    pub fn speed(&self) -> T {
        (self.vx * self.vx + self.vy * self.vy + self.vz * self.vz).sqrt()
    }
}

/// Maps an offset command onto a world-frame velocity flown at the cruise
/// speed for the matching duration. Yaw is applied before the translation
/// direction is computed.
pub fn to_velocity<T: Scalar>(a: &Action<T>, pose: &Pose<T>) -> VelocityCommand<T> {
    let yaw_target = wrap_finite(pose.yaw + a.dpsi);
    let dir = [a.dx * yaw_target.cos(), a.dx * yaw_target.sin(), a.dz];
    let speed = T::lit(CRUISE_SPEED);
    let length = a.dx.hypot(a.dz);
    if length > T::zero() {
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        VelocityCommand {
            vx: dir[0] / norm * speed,
            vy: dir[1] / norm * speed,
            vz: dir[2] / norm * speed,
            yaw_target,
            duration: length / speed,
        }
    } else {
        VelocityCommand {
            vx: T::zero(),
            vy: T::zero(),
            vz: T::zero(),
            yaw_target,
            duration: T::zero(),
        }
    }
}
