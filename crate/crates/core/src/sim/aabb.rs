//! Axis-aligned boxes and exact slab-method ray queries.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: [T; 3],
    pub max: [T; 3],
}

impl<T: Scalar> Aabb<T> {
    pub fn from_center(center: [T; 3], half: [T; 3]) -> Self {
        Self {
            min: [center[0] - half[0], center[1] - half[1], center[2] - half[2]],
            max: [center[0] + half[0], center[1] + half[1], center[2] + half[2]],
        }
    }

    /// Box grown by `r` on every face.
    pub fn inflated(&self, r: T) -> Self {
        Self {
            min: [self.min[0] - r, self.min[1] - r, self.min[2] - r],
            max: [self.max[0] + r, self.max[1] + r, self.max[2] + r],
        }
    }

    pub fn contains(&self, p: [T; 3]) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn closest_point(&self, p: [T; 3]) -> [T; 3] {
        [
            p[0].max(self.min[0]).min(self.max[0]),
            p[1].max(self.min[1]).min(self.max[1]),
            p[2].max(self.min[2]).min(self.max[2]),
        ]
    }

    pub fn distance_to_point(&self, p: [T; 3]) -> T {
        let c = self.closest_point(p);
        crate::geometry::distance3(c, p)
    }

    /// Parametric interval `[t_enter, t_exit]` over which the line
    /// `origin + t * dir` lies inside the box, if any.
    pub fn slab_interval(&self, origin: [T; 3], dir: [T; 3]) -> Option<(T, T)> {
        let mut t_min = T::neg_infinity();
        let mut t_max = T::infinity();
        for i in 0..3 {
            if dir[i] == T::zero() {
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            let inv = T::one() / dir[i];
            let mut t0 = (self.min[i] - origin[i]) * inv;
            let mut t1 = (self.max[i] - origin[i]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return None;
            }
        }
        Some((t_min, t_max))
    }

    /// Distance along the ray to the first hit; 0 when the origin is inside.
    pub fn ray_hit(&self, origin: [T; 3], dir: [T; 3]) -> Option<T> {
        let (t0, t1) = self.slab_interval(origin, dir)?;
        if t1 < T::zero() {
            None
        } else {
            Some(t0.max(T::zero()))
        }
    }

    /// Whether the closed segment `a..=b` touches the box.
    pub fn segment_intersects(&self, a: [T; 3], b: [T; 3]) -> bool {
        let dir = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        match self.slab_interval(a, dir) {
            Some((t0, t1)) => t1 >= T::zero() && t0 <= T::one(),
            None => false,
        }
    }
}
