use serde::{Deserialize, Serialize};

use super::scene::Scene;
use crate::codec::Action;
use crate::error::Result;
use crate::geometry::{wrap_finite, Pose};

/// UAV collision radius, meters.
pub const UAV_RADIUS: f64 = 1.0;
/// Range cap of every depth query, meters.
pub const DEPTH_CAP: f64 = 100.0;
/// Smallest reported depth (origin on or inside a surface).
const DEPTH_FLOOR: f64 = 1e-6;

/// Nearest hit along the four body-frame probe rays, capped at [`DEPTH_CAP`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthProbe {
    pub forward: f64,
    pub left: f64,
    pub right: f64,
    pub down: f64,
}

impl DepthProbe {
    /// Lateral depth on the side the bearing points to; the nearer side
    /// when the bearing is exactly zero.
    pub fn target_side(&self, theta: f64) -> f64 {
        if theta > 0.0 {
            self.right
        } else if theta < 0.0 {
            self.left
        } else {
            self.left.min(self.right)
        }
    }
}

pub(crate) fn cast(scene: &Scene, origin: [f64; 3], dir: [f64; 3], ground: bool) -> f64 {
    let mut best = DEPTH_CAP;
    if ground && dir[2] < 0.0 {
        let t = origin[2] / -dir[2];
        if t >= 0.0 {
            best = best.min(t);
        }
    }
    for ob in &scene.obstacles {
        if let Some(t) = ob.aabb().ray_hit(origin, dir) {
            best = best.min(t);
        }
    }
    best.clamp(DEPTH_FLOOR, DEPTH_CAP)
}

pub fn probe_depth(scene: &Scene, pose: &Pose<f64>) -> DepthProbe {
    let o = pose.position();
    let (s, c) = pose.yaw.sin_cos();
    DepthProbe {
        forward: cast(scene, o, [c, s, 0.0], false),
        left: cast(scene, o, [-s, c, 0.0], false),
        right: cast(scene, o, [s, -c, 0.0], false),
        down: cast(scene, o, [0.0, 0.0, -1.0], true),
    }
}

/// True if the swept segment passes within `radius` of an obstacle (boxes
/// inflated by `radius`) or dips below the ground plane.
pub fn segment_collides(scene: &Scene, from: [f64; 3], to: [f64; 3], radius: f64) -> bool {
    if from[2] < 0.0 || to[2] < 0.0 {
        return true;
    }
    scene
        .obstacles
        .iter()
        .any(|ob| ob.aabb().inflated(radius).segment_intersects(from, to))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub pose: Pose<f64>,
    pub collided: bool,
    pub path_len: f64,
}

/// Applies the yaw change, then translates `dx` along the new heading and
/// `dz` vertically.
pub fn step(scene: &Scene, pose: &Pose<f64>, action: &Action<f64>) -> Result<StepOutcome> {
    step_with_radius(scene, pose, action, UAV_RADIUS)
}

pub fn step_with_radius(
    scene: &Scene,
    pose: &Pose<f64>,
    action: &Action<f64>,
    radius: f64,
) -> Result<StepOutcome> {
    action.validate()?;
    let yaw = wrap_finite(pose.yaw + action.dpsi);
    let (s, c) = yaw.sin_cos();
    let from = pose.position();
    let raw = [
        from[0] + action.dx * c,
        from[1] + action.dx * s,
        from[2] + action.dz,
    ];
    let to = scene.bounds.clamp(raw);
    let clamped = to != raw;
    let collided = clamped || segment_collides(scene, from, to, radius);
    Ok(StepOutcome {
        pose: Pose {
            x: to[0],
            y: to[1],
            z: to[2],
            yaw,
        },
        collided,
        path_len: action.dx.hypot(action.dz),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Obstacle;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn at(x: f64, y: f64, z: f64, yaw: f64) -> Pose<f64> {
        Pose::new(x, y, z, yaw).unwrap()
    }

    fn empty() -> Scene {
        Scene::open(at(0.0, 0.0, 10.0, 0.0), [100.0, 0.0, 0.0])
    }

    fn with_box(center: [f64; 3], half: [f64; 3]) -> Scene {
        let mut s = empty();
        s.obstacles.push(Obstacle {
            center,
            half_extents: half,
        });
        s
    }

    #[test]
    fn probe_empty() {
        let p = probe_depth(&empty(), &at(0.0, 0.0, 10.0, 0.3));
        assert_eq!((p.forward, p.left, p.right), (100.0, 100.0, 100.0));
        assert_eq!(p.down, 10.0);
    }

    #[test]
    fn probe_box_ahead_and_behind() {
        let s = with_box([13.0, 0.0, 20.0], [5.0, 5.0, 20.0]);
        let p = probe_depth(&s, &at(0.0, 0.0, 10.0, 0.0));
        assert_eq!(p.forward, 8.0);
        let p = probe_depth(&s, &at(0.0, 0.0, 10.0, PI));
        assert_eq!(p.forward, 100.0);
        // rotated so the box lies on the right
        let p = probe_depth(&s, &at(13.0, 20.0, 10.0, 0.0));
        assert!((p.right - 15.0).abs() < 1e-12);
        assert_eq!(p.left, 100.0);
    }

    #[test]
    fn probe_down_hits_box_top() {
        let s = with_box([0.0, 0.0, 2.0], [3.0, 3.0, 2.0]);
        let p = probe_depth(&s, &at(0.0, 0.0, 10.0, 0.0));
        assert_eq!(p.down, 6.0);
    }

    #[test]
    fn collisions() {
        let s = with_box([20.0, 0.0, 10.0], [2.0, 2.0, 10.0]);
        assert!(!segment_collides(&s, [0.0, 30.0, 10.0], [40.0, 30.0, 10.0], 1.0));
        assert!(segment_collides(&s, [0.0, 0.0, 10.0], [40.0, 0.0, 10.0], 1.0));
        // face at y = 2; passing at y = 2 + (1 - eps)
        let eps = 1e-3;
        let y = 2.0 + 1.0 - eps;
        assert!(segment_collides(&s, [0.0, y, 10.0], [40.0, y, 10.0], 1.0));
        let y = 2.0 + 1.0 + eps;
        assert!(!segment_collides(&s, [0.0, y, 10.0], [40.0, y, 10.0], 1.0));
        assert!(segment_collides(&empty(), [0.0, 0.0, 1.0], [0.0, 0.0, -0.5], 1.0));
    }

    #[test]
    fn step_examples() {
        let s = empty();
        let o = step(&s, &at(0.0, 0.0, 10.0, 0.0), &Action::new(5.0, 0.0, 0.0)).unwrap();
        assert_eq!(o.pose, at(5.0, 0.0, 10.0, 0.0));
        assert!(!o.collided);

        let o = step(&s, &at(0.0, 0.0, 10.0, 0.0), &Action::new(0.0, 0.0, FRAC_PI_2)).unwrap();
        assert_eq!(o.pose, at(0.0, 0.0, 10.0, FRAC_PI_2));
        assert_eq!(o.path_len, 0.0);

        let o = step(&s, &at(0.0, 0.0, 10.0, 0.0), &Action::new(3.0, -4.0, FRAC_PI_2)).unwrap();
        assert!(o.pose.x.abs() < 1e-12);
        assert!((o.pose.y - 3.0).abs() < 1e-12);
        assert_eq!(o.pose.z, 6.0);
        assert_eq!(o.pose.yaw, FRAC_PI_2);
        assert_eq!(o.path_len, 5.0);
    }

    #[test]
    fn step_clamps_and_flags() {
        let s = empty();
        let o = step(&s, &at(0.0, 0.0, 2.0, 0.0), &Action::new(0.0, -5.0, 0.0)).unwrap();
        assert_eq!(o.pose.z, 0.0);
        assert!(o.collided);
        let o = step(&s, &at(498.0, 0.0, 20.0, 0.0), &Action::new(5.0, 0.0, 0.0)).unwrap();
        assert_eq!(o.pose.x, 500.0);
        assert!(o.collided);
    }

    #[test]
    fn step_rejects_bad_action() {
        let s = empty();
        assert!(step(&s, &at(0.0, 0.0, 10.0, 0.0), &Action::new(6.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn target_side() {
        let p = DepthProbe {
            forward: 50.0,
            left: 10.0,
            right: 30.0,
            down: 5.0,
        };
        assert_eq!(p.target_side(0.5), 30.0);
        assert_eq!(p.target_side(-0.5), 10.0);
        assert_eq!(p.target_side(0.0), 10.0);
    }
}
