use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aabb::Aabb;
use super::kinematics::UAV_RADIUS;
use crate::error::{Error, Result};
use crate::geometry::{distance3, wrap_finite, Pose};

pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl Difficulty {
    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Bounds {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn clamp(&self, p: [f64; 3]) -> [f64; 3] {
        [
            p[0].clamp(self.min[0], self.max[0]),
            p[1].clamp(self.min[1], self.max[1]),
            p[2].clamp(self.min[2], self.max[2]),
        ]
    }

    fn is_degenerate(&self) -> bool {
        (0..3).any(|i| !(self.max[i] > self.min[i]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: [f64; 3],
    pub half_extents: [f64; 3],
}

impl Obstacle {
    pub fn aabb(&self) -> Aabb<f64> {
        Aabb::from_center(self.center, self.half_extents)
    }

    /// Horizontal distance from a point to the box footprint.
    pub fn footprint_distance(&self, x: f64, y: f64) -> f64 {
        let dx = (x - self.center[0]).abs() - self.half_extents[0];
        let dy = (y - self.center[1]).abs() - self.half_extents[1];
        dx.max(0.0).hypot(dy.max(0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub format_version: u32,
    pub seed: u64,
    pub difficulty: Difficulty,
    pub bounds: Bounds,
    pub start: Pose<f64>,
    pub target: [f64; 3],
    pub target_description: String,
    pub obstacles: Vec<Obstacle>,
}

impl Scene {
    /// Scene without obstacles, handy for tests and hand-built setups.
    pub fn open(start: Pose<f64>, target: [f64; 3]) -> Self {
        Self {
            format_version: SCENE_FORMAT_VERSION,
            seed: 0,
            difficulty: Difficulty::Easy,
            bounds: Bounds {
                min: [-500.0, -500.0, 0.0],
                max: [500.0, 500.0, 150.0],
            },
            start,
            target,
            target_description: "the landing marker".to_owned(),
            obstacles: Vec::new(),
        }
    }

    pub fn start_target_distance(&self) -> f64 {
        distance3(self.start.position(), self.target)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

/// Procedural generation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub bounds: Bounds,
    /// 3D start-to-target distance range per difficulty, meters.
    pub easy_distance: [f64; 2],
    pub hard_distance: [f64; 2],
    /// Inclusive obstacle count ranges.
    pub easy_obstacles: [usize; 2],
    pub hard_obstacles: [usize; 2],
    /// Fraction of obstacles placed near the start-target corridor.
    pub corridor_fraction: f64,
    pub corridor_half_width: f64,
    pub start_altitude: [f64; 2],
    pub target_altitude: [f64; 2],
    pub obstacle_half_width: [f64; 2],
    pub obstacle_height: [f64; 2],
    /// Horizontal clearance kept between obstacles and the start/target.
    pub clearance: f64,
    /// Force the start heading so the target bears more than 60 degrees
    /// off the nose.
    pub lateral_start: bool,
    pub max_attempts: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            bounds: Bounds {
                min: [-250.0, -250.0, 0.0],
                max: [250.0, 250.0, 120.0],
            },
            easy_distance: [40.0, 150.0],
            hard_distance: [150.0, 300.0],
            easy_obstacles: [0, 6],
            hard_obstacles: [2, 12],
            corridor_fraction: 0.5,
            corridor_half_width: 25.0,
            start_altitude: [5.0, 25.0],
            target_altitude: [0.0, 10.0],
            obstacle_half_width: [2.0, 10.0],
            obstacle_height: [35.0, 60.0],
            clearance: 8.0,
            lateral_start: false,
            max_attempts: 1000,
        }
    }
}

impl GenParams {
    pub fn obstacle_free() -> Self {
        Self {
            easy_obstacles: [0, 0],
            hard_obstacles: [0, 0],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_owned()));
        if self.bounds.is_degenerate() {
            return bad("bounds are degenerate");
        }
        for (name, r) in [
            ("easy_distance", self.easy_distance),
            ("hard_distance", self.hard_distance),
            ("start_altitude", self.start_altitude),
            ("target_altitude", self.target_altitude),
            ("obstacle_half_width", self.obstacle_half_width),
            ("obstacle_height", self.obstacle_height),
        ] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(Error::InvalidParams(format!("{name} must be an ordered finite range")));
            }
        }
        if self.easy_distance[0] < 40.0 || self.hard_distance[0] < 40.0 {
            return bad("start-target distance must be at least 40 m");
        }
        if self.easy_obstacles[0] > self.easy_obstacles[1]
            || self.hard_obstacles[0] > self.hard_obstacles[1]
        {
            return bad("obstacle count range must be ordered");
        }
        if self.obstacle_half_width[0] <= 0.0 || self.obstacle_height[0] <= 0.0 {
            return bad("obstacle sizes must be positive");
        }
        if !(0.0..=1.0).contains(&self.corridor_fraction) {
            return bad("corridor_fraction must lie in [0, 1]");
        }
        if self.start_altitude[0] < 0.0 || self.target_altitude[0] < 0.0 {
            return bad("altitudes must be non-negative");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

const COLORS: [&str; 6] = ["red", "white", "blue", "yellow", "green", "black"];
const OBJECTS: [&str; 6] = ["car", "tent", "van", "umbrella", "bench", "motorcycle"];
const PLACES: [&str; 4] = [
    "parked beside the road",
    "next to a small tree",
    "on an open lot",
    "near the corner of a building",
];

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.gen_range(r[0]..=r[1])
    }
}

/// Generates a scene deterministically from `seed` and `params`.
pub fn generate_scene(seed: u64, difficulty: Difficulty, params: &GenParams) -> Result<Scene> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = params.bounds;
    let margin = 10.0;
    let dist_range = match difficulty {
        Difficulty::Easy => params.easy_distance,
        Difficulty::Hard => params.hard_distance,
    };

    let mut placed = None;
    for _ in 0..params.max_attempts {
        let sx = rng.gen_range(b.min[0] + margin..=b.max[0] - margin);
        let sy = rng.gen_range(b.min[1] + margin..=b.max[1] - margin);
        let sz = uniform(&mut rng, params.start_altitude);
        let tz = uniform(&mut rng, params.target_altitude);
        let d = uniform(&mut rng, dist_range);
        let dz = tz - sz;
        if d * d <= dz * dz {
            continue;
        }
        let h = (d * d - dz * dz).sqrt();
        let phi = rng.gen_range(-PI..PI);
        let target = [sx + h * phi.cos(), sy + h * phi.sin(), tz];
        let inner = Bounds {
            min: [b.min[0] + margin, b.min[1] + margin, b.min[2]],
            max: [b.max[0] - margin, b.max[1] - margin, b.max[2]],
        };
        if !inner.contains(target) || !b.contains([sx, sy, sz]) {
            continue;
        }
        let theta = if params.lateral_start {
            let mag = rng.gen_range(60.0f64.to_radians()..PI);
            // strictly beyond 60 degrees
            let mag = mag.max(60.0f64.to_radians() + 1e-6);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        } else {
            rng.gen_range(-PI..PI)
        };
        // theta = wrap(yaw - ccw_bearing) => yaw = ccw_bearing + theta
        let yaw = wrap_finite(phi + theta);
        placed = Some((Pose { x: sx, y: sy, z: sz, yaw }, target));
        break;
    }
    let (start, target) = placed.ok_or_else(|| Error::Generation {
        attempts: params.max_attempts,
        constraint: format!(
            "start and target inside bounds with distance in [{}, {}]",
            dist_range[0], dist_range[1]
        ),
    })?;

    let count_range = match difficulty {
        Difficulty::Easy => params.easy_obstacles,
        Difficulty::Hard => params.hard_obstacles,
    };
    let count = rng.gen_range(count_range[0]..=count_range[1]);
    let keep_out = params.clearance + UAV_RADIUS;
    let mut obstacles = Vec::with_capacity(count);
    for _ in 0..count {
        let mut ok = None;
        for _ in 0..params.max_attempts {
            let hx = uniform(&mut rng, params.obstacle_half_width);
            let hy = uniform(&mut rng, params.obstacle_half_width);
            let height = uniform(&mut rng, params.obstacle_height);
            let (cx, cy) = if rng.gen_bool(params.corridor_fraction) {
                let s = rng.gen_range(0.2..0.8);
                let off = rng.gen_range(-params.corridor_half_width..=params.corridor_half_width);
                let (ux, uy) = {
                    let vx = target[0] - start.x;
                    let vy = target[1] - start.y;
                    let n = vx.hypot(vy);
                    (vx / n, vy / n)
                };
                (
                    start.x + s * (target[0] - start.x) - uy * off,
                    start.y + s * (target[1] - start.y) + ux * off,
                )
            } else {
                (
                    rng.gen_range(b.min[0]..=b.max[0]),
                    rng.gen_range(b.min[1]..=b.max[1]),
                )
            };
            let ob = Obstacle {
                center: [cx, cy, height / 2.0],
                half_extents: [hx, hy, height / 2.0],
            };
            if ob.footprint_distance(start.x, start.y) < keep_out
                || ob.footprint_distance(target[0], target[1]) < keep_out
            {
                continue;
            }
            ok = Some(ob);
            break;
        }
        obstacles.push(ok.ok_or_else(|| Error::Generation {
            attempts: params.max_attempts,
            constraint: format!("obstacle clear of start and target by {keep_out} m"),
        })?);
    }

    let description = format!(
        "the {} {} {}",
        COLORS[rng.gen_range(0..COLORS.len())],
        OBJECTS[rng.gen_range(0..OBJECTS.len())],
        PLACES[rng.gen_range(0..PLACES.len())]
    );

    Ok(Scene {
        format_version: SCENE_FORMAT_VERSION,
        seed,
        difficulty,
        bounds: b,
        start,
        target,
        target_description: description,
        obstacles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::relative_bearing;

    #[test]
    fn deterministic() {
        let p = GenParams::default();
        let a = generate_scene(7, Difficulty::Easy, &p).unwrap();
        let b = generate_scene(7, Difficulty::Easy, &p).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_scene(8, Difficulty::Easy, &p).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn distance_ranges() {
        let p = GenParams::default();
        let s = generate_scene(7, Difficulty::Easy, &p).unwrap();
        let d = s.start_target_distance();
        assert!((40.0..=150.0 + 1e-9).contains(&d), "{d}");
        for seed in 0..50 {
            let s = generate_scene(seed, Difficulty::Hard, &p).unwrap();
            let d = s.start_target_distance();
            assert!((150.0 - 1e-9..=300.0 + 1e-9).contains(&d), "{d}");
        }
    }

    #[test]
    fn obstacle_free_params() {
        let s = generate_scene(3, Difficulty::Easy, &GenParams::obstacle_free()).unwrap();
        assert!(s.obstacles.is_empty());
        assert!(s.start_target_distance() >= 40.0);
    }

    #[test]
    fn invariants_hold() {
        let p = GenParams::default();
        for seed in 0..100 {
            for diff in [Difficulty::Easy, Difficulty::Hard] {
                let s = generate_scene(seed, diff, &p).unwrap();
                assert!(s.bounds.contains(s.start.position()));
                assert!(s.bounds.contains(s.target));
                for ob in &s.obstacles {
                    assert!(ob.half_extents.iter().all(|&h| h > 0.0));
                    assert!(ob.footprint_distance(s.start.x, s.start.y) >= p.clearance);
                    assert!(ob.footprint_distance(s.target[0], s.target[1]) >= p.clearance);
                }
            }
        }
    }

    #[test]
    fn lateral_start_bearing() {
        let p = GenParams {
            lateral_start: true,
            ..GenParams::default()
        };
        for seed in 0..50 {
            let s = generate_scene(seed, Difficulty::Easy, &p).unwrap();
            let th = relative_bearing(&s.start, [s.target[0], s.target[1]]).unwrap();
            assert!(th.degrees().abs() > 60.0);
        }
    }

    #[test]
    fn invalid_params() {
        let p = GenParams {
            easy_obstacles: [5, 2],
            ..GenParams::default()
        };
        assert!(matches!(
            generate_scene(1, Difficulty::Easy, &p),
            Err(Error::InvalidParams(_))
        ));
        let p = GenParams {
            bounds: Bounds {
                min: [0.0; 3],
                max: [0.0; 3],
            },
            ..GenParams::default()
        };
        assert!(generate_scene(1, Difficulty::Easy, &p).is_err());
    }

    #[test]
    fn impossible_constraint_reports() {
        // bounds too small to fit a 40 m separation
        let p = GenParams {
            bounds: Bounds {
                min: [-20.0, -20.0, 0.0],
                max: [20.0, 20.0, 50.0],
            },
            max_attempts: 50,
            ..GenParams::default()
        };
        match generate_scene(1, Difficulty::Easy, &p) {
            Err(Error::Generation { constraint, .. }) => assert!(constraint.contains("distance")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
