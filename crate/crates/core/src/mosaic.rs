//! Synthetic front/down views and their vertically stitched composite.
//!
//! Both cameras use a 90 degree field of view. The down camera's top edge
//! points forward, so its first row looks along the same 45 degree ray as
//! the front camera's last row and the two views meet at the seam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose;
use crate::sim::{Aabb, Scene, DEPTH_CAP};

pub const FOV_DEG: f64 = 90.0;
pub const COMPOSITE_SIZE: usize = 224;
pub const SEAM_ROW: usize = 112;
/// Encoder patch edge, pixels.
pub const PATCH: usize = 14;
/// Half-extent of the box used as the target marker, meters.
pub const TARGET_MARKER_HALF: f64 = 1.5;

pub const CLASS_SKY: u16 = 0;
pub const CLASS_GROUND: u16 = 1;
pub const CLASS_TARGET: u16 = 2;
/// Obstacle `i` is stored as `CLASS_OBSTACLE_BASE + i`.
pub const CLASS_OBSTACLE_BASE: u16 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Camera {
    Front,
    Down,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViewGrid {
    pub id: String,
    pub camera: Camera,
    pub width: usize,
    pub height: usize,
    pub fov_deg: f64,
    /// Row-major hit distance, meters (capped).
    pub depth: Vec<f64>,
    pub class: Vec<u16>,
}

impl ViewGrid {
    /// Constant-valued grid, mostly useful for tests.
    pub fn constant(camera: Camera, size: usize, depth: f64, class: u16) -> Self {
        Self {
            id: format!("{camera:?}-const").to_lowercase(),
            camera,
            width: size,
            height: size,
            fov_deg: FOV_DEG,
            depth: vec![depth; size * size],
            class: vec![class; size * size],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> (f64, u16) {
        let i = row * self.width + col;
        (self.depth[i], self.class[i])
    }
}

fn cast_classified(scene: &Scene, origin: [f64; 3], dir: [f64; 3]) -> (f64, u16) {
    let mut best = (DEPTH_CAP, CLASS_SKY);
    let mut consider = |t: f64, class: u16| {
        if t < best.0 {
            best = (t, class);
        }
    };
    if dir[2] < 0.0 {
        let t = origin[2] / -dir[2];
        if t >= 0.0 {
            consider(t, CLASS_GROUND);
        }
    }
    let marker = Aabb::from_center(scene.target, [TARGET_MARKER_HALF; 3]);
    if let Some(t) = marker.ray_hit(origin, dir) {
        consider(t, CLASS_TARGET);
    }
    for (i, ob) in scene.obstacles.iter().enumerate() {
        if let Some(t) = ob.aabb().ray_hit(origin, dir) {
            consider(t, CLASS_OBSTACLE_BASE.saturating_add(i as u16));
        }
    }
    best
}

/// Pinhole ray-cast of one camera at the pose.
pub fn render_view(scene: &Scene, pose: &Pose<f64>, camera: Camera, resolution: usize) -> Result<ViewGrid> {
    if resolution < 16 || resolution % 2 != 0 {
        return Err(Error::InvalidResolution(resolution));
    }
    let n = resolution;
    let (s, c) = pose.yaw.sin_cos();
    let forward = [c, s, 0.0];
    let right = [s, -c, 0.0];
    let up = [0.0, 0.0, 1.0];
    let down = [0.0, 0.0, -1.0];
    // tan(fov / 2) = 1 at 90 degrees
    let half = (FOV_DEG.to_radians() / 2.0).tan();
    let (axis, vertical) = match camera {
        Camera::Front => (forward, up),
        Camera::Down => (down, forward),
    };
    let origin = pose.position();
    let mut depth = Vec::with_capacity(n * n);
    let mut class = Vec::with_capacity(n * n);
    for row in 0..n {
        let v = half * (1.0 - 2.0 * (row as f64 + 0.5) / n as f64);
        for col in 0..n {
            let u = half * (2.0 * (col as f64 + 0.5) / n as f64 - 1.0);
            let d = [
                axis[0] + u * right[0] + v * vertical[0],
                axis[1] + u * right[1] + v * vertical[1],
                axis[2] + u * right[2] + v * vertical[2],
            ];
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let d = [d[0] / norm, d[1] / norm, d[2] / norm];
            let (t, k) = cast_classified(scene, origin, d);
            depth.push(t.min(DEPTH_CAP));
            class.push(k);
        }
    }
    Ok(ViewGrid {
        id: format!("seed{}-{:?}", scene.seed, camera).to_lowercase(),
        camera,
        width: n,
        height: n,
        fov_deg: FOV_DEG,
        depth,
        class,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeGrid {
    pub width: usize,
    pub height: usize,
    pub seam_row: usize,
    pub depth: Vec<f64>,
    pub class: Vec<u16>,
    pub provenance: [String; 2],
}

impl CompositeGrid {
    pub fn at(&self, row: usize, col: usize) -> (f64, u16) {
        let i = row * self.width + col;
        (self.depth[i], self.class[i])
    }

    pub fn seam_on_patch_boundary(&self) -> bool {
        self.seam_row % PATCH == 0
    }

    /// Binary PGM (P5) of the depth plane, near = bright.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.depth.iter().map(|&d| {
            let v = 255.0 * (1.0 - (d / DEPTH_CAP).clamp(0.0, 1.0));
            v.round() as u8
        }));
        out
    }
}

/// Source-pixel weights for each output index of a 1D area resample.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let ratio = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let lo = o as f64 * ratio;
            let hi = (o + 1) as f64 * ratio;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(src);
            let mut w: Vec<(usize, f64)> = (first..last)
                .map(|i| {
                    let a = lo.max(i as f64);
                    let b = hi.min((i + 1) as f64);
                    (i, (b - a).max(0.0))
                })
                .filter(|&(_, w)| w > 0.0)
                .collect();
            let total: f64 = w.iter().map(|p| p.1).sum();
            for p in &mut w {
                p.1 /= total;
            }
            w
        })
        .collect()
}

fn resample(view: &ViewGrid, out_rows: usize, out_cols: usize) -> (Vec<f64>, Vec<u16>) {
    let rw = area_weights(view.height, out_rows);
    let cw = area_weights(view.width, out_cols);
    let mut depth = Vec::with_capacity(out_rows * out_cols);
    let mut class = Vec::with_capacity(out_rows * out_cols);
    let mut votes: Vec<(u16, f64)> = Vec::new();
    for rows in &rw {
        for cols in &cw {
            let mut acc = 0.0;
            votes.clear();
            for &(r, wr) in rows {
                for &(c, wc) in cols {
                    let (d, k) = view.at(r, c);
                    let w = wr * wc;
                    acc += d * w;
                    match votes.iter_mut().find(|v| v.0 == k) {
                        Some(v) => v.1 += w,
                        None => votes.push((k, w)),
                    }
                }
            }
            depth.push(acc);
            // majority class, ties to the smaller id
            let winner = votes
                .iter()
                .fold(None::<(u16, f64)>, |best, &(k, w)| match best {
                    Some((bk, bw)) if bw > w || (bw == w && bk < k) => Some((bk, bw)),
                    _ => Some((k, w)),
                })
                .map(|v| v.0)
                .unwrap_or(CLASS_SKY);
            class.push(winner);
        }
    }
    (depth, class)
}

/// Stacks the front view over the down view. Each half is area-resampled
/// on its own, so the seam lands exactly on row 112 and no output pixel
/// mixes the two sources.
pub fn compose(front: &ViewGrid, down: &ViewGrid) -> Result<CompositeGrid> {
    if front.width != down.width || front.height != down.height {
        return Err(Error::ResolutionMismatch {
            front: front.width,
            down: down.width,
        });
    }
    let (mut depth, mut class) = resample(front, SEAM_ROW, COMPOSITE_SIZE);
    let (d2, c2) = resample(down, COMPOSITE_SIZE - SEAM_ROW, COMPOSITE_SIZE);
    depth.extend(d2);
    class.extend(c2);
    Ok(CompositeGrid {
        width: COMPOSITE_SIZE,
        height: COMPOSITE_SIZE,
        seam_row: SEAM_ROW,
        depth,
        class,
        provenance: [front.id.clone(), down.id.clone()],
    })
}

pub fn composite_observation(scene: &Scene, pose: &Pose<f64>, resolution: usize) -> Result<CompositeGrid> {
    let front = render_view(scene, pose, Camera::Front, resolution)?;
    let down = render_view(scene, pose, Camera::Down, resolution)?;
    compose(&front, &down)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Obstacle;

    fn pose(z: f64, yaw: f64) -> Pose<f64> {
        Pose::new(0.0, 0.0, z, yaw).unwrap()
    }

    #[test]
    fn down_view_of_empty_scene() {
        let s = Scene::open(pose(10.0, 0.0), [500.0, 500.0, 0.0]);
        let v = render_view(&s, &pose(10.0, 0.3), Camera::Down, 32).unwrap();
        // nadir pixels see the ground at the altitude
        let (d, k) = v.at(16, 16);
        assert_eq!(k, CLASS_GROUND);
        let expect = 10.0 * (1.0 + 2.0 * (1.0f64 / 32.0).powi(2)).sqrt();
        assert!((d - expect).abs() < 1e-9);
        assert!(v.class.iter().all(|&c| c == CLASS_GROUND));
    }

    #[test]
    fn target_at_front_center() {
        let s = Scene::open(pose(10.0, 0.0), [40.0, 0.0, 10.0]);
        let v = render_view(&s, &pose(10.0, 0.0), Camera::Front, 64).unwrap();
        let (d, k) = v.at(32, 32);
        assert_eq!(k, CLASS_TARGET);
        assert!((d - 38.5).abs() < 0.1);
    }

    #[test]
    fn box_fills_view() {
        let mut s = Scene::open(pose(10.0, 0.0), [400.0, 0.0, 0.0]);
        s.obstacles.push(Obstacle {
            center: [3.0, 0.0, 10.0],
            half_extents: [1.0, 50.0, 50.0],
        });
        let v = render_view(&s, &pose(10.0, 0.0), Camera::Front, 16).unwrap();
        assert!(v.class.iter().all(|&c| c == CLASS_OBSTACLE_BASE));
    }

    #[test]
    fn resolution_checks() {
        let s = Scene::open(pose(10.0, 0.0), [400.0, 0.0, 0.0]);
        assert!(render_view(&s, &s.start, Camera::Front, 15).is_err());
        assert!(render_view(&s, &s.start, Camera::Front, 8).is_err());
        let a = ViewGrid::constant(Camera::Front, 32, 1.0, 0);
        let b = ViewGrid::constant(Camera::Down, 48, 1.0, 0);
        assert!(matches!(compose(&a, &b), Err(Error::ResolutionMismatch { .. })));
    }

    #[test]
    fn constant_halves() {
        let a = ViewGrid::constant(Camera::Front, 48, 3.0, 4);
        let b = ViewGrid::constant(Camera::Down, 48, 7.0, 1);
        let c = compose(&a, &b).unwrap();
        assert_eq!(c.seam_row, 112);
        assert!(c.seam_on_patch_boundary());
        for r in 0..224 {
            for col in 0..224 {
                let (d, k) = c.at(r, col);
                if r < 112 {
                    assert!((d - 3.0).abs() < 1e-6 && k == 4);
                } else {
                    assert!((d - 7.0).abs() < 1e-6 && k == 1);
                }
            }
        }
    }

    #[test]
    fn identical_inputs_identical_halves() {
        let s = Scene::open(pose(10.0, 0.0), [60.0, 10.0, 0.0]);
        let v = render_view(&s, &s.start, Camera::Front, 32).unwrap();
        let c = compose(&v, &v).unwrap();
        let half = 112 * 224;
        assert_eq!(c.depth[..half], c.depth[half..]);
        assert_eq!(c.class[..half], c.class[half..]);
    }

    #[test]
    fn upsampling_weights_are_normalized() {
        for (src, dst) in [(16, 112), (100, 112), (112, 112), (300, 224), (7, 3)] {
            for w in area_weights(src, dst) {
                let total: f64 = w.iter().map(|p| p.1).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pgm_header() {
        let a = ViewGrid::constant(Camera::Front, 16, 0.0, 0);
        let b = ViewGrid::constant(Camera::Down, 16, 100.0, 0);
        let pgm = compose(&a, &b).unwrap().to_pgm();
        let header = b"P5\n224 224\n255\n";
        assert!(pgm.starts_with(header));
        assert_eq!(pgm.len(), header.len() + 224 * 224);
        assert_eq!(pgm[header.len()], 255);
        assert_eq!(*pgm.last().unwrap(), 0);
    }
}
