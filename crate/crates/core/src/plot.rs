//! Top-down SVG rendering of a trajectory over its scene.

use std::fmt::Write as _;

use crate::episode::{Status, Trajectory};
use crate::eval::SUCCESS_RADIUS;
use crate::sim::Scene;

const CANVAS: f64 = 800.0;
const PAD_M: f64 = 30.0;

/// World-to-canvas mapping (y flipped so +y points up).
#[derive(Clone, Copy, Debug)]
pub struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl View {
    pub fn fit(points: impl IntoIterator<Item = [f64; 2]>) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p[0]);
            y0 = y0.min(p[1]);
            x1 = x1.max(p[0]);
            y1 = y1.max(p[1]);
        }
        x0 -= PAD_M;
        y0 -= PAD_M;
        x1 += PAD_M;
        y1 += PAD_M;
        let span = (x1 - x0).max(y1 - y0).max(1.0);
        Self {
            min_x: x0,
            max_y: y1,
            scale: CANVAS / span,
        }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.min_x) * self.scale, (self.max_y - y) * self.scale)
    }

    pub fn length(&self, m: f64) -> f64 {
        m * self.scale
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Renders obstacles as rectangles, the path as a polyline, the success
/// radius as a circle around the target, and marks the landing point.
pub fn render_svg(traj: &Trajectory, scene: &Scene) -> String {
    let positions = traj.positions();
    let mut pts: Vec<[f64; 2]> = positions.iter().map(|p| [p[0], p[1]]).collect();
    pts.push([scene.target[0] - SUCCESS_RADIUS, scene.target[1] - SUCCESS_RADIUS]);
    pts.push([scene.target[0] + SUCCESS_RADIUS, scene.target[1] + SUCCESS_RADIUS]);
    let view = View::fit(pts);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(
        s,
        r#"<title>seed {} {} {}</title>"#,
        scene.seed,
        scene.difficulty.as_str(),
        traj.status.as_str()
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#fafafa"/>"##);
    for ob in &scene.obstacles {
        let (x, y) = view.map(ob.center[0] - ob.half_extents[0], ob.center[1] + ob.half_extents[1]);
        let _ = writeln!(
            s,
            r##"<rect class="obstacle" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#9e9e9e" stroke="#424242"/>"##,
            x,
            y,
            view.length(2.0 * ob.half_extents[0]),
            view.length(2.0 * ob.half_extents[1])
        );
    }
    let (tx, ty) = view.map(scene.target[0], scene.target[1]);
    let _ = writeln!(
        s,
        r##"<circle class="success-radius" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#2e7d32" stroke-dasharray="6 4"/>"##,
        tx,
        ty,
        view.length(SUCCESS_RADIUS)
    );
    let _ = writeln!(
        s,
        r##"<circle class="target" cx="{tx:.3}" cy="{ty:.3}" r="4" fill="#2e7d32"/>"##
    );
    let coords: Vec<String> = positions
        .iter()
        .map(|p| {
            let (x, y) = view.map(p[0], p[1]);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline class="path" points="{}" fill="none" stroke="#1565c0" stroke-width="2"/>"##,
        coords.join(" ")
    );
    let (sx, sy) = view.map(scene.start.x, scene.start.y);
    let _ = writeln!(s, r##"<circle class="start" cx="{sx:.3}" cy="{sy:.3}" r="4" fill="#1565c0"/>"##);
    let (ex, ey) = view.map(traj.final_pose.x, traj.final_pose.y);
    match traj.status {
        Status::Landed => {
            let _ = writeln!(
                s,
                r##"<path class="landing" d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" stroke="#c62828" stroke-width="3"/>"##,
                ex - 6.0,
                ey - 6.0,
                ex + 6.0,
                ey + 6.0,
                ex - 6.0,
                ey + 6.0,
                ex + 6.0,
                ey - 6.0
            );
        }
        Status::Collided | Status::Timeout => {
            let _ = writeln!(
                s,
                r##"<circle class="end" cx="{ex:.3}" cy="{ey:.3}" r="5" fill="none" stroke="#c62828"/>"##
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
