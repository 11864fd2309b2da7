//! Grid route planning around obstacle footprints, used by the scripted
//! expert to avoid getting trapped in front of walls.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::sim::Scene;

/// Horizontal planning grid over a sub-rectangle of the scene bounds.
struct Grid {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    blocked: Vec<bool>,
}

impl Grid {
    fn new(scene: &Scene, from: [f64; 2], to: [f64; 2], cell: f64, margin: f64, clearance: f64) -> Self {
        let lo = [
            (from[0].min(to[0]) - margin).max(scene.bounds.min[0] + cell),
            (from[1].min(to[1]) - margin).max(scene.bounds.min[1] + cell),
        ];
        let hi = [
            (from[0].max(to[0]) + margin).min(scene.bounds.max[0] - cell),
            (from[1].max(to[1]) + margin).min(scene.bounds.max[1] - cell),
        ];
        let nx = (((hi[0] - lo[0]) / cell).ceil() as usize).max(1) + 1;
        let ny = (((hi[1] - lo[1]) / cell).ceil() as usize).max(1) + 1;
        let mut g = Grid {
            origin: lo,
            cell,
            nx,
            ny,
            blocked: vec![false; nx * ny],
        };
        for j in 0..ny {
            for i in 0..nx {
                let [x, y] = g.center(i + j * nx);
                g.blocked[i + j * nx] = scene
                    .obstacles
                    .iter()
                    .any(|o| o.footprint_distance(x, y) < clearance);
            }
        }
        g
    }

    fn center(&self, idx: usize) -> [f64; 2] {
        let (i, j) = (idx % self.nx, idx / self.nx);
        [
            self.origin[0] + i as f64 * self.cell,
            self.origin[1] + j as f64 * self.cell,
        ]
    }

    fn nearest(&self, p: [f64; 2]) -> usize {
        let i = ((p[0] - self.origin[0]) / self.cell).round().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = ((p[1] - self.origin[1]) / self.cell).round().clamp(0.0, (self.ny - 1) as f64) as usize;
        i + j * self.nx
    }

    fn octile(&self, a: usize, b: usize) -> u32 {
        let dx = (a % self.nx).abs_diff(b % self.nx) as u32;
        let dy = (a / self.nx).abs_diff(b / self.nx) as u32;
        10 * dx.max(dy) + 4 * dx.min(dy)
    }
}

/// Shortest 8-connected grid path from `from` to `to` avoiding cells within
/// `clearance` of any obstacle footprint. Returns waypoints ending exactly
/// at `to`, or `None` when the goal is unreachable inside the grid.
pub fn plan_route(scene: &Scene, from: [f64; 2], to: [f64; 2], cell: f64, clearance: f64) -> Option<Vec<[f64; 2]>> {
    let grid = Grid::new(scene, from, to, cell, 80.0, clearance);
    let start = grid.nearest(from);
    let goal = grid.nearest(to);
    let n = grid.nx * grid.ny;
    let mut blocked = grid.blocked.clone();
    blocked[start] = false;
    blocked[goal] = false;

    let mut cost = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut open = BinaryHeap::new();
    cost[start] = 0;
    open.push(Reverse((grid.octile(start, goal), start)));
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);

    while let Some(Reverse((_, cur))) = open.pop() {
        if cur == goal {
            break;
        }
        let (ci, cj) = ((cur % grid.nx) as isize, (cur / grid.nx) as isize);
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let (ni, nj) = (ci + di, cj + dj);
            if ni < 0 || nj < 0 || ni >= nx || nj >= ny {
                continue;
            }
            let next = (ni + nj * nx) as usize;
            if blocked[next] {
                continue;
            }
            let diagonal = di != 0 && dj != 0;
            if diagonal && (blocked[(ci + di + cj * nx) as usize] || blocked[(ci + (cj + dj) * nx) as usize]) {
                continue;
            }
            let g = cost[cur] + if diagonal { 14 } else { 10 };
            if g < cost[next] {
                cost[next] = g;
                parent[next] = cur;
                open.push(Reverse((g + grid.octile(next, goal), next)));
            }
        }
    }
    if cost[goal] == u32::MAX {
        return None;
    }
    let mut cells = vec![goal];
    while let Some(&last) = cells.last() {
        if last == start {
            break;
        }
        cells.push(parent[last]);
    }
    cells.reverse();
    let mut path: Vec<[f64; 2]> = cells[1..].iter().map(|&c| grid.center(c)).collect();
    path.pop();
    path.push(to);
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose;
    use crate::sim::Obstacle;

    #[test]
    fn open_scene_is_nearly_straight() {
        let s = Scene::open(Pose::new(0.0, 0.0, 10.0, 0.0).unwrap(), [60.0, 0.0, 0.0]);
        let p = plan_route(&s, [0.0, 0.0], [60.0, 0.0], 2.0, 4.0).unwrap();
        assert_eq!(*p.last().unwrap(), [60.0, 0.0]);
        assert!(p.iter().all(|w| w[1].abs() < 1e-9));
    }

    #[test]
    fn detours_around_wall() {
        let mut s = Scene::open(Pose::new(0.0, 0.0, 10.0, 0.0).unwrap(), [60.0, 0.0, 0.0]);
        s.obstacles.push(Obstacle {
            center: [30.0, 0.0, 25.0],
            half_extents: [1.0, 20.0, 25.0],
        });
        let p = plan_route(&s, [0.0, 0.0], [60.0, 0.0], 2.0, 4.0).unwrap();
        for w in &p[..p.len() - 1] {
            assert!(s.obstacles[0].footprint_distance(w[0], w[1]) >= 4.0);
        }
        assert!(p.iter().any(|w| w[1].abs() > 20.0));
    }

    #[test]
    fn enclosed_goal_is_unreachable() {
        let mut s = Scene::open(Pose::new(0.0, 0.0, 10.0, 0.0).unwrap(), [60.0, 0.0, 0.0]);
        for (c, h) in [
            ([60.0, 15.0], [16.0, 1.0]),
            ([60.0, -15.0], [16.0, 1.0]),
            ([45.0, 0.0], [1.0, 16.0]),
            ([75.0, 0.0], [1.0, 16.0]),
        ] {
            s.obstacles.push(Obstacle {
                center: [c[0], c[1], 25.0],
                half_extents: [h[0], h[1], 25.0],
            });
        }
        assert!(plan_route(&s, [0.0, 0.0], [60.0, 0.0], 2.0, 4.0).is_none());
    }
}
