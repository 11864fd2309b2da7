//! Navigation error, success, oracle success and SPL.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::episode::{record_episode, Policy, RolloutOptions, Status, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::distance3;
use crate::sim::{Difficulty, Scene};

pub const RESULTS_FORMAT_VERSION: u32 = 1;
/// Success radius around the target, meters.
pub const SUCCESS_RADIUS: f64 = 20.0;

pub fn rollout<P: Policy + ?Sized>(scene: &Scene, policy: &mut P, opts: &RolloutOptions) -> Result<Trajectory> {
    record_episode(scene, policy, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub status: Status,
    pub ne: f64,
    pub success: bool,
    pub oracle_success: bool,
    pub path_length: f64,
    pub shortest_path: f64,
    pub spl: f64,
    pub steps: usize,
}

/// Scores one trajectory. Success needs a landed status within the radius;
/// oracle success only needs some visited position within the radius.
pub fn score_episode(traj: &Trajectory, scene: &Scene, success_radius: f64) -> Result<EpisodeResult> {
    if traj.frames.is_empty() {
        return Err(Error::EmptyInput("trajectory frames"));
    }
    let positions = traj.positions();
    let path_length: f64 = positions.windows(2).map(|w| distance3(w[0], w[1])).sum();
    let min_dist = positions
        .iter()
        .map(|&p| distance3(p, scene.target))
        .fold(f64::INFINITY, f64::min);
    let ne = distance3(traj.final_pose.position(), scene.target);
    let success = traj.status == Status::Landed && ne <= success_radius;
    let shortest_path = scene.start_target_distance();
    let spl = if success {
        shortest_path / path_length.max(shortest_path)
    } else {
        0.0
    };
    Ok(EpisodeResult {
        seed: scene.seed,
        difficulty: scene.difficulty,
        status: traj.status,
        ne,
        success,
        oracle_success: min_dist <= success_radius,
        path_length,
        shortest_path,
        spl,
        steps: traj.frames.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub n: usize,
    pub sr: f64,
    pub osr: f64,
    pub spl: f64,
    pub mean_ne: f64,
}

fn breakdown<'a>(results: impl Iterator<Item = &'a EpisodeResult>) -> Breakdown {
    let mut n = 0usize;
    let (mut s, mut o, mut spl, mut ne) = (0usize, 0usize, 0.0, 0.0);
    for r in results {
        n += 1;
        s += usize::from(r.success);
        o += usize::from(r.oracle_success);
        spl += r.spl;
        ne += r.ne;
    }
    let nf = n as f64;
    Breakdown {
        n,
        sr: 100.0 * s as f64 / nf,
        osr: 100.0 * o as f64 / nf,
        spl: 100.0 * spl / nf,
        mean_ne: ne / nf,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub format_version: u32,
    pub n: usize,
    pub sr: f64,
    pub osr: f64,
    pub spl: f64,
    pub mean_ne: f64,
    pub by_difficulty: BTreeMap<String, Breakdown>,
}

impl MetricsSummary {
    /// `spl <= sr <= osr`, all within [0, 100].
    pub fn is_consistent(&self) -> bool {
        let ok = |b: &Breakdown| 0.0 <= b.spl && b.spl <= b.sr + 1e-9 && b.sr <= b.osr && b.osr <= 100.0;
        ok(&self.overall()) && self.by_difficulty.values().all(ok)
    }

    pub fn overall(&self) -> Breakdown {
        Breakdown {
            n: self.n,
            sr: self.sr,
            osr: self.osr,
            spl: self.spl,
            mean_ne: self.mean_ne,
        }
    }
}

pub fn summarize(results: &[EpisodeResult]) -> Result<MetricsSummary> {
    if results.is_empty() {
        return Err(Error::EmptyInput("episode results"));
    }
    let all = breakdown(results.iter());
    let mut by_difficulty = BTreeMap::new();
    for d in [Difficulty::Easy, Difficulty::Hard] {
        if results.iter().any(|r| r.difficulty == d) {
            by_difficulty.insert(
                d.as_str().to_owned(),
                breakdown(results.iter().filter(|r| r.difficulty == d)),
            );
        }
    }
    Ok(MetricsSummary {
        format_version: RESULTS_FORMAT_VERSION,
        n: all.n,
        sr: all.sr,
        osr: all.osr,
        spl: all.spl,
        mean_ne: all.mean_ne,
        by_difficulty,
    })
}

pub const CSV_HEADER: &str =
    "format_version,seed,difficulty,status,ne,success,oracle_success,path_length,shortest_path,spl,steps";

pub fn results_csv(results: &[EpisodeResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            RESULTS_FORMAT_VERSION,
            r.seed,
            r.difficulty.as_str(),
            r.status.as_str(),
            r.ne,
            r.success,
            r.oracle_success,
            r.path_length,
            r.shortest_path,
            r.spl,
            r.steps
        );
    }
    out
}
