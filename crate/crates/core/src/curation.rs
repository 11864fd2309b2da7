//! Geometry-consistent filtering of demonstration frames.
//!
//! A frame is ambiguous when the target bears far off to the side while the
//! expert label keeps flying straight. Ambiguous frames are discarded when
//! the target-side lateral space is clear, and retained as evasions when an
//! obstacle is close on that side.

use serde::{Deserialize, Serialize};

use crate::codec::{dequantize_triple, Action, Dim};
use crate::episode::{Frame, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// |theta| above which the target counts as lateral, degrees.
    pub lateral_bearing_deg: f64,
    /// Target-side depth above which the side is considered clear, meters.
    pub lateral_clear_m: f64,
    /// Near-zero yaw threshold, in token bins.
    pub near_zero_yaw_bins: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            lateral_bearing_deg: 60.0,
            lateral_clear_m: 20.0,
            near_zero_yaw_bins: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total_frames: usize,
    pub inspected: usize,
    pub discarded: usize,
    pub retained_evasions: usize,
    pub discard_fraction: f64,
}

impl FilterReport {
    /// Combines two reports; associative, so per-shard reports can be folded.
    pub fn merge(&self, other: &FilterReport) -> FilterReport {
        let total_frames = self.total_frames + other.total_frames;
        let discarded = self.discarded + other.discarded;
        FilterReport {
            total_frames,
            inspected: self.inspected + other.inspected,
            discarded,
            retained_evasions: self.retained_evasions + other.retained_evasions,
            discard_fraction: fraction(discarded, total_frames),
        }
    }
}

fn fraction(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

pub fn frame_is_ambiguous(frame: &Frame, cfg: &FilterConfig) -> bool {
    let Some(triple) = frame.action_label.triple() else {
        return false;
    };
    if frame.theta.abs() <= cfg.lateral_bearing_deg.to_radians() {
        return false;
    }
    let a: Action<f64> = match dequantize_triple(&triple) {
        Ok(a) => a,
        Err(_) => return false,
    };
    let threshold = cfg.near_zero_yaw_bins * Dim::Yaw.bin_width::<f64>() * (1.0 + 1e-9);
    a.dpsi.abs() <= threshold
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    RetainEvasion,
    Discard,
}

pub fn classify(frame: &Frame, cfg: &FilterConfig) -> Verdict {
    if !frame_is_ambiguous(frame, cfg) {
        return Verdict::Keep;
    }
    if frame.depth.target_side(frame.theta) > cfg.lateral_clear_m {
        Verdict::Discard
    } else {
        Verdict::RetainEvasion
    }
}

/// Filters every trajectory in place order, dropping discarded frames.
pub fn filter_frames(trajectories: &[Trajectory], cfg: &FilterConfig) -> (Vec<Trajectory>, FilterReport) {
    let mut report = FilterReport::default();
    let kept = trajectories
        .iter()
        .map(|tr| {
            let mut out = tr.clone();
            out.frames.clear();
            for f in &tr.frames {
                report.total_frames += 1;
                match classify(f, cfg) {
                    Verdict::Keep => out.frames.push(f.clone()),
                    Verdict::RetainEvasion => {
                        report.inspected += 1;
                        report.retained_evasions += 1;
                        out.frames.push(f.clone());
                    }
                    Verdict::Discard => {
                        report.inspected += 1;
                        report.discarded += 1;
                    }
                }
            }
            out
        })
        .collect();
    report.discard_fraction = fraction(report.discarded, report.total_frames);
    (kept, report)
}
