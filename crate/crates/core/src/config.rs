//! Run configuration shared by every pipeline stage.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bc::BcConfig;
use crate::curation::FilterConfig;
use crate::episode::{RolloutOptions, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::eval::SUCCESS_RADIUS;
use crate::expert::ExpertConfig;
use crate::sim::{Difficulty, GenParams, UAV_RADIUS};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

/// Half-open seed range `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn new(start: u64, end: u64) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &SeedRange) -> bool {
        !self.is_empty() && !other.is_empty() && self.start < other.end && other.start < self.end
    }

    pub fn iter(&self) -> std::ops::Range<u64> {
        self.start..self.end
    }
}

impl fmt::Display for SeedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for SeedRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("seed range {s:?} is not of the form a..b"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        if end <= start {
            return Err(Error::InvalidConfig(format!("seed range {s:?} is empty")));
        }
        Ok(Self { start, end })
    }
}

impl Serialize for SeedRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SeedRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifficultyMix {
    Easy,
    Hard,
    /// Even seeds easy, odd seeds hard.
    Alternate,
}

impl DifficultyMix {
    pub fn for_seed(self, seed: u64) -> Difficulty {
        match self {
            DifficultyMix::Easy => Difficulty::Easy,
            DifficultyMix::Hard => Difficulty::Hard,
            DifficultyMix::Alternate if seed % 2 == 1 => Difficulty::Hard,
            DifficultyMix::Alternate => Difficulty::Easy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ablation {
    /// Back-off to the uniform prior instead of hint marginals.
    #[serde(rename = "cold-start")]
    ColdStart,
    /// Accepted for interface parity; perception is not learned here, so
    /// extra views change nothing.
    #[serde(rename = "5-view-noop")]
    FiveViewNoop,
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cold-start" => Ok(Ablation::ColdStart),
            "5-view-noop" => Ok(Ablation::FiveViewNoop),
            other => Err(Error::InvalidConfig(format!("unknown ablation {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    pub train_seeds: SeedRange,
    pub heldout_seeds: SeedRange,
    pub difficulty: DifficultyMix,
    /// Shared generator settings; `lateral_start` is overridden per split.
    pub generation: GenParams,
    /// Force |theta| > 60 deg at the start of training scenes.
    pub train_lateral_start: bool,
    /// Force |theta| > 60 deg at the start of held-out scenes.
    pub heldout_lateral_start: bool,
    /// Reaction-delay frames injected into demonstrations.
    pub delay_k: usize,
    pub filter: bool,
    pub ablation: Option<Ablation>,
    pub max_steps: usize,
    /// When false, evaluation rollouts ignore landing outputs (no-stop
    /// variant).
    pub landing: bool,
    pub out_dir: PathBuf,
    pub expert: ExpertConfig,
    pub curation: FilterConfig,
    pub bc: BcConfig,
    pub success_radius: f64,
    pub uav_radius: f64,
    /// Source view resolution used for composite dumps.
    pub view_resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            train_seeds: SeedRange::new(0, 200),
            heldout_seeds: SeedRange::new(100_000, 100_200),
            difficulty: DifficultyMix::Easy,
            generation: GenParams::default(),
            train_lateral_start: false,
            heldout_lateral_start: true,
            delay_k: 3,
            filter: true,
            ablation: None,
            max_steps: DEFAULT_MAX_STEPS,
            landing: true,
            out_dir: PathBuf::from("out"),
            expert: ExpertConfig::default(),
            curation: FilterConfig::default(),
            bc: BcConfig::default(),
            success_radius: SUCCESS_RADIUS,
            uav_radius: UAV_RADIUS,
            view_resolution: 64,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.format_version != CONFIG_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "config",
                found: self.format_version,
                expected: CONFIG_FORMAT_VERSION,
            });
        }
        if self.train_seeds.is_empty() || self.heldout_seeds.is_empty() {
            return bad("seed ranges must be non-empty".into());
        }
        if self.train_seeds.overlaps(&self.heldout_seeds) {
            return bad(format!(
                "train seeds {} and held-out seeds {} overlap",
                self.train_seeds, self.heldout_seeds
            ));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if !(self.success_radius > 0.0) || !(self.uav_radius > 0.0) {
            return bad("success_radius and uav_radius must be positive".into());
        }
        if !(self.bc.alpha > 0.0) {
            return bad("bc.alpha must be positive".into());
        }
        if self.view_resolution < 16 || self.view_resolution % 2 != 0 {
            return bad("view_resolution must be even and >= 16".into());
        }
        self.generation.validate()
    }

    /// Generator settings for the training (`heldout = false`) or held-out
    /// split.
    pub fn gen_params(&self, heldout: bool) -> GenParams {
        GenParams {
            lateral_start: if heldout {
                self.heldout_lateral_start
            } else {
                self.train_lateral_start
            },
            ..self.generation.clone()
        }
    }

    pub fn rollout_options(&self) -> RolloutOptions {
        RolloutOptions {
            max_steps: self.max_steps,
            landing: self.landing,
            uav_radius: self.uav_radius,
            ..RolloutOptions::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::parse(s, "<config>")
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(s: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|source| Error::Json {
            path: origin.into(),
            line: source.line(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}
