//! Tabular behavior cloning over discretized observations.
//!
//! For a count model, minimizing the negative log-likelihood of the expert
//! tokens is frequency estimation per feature key. Each key holds one
//! 99-way table per action dimension plus a land/continue pair; the three
//! dimensions are treated as independent given the key. Unseen keys back
//! off to tables keyed by hint alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::{ActionTokens, Dim, TokenTriple, NUM_BINS};
use crate::episode::{Decision, Frame, Observation, Policy, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{horizontal_distance, Pose};
use crate::prompting::FuzzyHint;
use crate::sim::{DepthProbe, Scene};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const BINS: usize = NUM_BINS as usize;

/// Horizontal distance bucket edges, meters.
pub const DISTANCE_EDGES: [f64; 4] = [5.0, 20.0, 50.0, 150.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub hover_offset: f64,
    /// Half-width of the "level" altitude band, meters.
    pub altitude_band: f64,
    /// Forward depth strictly below this is blocked.
    pub forward_blocked_below: f64,
    /// Target-side lateral depth at or below this is blocked.
    pub side_blocked_at_most: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            hover_offset: 5.0,
            altitude_band: 2.0,
            forward_blocked_below: 12.0,
            side_blocked_at_most: 20.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltitudeBucket {
    Below,
    Level,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureKey {
    pub hint: FuzzyHint,
    /// Index into the distance buckets: [0,5), [5,20), [20,50), [50,150), [150,inf).
    pub distance: u8,
    pub altitude: AltitudeBucket,
    pub forward_blocked: bool,
    pub side_blocked: bool,
}

impl FeatureKey {
    pub const COUNT: usize = 7 * 5 * 3 * 2 * 2;

    pub fn index(&self) -> usize {
        let mut i = self.hint.index();
        i = i * 5 + usize::from(self.distance);
        i = i * 3 + self.altitude as usize;
        i = i * 2 + usize::from(self.forward_blocked);
        i * 2 + usize::from(self.side_blocked)
    }

    pub fn from_index(mut i: usize) -> Option<Self> {
        if i >= Self::COUNT {
            return None;
        }
        let side_blocked = i % 2 == 1;
        i /= 2;
        let forward_blocked = i % 2 == 1;
        i /= 2;
        let altitude = [AltitudeBucket::Below, AltitudeBucket::Level, AltitudeBucket::Above][i % 3];
        i /= 3;
        let distance = (i % 5) as u8;
        i /= 5;
        Some(Self {
            hint: FuzzyHint::ALL[i],
            distance,
            altitude,
            forward_blocked,
            side_blocked,
        })
    }

    pub fn from_parts(
        pose: &Pose<f64>,
        theta: f64,
        hint: FuzzyHint,
        probe: &DepthProbe,
        target: [f64; 3],
        cfg: &FeatureConfig,
    ) -> Self {
        let hd = horizontal_distance(pose, target);
        let distance = DISTANCE_EDGES.iter().take_while(|&&e| hd >= e).count() as u8;
        let diff = pose.z - (target[2] + cfg.hover_offset);
        let altitude = if diff < -cfg.altitude_band {
            AltitudeBucket::Below
        } else if diff > cfg.altitude_band {
            AltitudeBucket::Above
        } else {
            AltitudeBucket::Level
        };
        Self {
            hint,
            distance,
            altitude,
            forward_blocked: probe.forward < cfg.forward_blocked_below,
            side_blocked: probe.target_side(theta) <= cfg.side_blocked_at_most,
        }
    }

    pub fn from_frame(frame: &Frame, target: [f64; 3], cfg: &FeatureConfig) -> Self {
        Self::from_parts(&frame.pose, frame.theta, frame.hint, &frame.depth, target, cfg)
    }

    pub fn from_observation(obs: &Observation<'_>, cfg: &FeatureConfig) -> Self {
        Self::from_parts(
            &obs.pose,
            obs.theta.radians(),
            obs.hint,
            &obs.probe,
            obs.scene.target,
            cfg,
        )
    }
}

pub fn featurize(frame: &Frame, scene: &Scene, cfg: &FeatureConfig) -> FeatureKey {
    FeatureKey::from_frame(frame, scene.target, cfg)
}

/// Raw counts for one conditioning context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub dx: Vec<u64>,
    pub dz: Vec<u64>,
    pub dpsi: Vec<u64>,
    /// `[continue, land]`
    pub land: [u64; 2],
}

impl Default for Counts {
    fn default() -> Self {
        Self {
            dx: vec![0; BINS],
            dz: vec![0; BINS],
            dpsi: vec![0; BINS],
            land: [0, 0],
        }
    }
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.land[0] + self.land[1]
    }

    pub fn table(&self, dim: Dim) -> &[u64] {
        match dim {
            Dim::Forward => &self.dx,
            Dim::Vertical => &self.dz,
            Dim::Yaw => &self.dpsi,
        }
    }

    fn add(&mut self, label: &ActionTokens) {
        let (triple, land) = label_parts(label);
        self.dx[usize::from(triple.cx)] += 1;
        self.dz[usize::from(triple.cz)] += 1;
        self.dpsi[usize::from(triple.cpsi)] += 1;
        self.land[usize::from(land)] += 1;
    }

    pub fn merge(&mut self, other: &Counts) {
        for dim in Dim::ALL {
            let dst = match dim {
                Dim::Forward => &mut self.dx,
                Dim::Vertical => &mut self.dz,
                Dim::Yaw => &mut self.dpsi,
            };
            for (d, s) in dst.iter_mut().zip(other.table(dim)) {
                *d += s;
            }
        }
        self.land[0] += other.land[0];
        self.land[1] += other.land[1];
    }
}

/// Terminal LAND frames supervise the zero-displacement triple alongside
/// the land flag.
pub fn label_parts(label: &ActionTokens) -> (TokenTriple, bool) {
    match label {
        ActionTokens::Land => (TokenTriple::ZERO, true),
        ActionTokens::Triple(t) => (*t, false),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BcConfig {
    /// Laplace smoothing constant.
    pub alpha: f64,
    pub land_threshold: f64,
    pub features: FeatureConfig,
}

impl Default for BcConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            land_threshold: 0.5,
            features: FeatureConfig::default(),
        }
    }
}

/// Smoothed view over one counts table (or the uniform prior).
#[derive(Clone, Copy, Debug)]
pub struct Distribution<'a> {
    counts: Option<&'a Counts>,
    alpha: f64,
}

impl Distribution<'_> {
    pub fn prob(&self, dim: Dim, token: u8) -> f64 {
        match self.counts {
            None => 1.0 / BINS as f64,
            Some(c) => {
                let n = c.total() as f64;
                (c.table(dim)[usize::from(token)] as f64 + self.alpha) / (n + self.alpha * BINS as f64)
            }
        }
    }

    pub fn land_prob(&self) -> f64 {
        match self.counts {
            None => 0.5,
            Some(c) => (c.land[1] as f64 + self.alpha) / (c.total() as f64 + 2.0 * self.alpha),
        }
    }

    /// Most probable token; ties resolve to the smaller index.
    pub fn argmax(&self, dim: Dim) -> u8 {
        let Some(c) = self.counts else {
            return 0;
        };
        let table = c.table(dim);
        let mut best = 0usize;
        for (i, &v) in table.iter().enumerate() {
            if v > table[best] {
                best = i;
            }
        }
        best as u8
    }

    pub fn is_uniform(&self) -> bool {
        self.counts.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelRepr", try_from = "ModelRepr")]
pub struct TabularBcModel {
    pub config: BcConfig,
    /// Back-off returns the uniform prior instead of the hint marginals.
    pub cold_start: bool,
    pub frames: u64,
    keys: BTreeMap<FeatureKey, Counts>,
    marginals: BTreeMap<FuzzyHint, Counts>,
}

#[derive(Serialize, Deserialize)]
struct KeyEntry {
    key: FeatureKey,
    counts: Counts,
}

#[derive(Serialize, Deserialize)]
struct MarginalEntry {
    hint: FuzzyHint,
    counts: Counts,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    format_version: u32,
    alpha: f64,
    land_threshold: f64,
    cold_start: bool,
    features: FeatureConfig,
    frames: u64,
    keys: Vec<KeyEntry>,
    hint_marginals: Vec<MarginalEntry>,
}

impl From<TabularBcModel> for ModelRepr {
    fn from(m: TabularBcModel) -> Self {
        ModelRepr {
            format_version: MODEL_FORMAT_VERSION,
            alpha: m.config.alpha,
            land_threshold: m.config.land_threshold,
            cold_start: m.cold_start,
            features: m.config.features,
            frames: m.frames,
            keys: m
                .keys
                .into_iter()
                .map(|(key, counts)| KeyEntry { key, counts })
                .collect(),
            hint_marginals: m
                .marginals
                .into_iter()
                .map(|(hint, counts)| MarginalEntry { hint, counts })
                .collect(),
        }
    }
}

impl TryFrom<ModelRepr> for TabularBcModel {
    type Error = String;

    fn try_from(r: ModelRepr) -> std::result::Result<Self, Self::Error> {
        if r.format_version != MODEL_FORMAT_VERSION {
            return Err(format!("unsupported model format_version {}", r.format_version));
        }
        let check = |c: &Counts| {
            if c.dx.len() != BINS || c.dz.len() != BINS || c.dpsi.len() != BINS {
                Err(format!("count tables must have {BINS} entries"))
            } else {
                Ok(())
            }
        };
        for e in &r.keys {
            check(&e.counts)?;
        }
        for e in &r.hint_marginals {
            check(&e.counts)?;
        }
        Ok(TabularBcModel {
            config: BcConfig {
                alpha: r.alpha,
                land_threshold: r.land_threshold,
                features: r.features,
            },
            cold_start: r.cold_start,
            frames: r.frames,
            keys: r.keys.into_iter().map(|e| (e.key, e.counts)).collect(),
            marginals: r.hint_marginals.into_iter().map(|e| (e.hint, e.counts)).collect(),
        })
    }
}

/// One supervised example.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub key: FeatureKey,
    pub label: ActionTokens,
}

pub fn samples(trajectories: &[Trajectory], cfg: &FeatureConfig) -> Vec<Sample> {
    trajectories
        .iter()
        .flat_map(|tr| {
            tr.frames.iter().map(move |f| Sample {
                key: FeatureKey::from_frame(f, tr.target, cfg),
                label: f.action_label,
            })
        })
        .collect()
}

impl TabularBcModel {
    pub fn empty(config: BcConfig) -> Self {
        Self {
            config,
            cold_start: false,
            frames: 0,
            keys: BTreeMap::new(),
            marginals: BTreeMap::new(),
        }
    }

    pub fn train(samples: &[Sample], config: BcConfig) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("training frames"));
        }
        if !(config.alpha > 0.0) {
            return Err(Error::InvalidConfig("alpha must be positive".into()));
        }
        let mut m = Self::empty(config);
        for s in samples {
            m.keys.entry(s.key).or_default().add(&s.label);
            m.marginals.entry(s.key.hint).or_default().add(&s.label);
            m.frames += 1;
        }
        Ok(m)
    }

    pub fn train_on(trajectories: &[Trajectory], config: BcConfig) -> Result<Self> {
        Self::train(&samples(trajectories, &config.features), config)
    }

    /// Count-level merge; training on the concatenation of two datasets
    /// equals merging the two trained models.
    pub fn merge(&mut self, other: &TabularBcModel) {
        for (k, c) in &other.keys {
            self.keys.entry(*k).or_default().merge(c);
        }
        for (h, c) in &other.marginals {
            self.marginals.entry(*h).or_default().merge(c);
        }
        self.frames += other.frames;
    }

    pub fn with_cold_start(mut self, on: bool) -> Self {
        self.cold_start = on;
        self
    }

    pub fn key_counts(&self, key: &FeatureKey) -> Option<&Counts> {
        self.keys.get(key).filter(|c| c.total() > 0)
    }

    pub fn hint_counts(&self, hint: FuzzyHint) -> Option<&Counts> {
        self.marginals.get(&hint).filter(|c| c.total() > 0)
    }

    pub fn seen_keys(&self) -> impl Iterator<Item = &FeatureKey> {
        self.keys.keys()
    }

    pub fn distribution(&self, key: &FeatureKey) -> Distribution<'_> {
        let counts = self.key_counts(key).or_else(|| {
            if self.cold_start {
                None
            } else {
                self.hint_counts(key.hint)
            }
        });
        Distribution {
            counts,
            alpha: self.config.alpha,
        }
    }

    pub fn predict(&self, key: &FeatureKey) -> ActionTokens {
        let d = self.distribution(key);
        if d.land_prob() > self.config.land_threshold {
            return ActionTokens::Land;
        }
        ActionTokens::Triple(TokenTriple {
            cx: d.argmax(Dim::Forward),
            cz: d.argmax(Dim::Vertical),
            cpsi: d.argmax(Dim::Yaw),
        })
    }

    /// Negative log-likelihood of one labelled example, nats.
    pub fn sample_nll(&self, s: &Sample) -> f64 {
        let d = self.distribution(&s.key);
        let (triple, land) = label_parts(&s.label);
        let mut nll = 0.0;
        for dim in Dim::ALL {
            nll -= d.prob(dim, triple.get(dim)).ln();
        }
        let pl = d.land_prob();
        nll -= if land { pl } else { 1.0 - pl }.ln();
        nll
    }

    pub fn nll(&self, samples: &[Sample]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("evaluation frames"));
        }
        let sum: f64 = samples.iter().map(|s| self.sample_nll(s)).sum();
        Ok(sum / samples.len() as f64)
    }
}

/// Closed-loop wrapper: featurize the observation, predict tokens.
#[derive(Clone, Debug)]
pub struct BcPolicy<'m> {
    pub model: &'m TabularBcModel,
}

impl Policy for BcPolicy<'_> {
    fn act(&mut self, obs: &Observation<'_>) -> Decision {
        let key = FeatureKey::from_observation(obs, &self.model.config.features);
        Decision::Tokens(self.model.predict(&key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(hint: FuzzyHint, distance: u8) -> FeatureKey {
        FeatureKey {
            hint,
            distance,
            altitude: AltitudeBucket::Level,
            forward_blocked: false,
            side_blocked: false,
        }
    }

    fn triple(cx: u8, cz: u8, cpsi: u8) -> ActionTokens {
        ActionTokens::Triple(TokenTriple::new(cx, cz, cpsi).unwrap())
    }

    #[test]
    fn key_index_roundtrip() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..FeatureKey::COUNT {
            let k = FeatureKey::from_index(i).unwrap();
            assert_eq!(k.index(), i);
            seen.insert(k);
        }
        assert_eq!(seen.len(), 420);
        assert!(FeatureKey::from_index(420).is_none());
    }

    #[test]
    fn featurize_buckets() {
        let cfg = FeatureConfig::default();
        let probe = DepthProbe {
            forward: 100.0,
            left: 100.0,
            right: 100.0,
            down: 5.0,
        };
        let pose = Pose::new(0.0, 0.0, 5.0, 0.0).unwrap();
        let k = FeatureKey::from_parts(&pose, 0.0, FuzzyHint::StraightAhead, &probe, [0.0, 0.0, 0.0], &cfg);
        assert_eq!(k, key(FuzzyHint::StraightAhead, 0));
        let k = FeatureKey::from_parts(&pose, 0.0, FuzzyHint::StraightAhead, &probe, [100.0, 0.0, 0.0], &cfg);
        assert_eq!(k.distance, 3);
        let blocked = DepthProbe { forward: 11.9, ..probe };
        let k = FeatureKey::from_parts(&pose, 0.0, FuzzyHint::StraightAhead, &blocked, [100.0, 0.0, 0.0], &cfg);
        assert!(k.forward_blocked);
        let at_edge = DepthProbe { forward: 12.0, right: 20.0, ..probe };
        let k = FeatureKey::from_parts(&pose, 0.5, FuzzyHint::Right, &at_edge, [100.0, 0.0, 0.0], &cfg);
        assert!(!k.forward_blocked);
        assert!(k.side_blocked);
        let k = FeatureKey::from_parts(&pose, 0.0, FuzzyHint::StraightAhead, &probe, [150.0, 0.0, 0.0], &cfg);
        assert_eq!(k.distance, 4);
        let high = Pose::new(0.0, 0.0, 7.5, 0.0).unwrap();
        let k = FeatureKey::from_parts(&high, 0.0, FuzzyHint::StraightAhead, &probe, [1.0, 0.0, 0.0], &cfg);
        assert_eq!(k.altitude, AltitudeBucket::Above);
    }

    #[test]
    fn single_frame_argmax() {
        let s = Sample {
            key: key(FuzzyHint::Right, 2),
            label: triple(98, 49, 61),
        };
        let m = TabularBcModel::train(&[s], BcConfig::default()).unwrap();
        assert_eq!(m.predict(&s.key), s.label);
    }

    #[test]
    fn empty_training_fails() {
        assert!(matches!(
            TabularBcModel::train(&[], BcConfig::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn land_key_predicts_land() {
        let k = key(FuzzyHint::StraightAhead, 0);
        let s = Sample {
            key: k,
            label: ActionTokens::Land,
        };
        let m = TabularBcModel::train(&[s, s], BcConfig::default()).unwrap();
        assert_eq!(m.predict(&k), ActionTokens::Land);
    }

    #[test]
    fn backoff_and_cold_start() {
        let s = Sample {
            key: key(FuzzyHint::Left, 2),
            label: triple(98, 49, 37),
        };
        let m = TabularBcModel::train(&[s, s, s], BcConfig::default()).unwrap();
        let unseen = key(FuzzyHint::Left, 4);
        assert_eq!(m.predict(&unseen), triple(98, 49, 37));
        let cold = m.clone().with_cold_start(true);
        assert_eq!(cold.predict(&unseen), triple(0, 0, 0));
        // seen keys are unaffected by the flag
        assert_eq!(cold.predict(&s.key), m.predict(&s.key));
        // no hint evidence at all => uniform either way
        assert_eq!(m.predict(&key(FuzzyHint::Right, 1)), triple(0, 0, 0));
    }

    #[test]
    fn uniform_nll() {
        let m = TabularBcModel::empty(BcConfig::default());
        let s = Sample {
            key: key(FuzzyHint::Right, 1),
            label: triple(3, 4, 5),
        };
        let expected = 3.0 * 99f64.ln() + 2f64.ln();
        assert!((m.sample_nll(&s) - expected).abs() < 1e-12);
        assert!(m.nll(&[]).is_err());
    }

    #[test]
    fn repeated_frame_nll_shrinks() {
        let s = Sample {
            key: key(FuzzyHint::Right, 1),
            label: triple(3, 4, 5),
        };
        let mut last = f64::INFINITY;
        for n in [1usize, 2, 5, 20] {
            let data = vec![s; n];
            let m = TabularBcModel::train(&data, BcConfig::default()).unwrap();
            let nf = n as f64;
            let expected = 3.0 * ((nf + 99.0) / (nf + 1.0)).ln() + ((nf + 2.0) / (nf + 1.0)).ln();
            let got = m.nll(&data).unwrap();
            assert!((got - expected).abs() < 1e-12);
            assert!(got < last);
            last = got;
        }
    }

    #[test]
    fn serde_roundtrip() {
        let s = Sample {
            key: key(FuzzyHint::Right, 1),
            label: triple(3, 4, 5),
        };
        let m = TabularBcModel::train(&[s], BcConfig::default()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"format_version\":1"));
        assert!(json.contains("\"alpha\":1.0"));
        let back: TabularBcModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
