//! File-mediated pipeline stages: scenes, demonstrations, curation,
//! training and evaluation.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc::{samples, BcPolicy, TabularBcModel};
use crate::config::{Ablation, RunConfig};
use crate::curation::{filter_frames, FilterReport};
use crate::episode::{record_many, RandomTokens, RolloutOptions, Trajectory};
use crate::error::Result;
use crate::eval::{results_csv, score_episode, summarize, EpisodeResult, MetricsSummary};
use crate::expert::{inject_reaction_delay, ExpertPilot};
use crate::io::{read_json, read_scene_dir, read_trajectories, scene_file_name, write_atomic, write_json, write_trajectories};
use crate::mosaic::composite_observation;
use crate::plot::render_svg;
use crate::sim::{generate_scene, Scene};

pub const CONFIG_SNAPSHOT_FILE: &str = "config.json";
pub const DEMOS_FILE: &str = "demos.jsonl";
pub const CURATED_FILE: &str = "curated.jsonl";
pub const FILTER_REPORT_FILE: &str = "filter_report.json";
pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_LOG_FILE: &str = "train_log.json";
pub const EVAL_CSV_FILE: &str = "eval.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const EVAL_TRAJ_FILE: &str = "eval_trajectories.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Heldout,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Heldout => "heldout",
        }
    }
}

pub fn scenes_dir(out: &Path, split: Split) -> PathBuf {
    out.join("scenes").join(split.as_str())
}

pub fn generate_scenes(cfg: &RunConfig, split: Split) -> Result<Vec<Scene>> {
    let (seeds, params) = match split {
        Split::Train => (cfg.train_seeds, cfg.gen_params(false)),
        Split::Heldout => (cfg.heldout_seeds, cfg.gen_params(true)),
    };
    seeds
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&seed| generate_scene(seed, cfg.difficulty.for_seed(seed), &params))
        .collect()
}

pub fn write_scenes(dir: &Path, scenes: &[Scene]) -> Result<()> {
    for s in scenes {
        let mut text = s.to_json();
        text.push('\n');
        write_atomic(&dir.join(scene_file_name(s.seed)), text.as_bytes())?;
    }
    Ok(())
}

/// Expert demonstrations with `cfg.delay_k` reaction-delay frames.
pub fn record_demos(cfg: &RunConfig, scenes: &[Scene]) -> Result<Vec<Trajectory>> {
    let expert = ExpertPilot::new(cfg.expert);
    let k = cfg.delay_k;
    let opts = RolloutOptions {
        landing: true,
        ..cfg.rollout_options()
    };
    record_many(scenes, |_| inject_reaction_delay(expert.clone(), k), &opts)
}

/// Composite observation at each scene's start pose, as PGM bytes.
pub fn dump_composites(cfg: &RunConfig, scenes: &[Scene], dir: &Path) -> Result<()> {
    for s in scenes {
        let comp = composite_observation(s, &s.start, cfg.view_resolution)?;
        write_atomic(&dir.join(format!("composite_{:08}.pgm", s.seed)), &comp.to_pgm())?;
    }
    Ok(())
}

/// Applies the geometry-consistent filter, or passes data through untouched.
pub fn curate(cfg: &RunConfig, trajs: &[Trajectory]) -> (Vec<Trajectory>, FilterReport) {
    if cfg.filter {
        filter_frames(trajs, &cfg.curation)
    } else {
        let total = trajs.iter().map(|t| t.frames.len()).sum();
        (
            trajs.to_vec(),
            FilterReport {
                total_frames: total,
                ..FilterReport::default()
            },
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub format_version: u32,
    pub frames: u64,
    pub keys_seen: usize,
    pub training_nll: f64,
}

pub fn train(cfg: &RunConfig, trajs: &[Trajectory]) -> Result<(TabularBcModel, TrainLog)> {
    let data = samples(trajs, &cfg.bc.features);
    let model = TabularBcModel::train(&data, cfg.bc)?;
    let log = TrainLog {
        format_version: 1,
        frames: model.frames,
        keys_seen: model.seen_keys().count(),
        training_nll: model.nll(&data)?,
    };
    Ok((model, log))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Bc,
    Expert,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub format_version: u32,
    pub policy: PolicyKind,
    pub ablation: Option<Ablation>,
    pub metrics: MetricsSummary,
}

pub struct Evaluation {
    pub trajectories: Vec<Trajectory>,
    pub results: Vec<EpisodeResult>,
    pub summary: EvalSummary,
}

pub fn evaluate(
    cfg: &RunConfig,
    policy: PolicyKind,
    model: Option<&TabularBcModel>,
    scenes: &[Scene],
) -> Result<Evaluation> {
    let opts = cfg.rollout_options();
    let trajectories = match policy {
        PolicyKind::Expert => {
            let e = ExpertPilot::new(cfg.expert);
            record_many(scenes, |_| e.clone(), &opts)?
        }
        PolicyKind::Random => record_many(scenes, |_| RandomTokens::new(0x5eed), &opts)?,
        PolicyKind::Bc => {
            let base = model.ok_or(crate::error::Error::EmptyInput("model for bc evaluation"))?;
            let m = base.clone().with_cold_start(cfg.ablation == Some(Ablation::ColdStart));
            record_many(scenes, |_| BcPolicy { model: &m }, &opts)?
        }
    };
    let results = trajectories
        .iter()
        .zip(scenes)
        .map(|(t, s)| score_episode(t, s, cfg.success_radius))
        .collect::<Result<Vec<_>>>()?;
    let metrics = summarize(&results)?;
    Ok(Evaluation {
        trajectories,
        results,
        summary: EvalSummary {
            format_version: 1,
            policy,
            ablation: cfg.ablation,
            metrics,
        },
    })
}

pub fn write_evaluation(out: &Path, ev: &Evaluation) -> Result<()> {
    write_atomic(&out.join(EVAL_CSV_FILE), results_csv(&ev.results).as_bytes())?;
    write_json(&out.join(SUMMARY_FILE), &ev.summary)?;
    write_trajectories(&out.join(EVAL_TRAJ_FILE), &ev.trajectories)
}

pub fn write_plots(dir: &Path, trajs: &[Trajectory], scenes: &[Scene]) -> Result<usize> {
    let mut n = 0;
    for t in trajs {
        if let Some(s) = scenes.iter().find(|s| s.seed == t.scene_seed && s.difficulty == t.difficulty) {
            write_atomic(
                &dir.join(format!("traj_{:08}.svg", t.scene_seed)),
                render_svg(t, s).as_bytes(),
            )?;
            n += 1;
        }
    }
    Ok(n)
}

/// Everything a full run produced, in memory.
pub struct RunArtifacts {
    pub demos: Vec<Trajectory>,
    pub curated: Vec<Trajectory>,
    pub report: FilterReport,
    pub model: TabularBcModel,
    pub train_log: TrainLog,
    pub evaluation: Evaluation,
}

/// Full pipeline: scenes, record, curate, train, eval, written under
/// `cfg.out_dir`.
pub fn run_all(cfg: &RunConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    // snapshot is relative to the output dir so two runs compare byte-equal
    let snapshot = RunConfig {
        out_dir: PathBuf::from("."),
        ..cfg.clone()
    };
    write_json(&out.join(CONFIG_SNAPSHOT_FILE), &snapshot)?;

    let train_scenes = generate_scenes(cfg, Split::Train)?;
    let heldout_scenes = generate_scenes(cfg, Split::Heldout)?;
    write_scenes(&scenes_dir(out, Split::Train), &train_scenes)?;
    write_scenes(&scenes_dir(out, Split::Heldout), &heldout_scenes)?;

    let demos = record_demos(cfg, &train_scenes)?;
    write_trajectories(&out.join(DEMOS_FILE), &demos)?;

    let (curated, report) = curate(cfg, &demos);
    write_trajectories(&out.join(CURATED_FILE), &curated)?;
    write_json(&out.join(FILTER_REPORT_FILE), &report)?;

    let (model, train_log) = train(cfg, &curated)?;
    write_json(&out.join(MODEL_FILE), &model)?;
    write_json(&out.join(TRAIN_LOG_FILE), &train_log)?;

    let evaluation = evaluate(cfg, PolicyKind::Bc, Some(&model), &heldout_scenes)?;
    write_evaluation(out, &evaluation)?;

    Ok(RunArtifacts {
        demos,
        curated,
        report,
        model,
        train_log,
        evaluation,
    })
}

pub fn load_model(path: &Path) -> Result<TabularBcModel> {
    read_json(path)
}

pub fn load_scenes(dir: &Path) -> Result<Vec<Scene>> {
    read_scene_dir(dir)
}

pub fn load_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    read_trajectories(path)
}
