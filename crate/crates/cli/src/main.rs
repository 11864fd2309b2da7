//! `fuzzynav` command-line driver. Every stage reads and writes files under
//! the output directory, so stages compose and can be resumed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fuzzynav::codec_check::run_codec_checks;
use fuzzynav::config::{Ablation, RunConfig, SeedRange};
use fuzzynav::io::{write_atomic, write_json, write_trajectories};
use fuzzynav::pipeline::{self, PolicyKind, Split};
use fuzzynav::sim::Scene;
use fuzzynav::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "fuzzynav", version, about = "Fuzzy-hint UAV navigation pipeline")]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    filter: Option<Switch>,
    /// Reaction-delay frames injected into demonstrations.
    #[arg(long = "delay-k", global = true)]
    delay_k: Option<usize>,
    #[arg(long, global = true)]
    ablation: Option<Ablation>,
    /// Half-open seed range `a..b` selecting the scenes a command works on;
    /// for `run` it replaces the training seeds.
    #[arg(long = "seed-range", global = true)]
    seed_range: Option<SeedRange>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SplitArg {
    Train,
    Heldout,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Bc,
    Expert,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate scene JSON files.
    GenScenes {
        #[arg(long, value_enum, default_value = "all")]
        split: SplitArg,
    },
    /// Record expert demonstrations with reaction-delay injection.
    Record {
        /// Scene directory (default: <out>/scenes/train).
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Also write the start-pose composite observation of every scene
        /// as a PGM under <out>/composites.
        #[arg(long)]
        dump_composite: bool,
    },
    /// Apply the geometry-consistent filter.
    Curate {
        /// Demonstrations (default: <out>/demos.jsonl).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Fit the tabular behavior-cloning model.
    TrainBc {
        /// Training trajectories (default: <out>/curated.jsonl).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Closed-loop evaluation on held-out scenes.
    Eval {
        #[arg(long, value_enum, default_value = "bc")]
        policy: PolicyArg,
        /// Model file (default: <out>/model.json).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Scene directory (default: <out>/scenes/heldout).
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Ignore landing outputs and keep flying (no-stop variant).
        #[arg(long)]
        no_landing: bool,
    },
    /// Randomized codec property suite; exits nonzero on failure.
    CodecCheck {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Top-down SVG per trajectory.
    Plot {
        /// Trajectories (default: <out>/eval_trajectories.jsonl).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Scene directory (default: <out>/scenes/heldout).
        #[arg(long)]
        scenes: Option<PathBuf>,
    },
    /// All stages end to end: scenes, record, curate, train, eval.
    Run,
}

/// Failure of a command: a stable kind plus a one-line message.
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn emit_error(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": one_line(message) }));
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(f) = cli.filter {
        cfg.filter = matches!(f, Switch::On);
    }
    if let Some(k) = cli.delay_k {
        cfg.delay_k = k;
    }
    if let Some(a) = cli.ablation {
        cfg.ablation = Some(a);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn select(scenes: Vec<Scene>, range: Option<SeedRange>) -> Result<Vec<Scene>, Failure> {
    let Some(r) = range else {
        return Ok(scenes);
    };
    let picked: Vec<Scene> = scenes.into_iter().filter(|s| r.iter().contains(&s.seed)).collect();
    if picked.is_empty() {
        return Err(Error::EmptyInput("scenes in --seed-range").into());
    }
    Ok(picked)
}

fn or_default(p: &Option<PathBuf>, fallback: PathBuf) -> PathBuf {
    p.clone().unwrap_or(fallback)
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let mut cfg = resolve_config(cli)?;
    let out = cfg.out_dir.clone();
    match &cli.command {
        Command::GenScenes { split } => {
            let splits: &[Split] = match split {
                SplitArg::Train => &[Split::Train],
                SplitArg::Heldout => &[Split::Heldout],
                SplitArg::All => &[Split::Train, Split::Heldout],
            };
            if let Some(r) = cli.seed_range {
                match split {
                    SplitArg::Train => cfg.train_seeds = r,
                    SplitArg::Heldout => cfg.heldout_seeds = r,
                    SplitArg::All => {
                        return Err(Failure {
                            kind: "invalid_config",
                            message: "--seed-range needs --split train or --split heldout".into(),
                        })
                    }
                }
                cfg.validate()?;
            }
            let mut written = serde_json::Map::new();
            for &s in splits {
                let scenes = pipeline::generate_scenes(&cfg, s)?;
                pipeline::write_scenes(&pipeline::scenes_dir(&out, s), &scenes)?;
                written.insert(s.as_str().into(), json!(scenes.len()));
            }
            Ok(json!({ "command": "gen-scenes", "scenes": written }))
        }
        Command::Record { scenes, dump_composite } => {
            let dir = or_default(scenes, pipeline::scenes_dir(&out, Split::Train));
            let scenes = select(pipeline::load_scenes(&dir)?, cli.seed_range)?;
            let demos = pipeline::record_demos(&cfg, &scenes)?;
            let path = out.join(pipeline::DEMOS_FILE);
            write_trajectories(&path, &demos)?;
            if *dump_composite {
                pipeline::dump_composites(&cfg, &scenes, &out.join("composites"))?;
            }
            let frames: usize = demos.iter().map(|t| t.frames.len()).sum();
            let flagged: usize = demos
                .iter()
                .flat_map(|t| &t.frames)
                .filter(|f| f.delay_injected)
                .count();
            Ok(json!({
                "command": "record",
                "trajectories": demos.len(),
                "frames": frames,
                "delay_injected": flagged,
                "output": path,
            }))
        }
        Command::Curate { input } => {
            let src = or_default(input, out.join(pipeline::DEMOS_FILE));
            let dst = out.join(pipeline::CURATED_FILE);
            let demos = pipeline::load_trajectories(&src)?;
            let (curated, report) = pipeline::curate(&cfg, &demos);
            if cfg.filter {
                write_trajectories(&dst, &curated)?;
            } else {
                // pass-through keeps the exact input bytes
                let bytes = std::fs::read(&src).map_err(|e| Failure {
                    kind: "io",
                    message: format!("{}: {e}", src.display()),
                })?;
                write_atomic(&dst, &bytes)?;
            }
            write_json(&out.join(pipeline::FILTER_REPORT_FILE), &report)?;
            Ok(json!({ "command": "curate", "filter": cfg.filter, "report": report, "output": dst }))
        }
        Command::TrainBc { input } => {
            let src = or_default(input, out.join(pipeline::CURATED_FILE));
            let trajs = pipeline::load_trajectories(&src)?;
            let (model, log) = pipeline::train(&cfg, &trajs)?;
            write_json(&out.join(pipeline::MODEL_FILE), &model)?;
            write_json(&out.join(pipeline::TRAIN_LOG_FILE), &log)?;
            Ok(json!({ "command": "train-bc", "log": log }))
        }
        Command::Eval {
            policy,
            model,
            scenes,
            no_landing,
        } => {
            if *no_landing {
                cfg.landing = false;
            }
            let dir = or_default(scenes, pipeline::scenes_dir(&out, Split::Heldout));
            let scenes = select(pipeline::load_scenes(&dir)?, cli.seed_range)?;
            let kind = match policy {
                PolicyArg::Bc => PolicyKind::Bc,
                PolicyArg::Expert => PolicyKind::Expert,
                PolicyArg::Random => PolicyKind::Random,
            };
            let model = match kind {
                PolicyKind::Bc => Some(pipeline::load_model(&or_default(model, out.join(pipeline::MODEL_FILE)))?),
                _ => None,
            };
            let ev = pipeline::evaluate(&cfg, kind, model.as_ref(), &scenes)?;
            pipeline::write_evaluation(&out, &ev)?;
            Ok(json!({ "command": "eval", "summary": ev.summary }))
        }
        Command::CodecCheck { samples, seed } => {
            let outcomes = run_codec_checks(*samples, *seed);
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
            if !failed.is_empty() {
                return Err(Failure {
                    kind: "codec_check",
                    message: format!("failed checks: {}", failed.join(", ")),
                });
            }
            Ok(json!({ "command": "codec-check", "checks": outcomes }))
        }
        Command::Plot { input, scenes } => {
            let src = or_default(input, out.join(pipeline::EVAL_TRAJ_FILE));
            let trajs = pipeline::load_trajectories(&src)?;
            let dir = or_default(scenes, pipeline::scenes_dir(&out, Split::Heldout));
            let scenes = pipeline::load_scenes(&dir)?;
            let plot_dir = out.join("plots");
            let n = pipeline::write_plots(&plot_dir, &trajs, &scenes)?;
            Ok(json!({ "command": "plot", "plots": n, "output": plot_dir }))
        }
        Command::Run => {
            if let Some(r) = cli.seed_range {
                cfg.train_seeds = r;
                cfg.validate()?;
            }
            let art = pipeline::run_all(&cfg)?;
            Ok(json!({
                "command": "run",
                "filter_report": art.report,
                "train_log": art.train_log,
                "summary": art.evaluation.summary,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            emit_error("usage", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            emit_error(f.kind, &f.message);
            ExitCode::from(1)
        }
    }
}
