//! Closed-loop episode recording: probe, bearing, hint, policy, codec, step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{dequantize_triple, is_landing, quantize, Action, ActionTokens, TokenTriple};
use crate::error::Result;
use crate::geometry::{relative_bearing, Pose, RelativeBearing};
use crate::prompting::{fuzzy_hint, FuzzyHint, Prompt};
use crate::sim::{probe_depth, step_with_radius, DepthProbe, Difficulty, Scene, UAV_RADIUS};

pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_MAX_STEPS: usize = 200;

/// What the policy sees at one timestep.
#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub scene: &'a Scene,
    pub step: usize,
    pub pose: Pose<f64>,
    pub probe: DepthProbe,
    pub theta: RelativeBearing<f64>,
    pub hint: FuzzyHint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decision {
    /// Continuous command; the recorder runs it through the codec.
    Move(Action<f64>),
    /// Already-tokenized output.
    Tokens(ActionTokens),
    Land,
}

pub trait Policy {
    fn act(&mut self, obs: &Observation<'_>) -> Decision;

    /// Called once before the first step of every episode.
    fn reset(&mut self, _scene: &Scene) {}

    /// Whether the decision just returned was altered by reaction-delay
    /// injection. Only used to label frames for oracle checks.
    fn delay_injected(&self) -> bool {
        false
    }
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn act(&mut self, obs: &Observation<'_>) -> Decision {
        (**self).act(obs)
    }

    fn reset(&mut self, scene: &Scene) {
        (**self).reset(scene)
    }

    fn delay_injected(&self) -> bool {
        (**self).delay_injected()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub step: usize,
    pub pose: Pose<f64>,
    pub theta: f64,
    pub hint: FuzzyHint,
    pub prompt: String,
    pub depth: DepthProbe,
    pub action_label: ActionTokens,
    pub raw_action: Action<f64>,
    pub land_label: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub delay_injected: bool,
}

impl Frame {
    pub fn bearing(&self) -> RelativeBearing<f64> {
        RelativeBearing(self.theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Landed,
    Collided,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Landed => "landed",
            Status::Collided => "collided",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub format_version: u32,
    pub scene_seed: u64,
    pub difficulty: Difficulty,
    pub target: [f64; 3],
    pub frames: Vec<Frame>,
    pub status: Status,
    pub final_pose: Pose<f64>,
}

impl Trajectory {
    /// Every visited position, start included.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let mut out: Vec<[f64; 3]> = self.frames.iter().map(|f| f.pose.position()).collect();
        // a landed episode ends without executing its last frame
        if self.status != Status::Landed || self.frames.is_empty() {
            out.push(self.final_pose.position());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RolloutOptions {
    pub max_steps: usize,
    /// Execute decoded tokens (true) or raw continuous actions (false).
    pub quantize: bool,
    /// When false, landing outputs hover in place and the episode runs on.
    pub landing: bool,
    pub uav_radius: f64,
}

impl Default for RolloutOptions {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            quantize: true,
            landing: true,
            uav_radius: UAV_RADIUS,
        }
    }
}

pub fn observe<'a>(scene: &'a Scene, pose: Pose<f64>, step: usize) -> Observation<'a> {
    let probe = probe_depth(scene, &pose);
    // bearing is undefined directly above the target; treat it as dead ahead
    let theta = relative_bearing(&pose, [scene.target[0], scene.target[1]])
        .unwrap_or(RelativeBearing(0.0));
    Observation {
        scene,
        step,
        pose,
        probe,
        theta,
        hint: fuzzy_hint(theta),
    }
}

/// Runs one closed-loop episode and records a frame per step.
///
/// Fails only if the policy emits a continuous action outside the codec
/// ranges.
pub fn record_episode<P: Policy + ?Sized>(
    scene: &Scene,
    policy: &mut P,
    opts: &RolloutOptions,
) -> Result<Trajectory> {
    policy.reset(scene);
    let mut pose = scene.start;
    let mut frames = Vec::new();
    let mut status = Status::Timeout;

    for t in 0..opts.max_steps.max(1) {
        let obs = observe(scene, pose, t);
        let decision = policy.act(&obs);
        let delayed = policy.delay_injected();

        let (label, exec, raw) = match decision {
            Decision::Land | Decision::Tokens(ActionTokens::Land) => {
                if opts.landing {
                    (ActionTokens::Land, None, Action::zero())
                } else {
                    let zero = TokenTriple::ZERO;
                    (ActionTokens::Triple(zero), Some(Action::zero()), Action::zero())
                }
            }
            Decision::Tokens(ActionTokens::Triple(tr)) => {
                let a = dequantize_triple(&tr)?;
                let tokens = ActionTokens::Triple(tr);
                let exec = if opts.landing && is_landing(&tokens) {
                    None
                } else {
                    Some(a)
                };
                (tokens, exec, a)
            }
            Decision::Move(a) => {
                let tr = quantize(&a)?;
                let tokens = ActionTokens::Triple(tr);
                if opts.quantize {
                    let decoded = dequantize_triple(&tr)?;
                    let exec = if opts.landing && is_landing(&tokens) {
                        None
                    } else {
                        Some(decoded)
                    };
                    (tokens, exec, a)
                } else {
                    (tokens, Some(a), a)
                }
            }
        };

        let prompt = Prompt::new(obs.hint, &scene.target_description)
            .map(|p| p.text())
            .unwrap_or_default();
        frames.push(Frame {
            step: t,
            pose,
            theta: obs.theta.radians(),
            hint: obs.hint,
            prompt,
            depth: obs.probe,
            action_label: label,
            raw_action: raw,
            land_label: label.is_land(),
            delay_injected: delayed,
        });

        let Some(exec) = exec else {
            status = Status::Landed;
            break;
        };
        let out = step_with_radius(scene, &pose, &exec, opts.uav_radius)?;
        pose = out.pose;
        if out.collided {
            status = Status::Collided;
            break;
        }
    }

    Ok(Trajectory {
        format_version: TRAJECTORY_FORMAT_VERSION,
        scene_seed: scene.seed,
        difficulty: scene.difficulty,
        target: scene.target,
        frames,
        status,
        final_pose: pose,
    })
}

/// Records one episode per scene in parallel; output order follows `scenes`.
pub fn record_many<P, F>(scenes: &[Scene], make_policy: F, opts: &RolloutOptions) -> Result<Vec<Trajectory>>
where
    P: Policy,
    F: Fn(&Scene) -> P + Sync,
{
    scenes
        .par_iter()
        .map(|scene| {
            let mut policy = make_policy(scene);
            record_episode(scene, &mut policy, opts)
        })
        .collect()
}

/// Always emits the same continuous action.
#[derive(Clone, Copy, Debug)]
pub struct FixedAction(pub Action<f64>);

impl Policy for FixedAction {
    fn act(&mut self, _obs: &Observation<'_>) -> Decision {
        Decision::Move(self.0)
    }
}

/// Uniformly random token triples, seeded per scene.
#[derive(Clone, Debug)]
pub struct RandomTokens {
    salt: u64,
    rng: rand_chacha::ChaCha8Rng,
}

impl RandomTokens {
    pub fn new(salt: u64) -> Self {
        use rand::SeedableRng;
        Self {
            salt,
            rng: rand_chacha::ChaCha8Rng::seed_from_u64(salt),
        }
    }
}

impl Policy for RandomTokens {
    fn reset(&mut self, scene: &Scene) {
        use rand::SeedableRng;
        self.rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.salt ^ scene.seed.rotate_left(17));
    }

    fn act(&mut self, _obs: &Observation<'_>) -> Decision {
        use rand::Rng;
        let max = crate::codec::MAX_TOKEN;
        let t = TokenTriple {
            cx: self.rng.gen_range(0..=max),
            cz: self.rng.gen_range(0..=max),
            cpsi: self.rng.gen_range(0..=max),
        };
        Decision::Tokens(ActionTokens::Triple(t))
    }
}
