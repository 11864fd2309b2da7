//! Scripted expert pilot and reaction-delay injection.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::codec::{Action, ActionTokens, TokenTriple};
use crate::episode::{Decision, Observation, Policy};
use crate::geometry::{horizontal_distance, relative_bearing, wrap_finite, Pose, RelativeBearing};
use crate::route::plan_route;
use crate::sim::{segment_collides, DepthProbe, Scene, UAV_RADIUS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpertConfig {
    /// Landing hover height above the target, meters.
    pub hover_offset: f64,
    pub land_radius: f64,
    pub land_altitude_tolerance: f64,
    /// Per-step yaw change cap, radians.
    pub max_turn: f64,
    /// Forward depth below which the expert evades, meters.
    pub evade_depth: f64,
    pub evade_dx: f64,
    pub cruise_dx: f64,
    /// Extra clearance beyond the UAV radius required of a planned move.
    pub safety_margin: f64,
    /// Steer along a grid route around obstacles instead of straight at
    /// the target.
    pub route_planning: bool,
    pub plan_cell: f64,
    /// Minimum footprint distance of route cells, meters.
    pub plan_clearance: f64,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        Self {
            hover_offset: 5.0,
            land_radius: 3.0,
            land_altitude_tolerance: 1.0,
            max_turn: FRAC_PI_4,
            evade_depth: 12.0,
            evade_dx: 2.0,
            cruise_dx: 5.0,
            safety_margin: 0.5,
            route_planning: true,
            plan_cell: 2.0,
            plan_clearance: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExpertAction {
    Land,
    Move(Action<f64>),
}

fn planned_move_is_safe(scene: &Scene, pose: &Pose<f64>, a: &Action<f64>, radius: f64) -> bool {
    let yaw = wrap_finite(pose.yaw + a.dpsi);
    let from = pose.position();
    let to = [
        from[0] + a.dx * yaw.cos(),
        from[1] + a.dx * yaw.sin(),
        from[2] + a.dz,
    ];
    scene.bounds.contains(to) && !segment_collides(scene, from, to, radius)
}

/// Scripted pilot.
///
/// Lands when within `land_radius` horizontally and within the altitude
/// tolerance of the hover height. Otherwise turns toward the target (capped
/// at `max_turn`) and flies `min(cruise_dx, distance)`; when the forward
/// depth drops below `evade_depth` it instead turns away from the nearer
/// lateral obstacle and creeps forward. Altitude is steered toward the
/// hover height. A planned move that would clip an obstacle is replaced by
/// the first safe fallback (shorter hop, other turn directions, then a
/// turn in place).
pub fn expert_policy(
    scene: &Scene,
    pose: &Pose<f64>,
    probe: &DepthProbe,
    theta: RelativeBearing<f64>,
    cfg: &ExpertConfig,
) -> ExpertAction {
    steer(scene, pose, probe, theta, true, cfg)
}

/// Shared rule; `aim` is the bearing to steer toward, which is the target
/// itself or a route waypoint. Reactive evasion is skipped when `evade` is
/// false (the route already keeps clear of obstacles).
fn steer(
    scene: &Scene,
    pose: &Pose<f64>,
    probe: &DepthProbe,
    aim: RelativeBearing<f64>,
    evade: bool,
    cfg: &ExpertConfig,
) -> ExpertAction {
    let hd = horizontal_distance(pose, scene.target);
    let alt_err = scene.target[2] + cfg.hover_offset - pose.z;
    if hd <= cfg.land_radius && alt_err.abs() <= cfg.land_altitude_tolerance {
        return ExpertAction::Land;
    }
    let dz = alt_err.clamp(-5.0, 5.0);
    let theta = aim.radians();
    let turn = cfg.max_turn.min(std::f64::consts::PI);

    let (dpsi, dx, away) = if evade && probe.forward < cfg.evade_depth {
        // positive dpsi turns left (counterclockwise)
        let away = if probe.right < probe.left {
            turn
        } else if probe.left < probe.right {
            -turn
        } else if theta > 0.0 {
            -turn
        } else {
            turn
        };
        let dx = (probe.forward - 2.0).min(cfg.evade_dx).clamp(0.0, 5.0);
        (away, dx, away)
    } else {
        let dpsi = (-theta).clamp(-turn, turn);
        let away = if dpsi >= 0.0 { -turn } else { turn };
        (dpsi, hd.min(cfg.cruise_dx).clamp(0.0, 5.0), away)
    };

    let radius = UAV_RADIUS + cfg.safety_margin;
    let primary = Action::new(dx, dz, dpsi);
    if planned_move_is_safe(scene, pose, &primary, radius) {
        return ExpertAction::Move(primary);
    }
    for turn_choice in [dpsi, away, -away, 0.0] {
        for scale in [1.0, 0.5, 0.25] {
            let a = Action::new(dx * scale, dz, turn_choice);
            if a.dx > 0.0 && planned_move_is_safe(scene, pose, &a, radius) {
                return ExpertAction::Move(a);
            }
        }
    }
    let hold = Action::new(0.0, dz, away);
    if planned_move_is_safe(scene, pose, &hold, radius) {
        ExpertAction::Move(hold)
    } else {
        ExpertAction::Move(Action::new(0.0, 0.0, away))
    }
}

/// [`expert_policy`] as a closed-loop [`Policy`], optionally following a
/// precomputed route: each step it aims at the furthest waypoint still in
/// line of sight, and replans once if none is.
#[derive(Clone, Debug, Default)]
pub struct ExpertPilot {
    pub cfg: ExpertConfig,
    route: Vec<[f64; 2]>,
    next: usize,
}

impl ExpertPilot {
    pub fn new(cfg: ExpertConfig) -> Self {
        Self {
            cfg,
            route: Vec::new(),
            next: 0,
        }
    }

    fn plan(&mut self, scene: &Scene, from: [f64; 2]) {
        let to = [scene.target[0], scene.target[1]];
        self.route = plan_route(scene, from, to, self.cfg.plan_cell, self.cfg.plan_clearance).unwrap_or_default();
        self.next = 0;
    }

    fn visible_waypoint(&mut self, scene: &Scene, pose: &Pose<f64>) -> Option<[f64; 2]> {
        let radius = UAV_RADIUS + self.cfg.safety_margin;
        let from = pose.position();
        let found = (self.next..self.route.len())
            .rev()
            .find(|&i| !segment_collides(scene, from, [self.route[i][0], self.route[i][1], from[2]], radius))?;
        self.next = found;
        Some(self.route[found])
    }
}

impl Policy for ExpertPilot {
    fn reset(&mut self, scene: &Scene) {
        self.route.clear();
        self.next = 0;
        if self.cfg.route_planning {
            self.plan(scene, [scene.start.x, scene.start.y]);
        }
    }

    fn act(&mut self, obs: &Observation<'_>) -> Decision {
        let mut aim = None;
        if self.cfg.route_planning {
            aim = self.visible_waypoint(obs.scene, &obs.pose);
            if aim.is_none() {
                self.plan(obs.scene, [obs.pose.x, obs.pose.y]);
                aim = self.visible_waypoint(obs.scene, &obs.pose);
            }
        }
        let action = match aim {
            Some(wp) => {
                let bearing = relative_bearing(&obs.pose, wp).unwrap_or(obs.theta);
                steer(obs.scene, &obs.pose, &obs.probe, bearing, false, &self.cfg)
            }
            None => expert_policy(obs.scene, &obs.pose, &obs.probe, obs.theta, &self.cfg),
        };
        match action {
            ExpertAction::Land => Decision::Land,
            ExpertAction::Move(a) => Decision::Move(a),
        }
    }
}

/// Emulates a late pilot reaction: for the first `k` frames after the
/// target bearing enters a lateral bucket (|theta| > 60 deg), the yaw
/// component is replaced by zero while forward and vertical commands pass
/// through.
#[derive(Clone, Debug)]
pub struct ReactionDelay<P> {
    inner: P,
    k: usize,
    remaining: usize,
    was_lateral: bool,
    flagged: bool,
}

pub fn inject_reaction_delay<P: Policy>(inner: P, k: usize) -> ReactionDelay<P> {
    ReactionDelay {
        inner,
        k,
        remaining: 0,
        was_lateral: false,
        flagged: false,
    }
}

impl<P> ReactionDelay<P> {
    pub fn into_inner(self) -> P {
        self.inner
    }
}

impl<P: Policy> Policy for ReactionDelay<P> {
    fn reset(&mut self, scene: &Scene) {
        self.remaining = 0;
        self.was_lateral = false;
        self.flagged = false;
        self.inner.reset(scene);
    }

    fn act(&mut self, obs: &Observation<'_>) -> Decision {
        let lateral = obs.hint.is_lateral();
        if lateral && !self.was_lateral {
            self.remaining = self.k;
        } else if !lateral {
            self.remaining = 0;
        }
        self.was_lateral = lateral;
        self.flagged = false;

        let decision = self.inner.act(obs);
        if !lateral || self.remaining == 0 {
            return decision;
        }
        let delayed = match decision {
            Decision::Move(a) => Decision::Move(Action::new(a.dx, a.dz, 0.0)),
            Decision::Tokens(ActionTokens::Triple(mut t)) => {
                t.cpsi = TokenTriple::ZERO.cpsi;
                Decision::Tokens(ActionTokens::Triple(t))
            }
            landing => return landing,
        };
        self.remaining -= 1;
        self.flagged = true;
        delayed
    }

    fn delay_injected(&self) -> bool {
        self.flagged
    }
}
