//! Randomized property suite for the action codec, shared by the
//! `codec-check` command and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::{
    dequantize_triple, is_landing, quantize, to_velocity, Action, ActionTokens, Dim, TokenTriple, MAX_TOKEN,
};
use crate::geometry::Pose;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_action(rng: &mut ChaCha8Rng) -> Action<f64> {
    let mut v = [0.0; 3];
    for (slot, dim) in v.iter_mut().zip(Dim::ALL) {
        let (lo, hi) = dim.range::<f64>();
        *slot = rng.gen_range(lo..=hi);
    }
    Action::new(v[0], v[1], v[2])
}

fn random_triple(rng: &mut ChaCha8Rng) -> TokenTriple {
    TokenTriple {
        cx: rng.gen_range(0..=MAX_TOKEN),
        cz: rng.gen_range(0..=MAX_TOKEN),
        cpsi: rng.gen_range(0..=MAX_TOKEN),
    }
}

fn check_round_trip(rng: &mut ChaCha8Rng, n: usize) -> CheckOutcome {
    let mut worst = [0.0f64; 3];
    for _ in 0..n {
        let a = random_action(rng);
        let back: Action<f64> = quantize(&a).and_then(|t| dequantize_triple(&t)).expect("in range");
        for (w, dim) in worst.iter_mut().zip(Dim::ALL) {
            *w = w.max((back.get(dim) - a.get(dim)).abs());
        }
    }
    let passed = Dim::ALL
        .iter()
        .zip(worst)
        .all(|(d, w)| w <= d.bin_width::<f64>() / 2.0 + 1e-12);
    CheckOutcome {
        name: "round_trip_half_bin",
        passed,
        detail: format!("max error dx={:.6} dz={:.6} dpsi={:.6}", worst[0], worst[1], worst[2]),
    }
}

fn check_token_identity(rng: &mut ChaCha8Rng, n: usize) -> CheckOutcome {
    let mut failures = 0usize;
    for _ in 0..n {
        let t = random_triple(rng);
        let a: Action<f64> = dequantize_triple(&t).expect("valid triple");
        if quantize(&a).ok() != Some(t) {
            failures += 1;
        }
    }
    CheckOutcome {
        name: "token_identity",
        passed: failures == 0,
        detail: format!("{failures} mismatches over {n} triples"),
    }
}

fn check_monotone(rng: &mut ChaCha8Rng, n: usize) -> CheckOutcome {
    let mut violations = 0usize;
    for _ in 0..n {
        let a = random_action(rng);
        let b = random_action(rng);
        let (ta, tb) = (quantize(&a).expect("in range"), quantize(&b).expect("in range"));
        for dim in Dim::ALL {
            let (va, vb) = (a.get(dim), b.get(dim));
            let (ca, cb) = (ta.get(dim), tb.get(dim));
            if (va < vb && ca > cb) || (vb < va && cb > ca) {
                violations += 1;
            }
        }
    }
    CheckOutcome {
        name: "monotone",
        passed: violations == 0,
        detail: format!("{violations} violations over {n} pairs"),
    }
}

fn check_zero_label() -> CheckOutcome {
    let t = quantize(&Action::<f64>::zero()).expect("zero in range");
    let lands = is_landing(&ActionTokens::Triple(t));
    let decoded: Action<f64> = dequantize_triple(&t).expect("valid");
    CheckOutcome {
        name: "zero_label_lands",
        passed: t == TokenTriple::ZERO && lands && decoded == Action::zero(),
        detail: format!("quantize(0,0,0) = ({} {} {}), is_landing = {lands}", t.cx, t.cz, t.cpsi),
    }
}

fn check_cruise_speed(rng: &mut ChaCha8Rng, n: usize) -> CheckOutcome {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let a = random_action(rng);
        let yaw = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let pose = Pose::new(0.0, 0.0, 10.0, yaw).expect("finite");
        let v = to_velocity(&a, &pose);
        if v.duration > 0.0 {
            worst = worst.max((v.speed() - 1.0).abs());
            worst = worst.max((v.duration - a.dx.hypot(a.dz)).abs());
        }
    }
    CheckOutcome {
        name: "cruise_speed",
        passed: worst <= 1e-9,
        detail: format!("max |speed - 1| or duration error = {worst:e}"),
    }
}

/// Runs every codec property over `n` random samples.
pub fn run_codec_checks(n: usize, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        check_round_trip(&mut rng, n),
        check_token_identity(&mut rng, n),
        check_monotone(&mut rng, n),
        check_zero_label(),
        check_cruise_speed(&mut rng, n),
    ]
}
