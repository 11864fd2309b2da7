use std::f64::consts::PI;

use fuzzynav::codec::{
    dequantize, dequantize_triple, is_landing, quantize, to_velocity, Action, ActionTokens, Dim, TokenTriple,
};
use fuzzynav::geometry::Pose;
use proptest::prelude::*;

fn ranges() -> [(f64, f64); 3] {
    [(0.0, 5.0), (-5.0, 5.0), (-PI, PI)]
}

fn action() -> impl Strategy<Value = Action<f64>> {
    (0.0..=5.0f64, -5.0..=5.0f64, -PI..=PI).prop_map(|(a, b, c)| Action::new(a, b, c))
}

fn token() -> impl Strategy<Value = u8> {
    0u8..=98
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(10_000) })]

    #[test]
    fn round_trip_within_half_bin(a in action()) {
        let t = quantize(&a).unwrap();
        let back: Action<f64> = dequantize_triple(&t).unwrap();
        for (i, dim) in Dim::ALL.into_iter().enumerate() {
            let (lo, hi) = ranges()[i];
            let bound = (hi - lo) / (2.0 * 98.0);
            prop_assert!((back.get(dim) - a.get(dim)).abs() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tokens_survive_decode_encode(cx in token(), cz in token(), cpsi in token()) {
        let t = TokenTriple::new(cx, cz, cpsi).unwrap();
        let a: Action<f64> = dequantize_triple(&t).unwrap();
        prop_assert_eq!(quantize(&a).unwrap(), t);
        let a32: Action<f32> = dequantize_triple(&t).unwrap();
        prop_assert_eq!(quantize(&a32).unwrap(), t);
    }

    #[test]
    fn quantize_is_monotone(a in action(), b in action()) {
        let (ta, tb) = (quantize(&a).unwrap(), quantize(&b).unwrap());
        for dim in Dim::ALL {
            if a.get(dim) < b.get(dim) {
                prop_assert!(ta.get(dim) <= tb.get(dim));
            }
        }
    }

    #[test]
    fn tokens_are_bin_indices(a in action()) {
        // independent rounding of the affine map onto 0..=98
        let t = quantize(&a).unwrap();
        for (i, dim) in Dim::ALL.into_iter().enumerate() {
            let (lo, hi) = ranges()[i];
            let expected = ((a.get(dim) - lo) / (hi - lo) * 98.0).round() as i64;
            prop_assert!((i64::from(t.get(dim)) - expected).abs() <= 1);
            let decoded = lo + f64::from(t.get(dim)) * (hi - lo) / 98.0;
            let ours: Action<f64> = dequantize_triple(&t).unwrap();
            prop_assert!((ours.get(dim) - decoded).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_keeps_cruise_speed(a in action(), yaw in -PI..PI) {
        let pose = Pose::new(0.0, 0.0, 20.0, yaw).unwrap();
        let v = to_velocity(&a, &pose);
        let len = a.dx.hypot(a.dz);
        prop_assert!((v.duration - len).abs() < 1e-12);
        if len > 1e-9 {
            prop_assert!((v.speed() - 1.0).abs() < 1e-9);
            // travelled displacement equals the requested one
            let h = pose.yaw + a.dpsi;
            prop_assert!((v.vx * v.duration - a.dx * h.cos()).abs() < 1e-9);
            prop_assert!((v.vy * v.duration - a.dx * h.sin()).abs() < 1e-9);
            prop_assert!((v.vz * v.duration - a.dz).abs() < 1e-9);
        }
    }
}

#[test]
fn zero_action_is_landing_label() {
    let t = quantize(&Action::new(0.0, 0.0, 0.0)).unwrap();
    assert_eq!(t, TokenTriple::new(0, 49, 49).unwrap());
    assert!(is_landing(&ActionTokens::Triple(t)));
    assert!(is_landing(&ActionTokens::Land));
    assert!(dequantize::<f64>(&ActionTokens::Land).is_err());
}

#[test]
fn out_of_range_inputs_fail() {
    assert!(quantize(&Action::new(5.2, 0.0, 0.0)).is_err());
    assert!(quantize(&Action::new(-0.1, 0.0, 0.0)).is_err());
    assert!(quantize(&Action::new(1.0, f64::NAN, 0.0)).is_err());
    assert!(TokenTriple::new(99, 0, 0).is_err());
    assert!("0 49 99".parse::<ActionTokens>().is_err());
    assert_eq!("LAND".parse::<ActionTokens>().unwrap(), ActionTokens::Land);
}

#[test]
fn landing_is_exactly_one_bin_wide() {
    let triple = |a, b, c| ActionTokens::Triple(TokenTriple::new(a, b, c).unwrap());
    for cx in 0..=98u8 {
        for cz in 0..=98u8 {
            for cpsi in [47u8, 48, 49, 50, 51] {
                let expect = cx <= 1 && (48..=50).contains(&cz) && (48..=50).contains(&cpsi);
                assert_eq!(is_landing(&triple(cx, cz, cpsi)), expect, "{cx} {cz} {cpsi}");
            }
        }
    }
}
