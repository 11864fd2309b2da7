use std::f64::consts::PI;

use fuzzynav::geometry::{distance3, horizontal_distance, relative_bearing, wrap_angle, Pose};
use proptest::prelude::*;

fn in_range(a: f64) -> bool {
    a > -PI && a <= PI
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(10_000) })]

    #[test]
    fn wrap_is_idempotent(a in -10.0 * PI..10.0 * PI) {
        let w = wrap_angle(a).unwrap();
        prop_assert!(in_range(w));
        prop_assert_eq!(wrap_angle(w).unwrap(), w);
        // congruent modulo a full turn
        let k = ((a - w) / (2.0 * PI)).round();
        prop_assert!((a - w - k * 2.0 * PI).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(2_000) })]

    #[test]
    fn dead_ahead_bearing_is_zero(
        x in -200.0..200.0f64,
        y in -200.0..200.0f64,
        yaw in -PI..PI,
        range in 0.5..300.0f64,
    ) {
        let pose = Pose::new(x, y, 10.0, yaw).unwrap();
        let target = [x + range * yaw.cos(), y + range * yaw.sin()];
        let th = relative_bearing(&pose, target).unwrap().radians();
        prop_assert!(th.abs() < 1e-9, "theta {th}");
    }

    #[test]
    fn rotating_yaw_shifts_bearing(
        x in -100.0..100.0f64,
        y in -100.0..100.0f64,
        yaw in -PI..PI,
        delta in -PI..PI,
        tx in -100.0..100.0f64,
        ty in -100.0..100.0f64,
    ) {
        prop_assume!((tx - x).hypot(ty - y) > 1e-3);
        let p0 = Pose::new(x, y, 5.0, yaw).unwrap();
        let p1 = Pose::new(x, y, 5.0, yaw + delta).unwrap();
        let t0 = relative_bearing(&p0, [tx, ty]).unwrap().radians();
        let t1 = relative_bearing(&p1, [tx, ty]).unwrap().radians();
        // positive theta is to the right, so turning left (+delta) moves the
        // target further right
        let diff = wrap_angle(t1 - t0 - delta).unwrap();
        prop_assert!(diff.abs() < 1e-9 || (diff.abs() - 2.0 * PI).abs() < 1e-9, "diff {diff}");
    }

    #[test]
    fn bearing_sign_matches_cross_product(
        yaw in -PI..PI,
        tx in -100.0..100.0f64,
        ty in -100.0..100.0f64,
    ) {
        prop_assume!(tx.hypot(ty) > 1e-3);
        let pose = Pose::new(0.0, 0.0, 0.0, yaw).unwrap();
        let th = relative_bearing(&pose, [tx, ty]).unwrap().radians();
        // z of heading x target: positive when the target is to the left
        let cross = yaw.cos() * ty - yaw.sin() * tx;
        prop_assume!(cross.abs() > 1e-6);
        prop_assert_eq!(th < 0.0, cross > 0.0);
    }

    #[test]
    fn distances_are_symmetric_and_horizontal(
        a in prop::array::uniform3(-100.0..100.0f64),
        b in prop::array::uniform3(-100.0..100.0f64),
    ) {
        let pa = Pose::new(a[0], a[1], a[2], 0.0).unwrap();
        let h = horizontal_distance(&pa, b);
        prop_assert!((h - (a[0] - b[0]).hypot(a[1] - b[1])).abs() < 1e-12);
        prop_assert_eq!(distance3(a, b), distance3(b, a));
        prop_assert!(distance3(a, b) >= h);
    }
}

#[test]
fn documented_examples() {
    let p = Pose::new(0.0, 0.0, 10.0, 0.0).unwrap();
    assert!((relative_bearing(&p, [10.0, -10.0]).unwrap().radians() - PI / 4.0).abs() < 1e-12);
    assert_eq!(relative_bearing(&p, [10.0, 0.0]).unwrap().radians(), 0.0);
    let q = Pose::new(0.0, 0.0, 10.0, PI / 2.0).unwrap();
    assert!(relative_bearing(&q, [0.0, 10.0]).unwrap().radians().abs() < 1e-12);
    assert!(relative_bearing(&p, [0.0, 0.0]).is_err());
    assert_eq!(wrap_angle(-PI).unwrap(), PI);
    assert!((wrap_angle(1.5 * PI).unwrap() + PI / 2.0).abs() < 1e-12);
    assert!(wrap_angle(f64::NAN).is_err());
    let o = Pose::new(1.0, 1.0, 0.0, 0.0).unwrap();
    assert_eq!(horizontal_distance(&o, [4.0, 5.0, 9.0]), 5.0);
}

#[test]
fn single_precision_wrap() {
    let w = wrap_angle(7.0f32).unwrap();
    assert!(w > -std::f32::consts::PI && w <= std::f32::consts::PI);
    assert!((w - (7.0 - 2.0 * std::f32::consts::PI)).abs() < 1e-5);
}
