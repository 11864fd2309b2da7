use fuzzynav::episode::{record_episode, FixedAction, RandomTokens, RolloutOptions};
use fuzzynav::eval::{score_episode, summarize, EpisodeResult, SUCCESS_RADIUS};
use fuzzynav::codec::Action;
use fuzzynav::geometry::Pose;
use fuzzynav::sim::{generate_scene, Difficulty, GenParams, Scene};
use fuzzynav::Status;
use proptest::prelude::*;

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn scoring_matches_brute_force(seed in 0u64..100_000, salt in any::<u64>(), steps in 1usize..80) {
        let s = generate_scene(seed, Difficulty::Easy, &GenParams::default()).unwrap();
        let opts = RolloutOptions { max_steps: steps, ..RolloutOptions::default() };
        let t = record_episode(&s, &mut RandomTokens::new(salt), &opts).unwrap();
        let r = score_episode(&t, &s, SUCCESS_RADIUS).unwrap();

        let mut visited: Vec<[f64; 3]> = t.frames.iter().map(|f| [f.pose.x, f.pose.y, f.pose.z]).collect();
        visited.push([t.final_pose.x, t.final_pose.y, t.final_pose.z]);
        let mut length = 0.0;
        for i in 1..visited.len() {
            length += dist(visited[i - 1], visited[i]);
        }
        let ne = dist(visited[visited.len() - 1], s.target);
        let closest = visited.iter().map(|p| dist(*p, s.target)).fold(f64::MAX, f64::min);
        let shortest = dist([s.start.x, s.start.y, s.start.z], s.target);
        let success = t.status == Status::Landed && ne <= 20.0;
        let spl = if success { shortest / length.max(shortest) } else { 0.0 };

        prop_assert!((r.ne - ne).abs() < 1e-9);
        prop_assert!((r.path_length - length).abs() < 1e-9);
        prop_assert!((r.shortest_path - shortest).abs() < 1e-9);
        prop_assert_eq!(r.success, success);
        prop_assert_eq!(r.oracle_success, closest <= 20.0);
        prop_assert!((r.spl - spl).abs() < 1e-12);
        prop_assert!(r.spl <= 1.0);
    }

    #[test]
    fn summary_rates_follow_the_results(flags in prop::collection::vec((any::<bool>(), any::<bool>(), 0.0..1.0f64, 0.0..300.0f64), 1..40)) {
        let results: Vec<EpisodeResult> = flags
            .iter()
            .enumerate()
            .map(|(i, &(succ, extra_oracle, spl, ne))| EpisodeResult {
                seed: i as u64,
                difficulty: if i % 3 == 0 { Difficulty::Hard } else { Difficulty::Easy },
                status: if succ { Status::Landed } else { Status::Timeout },
                ne,
                success: succ,
                oracle_success: succ || extra_oracle,
                path_length: 1.0,
                shortest_path: 1.0,
                spl: if succ { spl } else { 0.0 },
                steps: 1,
            })
            .collect();
        let m = summarize(&results).unwrap();
        let n = results.len() as f64;
        let sr = 100.0 * results.iter().filter(|r| r.success).count() as f64 / n;
        let osr = 100.0 * results.iter().filter(|r| r.oracle_success).count() as f64 / n;
        let spl = 100.0 * results.iter().map(|r| r.spl).sum::<f64>() / n;
        let ne = results.iter().map(|r| r.ne).sum::<f64>() / n;
        prop_assert!((m.sr - sr).abs() < 1e-9);
        prop_assert!((m.osr - osr).abs() < 1e-9);
        prop_assert!((m.spl - spl).abs() < 1e-9);
        prop_assert!((m.mean_ne - ne).abs() < 1e-9);
        prop_assert!(m.is_consistent());
        let parts: usize = m.by_difficulty.values().map(|b| b.n).sum();
        prop_assert_eq!(parts, results.len());
    }
}

#[test]
fn timeout_near_the_target_is_not_a_success() {
    // circle at constant range without ever landing
    let s = Scene::open(Pose::new(0.0, 0.0, 5.0, 0.0).unwrap(), [10.0, 0.0, 0.0]);
    let opts = RolloutOptions { max_steps: 12, ..RolloutOptions::default() };
    let t = record_episode(&s, &mut FixedAction(Action::new(1.0, 0.0, 0.5)), &opts).unwrap();
    assert_eq!(t.status, Status::Timeout);
    let r = score_episode(&t, &s, SUCCESS_RADIUS).unwrap();
    assert!(r.ne < 20.0);
    assert!(!r.success);
    assert!(r.oracle_success);
    assert_eq!(r.spl, 0.0);
}

#[test]
fn empty_inputs_are_rejected() {
    assert!(summarize(&[]).is_err());
}
