use fuzzynav::curation::{classify, filter_frames, FilterConfig, Verdict};
use fuzzynav::episode::{record_episode, RolloutOptions};
use fuzzynav::expert::{inject_reaction_delay, ExpertConfig, ExpertPilot};
use fuzzynav::sim::{generate_scene, Difficulty, GenParams};
use fuzzynav::Trajectory;
use proptest::prelude::*;

fn demos(seed: u64, n: u64, k: usize) -> Vec<Trajectory> {
    let params = GenParams { lateral_start: true, ..GenParams::default() };
    (seed..seed + n)
        .map(|s| {
            let d = if s % 2 == 0 { Difficulty::Easy } else { Difficulty::Hard };
            let scene = generate_scene(s, d, &params).unwrap();
            let mut p = inject_reaction_delay(ExpertPilot::new(ExpertConfig::default()), k);
            record_episode(&scene, &mut p, &RolloutOptions::default()).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn filter_is_idempotent(seed in 0u64..50_000, k in 0usize..6) {
        let cfg = FilterConfig::default();
        let (once, r1) = filter_frames(&demos(seed, 4, k), &cfg);
        let (twice, r2) = filter_frames(&once, &cfg);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(r2.discarded, 0);
        prop_assert_eq!(r2.total_frames, r1.total_frames - r1.discarded);
    }

    #[test]
    fn evasions_and_ordinary_frames_survive(seed in 0u64..50_000, k in 0usize..6) {
        let cfg = FilterConfig::default();
        let input = demos(seed, 4, k);
        let (out, report) = filter_frames(&input, &cfg);
        prop_assert_eq!(out.len(), input.len());
        let mut discarded = 0;
        let mut evasions = 0;
        for (a, b) in input.iter().zip(&out) {
            let kept: Vec<_> = a
                .frames
                .iter()
                .filter(|f| {
                    let v = classify(f, &cfg);
                    discarded += usize::from(v == Verdict::Discard);
                    evasions += usize::from(v == Verdict::RetainEvasion);
                    v != Verdict::Discard
                })
                .cloned()
                .collect();
            prop_assert_eq!(&kept, &b.frames);
            prop_assert_eq!(a.status, b.status);
        }
        prop_assert_eq!(report.discarded, discarded);
        prop_assert_eq!(report.retained_evasions, evasions);
    }
}
