//! Landscape properties over randomized instances.

use proptest::prelude::*;

use kraus_landscape::kraus::{random_kraus, random_stiefel, to_stiefel};
use kraus_landscape::landscape::{
    ascend, classify_critical, eigenstate_preparation, objective_value, sweep_with, universal_map,
    AscentConfig, Classification, Objective, ProbeConfig,
};
use kraus_landscape::random::random_density;
use kraus_landscape::{Execution, Observable, SeededRng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn no_map_beats_the_universal_one(seed in any::<u64>(), n in 2usize..=4, l in 1usize..=6) {
        let mut rng = SeededRng::new(seed, 0);
        let obj = Objective::random(n, &mut rng);
        let best = objective_value(&obj, &universal_map(&obj.observable)).unwrap();
        let any = objective_value(&obj, &random_kraus(n, l, &mut rng)).unwrap();
        prop_assert!(any <= best + 1e-12);
        prop_assert!((best - obj.optimum()).abs() <= 1e-10);
    }

    #[test]
    fn ascent_is_monotone_and_never_overshoots(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = SeededRng::new(seed, 1);
        let obj = Objective::random(n, &mut rng);
        let cfg = AscentConfig { max_iterations: 300, ..AscentConfig::default() };
        let r = ascend(&obj, &random_stiefel(n, n * n, &mut rng), &cfg);
        prop_assert!(r.j_trace.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(r.final_value() <= obj.optimum() + 1e-12);
    }
}

#[test]
fn fewer_operators_still_reach_the_optimum() {
    // Rank-one targets are reachable with L = n operators.
    let obj = Objective::random(3, &mut SeededRng::new(21, 0));
    let cfg = AscentConfig {
        operators: Some(3),
        ..AscentConfig::default()
    };
    let s = sweep_with(
        &obj,
        10,
        &cfg,
        1e-4,
        &SeededRng::new(22, 0),
        Execution::Parallel,
    )
    .unwrap();
    assert!(s.trap_free(), "min J {} vs λ_max {}", s.min_j, s.optimum);
}

#[test]
fn intermediate_eigenstates_are_saddles() {
    let mut rng = SeededRng::new(23, 0);
    let a = Observable::diagonal(&[3.0, 1.0, 0.5, -2.0]);
    let obj = Objective::new(a.clone(), random_density(4, &mut rng)).unwrap();
    for k in 1..3 {
        let s = to_stiefel(&eigenstate_preparation(&a, k)).unwrap();
        let r = classify_critical(&obj, &s, 200, &ProbeConfig::default(), &mut rng).unwrap();
        assert_eq!(r.classification, Classification::Saddle, "eigenstate {k}");
    }
    let bottom = to_stiefel(&eigenstate_preparation(&a, 3)).unwrap();
    let r = classify_critical(&obj, &bottom, 200, &ProbeConfig::default(), &mut rng).unwrap();
    assert_eq!(r.negative_count(1e-6), 0);
}

#[test]
fn sweep_csv_is_reproducible() {
    let obj = Objective::random(2, &mut SeededRng::new(24, 0));
    let cfg = AscentConfig::default();
    let base = SeededRng::new(25, 0);
    let a = sweep_with(&obj, 8, &cfg, 1e-4, &base, Execution::Parallel).unwrap();
    let b = sweep_with(&obj, 8, &cfg, 1e-4, &base, Execution::Sequential).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let c = sweep_with(
        &obj,
        8,
        &cfg,
        1e-4,
        &SeededRng::new(26, 0),
        Execution::Parallel,
    )
    .unwrap();
    assert_ne!(a.to_csv(), c.to_csv());
}
