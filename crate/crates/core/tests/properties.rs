//! Cross-module invariants checked against the exhaustive oracle.

use bellbound::bounds::{
    closed_bound, scenario_trial_bound, sequence_assignment, sequence_bound, witness_assignment,
};
use bellbound::catalog::{table_reduction, FunctionName, NamedFunction};
use bellbound::oracle::{brute_force_gbf, SearchOptions};
use bellbound::representations::{eval_cosine, eval_product, ResidueTable};
use bellbound::{Assignment, BellScenario, Nu};
use proptest::prelude::*;

fn oracle_max(s: &BellScenario) -> f64 {
    brute_force_gbf::<f64>(s, 1.0, &SearchOptions::default())
        .unwrap()
        .max_value
}

fn assignment(n: usize, d: usize) -> impl Strategy<Value = Assignment> {
    (
        prop::collection::vec(0..d as u32, n),
        prop::collection::vec(0..d as u32, n),
    )
        .prop_map(move |(a, b)| Assignment::new(a, b, d).unwrap())
}

/// `(N, d)` with at most `4^8` assignments.
fn small_cell() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (1usize..=6).prop_map(|n| (n, 2)),
        (1usize..=4).prop_map(|n| (n, 3)),
        (1usize..=4).prop_map(|n| (n, 4))
    ]
}

fn odd_quarter() -> impl Strategy<Value = Nu> {
    prop::sample::select(vec![-3i64, -1, 1, 3, 5]).prop_map(|c| Nu::new(c, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// closed ≤ sequence = oracle ≤ trial, for every small cell.
    #[test]
    fn bound_ordering((n, d) in small_cell()) {
        let s = BellScenario::quarter(n, d).unwrap();
        let oracle = oracle_max(&s);
        let seq = sequence_bound::<f64>(n, d, Nu::new(1, 4)).unwrap();
        let closed: f64 = closed_bound(n, d).unwrap();
        prop_assert!(closed <= oracle + 1e-9);
        prop_assert!((seq.value - oracle).abs() < 1e-9, "sequence {} oracle {}", seq.value, oracle);
        prop_assert!(oracle <= scenario_trial_bound::<f64>(&s) + 1e-9);
    }

    /// The sequence optimum is realized by its own assignment.
    #[test]
    fn sequence_optimum_is_attained((n, d) in small_cell(), nu in odd_quarter()) {
        let s = BellScenario::new(n, d, nu).unwrap();
        let seq = sequence_bound::<f64>(n, d, nu).unwrap();
        let a = sequence_assignment(&s, seq.first_term, seq.common_difference).unwrap();
        let v: f64 = eval_product(&s, &a).unwrap();
        prop_assert!((v - seq.value).abs() < 1e-9);
    }

    /// Witnesses attain the oracle maximum.
    #[test]
    fn witness_attains_maximum((n, d) in small_cell()) {
        let s = BellScenario::quarter(n, d).unwrap();
        let w = witness_assignment(&s).unwrap();
        let v: f64 = eval_product(&s, &w).unwrap();
        prop_assert!((v - oracle_max(&s)).abs() < 1e-9);
    }

    /// The residue table used by the oracle agrees with the direct forms.
    #[test]
    fn residue_table_matches_direct(
        (n, d, a) in (1usize..=5, 2usize..=6).prop_flat_map(|(n, d)| (Just(n), Just(d), assignment(n, d))),
        p in -8i64..=8,
        q in prop::sample::select(vec![1i64, 2, 3, 4, 6]),
    ) {
        let s = BellScenario::new(n, d, Nu::new(p, q)).unwrap();
        let table = ResidueTable::<f64>::new(&s).eval(&a);
        let product: f64 = eval_product(&s, &a).unwrap();
        let cosine: f64 = eval_cosine(&s, &a).unwrap();
        prop_assert!((table - product).abs() < 1e-9);
        prop_assert!((cosine - product).abs() < 1e-9);
    }

    /// Permuting parties leaves the value unchanged.
    #[test]
    fn party_permutation_invariance(
        (n, d, a) in (2usize..=5, 2usize..=5).prop_flat_map(|(n, d)| (Just(n), Just(d), assignment(n, d))),
        nu in odd_quarter(),
        rot in 0usize..5,
    ) {
        let s = BellScenario::new(n, d, nu).unwrap();
        let mut alpha = a.alpha().to_vec();
        let mut beta = a.beta().to_vec();
        alpha.rotate_left(rot % n);
        beta.rotate_left(rot % n);
        let b = Assignment::new(alpha, beta, d).unwrap();
        let x: f64 = eval_product(&s, &a).unwrap();
        let y: f64 = eval_product(&s, &b).unwrap();
        prop_assert!((x - y).abs() < 1e-9);
    }

    /// Named functions equal their generic form at random points.
    #[test]
    fn reductions_hold_pointwise(
        name in prop::sample::select(vec![
            FunctionName::Chsh,
            FunctionName::Mermin,
            FunctionName::Ardehali,
            FunctionName::MerminCollins,
            FunctionName::SvetlichnyCollins,
        ]),
        (n, a) in (2usize..=10).prop_flat_map(|n| (Just(n), assignment(n, 2))),
    ) {
        prop_assume!(name.supports(n));
        let f = NamedFunction::new(name, n).unwrap();
        let (nu, k) = table_reduction(name, n).unwrap();
        let s = BellScenario::new(n, 2, nu).unwrap();
        let g: f64 = eval_product(&s, &a).unwrap();
        let v: f64 = f.eval(&a).unwrap();
        prop_assert!((v - 2f64.sqrt().powi(k) * g).abs() < 1e-8 * (1.0 + v.abs()));
    }
}
