mod common;

use bell_lp::lhv::{analyze, CheckOptions};
use bell_lp::{
    build_model_matrix, check_local_realism, classical_bound, evaluate_inequality,
    reconstruct_correlations, validate_correlations, Rational, Scenario, Verdict,
};
use common::{
    apply, chsh_vector, dichotomic, max_of, oracle_matrix, q, random_distribution, strategy_values,
    z,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Checks a nonlocal verdict's certificate against the oracle matrix.
fn assert_valid_certificate(m: &[Vec<Rational>], c: &[Rational], verdict: &Verdict) {
    let ineq = verdict.inequality().expect("nonlocal");
    let values = strategy_values(m, ineq.coefficients());
    assert_eq!(
        ineq.bound(),
        &max_of(&values),
        "bound is not the classical maximum"
    );
    let lhs = common::dot(ineq.coefficients(), &c[1..]);
    assert_eq!(verdict.margin().unwrap(), &(lhs - ineq.bound()));
    assert!(verdict.margin().unwrap().is_positive());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn local_points_are_reproduced(shape in prop::sample::select(vec![vec![1, 1], vec![2, 2], vec![2, 1], vec![1, 1, 1], vec![2, 3]]), seed in any::<u64>()) {
        let o = dichotomic(&shape);
        let m = oracle_matrix(&o);
        let mut rng = StdRng::seed_from_u64(seed);
        let c = apply(&m, &random_distribution(&mut rng, m[0].len(), 6));
        let s = Scenario::dichotomic(&shape).unwrap();
        let cv = validate_correlations(&s, c.clone()).unwrap();
        let verdict = check_local_realism(&s, &cv).unwrap();
        let Verdict::Local { distribution } = &verdict else {
            panic!("local point judged nonlocal: {verdict:?}");
        };
        prop_assert!(distribution.probabilities().iter().all(|p| !p.is_negative()));
        prop_assert_eq!(distribution.probabilities().iter().sum::<Rational>(), z(1));
        let back = reconstruct_correlations(distribution, &build_model_matrix(&s).unwrap()).unwrap();
        prop_assert_eq!(back.entries(), &c[..]);
    }

    #[test]
    fn pr_box_mixtures_cross_at_one_half(num in 0i64..=16) {
        // t·PR + (1 − t)·white noise has CHSH value 4t; local iff t ≤ 1/2.
        let t = q(num, 16);
        let c = chsh_vector([t.clone(), t.clone(), t.clone(), -t.clone()]);
        let s = Scenario::chsh();
        let verdict = check_local_realism(&s, &validate_correlations(&s, c.clone()).unwrap()).unwrap();
        prop_assert_eq!(verdict.is_local(), t <= q(1, 2));
        if !verdict.is_local() {
            assert_valid_certificate(&oracle_matrix(&dichotomic(&[2, 2])), &c, &verdict);
        }
    }

    #[test]
    fn random_box_points_get_sound_verdicts(seed in any::<u64>()) {
        // Arbitrary points of the correlator box, local or not.
        use rand::Rng;
        let mut rng = StdRng::seed_from_u64(seed);
        let m = oracle_matrix(&dichotomic(&[2, 2]));
        let mut c = vec![z(1)];
        c.extend((1..9).map(|_| q(rng.gen_range(-6..=6), 6)));
        let s = Scenario::chsh();
        let cv = validate_correlations(&s, c.clone()).unwrap();
        let verdict = check_local_realism(&s, &cv).unwrap();
        match &verdict {
            Verdict::Local { distribution } => {
                prop_assert_eq!(apply(&m, distribution.probabilities()), c);
            }
            _ => assert_valid_certificate(&m, &c, &verdict),
        }
    }

    #[test]
    fn float_and_exact_verdicts_agree(num in 0i64..16) {
        // The f64 instantiation reaches the same verdict away from the boundary.
        let t = q(2 * num + 1, 32);
        let tf = (2 * num + 1) as f64 / 32.0;
        let s = Scenario::chsh();
        let exact = check_local_realism(&s, &validate_correlations(&s, chsh_vector([t.clone(), t.clone(), t.clone(), -t])).unwrap()).unwrap();
        let fc = vec![1.0, 0.0, 0.0, 0.0, tf, tf, 0.0, tf, -tf];
        let float = check_local_realism(&s, &validate_correlations(&s, fc).unwrap()).unwrap();
        prop_assert_eq!(exact.is_local(), float.is_local());
    }
}

#[test]
fn canonical_inequality_is_scale_free() {
    let s = Scenario::chsh();
    let c = validate_correlations(&s, chsh_vector([z(1), z(1), z(1), z(-1)])).unwrap();
    let ineq = check_local_realism(&s, &c)
        .unwrap()
        .inequality()
        .unwrap()
        .clone();
    let largest = ineq.coefficients().iter().map(Signed::abs).max().unwrap();
    assert_eq!(largest, z(1));
    let m = build_model_matrix(&s).unwrap();
    let scaled: Vec<Rational> = ineq.coefficients().iter().map(|v| v * q(7, 3)).collect();
    assert_eq!(
        classical_bound(&scaled, &m).unwrap(),
        ineq.bound() * q(7, 3)
    );
}

#[test]
fn inconsistent_marginals_give_a_certificate() {
    // ⟨AB⟩ = 1 forces A = B, contradicting ⟨A⟩ = 1, ⟨B⟩ = −1.
    let s = Scenario::dichotomic(&[1, 1]).unwrap();
    let c = vec![z(1), z(-1), z(1), z(1)];
    let cv = validate_correlations(&s, c.clone()).unwrap();
    let analysis = analyze(&s, &cv, &CheckOptions::default()).unwrap();
    assert!(!analysis.verdict.is_local());
    assert_valid_certificate(&oracle_matrix(&dichotomic(&[1, 1])), &c, &analysis.verdict);
    let margin = evaluate_inequality(analysis.verdict.inequality().unwrap(), &cv).unwrap();
    assert!(margin.is_positive());
}

#[test]
fn three_outcome_scenario() {
    // One party, one measurement with outcomes {1, 0, −1}: ⟨A⟩ ∈ [−1, 1].
    let s = Scenario::new(vec![vec![vec![z(1), z(0), z(-1)]]]).unwrap();
    for (v, local) in [(q(1, 2), true), (z(0), true), (z(-1), true)] {
        let c = validate_correlations(&s, vec![z(1), v]).unwrap();
        assert_eq!(check_local_realism(&s, &c).unwrap().is_local(), local);
    }
    let m = build_model_matrix(&s).unwrap();
    assert!(m.entries()[1].iter().any(Zero::is_zero));
}
