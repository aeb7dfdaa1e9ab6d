mod common;

use bell_lp::lp::{solve_with, SolverOptions};
use bell_lp::{solve, verify_strong_duality, LinearProgram, LpOutcome, Rational};
use common::{dot, q, z};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-10i64..=10, 1i64..=10).prop_map(|(n, d)| q(n, d))
}

fn nonneg_rational() -> impl Strategy<Value = Rational> {
    (0i64..=10, 1i64..=10).prop_map(|(n, d)| q(n, d))
}

/// `min cᵀx, Ax ≥ b, x ≥ 0` with `b = A x₀ − s` and `c = Aᵀy₀ + t` for
/// nonnegative `x₀, s, y₀, t`, so both it and its dual are feasible.
fn feasible_lp(max_m: usize, max_n: usize) -> impl Strategy<Value = LinearProgram<Rational>> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(small_rational(), n), m),
            prop::collection::vec(nonneg_rational(), n),
            prop::collection::vec(nonneg_rational(), m),
            prop::collection::vec(nonneg_rational(), m),
            prop::collection::vec(nonneg_rational(), n),
        )
            .prop_map(|(a, x0, s, y0, t)| {
                let b: Vec<Rational> = a
                    .iter()
                    .zip(&s)
                    .map(|(row, si)| dot(row, &x0) - si)
                    .collect();
                let c: Vec<Rational> = (0..x0.len())
                    .map(|j| {
                        a.iter()
                            .zip(&y0)
                            .map(|(row, y)| &row[j] * y)
                            .sum::<Rational>()
                            + &t[j]
                    })
                    .collect();
                LinearProgram::minimize(c, a, b).unwrap()
            })
    })
}

fn column(a: &[Vec<Rational>], j: usize) -> Vec<Rational> {
    a.iter().map(|r| r[j].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strong_duality_and_complementary_slackness(lp in feasible_lp(6, 8)) {
        let LpOutcome::Optimal { solution: x, value, dual: y } = solve(&lp).unwrap() else {
            panic!("feasible bounded program was not solved to optimality");
        };
        let a = lp.matrix();
        prop_assert!(x.iter().all(|v| !v.is_negative()));
        prop_assert!(y.iter().all(|v| !v.is_negative()));
        for (row, b) in a.iter().zip(lp.rhs()) {
            prop_assert!(dot(row, &x) >= *b);
        }
        for (j, cj) in lp.objective().iter().enumerate() {
            prop_assert!(dot(&column(a, j), &y) <= *cj);
        }
        prop_assert_eq!(&dot(lp.objective(), &x), &value);
        prop_assert_eq!(&dot(lp.rhs(), &y), &value);
        for (row, (b, yi)) in a.iter().zip(lp.rhs().iter().zip(&y)) {
            prop_assert!((dot(row, &x) - b) * yi == z(0));
        }
        for (j, (cj, xj)) in lp.objective().iter().zip(&x).enumerate() {
            prop_assert!((cj - dot(&column(a, j), &y)) * xj == z(0));
        }

        // Solving the dual directly agrees.
        let dual_outcome = solve(&lp.dual()).unwrap();
        let primal = LpOutcome::Optimal { solution: x, value, dual: y };
        prop_assert!(verify_strong_duality(&primal, &dual_outcome).unwrap());
    }

    #[test]
    fn weak_duality_for_any_feasible_pair(lp in feasible_lp(5, 6), scale in 1i64..5) {
        // Any primal-feasible x and dual-feasible y satisfy bᵀy ≤ cᵀx.
        let LpOutcome::Optimal { solution: x, dual: y, .. } = solve(&lp).unwrap() else {
            panic!("not optimal");
        };
        let x2: Vec<Rational> = x.iter().map(|v| v * z(scale) + z(1)).collect();
        let ok = lp.matrix().iter().zip(lp.rhs()).all(|(r, b)| dot(r, &x2) >= *b);
        if ok {
            prop_assert!(dot(lp.rhs(), &y) <= dot(lp.objective(), &x2));
        }
    }

    #[test]
    fn float_instantiation_tracks_exact(lp in feasible_lp(4, 5)) {
        let exact = solve(&lp).unwrap();
        let to_f = |v: &Rational| num_traits::ToPrimitive::to_f64(v).unwrap();
        let flp = LinearProgram::minimize(
            lp.objective().iter().map(to_f).collect(),
            lp.matrix().iter().map(|r| r.iter().map(to_f).collect()).collect(),
            lp.rhs().iter().map(to_f).collect(),
        ).unwrap();
        let fv = *solve(&flp).unwrap().optimal_value().expect("optimal");
        let ev = to_f(exact.optimal_value().unwrap());
        prop_assert!((fv - ev).abs() <= 1e-6 * (1.0 + ev.abs()), "{} vs {}", fv, ev);
    }

    #[test]
    fn farkas_certificate_for_contradictory_rows(row in prop::collection::vec(small_rational(), 1..6), gap in 1i64..10) {
        // r·x ≥ 1 and −r·x ≥ gap − 1 add up to 0 ≥ gap.
        let neg: Vec<Rational> = row.iter().map(|v| -v).collect();
        let lp = LinearProgram::minimize(vec![z(1); row.len()], vec![row.clone(), neg], vec![z(1), z(gap - 1)]).unwrap();
        let LpOutcome::Infeasible { certificate: y } = solve(&lp).unwrap() else {
            panic!("contradictory program reported feasible");
        };
        prop_assert!(y.iter().all(|v| !v.is_negative()));
        for j in 0..row.len() {
            prop_assert!(dot(&column(lp.matrix(), j), &y) <= z(0));
        }
        prop_assert!(dot(lp.rhs(), &y) > z(0));
    }

    #[test]
    fn unbounded_ray_is_improving(lp in feasible_lp(4, 5), j in 0usize..5) {
        // Make column j nonnegative with a negative cost: x_j → ∞ stays feasible.
        // Raising column j only increases A x₀, so the program stays feasible.
        let n = lp.num_cols();
        let j = j % n;
        let a: Vec<Vec<Rational>> = lp.matrix().iter().map(|r| {
            let mut r = r.clone();
            r[j] = r[j].abs();
            r
        }).collect();
        let mut c = lp.objective().to_vec();
        c[j] = z(-1);
        let lp = LinearProgram::minimize(c, a, lp.rhs().to_vec()).unwrap();
        match solve(&lp).unwrap() {
            LpOutcome::Unbounded { point, ray } => {
                prop_assert!(lp.is_feasible(&point));
                prop_assert!(ray.iter().all(|v| !v.is_negative()));
                for r in lp.matrix() {
                    prop_assert!(dot(r, &ray) >= z(0));
                }
                prop_assert!(dot(lp.objective(), &ray) < z(0));
            }
            other => prop_assert!(false, "expected unbounded, got {:?}", other),
        }
    }
}

#[test]
fn iteration_limit_is_an_error() {
    let lp = LinearProgram::minimize(
        vec![z(1), z(1)],
        vec![vec![z(1), z(2)], vec![z(3), z(1)]],
        vec![z(4), z(6)],
    )
    .unwrap();
    let err = solve_with(
        &lp,
        &SolverOptions {
            iteration_limit: Some(0),
        },
    )
    .unwrap_err();
    assert!(matches!(err, bell_lp::LpError::IterationLimit(0)));
    assert!(solve(&lp)
        .unwrap()
        .optimal_value()
        .is_some_and(|v| !v.is_zero()));
}
