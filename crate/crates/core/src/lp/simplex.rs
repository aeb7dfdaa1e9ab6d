//! Dense two-phase tableau simplex with Bland's least-index rule.
//!
//! `min Lᵀx, Mx ≥ C, x ≥ 0` is brought to equality form with one surplus
//! column per row. Rows with `C_i > 0` get an artificial column; rows with
//! `C_i ≤ 0` are negated so the surplus column is basic from the start.
//!
//! Dual values are read off the reduced costs of the surplus columns: for row
//! `i` that reduced cost is exactly `y_i` of the dual `max Cᵀy, Mᵀy ≤ L`, in
//! phase 2 (optimal dual) as well as phase 1 (Farkas certificate).

use std::cmp::Ordering;

use super::{LinearProgram, LpError, LpOutcome, Sense};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Pivot budget. `None` means `10 · (rows + cols)²`.
    pub iteration_limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub phase_one_pivots: usize,
    pub phase_two_pivots: usize,
}

impl SolveStats {
    pub fn iterations(&self) -> usize {
        self.phase_one_pivots + self.phase_two_pivots
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>, LpError> {
    solve_with(lp, &SolverOptions::default()).map(|(outcome, _)| outcome)
}

pub fn solve_with<T: Scalar>(
    lp: &LinearProgram<T>,
    options: &SolverOptions,
) -> Result<(LpOutcome<T>, SolveStats), LpError> {
    let (m, n) = (lp.num_rows(), lp.num_cols());
    let limit = options
        .iteration_limit
        .unwrap_or_else(|| 10 * (m + n) * (m + n));
    match lp.sense() {
        Sense::Minimize => Tableau::new(lp.objective(), lp.matrix(), lp.rhs(), limit).run(),
        Sense::Maximize => {
            // max cᵀx, Ax ≤ b  ⇔  min (−c)ᵀx, (−A)x ≥ −b
            let neg = |v: &[T]| v.iter().map(|x| -x.clone()).collect::<Vec<T>>();
            let matrix: Vec<Vec<T>> = lp.matrix().iter().map(|r| neg(r)).collect();
            let (outcome, stats) =
                Tableau::new(&neg(lp.objective()), &matrix, &neg(lp.rhs()), limit).run()?;
            let outcome = match outcome {
                LpOutcome::Optimal {
                    solution,
                    value,
                    dual,
                } => LpOutcome::Optimal {
                    solution,
                    value: -value,
                    dual,
                },
                other => other,
            };
            Ok((outcome, stats))
        }
    }
}

struct Tableau<T: Scalar> {
    /// Constraint rows, each `total` columns wide plus the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    cost: Vec<T>,
    n: usize,
    m: usize,
    artificial_start: usize,
    total: usize,
    limit: usize,
    stats: SolveStats,
}

enum Phase {
    One,
    Two,
}

enum Stop {
    Optimal,
    Unbounded(usize),
}

impl<T: Scalar> Tableau<T> {
    fn new(cost: &[T], matrix: &[Vec<T>], rhs: &[T], limit: usize) -> Self {
        let m = matrix.len();
        let n = cost.len();
        let needs_artificial: Vec<bool> = rhs.iter().map(Scalar::strictly_positive).collect();
        let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
        let artificial_start = n + m;
        let total = artificial_start + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_artificial = artificial_start;
        for i in 0..m {
            let mut row = vec![T::zero(); total + 1];
            if needs_artificial[i] {
                // M_i x − s_i + a_i = C_i
                row[..n].clone_from_slice(&matrix[i]);
                row[n + i] = -T::one();
                row[next_artificial] = T::one();
                row[total] = rhs[i].clone();
                basis.push(next_artificial);
                next_artificial += 1;
            } else {
                // −M_i x + s_i = −C_i
                for (dst, src) in row[..n].iter_mut().zip(&matrix[i]) {
                    *dst = -src.clone();
                }
                row[n + i] = T::one();
                row[total] = -rhs[i].clone();
                basis.push(n + i);
            }
            rows.push(row);
        }

        let mut full_cost = vec![T::zero(); total];
        full_cost[..n].clone_from_slice(cost);

        Self {
            rows,
            obj: vec![T::zero(); total + 1],
            basis,
            cost: full_cost,
            n,
            m,
            artificial_start,
            total,
            limit,
            stats: SolveStats::default(),
        }
    }

    fn run(mut self) -> Result<(LpOutcome<T>, SolveStats), LpError> {
        if self.total > self.artificial_start {
            let phase_one_cost: Vec<T> = (0..self.total)
                .map(|j| {
                    if j >= self.artificial_start {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            self.price(&phase_one_cost);
            match self.iterate(Phase::One)? {
                Stop::Optimal => {}
                Stop::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
            }
            let infeasibility = -self.obj[self.total].clone();
            if infeasibility.strictly_positive() {
                let certificate = self.surplus_reduced_costs();
                return Ok((LpOutcome::Infeasible { certificate }, self.stats));
            }
            self.drive_out_artificials();
        }

        let cost = self.cost.clone();
        self.price(&cost);
        let outcome = match self.iterate(Phase::Two)? {
            Stop::Optimal => {
                let solution = self.primal();
                let value = crate::scenario::dot(&self.cost[..self.n], &solution);
                LpOutcome::Optimal {
                    solution,
                    value,
                    dual: self.surplus_reduced_costs(),
                }
            }
            Stop::Unbounded(entering) => {
                let point = self.primal();
                let mut ray = vec![T::zero(); self.n];
                if entering < self.n {
                    ray[entering] = T::one();
                }
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if b < self.n {
                        ray[b] = -row[entering].clone();
                    }
                }
                LpOutcome::Unbounded { point, ray }
            }
        };
        Ok((outcome, self.stats))
    }

    /// Rebuilds the reduced-cost row for `cost` against the current basis.
    fn price(&mut self, cost: &[T]) {
        let mut obj: Vec<T> = cost
            .iter()
            .cloned()
            .chain(std::iter::once(T::zero()))
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                if !v.is_zero() {
                    let mut t = v.clone();
                    t *= cb;
                    *o -= &t;
                }
            }
        }
        self.obj = obj;
    }

    fn iterate(&mut self, phase: Phase) -> Result<Stop, LpError> {
        let enter_limit = match phase {
            Phase::One => self.total,
            Phase::Two => self.artificial_start,
        };
        loop {
            let Some(e) = (0..enter_limit).find(|&j| self.obj[j].strictly_negative()) else {
                return Ok(Stop::Optimal);
            };
            let Some(r) = self.leaving_row(e) else {
                return Ok(Stop::Unbounded(e));
            };
            if self.stats.iterations() >= self.limit {
                return Err(LpError::IterationLimit(self.limit));
            }
            self.pivot(r, e);
            match phase {
                Phase::One => self.stats.phase_one_pivots += 1,
                Phase::Two => self.stats.phase_two_pivots += 1,
            }
        }
    }

    /// Minimum-ratio row; ties go to the smallest basic variable index.
    fn leaving_row(&self, e: usize) -> Option<usize> {
        let rhs = self.total;
        let mut best: Option<usize> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[e].strictly_positive() {
                continue;
            }
            best = Some(match best {
                None => i,
                Some(k) => {
                    // row[rhs]/row[e]  vs  rows[k][rhs]/rows[k][e], both denominators positive
                    let mut lhs = row[rhs].clone();
                    lhs *= &self.rows[k][e];
                    let mut other = self.rows[k][rhs].clone();
                    other *= &row[e];
                    let ord = if lhs.approx_eq(&other) {
                        Ordering::Equal
                    } else {
                        lhs.partial_cmp(&other).unwrap_or(Ordering::Equal)
                    };
                    match ord {
                        Ordering::Less => i,
                        Ordering::Equal if self.basis[i] < self.basis[k] => i,
                        _ => k,
                    }
                }
            });
        }
        best
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        let eliminate = |target: &mut Vec<T>| {
            let f = target[e].clone();
            if f.is_zero() {
                return;
            }
            for &j in &support {
                let mut t = pivot_row[j].clone();
                t *= &f;
                target[j] -= &t;
            }
            target[e] = T::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Pivots zero-valued artificials out of the basis where possible. Rows
    /// where no structural column has a nonzero entry are redundant; their
    /// artificial stays basic at zero and never leaves.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.artificial_start {
                continue;
            }
            if let Some(j) = (0..self.artificial_start).find(|&j| !self.rows[r][j].approx_zero()) {
                self.pivot(r, j);
                self.stats.phase_one_pivots += 1;
            }
        }
    }

    fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[self.total].clone();
            }
        }
        x
    }

    fn surplus_reduced_costs(&self) -> Vec<T> {
        self.obj[self.n..self.n + self.m].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::verify_strong_duality;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn z(n: i64) -> Rational {
        q(n, 1)
    }

    #[test]
    fn one_dimensional_minimum() {
        let lp = LinearProgram::minimize(vec![z(1)], vec![vec![z(1)]], vec![z(3)]).unwrap();
        match solve(&lp).unwrap() {
            LpOutcome::Optimal {
                solution,
                value,
                dual,
            } => {
                assert_eq!(solution, vec![z(3)]);
                assert_eq!(value, z(3));
                assert_eq!(dual, vec![z(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_variable_vertex() {
        // Vertices of the feasible region: (0,6), (8/5,6/5), (4,0); objective
        // x+y takes 6, 14/5, 4 there.
        let lp = LinearProgram::minimize(
            vec![z(1), z(1)],
            vec![vec![z(1), z(2)], vec![z(3), z(1)]],
            vec![z(4), z(6)],
        )
        .unwrap();
        let primal = solve(&lp).unwrap();
        match &primal {
            LpOutcome::Optimal {
                solution,
                value,
                dual,
            } => {
                assert_eq!(solution, &vec![q(8, 5), q(6, 5)]);
                assert_eq!(value, &q(14, 5));
                // Dual vertex: y1 + 3y2 = 1, 2y1 + y2 = 1.
                assert_eq!(dual, &vec![q(2, 5), q(1, 5)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let dual = solve(&lp.dual()).unwrap();
        assert_eq!(dual.optimal_value(), Some(&q(14, 5)));
        assert_eq!(verify_strong_duality(&primal, &dual), Ok(true));
    }

    #[test]
    fn unbounded_minimum() {
        let lp = LinearProgram::minimize(vec![z(-1)], vec![], vec![]).unwrap();
        match solve(&lp).unwrap() {
            LpOutcome::Unbounded { point, ray } => {
                assert_eq!(point, vec![z(0)]);
                assert_eq!(ray, vec![z(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_with_farkas_certificate() {
        // x ≥ 2 and −x ≥ −1.
        let lp =
            LinearProgram::minimize(vec![z(1)], vec![vec![z(1)], vec![z(-1)]], vec![z(2), z(-1)])
                .unwrap();
        match solve(&lp).unwrap() {
            LpOutcome::Infeasible { certificate: y } => {
                assert!(y.iter().all(|v| *v >= z(0)));
                let ya = &y[0] - &y[1];
                let yb = &y[0] * z(2) - &y[1];
                assert!(ya <= z(0));
                assert!(yb > z(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn maximize_reports_positive_value() {
        // max 3y, y ≤ 1
        let lp = LinearProgram::maximize(vec![z(3)], vec![vec![z(1)]], vec![z(1)]).unwrap();
        match solve(&lp).unwrap() {
            LpOutcome::Optimal {
                solution,
                value,
                dual,
            } => {
                assert_eq!(solution, vec![z(1)]);
                assert_eq!(value, z(3));
                assert_eq!(dual, vec![z(3)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = LinearProgram::minimize(
            vec![z(1), z(2)],
            vec![vec![z(1), z(1)], vec![z(1), z(1)], vec![z(2), z(2)]],
            vec![z(1), z(1), z(2)],
        )
        .unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.optimal_value(), Some(&z(1)));
    }

    #[test]
    fn iteration_limit_is_reported() {
        let lp = LinearProgram::minimize(
            vec![z(1), z(1)],
            vec![vec![z(1), z(2)], vec![z(3), z(1)]],
            vec![z(4), z(6)],
        )
        .unwrap();
        let opts = SolverOptions {
            iteration_limit: Some(0),
        };
        assert_eq!(solve_with(&lp, &opts), Err(LpError::IterationLimit(0)));
    }

    #[test]
    fn floating_point_instantiation() {
        let lp = LinearProgram::minimize(
            vec![1.0f64, 1.0],
            vec![vec![1.0, 2.0], vec![3.0, 1.0]],
            vec![4.0, 6.0],
        )
        .unwrap();
        let v = *solve(&lp).unwrap().optimal_value().unwrap();
        assert!((v - 2.8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance, written as min with ≥ rows.
        let lp = LinearProgram::minimize(
            vec![q(-3, 4), z(150), q(-1, 50), z(6)],
            vec![
                vec![q(-1, 4), z(60), q(1, 25), z(-9)],
                vec![q(-1, 2), z(90), q(1, 50), z(-3)],
                vec![z(0), z(0), z(-1), z(0)],
            ],
            vec![z(0), z(0), z(-1)],
        )
        .unwrap();
        assert_eq!(solve(&lp).unwrap().optimal_value(), Some(&q(-1, 20)));
    }
}
