//! Linear programs in canonical inequality form and their duals.
//!
//! A [`LinearProgram`] is one of
//!
//! * `Minimize`: minimize `objᵀx` subject to `A x ≥ b`, `x ≥ 0`;
//! * `Maximize`: maximize `objᵀx` subject to `A x ≤ b`, `x ≥ 0`.
//!
//! [`LinearProgram::dual`] maps each form onto the other, so taking the dual
//! twice gives back the original program.

mod simplex;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::scenario::dot;

pub use simplex::{solve, solve_with, SolveStats, SolverOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("simplex exceeded its iteration limit of {0}")]
    IterationLimit(usize),
    #[error("outcome is not optimal")]
    NotOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    /// `min objᵀx` s.t. `A x ≥ b`, `x ≥ 0`.
    Minimize,
    /// `max objᵀx` s.t. `A x ≤ b`, `x ≥ 0`.
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T: Scalar> {
    sense: Sense,
    objective: Vec<T>,
    matrix: Vec<Vec<T>>,
    rhs: Vec<T>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(
        sense: Sense,
        objective: Vec<T>,
        matrix: Vec<Vec<T>>,
        rhs: Vec<T>,
    ) -> Result<Self, LpError> {
        if matrix.len() != rhs.len() {
            return Err(LpError::DimensionMismatch(format!(
                "{} constraint rows but {} right-hand-side entries",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some((i, row)) = matrix
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != objective.len())
        {
            return Err(LpError::DimensionMismatch(format!(
                "row {i} has {} entries but the objective has {}",
                row.len(),
                objective.len()
            )));
        }
        Ok(Self {
            sense,
            objective,
            matrix,
            rhs,
        })
    }

    /// `min objᵀx` s.t. `A x ≥ b`, `x ≥ 0`.
    pub fn minimize(objective: Vec<T>, matrix: Vec<Vec<T>>, rhs: Vec<T>) -> Result<Self, LpError> {
        Self::new(Sense::Minimize, objective, matrix, rhs)
    }

    /// `max objᵀx` s.t. `A x ≤ b`, `x ≥ 0`.
    pub fn maximize(objective: Vec<T>, matrix: Vec<Vec<T>>, rhs: Vec<T>) -> Result<Self, LpError> {
        Self::new(Sense::Maximize, objective, matrix, rhs)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    /// The dual program: `min Lᵀx, Mx ≥ C` becomes `max Cᵀy, Mᵀy ≤ L`, and
    /// vice versa.
    pub fn dual(&self) -> Self {
        let sense = match self.sense {
            Sense::Minimize => Sense::Maximize,
            Sense::Maximize => Sense::Minimize,
        };
        Self {
            sense,
            objective: self.rhs.clone(),
            matrix: transpose(&self.matrix, self.num_cols()),
            rhs: self.objective.clone(),
        }
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }

    /// `A x`.
    pub fn lhs(&self, x: &[T]) -> Vec<T> {
        self.matrix.iter().map(|row| dot(row, x)).collect()
    }

    /// Checks `x ≥ 0` and the row constraints, up to the scalar tolerance.
    pub fn is_feasible(&self, x: &[T]) -> bool {
        if x.len() != self.num_cols() || x.iter().any(Scalar::strictly_negative) {
            return false;
        }
        self.lhs(x).iter().zip(&self.rhs).all(|(ax, b)| {
            let mut slack = ax.clone();
            slack -= b;
            match self.sense {
                Sense::Minimize => !slack.strictly_negative(),
                Sense::Maximize => !slack.strictly_positive(),
            }
        })
    }
}

pub(crate) fn transpose<T: Clone>(matrix: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols)
        .map(|j| matrix.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// The dual of `lp`. See [`LinearProgram::dual`].
pub fn dual_of<T: Scalar>(lp: &LinearProgram<T>) -> LinearProgram<T> {
    lp.dual()
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T: Scalar> {
    /// `solution` is optimal for the program, `dual` is optimal for its dual
    /// program, and both attain `value`.
    Optimal {
        solution: Vec<T>,
        value: T,
        dual: Vec<T>,
    },
    /// `point` is feasible and `point + t·ray` stays feasible for all `t ≥ 0`
    /// while the objective strictly improves.
    Unbounded { point: Vec<T>, ray: Vec<T> },
    /// A Farkas certificate `y ≥ 0`. For `Minimize`: `yᵀA ≤ 0` and `yᵀb > 0`.
    /// For `Maximize`: `yᵀA ≥ 0` and `yᵀb < 0`.
    Infeasible { certificate: Vec<T> },
}

impl<T: Scalar> LpOutcome<T> {
    pub fn optimal_value(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `true` iff both outcomes are optimal with equal objective values.
pub fn verify_strong_duality<T: Scalar>(
    primal: &LpOutcome<T>,
    dual: &LpOutcome<T>,
) -> Result<bool, LpError> {
    match (primal.optimal_value(), dual.optimal_value()) {
        (Some(p), Some(d)) => Ok(p.approx_eq(d)),
        _ => Err(LpError::NotOptimal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn two_var() -> LinearProgram<Rational> {
        LinearProgram::minimize(
            vec![q(1), q(1)],
            vec![vec![q(1), q(2)], vec![q(3), q(1)]],
            vec![q(4), q(6)],
        )
        .unwrap()
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        assert!(matches!(
            LinearProgram::minimize(vec![q(1)], vec![vec![q(1), q(2)]], vec![q(0)]),
            Err(LpError::DimensionMismatch(_))
        ));
        assert!(matches!(
            LinearProgram::minimize(vec![q(1)], vec![vec![q(1)]], vec![]),
            Err(LpError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn dual_of_one_by_one() {
        let lp = LinearProgram::minimize(vec![q(1)], vec![vec![q(1)]], vec![q(3)]).unwrap();
        let d = dual_of(&lp);
        assert_eq!(d.sense(), Sense::Maximize);
        assert_eq!(d.objective(), &[q(3)]);
        assert_eq!(d.matrix(), &[vec![q(1)]]);
        assert_eq!(d.rhs(), &[q(1)]);
    }

    #[test]
    fn double_dual_is_identity() {
        let lp = two_var();
        assert_eq!(lp.dual().dual(), lp);
        assert_eq!(lp.dual().matrix(), &[vec![q(1), q(3)], vec![q(2), q(1)]]);
    }

    #[test]
    fn strong_duality_check() {
        let a = LpOutcome::Optimal {
            solution: vec![q(3)],
            value: q(3),
            dual: vec![q(1)],
        };
        let b = LpOutcome::Optimal {
            solution: vec![q(1)],
            value: q(3),
            dual: vec![q(3)],
        };
        let c = LpOutcome::Optimal {
            solution: vec![q(1)],
            value: q(2),
            dual: vec![q(3)],
        };
        assert_eq!(verify_strong_duality(&a, &b), Ok(true));
        assert_eq!(verify_strong_duality(&a, &c), Ok(false));
        let inf = LpOutcome::Infeasible {
            certificate: vec![q(1)],
        };
        assert_eq!(verify_strong_duality(&a, &inf), Err(LpError::NotOptimal));
    }

    #[test]
    fn feasibility_respects_sense() {
        let lp = two_var();
        assert!(lp.is_feasible(&[q(2), q(1)]));
        assert!(!lp.is_feasible(&[q(1), q(1)]));
        assert!(!lp.is_feasible(&[q(-1), q(10)]));
        let d = lp.dual();
        assert!(d.is_feasible(&[q(0), q(0)]));
        assert!(!d.is_feasible(&[q(1), q(1)]));
    }
}
