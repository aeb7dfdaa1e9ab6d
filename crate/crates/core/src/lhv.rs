//! Local-realism decision procedure.
//!
//! The correlators `C` admit a local hidden-variable model iff some `P ≥ 0`
//! solves `M P = C`. This is decided with the program
//!
//! ```text
//! minimize (Mᵀ1)ᵀ P   s.t.  M P ≥ C,  P ≥ 0
//! ```
//!
//! whose optimum equals `1ᵀC` exactly when such a `P` exists. Otherwise the
//! dual optimum `Q` (of `max CᵀQ, MᵀQ ≤ Mᵀ1, Q ≥ 0`) yields the Bell
//! inequality `cᵀq ≤ q₀` with `(−q₀, q) = Q − 1`, violated by `C`.

use std::fmt;

use thiserror::Error;

use crate::lp::{solve_with, LinearProgram, LpError, LpOutcome, SolveStats, SolverOptions};
use crate::scalar::Scalar;
use crate::scenario::{
    dot, validate_correlations, CorrelationVector, ModelMatrix, Scenario, ScenarioError,
    DEFAULT_COLUMN_CAP,
};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LhvError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Probability per deterministic strategy, in strategy order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T: Scalar = Rational> {
    probabilities: Vec<T>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Requires nonnegative entries summing to one.
    pub fn new(probabilities: Vec<T>) -> Result<Self, LhvError> {
        if probabilities.iter().any(Scalar::strictly_negative) {
            return Err(LhvError::InvalidCertificate("negative probability".into()));
        }
        let mut total = T::zero();
        for p in &probabilities {
            total += p;
        }
        if !total.approx_eq(&T::one()) {
            return Err(LhvError::InvalidCertificate(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    /// `(strategy index, probability)` for every nonzero entry.
    pub fn support(&self) -> impl Iterator<Item = (usize, &T)> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
    }
}

/// `cᵀq ≤ q₀` over the non-normalization correlators `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellInequality<T: Scalar = Rational> {
    coefficients: Vec<T>,
    bound: T,
    certificate: Option<Vec<T>>,
}

impl<T: Scalar> BellInequality<T> {
    /// Builds `qᵀc ≤ q₀` with `q₀` computed as the classical bound.
    pub fn from_coefficients(
        coefficients: Vec<T>,
        matrix: &ModelMatrix<T>,
    ) -> Result<Self, LhvError> {
        let bound = classical_bound(&coefficients, matrix)?;
        Ok(Self {
            coefficients,
            bound,
            certificate: None,
        })
    }

    /// An inequality with an explicit bound, e.g. parsed from a document.
    pub fn with_bound(coefficients: Vec<T>, bound: T) -> Self {
        Self {
            coefficients,
            bound,
            certificate: None,
        }
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn bound(&self) -> &T {
        &self.bound
    }

    /// The dual vector (or dual ray) this inequality was read from, if any.
    pub fn certificate(&self) -> Option<&[T]> {
        self.certificate.as_deref()
    }

    pub fn is_trivial(&self) -> bool {
        self.coefficients.iter().all(Scalar::approx_zero)
    }

    /// Divides coefficients and bound by the largest absolute coefficient.
    /// The trivial inequality is returned unchanged.
    pub fn canonical(&self) -> Self {
        let mut scale = T::zero();
        for c in &self.coefficients {
            let a = c.abs();
            if a > scale {
                scale = a;
            }
        }
        if scale.approx_zero() {
            return self.clone();
        }
        let div = |v: &T| {
            let mut v = v.clone();
            v /= &scale;
            v
        };
        Self {
            coefficients: self.coefficients.iter().map(div).collect(),
            bound: div(&self.bound),
            certificate: self.certificate.clone(),
        }
    }

    /// `cᵀq`.
    pub fn value(&self, correlations: &CorrelationVector<T>) -> Result<T, LhvError> {
        if correlations.len() != self.coefficients.len() + 1 {
            return Err(LhvError::DimensionMismatch(format!(
                "inequality has {} coefficients, correlation vector has {} correlators",
                self.coefficients.len(),
                correlations.len().saturating_sub(1)
            )));
        }
        Ok(dot(&self.coefficients, correlations.correlators()))
    }
}

impl<T: Scalar> fmt::Display for BellInequality<T> {
    /// E.g. `c[4] + c[5] + c[7] - c[8] <= 2`, indexing rows of `M`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            match (first, sign) {
                (true, "-") => write!(f, "-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "c[{}]", i + 1)?;
            } else {
                write!(f, "{a}*c[{}]", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T: Scalar = Rational> {
    /// A reproducing distribution exists.
    Local { distribution: JointDistribution<T> },
    /// The dual optimum gave `inequality`, violated by `margin = cᵀq − q₀ > 0`.
    Nonlocal {
        inequality: BellInequality<T>,
        margin: T,
    },
    /// `M P ≥ C` had no solution at all; the inequality came from the Farkas
    /// ray of the unbounded dual.
    NonlocalUnbounded {
        inequality: BellInequality<T>,
        margin: T,
    },
}

impl<T: Scalar> Verdict<T> {
    pub fn is_local(&self) -> bool {
        matches!(self, Verdict::Local { .. })
    }

    pub fn inequality(&self) -> Option<&BellInequality<T>> {
        match self {
            Verdict::Local { .. } => None,
            Verdict::Nonlocal { inequality, .. }
            | Verdict::NonlocalUnbounded { inequality, .. } => Some(inequality),
        }
    }

    pub fn margin(&self) -> Option<&T> {
        match self {
            Verdict::Local { .. } => None,
            Verdict::Nonlocal { margin, .. } | Verdict::NonlocalUnbounded { margin, .. } => {
                Some(margin)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    pub column_cap: usize,
    pub solver: SolverOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            column_cap: DEFAULT_COLUMN_CAP,
            solver: SolverOptions::default(),
        }
    }
}

/// A verdict plus the solver data it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<T: Scalar = Rational> {
    pub verdict: Verdict<T>,
    /// Optimum of the primal program, when it has one.
    pub primal_value: Option<T>,
    /// `1ᵀC`, the optimum a local point attains.
    pub target_value: T,
    /// Optimal dual vector `Q` or the Farkas ray, in row order of `M`.
    pub dual: Option<Vec<T>>,
    pub stats: SolveStats,
}

/// `minimize (Mᵀ1)ᵀP  s.t.  M P ≥ C, P ≥ 0`.
pub fn lhv_feasibility_program<T: Scalar>(
    matrix: &ModelMatrix<T>,
    correlations: &CorrelationVector<T>,
) -> Result<LinearProgram<T>, LhvError> {
    if matrix.rows() != correlations.len() {
        return Err(LhvError::DimensionMismatch(format!(
            "model matrix has {} rows, correlation vector has {} entries",
            matrix.rows(),
            correlations.len()
        )));
    }
    Ok(LinearProgram::minimize(
        matrix.column_sums(),
        matrix.entries().to_vec(),
        correlations.entries().to_vec(),
    )?)
}

pub fn check_local_realism<T: Scalar>(
    scenario: &Scenario,
    correlations: &CorrelationVector<T>,
) -> Result<Verdict<T>, LhvError> {
    Ok(analyze(scenario, correlations, &CheckOptions::default())?.verdict)
}

/// Like [`check_local_realism`] but with options and solver diagnostics.
pub fn analyze<T: Scalar>(
    scenario: &Scenario,
    correlations: &CorrelationVector<T>,
    options: &CheckOptions,
) -> Result<Analysis<T>, LhvError> {
    let matrix = ModelMatrix::<T>::build_with_cap(scenario, options.column_cap)?;
    analyze_with_matrix(&matrix, correlations, &options.solver)
}

pub fn analyze_with_matrix<T: Scalar>(
    matrix: &ModelMatrix<T>,
    correlations: &CorrelationVector<T>,
    solver: &SolverOptions,
) -> Result<Analysis<T>, LhvError> {
    let correlations = validate_correlations(matrix.scenario(), correlations.entries().to_vec())?;
    let program = lhv_feasibility_program(matrix, &correlations)?;
    let (outcome, stats) = solve_with(&program, solver)?;
    let mut target_value = T::zero();
    for c in correlations.entries() {
        target_value += c;
    }

    match outcome {
        LpOutcome::Optimal {
            solution,
            value,
            dual,
        } => {
            if value.approx_eq(&target_value) {
                let reproduced = matrix.mul_vec(&solution);
                let exact = reproduced
                    .iter()
                    .zip(correlations.entries())
                    .all(|(a, b)| a.approx_eq(b));
                if !exact {
                    return Err(LhvError::Internal(
                        "optimal distribution does not reproduce the correlations".into(),
                    ));
                }
                let distribution = JointDistribution::new(solution)?;
                Ok(Analysis {
                    verdict: Verdict::Local { distribution },
                    primal_value: Some(value),
                    target_value,
                    dual: Some(dual),
                    stats,
                })
            } else {
                let inequality = extract_bell_inequality(&dual, matrix)?.canonical();
                let margin = positive_margin(&inequality, &correlations)?;
                Ok(Analysis {
                    verdict: Verdict::Nonlocal { inequality, margin },
                    primal_value: Some(value),
                    target_value,
                    dual: Some(dual),
                    stats,
                })
            }
        }
        LpOutcome::Infeasible { certificate } => {
            let inequality = extract_from_ray(&certificate, matrix)?.canonical();
            let margin = positive_margin(&inequality, &correlations)?;
            Ok(Analysis {
                verdict: Verdict::NonlocalUnbounded { inequality, margin },
                primal_value: None,
                target_value,
                dual: Some(certificate),
                stats,
            })
        }
        LpOutcome::Unbounded { .. } => Err(LhvError::Internal(
            "primal unbounded although Q = 1 is dual feasible".into(),
        )),
    }
}

fn positive_margin<T: Scalar>(
    inequality: &BellInequality<T>,
    correlations: &CorrelationVector<T>,
) -> Result<T, LhvError> {
    let margin = evaluate_inequality(inequality, correlations)?;
    if !margin.strictly_positive() {
        return Err(LhvError::Internal(format!(
            "extracted inequality is not violated (margin {margin})"
        )));
    }
    Ok(margin)
}

/// Reads `cᵀq ≤ q₀` off a dual-feasible `Q` (`Q ≥ 0`, `MᵀQ ≤ Mᵀ1`).
///
/// `q` is `Q − 1` without its normalization component; `q₀` is recomputed
/// as the classical bound rather than taken from the certificate.
pub fn extract_bell_inequality<T: Scalar>(
    dual: &[T],
    matrix: &ModelMatrix<T>,
) -> Result<BellInequality<T>, LhvError> {
    check_certificate_shape(dual, matrix)?;
    let lhs = matrix.transpose_mul_vec(dual);
    let rhs = matrix.column_sums();
    if let Some(j) = (0..lhs.len()).find(|&j| {
        let mut d = lhs[j].clone();
        d -= &rhs[j];
        d.strictly_positive()
    }) {
        return Err(LhvError::InvalidCertificate(format!(
            "(MᵀQ)_{j} = {} exceeds (Mᵀ1)_{j} = {}",
            lhs[j], rhs[j]
        )));
    }
    let coefficients: Vec<T> = dual[1..].iter().map(|v| v.clone() - T::one()).collect();
    let mut inequality = BellInequality::from_coefficients(coefficients, matrix)?;
    inequality.certificate = Some(dual.to_vec());
    Ok(inequality)
}

/// Reads `cᵀq ≤ q₀` off a dual ray `ΔQ ≥ 0` with `MᵀΔQ ≤ 0`.
pub fn extract_from_ray<T: Scalar>(
    ray: &[T],
    matrix: &ModelMatrix<T>,
) -> Result<BellInequality<T>, LhvError> {
    check_certificate_shape(ray, matrix)?;
    if let Some(j) = matrix
        .transpose_mul_vec(ray)
        .iter()
        .position(Scalar::strictly_positive)
    {
        return Err(LhvError::InvalidCertificate(format!(
            "(MᵀΔQ)_{j} is positive"
        )));
    }
    let mut inequality = BellInequality::from_coefficients(ray[1..].to_vec(), matrix)?;
    inequality.certificate = Some(ray.to_vec());
    Ok(inequality)
}

fn check_certificate_shape<T: Scalar>(v: &[T], matrix: &ModelMatrix<T>) -> Result<(), LhvError> {
    if v.len() != matrix.rows() {
        return Err(LhvError::DimensionMismatch(format!(
            "certificate has {} entries, model matrix has {} rows",
            v.len(),
            matrix.rows()
        )));
    }
    if v.iter().any(Scalar::strictly_negative) {
        return Err(LhvError::InvalidCertificate("negative component".into()));
    }
    Ok(())
}

/// `max_λ (M̃ᵀq)_λ`, where `M̃` is `M` without its normalization row.
pub fn classical_bound<T: Scalar>(q: &[T], matrix: &ModelMatrix<T>) -> Result<T, LhvError> {
    if q.len() + 1 != matrix.rows() {
        return Err(LhvError::DimensionMismatch(format!(
            "{} coefficients for {} non-normalization rows",
            q.len(),
            matrix.rows().saturating_sub(1)
        )));
    }
    let mut padded = Vec::with_capacity(matrix.rows());
    padded.push(T::zero());
    padded.extend_from_slice(q);
    let values = matrix.transpose_mul_vec(&padded);
    let mut best = values[0].clone();
    for v in values.into_iter().skip(1) {
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// `cᵀq − q₀`; positive means the correlations violate the inequality.
pub fn evaluate_inequality<T: Scalar>(
    inequality: &BellInequality<T>,
    correlations: &CorrelationVector<T>,
) -> Result<T, LhvError> {
    let mut v = inequality.value(correlations)?;
    v -= inequality.bound();
    Ok(v)
}

/// `M P`.
pub fn reconstruct_correlations<T: Scalar>(
    distribution: &JointDistribution<T>,
    matrix: &ModelMatrix<T>,
) -> Result<CorrelationVector<T>, LhvError> {
    if distribution.probabilities().len() != matrix.cols() {
        return Err(LhvError::DimensionMismatch(format!(
            "distribution has {} entries, model matrix has {} columns",
            distribution.probabilities().len(),
            matrix.cols()
        )));
    }
    Ok(CorrelationVector::from_trusted(
        matrix.mul_vec(distribution.probabilities()),
    ))
}

/// Indices of the deterministic strategies attaining the bound.
pub fn tight_strategies<T: Scalar>(
    inequality: &BellInequality<T>,
    matrix: &ModelMatrix<T>,
) -> Vec<usize> {
    let mut padded = Vec::with_capacity(matrix.rows());
    padded.push(T::zero());
    padded.extend_from_slice(inequality.coefficients());
    matrix
        .transpose_mul_vec(&padded)
        .iter()
        .enumerate()
        .filter(|(_, v)| v.approx_eq(inequality.bound()))
        .map(|(j, _)| j)
        .collect()
}
