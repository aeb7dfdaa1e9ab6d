//! Complete Bell-inequality sets.
//!
//! Every `B` with `MᵀB ≤ 0` gives a valid Bell inequality, and the extreme
//! points of the polytope `{B : MᵀB ≤ 0, B ≥ −1}` already form a finite
//! complete set. Its vertices are enumerated exactly and mapped to the
//! standard form `cᵀq ≤ q₀` with `q₀` the classical bound.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::lhv::{evaluate_inequality, tight_strategies, BellInequality, LhvError};
use crate::linalg::rank;
use crate::polytope::{double_description, HPolyhedron, PolytopeError, DEFAULT_RAY_CAP};
use crate::scalar::Scalar;
use crate::scenario::{
    CorrelationVector, ModelMatrix, Scenario, ScenarioError, DEFAULT_COLUMN_CAP,
};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lhv(#[from] LhvError),
    #[error("correlation vector has {found} entries, the inequality set expects {expected}")]
    ScenarioMismatch { expected: usize, found: usize },
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
}

/// `{B : MᵀB ≤ 0, −B ≤ 1}` over the rows of a model matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolytope<T: Scalar = Rational> {
    matrix: ModelMatrix<T>,
    constraints: HPolyhedron<T>,
}

impl<T: Scalar> DualPolytope<T> {
    pub fn new(matrix: ModelMatrix<T>) -> Self {
        let d = matrix.rows();
        let mut rows = Vec::with_capacity(matrix.cols() + d);
        let mut rhs = Vec::with_capacity(matrix.cols() + d);
        for j in 0..matrix.cols() {
            rows.push(matrix.column(j));
            rhs.push(T::zero());
        }
        for i in 0..d {
            let mut row = vec![T::zero(); d];
            row[i] = -T::one();
            rows.push(row);
            rhs.push(T::one());
        }
        let constraints = HPolyhedron::new(d, rows, rhs).expect("consistent shape");
        Self {
            matrix,
            constraints,
        }
    }

    pub fn matrix(&self) -> &ModelMatrix<T> {
        &self.matrix
    }

    pub fn constraints(&self) -> &HPolyhedron<T> {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.constraints.dim()
    }

    /// Constraint rows sorted by nonzero count, then lexicographically.
    pub fn insertion_order(&self) -> Vec<usize> {
        let rows = self.constraints.matrix();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| {
            let nz = |r: &[T]| r.iter().filter(|v| !v.is_zero()).count();
            nz(&rows[a])
                .cmp(&nz(&rows[b]))
                .then_with(|| lex_cmp(&rows[a], &rows[b]))
        });
        order
    }
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Exact vertices of the dual polytope.
pub fn enumerate_vertices<T: Scalar>(
    polytope: &DualPolytope<T>,
    ray_cap: usize,
) -> Result<Vec<Vec<T>>, EnumError> {
    let generators =
        double_description(&polytope.constraints, &polytope.insertion_order(), ray_cap)?;
    let mut vertices = generators.vertices;
    vertices.sort_by(|a, b| lex_cmp(a, b));
    Ok(vertices)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellSetMember<T: Scalar = Rational> {
    pub inequality: BellInequality<T>,
    /// Whether the inequality defines a facet of the local polytope.
    pub facet: bool,
    /// Number of deterministic strategies attaining the bound.
    pub tight_strategies: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompleteBellSet<T: Scalar = Rational> {
    pub scenario: Scenario,
    /// Canonical inequalities, sorted lexicographically by coefficients.
    pub members: Vec<BellSetMember<T>>,
    /// Vertex count of the dual polytope before canonicalization.
    pub raw_vertices: usize,
}

impl<T: Scalar> CompleteBellSet<T> {
    pub fn facets(&self) -> impl Iterator<Item = &BellSetMember<T>> {
        self.members.iter().filter(|m| m.facet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumOptions {
    pub column_cap: usize,
    pub ray_cap: usize,
    /// Worker threads for post-processing; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            column_cap: DEFAULT_COLUMN_CAP,
            ray_cap: DEFAULT_RAY_CAP,
            threads: None,
        }
    }
}

pub fn enumerate_complete_set(scenario: &Scenario) -> Result<CompleteBellSet, EnumError> {
    enumerate_complete_set_with(scenario, &EnumOptions::default())
}

pub fn enumerate_complete_set_with<T: Scalar>(
    scenario: &Scenario,
    options: &EnumOptions,
) -> Result<CompleteBellSet<T>, EnumError> {
    let matrix = ModelMatrix::<T>::build_with_cap(scenario, options.column_cap)?;
    let polytope = DualPolytope::new(matrix);
    let generators = double_description(
        polytope.constraints(),
        &polytope.insertion_order(),
        options.ray_cap,
    )?;
    let raw_vertices = generators.vertices.len();
    // Outcome sets without sign symmetry can leave the polytope unbounded;
    // its extreme rays also satisfy MᵀB ≤ 0 and are kept alongside vertices.
    let vertices: Vec<Vec<T>> = generators
        .vertices
        .into_iter()
        .chain(generators.rays)
        .collect();
    let matrix = polytope.matrix();
    let full_rank = rank(matrix.entries().to_vec());

    let process = || -> Result<Vec<BellSetMember<T>>, EnumError> {
        vertices
            .par_iter()
            .map(|b| {
                let inequality =
                    BellInequality::from_coefficients(b[1..].to_vec(), matrix)?.canonical();
                if inequality.is_trivial() {
                    return Ok(None);
                }
                let tight = tight_strategies(&inequality, matrix);
                let tight_rank = rank(tight.iter().map(|&j| matrix.column(j)).collect());
                Ok(Some(BellSetMember {
                    facet: tight_rank + 1 == full_rank,
                    tight_strategies: tight.len(),
                    inequality,
                }))
            })
            .filter_map(Result::transpose)
            .collect()
    };
    let mut members = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| EnumError::ThreadPool(e.to_string()))?
            .install(process)?,
        None => process()?,
    };

    members.sort_by(|a, b| lex_cmp(a.inequality.coefficients(), b.inequality.coefficients()));
    members.dedup_by(|a, b| {
        a.inequality
            .coefficients()
            .iter()
            .zip(b.inequality.coefficients())
            .all(|(x, y)| x.approx_eq(y))
    });
    Ok(CompleteBellSet {
        scenario: scenario.clone(),
        members,
        raw_vertices,
    })
}

/// `true` iff no member of `set` is violated by `correlations`.
pub fn is_complete_against<T: Scalar>(
    set: &CompleteBellSet<T>,
    correlations: &CorrelationVector<T>,
) -> Result<bool, EnumError> {
    let expected = set.scenario.setting_count().unwrap_or(usize::MAX);
    if correlations.len() != expected {
        return Err(EnumError::ScenarioMismatch {
            expected,
            found: correlations.len(),
        });
    }
    for m in &set.members {
        if evaluate_inequality(&m.inequality, correlations)?.strictly_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}
