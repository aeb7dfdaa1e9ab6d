//! Exact linear-programming test of local realism.
//!
//! Given a measurement [`Scenario`] and observed correlators, the crate
//! decides whether a local hidden-variable model reproduces them. When it
//! does, the answer is a joint probability distribution over deterministic
//! strategies; when it does not, the answer is a Bell inequality read off the
//! dual optimum that the correlators violate. The complete finite set of Bell
//! inequalities of a scenario can also be enumerated from the vertices of the
//! dual constraint polytope.
//!
//! The optimization and polytope code is generic over [`Scalar`]; the aliases
//! below fix the exact-rational instantiation used by the command-line tool.

pub mod bell_enum;
pub mod cli;
pub mod lhv;
mod linalg;
pub mod lp;
pub mod polytope;
pub mod quantum;
pub mod rational;
pub mod scalar;
pub mod scenario;

pub use bell_enum::{
    enumerate_complete_set, enumerate_vertices, is_complete_against, CompleteBellSet, DualPolytope,
    EnumError,
};
pub use lhv::{
    analyze, check_local_realism, classical_bound, evaluate_inequality, extract_bell_inequality,
    lhv_feasibility_program, reconstruct_correlations, BellInequality, JointDistribution, LhvError,
    Verdict,
};
pub use lp::{dual_of, solve, verify_strong_duality, LinearProgram, LpError, LpOutcome, Sense};
pub use quantum::{
    correlations_from_quantum, rationalize, tensor, werner_state, ComplexMatrix, QuantumError,
    QuantumSetup,
};
pub use scalar::Scalar;
pub use scenario::{
    build_model_matrix, enumerate_settings, enumerate_strategies, validate_correlations,
    CorrelationVector, DeterministicStrategy, ModelMatrix, Scenario, ScenarioError, SettingTuple,
};

/// Arbitrary-precision rational, always stored in lowest terms.
pub type Rational = num_rational::BigRational;

pub type ExactProgram = LinearProgram<Rational>;
pub type FloatProgram = LinearProgram<f64>;
pub type ExactOutcome = LpOutcome<Rational>;
pub type FloatModelMatrix = ModelMatrix<f64>;
