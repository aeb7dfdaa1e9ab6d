//! Correlators from quantum states and observables.
//!
//! This is the one floating-point corner of the crate. [`rationalize`] is the
//! bridge into exact arithmetic: it snaps each correlator to its best rational
//! approximation under a denominator cap.

use nalgebra::{DMatrix, RealField};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, ToPrimitive};
use thiserror::Error;

use crate::rational::{best_rational_approximation, rational_from_f64};
use crate::scenario::{enumerate_settings, validate_correlations, CorrelationVector, Scenario};
use crate::Rational;

/// Default tolerance for hermiticity, positivity, trace and spectrum checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Default denominator cap for [`rationalize`].
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a density operator: {0}")]
    NotAState(String),
    #[error("not Hermitian: {0}")]
    NotHermitian(String),
    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub trait Real: RealField + Float + Copy {}
impl<T: RealField + Float + Copy> Real for T {}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real = f64>(DMatrix<Complex<T>>);

impl<T: Real> ComplexMatrix<T> {
    /// From row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self, QuantumError> {
        let d = re.len();
        let square = |m: &[Vec<T>]| m.len() == d && m.iter().all(|r| r.len() == d);
        if d == 0 || !square(re) || !square(im) {
            return Err(QuantumError::DimensionMismatch(
                "real and imaginary parts must be the same nonempty square shape".into(),
            ));
        }
        Ok(Self(DMatrix::from_fn(d, d, |i, j| {
            Complex::new(re[i][j], im[i][j])
        })))
    }

    pub fn from_real(re: &[Vec<T>]) -> Result<Self, QuantumError> {
        let zeros: Vec<Vec<T>> = re.iter().map(|r| vec![T::zero(); r.len()]).collect();
        Self::from_parts(re, &zeros)
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self::from_real(&[vec![o, l], vec![l, o]]).expect("2x2")
    }

    pub fn pauli_y() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self::from_parts(&[vec![o, o], vec![o, o]], &[vec![o, -l], vec![l, o]]).expect("2x2")
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self::from_real(&[vec![l, o], vec![o, -l]]).expect("2x2")
    }

    /// `x σx + y σy + z σz`.
    pub fn pauli_combination(x: T, y: T, z: T) -> Self {
        Self::pauli_x()
            .scaled(x)
            .plus(&Self::pauli_y().scaled(y))
            .plus(&Self::pauli_z().scaled(z))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn projector(amplitudes: &[Complex<T>]) -> Self {
        let d = amplitudes.len();
        Self(DMatrix::from_fn(d, d, |i, j| {
            amplitudes[i] * amplitudes[j].conj()
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0[(i, j)]
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Panics on a dimension mismatch.
    pub fn plus(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn trace(&self) -> Complex<T> {
        self.0.trace()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues, ascending. Only meaningful for Hermitian matrices.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let mut ev: Vec<T> = self
            .0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    pub fn inner(&self) -> &DMatrix<Complex<T>> {
        &self.0
    }
}

/// Kronecker product in the given order.
pub fn tensor<T: Real>(factors: &[ComplexMatrix<T>]) -> Result<ComplexMatrix<T>, QuantumError> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| QuantumError::DimensionMismatch("empty tensor product".into()))?;
    Ok(rest
        .iter()
        .fold(first.clone(), |acc, m| ComplexMatrix(acc.0.kronecker(&m.0))))
}

/// `Tr(ρ O)` without forming the product.
pub fn expectation<T: Real>(rho: &ComplexMatrix<T>, op: &ComplexMatrix<T>) -> Complex<T> {
    let d = rho.dim();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..d {
        for j in 0..d {
            acc += rho.0[(i, j)] * op.0[(j, i)];
        }
    }
    acc
}

/// `(|01⟩ − |10⟩)/√2` as a density operator.
pub fn singlet<T: Real>() -> ComplexMatrix<T> {
    let h = T::one() / Float::sqrt(T::one() + T::one());
    let o = Complex::new(T::zero(), T::zero());
    ComplexMatrix::projector(&[
        o,
        Complex::new(h, T::zero()),
        Complex::new(-h, T::zero()),
        o,
    ])
}

/// `v |ψ⁻⟩⟨ψ⁻| + (1 − v) I/4`.
pub fn werner_state<T: Real>(visibility: T) -> Result<ComplexMatrix<T>, QuantumError> {
    if !(visibility >= T::zero() && visibility <= T::one()) {
        return Err(QuantumError::OutOfRange(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let four = T::from(4.0).expect("representable");
    Ok(singlet::<T>()
        .scaled(visibility)
        .plus(&ComplexMatrix::identity(4).scaled((T::one() - visibility) / four)))
}

/// A joint state with one Hermitian observable per party and measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSetup<T: Real = f64> {
    pub state: ComplexMatrix<T>,
    pub local_dims: Vec<usize>,
    /// `observables[p][j]` is measurement `j` of party `p`.
    pub observables: Vec<Vec<ComplexMatrix<T>>>,
}

impl<T: Real> QuantumSetup<T> {
    /// Checks the setup against `scenario`: shapes, a valid state, Hermitian
    /// observables whose eigenvalues sit within `tol` of the declared outcomes.
    pub fn validate(&self, scenario: &Scenario, tol: T) -> Result<(), QuantumError> {
        if self.local_dims.len() != scenario.num_parties()
            || self.observables.len() != scenario.num_parties()
        {
            return Err(QuantumError::DimensionMismatch(format!(
                "scenario has {} parties, setup has {} local dimensions and {} observable lists",
                scenario.num_parties(),
                self.local_dims.len(),
                self.observables.len()
            )));
        }
        let total: usize = self.local_dims.iter().product();
        if self.state.dim() != total {
            return Err(QuantumError::DimensionMismatch(format!(
                "state has dimension {}, local dimensions multiply to {total}",
                self.state.dim()
            )));
        }
        if !self.state.is_hermitian(tol) {
            return Err(QuantumError::NotAState("state is not Hermitian".into()));
        }
        let tr = self.state.trace();
        if Float::abs(tr.re - T::one()) > tol || Float::abs(tr.im) > tol {
            return Err(QuantumError::NotAState(format!("trace is {tr}")));
        }
        if let Some(&min) = self.state.hermitian_eigenvalues().first() {
            if min < -tol {
                return Err(QuantumError::NotAState(format!(
                    "negative eigenvalue {min}"
                )));
            }
        }
        for (p, obs) in self.observables.iter().enumerate() {
            if obs.len() != scenario.num_measurements(p) {
                return Err(QuantumError::DimensionMismatch(format!(
                    "party {p} has {} observables for {} measurements",
                    obs.len(),
                    scenario.num_measurements(p)
                )));
            }
            for (j, o) in obs.iter().enumerate() {
                if o.dim() != self.local_dims[p] {
                    return Err(QuantumError::DimensionMismatch(format!(
                        "observable {j} of party {p} has dimension {}, expected {}",
                        o.dim(),
                        self.local_dims[p]
                    )));
                }
                if !o.is_hermitian(tol) {
                    return Err(QuantumError::NotHermitian(format!(
                        "observable {j} of party {p}"
                    )));
                }
                let allowed: Vec<T> = scenario
                    .outcomes(p, j)
                    .iter()
                    .map(|r| T::from(r.to_f64().unwrap_or(f64::NAN)).expect("finite"))
                    .collect();
                for ev in o.hermitian_eigenvalues() {
                    if !allowed.iter().any(|a| Float::abs(ev - *a) <= tol) {
                        return Err(QuantumError::SpectrumMismatch(format!(
                            "observable {j} of party {p} has eigenvalue {ev} outside its outcome set"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Re Tr(ρ ⊗_p O_p(s))` for every setting tuple `s`, in row order.
pub fn correlations_from_quantum<T: Real>(
    setup: &QuantumSetup<T>,
    scenario: &Scenario,
    tol: T,
) -> Result<Vec<T>, QuantumError> {
    setup.validate(scenario, tol)?;
    let identities: Vec<ComplexMatrix<T>> = setup
        .local_dims
        .iter()
        .map(|&d| ComplexMatrix::identity(d))
        .collect();
    enumerate_settings(scenario)
        .iter()
        .map(|s| {
            let factors: Vec<ComplexMatrix<T>> =
                s.0.iter()
                    .enumerate()
                    .map(|(p, c)| match c {
                        Some(j) => setup.observables[p][*j].clone(),
                        None => identities[p].clone(),
                    })
                    .collect();
            Ok(expectation(&setup.state, &tensor(&factors)?).re)
        })
        .collect()
}

/// Snaps each entry to its best rational approximation with denominator at
/// most `max_denominator`, forces the normalization entry to exactly 1, and
/// validates the result against `scenario`.
pub fn rationalize<T: Real>(
    scenario: &Scenario,
    values: &[T],
    max_denominator: u64,
) -> Result<CorrelationVector, QuantumError> {
    if max_denominator == 0 {
        return Err(QuantumError::OutOfRange(
            "max_denominator must be at least 1".into(),
        ));
    }
    let Some(first) = values.first() else {
        return Err(QuantumError::DimensionMismatch("no entries".into()));
    };
    let first = first.to_f64().unwrap_or(f64::NAN);
    if first.is_nan() || (first - 1.0).abs() > 1e-9 {
        return Err(QuantumError::OutOfRange(format!(
            "normalization entry is {first}"
        )));
    }
    let cap = BigInt::from(max_denominator);
    let mut entries: Vec<Rational> = Vec::with_capacity(values.len());
    entries.push(Rational::from_integer(1.into()));
    for v in &values[1..] {
        let exact = v
            .to_f64()
            .and_then(rational_from_f64)
            .ok_or_else(|| QuantumError::OutOfRange(format!("non-finite entry {v}")))?;
        entries.push(best_rational_approximation(&exact, &cap));
    }
    validate_correlations(scenario, entries).map_err(|e| match e {
        crate::ScenarioError::LengthMismatch { expected, found } => {
            QuantumError::DimensionMismatch(format!("expected {expected} entries, found {found}"))
        }
        other => QuantumError::OutOfRange(other.to_string()),
    })
}

/// Whether a violation margin is small enough that rounding the inputs to
/// denominators of at most `max_denominator` could have produced it.
pub fn rounding_sensitive(margin: &Rational, rows: usize, max_denominator: u64) -> bool {
    let threshold = Rational::new(BigInt::from(2 * rows as u64), BigInt::from(max_denominator));
    margin < &threshold
}

/// Observables maximizing the CHSH value on the singlet:
/// `A1 = σz`, `A2 = σx`, `B1 = (σz + σx)/√2`, `B2 = (σz − σx)/√2`.
pub fn chsh_observables<T: Real>() -> Vec<Vec<ComplexMatrix<T>>> {
    let h = T::one() / Float::sqrt(T::one() + T::one());
    let o = T::zero();
    vec![
        vec![ComplexMatrix::pauli_z(), ComplexMatrix::pauli_x()],
        vec![
            ComplexMatrix::pauli_combination(h, o, h),
            ComplexMatrix::pauli_combination(-h, o, h),
        ],
    ]
}
