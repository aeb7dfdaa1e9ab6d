//! Measurement scenarios, deterministic strategies and the model matrix.
//!
//! Index conventions used everywhere in the crate:
//!
//! * setting tuples are ordered lexicographically, last party fastest, with
//!   the identity ("no measurement") choice before measurement 1, so row 0 is
//!   the all-identity normalization row;
//! * deterministic strategies are ordered lexicographically over the
//!   `(party, measurement)` slots, last slot fastest, outcomes in declared order.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::rational::format_rational;
use crate::scalar::Scalar;
use crate::Rational;

/// Default cap on the number of deterministic strategies (model-matrix columns).
pub const DEFAULT_COLUMN_CAP: usize = 1 << 24;
/// Hard cap on model-matrix entries, independent of the column cap.
pub const MATRIX_CELL_CAP: usize = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("a scenario needs at least one party")]
    NoParties,
    #[error("party {party} has no measurements")]
    EmptyParty { party: usize },
    #[error("measurement {measurement} of party {party} has no outcomes")]
    EmptyMeasurement { party: usize, measurement: usize },
    #[error("measurement {measurement} of party {party} repeats outcome {value}")]
    DuplicateOutcome {
        party: usize,
        measurement: usize,
        value: String,
    },
    #[error("scenario needs {required}, above the cap of {cap}")]
    SizeLimit { required: String, cap: usize },
    #[error("expected {expected} correlation entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("normalization entry must be 1, found {found}")]
    BadNormalization { found: String },
    #[error("entry {setting} = {value} exceeds the reachable magnitude {bound}")]
    MagnitudeExceedsBound {
        setting: String,
        value: String,
        bound: String,
    },
}

/// Parties, their measurements, and each measurement's outcome values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    parties: Vec<Vec<Vec<Rational>>>,
}

/// One choice per party: `None` is the identity, `Some(j)` is measurement `j`
/// (zero-based; labels print it one-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingTuple(pub Vec<Option<usize>>);

/// One outcome index per `(party, measurement)` slot, in slot order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy(pub Vec<usize>);

impl Scenario {
    pub fn new(parties: Vec<Vec<Vec<Rational>>>) -> Result<Self, ScenarioError> {
        if parties.is_empty() {
            return Err(ScenarioError::NoParties);
        }
        for (p, measurements) in parties.iter().enumerate() {
            if measurements.is_empty() {
                return Err(ScenarioError::EmptyParty { party: p });
            }
            for (j, outcomes) in measurements.iter().enumerate() {
                if outcomes.is_empty() {
                    return Err(ScenarioError::EmptyMeasurement {
                        party: p,
                        measurement: j,
                    });
                }
                let mut seen = HashSet::new();
                for o in outcomes {
                    if !seen.insert(o) {
                        return Err(ScenarioError::DuplicateOutcome {
                            party: p,
                            measurement: j,
                            value: format_rational(o),
                        });
                    }
                }
            }
        }
        Ok(Self { parties })
    }

    /// Every party gets `measurements` measurements with outcomes `{+1, -1}`.
    pub fn dichotomic(measurements_per_party: &[usize]) -> Result<Self, ScenarioError> {
        let pm = vec![Rational::one(), -Rational::one()];
        Self::new(
            measurements_per_party
                .iter()
                .map(|&m| vec![pm.clone(); m])
                .collect(),
        )
    }

    /// The two-party, two-measurement dichotomic scenario.
    pub fn chsh() -> Self {
        Self::dichotomic(&[2, 2]).expect("valid scenario")
    }

    pub fn parties(&self) -> &[Vec<Vec<Rational>>] {
        &self.parties
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn num_measurements(&self, party: usize) -> usize {
        self.parties[party].len()
    }

    pub fn outcomes(&self, party: usize, measurement: usize) -> &[Rational] {
        &self.parties[party][measurement]
    }

    /// Number of setting tuples, `prod_p (m_p + 1)`. `None` on overflow.
    pub fn setting_count(&self) -> Option<usize> {
        self.parties
            .iter()
            .try_fold(1usize, |acc, m| acc.checked_mul(m.len() + 1))
    }

    /// Number of deterministic strategies. `None` on overflow.
    pub fn strategy_count(&self) -> Option<usize> {
        self.slots().try_fold(1usize, |acc, (p, j)| {
            acc.checked_mul(self.parties[p][j].len())
        })
    }

    /// `(party, measurement)` pairs in slot order.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parties
            .iter()
            .enumerate()
            .flat_map(|(p, ms)| (0..ms.len()).map(move |j| (p, j)))
    }

    fn slot_offset(&self, party: usize) -> usize {
        self.parties[..party].iter().map(Vec::len).sum()
    }

    /// `A`, `B`, ... for the first 26 parties, then `P27`, `P28`, ...
    pub fn party_name(&self, party: usize) -> String {
        if party < 26 {
            char::from(b'A' + party as u8).to_string()
        } else {
            format!("P{}", party + 1)
        }
    }

    /// E.g. `I`, `A1`, `B2`, `A1B2`.
    pub fn setting_label(&self, setting: &SettingTuple) -> String {
        let mut label = String::new();
        for (p, choice) in setting.0.iter().enumerate() {
            match choice {
                Some(j) if p < 26 => label.push_str(&format!("{}{}", self.party_name(p), j + 1)),
                Some(j) => label.push_str(&format!("[{}:{}]", self.party_name(p), j + 1)),
                None => {}
            }
        }
        if label.is_empty() {
            label.push('I');
        }
        label
    }

    /// E.g. `A1=1,A2=-1,B1=1,B2=1`.
    pub fn strategy_label(&self, strategy: &DeterministicStrategy) -> String {
        self.slots()
            .zip(&strategy.0)
            .map(|((p, j), &o)| {
                format!(
                    "{}{}={}",
                    self.party_name(p),
                    j + 1,
                    format_rational(&self.parties[p][j][o])
                )
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Outcome value a strategy assigns to measurement `measurement` of `party`.
    pub fn strategy_outcome<'a>(
        &'a self,
        strategy: &DeterministicStrategy,
        party: usize,
        measurement: usize,
    ) -> &'a Rational {
        let slot = self.slot_offset(party) + measurement;
        &self.parties[party][measurement][strategy.0[slot]]
    }

    pub fn setting_index(&self, setting: &SettingTuple) -> usize {
        setting
            .0
            .iter()
            .zip(&self.parties)
            .fold(0, |acc, (choice, ms)| {
                acc * (ms.len() + 1) + choice.map_or(0, |j| j + 1)
            })
    }

    pub fn strategy_index(&self, strategy: &DeterministicStrategy) -> usize {
        self.slots()
            .zip(&strategy.0)
            .fold(0, |acc, ((p, j), &o)| acc * self.parties[p][j].len() + o)
    }

    /// Largest reachable magnitude of the correlator for `setting`.
    pub fn magnitude_bound(&self, setting: &SettingTuple) -> Rational {
        let mut bound = Rational::one();
        for (p, choice) in setting.0.iter().enumerate() {
            if let Some(j) = choice {
                let max = self.parties[p][*j]
                    .iter()
                    .map(Signed::abs)
                    .max()
                    .expect("nonempty measurement");
                bound *= max;
            }
        }
        bound
    }
}

/// All setting tuples in canonical row order.
pub fn enumerate_settings(scenario: &Scenario) -> Vec<SettingTuple> {
    let radices: Vec<usize> = scenario.parties.iter().map(|m| m.len() + 1).collect();
    mixed_radix(&radices)
        .map(|digits| SettingTuple(digits.into_iter().map(|d| d.checked_sub(1)).collect()))
        .collect()
}

/// All deterministic strategies in canonical column order.
///
/// No size check happens here; see [`build_model_matrix_with_cap`].
pub fn enumerate_strategies(scenario: &Scenario) -> Vec<DeterministicStrategy> {
    let radices: Vec<usize> = scenario
        .slots()
        .map(|(p, j)| scenario.parties[p][j].len())
        .collect();
    mixed_radix(&radices).map(DeterministicStrategy).collect()
}

fn mixed_radix(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut idx| {
        let mut digits = vec![0; radices.len()];
        for (d, &r) in digits.iter_mut().zip(radices).rev() {
            *d = idx % r;
            idx /= r;
        }
        digits
    })
}

/// The linear map from strategy probabilities to correlators.
///
/// Row `s`, column `λ` holds the product over measured parties of the outcome
/// `λ` assigns to the measurement chosen in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMatrix<T: Scalar = Rational> {
    scenario: Scenario,
    settings: Vec<SettingTuple>,
    strategies: Vec<DeterministicStrategy>,
    entries: Vec<Vec<T>>,
}

impl<T: Scalar> ModelMatrix<T> {
    pub fn build(scenario: &Scenario) -> Result<Self, ScenarioError> {
        Self::build_with_cap(scenario, DEFAULT_COLUMN_CAP)
    }

    pub fn build_with_cap(scenario: &Scenario, column_cap: usize) -> Result<Self, ScenarioError> {
        let too_big = |required: String| ScenarioError::SizeLimit {
            required,
            cap: column_cap,
        };
        let columns = scenario
            .strategy_count()
            .ok_or_else(|| too_big("more than usize::MAX columns".into()))?;
        if columns > column_cap {
            return Err(too_big(format!("{columns} columns")));
        }
        let rows = scenario
            .setting_count()
            .ok_or_else(|| too_big("more than usize::MAX rows".into()))?;
        if rows.saturating_mul(columns) > MATRIX_CELL_CAP {
            return Err(ScenarioError::SizeLimit {
                required: format!("{rows}x{columns} entries"),
                cap: MATRIX_CELL_CAP,
            });
        }

        let settings = enumerate_settings(scenario);
        let strategies = enumerate_strategies(scenario);
        let entries = settings
            .iter()
            .map(|s| {
                strategies
                    .iter()
                    .map(|lambda| {
                        let mut v = Rational::one();
                        for (p, choice) in s.0.iter().enumerate() {
                            if let Some(j) = choice {
                                v *= scenario.strategy_outcome(lambda, p, *j);
                            }
                        }
                        T::from_rational(&v)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            scenario: scenario.clone(),
            settings,
            strategies,
            entries,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn settings(&self) -> &[SettingTuple] {
        &self.settings
    }

    pub fn strategies(&self) -> &[DeterministicStrategy] {
        &self.strategies
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.strategies.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &T {
        &self.entries[row][col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row]
    }

    pub fn entries(&self) -> &[Vec<T>] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        self.entries.iter().map(|r| r[col].clone()).collect()
    }

    /// `M x`. Panics if `x.len() != self.cols()`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols());
        self.entries.iter().map(|row| dot(row, x)).collect()
    }

    /// `Mᵀ y`. Panics if `y.len() != self.rows()`.
    pub fn transpose_mul_vec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows());
        let mut out = vec![T::zero(); self.cols()];
        for (row, yi) in self.entries.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, m) in out.iter_mut().zip(row) {
                let mut t = m.clone();
                t *= yi;
                *o += &t;
            }
        }
        out
    }

    /// `Mᵀ 1`.
    pub fn column_sums(&self) -> Vec<T> {
        self.transpose_mul_vec(&vec![T::one(); self.rows()])
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let mut t = x.clone();
        t *= y;
        acc += &t;
    }
    acc
}

/// Builds the exact model matrix with the default column cap.
pub fn build_model_matrix(scenario: &Scenario) -> Result<ModelMatrix, ScenarioError> {
    ModelMatrix::build(scenario)
}

pub fn build_model_matrix_with_cap(
    scenario: &Scenario,
    column_cap: usize,
) -> Result<ModelMatrix, ScenarioError> {
    ModelMatrix::build_with_cap(scenario, column_cap)
}

/// Observed correlators, one per setting tuple in row order; entry 0 is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector<T: Scalar = Rational> {
    entries: Vec<T>,
}

impl<T: Scalar> CorrelationVector<T> {
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Everything but the normalization entry.
    pub fn correlators(&self) -> &[T] {
        &self.entries[1..]
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    /// Wraps entries without validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(entries: Vec<T>) -> Self {
        Self { entries }
    }
}

impl<T: Scalar> fmt::Display for CorrelationVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Checks length, normalization and reachable magnitudes.
pub fn validate_correlations<T: Scalar>(
    scenario: &Scenario,
    raw: Vec<T>,
) -> Result<CorrelationVector<T>, ScenarioError> {
    let settings = enumerate_settings(scenario);
    if raw.len() != settings.len() {
        return Err(ScenarioError::LengthMismatch {
            expected: settings.len(),
            found: raw.len(),
        });
    }
    if !raw[0].approx_eq(&T::one()) {
        return Err(ScenarioError::BadNormalization {
            found: raw[0].to_string(),
        });
    }
    for (s, v) in settings.iter().zip(&raw) {
        let bound = scenario.magnitude_bound(s);
        let mut excess = v.abs();
        excess -= &T::from_rational(&bound);
        if excess.strictly_positive() {
            return Err(ScenarioError::MagnitudeExceedsBound {
                setting: scenario.setting_label(s),
                value: v.to_string(),
                bound: format_rational(&bound),
            });
        }
    }
    let mut entries = raw;
    entries[0] = T::one();
    Ok(CorrelationVector { entries })
}

impl fmt::Display for SettingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|c| c.map_or_else(|| "I".to_string(), |j| (j + 1).to_string()))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}
