//! JSON document formats. Every rational is a `"p/q"` string.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bell_enum::CompleteBellSet;
use crate::lhv::{BellInequality, Verdict};
use crate::quantum::{singlet, werner_state, ComplexMatrix, QuantumSetup};
use crate::rational::{format_rational, parse_rational};
use crate::scenario::{
    enumerate_settings, validate_correlations, CorrelationVector, ModelMatrix, Scenario,
};
use crate::Rational;

use super::CliError;

pub const FORMAT_VERSION: u32 = 1;

fn check_version(found: u32) -> Result<(), CliError> {
    if found != FORMAT_VERSION {
        return Err(CliError::Input(format!(
            "unsupported format_version {found}, expected {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

fn rational(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(e.to_string()))
}

fn format_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartyDocument {
    /// Outcome values per measurement.
    pub measurements: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub format_version: u32,
    pub parties: Vec<PartyDocument>,
}

impl ScenarioDocument {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            parties: scenario
                .parties()
                .iter()
                .map(|ms| PartyDocument {
                    measurements: ms.iter().map(|os| format_all(os)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        check_version(self.format_version)?;
        let parties = self
            .parties
            .iter()
            .map(|p| {
                p.measurements
                    .iter()
                    .map(|os| os.iter().map(|o| rational(o)).collect())
                    .collect()
            })
            .collect::<Result<Vec<Vec<Vec<Rational>>>, CliError>>()?;
        Ok(Scenario::new(parties)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledValue {
    pub setting: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationsDocument {
    pub format_version: u32,
    /// One entry per setting tuple, normalization (`I`) included.
    pub entries: Vec<LabeledValue>,
}

impl CorrelationsDocument {
    pub fn from_correlations(scenario: &Scenario, c: &CorrelationVector) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            entries: enumerate_settings(scenario)
                .iter()
                .zip(c.entries())
                .map(|(s, v)| LabeledValue {
                    setting: scenario.setting_label(s),
                    value: format_rational(v),
                })
                .collect(),
        }
    }

    /// Entries may come in any order; each setting must appear exactly once.
    pub fn to_correlations(&self, scenario: &Scenario) -> Result<CorrelationVector, CliError> {
        check_version(self.format_version)?;
        let settings = enumerate_settings(scenario);
        let index: HashMap<String, usize> = settings
            .iter()
            .enumerate()
            .map(|(i, s)| (scenario.setting_label(s), i))
            .collect();
        let mut values: Vec<Option<Rational>> = vec![None; settings.len()];
        for e in &self.entries {
            let &i = index
                .get(e.setting.trim())
                .ok_or_else(|| CliError::Input(format!("unknown setting label {:?}", e.setting)))?;
            if values[i].is_some() {
                return Err(CliError::Input(format!(
                    "setting {:?} given twice",
                    e.setting
                )));
            }
            values[i] = Some(rational(&e.value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    CliError::Input(format!(
                        "missing setting {}",
                        scenario.setting_label(&settings[i])
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(validate_correlations(scenario, values)?)
    }
}

/// A number in a quantum document: a JSON number or a rational string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, CliError> {
        let v = match self {
            Number::Float(x) => *x,
            Number::Text(s) => num_traits::ToPrimitive::to_f64(&rational(s)?).unwrap_or(f64::NAN),
        };
        if !v.is_finite() {
            return Err(CliError::Input(format!("non-finite number {self:?}")));
        }
        Ok(v)
    }
}

fn numbers(v: &[Number]) -> Result<Vec<f64>, CliError> {
    v.iter().map(Number::value).collect()
}

fn matrix_of(rows: &[Vec<Number>]) -> Result<Vec<Vec<f64>>, CliError> {
    rows.iter().map(|r| numbers(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDocument {
    /// `(|01⟩ − |10⟩)/√2`.
    Singlet,
    Werner {
        visibility: Number,
    },
    /// Density matrix; `im` defaults to zero.
    Matrix {
        re: Vec<Vec<Number>>,
        im: Option<Vec<Vec<Number>>>,
    },
    /// Amplitudes of a pure state, normalized on load.
    Pure {
        re: Vec<Number>,
        im: Option<Vec<Number>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableDocument {
    /// `n·σ` for the unit vector along `[x, y, z]`.
    Pauli { pauli: [Number; 3] },
    Matrix {
        re: Vec<Vec<Number>>,
        im: Option<Vec<Vec<Number>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumDocument {
    pub format_version: u32,
    pub state: StateDocument,
    pub local_dims: Vec<usize>,
    /// `observables[p][j]` is measurement `j` of party `p`.
    pub observables: Vec<Vec<ObservableDocument>>,
}

fn complex_matrix(
    re: &[Vec<Number>],
    im: Option<&Vec<Vec<Number>>>,
) -> Result<ComplexMatrix, CliError> {
    let re = matrix_of(re)?;
    let im = match im {
        Some(im) => matrix_of(im)?,
        None => re.iter().map(|r| vec![0.0; r.len()]).collect(),
    };
    Ok(ComplexMatrix::from_parts(&re, &im)?)
}

impl QuantumDocument {
    pub fn to_setup(&self) -> Result<QuantumSetup, CliError> {
        check_version(self.format_version)?;
        let state = match &self.state {
            StateDocument::Singlet => singlet(),
            StateDocument::Werner { visibility } => werner_state(visibility.value()?)?,
            StateDocument::Matrix { re, im } => complex_matrix(re, im.as_ref())?,
            StateDocument::Pure { re, im } => {
                let re = numbers(re)?;
                let im = match im {
                    Some(im) => numbers(im)?,
                    None => vec![0.0; re.len()],
                };
                if re.len() != im.len() || re.is_empty() {
                    return Err(CliError::Input(
                        "pure state needs equally long, nonempty re and im".into(),
                    ));
                }
                let norm = re.iter().chain(&im).map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(CliError::Input("pure state has zero norm".into()));
                }
                let amps: Vec<num_complex::Complex<f64>> = re
                    .iter()
                    .zip(&im)
                    .map(|(a, b)| num_complex::Complex::new(a / norm, b / norm))
                    .collect();
                ComplexMatrix::projector(&amps)
            }
        };
        let observables = self
            .observables
            .iter()
            .map(|party| {
                party
                    .iter()
                    .map(|o| match o {
                        ObservableDocument::Pauli { pauli } => {
                            let [x, y, z] =
                                [pauli[0].value()?, pauli[1].value()?, pauli[2].value()?];
                            let n = (x * x + y * y + z * z).sqrt();
                            if n == 0.0 {
                                return Err(CliError::Input("zero Pauli direction".into()));
                            }
                            Ok(ComplexMatrix::pauli_combination(x / n, y / n, z / n))
                        }
                        ObservableDocument::Matrix { re, im } => complex_matrix(re, im.as_ref()),
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<ComplexMatrix>>, CliError>>()?;
        Ok(QuantumSetup {
            state,
            local_dims: self.local_dims.clone(),
            observables,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub setting: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityDocument {
    /// One coefficient per non-normalization setting, in row order.
    pub coefficients: Vec<CoefficientEntry>,
    pub bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<String>,
}

impl InequalityDocument {
    pub fn new(
        scenario: &Scenario,
        inequality: &BellInequality,
        margin: Option<&Rational>,
    ) -> Self {
        Self {
            coefficients: enumerate_settings(scenario)
                .iter()
                .skip(1)
                .zip(inequality.coefficients())
                .map(|(s, c)| CoefficientEntry {
                    setting: scenario.setting_label(s),
                    coefficient: format_rational(c),
                })
                .collect(),
            bound: format_rational(inequality.bound()),
            margin: margin.map(format_rational),
        }
    }

    pub fn coefficient_values(&self) -> Result<Vec<Rational>, CliError> {
        self.coefficients
            .iter()
            .map(|c| rational(&c.coefficient))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilityEntry {
    pub strategy: String,
    pub probability: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lp_iterations: usize,
    pub elapsed_ms: f64,
    pub rounding_sensitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictTag {
    Local,
    Nonlocal,
    NonlocalUnbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format_version: u32,
    pub verdict: VerdictTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<ProbabilityEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequality: Option<InequalityDocument>,
    pub diagnostics: Diagnostics,
}

impl ResultDocument {
    pub fn new(matrix: &ModelMatrix, verdict: &Verdict, diagnostics: Diagnostics) -> Self {
        let scenario = matrix.scenario();
        let (tag, distribution, inequality) = match verdict {
            Verdict::Local { distribution } => (
                VerdictTag::Local,
                Some(
                    matrix
                        .strategies()
                        .iter()
                        .zip(distribution.probabilities())
                        .map(|(l, p)| ProbabilityEntry {
                            strategy: scenario.strategy_label(l),
                            probability: format_rational(p),
                        })
                        .collect(),
                ),
                None,
            ),
            Verdict::Nonlocal { inequality, margin } => (
                VerdictTag::Nonlocal,
                None,
                Some(InequalityDocument::new(scenario, inequality, Some(margin))),
            ),
            Verdict::NonlocalUnbounded { inequality, margin } => (
                VerdictTag::NonlocalUnbounded,
                None,
                Some(InequalityDocument::new(scenario, inequality, Some(margin))),
            ),
        };
        Self {
            format_version: FORMAT_VERSION,
            verdict: tag,
            distribution,
            inequality,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberDocument {
    #[serde(flatten)]
    pub inequality: InequalityDocument,
    pub facet: bool,
    pub tight_strategies: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckDocument {
    pub samples: usize,
    pub seed: u64,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationDocument {
    pub format_version: u32,
    pub scenario: ScenarioDocument,
    pub raw_vertices: usize,
    pub inequalities: Vec<MemberDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckDocument>,
}

impl EnumerationDocument {
    pub fn new(set: &CompleteBellSet) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            scenario: ScenarioDocument::from_scenario(&set.scenario),
            raw_vertices: set.raw_vertices,
            inequalities: set
                .members
                .iter()
                .map(|m| MemberDocument {
                    inequality: InequalityDocument::new(&set.scenario, &m.inequality, None),
                    facet: m.facet,
                    tight_strategies: m.tight_strategies,
                })
                .collect(),
            cross_check: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub format_version: u32,
    pub scenario: ScenarioDocument,
    /// Setting labels, one per row.
    pub rows: Vec<String>,
    /// Strategy labels, one per column.
    pub columns: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl MatrixDocument {
    pub fn new(matrix: &ModelMatrix) -> Self {
        let scenario = matrix.scenario();
        Self {
            format_version: FORMAT_VERSION,
            scenario: ScenarioDocument::from_scenario(scenario),
            rows: matrix
                .settings()
                .iter()
                .map(|s| scenario.setting_label(s))
                .collect(),
            columns: matrix
                .strategies()
                .iter()
                .map(|l| scenario.strategy_label(l))
                .collect(),
            entries: matrix.entries().iter().map(|r| format_all(r)).collect(),
        }
    }

    /// Parses the dump back, checking it against a fresh build of its scenario.
    pub fn to_matrix(&self) -> Result<ModelMatrix, CliError> {
        check_version(self.format_version)?;
        let scenario = self.scenario.to_scenario()?;
        let matrix = ModelMatrix::build(&scenario)?;
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|v| rational(v)).collect())
            .collect::<Result<Vec<Vec<Rational>>, CliError>>()?;
        let fresh = Self::new(&matrix);
        if self.rows != fresh.rows || self.columns != fresh.columns {
            return Err(CliError::Input(
                "row or column labels do not match the scenario".into(),
            ));
        }
        if entries != matrix.entries() {
            return Err(CliError::Input("entries do not match the scenario".into()));
        }
        Ok(matrix)
    }
}
