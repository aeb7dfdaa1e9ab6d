//! The `bell-lp` command-line tool.
//!
//! Exit codes: 0 success or local, 3 nonlocal, 2 bad input, 4 size limit,
//! 1 internal error.

pub mod documents;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::bell_enum::{enumerate_complete_set_with, is_complete_against, EnumError, EnumOptions};
use crate::lhv::{analyze_with_matrix, LhvError};
use crate::lp::SolverOptions;
use crate::polytope::{PolytopeError, DEFAULT_RAY_CAP};
use crate::quantum::{
    correlations_from_quantum, rationalize, rounding_sensitive, QuantumError, DEFAULT_TOLERANCE,
};
use crate::scenario::{
    validate_correlations, ModelMatrix, Scenario, ScenarioError, DEFAULT_COLUMN_CAP,
};
use crate::Rational;

use documents::{
    CorrelationsDocument, CrossCheckDocument, Diagnostics, EnumerationDocument, MatrixDocument,
    QuantumDocument, ResultDocument, ScenarioDocument,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONLOCAL: i32 = 3;
pub const EXIT_SIZE_LIMIT: i32 = 4;

/// Column cap used by `enumerate` when `--column-cap` is not given.
pub const ENUMERATE_COLUMN_CAP: usize = 4096;

/// Environment variable bounding worker threads.
pub const THREADS_ENV: &str = "BELL_LP_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    SizeLimit(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::SizeLimit(_) => EXIT_SIZE_LIMIT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::SizeLimit { .. } => CliError::SizeLimit(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<LhvError> for CliError {
    fn from(e: LhvError) -> Self {
        match e {
            LhvError::Scenario(s) => s.into(),
            LhvError::DimensionMismatch(_) => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Scenario(s) => s.into(),
            EnumError::Lhv(l) => l.into(),
            EnumError::Polytope(PolytopeError::SizeLimit { .. }) => {
                CliError::SizeLimit(e.to_string())
            }
            EnumError::ScenarioMismatch { .. } => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bell-lp",
    version,
    about = "Exact LP test of local realism and Bell-inequality enumeration"
)]
pub struct Cli {
    /// Denominator cap when rationalizing floating-point correlators.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_denominator: u64,
    /// Cap on intermediate rays during vertex enumeration.
    #[arg(long, global = true)]
    pub vertex_cap: Option<usize>,
    /// Cap on deterministic strategies (model-matrix columns).
    #[arg(long, global = true)]
    pub column_cap: Option<usize>,
    /// Seed for randomized cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suppress the summary line on standard error.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether correlations admit a local hidden-variable model.
    Check {
        /// Scenario document, or `-` for standard input.
        scenario: PathBuf,
        /// Correlations document, or `-` for standard input.
        correlations: PathBuf,
    },
    /// Enumerate the complete set of Bell inequalities of a scenario.
    Enumerate {
        scenario: PathBuf,
        /// Compare the set against the LP verdict on this many random points.
        #[arg(long, default_value_t = 0)]
        cross_check: usize,
    },
    /// Compute rationalized correlators of a quantum setup.
    Quantum {
        /// Quantum setup document.
        setup: PathBuf,
        scenario: PathBuf,
    },
    /// Dump the model matrix.
    Matrix { scenario: PathBuf },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &PathBuf) -> Result<String, CliError> {
        if path.as_os_str() == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("standard input: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
    }

    fn parse<D: DeserializeOwned>(&mut self, path: &PathBuf) -> Result<D, CliError> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn emit<D: Serialize>(&mut self, doc: &D) -> Result<(), CliError> {
        let text =
            serde_json::to_string_pretty(doc).map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(self.stdout, "{text}").map_err(|e| CliError::Internal(e.to_string()))
    }

    fn note(&mut self, line: &str) {
        if !self.quiet {
            let _ = writeln!(self.stderr, "{line}");
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run<I, A>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
        quiet: cli.quiet,
    };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map(Some).map_err(|_| {
            CliError::Input(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        }),
        _ => Ok(None),
    }
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Result<i32, CliError> {
    match &cli.command {
        Command::Check {
            scenario,
            correlations,
        } => check(cli, io, scenario, correlations),
        Command::Enumerate {
            scenario,
            cross_check,
        } => enumerate(cli, io, scenario, *cross_check),
        Command::Quantum { setup, scenario } => quantum(cli, io, setup, scenario),
        Command::Matrix { scenario } => matrix(cli, io, scenario),
    }
}

fn load_scenario(io: &mut Io<'_>, path: &PathBuf) -> Result<Scenario, CliError> {
    io.parse::<ScenarioDocument>(path)?.to_scenario()
}

fn check(
    cli: &Cli,
    io: &mut Io<'_>,
    scenario: &PathBuf,
    correlations: &PathBuf,
) -> Result<i32, CliError> {
    let scenario = load_scenario(io, scenario)?;
    let correlations = io
        .parse::<CorrelationsDocument>(correlations)?
        .to_correlations(&scenario)?;
    let start = Instant::now();
    let matrix =
        ModelMatrix::build_with_cap(&scenario, cli.column_cap.unwrap_or(DEFAULT_COLUMN_CAP))?;
    let analysis = analyze_with_matrix(&matrix, &correlations, &SolverOptions::default())?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let sensitive = analysis
        .verdict
        .margin()
        .is_some_and(|m| rounding_sensitive(m, matrix.rows(), cli.max_denominator.max(1)));
    let doc = ResultDocument::new(
        &matrix,
        &analysis.verdict,
        Diagnostics {
            lp_iterations: analysis.stats.iterations(),
            elapsed_ms,
            rounding_sensitive: sensitive,
        },
    );
    io.emit(&doc)?;
    match analysis.verdict.margin() {
        None => {
            io.note("local: a reproducing distribution exists");
            Ok(EXIT_OK)
        }
        Some(m) => {
            let warn = if sensitive {
                " (rounding-sensitive)"
            } else {
                ""
            };
            io.note(&format!("nonlocal: inequality violated by {m}{warn}"));
            Ok(EXIT_NONLOCAL)
        }
    }
}

fn enumerate(
    cli: &Cli,
    io: &mut Io<'_>,
    scenario: &PathBuf,
    samples: usize,
) -> Result<i32, CliError> {
    let scenario = load_scenario(io, scenario)?;
    let options = EnumOptions {
        column_cap: cli.column_cap.unwrap_or(ENUMERATE_COLUMN_CAP),
        ray_cap: cli.vertex_cap.unwrap_or(DEFAULT_RAY_CAP),
        threads: threads_from_env()?,
    };
    let set = enumerate_complete_set_with::<Rational>(&scenario, &options)?;
    let mut doc = EnumerationDocument::new(&set);
    if samples > 0 {
        let matrix = ModelMatrix::build_with_cap(&scenario, options.column_cap)?;
        let mut rng = StdRng::seed_from_u64(cli.seed);
        let mut disagreements = 0;
        for k in 0..samples {
            let c = validate_correlations(&scenario, random_point(&matrix, &mut rng, k % 2 == 1))?;
            let by_set = is_complete_against(&set, &c)?;
            let by_lp = analyze_with_matrix(&matrix, &c, &SolverOptions::default())?
                .verdict
                .is_local();
            if by_set != by_lp {
                disagreements += 1;
            }
        }
        doc.cross_check = Some(CrossCheckDocument {
            samples,
            seed: cli.seed,
            disagreements,
        });
        if disagreements > 0 {
            io.emit(&doc)?;
            return Err(CliError::Internal(format!(
                "{disagreements} of {samples} cross-check points disagree with the LP verdict"
            )));
        }
    }
    io.emit(&doc)?;
    io.note(&format!(
        "{} inequalities ({} facets) from {} vertices",
        set.members.len(),
        set.facets().count(),
        set.raw_vertices
    ));
    Ok(EXIT_OK)
}

/// A random rational mixture of strategies, optionally pulled toward a
/// random point of the correlator box (which may leave the local polytope).
fn random_point(matrix: &ModelMatrix, rng: &mut StdRng, perturb: bool) -> Vec<Rational> {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let weights: Vec<i64> = (0..matrix.cols()).map(|_| rng.gen_range(0..4)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let p: Vec<Rational> = if weights.iter().all(|&w| w == 0) {
        let mut p = vec![r(0, 1); matrix.cols()];
        p[0] = r(1, 1);
        p
    } else {
        weights.iter().map(|&w| r(w, total)).collect()
    };
    let mut c = matrix.mul_vec(&p);
    if perturb {
        let t = r(rng.gen_range(1..=8), 8);
        let scenario = matrix.scenario();
        for (i, s) in matrix.settings().iter().enumerate().skip(1) {
            let bound = scenario.magnitude_bound(s);
            let target = bound * r(rng.gen_range(-8..=8), 8);
            c[i] = &c[i] * (r(1, 1) - &t) + target * &t;
        }
    }
    c
}

fn quantum(
    cli: &Cli,
    io: &mut Io<'_>,
    setup: &PathBuf,
    scenario: &PathBuf,
) -> Result<i32, CliError> {
    let setup = io.parse::<QuantumDocument>(setup)?.to_setup()?;
    let scenario = load_scenario(io, scenario)?;
    let values = correlations_from_quantum(&setup, &scenario, DEFAULT_TOLERANCE)?;
    let c = rationalize(&scenario, &values, cli.max_denominator)?;
    io.emit(&CorrelationsDocument::from_correlations(&scenario, &c))?;
    Ok(EXIT_OK)
}

fn matrix(cli: &Cli, io: &mut Io<'_>, scenario: &PathBuf) -> Result<i32, CliError> {
    let scenario = load_scenario(io, scenario)?;
    let matrix =
        ModelMatrix::build_with_cap(&scenario, cli.column_cap.unwrap_or(DEFAULT_COLUMN_CAP))?;
    io.emit(&MatrixDocument::new(&matrix))?;
    Ok(EXIT_OK)
}
