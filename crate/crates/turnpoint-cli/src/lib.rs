//! Batch front end for the `turnpoint` library: grid evaluation, bound
//! sweeps and the acceptance suite, emitted as versioned CSV or JSON tables.

pub mod cli;
pub mod commands;
pub mod grid;
pub mod selftest;
pub mod table;

use serde_json::{json, Value};
use thiserror::Error;

pub use cli::{Cli, Command, Format};
pub use table::{Report, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid --{flag}: {reason}")]
    Argument { flag: &'static str, reason: String },
    #[error("problem file {path}: {reason}")]
    ProblemFile { path: String, reason: String },
    #[error("{context}: {message}")]
    Evaluation { context: String, message: String },
}

impl CliError {
    pub fn argument(flag: &'static str, reason: impl Into<String>) -> Self {
        Self::Argument { flag, reason: reason.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Argument { .. } => "argument",
            Self::ProblemFile { .. } => "problem_file",
            Self::Evaluation { .. } => "evaluation",
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> Value {
        json!({ "schema": SCHEMA_VERSION, "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

/// Attaches a context string to a library error.
pub(crate) trait Context<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T, E: std::fmt::Display> Context<T> for Result<T, E> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| CliError::Evaluation { context: context(), message: e.to_string() })
    }
}

/// A rendered report and whether the command's own checks passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub success: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.report.to_csv(),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.report.to_json()).unwrap_or_default();
                text.push('\n');
                text
            }
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let report = |report| Ok(Outcome { report, success: true });
    match command {
        Command::Scorer { z, n, function, output } => report(commands::scorer(&z.0, &n.0, *function, output.tol)?),
        Command::Solve { problem, u, z, pair, n, m, regime, output } => {
            let spec =
                commands::SolveSpec { u: &u.0, z: &z.0, pair: *pair, n: *n, m: *m, regime: *regime, tol: output.tol };
            report(commands::solve(&commands::resolve_problem(problem)?, &spec)?)
        }
        Command::Gamma { problem, m, u, .. } => {
            report(commands::gamma(&commands::resolve_problem(problem)?, &m.0, &u.0)?)
        }
        Command::Sweep { problem, z, n, u, pair, output } => {
            report(commands::sweep(&commands::resolve_problem(problem)?, &z.0, &n.0, &u.0, *pair, output.tol)?)
        }
        Command::Integral { u, x, alpha, order, m, output } => {
            report(commands::integral(&u.0, &x.0, *alpha, *order, *m, output.tol)?)
        }
        Command::Selftest { .. } => Ok(commands::selftest()),
    }
}
