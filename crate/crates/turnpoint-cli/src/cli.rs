//! Command-line schema.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use turnpoint::scorer::SectorPair;
use turnpoint::Cplx;

use crate::grid::{parse_complex, parse_list, parse_orders, parse_real};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid(pub Vec<Cplx>);

#[derive(Clone, Debug, PartialEq)]
pub struct RealGrid(pub Vec<f64>);

#[derive(Clone, Debug, PartialEq)]
pub struct Orders(pub Vec<usize>);

fn complex_grid(text: &str) -> Result<ComplexGrid, String> {
    parse_list(text, parse_complex).map(ComplexGrid)
}

fn positive_grid(text: &str) -> Result<RealGrid, String> {
    let values = parse_list(text, parse_real)?;
    match values.iter().find(|&&u| u <= 0.0) {
        Some(bad) => Err(format!("u = {bad} must be positive")),
        None => Ok(RealGrid(values)),
    }
}

fn orders(text: &str) -> Result<Orders, String> {
    parse_orders(text).map(Orders)
}

fn pair(text: &str) -> Result<SectorPair, String> {
    text.parse()
}

fn tolerance(text: &str) -> Result<f64, String> {
    let tol = parse_real(text)?;
    if tol > 0.0 && tol < 1.0 {
        Ok(tol)
    } else {
        Err(format!("tolerance {tol} must lie in (0, 1)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemName {
    AiryPoly,
    AiryExp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScorerFunction {
    Hi,
    HiPrime,
    Gi,
    GiPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeChoice {
    /// Near expansion inside the unit disc, away expansion outside.
    Auto,
    Away,
    Near,
    /// Closed form; polynomial forcing only.
    Exact,
}

#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Oracle and quadrature tolerance.
    #[arg(long, value_parser = tolerance)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum, conflicts_with = "problem_file")]
    pub problem: Option<ProblemName>,
    /// Ascending polynomial coefficients for `airy-poly`.
    #[arg(long, value_parser = complex_grid)]
    pub coeffs: Option<ComplexGrid>,
    /// Exponent for `airy-exp`.
    #[arg(long, value_parser = parse_complex)]
    pub alpha: Option<Cplx>,
    /// JSON problem description; its `u` is replaced by the `--u` grid.
    #[arg(long)]
    pub problem_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "turnpoint", version, about = "Inhomogeneous turning-point solutions with certified bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Asymptotic Scorer-function values, certified bounds and quadrature reference.
    Scorer {
        #[arg(long, value_parser = complex_grid)]
        z: ComplexGrid,
        #[arg(long, value_parser = orders, default_value = "0..5")]
        n: Orders,
        #[arg(long, value_enum, default_value = "hi")]
        function: ScorerFunction,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solution values by regime, compared against the oracle.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = positive_grid)]
        u: RealGrid,
        #[arg(long, value_parser = complex_grid)]
        z: ComplexGrid,
        /// Sector pair `j,k`; chosen per point when omitted.
        #[arg(long, value_parser = pair)]
        pair: Option<SectorPair>,
        /// Away-expansion order.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Near-expansion order.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value = "auto")]
        regime: RegimeChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact versus contour-quotient connection coefficient.
    Gamma {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = orders, default_value = "0,1")]
        m: Orders,
        #[arg(long, value_parser = positive_grid)]
        u: RealGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bound-validity matrix and decay slopes of the away expansion.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = complex_grid)]
        z: ComplexGrid,
        #[arg(long, value_parser = orders, default_value = "1..3")]
        n: Orders,
        #[arg(long, value_parser = positive_grid, default_value = "10,20,40")]
        u: RealGrid,
        #[arg(long, value_parser = pair)]
        pair: Option<SectorPair>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Right, left and central expansions of the exponential Airy integral.
    Integral {
        #[arg(long, value_parser = positive_grid)]
        u: RealGrid,
        /// Lower limits of integration.
        #[arg(long, value_parser = complex_grid)]
        x: ComplexGrid,
        #[arg(long, value_parser = parse_complex, default_value = "1")]
        alpha: Cplx,
        /// Correction terms in the right and left expansions.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Regular-part terms in the central expansion.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full acceptance suite; exits 0 only if every criterion passes.
    Selftest {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

impl Command {
    pub fn format(&self) -> Format {
        match self {
            Self::Scorer { output, .. }
            | Self::Solve { output, .. }
            | Self::Gamma { output, .. }
            | Self::Sweep { output, .. }
            | Self::Integral { output, .. } => output.format,
            Self::Selftest { format } => *format,
        }
    }
}
