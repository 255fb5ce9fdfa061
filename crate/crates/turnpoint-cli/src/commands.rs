//! Command implementations. Grid cells run in parallel; rows keep grid order.

use std::sync::Arc;

use rayon::prelude::*;

use turnpoint::airy_forcing::{
    airy_exp_integral, exact_gamma, near_expansion, poly_exact, IntegralRegime, NEAR_RADIUS,
};
use turnpoint::liouville::{AiryForcing, CoefficientTable, TurningPointProblem};
use turnpoint::oracle::{integral_oracle, remainder_oracle, w_oracle_problem, ORACLE_TOL};
use turnpoint::particular::{airy_away, recommended_pair, w_slowly_varying, w_slowly_varying_derivative, BoundKind};
use turnpoint::scorer::{
    gi, gi_asymptotic, gi_prime, gi_prime_asymptotic, hi_asymptotic, hi_prime_asymptotic, hi_prime_quadrature,
    hi_quadrature, rounding_floor, BoundedValue, SectorPair, DEFAULT_TOL,
};
use turnpoint::turning_region::{gamma_contour, w_near, w_near_derivative, GFunction};
use turnpoint::Cplx;

use crate::cli::{ProblemArgs, ProblemName, RegimeChoice, ScorerFunction};
use crate::selftest::{loglog_slope, run_all, SLOPE_TOL};
use crate::table::{complex_cells, Cell, Report, Table};
use crate::{CliError, Context, Outcome};

fn real(u: f64) -> Cplx {
    Cplx::new(u, 0.0)
}

/// The problem named on the command line.
#[derive(Clone, Debug)]
pub enum ProblemChoice {
    Airy(AiryForcing),
    File(Box<TurningPointProblem>),
}

impl ProblemChoice {
    pub fn at(&self, u: f64) -> TurningPointProblem {
        match self {
            Self::Airy(forcing) => TurningPointProblem::airy(forcing.clone(), real(u)),
            Self::File(problem) => problem.as_ref().clone().with_u(real(u)),
        }
    }

    pub fn forcing(&self) -> Option<AiryForcing> {
        match self {
            Self::Airy(forcing) => Some(forcing.clone()),
            Self::File(problem) => problem.airy.clone(),
        }
    }

    fn require_airy(&self, command: &str) -> Result<AiryForcing, CliError> {
        self.forcing().ok_or_else(|| {
            CliError::argument("problem-file", format!("{command} needs an Airy problem with closed-form forcing"))
        })
    }
}

pub fn resolve_problem(args: &ProblemArgs) -> Result<ProblemChoice, CliError> {
    match (&args.problem, &args.problem_file) {
        (Some(ProblemName::AiryPoly), None) => {
            let coeffs = args.coeffs.as_ref().ok_or_else(|| CliError::argument("coeffs", "required by airy-poly"))?;
            if args.alpha.is_some() {
                return Err(CliError::argument("alpha", "not used by airy-poly"));
            }
            Ok(ProblemChoice::Airy(AiryForcing::Polynomial(coeffs.0.clone())))
        }
        (Some(ProblemName::AiryExp), None) => {
            let alpha = args.alpha.ok_or_else(|| CliError::argument("alpha", "required by airy-exp"))?;
            if args.coeffs.is_some() {
                return Err(CliError::argument("coeffs", "not used by airy-exp"));
            }
            Ok(ProblemChoice::Airy(AiryForcing::Exponential(alpha)))
        }
        (None, Some(path)) => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::ProblemFile { path: shown.clone(), reason: e.to_string() })?;
            let problem = TurningPointProblem::from_json(&text)
                .map_err(|e| CliError::ProblemFile { path: shown, reason: e.to_string() })?;
            Ok(ProblemChoice::File(Box::new(problem)))
        }
        (None, None) => Err(CliError::argument("problem", "give --problem or --problem-file")),
        (Some(_), Some(_)) => Err(CliError::argument("problem", "--problem and --problem-file are exclusive")),
    }
}

fn cell_error(e: &CliError) -> Cell {
    Cell::Text(e.to_string())
}

fn slope_of(u: &[f64], values: &[Option<f64>]) -> Option<f64> {
    let y: Option<Vec<f64>> = values.iter().map(|v| v.filter(|x| x.is_finite() && *x > 0.0)).collect();
    (u.len() >= 2).then_some(())?;
    y.map(|y| loglog_slope(u, &y))
}

fn slope_ok(slope: Option<f64>, target: Option<f64>) -> Option<bool> {
    Some((slope? - target?).abs() <= SLOPE_TOL * target?.abs())
}

pub fn scorer(
    points: &[Cplx],
    orders: &[usize],
    function: ScorerFunction,
    tol: Option<f64>,
) -> Result<Report, CliError> {
    let tol = tol.unwrap_or(DEFAULT_TOL);
    let on_axis = matches!(function, ScorerFunction::Gi | ScorerFunction::GiPrime);
    if on_axis {
        if let Some(z) = points.iter().find(|z| z.im != 0.0 || z.re <= 0.0) {
            return Err(CliError::argument("z", format!("Gi needs real positive points, got {z}")));
        }
    }
    let rows: Vec<Result<Vec<Vec<Cell>>, CliError>> = points
        .par_iter()
        .map(|&z| {
            let oracle = match function {
                ScorerFunction::Hi => hi_quadrature(z, tol),
                ScorerFunction::HiPrime => hi_prime_quadrature(z, tol),
                ScorerFunction::Gi => gi(z, tol),
                ScorerFunction::GiPrime => gi_prime(z, tol),
            }
            .context(|| format!("quadrature at z = {z}"))?;
            orders
                .iter()
                .map(|&n| {
                    let approx: BoundedValue = match function {
                        ScorerFunction::Hi => hi_asymptotic(z, n),
                        ScorerFunction::HiPrime => hi_prime_asymptotic(z, n),
                        ScorerFunction::Gi => gi_asymptotic(z.re, n),
                        ScorerFunction::GiPrime => gi_prime_asymptotic(z.re, n),
                    }
                    .context(|| format!("expansion at z = {z}, n = {n}"))?;
                    let error = (approx.value - oracle).norm();
                    let [zr, zi] = complex_cells(Some(z));
                    let [vr, vi] = complex_cells(Some(approx.value));
                    let [or, oi] = complex_cells(Some(oracle));
                    Ok(vec![
                        zr,
                        zi,
                        n.into(),
                        vr,
                        vi,
                        approx.bound.into(),
                        or,
                        oi,
                        error.into(),
                        (error <= approx.bound + rounding_floor(oracle)).into(),
                    ])
                })
                .collect()
        })
        .collect();
    let mut table = Table::new(
        "values",
        &["z_re", "z_im", "n", "value_re", "value_im", "bound", "oracle_re", "oracle_im", "abs_error", "pass"],
    );
    for block in rows {
        block?.into_iter().for_each(|row| table.push(row));
    }
    Ok(Report { command: "scorer", tables: vec![table] })
}

/// Grid and orders for `solve`.
#[derive(Clone, Debug)]
pub struct SolveSpec<'a> {
    pub u: &'a [f64],
    pub z: &'a [Cplx],
    pub pair: Option<SectorPair>,
    pub n: usize,
    pub m: usize,
    pub regime: RegimeChoice,
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Regime {
    Away,
    Near,
    Exact,
}

impl Regime {
    fn name(self) -> &'static str {
        match self {
            Self::Away => "away",
            Self::Near => "near",
            Self::Exact => "exact",
        }
    }
}

struct Solved {
    value: Cplx,
    derivative: Cplx,
    bound: Option<f64>,
}

fn solve_cell(
    choice: &ProblemChoice,
    u: f64,
    z: Cplx,
    pair: SectorPair,
    regime: Regime,
    spec: &SolveSpec,
) -> Result<Solved, CliError> {
    let problem = choice.at(u);
    let at = || format!("u = {u}, z = {z}");
    match (regime, choice.forcing()) {
        (Regime::Exact, Some(AiryForcing::Polynomial(coeffs))) => {
            let jet = poly_exact(u, z, pair, &coeffs).context(at)?;
            Ok(Solved { value: jet.value, derivative: jet.derivative, bound: None })
        }
        (Regime::Exact, _) => Err(CliError::argument("regime", "exact solutions need airy-poly")),
        (Regime::Away, forcing) => {
            let derivative = w_slowly_varying_derivative(&problem, z, pair, spec.n).context(at)?;
            if forcing.is_some() {
                let (value, report) = airy_away(&problem, z, pair, spec.n).context(at)?;
                return Ok(Solved { value, derivative, bound: report.bound() });
            }
            let value = w_slowly_varying(&problem, z, pair, spec.n).context(at)?;
            Ok(Solved { value, derivative, bound: None })
        }
        (Regime::Near, Some(forcing)) => {
            let (value, derivative) = near_expansion(&forcing, u, z, pair, spec.m).context(at)?;
            Ok(Solved { value, derivative, bound: None })
        }
        (Regime::Near, None) => {
            let table = CoefficientTable::new(&problem, spec.m).context(at)?;
            let gamma = gamma_contour(&table, spec.m).context(at)?;
            let gfun = GFunction::new(Arc::new(table), spec.m, gamma).context(at)?;
            let value = w_near(&gfun, z, pair).context(at)?;
            let derivative = w_near_derivative(&gfun, z, pair).context(at)?;
            Ok(Solved { value, derivative, bound: None })
        }
    }
}

pub fn solve(choice: &ProblemChoice, spec: &SolveSpec) -> Result<Report, CliError> {
    if spec.regime == RegimeChoice::Exact && !matches!(choice.forcing(), Some(AiryForcing::Polynomial(_))) {
        return Err(CliError::argument("regime", "exact solutions need airy-poly"));
    }
    let tol = spec.tol.unwrap_or(ORACLE_TOL);
    let probe = choice.at(spec.u[0]);
    let near_radius = if choice.forcing().is_some() { NEAR_RADIUS } else { probe.default_radius() };
    let regime_at = |z: Cplx| match spec.regime {
        RegimeChoice::Auto if (z - probe.z0).norm() <= near_radius => Regime::Near,
        RegimeChoice::Auto | RegimeChoice::Away => Regime::Away,
        RegimeChoice::Near => Regime::Near,
        RegimeChoice::Exact => Regime::Exact,
    };
    let cells: Vec<(usize, f64)> = (0..spec.z.len()).flat_map(|k| spec.u.iter().map(move |&u| (k, u))).collect();
    type SolvedCell = (Result<Solved, CliError>, Option<Cplx>, Option<Cplx>);
    let results: Vec<SolvedCell> = cells
        .par_iter()
        .map(|&(k, u)| {
            let z = spec.z[k];
            let pair = spec.pair.unwrap_or_else(|| recommended_pair(z));
            let solved = solve_cell(choice, u, z, pair, regime_at(z), spec);
            let problem = choice.at(u);
            let oracle = problem.airy.as_ref().and_then(|_| w_oracle_problem(&problem, z, pair, tol).ok());
            (solved, oracle.as_ref().map(|o| o.value), oracle.map(|o| o.derivative))
        })
        .collect();

    let mut rows = Table::new(
        "solutions",
        &[
            "u",
            "z_re",
            "z_im",
            "pair",
            "regime",
            "order",
            "w_re",
            "w_im",
            "dw_re",
            "dw_im",
            "bound",
            "oracle_re",
            "oracle_im",
            "oracle_dw_re",
            "oracle_dw_im",
            "discrepancy",
            "note",
        ],
    );
    let mut discrepancies = vec![Vec::new(); spec.z.len()];
    for (&(k, u), (solved, oracle, oracle_dw)) in cells.iter().zip(results) {
        let z = spec.z[k];
        let pair = spec.pair.unwrap_or_else(|| recommended_pair(z));
        let regime = regime_at(z);
        let order = match regime {
            Regime::Away => Some(spec.n),
            Regime::Near => Some(spec.m),
            Regime::Exact => None,
        };
        let (value, derivative, bound, note) = match &solved {
            Ok(s) => (Some(s.value), Some(s.derivative), s.bound, Cell::Null),
            Err(e) => (None, None, None, cell_error(e)),
        };
        let discrepancy = value.zip(oracle).map(|(v, o)| (v - o).norm());
        discrepancies[k].push(discrepancy);
        let mut row = vec![u.into()];
        row.extend(complex_cells(Some(z)));
        row.extend([pair.to_string().into(), regime.name().into(), order.into()]);
        row.extend(complex_cells(value));
        row.extend(complex_cells(derivative));
        row.push(bound.into());
        row.extend(complex_cells(oracle));
        row.extend(complex_cells(oracle_dw));
        row.extend([discrepancy.into(), note]);
        rows.push(row);
    }

    let mut slopes = Table::new("decay", &["z_re", "z_im", "regime", "slope", "target", "slope_ok"]);
    for (k, values) in discrepancies.iter().enumerate() {
        let regime = regime_at(spec.z[k]);
        let target = match regime {
            Regime::Away => Some(-(2.0 * spec.n as f64 + 2.0)),
            Regime::Near => Some(-(2.0 * spec.m as f64 + 2.0)),
            Regime::Exact => None,
        };
        let slope = slope_of(spec.u, values);
        let mut row: Vec<Cell> = complex_cells(Some(spec.z[k])).into();
        row.extend([regime.name().into(), slope.into(), target.into(), slope_ok(slope, target).into()]);
        slopes.push(row);
    }
    Ok(Report { command: "solve", tables: vec![rows, slopes] })
}

pub fn gamma(choice: &ProblemChoice, orders: &[usize], u_grid: &[f64]) -> Result<Report, CliError> {
    let cells: Vec<(usize, f64)> = orders.iter().flat_map(|&m| u_grid.iter().map(move |&u| (m, u))).collect();
    let results: Vec<Result<(Option<Cplx>, Cplx), CliError>> = cells
        .par_iter()
        .map(|&(m, u)| {
            let problem = choice.at(u);
            let at = || format!("u = {u}, m = {m}");
            let table = CoefficientTable::new(&problem, m).context(at)?;
            let contour = gamma_contour(&table, m).context(at)?;
            Ok((choice.forcing().map(|f| exact_gamma(&f, u)), contour.gamma))
        })
        .collect();
    let mut rows =
        Table::new("gamma", &["u", "m", "exact_re", "exact_im", "contour_re", "contour_im", "rel_error", "note"]);
    let mut errors = vec![Vec::new(); orders.len()];
    for (idx, (&(m, u), result)) in cells.iter().zip(results).enumerate() {
        let (exact, contour, note) = match result {
            Ok((exact, contour)) => (exact, Some(contour), Cell::Null),
            Err(e) => (None, None, cell_error(&e)),
        };
        let rel = exact.zip(contour).map(|(e, c)| (c - e).norm() / e.norm());
        errors[idx / u_grid.len()].push(rel);
        let mut row = vec![u.into(), m.into()];
        row.extend(complex_cells(exact));
        row.extend(complex_cells(contour));
        row.extend([rel.into(), note]);
        rows.push(row);
    }
    let mut slopes = Table::new("decay", &["m", "slope", "target", "slope_ok"]);
    for (&m, values) in orders.iter().zip(&errors) {
        let slope = slope_of(u_grid, values);
        let target = Some(-(2.0 * m as f64 + 2.0));
        slopes.push(vec![m.into(), slope.into(), target.into(), slope_ok(slope, target).into()]);
    }
    Ok(Report { command: "gamma", tables: vec![rows, slopes] })
}

fn bound_kind(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Plain => "plain",
        BoundKind::Derivative => "derivative",
        BoundKind::Exponential { .. } => "exponential",
        BoundKind::AiryExponential { .. } => "airy_exponential",
        BoundKind::Algebraic { .. } => "algebraic",
    }
}

pub fn sweep(
    choice: &ProblemChoice,
    points: &[Cplx],
    orders: &[usize],
    u_grid: &[f64],
    pair: Option<SectorPair>,
    tol: Option<f64>,
) -> Result<Report, CliError> {
    choice.require_airy("sweep")?;
    let tol = tol.unwrap_or(ORACLE_TOL);
    let cells: Vec<(Cplx, usize, f64)> =
        points.iter().flat_map(|&z| orders.iter().flat_map(move |&n| u_grid.iter().map(move |&u| (z, n, u)))).collect();
    type Measured = Result<(f64, Option<f64>, &'static str), CliError>;
    let results: Vec<Measured> = cells
        .par_iter()
        .map(|&(z, n, u)| {
            let problem = choice.at(u);
            let pair = pair.unwrap_or_else(|| recommended_pair(z));
            let at = || format!("z = {z}, n = {n}, u = {u}");
            let (_, report) = airy_away(&problem, z, pair, n).context(at)?;
            let eps = remainder_oracle(&problem, z, pair, n, tol).context(at)?;
            Ok((eps.value.norm(), report.bound(), bound_kind(report.kind)))
        })
        .collect();
    let mut matrix =
        Table::new("validity", &["z_re", "z_im", "pair", "n", "u", "bound_kind", "error", "bound", "pass", "note"]);
    let blocks = points.len() * orders.len();
    let mut errors = vec![Vec::new(); blocks];
    let mut bounds = vec![Vec::new(); blocks];
    for (idx, (&(z, n, u), result)) in cells.iter().zip(results).enumerate() {
        let block = idx / u_grid.len();
        let pair = pair.unwrap_or_else(|| recommended_pair(z));
        let mut row: Vec<Cell> = complex_cells(Some(z)).into();
        row.extend([pair.to_string().into(), n.into(), u.into()]);
        match result {
            Ok((error, bound, kind)) => {
                errors[block].push(Some(error));
                bounds[block].push(bound);
                let pass = bound.map(|b| error <= b);
                row.extend([kind.into(), error.into(), bound.into(), pass.into(), Cell::Null]);
            }
            Err(e) => {
                errors[block].push(None);
                bounds[block].push(None);
                row.extend([Cell::Null, Cell::Null, Cell::Null, Cell::Bool(false), cell_error(&e)]);
            }
        }
        matrix.push(row);
    }
    let mut slopes = Table::new(
        "decay",
        &["z_re", "z_im", "n", "error_slope", "bound_slope", "target", "error_slope_ok", "bound_slope_ok"],
    );
    for (block, (e, b)) in errors.iter().zip(&bounds).enumerate() {
        let z = points[block / orders.len()];
        let n = orders[block % orders.len()];
        let target = Some(-(2.0 * n as f64 + 2.0));
        let (es, bs) = (slope_of(u_grid, e), slope_of(u_grid, b));
        let mut row: Vec<Cell> = complex_cells(Some(z)).into();
        row.extend([
            n.into(),
            es.into(),
            bs.into(),
            target.into(),
            slope_ok(es, target).into(),
            slope_ok(bs, target).into(),
        ]);
        slopes.push(row);
    }
    Ok(Report { command: "sweep", tables: vec![matrix, slopes] })
}

fn regime_name(regime: IntegralRegime) -> String {
    match regime {
        IntegralRegime::Right => "right".into(),
        IntegralRegime::Left => "left".into(),
        IntegralRegime::Central(pair) => format!("central{pair}"),
    }
}

pub fn integral(
    u_grid: &[f64],
    limits: &[Cplx],
    alpha: Cplx,
    order: usize,
    m: usize,
    tol: Option<f64>,
) -> Result<Report, CliError> {
    let tol = tol.unwrap_or(1e-12);
    let cells: Vec<(f64, Cplx)> = u_grid.iter().flat_map(|&u| limits.iter().map(move |&x| (u, x))).collect();
    type Row = (IntegralRegime, usize, Cplx);
    type Evaluated = Result<(Option<Cplx>, Vec<Row>), CliError>;
    let results: Vec<Evaluated> = cells
        .par_iter()
        .map(|&(u, x)| {
            let oracle = integral_oracle(u, x, alpha, tol).ok();
            let regimes = [IntegralRegime::Right, IntegralRegime::Left, IntegralRegime::Central(recommended_pair(x))];
            let mut rows = Vec::new();
            for regime in regimes {
                let k = if matches!(regime, IntegralRegime::Central(_)) { m } else { order };
                match airy_exp_integral(u, x, alpha, regime, k) {
                    Ok(value) => rows.push((regime, k, value)),
                    Err(turnpoint::airy_forcing::ForcingError::Regime { .. }) => {}
                    Err(e) => return Err(e).context(|| format!("u = {u}, x = {x}")),
                }
            }
            Ok((oracle, rows))
        })
        .collect();
    let mut table = Table::new(
        "integral",
        &[
            "u",
            "x_re",
            "x_im",
            "regime",
            "order",
            "value_re",
            "value_im",
            "oracle_re",
            "oracle_im",
            "rel_error",
            "recommended",
        ],
    );
    for (&(u, x), result) in cells.iter().zip(results) {
        let (oracle, rows) = result?;
        let recommended = turnpoint::airy_forcing::recommended_regime(x);
        for (regime, k, value) in rows {
            let mut row = vec![u.into()];
            row.extend(complex_cells(Some(x)));
            row.extend([regime_name(regime).into(), k.into()]);
            row.extend(complex_cells(Some(value)));
            row.extend(complex_cells(oracle));
            row.push(oracle.map(|o| (value - o).norm() / o.norm()).into());
            row.push((regime == recommended).into());
            table.push(row);
        }
    }
    Ok(Report { command: "integral", tables: vec![table] })
}

pub fn selftest() -> Outcome {
    let reports = run_all();
    let mut criteria = Table::new("criteria", &["id", "title", "passed", "checks", "failed"]);
    let mut checks = Table::new("checks", &["id", "label", "measured", "rule", "limit", "passed"]);
    for report in &reports {
        criteria.push(vec![
            usize::from(report.id).into(),
            report.title.into(),
            report.passed().into(),
            report.checks.len().into(),
            report.failures().count().into(),
        ]);
        for check in &report.checks {
            let (rule, limit) = match check.rule {
                crate::selftest::Rule::AtMost(limit) => ("at_most", Some(limit)),
                crate::selftest::Rule::Slope { target, .. } => ("slope", Some(target)),
                crate::selftest::Rule::DecayAtLeast { target, .. } => ("decay_at_least", Some(target)),
                crate::selftest::Rule::Holds => ("holds", None),
            };
            checks.push(vec![
                usize::from(report.id).into(),
                check.label.clone().into(),
                check.measured.into(),
                rule.into(),
                limit.into(),
                check.passed.into(),
            ]);
        }
    }
    Outcome {
        success: reports.iter().all(|r| r.passed()),
        report: Report { command: "selftest", tables: vec![criteria, checks] },
    }
}
