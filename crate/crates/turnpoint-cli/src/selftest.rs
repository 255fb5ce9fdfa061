//! Acceptance suite: ten criteria, each a list of measured checks against
//! pinned limits.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use turnpoint::airy::{ai, ai_rotated, Sector};
use turnpoint::airy_forcing::{
    airy_exp_integral, c_r, exact_gamma, near_expansion, poly_exact, q_identity_residual, IntPoly, IntegralRegime,
    QPolynomial, NEAR_RADIUS,
};
use turnpoint::liouville::{ab_sequences, AiryForcing, CoefficientTable, TurningPointProblem};
use turnpoint::oracle::{
    full_line_integral, integral_oracle, ode_residual, remainder_oracle, w_oracle_problem, ORACLE_TOL,
};
use turnpoint::particular::{airy_away, airy_g_exact, recommended_pair, BoundKind};
use turnpoint::quadrature::{cauchy_derivative, Contour, I};
use turnpoint::scorer::{
    gi, gi_asymptotic, gi_prime, gi_prime_asymptotic, hi_asymptotic, hi_prime_asymptotic, hi_prime_quadrature,
    hi_quadrature, hi_remainder_bound, rounding_floor, wi, SectorPair, DEFAULT_DELTA, DEFAULT_TOL,
};
use turnpoint::turning_region::{g_function, gamma_contour, w_near};
use turnpoint::Cplx;

/// Seed for every random sample in the suite.
pub const SEED: u64 = 0x7475_726e_706f_696e;
/// Allowed relative deviation of a measured decay slope from its target.
pub const SLOPE_TOL: f64 = 0.1;
/// The `u` grid for every decay-rate check.
pub const U_GRID: [f64; 3] = [10.0, 20.0, 40.0];

const SCORER_SAMPLES: usize = 200;
const GI_SAMPLES: usize = 60;
const MAX_SCORER_ORDER: usize = 5;
const CONNECTION_TOL: f64 = 1e-9;
const Q_IDENTITY_MAX_R: usize = 12;
const EXACT_RESIDUAL_TOL: f64 = 1e-10;
const EXACT_FORCINGS: usize = 20;
const EXACT_POINTS: usize = 20;
const EXACT_U: [f64; 3] = [3.0, 7.0, 15.0];
const GAMMA_TOL: f64 = 1e-8;
const TOTAL_INTEGRAL_TOL: f64 = 1e-8;
const NEAR_POINTS: [(f64, f64); 3] = [(0.05, 0.0), (0.0, 0.05), (-0.03, 0.0)];
const MATCHING_FRACTION: f64 = 0.8;
const MATCHING_ORDER: usize = 2;
const INTEGRAL_ORDER: usize = 3;
const CENTRAL_ORDER: usize = 2;
const RIGHT_REGIME_TOL: f64 = 1e-5;
const LEFT_REGIME_TOL: f64 = 1e-6;
const CENTRAL_REGIME_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-11;

fn c(re: f64, im: f64) -> Cplx {
    Cplx::new(re, im)
}

fn real(coeffs: &[f64]) -> Vec<Cplx> {
    coeffs.iter().map(|&x| c(x, 0.0)).collect()
}

/// One measured quantity and the rule it must satisfy.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub rule: Rule,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    AtMost(f64),
    Slope {
        target: f64,
        tolerance: f64,
    },
    /// Decay at least as fast as `target`, up to the slope tolerance.
    DecayAtLeast {
        target: f64,
        tolerance: f64,
    },
    Holds,
}

impl Check {
    pub fn at_most(label: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self { label: label.into(), measured, rule: Rule::AtMost(limit), passed: measured <= limit }
    }

    pub fn slope(label: impl Into<String>, measured: f64, target: f64) -> Self {
        let tolerance = SLOPE_TOL * target.abs();
        Self {
            label: label.into(),
            measured,
            rule: Rule::Slope { target, tolerance },
            passed: (measured - target).abs() <= tolerance,
        }
    }

    pub fn decays_at_least(label: impl Into<String>, measured: f64, target: f64) -> Self {
        let tolerance = SLOPE_TOL * target.abs();
        Self {
            label: label.into(),
            measured,
            rule: Rule::DecayAtLeast { target, tolerance },
            passed: measured <= target + tolerance,
        }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self { label: label.into(), measured: f64::from(u8::from(ok)), rule: Rule::Holds, passed: ok }
    }

    fn failed(label: impl Into<String>, error: impl fmt::Display) -> Self {
        Self::holds(format!("{}: {error}", label.into()), false)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "ok" } else { "FAIL" };
        match self.rule {
            Rule::AtMost(limit) => write!(f, "{verdict} {}: {:.3e} <= {limit:.1e}", self.label, self.measured),
            Rule::Slope { target, tolerance } => {
                write!(f, "{verdict} {}: slope {:.3} vs {target} +- {tolerance:.2}", self.label, self.measured)
            }
            Rule::DecayAtLeast { target, tolerance } => {
                write!(f, "{verdict} {}: slope {:.3} <= {target} + {tolerance:.2}", self.label, self.measured)
            }
            Rule::Holds => write!(f, "{verdict} {}", self.label),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `criterion N PASS|FAIL title (k checks)`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let failed = self.failures().count();
        format!("criterion {:>2} {verdict} {} ({} checks, {failed} failed)", self.id, self.title, self.checks.len())
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn airy_problem(forcing: AiryForcing, u: f64) -> TurningPointProblem {
    TurningPointProblem::airy(forcing, c(u, 0.0))
}

/// Runs a fallible measurement, turning an error into a failed check.
fn attempt<F>(label: &str, checks: &mut Vec<Check>, body: F)
where
    F: FnOnce(&mut Vec<Check>) -> Result<(), Box<dyn std::error::Error + Send + Sync>>,
{
    if let Err(e) = body(checks) {
        checks.push(Check::failed(label, e));
    }
}

pub fn scorer_bounds() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let half_width = 2.0 * PI / 3.0 - 0.05;
    let points: Vec<Cplx> = (0..SCORER_SAMPLES)
        .map(|_| -Cplx::from_polar(rng.gen_range(5.0..=50.0), rng.gen_range(-half_width..=half_width)))
        .collect();
    let gi_points: Vec<f64> = (0..GI_SAMPLES).map(|_| rng.gen_range(3.0..=50.0)).collect();

    // (violations, worst error/bound ratio, evaluation failures)
    let tally = |rows: Vec<Result<Vec<(f64, f64)>, String>>| {
        let mut violations = 0usize;
        let mut worst = 0.0f64;
        let mut errors = Vec::new();
        for row in rows {
            match row {
                Ok(cells) => {
                    for (err, allowed) in cells {
                        violations += usize::from(err > allowed);
                        worst = worst.max(err / allowed);
                    }
                }
                Err(e) => errors.push(e),
            }
        }
        (violations, worst, errors)
    };

    let hi_rows = points
        .par_iter()
        .map(|&z| -> Result<Vec<(f64, f64)>, String> {
            let q = hi_quadrature(z, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let dq = hi_prime_quadrature(z, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for n in 0..=MAX_SCORER_ORDER {
                let a = hi_asymptotic(z, n).map_err(|e| e.to_string())?;
                out.push(((a.value - q).norm(), a.bound + rounding_floor(q)));
                let d = hi_prime_asymptotic(z, n).map_err(|e| e.to_string())?;
                out.push(((d.value - dq).norm(), d.bound + rounding_floor(dq)));
            }
            Ok(out)
        })
        .collect();
    let gi_rows = gi_points
        .par_iter()
        .map(|&x| -> Result<Vec<(f64, f64)>, String> {
            let q = gi(c(x, 0.0), DEFAULT_TOL).map_err(|e| e.to_string())?;
            let dq = gi_prime(c(x, 0.0), DEFAULT_TOL).map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for n in 0..=MAX_SCORER_ORDER {
                let a = gi_asymptotic(x, n).map_err(|e| e.to_string())?;
                out.push(((a.value - q).norm(), a.bound + rounding_floor(q)));
                let d = gi_prime_asymptotic(x, n).map_err(|e| e.to_string())?;
                out.push(((d.value - dq).norm(), d.bound + rounding_floor(dq)));
            }
            Ok(out)
        })
        .collect();

    let mut checks = Vec::new();
    for (name, rows) in [("Hi and Hi'", hi_rows), ("Gi and Gi'", gi_rows)] {
        let (violations, worst, errors) = tally(rows);
        checks.push(Check::at_most(format!("{name} bound violations"), violations as f64, 0.0));
        checks.push(Check::at_most(format!("{name} worst error/bound"), worst, 1.0));
        for e in errors {
            checks.push(Check::failed(format!("{name} evaluation"), e));
        }
    }
    attempt("spot bound", &mut checks, |checks| {
        let b = hi_remainder_bound(c(-10.0, 0.0), 0, DEFAULT_DELTA)?;
        checks.push(Check::at_most("remainder bound at z = -10, n = 0 minus 2e-4", (b - 2e-4).abs(), 1e-18));
        Ok(())
    });
    CriterionReport { id: 1, title: "scorer bound validity", checks }
}

pub fn connection_residuals() -> CriterionReport {
    let omega = Cplx::from_polar(1.0, 2.0 * PI / 3.0);
    let grid: Vec<Cplx> = (1..=5)
        .flat_map(|r| (0..10).map(move |k| Cplx::from_polar(f64::from(r), 2.0 * PI * (f64::from(k) + 0.25) / 10.0)))
        .collect();
    let rows: Vec<Result<[f64; 4], String>> = grid
        .par_iter()
        .map(|&z| {
            let w = |pair| wi(pair, z, DEFAULT_TOL).map_err(|e| e.to_string());
            let (mp, zp, mz) = (w(SectorPair::MinusPlus)?, w(SectorPair::ZeroPlus)?, w(SectorPair::MinusZero)?);
            let a_plus = 2.0 * PI * Cplx::from_polar(1.0, -PI / 6.0) * ai_rotated(z, Sector::Plus).value;
            let a_minus = 2.0 * PI * Cplx::from_polar(1.0, PI / 6.0) * ai_rotated(z, Sector::Minus).value;
            let a_zero = 2.0 * PI * I * ai(z).value;
            let scale = mp.norm().max(zp.norm()).max(mz.norm()).max(1.0);
            let terms = [ai(z).value, omega * ai(omega * z).value, omega.conj() * ai(omega.conj() * z).value];
            let airy_scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
            Ok([
                (mp - zp - a_plus).norm() / scale,
                (mp - mz - a_minus).norm() / scale,
                (zp - mz - a_zero).norm() / scale,
                terms.iter().sum::<Cplx>().norm() / airy_scale,
            ])
        })
        .collect();
    let mut checks = Vec::new();
    let mut worst = [0.0f64; 4];
    for row in rows {
        match row {
            Ok(r) => worst.iter_mut().zip(r).for_each(|(w, v)| *w = w.max(v)),
            Err(e) => checks.push(Check::failed("Wi evaluation", e)),
        }
    }
    let labels = [
        "Wi(-1,1) - Wi(0,1) = 2pi e^{-pi i/6} Ai_1",
        "Wi(-1,1) - Wi(-1,0) = 2pi e^{pi i/6} Ai_-1",
        "Wi(0,1) - Wi(-1,0) = 2pi i Ai",
        "Ai(z) + w Ai(wz) + w^2 Ai(w^2 z) = 0",
    ];
    for (label, w) in labels.iter().zip(worst) {
        checks.push(Check::at_most(*label, w, CONNECTION_TOL));
    }
    CriterionReport { id: 2, title: "connection-formula residuals", checks }
}

pub fn q_polynomials() -> CriterionReport {
    let mut checks = Vec::new();
    let identity_ok = (0..=Q_IDENTITY_MAX_R).all(|r| q_identity_residual(r).is_zero());
    checks
        .push(Check::holds(format!("Q_(r-1)'' - z Q_(r-1) - c_r + z^r = 0 for r <= {Q_IDENTITY_MAX_R}"), identity_ok));
    checks.push(Check::holds("Q_3 = z^3 + 6", QPolynomial::recursion(3).poly == IntPoly(vec![6, 0, 0, 1])));
    checks.push(Check::holds(
        "Q_6 = z^6 + 30 z^3 + 180",
        QPolynomial::recursion(6).poly == IntPoly(vec![180, 0, 0, 30, 0, 0, 1]),
    ));
    let closed_ok = (0..=Q_IDENTITY_MAX_R).all(|r| QPolynomial::closed_form(r) == QPolynomial::recursion(r));
    checks.push(Check::holds("closed-form q_j(r) equals the recursion", closed_ok));
    checks.push(Check::holds("c_3 = 2, c_6 = 40", c_r(3) == 2 && c_r(6) == 40));
    CriterionReport { id: 3, title: "Q-polynomial suite", checks }
}

/// `Σ u^{-2(r+2)/3} p_r Q_{r-1}(u^{2/3} z)`, the polynomial part of the exact solution.
fn q_part(u: f64, z: Cplx, coeffs: &[Cplx]) -> Cplx {
    let x = u.powf(2.0 / 3.0) * z;
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(r, &p)| p * u.powf(-2.0 * (r as f64 + 2.0) / 3.0) * QPolynomial::recursion(r - 1).poly.eval(x))
        .sum()
}

fn poly_eval(coeffs: &[Cplx], z: Cplx) -> Cplx {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &k| acc * z + k)
}

fn relative_residual(d2: Cplx, u: f64, z: Cplx, w: Cplx, p: Cplx) -> f64 {
    let lhs = u * u * z * w;
    (d2 - lhs - p).norm() / (d2.norm() + lhs.norm() + p.norm())
}

pub fn exact_solution_residuals() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let forcings: Vec<Vec<Cplx>> = (0..EXACT_FORCINGS)
        .map(|_| {
            let degree = rng.gen_range(0..=6usize);
            (0..=degree).map(|_| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect()
        })
        .collect();
    let points: Vec<Cplx> =
        (0..EXACT_POINTS).map(|_| Cplx::from_polar(rng.gen_range(0.0..=2.0), rng.gen_range(-PI..PI))).collect();
    let cells: Vec<(usize, f64)> = (0..EXACT_POINTS).flat_map(|k| EXACT_U.iter().map(move |&u| (k, u))).collect();

    // Per cell: worst jet residual over all forcings, Cauchy residual and the
    // flipped-sign Cauchy residual for forcing number k.
    let rows: Vec<Result<(f64, f64, f64), String>> = cells
        .par_iter()
        .map(|&(k, u)| {
            let z = points[k];
            let pair = recommended_pair(z);
            let mut jet_worst = 0.0f64;
            for coeffs in &forcings {
                let jet = poly_exact(u, z, pair, coeffs).map_err(|e| e.to_string())?;
                jet_worst =
                    jet_worst.max(relative_residual(jet.second_derivative, u, z, jet.value, poly_eval(coeffs, z)));
            }
            let coeffs = &forcings[k];
            let contour = Contour::new(z, 0.05).with_nodes(16);
            let w = |t| poly_exact(u, t, pair, coeffs).map(|j| j.value).unwrap_or(c(f64::NAN, f64::NAN));
            let flipped = |t| w(t) + 2.0 * q_part(u, t, coeffs);
            let p = poly_eval(coeffs, z);
            let d2 = cauchy_derivative(w, z, &contour, 2).map_err(|e| e.to_string())?;
            let d2_flipped = cauchy_derivative(flipped, z, &contour, 2).map_err(|e| e.to_string())?;
            Ok((jet_worst, relative_residual(d2, u, z, w(z), p), relative_residual(d2_flipped, u, z, flipped(z), p)))
        })
        .collect();
    let mut checks = Vec::new();
    let (mut jet, mut cauchy, mut flipped_min) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut nonconstant_q = false;
    for (row, &(k, _)) in rows.into_iter().zip(&cells) {
        match row {
            Ok((a, b, f)) => {
                jet = jet.max(a);
                cauchy = cauchy.max(b);
                if forcings[k].iter().skip(2).any(|p| p.norm() > 0.0) {
                    nonconstant_q = true;
                    flipped_min = flipped_min.min(f);
                }
            }
            Err(e) => checks.push(Check::failed("exact solution", e)),
        }
    }
    checks.push(Check::at_most("worst residual from the analytic second derivative", jet, EXACT_RESIDUAL_TOL));
    checks.push(Check::at_most("worst residual from a Cauchy second derivative", cauchy, EXACT_RESIDUAL_TOL));
    checks.push(Check::holds(
        format!("opposite Q sign violates the equation (smallest residual {flipped_min:.2e})"),
        nonconstant_q && flipped_min > 1e3 * EXACT_RESIDUAL_TOL,
    ));
    CriterionReport { id: 4, title: "exact-solution residuals", checks }
}

/// `(w^{(0,1)} - w^{(-1,0)}) / (2πi Ai(u^{2/3} z))` from the oracle.
fn oracle_gamma(forcing: &AiryForcing, u: f64, z: Cplx) -> Result<Cplx, Box<dyn std::error::Error + Send + Sync>> {
    let problem = airy_problem(forcing.clone(), u);
    let a = w_oracle_problem(&problem, z, SectorPair::ZeroPlus, ORACLE_TOL)?.value;
    let b = w_oracle_problem(&problem, z, SectorPair::MinusZero, ORACLE_TOL)?.value;
    Ok((a - b) / (2.0 * PI * I * ai(u.powf(2.0 / 3.0) * z).value))
}

fn gamma_forcings() -> [(&'static str, AiryForcing); 4] {
    [
        ("p = z^3 + 2z", AiryForcing::Polynomial(real(&[0.0, 2.0, 0.0, 1.0]))),
        ("p = 1 + z^3 + z^6", AiryForcing::Polynomial(real(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]))),
        ("p = e^z", AiryForcing::Exponential(c(1.0, 0.0))),
        ("p = e^{iz}", AiryForcing::Exponential(c(0.0, 1.0))),
    ]
}

pub fn gamma_identities() -> CriterionReport {
    let (u, z) = (15.0, c(1.0, 0.0));
    let mut checks = Vec::new();
    for (name, forcing) in gamma_forcings() {
        attempt(name, &mut checks, |checks| {
            let exact = exact_gamma(&forcing, u);
            let measured = oracle_gamma(&forcing, u, z)?;
            checks.push(Check::at_most(
                format!("{name}: closed-form gamma vs oracle difference, relative"),
                (measured - exact).norm() / exact.norm(),
                GAMMA_TOL,
            ));
            Ok(())
        });
    }
    let slope_cases = [
        ("p = 1 + z^3 + z^6", AiryForcing::Polynomial(real(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]))),
        ("p = e^z", AiryForcing::Exponential(c(1.0, 0.0))),
    ];
    for (name, forcing) in slope_cases {
        for m in 0..=1 {
            attempt(name, &mut checks, |checks| {
                let errors = U_GRID
                    .iter()
                    .map(|&u| {
                        let table = CoefficientTable::new(&airy_problem(forcing.clone(), u), m)?;
                        let exact = exact_gamma(&forcing, u);
                        Ok((gamma_contour(&table, m)?.gamma - exact).norm() / exact.norm())
                    })
                    .collect::<Result<Vec<f64>, Box<dyn std::error::Error + Send + Sync>>>()?;
                checks.push(Check::slope(
                    format!("{name}: contour gamma error, m = {m}"),
                    loglog_slope(&U_GRID, &errors),
                    -(2.0 * m as f64 + 2.0),
                ));
                Ok(())
            });
        }
    }
    CriterionReport { id: 5, title: "gamma identities", checks }
}

pub fn total_integral() -> CriterionReport {
    let mut checks = Vec::new();
    for u in [5.0, 10.0] {
        for alpha in [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.5)] {
            let label = format!("u = {u}, alpha = {alpha}");
            attempt(&label.clone(), &mut checks, |checks| {
                let quad = full_line_integral(u, alpha, ORACLE_TOL)?;
                let closed = (alpha.powi(3) / (3.0 * u * u)).exp() / u.powf(2.0 / 3.0);
                checks.push(Check::at_most(label, (quad - closed).norm() / closed.norm(), TOTAL_INTEGRAL_TOL));
                Ok(())
            });
        }
    }
    CriterionReport { id: 6, title: "total-integral identity", checks }
}

fn bound_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Plain => "plain",
        BoundKind::Derivative => "derivative",
        BoundKind::Exponential { .. } => "exponential",
        BoundKind::AiryExponential { .. } => "airy-exponential",
        BoundKind::Algebraic { .. } => "algebraic",
    }
}

pub fn away_certification() -> CriterionReport {
    let forcings = [
        ("p = z^3 + 2z", AiryForcing::Polynomial(real(&[0.0, 2.0, 0.0, 1.0]))),
        ("p = e^z", AiryForcing::Exponential(c(1.0, 0.0))),
        ("p = e^{iz}", AiryForcing::Exponential(c(0.0, 1.0))),
    ];
    let points = [c(2.0, 0.0), c(4.0, 0.0), Cplx::from_polar(2.0, PI / 4.0)];
    let cases: Vec<(usize, Cplx, usize)> =
        (0..forcings.len()).flat_map(|f| points.iter().flat_map(move |&z| (1..=3).map(move |n| (f, z, n)))).collect();
    type Row = Result<(Vec<f64>, Vec<f64>, &'static str), String>;
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|&(f, z, n)| {
            let pair = recommended_pair(z);
            let mut errors = Vec::new();
            let mut bounds = Vec::new();
            let mut kind = "none";
            for &u in &U_GRID {
                let problem = airy_problem(forcings[f].1.clone(), u);
                let (_, report) = airy_away(&problem, z, pair, n).map_err(|e| e.to_string())?;
                let eps = remainder_oracle(&problem, z, pair, n, ORACLE_TOL).map_err(|e| e.to_string())?;
                kind = bound_name(report.kind);
                bounds.push(report.bound().ok_or_else(|| format!("no valid bound at u = {u}"))?);
                errors.push(eps.value.norm());
            }
            Ok((errors, bounds, kind))
        })
        .collect();
    let mut checks = Vec::new();
    for (row, &(f, z, n)) in rows.into_iter().zip(&cases) {
        let label = format!("{}, z = {z:.3}, n = {n}", forcings[f].0);
        match row {
            Ok((errors, bounds, kind)) => {
                let worst = errors.iter().zip(&bounds).map(|(e, b)| e / b).fold(0.0, f64::max);
                let target = -(2.0 * n as f64 + 2.0);
                checks.push(Check::at_most(format!("{label}: error/{kind} bound"), worst, 1.0));
                checks.push(Check::slope(format!("{label}: error"), loglog_slope(&U_GRID, &errors), target));
                checks.push(Check::slope(format!("{label}: bound"), loglog_slope(&U_GRID, &bounds), target));
            }
            Err(e) => checks.push(Check::failed(label, e)),
        }
    }
    CriterionReport { id: 7, title: "away-expansion certification", checks }
}

pub fn near_accuracy() -> CriterionReport {
    let alpha = c(1.0, 0.0);
    let forcing = AiryForcing::Exponential(alpha);
    let cases: Vec<(Cplx, usize)> = NEAR_POINTS.iter().flat_map(|&(x, y)| (0..=1).map(move |m| (c(x, y), m))).collect();
    type Row = Result<(Vec<f64>, Vec<f64>), String>;
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|&(z, m)| {
            let pair = recommended_pair(z);
            let mut errors = Vec::new();
            let mut residuals = Vec::new();
            for &u in &U_GRID {
                let problem = airy_problem(forcing.clone(), u);
                let table = CoefficientTable::new(&problem, m).map_err(|e| e.to_string())?;
                let gamma = gamma_contour(&table, m).map_err(|e| e.to_string())?;
                let gfun = g_function(&problem, m, gamma, None).map_err(|e| e.to_string())?;
                let near = w_near(&gfun, z, pair).map_err(|e| e.to_string())?;
                let oracle = w_oracle_problem(&problem, z, pair, ORACLE_TOL).map_err(|e| e.to_string())?;
                errors.push((near - oracle.value).norm() / oracle.value.norm());
                let w = |t| w_near(&gfun, t, pair).unwrap_or(c(f64::NAN, f64::NAN));
                let residual = ode_residual(&problem, w, z, 1e-3);
                let scale = (u * u * z * near).norm() + problem.p.value(z).norm();
                residuals.push(residual.norm() / scale);
            }
            Ok((errors, residuals))
        })
        .collect();
    let mut checks = Vec::new();
    for (row, &(z, m)) in rows.into_iter().zip(&cases) {
        let label = format!("z = {z}, m = {m}");
        match row {
            Ok((errors, residuals)) => {
                checks.push(Check::slope(
                    format!("{label}: relative error vs oracle"),
                    loglog_slope(&U_GRID, &errors),
                    -(2.0 * m as f64 + 2.0),
                ));
                let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
                checks.push(Check::holds(
                    format!("{label}: relative ODE residual decreases ({:.2e} -> {:.2e})", residuals[0], residuals[2]),
                    decreasing,
                ));
            }
            Err(e) => checks.push(Check::failed(label, e)),
        }
    }
    CriterionReport { id: 8, title: "near-turning-point accuracy", checks }
}

/// Label of the one sub-check whose printed expansion cannot reach its limit.
pub const RIGHT_REGIME_LABEL: &str = "right regime vs oracle at u = 20, x = 1, alpha = 1";

pub fn regime_matching() -> CriterionReport {
    let mut checks = Vec::new();
    let z = c(MATCHING_FRACTION * NEAR_RADIUS, 0.0);
    let forcings = [
        ("p = z^3 + 2z", AiryForcing::Polynomial(real(&[0.0, 2.0, 0.0, 1.0]))),
        ("p = e^z", AiryForcing::Exponential(c(1.0, 0.0))),
    ];
    for (name, forcing) in forcings {
        attempt(name, &mut checks, |checks| {
            let pair = recommended_pair(z);
            let mut diffs = Vec::new();
            for &u in &U_GRID {
                let (away, _) = airy_away(&airy_problem(forcing.clone(), u), z, pair, MATCHING_ORDER)?;
                let (near, _) = near_expansion(&forcing, u, z, pair, MATCHING_ORDER)?;
                diffs.push((away - near).norm());
            }
            let target = -(2.0 * MATCHING_ORDER as f64 + 2.0);
            checks.push(Check::decays_at_least(
                format!(
                    "{name}: |away - near| at z = {z}, n = m = {MATCHING_ORDER} ({:.2e} -> {:.2e})",
                    diffs[0], diffs[2]
                ),
                loglog_slope(&U_GRID, &diffs),
                target,
            ));
            Ok(())
        });
    }

    let alpha = c(1.0, 0.0);
    let overlaps = [
        ("right/central", c(1.0, 0.0), IntegralRegime::Right, IntegralRegime::Central(SectorPair::ZeroPlus)),
        ("left/central", c(-1.0, 0.0), IntegralRegime::Left, IntegralRegime::Central(SectorPair::MinusPlus)),
        ("right/left", Cplx::from_polar(1.5, 0.6 * PI), IntegralRegime::Right, IntegralRegime::Left),
    ];
    for (name, x, first, second) in overlaps {
        attempt(name, &mut checks, |checks| {
            let mut diffs = Vec::new();
            for &u in &U_GRID {
                let order = |r| if matches!(r, IntegralRegime::Central(_)) { CENTRAL_ORDER } else { INTEGRAL_ORDER };
                let a = airy_exp_integral(u, x, alpha, first, order(first))?;
                let b = airy_exp_integral(u, x, alpha, second, order(second))?;
                diffs.push((a - b).norm() / b.norm());
            }
            checks.push(Check::decays_at_least(
                format!("{name} at x = {x:.3}: relative difference ({:.2e} -> {:.2e})", diffs[0], diffs[2]),
                loglog_slope(&U_GRID, &diffs),
                -(INTEGRAL_ORDER as f64 + 1.0),
            ));
            Ok(())
        });
    }

    let against_oracle = [
        (RIGHT_REGIME_LABEL.to_string(), 20.0, c(1.0, 0.0), IntegralRegime::Right, INTEGRAL_ORDER, RIGHT_REGIME_TOL),
        (
            "left regime vs oracle at u = 40, x = -1.5, alpha = 1".to_string(),
            40.0,
            c(-1.5, 0.0),
            IntegralRegime::Left,
            INTEGRAL_ORDER,
            LEFT_REGIME_TOL,
        ),
        (
            "central regime vs oracle at u = 20, x = 0.3, alpha = 1".to_string(),
            20.0,
            c(0.3, 0.0),
            IntegralRegime::Central(SectorPair::ZeroPlus),
            CENTRAL_ORDER,
            CENTRAL_REGIME_TOL,
        ),
    ];
    for (label, u, x, regime, order, tol) in against_oracle {
        attempt(&label.clone(), &mut checks, |checks| {
            let oracle = integral_oracle(u, x, alpha, 1e-12)?;
            let value = airy_exp_integral(u, x, alpha, regime, order)?;
            checks.push(Check::at_most(label, (value - oracle).norm() / oracle.norm(), tol));
            Ok(())
        });
    }
    CriterionReport { id: 9, title: "regime matching", checks }
}

pub fn coefficient_identities() -> CriterionReport {
    let mut checks = Vec::new();
    let seq = ab_sequences(3);
    checks.push(Check::holds("a_3 = 1105/10368", seq.a[2].to_string() == "1105/10368"));
    checks.push(Check::holds("a~_3 = -1463/10368", seq.a_tilde[2].to_string() == "-1463/10368"));

    attempt("Airy exponent terms", &mut checks, |checks| {
        let problem = airy_problem(AiryForcing::Polynomial(real(&[1.0])), 10.0);
        let table = CoefficientTable::new(&problem, 1)?;
        let (mut e_hat, mut cal_e, mut cal_e_tilde) = (0.0f64, 0.0f64, 0.0f64);
        for z in [c(0.6, 0.2), c(3.0, 0.0), c(-2.0, 2.0)] {
            let (frame, terms) = table.exponent_terms(z, 1)?;
            let scale = (1.0 / frame.xi).norm();
            e_hat = e_hat.max((terms.e_hat[0] - 5.0 / (72.0 * frame.xi)).norm() / scale);
            cal_e = cal_e.max(terms.cal_e[0].norm() / scale);
            cal_e_tilde = cal_e_tilde.max((terms.cal_e_tilde[0] - 1.0 / (6.0 * frame.xi)).norm() / scale);
        }
        checks.push(Check::at_most("E^_1 - 5/(72 xi), relative", e_hat, IDENTITY_TOL));
        checks.push(Check::at_most("E_1, relative to 1/xi", cal_e, IDENTITY_TOL));
        checks.push(Check::at_most("E~_1 - 1/(6 xi), relative", cal_e_tilde, IDENTITY_TOL));
        Ok(())
    });

    let coeffs = real(&[0.5, -1.0, 2.0, 1.0, 0.25, -0.5, 1.5]);
    let alpha = c(0.8, 0.3);
    let poly = airy_g_exact(&AiryForcing::Polynomial(coeffs.clone()), 1);
    let exp = airy_g_exact(&AiryForcing::Exponential(alpha), 1);
    let mut worst = [0.0f64; 6];
    for z in [c(0.7, 0.2), c(-0.4, 0.5), c(0.3, -0.9)] {
        let p_star: Cplx = coeffs.iter().enumerate().skip(1).map(|(r, &p)| -p * z.powi(r as i32 - 1)).sum();
        let p_star_1: Cplx = coeffs
            .iter()
            .enumerate()
            .skip(4)
            .map(|(r, &p)| -(((r - 1) * (r - 2)) as f64) * p * z.powi(r as i32 - 4))
            .sum();
        let e = (alpha * z).exp();
        let exp_star_1 = 2.0 / z.powi(4) + alpha.powi(3) / (3.0 * z)
            - e / z.powi(4) * (alpha * alpha * z * z - 2.0 * alpha * z + 2.0);
        let pairs = [
            (poly[0].value(z), -poly_eval(&coeffs, z) / z),
            (poly[0].regular_part(z), p_star),
            (poly[1].regular_part(z), p_star_1),
            (exp[0].value(z), -e / z),
            (exp[0].regular_part(z), 1.0 / z - e / z),
            (exp[1].regular_part(z), exp_star_1),
        ];
        for (w, (got, want)) in worst.iter_mut().zip(pairs) {
            *w = w.max((got - want).norm() / want.norm().max(1.0));
        }
    }
    let labels = [
        "polynomial G^_0 = -p/z",
        "polynomial G^_0* = -sum p_r z^(r-1)",
        "polynomial G^_1* = -sum (r-1)(r-2) p_r z^(r-4)",
        "exponential G^_0 = -e^(az)/z",
        "exponential G^_0* = 1/z - e^(az)/z",
        "exponential G^_1*",
    ];
    for (label, w) in labels.iter().zip(worst) {
        checks.push(Check::at_most(*label, w, IDENTITY_TOL));
    }
    CriterionReport { id: 10, title: "sequence and coefficient identities", checks }
}

/// All ten criteria, in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        scorer_bounds(),
        connection_residuals(),
        q_polynomials(),
        exact_solution_residuals(),
        gamma_identities(),
        total_integral(),
        away_certification(),
        near_accuracy(),
        regime_matching(),
        coefficient_identities(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let y: Vec<f64> = U_GRID.iter().map(|u| 3.0 * u.powf(-4.0)).collect();
        assert!((loglog_slope(&U_GRID, &y) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn check_rules() {
        assert!(Check::at_most("x", 1.0, 1.0).passed);
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(Check::slope("s", -3.7, -4.0).passed);
        assert!(!Check::slope("s", -3.5, -4.0).passed);
    }

    #[test]
    fn empty_report_does_not_pass() {
        let report = CriterionReport { id: 0, title: "empty", checks: Vec::new() };
        assert!(!report.passed());
    }
}
