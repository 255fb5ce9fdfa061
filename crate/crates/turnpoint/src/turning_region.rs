//! Solutions in a full neighbourhood of the turning point.
//!
//! The particular solutions are written as `γ {Wi 𝒜 + Wi' ℬ} + 𝒢` with the
//! coefficient functions obtained from loop integrals on a circle around
//! `z₀`. The connection coefficient `γ` is either supplied in closed form or
//! estimated from the contour quotient.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::airy::{ai_rotated, Sector};
use crate::liouville::{make_frame, CoefficientTable, LiouvilleError, NodeCoefficients, TurningPointProblem};
use crate::particular::{CoefficientSource, ExpLaurent, ParticularError, G_DEPTH_CAP};
use crate::quadrature::{integrate_circle, Contour, Cplx, QuadError, I};
use crate::scorer::{wi, wi_prime, ScorerError, SectorPair, DEFAULT_TOL};

/// Relative size of a Fourier mode treated as numerically zero.
pub const FOURIER_TAIL_TOL: f64 = 1e-10;
/// Minimum node count for Laurent extraction.
const MIN_SPLIT_NODES: usize = 128;

#[derive(Debug, Error)]
pub enum TurningError {
    #[error("Fourier tail shows a pole of order {detected}, above the declared {declared}")]
    PoleOrder { declared: usize, detected: usize },
    #[error("contour quotient denominator {0} is numerically zero")]
    DegenerateDenominator(Cplx),
    #[error("z = {z} is not strictly inside the circle of radius {radius}")]
    OutsideContour { z: Cplx, radius: f64 },
    #[error("connection from {0:?} to itself")]
    SamePair(SectorPair),
    #[error("order m = {requested} exceeds the table order {built}")]
    Order { requested: usize, built: usize },
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Particular(#[from] ParticularError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Laurent data of a function with a pole at the centre of a circle.
#[derive(Clone, Debug)]
pub struct LaurentSplit {
    pub contour: Contour,
    pub pole_order: usize,
    /// `g_{-1}, …, g_{-p}`.
    pub singular: Vec<Cplx>,
    samples: Vec<(Cplx, Cplx)>,
}

impl LaurentSplit {
    /// `Σ g_{-j} (z - z₀)^{-j}`.
    pub fn singular_sum(&self, z: Cplx) -> Cplx {
        let h = z - self.contour.center;
        self.singular.iter().enumerate().map(|(j, &g)| g / h.powi(j as i32 + 1)).sum()
    }

    pub fn residue(&self) -> Cplx {
        self.singular.first().copied().unwrap_or_default()
    }

    /// `G*(z) = (1/2πi) ∮ G(t)/(t - z) dt`.
    pub fn regular(&self, z: Cplx) -> Result<Cplx, TurningError> {
        self.cauchy(z, 1)
    }

    /// `G*'(z) = (1/2πi) ∮ G(t)/(t - z)² dt`.
    pub fn regular_derivative(&self, z: Cplx) -> Result<Cplx, TurningError> {
        self.cauchy(z, 2)
    }

    fn cauchy(&self, z: Cplx, power: i32) -> Result<Cplx, TurningError> {
        if !self.contour.contains(z) {
            return Err(TurningError::OutsideContour { z, radius: self.contour.radius });
        }
        let n = self.samples.len() as f64;
        Ok(self.samples.iter().map(|&(t, g)| g * (t - self.contour.center) / (n * (t - z).powi(power))).sum())
    }
}

/// Splits `func` on `contour` into its singular part at the centre and its regular part.
pub fn regular_part<F: Fn(Cplx) -> Cplx>(
    func: F,
    pole_order: usize,
    contour: &Contour,
) -> Result<LaurentSplit, TurningError> {
    let n = contour.nodes.max(MIN_SPLIT_NODES).next_power_of_two();
    let contour = Contour { nodes: n, ..*contour };
    let thetas: Vec<f64> = (0..n).map(|k| contour.phase + 2.0 * PI * k as f64 / n as f64).collect();
    let samples: Vec<(Cplx, Cplx)> = thetas
        .iter()
        .map(|&theta| {
            let t = contour.point(theta);
            (t, func(t))
        })
        .collect();
    let scale = samples.iter().map(|(_, g)| g.norm()).fold(0.0, f64::max);
    // Negative modes j = 1 .. n/2 - 1 of ((t - c)/r)^{-j}.
    let negative: Vec<Cplx> = (1..n / 2)
        .map(|j| {
            let acc: Cplx =
                samples.iter().zip(&thetas).map(|(&(_, g), &theta)| g * Cplx::from_polar(1.0, j as f64 * theta)).sum();
            acc / n as f64
        })
        .collect();
    let detected = negative.iter().rposition(|m| m.norm() > FOURIER_TAIL_TOL * scale).map_or(0, |j| j + 1);
    if detected > pole_order {
        return Err(TurningError::PoleOrder { declared: pole_order, detected });
    }
    let singular = (1..=pole_order)
        .map(|j| negative.get(j - 1).copied().unwrap_or_default() * contour.radius.powi(j as i32))
        .collect();
    Ok(LaurentSplit { contour, pole_order, singular, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaMethod {
    Exact,
    ContourQuotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnectionCoefficient {
    pub gamma: Cplx,
    pub order: usize,
    pub method: GammaMethod,
    /// `γ` is accurate to `O(u^{-error_order})`; zero when exact.
    pub error_order: usize,
}

impl ConnectionCoefficient {
    pub fn exact(gamma: Cplx, order: usize) -> Self {
        Self { gamma, order, method: GammaMethod::Exact, error_order: 0 }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// `(ζ/f)^{1/4} J_m / ζ` at a table node.
fn j_integrand(node: &NodeCoefficients, u: Cplx, m: usize) -> Cplx {
    let frame = &node.frame;
    let x = 3.0 * u * u * frame.zeta.powi(3);
    let (mut cosh_sum, mut sinh_sum) = (Cplx::new(0.0, 0.0), Cplx::new(0.0, 0.0));
    for k in 0..=m {
        let denom = factorial(k) * x.powi(k as i32);
        cosh_sum += factorial(3 * k) / denom;
        sinh_sum += factorial(3 * k + 1) / denom;
    }
    let (even_t, odd_t) = node.terms.sums(u, m, true);
    let (even, odd) = node.terms.sums(u, m, false);
    let zeta_three_halves = 1.5 * frame.xi;
    let j = -even_t.exp() * odd_t.cosh() * cosh_sum + even.exp() * odd.sinh() * sinh_sum / (u * zeta_three_halves);
    frame.zeta_over_f_quarter * j / frame.zeta
}

/// The `Ĝ_s` used by the near-field formulas.
#[derive(Clone, Debug)]
enum GParts {
    ClosedForm(Vec<ExpLaurent>),
    Split(Vec<LaurentSplit>),
}

impl GParts {
    fn new(table: &CoefficientTable, m: usize) -> Result<Self, TurningError> {
        let problem = &table.problem;
        if m > G_DEPTH_CAP {
            return Err(ParticularError::DepthCap { requested: m, cap: G_DEPTH_CAP }.into());
        }
        Ok(match CoefficientSource::new(problem, m)? {
            CoefficientSource::ClosedForm(g) if problem.z0 == Cplx::new(0.0, 0.0) => Self::ClosedForm(g),
            source => Self::Split(
                (0..=m)
                    .map(|s| regular_part(|t| source.triple(t, s)[0], 3 * s + 1, &table.contour))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// `(1/2πi) ∮ Ĝ_s`.
    fn residue(&self, s: usize) -> Cplx {
        match self {
            Self::ClosedForm(g) => g[s].coefficient(-1),
            Self::Split(parts) => parts[s].residue(),
        }
    }

    fn regular(&self, z: Cplx, s: usize, differentiate: bool) -> Result<Cplx, TurningError> {
        match self {
            Self::ClosedForm(g) if differentiate => Ok(g[s].regular_part_derivative(z)),
            Self::ClosedForm(g) => Ok(g[s].regular_part(z)),
            Self::Split(parts) if differentiate => parts[s].regular_derivative(z),
            Self::Split(parts) => parts[s].regular(z),
        }
    }
}

fn check_order(table: &CoefficientTable, m: usize) -> Result<(), TurningError> {
    if m > table.max_m {
        return Err(TurningError::Order { requested: m, built: table.max_m });
    }
    Ok(())
}

/// `γ_m` from the quotient of loop integrals on the table circle.
pub fn gamma_contour(table: &CoefficientTable, m: usize) -> Result<ConnectionCoefficient, TurningError> {
    check_order(table, m)?;
    let u = table.problem.u;
    let parts = GParts::new(table, m)?;
    let numerator: Cplx = (0..=m).map(|s| parts.residue(s) / u.powi(2 * s as i32)).sum();
    let denominator = table.cauchy_sum(|node| j_integrand(node, u, m), table.problem.z0, 0);
    let magnitude: f64 =
        table.nodes.iter().map(|node| j_integrand(node, u, m).norm() * table.contour.radius).sum::<f64>()
            / table.nodes.len() as f64;
    if denominator.norm() <= 1e-12 * magnitude {
        return Err(TurningError::DegenerateDenominator(denominator));
    }
    Ok(ConnectionCoefficient {
        gamma: numerator / (denominator * u.powf(4.0 / 3.0)),
        order: m,
        method: GammaMethod::ContourQuotient,
        error_order: 2 * m + 2,
    })
}

/// `𝒢_m(u, z)` inside the table circle. Immutable once built.
#[derive(Clone, Debug)]
pub struct GFunction {
    pub table: Arc<CoefficientTable>,
    pub m: usize,
    pub u: Cplx,
    pub gamma: ConnectionCoefficient,
    parts: GParts,
    j_values: Vec<Cplx>,
}

impl GFunction {
    pub fn new(table: Arc<CoefficientTable>, m: usize, gamma: ConnectionCoefficient) -> Result<Self, TurningError> {
        check_order(&table, m)?;
        let u = table.problem.u;
        let parts = GParts::new(&table, m)?;
        let j_values = table.nodes.iter().map(|node| j_integrand(node, u, m)).collect();
        Ok(Self { table, m, u, gamma, parts, j_values })
    }

    pub fn problem(&self) -> &TurningPointProblem {
        &self.table.problem
    }

    fn check_inside(&self, z: Cplx) -> Result<(), TurningError> {
        if !self.table.contour.contains(z) {
            return Err(TurningError::OutsideContour { z, radius: self.table.contour.radius });
        }
        Ok(())
    }

    fn j_cauchy(&self, z: Cplx, power: i32) -> Cplx {
        let contour = &self.table.contour;
        let n = self.j_values.len() as f64;
        self.table
            .nodes
            .iter()
            .zip(&self.j_values)
            .map(|(node, &j)| j * (node.t - contour.center) / (n * (node.t - z).powi(power)))
            .sum()
    }

    fn evaluate(&self, z: Cplx, differentiate: bool) -> Result<Cplx, TurningError> {
        self.check_inside(z)?;
        let u = self.u;
        let mut regular = Cplx::new(0.0, 0.0);
        for s in 0..=self.m {
            regular += self.parts.regular(z, s, differentiate)? / u.powi(2 * s as i32);
        }
        let power = if differentiate { 2 } else { 1 };
        Ok(regular / (u * u) - self.gamma.gamma * self.j_cauchy(z, power) / u.powf(2.0 / 3.0))
    }

    pub fn value(&self, z: Cplx) -> Result<Cplx, TurningError> {
        self.evaluate(z, false)
    }

    pub fn derivative(&self, z: Cplx) -> Result<Cplx, TurningError> {
        self.evaluate(z, true)
    }

    /// `∮ 𝒢_m dz` on the concentric circle of radius `fraction · r₀`.
    pub fn loop_integral(&self, fraction: f64) -> Result<Cplx, TurningError> {
        let contour = Contour::new(self.table.contour.center, fraction * self.table.contour.radius);
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(TurningError::OutsideContour { z: contour.point(0.0), radius: self.table.contour.radius });
        }
        Ok(integrate_circle(|t| self.value(t).unwrap_or_default(), &contour)?)
    }

    /// Largest negative Fourier mode of `𝒢_m` on a circle of radius `fraction · r₀`,
    /// relative to the largest sample.
    pub fn analyticity_defect(&self, fraction: f64) -> Result<f64, TurningError> {
        let contour = Contour::new(self.table.contour.center, fraction * self.table.contour.radius).with_nodes(64);
        let split = regular_part(|t| self.value(t).unwrap_or_default(), 32, &contour)?;
        let scale = split.samples.iter().map(|(_, g)| g.norm()).fold(0.0, f64::max);
        let worst = split
            .singular
            .iter()
            .enumerate()
            .map(|(j, g)| g.norm() / contour.radius.powi(j as i32 + 1))
            .fold(0.0, f64::max);
        Ok(worst / scale.max(f64::MIN_POSITIVE))
    }

    /// Angular window in `arg(u^{2/3} ζ)` covered by the arc `Γ^{(j,k)}`.
    pub fn arc_window(pair: SectorPair) -> (f64, f64) {
        match pair {
            SectorPair::ZeroPlus => (0.0, 2.0 * PI / 3.0),
            SectorPair::MinusZero => (-2.0 * PI / 3.0, 0.0),
            SectorPair::MinusPlus => (2.0 * PI / 3.0, 4.0 * PI / 3.0),
        }
    }
}

/// Builds `𝒢_m` on a fresh table.
pub fn g_function(
    problem: &TurningPointProblem,
    m: usize,
    gamma: ConnectionCoefficient,
    contour: Option<Contour>,
) -> Result<GFunction, TurningError> {
    let table = match contour {
        Some(c) => CoefficientTable::with_contour(problem, m, c)?,
        None => CoefficientTable::new(problem, m)?,
    };
    GFunction::new(Arc::new(table), m, gamma)
}

struct NearTerms {
    wi: Cplx,
    wi_prime: Cplx,
    a: Cplx,
    b: Cplx,
    a_prime: Cplx,
    b_prime: Cplx,
    zeta_f_half: Cplx,
    f_over_zeta_half: Cplx,
}

fn near_terms(gfun: &GFunction, z: Cplx, pair: SectorPair) -> Result<NearTerms, TurningError> {
    gfun.check_inside(z)?;
    let u = gfun.u;
    let frame = make_frame(gfun.problem(), z)?;
    let coeffs = gfun.table.coeff_ab_near(z, gfun.m, u)?;
    let arg = u.powf(2.0 / 3.0) * frame.zeta;
    Ok(NearTerms {
        wi: wi(pair, arg, DEFAULT_TOL)?,
        wi_prime: wi_prime(pair, arg, DEFAULT_TOL)?,
        a: coeffs.a,
        b: coeffs.b,
        a_prime: coeffs.a_prime,
        b_prime: coeffs.b_prime,
        zeta_f_half: frame.zeta_f_quarter * frame.zeta_f_quarter,
        f_over_zeta_half: 1.0 / (frame.zeta_over_f_quarter * frame.zeta_over_f_quarter),
    })
}

/// `w^{(j,k)}(u, z) = γ {Wi(u^{2/3}ζ) 𝒜 + Wi'(u^{2/3}ζ) ℬ} + 𝒢`.
pub fn w_near(gfun: &GFunction, z: Cplx, pair: SectorPair) -> Result<Cplx, TurningError> {
    let t = near_terms(gfun, z, pair)?;
    Ok(gfun.gamma.gamma * (t.wi * t.a + t.wi_prime * t.b) + gfun.value(z)?)
}

/// `∂w^{(j,k)}/∂z = γ {Wi 𝒞 + Wi' 𝒟} + ℋ`.
pub fn w_near_derivative(gfun: &GFunction, z: Cplx, pair: SectorPair) -> Result<Cplx, TurningError> {
    let t = near_terms(gfun, z, pair)?;
    let u = gfun.u;
    let gamma = gfun.gamma.gamma;
    let c = u.powf(4.0 / 3.0) * t.zeta_f_half * t.b + t.a_prime;
    let d = u.powf(2.0 / 3.0) * t.f_over_zeta_half * t.a + t.b_prime;
    let h = gfun.derivative(z)? + u.powf(2.0 / 3.0) * gamma * t.f_over_zeta_half * t.b;
    Ok(gamma * (t.wi * c + t.wi_prime * d) + h)
}

/// `w^{to} = w^{from} + coefficient · w_{m,sector}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnectionTerm {
    pub from: SectorPair,
    pub to: SectorPair,
    pub coefficient: Cplx,
    pub sector: Sector,
}

impl ConnectionTerm {
    /// The additive homogeneous term at `z`; exact `Ai_j(u^{2/3} z)` for Airy problems.
    pub fn evaluate(&self, table: &CoefficientTable, z: Cplx, m: usize) -> Result<Cplx, TurningError> {
        let problem = &table.problem;
        let homogeneous = if problem.airy.is_some() {
            ai_rotated(problem.u.powf(2.0 / 3.0) * z, self.sector).value
        } else {
            table.homogeneous_solution(z, self.sector, m, problem.u)?
        };
        Ok(self.coefficient * homogeneous)
    }
}

/// The homogeneous term relating two fundamental particular solutions.
pub fn connect(from: SectorPair, to: SectorPair, gamma: Cplx) -> Result<ConnectionTerm, TurningError> {
    use SectorPair::{MinusPlus, MinusZero, ZeroPlus};
    let two_pi = 2.0 * PI;
    let (coefficient, sector) = match (from, to) {
        (ZeroPlus, MinusPlus) => (two_pi * Cplx::from_polar(1.0, -PI / 6.0) * gamma, Sector::Plus),
        (MinusPlus, MinusZero) => (-two_pi * Cplx::from_polar(1.0, PI / 6.0) * gamma, Sector::Minus),
        (ZeroPlus, MinusZero) => (-two_pi * I * gamma, Sector::Zero),
        (a, b) if a == b => return Err(TurningError::SamePair(a)),
        (a, b) => {
            let forward = connect(b, a, gamma)?;
            (-forward.coefficient, forward.sector)
        }
    };
    Ok(ConnectionTerm { from, to, coefficient, sector })
}
