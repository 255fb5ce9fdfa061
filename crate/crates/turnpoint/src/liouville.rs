//! Liouville variables and the homogeneous coefficient machinery for
//! `w'' = {u² f(z) + g(z)} w + p(z)` with a simple turning point `z₀`.
//!
//! Local derivatives are carried as truncated Taylor series ([`Series`])
//! obtained either exactly (polynomial, exponential-polynomial and rational
//! inputs) or from trapezoidal Fourier coefficients on a circle.
//!
//! Odd coefficients `Ê_{2s+1}` are fixed by expanding `F̂_{2s+1} f^{1/2}` in
//! powers of `(z - z₀)^{1/2}` on a circle around `z₀` and integrating
//! termwise; even ones come from the logarithmic identity with every
//! normalisation constant set to zero.

use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::airy::{ai_rotated, Sector};
use crate::quadrature::{circle_fourier, integrate_real_interval, Contour, Cplx, QuadError};
use crate::series::Series;

/// Default depth cap for the `F̂` recursion.
pub const F_HAT_CAP: usize = 6;
/// Default radius of the disc around `z₀` inside which away-expansions refuse to run.
pub const DEFAULT_EXCLUSION: f64 = 1e-2;
/// Default node count for circle tables around the turning point.
pub const DEFAULT_TABLE_NODES: usize = 256;

const TAYLOR_NODES: usize = 64;
const FRAME_TOL: f64 = 1e-14;
const ODD_PATH_TOL: f64 = 1e-13;
const PUISEUX_NOISE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("z = {z} lies within {radius} of the turning point")]
    TooClose { z: Cplx, radius: f64 },
    #[error("f(z0) = {0} is not zero")]
    NotTurningPoint(Cplx),
    #[error("f'(z0) vanishes; the turning point is not simple")]
    NotSimple,
    #[error("f has another zero on the segment from z0 to {0}")]
    SecondZero(Cplx),
    #[error("branch of f^(1/2) is discontinuous along the segment from z0 to {0}")]
    Branch(Cplx),
    #[error("recursion depth {requested} exceeds the cap {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error("z = {z} lies outside the circle |t - z0| = {radius}")]
    OutsideContour { z: Cplx, radius: f64 },
    #[error("table built for m <= {built}, requested {requested}")]
    TableOrder { requested: usize, built: usize },
    #[error("invalid problem specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub type ScalarFn = Arc<dyn Fn(Cplx) -> Cplx + Send + Sync>;

/// An analytic input function together with a way to obtain local Taylor data.
#[derive(Clone)]
pub enum AnalyticFn {
    /// `e^{αz} Σ poly[k] z^k`.
    ExpPoly { alpha: Cplx, poly: Vec<Cplx> },
    /// `Σ num[k] z^k / Σ den[k] z^k`.
    Rational { num: Vec<Cplx>, den: Vec<Cplx> },
    /// Opaque evaluator, analytic in every disc of the given radius used around query points.
    Closure { eval: ScalarFn, radius: f64 },
}

impl std::fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ExpPoly { alpha, poly } => write!(f, "ExpPoly {{ alpha: {alpha}, poly: {poly:?} }}"),
            Self::Rational { num, den } => write!(f, "Rational {{ num: {num:?}, den: {den:?} }}"),
            Self::Closure { radius, .. } => write!(f, "Closure {{ radius: {radius} }}"),
        }
    }
}

fn horner(poly: &[Cplx], z: Cplx) -> Cplx {
    poly.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl AnalyticFn {
    pub fn zero() -> Self {
        Self::polynomial(vec![])
    }

    pub fn constant(c: Cplx) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn polynomial(coeffs: Vec<Cplx>) -> Self {
        Self::ExpPoly { alpha: Cplx::new(0.0, 0.0), poly: coeffs }
    }

    pub fn exponential(alpha: Cplx) -> Self {
        Self::ExpPoly { alpha, poly: vec![Cplx::new(1.0, 0.0)] }
    }

    pub fn closure<F: Fn(Cplx) -> Cplx + Send + Sync + 'static>(eval: F, radius: f64) -> Self {
        Self::Closure { eval: Arc::new(eval), radius }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::ExpPoly { poly, .. } => poly.iter().all(|c| *c == Cplx::new(0.0, 0.0)),
            Self::Rational { num, .. } => num.iter().all(|c| *c == Cplx::new(0.0, 0.0)),
            Self::Closure { .. } => false,
        }
    }

    pub fn value(&self, z: Cplx) -> Cplx {
        match self {
            Self::ExpPoly { alpha, poly } => {
                let p = horner(poly, z);
                if *alpha == Cplx::new(0.0, 0.0) {
                    p
                } else {
                    (alpha * z).exp() * p
                }
            }
            Self::Rational { num, den } => horner(num, z) / horner(den, z),
            Self::Closure { eval, .. } => eval(z),
        }
    }

    /// Taylor coefficients at `center`, `len` terms.
    pub fn taylor(&self, center: Cplx, len: usize) -> Series {
        match self {
            Self::ExpPoly { alpha, poly } => {
                let p = Series::shifted_polynomial(poly, center, len);
                if *alpha == Cplx::new(0.0, 0.0) {
                    p
                } else {
                    (&Series::exponential(*alpha, len) * &p).scale((alpha * center).exp())
                }
            }
            Self::Rational { num, den } => {
                let n = Series::shifted_polynomial(num, center, len);
                let d = Series::shifted_polynomial(den, center, len);
                &n * &d.recip()
            }
            Self::Closure { eval, radius } => {
                let nodes = (2 * len).next_power_of_two().max(TAYLOR_NODES);
                let contour = Contour::new(center, *radius);
                let modes = circle_fourier(|t| eval(t), &contour, nodes);
                Series::new((0..len).map(|k| modes[k] / radius.powi(k as i32)).collect())
            }
        }
    }

    /// `d^order/dz^order` at `z`.
    pub fn derivative(&self, z: Cplx, order: usize) -> Cplx {
        self.taylor(z, order + 1).derivative_at_center(order)
    }
}

/// Serializable description of an input function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Ascending coefficients.
    Polynomial(Vec<Cplx>),
    /// `e^{αz}`.
    Exponential(Cplx),
    ExpPoly {
        alpha: Cplx,
        poly: Vec<Cplx>,
    },
    Rational {
        num: Vec<Cplx>,
        den: Vec<Cplx>,
    },
}

impl FunctionSpec {
    pub fn to_fn(&self) -> AnalyticFn {
        match self {
            Self::Polynomial(c) => AnalyticFn::polynomial(c.clone()),
            Self::Exponential(a) => AnalyticFn::exponential(*a),
            Self::ExpPoly { alpha, poly } => AnalyticFn::ExpPoly { alpha: *alpha, poly: poly.clone() },
            Self::Rational { num, den } => AnalyticFn::Rational { num: num.clone(), den: den.clone() },
        }
    }
}

/// Forcing terms with closed-form treatment for the Airy problem `f = z`, `g = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AiryForcing {
    /// `p(z) = Σ p_r z^r`, ascending.
    Polynomial(Vec<Cplx>),
    /// `p(z) = e^{αz}`.
    Exponential(Cplx),
}

impl AiryForcing {
    pub fn to_fn(&self) -> AnalyticFn {
        match self {
            Self::Polynomial(c) => AnalyticFn::polynomial(c.clone()),
            Self::Exponential(a) => AnalyticFn::exponential(*a),
        }
    }
}

/// Named problems available from problem files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    /// `f = z`, `g = 0`.
    #[serde(rename = "airy")]
    Airy,
    /// `f = z - shift`, `g = 0`.
    #[serde(rename = "airy-shifted")]
    AiryShifted,
    /// `f = z e^z`, `g = 0`.
    #[serde(rename = "z-exp-z")]
    ZExpZ,
}

/// Problem file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub builtin: Option<Builtin>,
    #[serde(default)]
    pub f: Option<FunctionSpec>,
    #[serde(default)]
    pub g: Option<FunctionSpec>,
    pub p: FunctionSpec,
    #[serde(default)]
    pub z0: Option<Cplx>,
    pub u: Cplx,
    #[serde(default)]
    pub shift: Option<Cplx>,
    #[serde(default)]
    pub cut_angle: Option<f64>,
    #[serde(default)]
    pub singularities: Vec<Cplx>,
}

/// The triple `(f, g, p)`, the turning point and the large parameter.
#[derive(Clone, Debug)]
pub struct TurningPointProblem {
    pub name: String,
    pub f: AnalyticFn,
    pub g: AnalyticFn,
    pub p: AnalyticFn,
    pub z0: Cplx,
    pub u: Cplx,
    /// Direction of the branch cut of `(z - z₀)^{1/2}` leaving `z₀`.
    pub cut_angle: f64,
    pub exclusion_radius: f64,
    pub f_hat_cap: usize,
    /// Declared singularities of `f`, `g`, `p`.
    pub singularities: Vec<Cplx>,
    /// Set for `f = z`, `g = 0` with polynomial or exponential forcing.
    pub airy: Option<AiryForcing>,
    f_prime_z0: Cplx,
    /// `f'(z₀)^{1/12}`, principal.
    root12: Cplx,
    f_taylor_z0: Series,
}

impl TurningPointProblem {
    pub fn new(
        name: impl Into<String>,
        f: AnalyticFn,
        g: AnalyticFn,
        p: AnalyticFn,
        z0: Cplx,
        u: Cplx,
    ) -> Result<Self, LiouvilleError> {
        let f_taylor_z0 = f.taylor(z0, 24);
        let f0 = f.value(z0);
        let f_prime_z0 = f_taylor_z0.coeffs[1];
        if f_prime_z0.norm() == 0.0 {
            return Err(LiouvilleError::NotSimple);
        }
        if f0.norm() > 1e-10 * f_prime_z0.norm().max(1.0) {
            return Err(LiouvilleError::NotTurningPoint(f0));
        }
        Ok(Self {
            name: name.into(),
            f,
            g,
            p,
            z0,
            u,
            cut_angle: PI,
            exclusion_radius: DEFAULT_EXCLUSION,
            f_hat_cap: F_HAT_CAP,
            singularities: Vec::new(),
            airy: None,
            f_prime_z0,
            root12: f_prime_z0.powf(1.0 / 12.0),
            f_taylor_z0,
        })
    }

    /// `w'' - u² z w = p(z)`.
    pub fn airy(forcing: AiryForcing, u: Cplx) -> Self {
        let origin = Cplx::new(0.0, 0.0);
        let f = AnalyticFn::polynomial(vec![origin, Cplx::new(1.0, 0.0)]);
        let mut problem = Self::new("airy", f, AnalyticFn::zero(), forcing.to_fn(), origin, u)
            .expect("f = z has a simple zero at the origin");
        problem.airy = Some(forcing);
        problem
    }

    /// `w'' - u² (z - a) w = p(z)`.
    pub fn airy_shifted(shift: Cplx, p: AnalyticFn, u: Cplx) -> Self {
        let f = AnalyticFn::polynomial(vec![-shift, Cplx::new(1.0, 0.0)]);
        Self::new("airy-shifted", f, AnalyticFn::zero(), p, shift, u).expect("simple zero at the shift")
    }

    /// `w'' - u² z e^z w = p(z)`.
    pub fn z_exp_z(p: AnalyticFn, u: Cplx) -> Self {
        let one = Cplx::new(1.0, 0.0);
        let f = AnalyticFn::ExpPoly { alpha: one, poly: vec![Cplx::new(0.0, 0.0), one] };
        Self::new("z-exp-z", f, AnalyticFn::zero(), p, Cplx::new(0.0, 0.0), u).expect("simple zero at the origin")
    }

    pub fn with_u(mut self, u: Cplx) -> Self {
        self.u = u;
        self
    }

    pub fn with_cut_angle(mut self, angle: f64) -> Self {
        self.cut_angle = angle;
        self
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn with_f_hat_cap(mut self, cap: usize) -> Self {
        self.f_hat_cap = cap;
        self
    }

    pub fn with_singularities(mut self, points: Vec<Cplx>) -> Self {
        self.singularities = points;
        self
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self, LiouvilleError> {
        let mut problem = match spec.builtin {
            Some(Builtin::Airy) => {
                let forcing = match &spec.p {
                    FunctionSpec::Polynomial(c) => Some(AiryForcing::Polynomial(c.clone())),
                    FunctionSpec::Exponential(a) => Some(AiryForcing::Exponential(*a)),
                    _ => None,
                };
                match forcing {
                    Some(forcing) => Self::airy(forcing, spec.u),
                    None => {
                        let origin = Cplx::new(0.0, 0.0);
                        let f = AnalyticFn::polynomial(vec![origin, Cplx::new(1.0, 0.0)]);
                        Self::new("airy", f, AnalyticFn::zero(), spec.p.to_fn(), origin, spec.u)?
                    }
                }
            }
            Some(Builtin::AiryShifted) => {
                let shift = spec.shift.unwrap_or(Cplx::new(1.0, 0.0));
                Self::airy_shifted(shift, spec.p.to_fn(), spec.u)
            }
            Some(Builtin::ZExpZ) => Self::z_exp_z(spec.p.to_fn(), spec.u),
            None => {
                let f = spec.f.as_ref().ok_or_else(|| LiouvilleError::Spec("missing f".into()))?;
                let z0 = spec.z0.ok_or_else(|| LiouvilleError::Spec("missing z0".into()))?;
                let g = spec.g.as_ref().map(FunctionSpec::to_fn).unwrap_or_else(AnalyticFn::zero);
                Self::new("custom", f.to_fn(), g, spec.p.to_fn(), z0, spec.u)?
            }
        };
        if let Some(angle) = spec.cut_angle {
            problem.cut_angle = angle;
        }
        problem.singularities = spec.singularities.clone();
        Ok(problem)
    }

    pub fn from_json(text: &str) -> Result<Self, LiouvilleError> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| LiouvilleError::Spec(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn f_prime_at_turning_point(&self) -> Cplx {
        self.f_prime_z0
    }

    /// Default radius for circles around `z₀`: half the distance to the
    /// nearest declared singularity, capped at 1.
    pub fn default_radius(&self) -> f64 {
        self.singularities.iter().map(|s| 0.5 * (s - self.z0).norm()).fold(1.0, f64::min)
    }

    fn taylor_radius(&self, z: Cplx) -> f64 {
        self.singularities.iter().map(|s| 0.5 * (s - z).norm()).fold(1.0, f64::min)
    }

    fn taylor_at(&self, func: &AnalyticFn, z: Cplx, len: usize) -> Series {
        match func {
            AnalyticFn::Closure { eval, radius } => {
                let r = radius.min(self.taylor_radius(z));
                AnalyticFn::Closure { eval: eval.clone(), radius: r }.taylor(z, len)
            }
            other => other.taylor(z, len),
        }
    }

    /// `(z - z₀)^{power}` on the branch cut along `cut_angle`.
    pub fn branch_power(&self, z: Cplx, power: f64) -> Cplx {
        let h = z - self.z0;
        if h.norm() == 0.0 {
            return Cplx::new(0.0, 0.0);
        }
        let mut a = h.arg();
        while a > self.cut_angle {
            a -= 2.0 * PI;
        }
        while a <= self.cut_angle - 2.0 * PI {
            a += 2.0 * PI;
        }
        Cplx::from_polar(h.norm().powf(power), power * a)
    }

    /// `f(t) / (f'(z₀)(t - z₀))`, analytic and equal to 1 at `z₀`.
    fn ratio(&self, t: Cplx) -> Cplx {
        let h = t - self.z0;
        if h.norm() < 1e-3 * self.taylor_radius(self.z0) {
            let c = &self.f_taylor_z0.coeffs;
            let tail = Series::new(c[1..].to_vec()).eval(h);
            return tail / self.f_prime_z0;
        }
        self.f.value(t) / (self.f_prime_z0 * h)
    }

    fn roots(&self) -> Roots {
        let b = self.root12;
        Roots { b, b2: b * b, b3: b * b * b, b4: (b * b) * (b * b), b6: (b * b * b) * (b * b * b) }
    }

    /// `f^{1/2}(z)` on the problem's branch.
    pub fn f_sqrt(&self, z: Cplx) -> Cplx {
        self.roots().b6 * self.branch_power(z, 0.5) * self.ratio(z).sqrt()
    }
}

#[derive(Clone, Copy)]
struct Roots {
    #[allow(dead_code)]
    b: Cplx,
    b2: Cplx,
    b3: Cplx,
    b4: Cplx,
    b6: Cplx,
}

/// Liouville variables at a point and the fractional powers built from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiouvilleFrame {
    pub at: Cplx,
    pub xi: Cplx,
    pub zeta: Cplx,
    pub f: Cplx,
    pub f_sqrt: Cplx,
    pub f_quarter: Cplx,
    /// `(ζ/f)^{1/4}`.
    pub zeta_over_f_quarter: Cplx,
    /// `(ζ f)^{1/4}`.
    pub zeta_f_quarter: Cplx,
}

/// `ξ = ∫_{z₀}^{z} f^{1/2}(t) dt` along the straight segment and `ζ = (3ξ/2)^{2/3}`.
pub fn make_frame(problem: &TurningPointProblem, z: Cplx) -> Result<LiouvilleFrame, LiouvilleError> {
    let r = problem.roots();
    let h = z - problem.z0;
    let zero = Cplx::new(0.0, 0.0);
    if h.norm() == 0.0 {
        return Ok(LiouvilleFrame {
            at: z,
            xi: zero,
            zeta: zero,
            f: zero,
            f_sqrt: zero,
            f_quarter: zero,
            zeta_over_f_quarter: 1.0 / r.b2,
            zeta_f_quarter: zero,
        });
    }
    // Continuity of the principal square root of the ratio along the segment.
    let mut previous = problem.ratio(problem.z0);
    for k in 1..=32 {
        let tau = k as f64 / 32.0;
        let cur = problem.ratio(problem.z0 + h * tau);
        if cur.norm() < 1e-12 {
            return Err(LiouvilleError::SecondZero(z));
        }
        if (cur.arg() - previous.arg()).abs() > PI / 2.0 {
            return Err(LiouvilleError::Branch(z));
        }
        previous = cur;
    }
    // t = z₀ + h τ² removes the square-root endpoint singularity.
    let (integral, _, _) = integrate_real_interval(
        |tau| problem.ratio(problem.z0 + h * tau * tau).sqrt() * (tau * tau),
        0.0,
        1.0,
        FRAME_TOL,
    )?;
    let k_factor = 3.0 * integral;
    let h_half = problem.branch_power(z, 0.5);
    let h_quarter = problem.branch_power(z, 0.25);
    let ratio = problem.ratio(z);
    let k23 = k_factor.powf(2.0 / 3.0);
    Ok(LiouvilleFrame {
        at: z,
        xi: (2.0 / 3.0) * r.b6 * h * h_half * k_factor,
        zeta: r.b4 * h * k23,
        f: problem.f.value(z),
        f_sqrt: r.b6 * h_half * ratio.sqrt(),
        f_quarter: r.b3 * h_quarter * ratio.powf(0.25),
        zeta_over_f_quarter: (k23 / ratio).powf(0.25) / r.b2,
        zeta_f_quarter: r.b4 * h_half * (k23 * ratio).powf(0.25),
    })
}

fn check_exclusion(problem: &TurningPointProblem, z: Cplx) -> Result<(), LiouvilleError> {
    if (z - problem.z0).norm() < problem.exclusion_radius {
        return Err(LiouvilleError::TooClose { z, radius: problem.exclusion_radius });
    }
    Ok(())
}

/// Taylor series of `Φ = (4 f f'' - 5 f'²)/(16 f³) + g/f` at `z`.
fn phi_series(problem: &TurningPointProblem, z: Cplx, len: usize) -> Series {
    let f = problem.taylor_at(&problem.f, z, len + 2);
    let g = problem.taylor_at(&problem.g, z, len);
    let f1 = f.derivative();
    let f2 = f1.derivative();
    let f_inv = f.clone().truncate(len).recip();
    let f_inv3 = &(&f_inv * &f_inv) * &f_inv;
    let num = &(&f.clone().truncate(len) * &f2).scale(Cplx::new(4.0, 0.0)) - &(&f1 * &f1).scale(Cplx::new(5.0, 0.0));
    let first = (&num * &f_inv3).scale(Cplx::new(1.0 / 16.0, 0.0));
    &first.truncate(len) + &(&g * &f_inv)
}

/// `Φ(z)`.
pub fn phi(problem: &TurningPointProblem, z: Cplx) -> Result<Cplx, LiouvilleError> {
    check_exclusion(problem, z)?;
    Ok(phi_series(problem, z, 1).value())
}

/// Series of `F̂_1 … F̂_n` at `z`; each keeps at least two terms.
fn f_hat_series(problem: &TurningPointProblem, z: Cplx, n: usize) -> Vec<Series> {
    let len = n + 2;
    let phi = phi_series(problem, z, len);
    let f = problem.taylor_at(&problem.f, z, len);
    let f_inv_sqrt = f.powf_with(-0.5, 1.0 / problem.f_sqrt(z));
    let mut out: Vec<Series> = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(phi.scale(Cplx::new(0.5, 0.0)));
    if n >= 2 {
        out.push((&f_inv_sqrt * &phi.derivative()).scale(Cplx::new(-0.25, 0.0)));
    }
    for s in 2..n {
        // F̂_{s+1} = -½ f^{-1/2} F̂_s' - ½ Σ_{j=1}^{s-1} F̂_j F̂_{s-j}
        let mut next = (&f_inv_sqrt * &out[s - 1].derivative()).scale(Cplx::new(-0.5, 0.0));
        for j in 1..s {
            let prod = &out[j - 1] * &out[s - j - 1];
            next = &next - &prod.scale(Cplx::new(0.5, 0.0));
        }
        out.push(next);
    }
    out
}

/// `F̂_1(z) … F̂_n(z)`.
pub fn f_hat_coefficients(problem: &TurningPointProblem, z: Cplx, n: usize) -> Result<Vec<Cplx>, LiouvilleError> {
    if n > problem.f_hat_cap {
        return Err(LiouvilleError::DepthCap { requested: n, cap: problem.f_hat_cap });
    }
    check_exclusion(problem, z)?;
    Ok(f_hat_series(problem, z, n).iter().map(Series::value).collect())
}

/// `Ê_2, Ê_4, …, Ê_{2·count}` from the odd `F̂` values `F̂_1, F̂_3, …`.
fn even_from_odd_f_hat(odd: &[Cplx], count: usize) -> Vec<Cplx> {
    // Y(x) = Σ_{s≥0} F̂_{2s+1} x^{s+1};  Σ Ê_{2s} x^s = -½ ln(1 + Y)
    let mut y = vec![Cplx::new(0.0, 0.0); count + 1];
    for (s, &v) in odd.iter().enumerate().take(count) {
        y[s + 1] = v;
    }
    let l = Series::new(y).ln_1p();
    (1..=count).map(|s| -0.5 * l.coeffs[s]).collect()
}

/// `Ê_{2s}(z)` with zero normalisation constants.
pub fn e_hat_even(problem: &TurningPointProblem, z: Cplx, s: usize) -> Result<Cplx, LiouvilleError> {
    if s == 0 {
        return Ok(Cplx::new(0.0, 0.0));
    }
    let f_hat = f_hat_coefficients(problem, z, 2 * s - 1)?;
    let odd: Vec<Cplx> = f_hat.iter().step_by(2).copied().collect();
    Ok(even_from_odd_f_hat(&odd, s)[s - 1])
}

/// Laurent data of `F̂_{2s+1} f^{1/2} / (z - z₀)^{1/2}` on a circle around `z₀`.
#[derive(Clone, Debug)]
pub struct PuiseuxTable {
    pub contour: Contour,
    /// `laurent[s][(power, coefficient)]` for `Ê_{2s+1}`.
    pub laurent: Vec<Vec<(i32, Cplx)>>,
}

impl PuiseuxTable {
    fn from_samples(problem: &TurningPointProblem, contour: Contour, samples: &[Vec<Cplx>]) -> Self {
        let nodes = contour.nodes;
        let orders = samples.first().map_or(0, Vec::len);
        let root = problem.roots().b6;
        let laurent = (0..orders)
            .map(|s| {
                // Only the node values are used, so reconstruct the sampled function directly.
                let values: Vec<Cplx> = samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let t = contour.point(contour.phase + 2.0 * PI * k as f64 / nodes as f64);
                        v[s] * root * problem.ratio(t).sqrt()
                    })
                    .collect();
                let modes = dft(&values, contour.phase);
                let floor = PUISEUX_NOISE * modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
                modes
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > floor)
                    .map(|(k, &c)| {
                        let power = if k < nodes / 2 { k as i32 } else { k as i32 - nodes as i32 };
                        (power, c / contour.radius.powi(power))
                    })
                    .collect()
            })
            .collect();
        Self { contour, laurent }
    }

    /// `Ê_{2s+1}(z)` by termwise integration, for `z` in the closed disc.
    pub fn evaluate(&self, problem: &TurningPointProblem, z: Cplx, s: usize) -> Cplx {
        let h = z - problem.z0;
        let h_half = problem.branch_power(z, 0.5);
        self.laurent[s].iter().map(|&(k, m)| m * h.powi(k + 1) * h_half / (f64::from(k) + 1.5)).sum()
    }
}

fn dft(values: &[Cplx], phase: f64) -> Vec<Cplx> {
    let n = values.len();
    (0..n)
        .map(|m| {
            let mode = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            let acc: Cplx = values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let theta = phase + 2.0 * PI * k as f64 / n as f64;
                    v * Cplx::from_polar(1.0, -mode * theta)
                })
                .sum();
            acc / n as f64
        })
        .collect()
}

/// Exact sequences `a_s` and `ã_s`, indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePair {
    pub a: Vec<BigRational>,
    pub a_tilde: Vec<BigRational>,
}

impl SequencePair {
    pub fn a(&self, s: usize) -> f64 {
        self.a[s - 1].to_f64().unwrap_or(f64::NAN)
    }

    pub fn a_tilde(&self, s: usize) -> f64 {
        self.a_tilde[s - 1].to_f64().unwrap_or(f64::NAN)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

fn recurrence(first: BigRational, n: usize) -> Vec<BigRational> {
    let mut b = vec![first.clone(), first];
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for s in 2..n {
        // b_{s+1} = ½(s+1) b_s + ½ Σ_{j=1}^{s-1} b_j b_{s-j}
        let mut sum = BigRational::zero();
        for j in 1..s {
            sum += &b[j - 1] * &b[s - j - 1];
        }
        let next = &half * BigRational::from_integer(BigInt::from(s + 1)) * &b[s - 1] + &half * sum;
        b.push(next);
    }
    b.truncate(n);
    b
}

/// `a_1 … a_n` and `ã_1 … ã_n`.
pub fn ab_sequences(n: usize) -> SequencePair {
    let n = n.max(2);
    let a1 = BigRational::new(BigInt::from(5), BigInt::from(72));
    let t1 = BigRational::new(BigInt::from(-7), BigInt::from(72));
    SequencePair { a: recurrence(a1, n), a_tilde: recurrence(t1, n) }
}

/// Values of `Ê_s`, `𝓔_s` and `𝓔̃_s` at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentTerms {
    /// `Ê_1 … Ê_N`.
    pub e_hat: Vec<Cplx>,
    /// `𝓔_1 … 𝓔_N`.
    pub cal_e: Vec<Cplx>,
    /// `𝓔̃_1 … 𝓔̃_N`.
    pub cal_e_tilde: Vec<Cplx>,
}

impl ExponentTerms {
    pub fn new(e_hat: Vec<Cplx>, xi: Cplx, seq: &SequencePair) -> Self {
        let mut cal_e = Vec::with_capacity(e_hat.len());
        let mut cal_e_tilde = Vec::with_capacity(e_hat.len());
        for (idx, &e) in e_hat.iter().enumerate() {
            let s = idx + 1;
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let base = sign / (s as f64 * xi.powi(s as i32));
            cal_e.push(e + base * seq.a(s));
            cal_e_tilde.push(e + base * seq.a_tilde(s));
        }
        Self { e_hat, cal_e, cal_e_tilde }
    }

    /// `(Σ_{s=1}^m X_{2s}/u^{2s}, Σ_{s=0}^m X_{2s+1}/u^{2s+1})` for `X = 𝓔̃` (tilde) or `𝓔`.
    pub fn sums(&self, u: Cplx, m: usize, tilde: bool) -> (Cplx, Cplx) {
        let terms = if tilde { &self.cal_e_tilde } else { &self.cal_e };
        let mut even = Cplx::new(0.0, 0.0);
        let mut odd = Cplx::new(0.0, 0.0);
        for s in 1..=m {
            even += terms[2 * s - 1] / u.powi(2 * s as i32);
        }
        for s in 0..=m {
            odd += terms[2 * s] / u.powi(2 * s as i32 + 1);
        }
        (even, odd)
    }
}

/// Integrands of the coefficient functions: `(𝒜, ℬ)` away from `z₀`.
fn ab_from_terms(frame: &LiouvilleFrame, terms: &ExponentTerms, u: Cplx, m: usize) -> (Cplx, Cplx) {
    let (even_t, odd_t) = terms.sums(u, m, true);
    let (even, odd) = terms.sums(u, m, false);
    let a = frame.zeta_over_f_quarter * even_t.exp() * odd_t.cosh();
    let b = even.exp() * odd.sinh() / (u.powf(1.0 / 3.0) * frame.zeta_f_quarter);
    (a, b)
}

/// Per-node data on a circle around the turning point.
#[derive(Clone, Debug)]
pub struct NodeCoefficients {
    pub t: Cplx,
    pub frame: LiouvilleFrame,
    pub terms: ExponentTerms,
}

/// Coefficient data on a circle `|t - z₀| = r₀`, independent of `u`.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub problem: TurningPointProblem,
    pub contour: Contour,
    pub max_m: usize,
    pub sequences: SequencePair,
    pub puiseux: PuiseuxTable,
    pub nodes: Vec<NodeCoefficients>,
}

/// Coefficient functions and, optionally, their `z`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientPair {
    pub a: Cplx,
    pub b: Cplx,
    pub a_prime: Cplx,
    pub b_prime: Cplx,
}

impl CoefficientTable {
    /// Table on the default circle with `DEFAULT_TABLE_NODES` nodes.
    pub fn new(problem: &TurningPointProblem, max_m: usize) -> Result<Self, LiouvilleError> {
        let contour = Contour::new(problem.z0, problem.default_radius()).with_nodes(DEFAULT_TABLE_NODES);
        Self::with_contour(problem, max_m, contour)
    }

    pub fn with_contour(problem: &TurningPointProblem, max_m: usize, contour: Contour) -> Result<Self, LiouvilleError> {
        let order = 2 * max_m + 1;
        if order > problem.f_hat_cap {
            return Err(LiouvilleError::DepthCap { requested: order, cap: problem.f_hat_cap });
        }
        if (contour.center - problem.z0).norm() > 0.0 {
            return Err(LiouvilleError::Spec("table circle must be centred at z0".into()));
        }
        let n = contour.nodes.next_power_of_two();
        let contour = Contour { nodes: n, ..contour };
        let points: Vec<Cplx> = (0..n).map(|k| contour.point(contour.phase + 2.0 * PI * k as f64 / n as f64)).collect();
        let f_hats: Vec<Vec<Cplx>> =
            points.iter().map(|&t| f_hat_series(problem, t, order).iter().map(Series::value).collect()).collect();
        let odd_samples: Vec<Vec<Cplx>> = f_hats.iter().map(|v| v.iter().step_by(2).copied().collect()).collect();
        let puiseux = PuiseuxTable::from_samples(problem, contour, &odd_samples);
        let sequences = ab_sequences(order.max(2));
        let mut nodes = Vec::with_capacity(n);
        for (k, &t) in points.iter().enumerate() {
            let frame = make_frame(problem, t)?;
            let e_hat = assemble_e_hat(&odd_samples[k], |s| puiseux.evaluate(problem, t, s), order);
            nodes.push(NodeCoefficients { t, frame, terms: ExponentTerms::new(e_hat, frame.xi, &sequences) });
        }
        Ok(Self { problem: problem.clone(), contour, max_m, sequences, puiseux, nodes })
    }

    fn check_order(&self, m: usize) -> Result<(), LiouvilleError> {
        if m > self.max_m {
            return Err(LiouvilleError::TableOrder { requested: m, built: self.max_m });
        }
        Ok(())
    }

    /// `Ê_{2s+1}(z)`: termwise inside the circle, else anchored on it and
    /// continued radially by quadrature.
    pub fn e_hat_odd(&self, z: Cplx, s: usize) -> Result<Cplx, LiouvilleError> {
        let problem = &self.problem;
        let h = z - problem.z0;
        if h.norm() <= self.contour.radius * (1.0 + 1e-12) {
            return Ok(self.puiseux.evaluate(problem, z, s));
        }
        let anchor = problem.z0 + h * (self.contour.radius / h.norm());
        let start = self.puiseux.evaluate(problem, anchor, s);
        let order = 2 * s + 1;
        let (integral, _, _) = integrate_real_interval(
            |tau| {
                let t = anchor + (z - anchor) * tau;
                let f_hat = f_hat_series(problem, t, order)[order - 1].value();
                f_hat * problem.f_sqrt(t) * (z - anchor)
            },
            0.0,
            1.0,
            ODD_PATH_TOL,
        )?;
        Ok(start + integral)
    }

    /// `Ê`, `𝓔`, `𝓔̃` through index `2m+1` at `z`.
    pub fn exponent_terms(&self, z: Cplx, m: usize) -> Result<(LiouvilleFrame, ExponentTerms), LiouvilleError> {
        self.check_order(m)?;
        check_exclusion(&self.problem, z)?;
        let order = 2 * m + 1;
        let frame = make_frame(&self.problem, z)?;
        let f_hat = f_hat_series(&self.problem, z, order);
        let odd_f: Vec<Cplx> = f_hat.iter().step_by(2).map(Series::value).collect();
        let mut odd_e = Vec::with_capacity(m + 1);
        for s in 0..=m {
            odd_e.push(self.e_hat_odd(z, s)?);
        }
        let e_hat = assemble_e_hat(&odd_f, |s| odd_e[s], order);
        Ok((frame, ExponentTerms::new(e_hat, frame.xi, &self.sequences)))
    }

    /// `(𝒜_{2m+2}, ℬ_{2m+2})` from the truncated expansions.
    pub fn coeff_ab_away(&self, z: Cplx, m: usize, u: Cplx) -> Result<(Cplx, Cplx), LiouvilleError> {
        let (frame, terms) = self.exponent_terms(z, m)?;
        Ok(ab_from_terms(&frame, &terms, u, m))
    }

    /// `(𝒜_{2m+2}, ℬ_{2m+2})` and their derivatives by Cauchy's formula on the table circle.
    pub fn coeff_ab_near(&self, z: Cplx, m: usize, u: Cplx) -> Result<CoefficientPair, LiouvilleError> {
        self.check_order(m)?;
        if !self.contour.contains(z) {
            return Err(LiouvilleError::OutsideContour { z, radius: self.contour.radius });
        }
        let n = self.nodes.len() as f64;
        let mut out = CoefficientPair {
            a: Cplx::new(0.0, 0.0),
            b: Cplx::new(0.0, 0.0),
            a_prime: Cplx::new(0.0, 0.0),
            b_prime: Cplx::new(0.0, 0.0),
        };
        for node in &self.nodes {
            let (a, b) = ab_from_terms(&node.frame, &node.terms, u, m);
            // (1/2πi)∮ F dt/(t-z) with dt = i (t - c) dθ
            let w = (node.t - self.contour.center) / n;
            let d = node.t - z;
            out.a += a * w / d;
            out.b += b * w / d;
            out.a_prime += a * w / (d * d);
            out.b_prime += b * w / (d * d);
        }
        Ok(out)
    }

    /// Trapezoidal `(1/2πi)∮ F(t) dt/(t - z)^{power}` over the table nodes.
    pub fn cauchy_sum<F: Fn(&NodeCoefficients) -> Cplx>(&self, integrand: F, z: Cplx, power: i32) -> Cplx {
        let n = self.nodes.len() as f64;
        self.nodes
            .iter()
            .map(|node| integrand(node) * (node.t - self.contour.center) / (n * (node.t - z).powi(power)))
            .sum()
    }

    /// `w_{m,j} = Ai_j(u^{2/3}ζ) 𝒜 + Ai_j'(u^{2/3}ζ) ℬ`, using the loop forms inside the circle.
    pub fn homogeneous_solution(&self, z: Cplx, j: Sector, m: usize, u: Cplx) -> Result<Cplx, LiouvilleError> {
        let frame = make_frame(&self.problem, z)?;
        let (a, b) = if self.contour.contains(z) {
            let pair = self.coeff_ab_near(z, m, u)?;
            (pair.a, pair.b)
        } else {
            self.coeff_ab_away(z, m, u)?
        };
        let airy = ai_rotated(u.powf(2.0 / 3.0) * frame.zeta, j);
        Ok(airy.value * a + airy.derivative * b)
    }
}

fn assemble_e_hat<F: Fn(usize) -> Cplx>(odd_f_hat: &[Cplx], odd_e: F, order: usize) -> Vec<Cplx> {
    let evens = even_from_odd_f_hat(odd_f_hat, order / 2);
    (1..=order).map(|s| if s % 2 == 1 { odd_e((s - 1) / 2) } else { evens[s / 2 - 1] }).collect()
}

/// `Ê_{2s+1}(z)` using a freshly built default table.
pub fn e_hat_odd(problem: &TurningPointProblem, z: Cplx, s: usize) -> Result<Cplx, LiouvilleError> {
    check_exclusion(problem, z)?;
    CoefficientTable::new(problem, s)?.e_hat_odd(z, s)
}

/// `(𝒜_{2m+2}, ℬ_{2m+2})` by expansion at `problem.u`.
pub fn coeff_ab_away(problem: &TurningPointProblem, z: Cplx, m: usize) -> Result<(Cplx, Cplx), LiouvilleError> {
    CoefficientTable::new(problem, m)?.coeff_ab_away(z, m, problem.u)
}

/// `(𝒜_{2m+2}, ℬ_{2m+2})` by Cauchy loop on `contour` at `problem.u`.
pub fn coeff_ab_near(
    problem: &TurningPointProblem,
    z: Cplx,
    m: usize,
    contour: Contour,
) -> Result<(Cplx, Cplx), LiouvilleError> {
    let pair = CoefficientTable::with_contour(problem, m, contour)?.coeff_ab_near(z, m, problem.u)?;
    Ok((pair.a, pair.b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::cauchy_derivative;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn airy(u: f64) -> TurningPointProblem {
        TurningPointProblem::airy(AiryForcing::Polynomial(vec![c(1.0, 0.0)]), c(u, 0.0))
    }

    fn zez_closure() -> TurningPointProblem {
        let f = AnalyticFn::closure(|z| z * z.exp(), 1.0);
        TurningPointProblem::new(
            "zez",
            f,
            AnalyticFn::zero(),
            AnalyticFn::constant(c(1.0, 0.0)),
            c(0.0, 0.0),
            c(10.0, 0.0),
        )
        .unwrap()
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn airy_frame_closed_form() {
        let p = airy(10.0);
        let fr = make_frame(&p, c(4.0, 0.0)).unwrap();
        assert!((fr.xi - c(16.0 / 3.0, 0.0)).norm() < 1e-13);
        assert!((fr.zeta - c(4.0, 0.0)).norm() < 1e-13);
        assert!((fr.zeta_over_f_quarter - 1.0).norm() < 1e-14);
        let z = c(-2.0, 1.5);
        let fr = make_frame(&p, z).unwrap();
        assert!((fr.xi - (2.0 / 3.0) * z.powf(1.5)).norm() < 1e-13);
        assert!((fr.zeta - z).norm() < 1e-13);
        let origin = make_frame(&p, c(0.0, 0.0)).unwrap();
        assert_eq!(origin.xi, c(0.0, 0.0));
    }

    #[test]
    fn z_exp_z_xi() {
        // ∫₀¹ (t e^t)^{1/2} dt
        let p = TurningPointProblem::z_exp_z(AnalyticFn::constant(c(1.0, 0.0)), c(10.0, 0.0));
        let fr = make_frame(&p, c(1.0, 0.0)).unwrap();
        assert!((fr.xi - c(0.907_527_217_579_801, 0.0)).norm() < 1e-12, "{}", fr.xi);
        assert!((fr.zeta.powf(1.5) * (2.0 / 3.0) - fr.xi).norm() < 1e-13);
        assert!((fr.f_sqrt * fr.f_sqrt - fr.f).norm() < 1e-13);
    }

    #[test]
    fn phi_airy_values() {
        let p = airy(10.0);
        assert!((phi(&p, c(2.0, 0.0)).unwrap() + 5.0 / 128.0).norm() < 1e-15);
        let with_g = TurningPointProblem::new(
            "g1",
            AnalyticFn::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            AnalyticFn::constant(c(1.0, 0.0)),
            AnalyticFn::zero(),
            c(0.0, 0.0),
            c(10.0, 0.0),
        )
        .unwrap();
        assert!((phi(&with_g, c(2.0, 0.0)).unwrap() - (0.5 - 5.0 / 128.0)).norm() < 1e-15);
        assert!(phi(&p, c(1e-4, 0.0)).is_err());
    }

    #[test]
    fn phi_by_fourier_route_matches_symbolic() {
        let z = c(1.0, 0.0);
        let e = z.exp();
        let (f, f1, f2) = (z * e, (1.0 + z) * e, (2.0 + z) * e);
        let exact = (4.0 * f * f2 - 5.0 * f1 * f1) / (16.0 * f * f * f);
        let closure = phi(&zez_closure(), z).unwrap();
        let symbolic = phi(&TurningPointProblem::z_exp_z(AnalyticFn::zero(), c(10.0, 0.0)), z).unwrap();
        assert!((closure - exact).norm() < 1e-10);
        assert!((symbolic - exact).norm() < 1e-14);
    }

    #[test]
    fn airy_f_hat_closed_forms() {
        let p = airy(10.0);
        let z = c(1.5, 0.7);
        let v = f_hat_coefficients(&p, z, 3).unwrap();
        assert!((v[0] + 5.0 / (32.0 * z.powi(3))).norm() < 1e-14);
        assert!((v[1] + 15.0 / (64.0 * z.powf(4.5))).norm() < 1e-14);
        assert!((v[2] + 1105.0 / (2048.0 * z.powi(6))).norm() < 1e-13);
        assert!(f_hat_coefficients(&p, z, 7).is_err());
    }

    #[test]
    fn f_hat_two_by_cauchy_matches_closed_form() {
        let p = airy(10.0);
        let z = c(2.0, -1.0);
        let contour = Contour::new(z, 0.5);
        let dphi = cauchy_derivative(|t| -5.0 / (16.0 * t.powi(3)), z, &contour, 1).unwrap();
        let via_cauchy = -0.25 * dphi / z.sqrt();
        let v = f_hat_coefficients(&p, z, 2).unwrap();
        assert!((v[1] - via_cauchy).norm() < 1e-9);
    }

    #[test]
    fn even_coefficients_from_log_identity() {
        let p = airy(10.0);
        let z = c(1.2, 0.4);
        let f = f_hat_coefficients(&p, z, 3).unwrap();
        assert!((e_hat_even(&p, z, 1).unwrap() + 0.5 * f[0]).norm() < 1e-15);
        assert!((e_hat_even(&p, z, 1).unwrap() - 5.0 / (64.0 * z.powi(3))).norm() < 1e-14);
        let e4 = e_hat_even(&p, z, 2).unwrap();
        assert!((e4 - (-0.5 * f[2] + 0.25 * f[0] * f[0])).norm() < 1e-15);
    }

    #[test]
    fn sequences_are_exact() {
        let seq = ab_sequences(5);
        assert_eq!(seq.a[0], rational(5, 72));
        assert_eq!(seq.a[1], rational(5, 72));
        assert_eq!(seq.a_tilde[1], rational(-7, 72));
        assert_eq!(seq.a[2], rational(1105, 10368));
        assert_eq!(seq.a_tilde[2], rational(-1463, 10368));
        assert_eq!(seq.len(), 5);
    }

    #[test]
    fn airy_odd_coefficients() {
        let p = airy(10.0);
        let table = CoefficientTable::new(&p, 1).unwrap();
        for z in [c(0.6, 0.2), c(3.0, 0.0), c(-2.0, 2.0)] {
            let (frame, terms) = table.exponent_terms(z, 1).unwrap();
            let xi = frame.xi;
            assert!((terms.e_hat[0] - 5.0 / (72.0 * xi)).norm() < 1e-11 * (1.0 / xi).norm(), "z = {z}");
            assert!(terms.cal_e[0].norm() < 1e-11 * (1.0 / xi).norm());
            assert!((terms.cal_e_tilde[0] - 1.0 / (6.0 * xi)).norm() < 1e-11 * (1.0 / xi).norm());
            // Ê₃ = 1105/(9216 z^{9/2}), so 𝓔₃ = 0.
            assert!(terms.cal_e[2].norm() < 1e-10 * terms.e_hat[2].norm());
        }
    }

    #[test]
    fn sequence_identity_telescopes() {
        let p = TurningPointProblem::z_exp_z(AnalyticFn::constant(c(1.0, 0.0)), c(10.0, 0.0));
        let table = CoefficientTable::new(&p, 1).unwrap();
        let (frame, terms) = table.exponent_terms(c(0.7, 0.3), 1).unwrap();
        for s in 1..=3 {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let expected =
                sign * (table.sequences.a(s) - table.sequences.a_tilde(s)) / (s as f64 * frame.xi.powi(s as i32));
            let diff = terms.cal_e[s - 1] - terms.cal_e_tilde[s - 1];
            assert!((diff - expected).norm() < 1e-14 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn airy_coefficient_functions() {
        for &u in &[10.0, 20.0, 40.0] {
            let p = airy(u);
            let table = CoefficientTable::new(&p, 1).unwrap();
            let z = c(2.0, 0.0);
            let (a, b) = table.coeff_ab_away(z, 0, c(u, 0.0)).unwrap();
            let xi = (2.0 / 3.0) * 2f64.powf(1.5);
            assert!((a - (1.0 / (6.0 * u * xi)).cosh()).norm() < 1e-12);
            assert!(b.norm() < 1e-12);
        }
        // 𝒜 - 1 decays like u^{-2} at m = 0.
        let dev: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&u| {
                let p = airy(u);
                let t = CoefficientTable::new(&p, 0).unwrap();
                (t.coeff_ab_away(c(2.0, 0.0), 0, c(u, 0.0)).unwrap().0 - 1.0).norm()
            })
            .collect();
        let slope = (dev[2] / dev[0]).ln() / 4f64.ln();
        assert!((slope + 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn near_matches_away_inside_circle() {
        let u = c(20.0, 0.0);
        let p = airy(20.0);
        let table = CoefficientTable::new(&p, 1).unwrap();
        let z = c(0.8, 0.0);
        for m in 0..=1 {
            let near = table.coeff_ab_near(z, m, u).unwrap();
            let (a, _) = table.coeff_ab_away(z, m, u).unwrap();
            assert!((near.a - a).norm() < 1e-3 * 20f64.powi(-2 * m as i32), "m = {m}");
            assert!(near.b.norm() < 1e-10);
        }
        let near = table.coeff_ab_near(c(0.05, 0.0), 0, u).unwrap();
        assert!((near.a - 1.0).norm() < 1e-2);
    }

    #[test]
    fn homogeneous_three_term_identity() {
        let p = TurningPointProblem::z_exp_z(AnalyticFn::constant(c(1.0, 0.0)), c(15.0, 0.0));
        let table = CoefficientTable::new(&p, 1).unwrap();
        let u = c(15.0, 0.0);
        for z in [c(0.3, 0.1), c(1.5, 0.2)] {
            let w0 = table.homogeneous_solution(z, Sector::Zero, 1, u).unwrap();
            let w1 = table.homogeneous_solution(z, Sector::Plus, 1, u).unwrap();
            let wm = table.homogeneous_solution(z, Sector::Minus, 1, u).unwrap();
            let sum = w0 + Cplx::from_polar(1.0, -2.0 * PI / 3.0) * w1 + Cplx::from_polar(1.0, 2.0 * PI / 3.0) * wm;
            let scale = w0.norm() + w1.norm() + wm.norm();
            assert!(sum.norm() < 1e-10 * scale, "z = {z}");
        }
    }

    #[test]
    fn homogeneous_residual_decays() {
        // w'' - u² f w for the z e^z problem, relative to u² |f w|.
        let residual = |u: f64| {
            let p = TurningPointProblem::z_exp_z(AnalyticFn::zero(), c(u, 0.0));
            let table = CoefficientTable::new(&p, 1).unwrap();
            let z = c(1.5, 0.0);
            let w = |x: Cplx| table.homogeneous_solution(x, Sector::Zero, 0, c(u, 0.0)).unwrap();
            let d2 = |h: f64| (w(z + h) - 2.0 * w(z) + w(z - h)) / (h * h);
            let second = (4.0 * d2(5e-4) - d2(1e-3)) / 3.0;
            let f = z * z.exp();
            (second - u * u * f * w(z)).norm() / (u * u * (f * w(z)).norm())
        };
        let r10 = residual(10.0);
        let r20 = residual(20.0);
        assert!(r20 < r10 && r10 < 1e-2, "{r10} {r20}");
    }

    #[test]
    fn zeta_is_analytic_at_turning_point() {
        let p = TurningPointProblem::z_exp_z(AnalyticFn::zero(), c(10.0, 0.0));
        let contour = Contour::new(c(0.0, 0.0), 0.1);
        let modes = circle_fourier(|t| make_frame(&p, t).unwrap().zeta, &contour, 64);
        let scale = modes[1].norm();
        for (k, m) in modes.iter().enumerate().skip(32) {
            assert!(m.norm() < 1e-8 * scale, "mode {k}: {m}");
        }
    }

    #[test]
    fn problem_json_round_trip() {
        let text = r#"{"builtin": "airy", "p": {"polynomial": [[0,0],[2,0],[0,0],[1,0]]}, "u": [10, 0]}"#;
        let p = TurningPointProblem::from_json(text).unwrap();
        assert_eq!(p.airy, Some(AiryForcing::Polynomial(vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])));
        let custom = r#"{"f": {"exp_poly": {"alpha": [1,0], "poly": [[0,0],[1,0]]}}, "p": {"exponential": [1,0]}, "z0": [0,0], "u": [5,0]}"#;
        let q = TurningPointProblem::from_json(custom).unwrap();
        assert!((q.f.value(c(1.0, 0.0)) - c(1f64.exp(), 0.0)).norm() < 1e-15);
        let bad = r#"{"f": {"polynomial": [[1,0],[1,0]]}, "p": {"polynomial": []}, "z0": [0,0], "u": [5,0]}"#;
        assert!(matches!(TurningPointProblem::from_json(bad), Err(LiouvilleError::NotTurningPoint(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn frame_satisfies_definitions(x in -3.0..3.0f64, y in 0.05..2.0f64) {
            let p = TurningPointProblem::z_exp_z(AnalyticFn::zero(), c(10.0, 0.0));
            let z = c(x * 0.5, y);
            let fr = make_frame(&p, z).unwrap();
            prop_assert!(((2.0 / 3.0) * fr.zeta.powf(1.5) - fr.xi).norm() < 1e-11 * fr.xi.norm().max(1.0));
            prop_assert!((fr.f_sqrt * fr.f_sqrt - fr.f).norm() < 1e-12 * fr.f.norm().max(1.0));
            let q = fr.zeta_over_f_quarter.powi(4) * fr.f;
            prop_assert!((q - fr.zeta).norm() < 1e-11 * fr.zeta.norm().max(1e-3));
            // dξ/dz = f^{1/2}
            let h = 1e-5;
            let d = (make_frame(&p, z + h).unwrap().xi - make_frame(&p, z - h).unwrap().xi) / (2.0 * h);
            prop_assert!((d - fr.f_sqrt).norm() < 1e-7 * fr.f_sqrt.norm().max(1.0));
        }
    }
}
