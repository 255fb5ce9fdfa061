//! Slowly varying particular solutions away from the turning point.
//!
//! `w = u^{-2} Σ_{s<n} Ĝ_s(z)/u^{2s} + ε̂_n` with `Ĝ_0 = -p/f` and
//! `Ĝ_{s+1} = (Ĝ_s'' - g Ĝ_s)/f`, together with computable bounds on `ε̂_n`
//! and `∂ε̂_n/∂z` over progressive paths.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::liouville::{make_frame, phi, AiryForcing, LiouvilleError, TurningPointProblem};
use crate::quadrature::{abs_integral, sup_along_path, ComplexPath, Cplx, Magnitude, PathSegment, QuadError};
use crate::scorer::{SectorPair, DEFAULT_DELTA};
use crate::series::Series;

/// Largest `n` accepted for the coefficient recursion.
pub const G_DEPTH_CAP: usize = 12;
/// Relative tolerance for path integrals inside bounds.
pub const BOUND_TOL: f64 = 1e-8;
/// Samples per path segment for monotonicity witnesses.
pub const WITNESS_SAMPLES: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParticularError {
    #[error("z = {z} is outside the window of pair {pair}; use pair {recommended} with a connection formula")]
    OutsideWindow { z: Cplx, pair: SectorPair, recommended: SectorPair },
    #[error("z = {z} lies within the angular margin of a sector boundary for pair {pair}; use pair {recommended} with a connection formula")]
    OnBoundary { z: Cplx, pair: SectorPair, recommended: SectorPair },
    #[error("z = {0} is the turning point")]
    AtTurningPoint(Cplx),
    #[error("coefficient depth {requested} exceeds the cap {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error("path is tagged {found} but the bound needs {expected}")]
    TagMismatch { expected: String, found: String },
    #[error("closed-form Airy data required")]
    NotAiry,
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// `e^{αz} Σ_k c_k z^k` with finitely many integer powers.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpLaurent {
    pub alpha: Cplx,
    pub terms: BTreeMap<i32, Cplx>,
}

impl ExpLaurent {
    pub fn new(alpha: Cplx, terms: BTreeMap<i32, Cplx>) -> Self {
        let mut out = Self { alpha, terms };
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != Cplx::new(0.0, 0.0));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_k c_k z^k`, without the exponential.
    pub fn laurent_value(&self, z: Cplx) -> Cplx {
        self.terms.iter().map(|(&k, &c)| c * z.powi(k)).sum()
    }

    pub fn value(&self, z: Cplx) -> Cplx {
        let l = self.laurent_value(z);
        if self.alpha == Cplx::new(0.0, 0.0) {
            l
        } else {
            (self.alpha * z).exp() * l
        }
    }

    /// Derivative of the Laurent factor alone.
    pub fn laurent_derivative(&self) -> Self {
        let terms = self.terms.iter().filter(|(&k, _)| k != 0).map(|(&k, &c)| (k - 1, c * f64::from(k))).collect();
        Self::new(self.alpha, terms)
    }

    pub fn derivative(&self) -> Self {
        let mut terms = self.laurent_derivative().terms;
        if self.alpha != Cplx::new(0.0, 0.0) {
            for (&k, &c) in &self.terms {
                *terms.entry(k).or_insert(Cplx::new(0.0, 0.0)) += self.alpha * c;
            }
        }
        Self::new(self.alpha, terms)
    }

    /// Multiplication by `z^power`.
    pub fn shift(&self, power: i32) -> Self {
        Self::new(self.alpha, self.terms.iter().map(|(&k, &c)| (k + power, c)).collect())
    }

    pub fn scale(&self, factor: Cplx) -> Self {
        Self::new(self.alpha, self.terms.iter().map(|(&k, &c)| (k, c * factor)).collect())
    }

    /// Coefficient of `z^m` in the Laurent expansion at the origin.
    pub fn coefficient(&self, m: i32) -> Cplx {
        let mut acc = Cplx::new(0.0, 0.0);
        for (&k, &c) in &self.terms {
            if k > m {
                break;
            }
            let d = (m - k) as u32;
            let mut term = c;
            for j in 1..=d {
                term *= self.alpha / f64::from(j);
            }
            acc += term;
        }
        acc
    }

    /// Value of the analytic part at `z` (all negative powers removed).
    pub fn regular_part(&self, z: Cplx) -> Cplx {
        self.regular_series(z, false)
    }

    pub fn regular_part_derivative(&self, z: Cplx) -> Cplx {
        self.regular_series(z, true)
    }

    fn regular_series(&self, z: Cplx, differentiate: bool) -> Cplx {
        if self.alpha == Cplx::new(0.0, 0.0) {
            return self
                .terms
                .range(0..)
                .map(|(&k, &c)| {
                    if differentiate {
                        if k == 0 {
                            Cplx::new(0.0, 0.0)
                        } else {
                            c * f64::from(k) * z.powi(k - 1)
                        }
                    } else {
                        c * z.powi(k)
                    }
                })
                .sum();
        }
        let top = self.terms.keys().next_back().copied().unwrap_or(0).max(0);
        let mut acc = Cplx::new(0.0, 0.0);
        let mut quiet = 0;
        let start = i32::from(differentiate);
        for m in start..(top + 400) {
            let c = self.coefficient(m);
            let term = if differentiate { c * f64::from(m) * z.powi(m - 1) } else { c * z.powi(m) };
            acc += term;
            if m > top && term.norm() <= 1e-18 * acc.norm().max(f64::MIN_POSITIVE) {
                quiet += 1;
                if quiet >= 4 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        acc
    }
}

/// `Ĝ_0 … Ĝ_n` for `f = z`, `g = 0` with polynomial or exponential forcing.
pub fn airy_g_exact(forcing: &AiryForcing, n: usize) -> Vec<ExpLaurent> {
    let g0 = match forcing {
        AiryForcing::Polynomial(coeffs) => {
            ExpLaurent::new(Cplx::new(0.0, 0.0), coeffs.iter().enumerate().map(|(r, &c)| (r as i32 - 1, -c)).collect())
        }
        AiryForcing::Exponential(alpha) => {
            ExpLaurent::new(*alpha, std::iter::once((-1, Cplx::new(-1.0, 0.0))).collect())
        }
    };
    let mut out = vec![g0];
    for s in 0..n {
        let next = out[s].derivative().derivative().shift(-1);
        out.push(next);
    }
    out
}

/// Series of `Ĝ_0 … Ĝ_n` from local series of `f`, `g`, `p`; `Ĝ_s` keeps
/// `len - 2s` terms.
pub fn g_series(f: &Series, g: &Series, p: &Series, n: usize) -> Vec<Series> {
    let f_inv = f.recip();
    let mut out = vec![-&(p * &f_inv)];
    for s in 0..n {
        let prev = &out[s];
        let second = prev.derivative().derivative();
        let next = &(&second - &(g * prev)) * &f_inv;
        out.push(next);
    }
    out
}

/// How the coefficients were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    /// Closed-form exponential-Laurent representation.
    ClosedForm,
    /// Truncated Taylor series of `f`, `g`, `p` at the point.
    TaylorSeries,
}

/// `Ĝ_s`, `Ĝ_s'` and `Ĝ_s''` at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GCoefficients {
    pub at: Cplx,
    pub values: Vec<Cplx>,
    pub derivatives: Vec<Cplx>,
    pub second_derivatives: Vec<Cplx>,
    pub method: DerivativeMethod,
}

/// Source of coefficient values along paths.
#[derive(Clone, Debug)]
pub enum CoefficientSource {
    ClosedForm(Vec<ExpLaurent>),
    Series(Box<TurningPointProblem>),
}

impl CoefficientSource {
    pub fn new(problem: &TurningPointProblem, n: usize) -> Result<Self, ParticularError> {
        if n > G_DEPTH_CAP {
            return Err(ParticularError::DepthCap { requested: n, cap: G_DEPTH_CAP });
        }
        Ok(match &problem.airy {
            Some(forcing) => Self::ClosedForm(airy_g_exact(forcing, n)),
            None => Self::Series(Box::new(problem.clone())),
        })
    }

    pub fn method(&self) -> DerivativeMethod {
        match self {
            Self::ClosedForm(_) => DerivativeMethod::ClosedForm,
            Self::Series(_) => DerivativeMethod::TaylorSeries,
        }
    }

    /// `(Ĝ_s, Ĝ_s', Ĝ_s'')` at `t`.
    pub fn triple(&self, t: Cplx, s: usize) -> [Cplx; 3] {
        match self {
            Self::ClosedForm(g) => {
                let d1 = g[s].derivative();
                [g[s].value(t), d1.value(t), d1.derivative().value(t)]
            }
            Self::Series(problem) => {
                let len = 2 * s + 3;
                let series =
                    g_series(&problem.f.taylor(t, len), &problem.g.taylor(t, len), &problem.p.taylor(t, len), s);
                let top = &series[s];
                [top.coeffs[0], top.coeffs[1], 2.0 * top.coeffs[2]]
            }
        }
    }

    /// Triple for `e^{-αt} Ĝ_s` (closed form only).
    fn scaled_triple(&self, t: Cplx, s: usize) -> Option<[Cplx; 3]> {
        match self {
            Self::ClosedForm(g) => {
                let d1 = g[s].laurent_derivative();
                Some([g[s].laurent_value(t), d1.laurent_value(t), d1.laurent_derivative().laurent_value(t)])
            }
            Self::Series(_) => None,
        }
    }
}

/// `Ĝ_0 … Ĝ_n` and their first two derivatives at `z`.
pub fn g_coefficients(problem: &TurningPointProblem, z: Cplx, n: usize) -> Result<GCoefficients, ParticularError> {
    if (z - problem.z0).norm() == 0.0 {
        return Err(ParticularError::AtTurningPoint(z));
    }
    let source = CoefficientSource::new(problem, n)?;
    let mut out = GCoefficients {
        at: z,
        values: Vec::with_capacity(n + 1),
        derivatives: Vec::with_capacity(n + 1),
        second_derivatives: Vec::with_capacity(n + 1),
        method: source.method(),
    };
    match &source {
        CoefficientSource::ClosedForm(_) => {
            for s in 0..=n {
                let [v, d1, d2] = source.triple(z, s);
                out.values.push(v);
                out.derivatives.push(d1);
                out.second_derivatives.push(d2);
            }
        }
        CoefficientSource::Series(problem) => {
            let len = 2 * n + 3;
            let series = g_series(&problem.f.taylor(z, len), &problem.g.taylor(z, len), &problem.p.taylor(z, len), n);
            for s in &series {
                out.values.push(s.coeffs[0]);
                out.derivatives.push(s.coeffs[1]);
                out.second_derivatives.push(2.0 * s.coeffs[2]);
            }
        }
    }
    Ok(out)
}

/// `u^{-2} Σ_{s<n} c_s / u^{2s}`.
pub fn partial_sum(coeffs: &[Cplx], u: Cplx, n: usize) -> Cplx {
    let u2 = u * u;
    let mut scale = 1.0 / u2;
    let mut acc = Cplx::new(0.0, 0.0);
    for c in coeffs.iter().take(n) {
        acc += c * scale;
        scale /= u2;
    }
    acc
}

/// Usage window of each pair for the Airy problem.
pub fn recommended_pair(z: Cplx) -> SectorPair {
    let a = z.arg();
    if (0.0..=2.0 * PI / 3.0).contains(&a) {
        SectorPair::ZeroPlus
    } else if (-2.0 * PI / 3.0..0.0).contains(&a) {
        SectorPair::MinusZero
    } else {
        SectorPair::MinusPlus
    }
}

/// Pre-image of `z` under the map taking the `(0,1)` configuration to `pair`.
fn to_reference(z: Cplx, pair: SectorPair) -> Cplx {
    match pair {
        SectorPair::ZeroPlus => z,
        SectorPair::MinusZero => z.conj(),
        SectorPair::MinusPlus => z * Cplx::from_polar(1.0, -2.0 * PI / 3.0),
    }
}

fn from_reference(t: Cplx, pair: SectorPair) -> Cplx {
    match pair {
        SectorPair::ZeroPlus => t,
        SectorPair::MinusZero => t.conj(),
        SectorPair::MinusPlus => t * Cplx::from_polar(1.0, 2.0 * PI / 3.0),
    }
}

/// `z^{1/2}` on the branch continuous over the domain of `pair`.
pub fn airy_sqrt(z: Cplx, pair: SectorPair) -> Cplx {
    let r = to_reference(z, pair).sqrt();
    match pair {
        SectorPair::ZeroPlus => r,
        SectorPair::MinusZero => r.conj(),
        SectorPair::MinusPlus => r * Cplx::from_polar(1.0, PI / 3.0),
    }
}

/// `ξ = ⅔ z^{3/2}` on the branch of `pair`.
pub fn airy_xi(z: Cplx, pair: SectorPair) -> Cplx {
    (2.0 / 3.0) * z * airy_sqrt(z, pair)
}

/// Checks `z` against `Z_δ` of `pair` for the Airy problem.
pub fn check_airy_window(z: Cplx, pair: SectorPair, delta: f64) -> Result<(), ParticularError> {
    if z.norm() < delta {
        return Err(ParticularError::AtTurningPoint(z));
    }
    let a = to_reference(z, pair).arg();
    let recommended = recommended_pair(z);
    if !(-PI / 3.0..=2.0 * PI / 3.0).contains(&a) {
        return Err(ParticularError::OutsideWindow { z, pair, recommended });
    }
    if a < -PI / 3.0 + delta || a > 2.0 * PI / 3.0 - delta {
        return Err(ParticularError::OnBoundary { z, pair, recommended });
    }
    Ok(())
}

/// Partial sum `u^{-2} Σ_{s<n} Ĝ_s(z)/u^{2s}`.
pub fn w_slowly_varying(
    problem: &TurningPointProblem,
    z: Cplx,
    pair: SectorPair,
    n: usize,
) -> Result<Cplx, ParticularError> {
    if problem.airy.is_some() {
        check_airy_window(z, pair, DEFAULT_DELTA)?;
    }
    let g = g_coefficients(problem, z, n)?;
    Ok(partial_sum(&g.values, problem.u, n))
}

/// Partial sum of the differentiated expansion.
pub fn w_slowly_varying_derivative(
    problem: &TurningPointProblem,
    z: Cplx,
    pair: SectorPair,
    n: usize,
) -> Result<Cplx, ParticularError> {
    if problem.airy.is_some() {
        check_airy_window(z, pair, DEFAULT_DELTA)?;
    }
    let g = g_coefficients(problem, z, n)?;
    Ok(partial_sum(&g.derivatives, problem.u, n))
}

/// Functional whose real part must be monotone along a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneFunctional {
    /// `Re(uξ)`.
    UXi,
    /// `Re((u + c)ξ)` and `Re((u - c)ξ)`.
    Shifted { c: f64 },
    /// `Re(uξ + (σ+1) ln ξ)` and `Re(uξ - (σ+1) ln ξ)`.
    Logarithmic { sigma: f64 },
    /// `Re(uξ + αz)`.
    Forcing { alpha: Cplx },
}

impl fmt::Display for MonotoneFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UXi => write!(f, "Re(u xi)"),
            Self::Shifted { c } => write!(f, "Re((u +- {c}) xi)"),
            Self::Logarithmic { sigma } => write!(f, "Re(u xi +- {} ln xi)", sigma + 1.0),
            Self::Forcing { alpha } => write!(f, "Re(u xi + {alpha} z)"),
        }
    }
}

/// Evaluator of `ξ` along a path.
pub type XiFn = Arc<dyn Fn(Cplx) -> Cplx + Send + Sync>;

/// A path through `z` joining the two reference points of a pair, with sampled
/// evidence of the monotonicity it needs.
#[derive(Clone)]
pub struct ProgressivePath {
    pub path: ComplexPath,
    pub pair: SectorPair,
    pub query: Cplx,
    pub tag: MonotoneFunctional,
    /// Functional values at the witness samples, one row per functional.
    pub witness: Vec<Vec<f64>>,
    pub verified: bool,
    pub description: String,
    xi: XiFn,
}

impl fmt::Debug for ProgressivePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProgressivePath")
            .field("path", &self.path)
            .field("pair", &self.pair)
            .field("query", &self.query)
            .field("tag", &self.tag)
            .field("verified", &self.verified)
            .finish()
    }
}

fn is_monotone(values: &[f64]) -> bool {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;
    let up = values.windows(2).all(|w| w[1] >= w[0] - slack);
    let down = values.windows(2).all(|w| w[1] <= w[0] + slack);
    up || down
}

impl ProgressivePath {
    /// Wraps a caller-supplied path; `xi` gives `ξ(t)` on the intended branch.
    pub fn new(path: ComplexPath, pair: SectorPair, query: Cplx, xi: XiFn, u: Cplx, tag: MonotoneFunctional) -> Self {
        let mut out =
            Self { path, pair, query, tag, witness: Vec::new(), verified: false, description: String::new(), xi };
        out.description = format!("{:?}", out.path.segments);
        out.retag(tag, u);
        out
    }

    /// Recomputes the witness for another functional.
    pub fn retag(&mut self, tag: MonotoneFunctional, u: Cplx) {
        self.tag = tag;
        let reach = 60.0 * (1.0 + self.query.norm());
        let samples = self.path.sample_points(WITNESS_SAMPLES, reach);
        let rows: Vec<Vec<f64>> = match tag {
            MonotoneFunctional::UXi => vec![samples.iter().map(|&t| (u * (self.xi)(t)).re).collect()],
            MonotoneFunctional::Shifted { c } => [1.0, -1.0]
                .iter()
                .map(|sgn| samples.iter().map(|&t| ((u + sgn * c) * (self.xi)(t)).re).collect())
                .collect(),
            MonotoneFunctional::Logarithmic { sigma } => [1.0, -1.0]
                .iter()
                .map(|sgn| {
                    samples
                        .iter()
                        .map(|&t| {
                            let x = (self.xi)(t);
                            (u * x).re + sgn * (sigma + 1.0) * x.norm().ln()
                        })
                        .collect()
                })
                .collect(),
            MonotoneFunctional::Forcing { alpha } => {
                vec![samples.iter().map(|&t| (u * (self.xi)(t) + alpha * t).re).collect()]
            }
        };
        self.verified = rows.iter().all(|r| is_monotone(r))
            && samples.iter().any(|t| (t - self.query).norm() < 1e-9 * (1.0 + t.norm()));
        self.witness = rows;
    }

    pub fn xi(&self, t: Cplx) -> Cplx {
        (self.xi)(t)
    }

    /// Smallest `|t|` over the finite part of the path.
    pub fn min_modulus(&self) -> f64 {
        self.path
            .sample_points(WITNESS_SAMPLES, 10.0 * (1.0 + self.query.norm()))
            .iter()
            .map(|t| t.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn map_segment(seg: &PathSegment, pair: SectorPair) -> PathSegment {
    let conj = matches!(pair, SectorPair::MinusZero);
    let shift = if matches!(pair, SectorPair::MinusPlus) { 2.0 * PI / 3.0 } else { 0.0 };
    let angle = |a: f64| if conj { -a } else { a + shift };
    match seg {
        PathSegment::Line { from, to } => PathSegment::line(from_reference(*from, pair), from_reference(*to, pair)),
        PathSegment::Arc { center, radius, start_angle, end_angle } => {
            PathSegment::arc(from_reference(*center, pair), *radius, angle(*start_angle), angle(*end_angle))
        }
        PathSegment::RayIn { end, angle: a } => PathSegment::ray_in(from_reference(*end, pair), angle(*a)),
        PathSegment::RayOut { start, angle: a } => PathSegment::ray_out(from_reference(*start, pair), angle(*a)),
        PathSegment::Curve { curve, t_start, t_end } => {
            let inner = curve.clone();
            let mapped = move |s: f64| {
                let (p, dp) = inner(s);
                (from_reference(p, pair), from_reference(dp, pair))
            };
            PathSegment::curve(Arc::new(mapped), *t_start, *t_end)
        }
    }
}

/// Paths for `w'' - u² z w = p` through `z`: a ray from `∞e^{2πi/3}`, an arc
/// keeping `|t| ≥ |z|` (or a level curve of `Re t^{3/2}` when `arg z < 0`),
/// and a horizontal line to `+∞`; other pairs by conjugation or rotation.
pub fn build_airy_path(z: Cplx, pair: SectorPair, u: Cplx) -> Result<ProgressivePath, ParticularError> {
    check_airy_window(z, pair, DEFAULT_DELTA)?;
    let w = to_reference(z, pair);
    let top = 2.0 * PI / 3.0;
    let mut segments = Vec::new();
    let theta = w.arg();
    if theta >= 0.0 {
        let r = w.norm();
        segments.push(PathSegment::ray_in(Cplx::from_polar(r, top), top));
        if theta < top {
            segments.push(PathSegment::arc(Cplx::new(0.0, 0.0), r, top, theta));
        }
    } else {
        let level = w.powf(1.5);
        let a = level.re.powf(2.0 / 3.0);
        segments.push(PathSegment::ray_in(Cplx::from_polar(a, top), top));
        segments.push(PathSegment::arc(Cplx::new(0.0, 0.0), a, top, 0.0));
        let c = level.re;
        let curve = move |s: f64| {
            let q = Cplx::new(c, s);
            let t = q.powf(2.0 / 3.0);
            (t, (2.0 / 3.0) * Cplx::new(0.0, 1.0) * t / q)
        };
        segments.push(PathSegment::curve(Arc::new(curve), 0.0, level.im));
    }
    segments.push(PathSegment::ray_out(w, 0.0));
    let mapped: Vec<PathSegment> = segments.iter().map(|s| map_segment(s, pair)).collect();
    let path = ComplexPath::new(mapped);
    let xi: XiFn = Arc::new(move |t| airy_xi(t, pair));
    let mut out = ProgressivePath::new(path, pair, z, xi, u, MonotoneFunctional::UXi);
    out.description = format!(
        "{} path for pair {pair} through {z}",
        if theta >= 0.0 { "ray-arc-line" } else { "ray-arc-level-line" }
    );
    Ok(out)
}

/// Which bound produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Plain,
    Derivative,
    Exponential { c: f64 },
    AiryExponential { alpha: Cplx },
    Algebraic { sigma: f64 },
}

/// Additive contributions and intermediate quantities of a bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundComponents {
    /// Term from the coefficient at the query point.
    pub leading: f64,
    /// Term from the variation integral.
    pub variation: Magnitude,
    /// Term carrying `L_n` and the `ψ` mass.
    pub tail: Magnitude,
    /// Contribution of `|ε|` itself to the derivative bound.
    pub carried: Magnitude,
    /// `∫ |ψ dt|` along the path.
    pub psi_mass: Magnitude,
    /// `1 - ψ mass / (2|u|)`.
    pub denominator: f64,
}

/// A computed bound together with its ingredients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: Magnitude,
    pub components: BoundComponents,
    /// `|u|` satisfies the size conditions.
    pub valid: bool,
    pub path_verified: bool,
    pub path: String,
}

impl BoundReport {
    /// The bound when finite and valid.
    pub fn bound(&self) -> Option<f64> {
        if self.valid {
            self.value.value()
        } else {
            None
        }
    }

    pub fn is_available(&self) -> bool {
        self.bound().is_some()
    }
}

fn mag(x: f64) -> Magnitude {
    if x.is_finite() {
        Magnitude::Finite(x)
    } else {
        Magnitude::Unbounded
    }
}

fn mul(m: Magnitude, factor: f64) -> Magnitude {
    match m {
        Magnitude::Finite(v) => mag(v * factor),
        Magnitude::Unbounded => Magnitude::Unbounded,
    }
}

/// `f`, `f'`, `f''` and `|f^{1/2} Φ|` at a point.
struct LocalData {
    f: Cplx,
    f1: Cplx,
    f2: Cplx,
    psi_weight: f64,
}

fn local_data(problem: &TurningPointProblem, t: Cplx) -> Result<LocalData, ParticularError> {
    if problem.airy.is_some() {
        return Ok(LocalData {
            f: t,
            f1: Cplx::new(1.0, 0.0),
            f2: Cplx::new(0.0, 0.0),
            psi_weight: 5.0 / 16.0 * t.norm().powf(-2.5),
        });
    }
    let s = problem.f.taylor(t, 3);
    let f = s.coeffs[0];
    let ph = phi(problem, t)?;
    Ok(LocalData { f, f1: s.coeffs[1], f2: 2.0 * s.coeffs[2], psi_weight: (ph * f.sqrt()).norm() })
}

/// Modulus of `ξ(t)` for weights: closed form for Airy, quadrature otherwise.
fn xi_at(problem: &TurningPointProblem, path: &ProgressivePath, t: Cplx) -> Result<Cplx, ParticularError> {
    if problem.airy.is_some() {
        Ok(path.xi(t))
    } else {
        Ok(make_frame(problem, t)?.xi)
    }
}

fn catch<F: Fn(Cplx) -> Result<Cplx, ParticularError>>(f: F) -> impl Fn(Cplx) -> Cplx {
    move |t| f(t).unwrap_or(Cplx::new(f64::NAN, 0.0))
}

fn psi_mass(problem: &TurningPointProblem, path: &ProgressivePath) -> Result<Magnitude, ParticularError> {
    let w = catch(|t| Ok(Cplx::new(local_data(problem, t)?.psi_weight, 0.0)));
    Ok(abs_integral(w, &path.path, BOUND_TOL)?)
}

struct Ingredients {
    psi: Magnitude,
    denominator: f64,
    u_abs: f64,
}

fn ingredients(problem: &TurningPointProblem, path: &ProgressivePath) -> Result<Ingredients, ParticularError> {
    let psi = psi_mass(problem, path)?;
    let u_abs = problem.u.norm();
    let denominator = match psi {
        Magnitude::Finite(v) => 1.0 - v / (2.0 * u_abs),
        Magnitude::Unbounded => f64::NEG_INFINITY,
    };
    Ok(Ingredients { psi, denominator, u_abs })
}

/// `L ψ / (1 - ψ/(2|u|))` or unbounded.
fn tail_factor(l: Magnitude, ing: &Ingredients) -> Magnitude {
    match (l, ing.psi) {
        (Magnitude::Finite(l), Magnitude::Finite(p)) if ing.denominator > 0.0 => mag(l * p / ing.denominator),
        _ => Magnitude::Unbounded,
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    kind: BoundKind,
    path: &ProgressivePath,
    leading: f64,
    variation: Magnitude,
    tail: Magnitude,
    carried: Magnitude,
    ing: &Ingredients,
    extra_valid: bool,
) -> BoundReport {
    let value = [variation, tail, carried].iter().fold(mag(leading), |acc, m| acc + *m);
    BoundReport {
        kind,
        value,
        components: BoundComponents {
            leading,
            variation,
            tail,
            carried,
            psi_mass: ing.psi,
            denominator: ing.denominator,
        },
        valid: ing.denominator > 0.0 && extra_valid,
        path_verified: path.verified,
        path: path.description.clone(),
    }
}

fn require_tag(path: &ProgressivePath, ok: bool, expected: &str) -> Result<(), ParticularError> {
    if ok {
        Ok(())
    } else {
        Err(ParticularError::TagMismatch { expected: expected.into(), found: path.tag.to_string() })
    }
}

/// `|{f^{1/4} Ĝ_n}'| = |f|^{1/4} |Ĝ_n' + f' Ĝ_n/(4f)|`.
fn quarter_derivative(d: &LocalData, g: [Cplx; 3]) -> Cplx {
    d.f.norm().powf(0.25) * (g[1] + d.f1 * g[0] / (4.0 * d.f))
}

/// Bound on `|ε̂_n(u, z)|` with plain weights.
pub fn error_bound_plain(
    problem: &TurningPointProblem,
    z: Cplx,
    n: usize,
    path: &ProgressivePath,
) -> Result<BoundReport, ParticularError> {
    require_tag(path, matches!(path.tag, MonotoneFunctional::UXi), "Re(u xi)")?;
    let source = CoefficientSource::new(problem, n)?;
    let ing = ingredients(problem, path)?;
    let here = local_data(problem, z)?;
    let gz = source.triple(z, n);
    let fq = here.f.norm().powf(0.25);
    let un = ing.u_abs.powi(2 * n as i32 + 2);
    let variation_integral = abs_integral(
        catch(|t| Ok(quarter_derivative(&local_data(problem, t)?, source.triple(t, n)))),
        &path.path,
        BOUND_TOL,
    )?;
    let sup = sup_along_path(
        catch(|t| {
            let d = local_data(problem, t)?;
            Ok(Cplx::new(d.f.norm().powf(0.25) * source.triple(t, n)[0].norm(), 0.0))
        }),
        &path.path,
    )?;
    let l = sup + mul(variation_integral, 0.5);
    let leading = gz[0].norm() / un;
    let variation = mul(variation_integral, 1.0 / (2.0 * fq * un));
    let tail = mul(tail_factor(l, &ing), 1.0 / (2.0 * un * ing.u_abs * fq));
    Ok(assemble(BoundKind::Plain, path, leading, variation, tail, Magnitude::Finite(0.0), &ing, true))
}

/// Bound on `|∂ε̂_n/∂z|` assembled from `|ε|` and `|∂ε/∂ξ|`.
pub fn error_bound_derivative(
    problem: &TurningPointProblem,
    z: Cplx,
    n: usize,
    path: &ProgressivePath,
) -> Result<BoundReport, ParticularError> {
    let plain = error_bound_plain(problem, z, n, path)?;
    let source = CoefficientSource::new(problem, n)?;
    let ing = ingredients(problem, path)?;
    let here = local_data(problem, z)?;
    let un = ing.u_abs.powi(2 * n as i32 + 2);
    let fq = here.f.norm().powf(0.25);
    // dG_n/dξ = f^{-1/4} K with K = Ĝ_n' + f'Ĝ_n/(4f).
    let k_of = |d: &LocalData, g: [Cplx; 3]| g[1] + d.f1 * g[0] / (4.0 * d.f);
    let gz = source.triple(z, n);
    let g_prime_xi = k_of(&here, gz).norm() / fq;
    let second = abs_integral(
        catch(|t| {
            let d = local_data(problem, t)?;
            let g = source.triple(t, n);
            let k = k_of(&d, g);
            let k1 = g[2] + (d.f2 * g[0] + d.f1 * g[1]) / (4.0 * d.f) - d.f1 * d.f1 * g[0] / (4.0 * d.f * d.f);
            Ok((k1 - d.f1 * k / (4.0 * d.f)) / d.f.norm().powf(0.25))
        }),
        &path.path,
        BOUND_TOL,
    )?;
    let l = {
        let variation_integral = abs_integral(
            catch(|t| Ok(quarter_derivative(&local_data(problem, t)?, source.triple(t, n)))),
            &path.path,
            BOUND_TOL,
        )?;
        let sup = sup_along_path(
            catch(|t| {
                let d = local_data(problem, t)?;
                Ok(Cplx::new(d.f.norm().powf(0.25) * source.triple(t, n)[0].norm(), 0.0))
            }),
            &path.path,
        )?;
        sup + mul(variation_integral, 0.5)
    };
    // |∂ε̂/∂z| ≤ |f'|/(4|f|) |ε̂| + |f|^{1/4} |∂ε/∂ξ|
    let carried = mul(plain.value, here.f1.norm() / (4.0 * here.f.norm()));
    let leading = fq * g_prime_xi / un;
    let variation = mul(second, 0.5 * fq / un);
    let tail = mul(tail_factor(l, &ing), 0.5 * fq / un);
    Ok(assemble(BoundKind::Derivative, path, leading, variation, tail, carried, &ing, plain.valid))
}

/// Bound for coefficients of exponential type `c` in `ξ`.
pub fn error_bound_exponential(
    problem: &TurningPointProblem,
    z: Cplx,
    n: usize,
    c: f64,
    path: &ProgressivePath,
) -> Result<BoundReport, ParticularError> {
    let tag_ok = match path.tag {
        MonotoneFunctional::Shifted { c: pc } => (pc.abs() - c.abs()).abs() < 1e-12,
        MonotoneFunctional::UXi => c == 0.0,
        _ => false,
    };
    require_tag(path, tag_ok, "Re((u +- c) xi)")?;
    let source = CoefficientSource::new(problem, n)?;
    let ing = ingredients(problem, path)?;
    let u = problem.u;
    let here = local_data(problem, z)?;
    let fq = here.f.norm().powf(0.25);
    let un = ing.u_abs.powi(2 * n as i32 + 2);
    let xi_z = xi_at(problem, path, z)?;
    // F(t) = e^{-cξ} f^{1/4} Ĝ_n; |F'| = |e^{-cξ}| |f|^{1/4} |Ĝ_n' + f'Ĝ_n/(4f) - c f^{1/2} Ĝ_n|
    let weight = |t: Cplx| -> Result<(Cplx, Cplx), ParticularError> {
        let d = local_data(problem, t)?;
        let g = source.triple(t, n);
        let x = xi_at(problem, path, t)?;
        let e = (-c * x).exp().norm();
        let fs = if problem.airy.is_some() { airy_sqrt(t, path.pair) } else { problem.f_sqrt(t) };
        let value = Cplx::new(e * d.f.norm().powf(0.25) * g[0].norm(), 0.0);
        let deriv = e * d.f.norm().powf(0.25) * (g[1] + d.f1 * g[0] / (4.0 * d.f) - c * fs * g[0]);
        Ok((value, deriv))
    };
    let variation_integral = abs_integral(catch(|t| Ok(weight(t)?.1)), &path.path, BOUND_TOL)?;
    let sup = sup_along_path(catch(|t| Ok(weight(t)?.0)), &path.path)?;
    let ratio = (u * u / (u * u - c * c)).norm();
    let shrink = ing.u_abs / (2.0 * (ing.u_abs - c.abs()));
    let l = mul(sup, ratio) + mul(variation_integral, shrink);
    let ecx = (c * xi_z).exp().norm();
    let leading = ratio * source.triple(z, n)[0].norm() / un;
    let variation = mul(variation_integral, ecx * shrink / (fq * un));
    let tail = mul(tail_factor(l, &ing), ecx / (2.0 * un * ing.u_abs * fq));
    let extra = ing.u_abs > c.abs();
    Ok(assemble(BoundKind::Exponential { c }, path, leading, variation, tail, Magnitude::Finite(0.0), &ing, extra))
}

/// `h(u, z) = (1 + α/(2u z^{1/2}))^{-1}`.
pub fn h_factor(u: Cplx, z: Cplx, alpha: Cplx, pair: SectorPair) -> Cplx {
    1.0 / (1.0 + alpha / (2.0 * u * airy_sqrt(z, pair)))
}

/// Bound for `w'' - u² z w = e^{αz}` with the `h(u, z)` weights.
pub fn error_bound_airy_exponential(
    problem: &TurningPointProblem,
    z: Cplx,
    n: usize,
    path: &ProgressivePath,
) -> Result<BoundReport, ParticularError> {
    let Some(AiryForcing::Exponential(alpha)) = problem.airy.clone() else {
        return Err(ParticularError::NotAiry);
    };
    let tag_ok = matches!(path.tag, MonotoneFunctional::Forcing { alpha: a } if a == alpha);
    require_tag(path, tag_ok, "Re(u xi + alpha z)")?;
    let source = CoefficientSource::new(problem, n)?;
    let u = problem.u;
    let u_abs = u.norm();
    let pair = path.pair;
    let h_weight = catch(|t| Ok(h_factor(u, t, alpha, pair) * t.norm().powf(-2.5)));
    let mass = abs_integral(h_weight, &path.path, BOUND_TOL)?;
    let psi = mul(mass, 5.0 / 16.0);
    let denominator = match psi {
        Magnitude::Finite(v) => 1.0 - v / (2.0 * u_abs),
        Magnitude::Unbounded => f64::NEG_INFINITY,
    };
    let ing = Ingredients { psi, denominator, u_abs };
    // |α u^{-1} t^{-1/2}| < 2 along the path
    let h_sup = sup_along_path(|t| alpha / (u * airy_sqrt(t, pair)), &path.path)?;
    let h_ok = matches!(h_sup, Magnitude::Finite(v) if v < 2.0);
    // F(t) = t^{1/4} h(u,t) H_n(t) with Ĝ_n = e^{αt} H_n
    let weight = |t: Cplx| -> Result<(Cplx, Cplx), ParticularError> {
        let hn = source.scaled_triple(t, n).ok_or(ParticularError::NotAiry)?;
        let sq = airy_sqrt(t, pair);
        let h = h_factor(u, t, alpha, pair);
        // h' = h² α/(4u t^{3/2})
        let h1 = h * h * alpha / (4.0 * u * t * sq);
        let q = t.norm().powf(0.25);
        let value = Cplx::new(q * (h * hn[0]).norm(), 0.0);
        let deriv = q * (h * hn[1] + h1 * hn[0] + h * hn[0] / (4.0 * t));
        Ok((value, deriv))
    };
    let variation_integral = abs_integral(catch(|t| Ok(weight(t)?.1)), &path.path, BOUND_TOL)?;
    let sup = sup_along_path(catch(|t| Ok(weight(t)?.0)), &path.path)?;
    let l = sup + mul(variation_integral, 0.5);
    let un = u_abs.powi(2 * n as i32 + 2);
    let zq = z.norm().powf(0.25);
    let eaz = (alpha * z).exp().norm();
    let gz = source.triple(z, n)[0];
    let leading = (h_factor(u, z, alpha, pair) * gz).norm() / un;
    let variation = mul(variation_integral, eaz / (2.0 * zq * un));
    let tail = mul(tail_factor(l, &ing), eaz / (2.0 * un * u_abs * zq));
    Ok(assemble(
        BoundKind::AiryExponential { alpha },
        path,
        leading,
        variation,
        tail,
        Magnitude::Finite(0.0),
        &ing,
        h_ok,
    ))
}

/// Bound for coefficients with `G_n = O(ξ^σ)` at the path ends.
pub fn error_bound_algebraic(
    problem: &TurningPointProblem,
    z: Cplx,
    n: usize,
    sigma: f64,
    path: &ProgressivePath,
) -> Result<BoundReport, ParticularError> {
    let tag_ok = matches!(path.tag, MonotoneFunctional::Logarithmic { sigma: s } if (s - sigma).abs() < 1e-12);
    require_tag(path, tag_ok, "Re(u xi +- (sigma+1) ln xi)")?;
    let source = CoefficientSource::new(problem, n)?;
    let ing = ingredients(problem, path)?;
    let here = local_data(problem, z)?;
    let fq = here.f.norm().powf(0.25);
    let un = ing.u_abs.powi(2 * n as i32 + 2);
    let power = sigma + 1.0;
    let xz = xi_at(problem, path, z)?.norm().powf(power);
    let variation_integral = abs_integral(
        catch(|t| {
            let d = local_data(problem, t)?;
            let x = xi_at(problem, path, t)?.norm().powf(-power);
            Ok(x * quarter_derivative(&d, source.triple(t, n)))
        }),
        &path.path,
        BOUND_TOL,
    )?;
    let sup = sup_along_path(
        catch(|t| {
            let d = local_data(problem, t)?;
            let x = xi_at(problem, path, t)?.norm().powf(-power);
            Ok(Cplx::new(x * d.f.norm().powf(0.25) * source.triple(t, n)[0].norm(), 0.0))
        }),
        &path.path,
    )?;
    let l = sup + mul(variation_integral, 0.5);
    let leading = source.triple(z, n)[0].norm() / un;
    let variation = mul(variation_integral, xz / (2.0 * fq * un));
    let tail = mul(tail_factor(l, &ing), xz / (2.0 * un * ing.u_abs * fq));
    Ok(assemble(BoundKind::Algebraic { sigma }, path, leading, variation, tail, Magnitude::Finite(0.0), &ing, true))
}

/// Growth exponent `σ` of `G_n(ξ) = f^{1/4} Ĝ_n` for Airy polynomial forcing,
/// or `None` when `Ĝ_n = O(z^{-1})` and the plain bound applies.
pub fn airy_polynomial_sigma(coeffs: &[Cplx], n: usize) -> Option<f64> {
    let degree = coeffs.iter().rposition(|c| *c != Cplx::new(0.0, 0.0))?;
    let excess = degree as f64 - 3.0 * n as f64;
    if excess <= 0.0 {
        None
    } else {
        Some((excess - 0.75) / 1.5)
    }
}

/// Value and bound for the Airy applications, choosing the bound from the forcing.
pub fn airy_away(
    problem: &TurningPointProblem,
    z: Cplx,
    pair: SectorPair,
    n: usize,
) -> Result<(Cplx, BoundReport), ParticularError> {
    let forcing = problem.airy.clone().ok_or(ParticularError::NotAiry)?;
    let value = w_slowly_varying(problem, z, pair, n)?;
    let mut path = build_airy_path(z, pair, problem.u)?;
    let report = match forcing {
        AiryForcing::Polynomial(coeffs) => match airy_polynomial_sigma(&coeffs, n) {
            None => error_bound_plain(problem, z, n, &path)?,
            Some(sigma) => {
                path.retag(MonotoneFunctional::Logarithmic { sigma }, problem.u);
                error_bound_algebraic(problem, z, n, sigma, &path)?
            }
        },
        AiryForcing::Exponential(alpha) => {
            path.retag(MonotoneFunctional::Forcing { alpha }, problem.u);
            error_bound_airy_exponential(problem, z, n, &path)?
        }
    };
    Ok((value, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::AnalyticFn;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn airy_poly(coeffs: &[f64], u: f64) -> TurningPointProblem {
        TurningPointProblem::airy(AiryForcing::Polynomial(coeffs.iter().map(|&x| c(x, 0.0)).collect()), c(u, 0.0))
    }

    fn airy_exp(alpha: Cplx, u: f64) -> TurningPointProblem {
        TurningPointProblem::airy(AiryForcing::Exponential(alpha), c(u, 0.0))
    }

    #[test]
    fn leading_coefficients_match_closed_forms() {
        let z = c(1.3, 0.4);
        let p = airy_poly(&[1.0, 2.0, 0.0, 1.0], 10.0);
        let g = g_coefficients(&p, z, 2).unwrap();
        assert!((g.values[0] + (1.0 / z + 2.0 + z * z)).norm() < 1e-14);
        let alpha = c(1.0, 0.5);
        let q = airy_exp(alpha, 10.0);
        let g = g_coefficients(&q, z, 1).unwrap();
        assert!((g.values[0] + (alpha * z).exp() / z).norm() < 1e-14);
        let d0 = -(alpha * z).exp() * (alpha * z - 1.0) / (z * z);
        assert!((g.derivatives[0] - d0).norm() < 1e-13);
    }

    #[test]
    fn closed_form_agrees_with_series_route() {
        let z = c(1.7, -0.6);
        let alpha = c(0.8, 0.3);
        let exact = g_coefficients(&airy_exp(alpha, 10.0), z, 4).unwrap();
        let generic = TurningPointProblem::new(
            "generic",
            AnalyticFn::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            AnalyticFn::zero(),
            AnalyticFn::exponential(alpha),
            c(0.0, 0.0),
            c(10.0, 0.0),
        )
        .unwrap();
        let series = g_coefficients(&generic, z, 4).unwrap();
        assert_eq!(series.method, DerivativeMethod::TaylorSeries);
        for s in 0..=4 {
            let scale = exact.values[s].norm();
            assert!((exact.values[s] - series.values[s]).norm() < 1e-10 * scale, "s = {s}");
            assert!((exact.derivatives[s] - series.derivatives[s]).norm() < 1e-9 * exact.derivatives[s].norm());
        }
    }

    #[test]
    fn recursion_residual_is_small() {
        let p = TurningPointProblem::z_exp_z(AnalyticFn::exponential(c(0.5, 0.0)), c(10.0, 0.0));
        let z = c(1.2, 0.3);
        let g = g_coefficients(&p, z, 3).unwrap();
        let f = z * z.exp();
        for s in 0..3 {
            let lhs = f * g.values[s + 1];
            let rhs = g.second_derivatives[s];
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm(), "s = {s}");
        }
    }

    #[test]
    fn terminating_linear_forcing() {
        let p = airy_poly(&[0.0, 1.0], 9.0);
        let g = g_coefficients(&p, c(2.0, 1.0), 3).unwrap();
        assert!((g.values[0] + 1.0).norm() < 1e-15);
        assert!(g.values[1..].iter().all(|v| v.norm() == 0.0));
        for pair in SectorPair::ALL {
            let z = match pair {
                SectorPair::ZeroPlus => c(2.0, 1.0),
                SectorPair::MinusZero => c(2.0, -1.0),
                SectorPair::MinusPlus => c(-2.0, 0.5),
            };
            let w = w_slowly_varying(&p, z, pair, 3).unwrap();
            assert!((w + 1.0 / 81.0).norm() < 1e-16);
            assert_eq!(w_slowly_varying_derivative(&p, z, pair, 3).unwrap(), c(0.0, 0.0));
            let path = build_airy_path(z, pair, p.u).unwrap();
            let b = error_bound_plain(&p, z, 1, &path).unwrap();
            assert_eq!(b.bound(), Some(0.0));
            let d = error_bound_derivative(&p, z, 1, &path).unwrap();
            assert_eq!(d.bound(), Some(0.0));
        }
    }

    #[test]
    fn toy_equation_geometric_series() {
        // f = 1, g = 0, p = e^z: every coefficient equals -e^z.
        let z = c(0.3, 0.2);
        let len = 2 * 5 + 3;
        let series = g_series(
            &Series::constant(c(1.0, 0.0), len),
            &Series::zero(len),
            &AnalyticFn::exponential(c(1.0, 0.0)).taylor(z, len),
            5,
        );
        let u = c(6.0, 0.0);
        let coeffs: Vec<Cplx> = series.iter().map(Series::value).collect();
        let derivs: Vec<Cplx> = series.iter().map(|s| s.coeffs[1]).collect();
        let exact = -z.exp() / (u * u - 1.0);
        for n in 1..=5 {
            let tail = (exact - partial_sum(&coeffs, u, n)).norm();
            let expected = z.exp().norm() / (u.norm().powi(2 * n as i32) * 35.0);
            assert!((tail - expected).abs() < 1e-12 * expected.max(1e-300) + 1e-17, "n = {n}");
            assert!((partial_sum(&derivs, u, n) - partial_sum(&coeffs, u, n)).norm() < 1e-15);
        }
    }

    #[test]
    fn exponential_derivative_partial_sum_matches_finite_difference() {
        let p = airy_exp(c(1.0, 0.0), 20.0);
        let z = c(2.0, 0.0);
        let h = 1e-4;
        let d = w_slowly_varying_derivative(&p, z, SectorPair::ZeroPlus, 3).unwrap();
        let fd = (w_slowly_varying(&p, z + h, SectorPair::ZeroPlus, 3).unwrap()
            - w_slowly_varying(&p, z - h, SectorPair::ZeroPlus, 3).unwrap())
            / (2.0 * h);
        assert!((d - fd).norm() < 1e-9 * d.norm());
    }

    #[test]
    fn window_errors_recommend_connection() {
        let p = airy_poly(&[1.0], 10.0);
        let err = w_slowly_varying(&p, c(-2.0, 0.0), SectorPair::ZeroPlus, 1).unwrap_err();
        assert!(matches!(err, ParticularError::OutsideWindow { recommended: SectorPair::MinusPlus, .. }));
        let edge = Cplx::from_polar(2.0, 2.0 * PI / 3.0 - 0.01);
        assert!(matches!(
            build_airy_path(edge, SectorPair::ZeroPlus, c(10.0, 0.0)),
            Err(ParticularError::OnBoundary { .. })
        ));
    }

    #[test]
    fn fig_one_path_geometry() {
        let path = build_airy_path(c(2.0, 0.0), SectorPair::ZeroPlus, c(10.0, 0.0)).unwrap();
        assert_eq!(path.path.segments.len(), 3);
        assert!((path.min_modulus() - 2.0).abs() < 1e-12);
        assert!(path.verified);
        assert!(path.witness[0].len() >= 3 * WITNESS_SAMPLES);
        let w = &path.witness[0];
        assert!(w.windows(2).all(|p| p[1] >= p[0] - 1e-9 * p[0].abs().max(1.0)));
    }

    #[test]
    fn fig_two_path_has_level_curve() {
        let z = Cplx::from_polar(2.0, -0.3);
        let path = build_airy_path(z, SectorPair::ZeroPlus, c(10.0, 0.0)).unwrap();
        assert_eq!(path.path.segments.len(), 4);
        let a = z.powf(1.5).re.powf(2.0 / 3.0);
        assert!(a < 2.0);
        assert!((path.min_modulus() - a).abs() < 1e-9);
        assert!(path.verified);
        // The level piece keeps Re t^{3/2} fixed.
        let level = &path.path.segments[2];
        let pts = ComplexPath::single(level.clone()).sample_points(20, 1.0);
        for t in pts {
            assert!((t.powf(1.5).re - z.powf(1.5).re).abs() < 1e-12);
        }
    }

    #[test]
    fn other_pairs_by_symmetry() {
        for (z, pair) in [
            (c(1.0, -2.0), SectorPair::MinusZero),
            (c(-3.0, 0.5), SectorPair::MinusPlus),
            (c(-3.0, -0.5), SectorPair::MinusPlus),
        ] {
            let path = build_airy_path(z, pair, c(10.0, 0.0)).unwrap();
            assert!(path.path.validate().is_ok());
            assert!(path.verified, "{pair} {z}");
            assert!((path.min_modulus() - z.norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn psi_mass_along_fig_one_path() {
        let p = airy_poly(&[1.0], 10.0);
        let path = build_airy_path(c(4.0, 0.0), SectorPair::ZeroPlus, p.u).unwrap();
        let m = psi_mass(&p, &path).unwrap().value().unwrap();
        // Two straight pieces each (5/16)/12 and the arc (5/16)π/12.
        let exact = 5.0 / 16.0 * (2.0 + PI) / 12.0;
        assert!((m - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn h_factor_value() {
        let h = h_factor(c(10.0, 0.0), c(4.0, 0.0), c(1.0, 0.0), SectorPair::ZeroPlus);
        assert!((h - 40.0 / 41.0).norm() < 1e-15);
    }

    #[test]
    fn exponential_with_zero_shift_equals_plain() {
        let p = airy_poly(&[0.0, 2.0, 0.0, 1.0], 20.0);
        let z = c(3.0, 0.0);
        let mut path = build_airy_path(z, SectorPair::ZeroPlus, p.u).unwrap();
        let plain = error_bound_plain(&p, z, 2, &path).unwrap();
        path.retag(MonotoneFunctional::Shifted { c: 0.0 }, p.u);
        let shifted = error_bound_exponential(&p, z, 2, 0.0, &path).unwrap();
        let (a, b) = (plain.bound().unwrap(), shifted.bound().unwrap());
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn derivative_bound_is_sum_of_components() {
        let p = airy_poly(&[0.0, 0.0, 0.0, 1.0], 25.0);
        let z = c(3.0, 0.0);
        let path = build_airy_path(z, SectorPair::ZeroPlus, p.u).unwrap();
        let r = error_bound_derivative(&p, z, 2, &path).unwrap();
        let comps = r.components;
        let parts = [comps.variation, comps.tail, comps.carried].map(|m| m.value().unwrap());
        assert!(comps.leading >= 0.0 && parts.iter().all(|v| *v >= 0.0));
        let sum = comps.leading + parts.iter().sum::<f64>();
        assert!((r.bound().unwrap() - sum).abs() <= 1e-15 * sum);
    }

    #[test]
    fn plain_bound_unavailable_for_growing_exponential() {
        let p = airy_exp(c(1.0, 0.0), 20.0);
        let z = c(2.0, 0.0);
        let path = build_airy_path(z, SectorPair::ZeroPlus, p.u).unwrap();
        let plain = error_bound_plain(&p, z, 2, &path).unwrap();
        assert!(!plain.is_available());
        let (_, report) = airy_away(&p, z, SectorPair::ZeroPlus, 2).unwrap();
        assert!(report.is_available() && report.path_verified, "{report:?}");
        assert!(matches!(report.kind, BoundKind::AiryExponential { .. }));
    }

    #[test]
    fn algebraic_bound_when_too_few_terms() {
        // p = z^4, n = 1: Ĝ_1 = -6, so the plain variation integral diverges.
        let p = airy_poly(&[0.0, 0.0, 0.0, 0.0, 1.0], 20.0);
        let z = c(3.0, 0.5);
        let path = build_airy_path(z, SectorPair::ZeroPlus, p.u).unwrap();
        assert!(!error_bound_plain(&p, z, 1, &path).unwrap().is_available());
        let sigma =
            airy_polynomial_sigma(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1).unwrap();
        assert!((sigma - 1.0 / 6.0).abs() < 1e-15);
        let (_, report) = airy_away(&p, z, SectorPair::ZeroPlus, 1).unwrap();
        assert!(report.is_available(), "{report:?}");
        assert!(matches!(report.kind, BoundKind::Algebraic { .. }));
    }

    #[test]
    fn weighted_sup_of_constant_on_ray() {
        let path = ComplexPath::single(PathSegment::ray_out(c(1.0, 0.0), 0.0));
        let s = sup_along_path(|t| c(-6.0, 0.0) / t, &path).unwrap();
        assert!((s.value().unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn regular_parts_of_exponential_coefficients() {
        let alpha = c(1.0, 0.5);
        let g = airy_g_exact(&AiryForcing::Exponential(alpha), 1);
        // Ĝ_0* = 1/z - e^{αz}/z with Ĝ_0 = -e^{αz}/z
        assert!((g[0].regular_part(c(0.0, 0.0)) + alpha).norm() < 1e-15);
        assert!((g[1].regular_part(c(0.0, 0.0)) + alpha.powi(4) / 4.0).norm() < 1e-14);
        assert!((g[1].regular_part_derivative(c(0.0, 0.0)) + alpha.powi(5) / 10.0).norm() < 1e-14);
        let z = c(0.3, -0.2);
        let closed = 2.0 / z.powi(4) + alpha.powi(3) / (3.0 * z)
            - (alpha * z).exp() / z.powi(4) * (alpha * alpha * z * z - 2.0 * alpha * z + 2.0);
        assert!((g[1].regular_part(z) - closed).norm() < 1e-10);
    }

    #[test]
    fn polynomial_regular_parts_terminate() {
        let coeffs: Vec<Cplx> = [0.0, 0.0, 0.0, 0.0, 1.0].iter().map(|&x| c(x, 0.0)).collect();
        let g = airy_g_exact(&AiryForcing::Polynomial(coeffs), 3);
        let z = c(0.2, 0.1);
        assert!((g[0].regular_part(z) + z.powi(3)).norm() < 1e-15);
        assert!((g[1].regular_part(z) + 6.0).norm() < 1e-15);
        assert_eq!(g[2].regular_part(z), c(0.0, 0.0));
    }

    #[test]
    fn slowly_varying_solution_stays_small_along_rays() {
        let p = airy_poly(&[1.0, 0.0, 0.0, 0.0], 30.0);
        let u = 30.0;
        for r in [2.0, 4.0, 8.0] {
            for z in [c(r, 0.0), Cplx::from_polar(r, 2.0 * PI / 3.0 - 0.1)] {
                let w = w_slowly_varying(&p, z, SectorPair::ZeroPlus, 2).unwrap();
                assert!(w.norm() * u * u < 10.0 / r);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fig_paths_are_monotone(r in 1.0..10.0f64, theta in -1.0..2.0f64) {
            let z = Cplx::from_polar(r, theta);
            let path = build_airy_path(z, SectorPair::ZeroPlus, c(15.0, 0.0)).unwrap();
            prop_assert!(path.verified);
            prop_assert!(path.path.validate().is_ok());
        }

        #[test]
        fn closed_form_recursion_holds(x in 0.5..4.0f64, y in -2.0..2.0f64, s in 0usize..4) {
            let z = c(x, y);
            let g = airy_g_exact(&AiryForcing::Exponential(c(0.7, -0.4)), s + 1);
            let second = g[s].derivative().derivative().value(z);
            prop_assert!((z * g[s + 1].value(z) - second).norm() <= 1e-12 * second.norm());
        }
    }
}
