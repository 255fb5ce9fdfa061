//! Reference values by quadrature, independent of the asymptotic machinery.
//!
//! Fundamental solutions of `w'' - u² z w = p(z)` come from variation of
//! parameters with rotated Airy functions recessive at the two reference
//! directions of a pair.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::airy::{ai, ai_rotated, wronskian_ai_rotated, wronskian_plus_minus, Sector};
use crate::liouville::{AiryForcing, TurningPointProblem};
use crate::particular::airy_g_exact;
use crate::quadrature::{integrate_path_with_error, ComplexPath, Cplx, PathSegment, QuadError};
use crate::scorer::SectorPair;

/// Default relative tolerance for oracle quadrature.
pub const ORACLE_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("forcing times the recessive Airy factor does not decay along the ray to {0}")]
    NonDecaying(Cplx),
    #[error("oracle requires the Airy problem with closed-form forcing")]
    NotAiry,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Value and derivative of a fundamental solution with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSolution {
    pub value: Cplx,
    pub derivative: Cplx,
    /// Propagated quadrature error estimate on `value`.
    pub error_estimate: f64,
    pub pair: SectorPair,
    /// Descriptions of the two integration paths.
    pub paths: [String; 2],
}

fn reference_angle(s: Sector) -> f64 {
    2.0 * PI * f64::from(s.index()) / 3.0
}

/// Angle of `z` shifted into the open interval of length `2π` that starts at
/// the direction of the sector missing from `pair`.
fn unwrap_angle(angle: f64, pair: SectorPair) -> f64 {
    let lo = reference_angle(pair.missing());
    let mut a = angle;
    while a <= lo {
        a += 2.0 * PI;
    }
    while a > lo + 2.0 * PI {
        a -= 2.0 * PI;
    }
    a
}

/// Path from `∞ e^{2πij/3}` to `z`: a ray down to `|z|`, then an arc that does
/// not cross the direction of the missing sector.
pub fn oracle_path(z: Cplx, from: Sector, pair: SectorPair) -> ComplexPath {
    let theta = reference_angle(from);
    let r = z.norm();
    if r == 0.0 {
        return ComplexPath::single(PathSegment::ray_in(z, theta));
    }
    let start = unwrap_angle(theta, pair);
    let end = unwrap_angle(z.arg(), pair);
    let mut path = ComplexPath::single(PathSegment::ray_in(Cplx::from_polar(r, theta), theta));
    if (end - start).abs() > 1e-15 {
        path.push(PathSegment::arc(Cplx::new(0.0, 0.0), r, start, end));
    }
    path
}

/// `u^{2/3} 𝒲{Ai_j(u^{2/3}z), Ai_k(u^{2/3}z)}` divided by `u^{2/3}`.
fn pair_wronskian(pair: SectorPair) -> Cplx {
    match pair {
        SectorPair::ZeroPlus => wronskian_ai_rotated(Sector::Plus),
        SectorPair::MinusZero => -wronskian_ai_rotated(Sector::Minus),
        SectorPair::MinusPlus => -wronskian_plus_minus(),
    }
}

/// `w^{(j,k)}(u, z)` for `w'' - u² z w = p(z)`, with its `z`-derivative.
pub fn w_oracle<P: Fn(Cplx) -> Cplx>(
    u: f64,
    z: Cplx,
    pair: SectorPair,
    p: P,
    tol: f64,
) -> Result<OracleSolution, OracleError> {
    let (sj, sk) = pair.sectors();
    let scale = u.powf(2.0 / 3.0);
    let path_j = oracle_path(z, sj, pair);
    let path_k = oracle_path(z, sk, pair);
    let integral = |s: Sector, path: &ComplexPath| -> Result<(Cplx, f64), OracleError> {
        integrate_path_with_error(|t| p(t) * ai_rotated(scale * t, s).value, path, tol).map_err(|e| match e {
            QuadError::RayDivergent(_) => OracleError::NonDecaying(Cplx::from_polar(1.0, reference_angle(s))),
            other => other.into(),
        })
    };
    let (ij, ej) = integral(sj, &path_j)?;
    let (ik, ek) = integral(sk, &path_k)?;
    let yj = ai_rotated(scale * z, sj);
    let yk = ai_rotated(scale * z, sk);
    let w = scale * pair_wronskian(pair);
    let value = (yk.value * ij - yj.value * ik) / w;
    let derivative = scale * (yk.derivative * ij - yj.derivative * ik) / w;
    let error_estimate = (yk.value.norm() * ej + yj.value.norm() * ek) / w.norm();
    Ok(OracleSolution {
        value,
        derivative,
        error_estimate,
        pair,
        paths: [format!("{:?}", path_j.segments), format!("{:?}", path_k.segments)],
    })
}

/// Oracle for a problem carrying closed-form Airy forcing.
pub fn w_oracle_problem(
    problem: &TurningPointProblem,
    z: Cplx,
    pair: SectorPair,
    tol: f64,
) -> Result<OracleSolution, OracleError> {
    let p = problem.airy.as_ref().map(AiryForcing::to_fn).ok_or(OracleError::NotAiry)?;
    w_oracle(problem.u.re, z, pair, |t| p.value(t), tol)
}

/// `ε̂_n = w - u^{-2} Σ_{s<n} Ĝ_s/u^{2s}` computed directly as the fundamental
/// solution with forcing `-u^{-2n} z Ĝ_n(z)`.
pub fn remainder_oracle(
    problem: &TurningPointProblem,
    z: Cplx,
    pair: SectorPair,
    n: usize,
    tol: f64,
) -> Result<OracleSolution, OracleError> {
    let forcing = problem.airy.clone().ok_or(OracleError::NotAiry)?;
    let g = airy_g_exact(&forcing, n);
    let u = problem.u.re;
    let factor = -u.powi(-2 * n as i32);
    let top = &g[n];
    w_oracle(u, z, pair, |t| factor * t * top.value(t), tol)
}

/// Central-difference residual `w'' - (u² f + g) w - p`, extrapolated from
/// steps `h` and `h/2`.
pub fn ode_residual<W: Fn(Cplx) -> Cplx>(problem: &TurningPointProblem, w: W, z: Cplx, h: f64) -> Cplx {
    let second = |step: f64| (w(z + step) - 2.0 * w(z) + w(z - step)) / (step * step);
    let d2 = (4.0 * second(0.5 * h) - second(h)) / 3.0;
    let u2 = problem.u * problem.u;
    d2 - (u2 * problem.f.value(z) + problem.g.value(z)) * w(z) - problem.p.value(z)
}

/// `∫_z^∞ e^{αt} Ai(u^{2/3} t) dt`.
pub fn integral_oracle(u: f64, z: Cplx, alpha: Cplx, tol: f64) -> Result<Cplx, OracleError> {
    let scale = u.powf(2.0 / 3.0);
    let integrand = |t: Cplx| (alpha * t).exp() * ai(scale * t).value;
    if z.re >= 0.0 {
        let path = ComplexPath::single(PathSegment::ray_out(z, 0.0));
        return Ok(integrate_path_with_error(integrand, &path, tol)?.0);
    }
    let origin = Cplx::new(0.0, 0.0);
    let finite = integrate_path_with_error(integrand, &ComplexPath::single(PathSegment::line(z, origin)), tol)?.0;
    Ok(finite + integral_oracle(u, origin, alpha, tol)?)
}

/// `∫_{-∞}^∞ e^{αt} Ai(u^{2/3} t) dt`; the negative half-line is rotated onto
/// two decaying rays via `Ai(-x) = e^{πi/3} Ai(x e^{πi/3}) + e^{-πi/3} Ai(x e^{-πi/3})`.
pub fn full_line_integral(u: f64, alpha: Cplx, tol: f64) -> Result<Cplx, OracleError> {
    let scale = u.powf(2.0 / 3.0);
    let ray = ComplexPath::single(PathSegment::ray_out(Cplx::new(0.0, 0.0), 0.0));
    let right = integral_oracle(u, Cplx::new(0.0, 0.0), alpha, tol)?;
    let mut left = Cplx::new(0.0, 0.0);
    for sign in [1.0, -1.0] {
        let rot = Cplx::from_polar(1.0, -sign * PI / 3.0);
        let (v, _) = integrate_path_with_error(|s| (-alpha * s * rot).exp() * ai(scale * s).value, &ray, tol)?;
        left += v;
    }
    Ok(left + right)
}
