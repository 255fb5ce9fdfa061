//! Closed-form and asymptotic solutions of `w'' - u² z w = p(z)` for
//! polynomial and exponential forcing, and asymptotics of the integrals
//! `∫ e^{αt} Ai(u^{2/3} t) dt`.
//!
//! The particular solution of `y'' - z y = z^r` is `-Q_{r-1}(z) + c_r Wi(z)`;
//! the minus sign is the one for which the differential equation holds.
//! The cubic `S` enters the right-half-plane integral expansion divided by 48,
//! matching the `α = 0` coefficients of `∫ Ai`.

use std::f64::consts::PI;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::airy::ai;
use crate::liouville::{AiryForcing, TurningPointProblem};
use crate::particular::{airy_away, airy_g_exact, BoundReport, ParticularError, G_DEPTH_CAP};
use crate::quadrature::Cplx;
use crate::scorer::{wi, wi_prime, ScorerError, SectorPair, DEFAULT_DELTA, DEFAULT_TOL};

/// Radius of the disc around the turning point served by the near expansions.
pub const NEAR_RADIUS: f64 = 1.0;
/// Largest `r` for which `Q_{r-1}` coefficients fit comfortably in `i128`.
pub const Q_INDEX_CAP: usize = 30;
/// Correction terms available in the right and left integral expansions.
pub const INTEGRAL_ORDER_CAP: usize = 3;

#[derive(Debug, Error)]
pub enum ForcingError {
    #[error("{regime:?} regime does not cover z = {z}: {reason}")]
    Regime { regime: IntegralRegime, z: Cplx, reason: &'static str },
    #[error("order {requested} exceeds the available {cap}")]
    Order { requested: usize, cap: usize },
    #[error("u = {0} must be positive")]
    NonPositiveU(f64),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Particular(#[from] ParticularError),
}

/// Integer polynomial, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPoly(pub Vec<i128>);

impl IntPoly {
    pub fn derivative(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * k as i128).collect())
    }

    pub fn eval(&self, z: Cplx) -> Cplx {
        self.0.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    fn combine(&self, other: &Self, sign: i128) -> Self {
        let n = self.0.len().max(other.0.len());
        Self(
            (0..n).map(|k| self.0.get(k).copied().unwrap_or(0) + sign * other.0.get(k).copied().unwrap_or(0)).collect(),
        )
    }

    fn shift(&self) -> Self {
        let mut coeffs = vec![0];
        coeffs.extend(&self.0);
        Self(coeffs)
    }

    fn monomial(power: usize, coeff: i128) -> Self {
        let mut coeffs = vec![0; power + 1];
        coeffs[power] = coeff;
        Self(coeffs)
    }
}

/// `Q_r`, the polynomial part of repeated integration of Airy functions against `z^{r+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QPolynomial {
    pub degree: usize,
    pub poly: IntPoly,
}

impl QPolynomial {
    /// Coefficients by the backward recursion `q_j = (j+2)(j+3) q_{j+3}`.
    pub fn recursion(degree: usize) -> Self {
        let mut coeffs = vec![0i128; degree + 1];
        coeffs[degree] = 1;
        let mut j = degree;
        while j >= 3 {
            j -= 3;
            coeffs[j] = (j as i128 + 2) * (j as i128 + 3) * coeffs[j + 3];
        }
        Self { degree, poly: IntPoly(coeffs) }
    }

    /// Coefficients by the product formula for `j < r`; the leading coefficient is 1.
    pub fn closed_form(degree: usize) -> Self {
        let r = degree as i128;
        let mut coeffs = vec![0i128; degree + 1];
        coeffs[degree] = 1;
        for j in (degree % 3..degree).step_by(3) {
            let j = j as i128;
            // r!/(j+1)! = (j+2)(j+3)…r
            let numerator: i128 = (j + 2..=r).product();
            let upper = (r - j) / 3 - 2;
            let denominator: i128 = (0..=upper).map(|k| r - 2 - 3 * k).product();
            debug_assert_eq!(numerator % denominator, 0);
            coeffs[j as usize] = numerator / denominator;
        }
        Self { degree, poly: IntPoly(coeffs) }
    }

    /// `P_{r-1} = -Q_r'`.
    pub fn companion(&self) -> IntPoly {
        IntPoly(self.poly.derivative().0.iter().map(|c| -c).collect())
    }
}

/// `c_r = (3k)!/(3^k k!)` for `r = 3k`, else 0; `c_0 = 1`.
pub fn c_r(r: usize) -> i128 {
    if !r.is_multiple_of(3) {
        return 0;
    }
    let k = (r / 3) as i128;
    let numerator: i128 = (1..=3 * k).product();
    let denominator: i128 = 3i128.pow(k as u32) * (1..=k).product::<i128>();
    numerator / denominator
}

/// `Q_{r-1}`, with `Q_{-1} = 0`.
fn q_shifted(r: usize) -> IntPoly {
    if r == 0 {
        IntPoly(vec![0])
    } else {
        QPolynomial::recursion(r - 1).poly
    }
}

/// `Q_{r-1}'' - z Q_{r-1} - c_r + z^r`, identically zero.
pub fn q_identity_residual(r: usize) -> IntPoly {
    let q = q_shifted(r);
    q.derivative()
        .derivative()
        .combine(&q.shift(), -1)
        .combine(&IntPoly::monomial(0, c_r(r)), -1)
        .combine(&IntPoly::monomial(r, 1), 1)
}

/// `S(t) = 48t³ - 185t² + (35905/96)t - 5075225/13824`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SPolynomial {
    /// Ascending coefficients.
    pub coeffs: [Rational64; 4],
}

impl Default for SPolynomial {
    fn default() -> Self {
        Self {
            coeffs: [
                Rational64::new(-5_075_225, 13_824),
                Rational64::new(35_905, 96),
                Rational64::from_integer(-185),
                Rational64::from_integer(48),
            ],
        }
    }
}

impl SPolynomial {
    pub fn eval(&self, t: Cplx) -> Cplx {
        self.coeffs.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }
}

fn check_u(u: f64) -> Result<(), ForcingError> {
    if u > 0.0 {
        Ok(())
    } else {
        Err(ForcingError::NonPositiveU(u))
    }
}

/// Exact connection coefficient `γ(u)` for the Airy applications.
pub fn exact_gamma(forcing: &AiryForcing, u: f64) -> Cplx {
    match forcing {
        AiryForcing::Polynomial(coeffs) => coeffs
            .iter()
            .enumerate()
            .step_by(3)
            .map(|(r, &p)| p * c_r(r) as f64 * u.powf(-2.0 * (r as f64 + 2.0) / 3.0))
            .sum(),
        AiryForcing::Exponential(alpha) => (alpha.powi(3) / (3.0 * u * u)).exp() * u.powf(-4.0 / 3.0),
    }
}

/// Value and first two `z`-derivatives of a solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolutionJet {
    pub value: Cplx,
    pub derivative: Cplx,
    pub second_derivative: Cplx,
}

/// `w^{(j,k)} = γ Wi^{(j,k)}(u^{2/3}z) - Σ u^{-2(r+2)/3} p_r Q_{r-1}(u^{2/3}z)`.
pub fn poly_exact(u: f64, z: Cplx, pair: SectorPair, coeffs: &[Cplx]) -> Result<SolutionJet, ForcingError> {
    check_u(u)?;
    let scale = u.powf(2.0 / 3.0);
    let x = scale * z;
    let gamma = exact_gamma(&AiryForcing::Polynomial(coeffs.to_vec()), u);
    let (w, dw) = (wi(pair, x, DEFAULT_TOL)?, wi_prime(pair, x, DEFAULT_TOL)?);
    let mut out = SolutionJet {
        value: gamma * w,
        derivative: gamma * scale * dw,
        second_derivative: gamma * scale * scale * (x * w + 1.0),
    };
    for (r, &p) in coeffs.iter().enumerate() {
        let q = q_shifted(r);
        let dq = q.derivative();
        let weight = p * u.powf(-2.0 * (r as f64 + 2.0) / 3.0);
        out.value -= weight * q.eval(x);
        out.derivative -= weight * scale * dq.eval(x);
        out.second_derivative -= weight * scale * scale * dq.derivative().eval(x);
    }
    Ok(out)
}

fn airy_problem(forcing: AiryForcing, u: f64) -> TurningPointProblem {
    TurningPointProblem::airy(forcing, Cplx::new(u, 0.0))
}

/// Truncated slowly varying expansion with its certified bound.
pub fn poly_away(
    u: f64,
    z: Cplx,
    pair: SectorPair,
    coeffs: &[Cplx],
    n: usize,
) -> Result<(Cplx, BoundReport), ForcingError> {
    check_u(u)?;
    Ok(airy_away(&airy_problem(AiryForcing::Polynomial(coeffs.to_vec()), u), z, pair, n)?)
}

/// `γ Wi(u^{2/3}z) + u^{-2} Σ_{s<m} Ĝ_s*(z)/u^{2s}` and its derivative, for `|z| ≤ NEAR_RADIUS`.
pub fn near_expansion(
    forcing: &AiryForcing,
    u: f64,
    z: Cplx,
    pair: SectorPair,
    m: usize,
) -> Result<(Cplx, Cplx), ForcingError> {
    check_u(u)?;
    if m > G_DEPTH_CAP + 1 {
        return Err(ForcingError::Order { requested: m, cap: G_DEPTH_CAP + 1 });
    }
    if z.norm() > NEAR_RADIUS {
        return Err(ForcingError::Regime {
            regime: IntegralRegime::Central(pair),
            z,
            reason: "near expansion needs |z| <= 1",
        });
    }
    let scale = u.powf(2.0 / 3.0);
    let x = scale * z;
    let gamma = exact_gamma(forcing, u);
    let mut value = gamma * wi(pair, x, DEFAULT_TOL)?;
    let mut derivative = gamma * scale * wi_prime(pair, x, DEFAULT_TOL)?;
    if m > 0 {
        let g = airy_g_exact(forcing, m - 1);
        for (s, gs) in g.iter().enumerate() {
            let weight = u.powi(-2 * (s as i32 + 1));
            value += weight * gs.regular_part(z);
            derivative += weight * gs.regular_part_derivative(z);
        }
    }
    Ok((value, derivative))
}

/// Near expansion for polynomial forcing.
pub fn poly_near(u: f64, z: Cplx, pair: SectorPair, coeffs: &[Cplx], m: usize) -> Result<Cplx, ForcingError> {
    Ok(near_expansion(&AiryForcing::Polynomial(coeffs.to_vec()), u, z, pair, m)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionRegime {
    Away,
    Near,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpSolution {
    pub value: Cplx,
    pub regime: SolutionRegime,
    pub order: usize,
    pub gamma: Cplx,
    pub bound: Option<BoundReport>,
}

/// Solution for `p(z) = e^{αz}`: `order` is `n` away from the turning point and `m` near it.
pub fn exp_solution(
    u: f64,
    z: Cplx,
    pair: SectorPair,
    alpha: Cplx,
    order: usize,
    regime: SolutionRegime,
) -> Result<ExpSolution, ForcingError> {
    let forcing = AiryForcing::Exponential(alpha);
    let gamma = exact_gamma(&forcing, u);
    let (value, bound) = match regime {
        SolutionRegime::Away => {
            check_u(u)?;
            let (value, report) = airy_away(&airy_problem(forcing, u), z, pair, order)?;
            (value, Some(report))
        }
        SolutionRegime::Near => (near_expansion(&forcing, u, z, pair, order)?.0, None),
    };
    Ok(ExpSolution { value, regime, order, gamma, bound })
}

/// Expansion used for `∫_x^∞ e^{αt} Ai(u^{2/3}t) dt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntegralRegime {
    /// `|x| ≥ r₀`, `|arg x| ≤ π - δ`.
    Right,
    /// `|x| ≥ r₀`, `|arg(-x)| ≤ 2π/3 - δ`.
    Left,
    /// `|x| ≤ r₀`, through the near solution of the given pair.
    Central(SectorPair),
}

/// Regime choice for lower limit `x`; the central pair follows the sector table.
pub fn recommended_regime(x: Cplx) -> IntegralRegime {
    if x.norm() <= NEAR_RADIUS {
        IntegralRegime::Central(crate::particular::recommended_pair(x))
    } else if x.re >= 0.0 || (-x).arg().abs() > 2.0 * PI / 3.0 - DEFAULT_DELTA {
        IntegralRegime::Right
    } else {
        IntegralRegime::Left
    }
}

/// `∫_x^∞ e^{αt} Ai(u^{2/3} t) dt` by the selected expansion. `order` counts
/// correction terms in the outer regimes and `Ĝ*` terms in the central one.
pub fn airy_exp_integral(
    u: f64,
    x: Cplx,
    alpha: Cplx,
    regime: IntegralRegime,
    order: usize,
) -> Result<Cplx, ForcingError> {
    check_u(u)?;
    let outside = |reason| Err(ForcingError::Regime { regime, z: x, reason });
    match regime {
        IntegralRegime::Right => {
            if x.norm() < NEAR_RADIUS {
                return outside("needs |x| >= 1");
            }
            if x.arg().abs() > PI - DEFAULT_DELTA {
                return outside("needs |arg x| <= pi - delta");
            }
            right_expansion(u, x, alpha, order)
        }
        IntegralRegime::Left => {
            if x.norm() < NEAR_RADIUS {
                return outside("needs |x| >= 1");
            }
            if (-x).arg().abs() > 2.0 * PI / 3.0 - DEFAULT_DELTA {
                return outside("needs |arg(-x)| <= 2pi/3 - delta");
            }
            left_expansion(u, -x, alpha, order)
        }
        IntegralRegime::Central(pair) => {
            if x.norm() > NEAR_RADIUS {
                return outside("needs |x| <= 1");
            }
            central_expansion(u, x, alpha, pair, order)
        }
    }
}

fn check_integral_order(order: usize) -> Result<(), ForcingError> {
    if order > INTEGRAL_ORDER_CAP {
        return Err(ForcingError::Order { requested: order, cap: INTEGRAL_ORDER_CAP });
    }
    Ok(())
}

fn right_expansion(u: f64, z: Cplx, alpha: Cplx, order: usize) -> Result<Cplx, ForcingError> {
    check_integral_order(order)?;
    let az = alpha * z;
    let z32 = z.powf(1.5);
    let terms = [
        Cplx::new(1.0, 0.0),
        (48.0 * az - 41.0) / (48.0 * u * z32),
        (4608.0 * az * az - 9696.0 * az + 9241.0) / (4608.0 * u * u * z32 * z32),
        SPolynomial::default().eval(az) / (48.0 * u.powi(3) * z32.powi(3)),
    ];
    let series: Cplx = terms[..=order].iter().sum();
    let prefactor = (az - 2.0 / 3.0 * u * z32).exp() / (2.0 * PI.sqrt() * u.powf(7.0 / 6.0) * z.powf(0.75));
    Ok(prefactor * series)
}

/// `∫_{-z}^∞`, for `z` with `|arg z| ≤ 2π/3 - δ`.
fn left_expansion(u: f64, z: Cplx, alpha: Cplx, order: usize) -> Result<Cplx, ForcingError> {
    check_integral_order(order)?;
    let az = alpha * z;
    let z32 = z.powf(1.5);
    let phase = 2.0 / 3.0 * u * z32 - PI / 4.0;
    let (sin, cos) = (phase.sin(), phase.cos());
    let mut bracket = sin;
    if order >= 1 {
        bracket -= cos * (48.0 * az + 41.0) / (48.0 * u * z32);
    }
    if order >= 2 {
        bracket -= sin * (4608.0 * az * az + 9696.0 * az + 9241.0) / (4608.0 * u * u * z32 * z32);
    }
    if order >= 3 {
        bracket -= cos * SPolynomial::default().eval(-az) / (48.0 * u.powi(3) * z32.powi(3));
    }
    let total = (alpha.powi(3) / (3.0 * u * u)).exp() * u.powf(-2.0 / 3.0);
    Ok(total + (-az).exp() / (PI.sqrt() * u.powf(7.0 / 6.0) * z.powf(0.75)) * bracket)
}

fn central_expansion(u: f64, z: Cplx, alpha: Cplx, pair: SectorPair, m: usize) -> Result<Cplx, ForcingError> {
    if m > G_DEPTH_CAP + 1 {
        return Err(ForcingError::Order { requested: m, cap: G_DEPTH_CAP + 1 });
    }
    let x = u.powf(2.0 / 3.0) * z;
    let airy = ai(x);
    let (w, dw) = (wi(pair, x, DEFAULT_TOL)?, wi_prime(pair, x, DEFAULT_TOL)?);
    let delta = if pair == SectorPair::MinusPlus { 1.0 } else { 0.0 };
    let total = (alpha.powi(3) / (3.0 * u * u)).exp() * u.powf(-2.0 / 3.0);
    let mut regular = Cplx::new(0.0, 0.0);
    let mut regular_prime = Cplx::new(0.0, 0.0);
    if m > 0 {
        for (s, gs) in airy_g_exact(&AiryForcing::Exponential(alpha), m - 1).iter().enumerate() {
            let weight = u.powi(-2 * s as i32);
            regular += weight * gs.regular_part(z);
            regular_prime += weight * gs.regular_part_derivative(z);
        }
    }
    Ok(total * (airy.derivative * w - airy.value * dw + delta) + airy.derivative * regular * u.powf(-4.0 / 3.0)
        - airy.value * regular_prime / (u * u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{integral_oracle, w_oracle_problem, ORACLE_TOL};
    use crate::particular::recommended_pair;
    use crate::quadrature::{cauchy_derivative, Contour};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn real(coeffs: &[f64]) -> Vec<Cplx> {
        coeffs.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn printed_q_polynomials() {
        assert_eq!(QPolynomial::recursion(3).poly, IntPoly(vec![6, 0, 0, 1]));
        assert_eq!(QPolynomial::recursion(4).poly, IntPoly(vec![0, 12, 0, 0, 1]));
        assert_eq!(QPolynomial::recursion(5).poly, IntPoly(vec![0, 0, 20, 0, 0, 1]));
        assert_eq!(QPolynomial::recursion(6).poly, IntPoly(vec![180, 0, 0, 30, 0, 0, 1]));
        assert_eq!(QPolynomial::closed_form(4).poly.0[1], 12);
        assert_eq!(QPolynomial::recursion(2).companion(), IntPoly(vec![0, -2]));
    }

    #[test]
    fn q_identity_and_closed_form() {
        for r in 0..=Q_INDEX_CAP {
            assert!(q_identity_residual(r).is_zero(), "r = {r}");
            assert_eq!(QPolynomial::recursion(r), QPolynomial::closed_form(r), "r = {r}");
        }
    }

    #[test]
    fn c_values() {
        assert_eq!([c_r(0), c_r(3), c_r(4), c_r(6), c_r(9)], [1, 2, 0, 40, 2240]);
    }

    #[test]
    fn s_polynomial_constant() {
        let s = SPolynomial::default();
        assert_eq!(s.coeffs[0], Rational64::new(-5_075_225, 13_824));
        assert!((s.eval(c(0.0, 0.0)).re + 5_075_225.0 / 13_824.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_closed_forms() {
        let g = exact_gamma(&AiryForcing::Exponential(c(2.0, 0.0)), 5.0);
        assert!((g - 5f64.powf(-4.0 / 3.0) * (8.0f64 / 75.0).exp()).norm() < 1e-15);
        let g = exact_gamma(&AiryForcing::Polynomial(real(&[0.0, 0.0, 0.0, 1.0])), 7.0);
        assert!((g - 2.0 * 7f64.powf(-10.0 / 3.0)).norm() < 1e-16);
    }

    fn residual(u: f64, z: Cplx, pair: SectorPair, coeffs: &[Cplx]) -> f64 {
        let p: Cplx = coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &k| acc * z + k);
        let w = |t| poly_exact(u, t, pair, coeffs).unwrap().value;
        let contour = Contour::new(z, 0.05);
        let d2 = cauchy_derivative(w, z, &contour, 2).unwrap();
        let value = w(z);
        let r = d2 - u * u * z * value - p;
        r.norm() / (d2.norm() + (u * u * z * value).norm() + p.norm())
    }

    #[test]
    fn exact_solutions_satisfy_the_equation() {
        for pair in SectorPair::ALL {
            assert!(residual(7.0, c(1.0, 0.0), pair, &real(&[0.0, 0.0, 0.0, 1.0])) < 1e-10);
            assert!(residual(7.0, c(2.0, 1.0), pair, &real(&[0.0, 0.0, 0.0, 1.0])) < 1e-10);
            assert!(residual(3.0, c(0.3, -0.8), pair, &real(&[1.0, -2.0, 0.5, 0.0, 0.0, 0.0, 0.7])) < 1e-10);
        }
        let linear = poly_exact(9.0, c(0.4, 0.2), SectorPair::ZeroPlus, &real(&[0.0, 1.0])).unwrap();
        assert!((linear.value + 1.0 / 81.0).norm() < 1e-16);
        let jet = poly_exact(5.0, c(0.4, 0.2), SectorPair::ZeroPlus, &real(&[1.0, 0.0, 2.0, 1.0])).unwrap();
        let lhs = jet.second_derivative - 25.0 * c(0.4, 0.2) * jet.value;
        let p = 1.0 + 2.0 * c(0.4, 0.2).powi(2) + c(0.4, 0.2).powi(3);
        assert!((lhs - p).norm() < 1e-12);
    }

    #[test]
    fn exact_solution_matches_oracle() {
        let coeffs = real(&[0.5, 2.0, 0.0, 1.0]);
        let problem = airy_problem(AiryForcing::Polynomial(coeffs.clone()), 6.0);
        for z in [c(0.5, 0.3), c(-1.0, 0.2), c(2.0, -1.0)] {
            let pair = recommended_pair(z);
            let exact = poly_exact(6.0, z, pair, &coeffs).unwrap();
            let oracle = w_oracle_problem(&problem, z, pair, ORACLE_TOL).unwrap();
            assert!((exact.value - oracle.value).norm() < 1e-10 * oracle.value.norm());
            assert!((exact.derivative - oracle.derivative).norm() < 1e-10 * oracle.derivative.norm());
        }
    }

    #[test]
    fn near_expansion_terminates_for_low_degree() {
        let u = 13.0;
        let z = c(0.1, 0.05);
        let linear = real(&[0.0, 1.0]);
        assert!((poly_near(u, z, SectorPair::ZeroPlus, &linear, 1).unwrap() + 1.0 / (u * u)).norm() < 1e-16);
        let quartic = real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let g = airy_g_exact(&AiryForcing::Polynomial(quartic.clone()), 1);
        assert!((g[0].regular_part(z) + z.powi(3)).norm() < 1e-15);
        assert!((g[1].regular_part(z) + 6.0).norm() < 1e-14);
        let sextic = real(&[1.0, 0.5, 0.0, 2.0, 0.0, 0.0, 1.0]);
        for pair in SectorPair::ALL {
            let exact = poly_exact(u, z, pair, &sextic).unwrap().value;
            let near = poly_near(u, z, pair, &sextic, 3).unwrap();
            assert!((exact - near).norm() < 1e-13 * exact.norm());
        }
    }

    #[test]
    fn near_expansion_converges_at_advertised_rate() {
        let z = c(0.1, 0.0);
        let coeffs = real(&[1.0, 0.5, 0.0, 2.0, 0.0, 0.0, 1.0]);
        for m in 0..=1 {
            let errors: Vec<f64> = [10.0, 20.0, 40.0]
                .iter()
                .map(|&u| {
                    let exact = poly_exact(u, z, SectorPair::ZeroPlus, &coeffs).unwrap().value;
                    (poly_near(u, z, SectorPair::ZeroPlus, &coeffs, m).unwrap() - exact).norm()
                })
                .collect();
            let slope = (errors[2] / errors[0]).ln() / 4f64.ln();
            let target = -(2.0 * m as f64 + 2.0);
            assert!((slope - target).abs() < 0.1 * target.abs(), "m = {m}: slope {slope}");
        }
    }

    #[test]
    fn zero_exponent_is_scaled_scorer_function() {
        let u = 11.0;
        let z = c(0.3, 0.4);
        let solution = exp_solution(u, z, SectorPair::ZeroPlus, c(0.0, 0.0), 2, SolutionRegime::Near).unwrap();
        let expected = u.powf(-4.0 / 3.0) * wi(SectorPair::ZeroPlus, u.powf(2.0 / 3.0) * z, DEFAULT_TOL).unwrap();
        assert!((solution.value - expected).norm() < 1e-15);
        assert!((solution.gamma - u.powf(-4.0 / 3.0)).norm() < 1e-16);
    }

    #[test]
    fn exponential_near_expansion_tracks_oracle() {
        let alpha = c(1.0, 0.0);
        let z = c(0.0, 0.05);
        let pair = recommended_pair(z);
        for m in 1..=2 {
            let errors: Vec<f64> = [10.0, 20.0, 40.0]
                .iter()
                .map(|&u| {
                    let near = exp_solution(u, z, pair, alpha, m, SolutionRegime::Near).unwrap().value;
                    let oracle =
                        w_oracle_problem(&airy_problem(AiryForcing::Exponential(alpha), u), z, pair, ORACLE_TOL)
                            .unwrap();
                    (near - oracle.value).norm()
                })
                .collect();
            let slope = (errors[2] / errors[0]).ln() / 4f64.ln();
            let target = -(2.0 * m as f64 + 2.0);
            assert!((slope - target).abs() < 0.1 * target.abs(), "m = {m}: slope {slope}, {errors:?}");
        }
    }

    #[test]
    fn exponential_away_bound_holds() {
        let (u, alpha, z) = (20.0, c(1.0, 0.0), c(2.0, 0.0));
        let pair = SectorPair::ZeroPlus;
        let solution = exp_solution(u, z, pair, alpha, 2, SolutionRegime::Away).unwrap();
        let oracle = w_oracle_problem(&airy_problem(AiryForcing::Exponential(alpha), u), z, pair, ORACLE_TOL).unwrap();
        let bound = solution.bound.unwrap().bound().unwrap();
        assert!((solution.value - oracle.value).norm() <= bound);
    }

    #[test]
    fn polynomial_away_bound_holds() {
        let coeffs = real(&[0.0, 2.0, 0.0, 1.0]);
        let (value, report) = poly_away(20.0, c(3.0, 0.0), SectorPair::ZeroPlus, &coeffs, 2).unwrap();
        let exact = poly_exact(20.0, c(3.0, 0.0), SectorPair::ZeroPlus, &coeffs).unwrap().value;
        assert!((value - exact).norm() <= report.bound().unwrap());
        let (value, report) = poly_away(20.0, c(3.0, 0.0), SectorPair::ZeroPlus, &real(&[0.0, 1.0]), 1).unwrap();
        assert!((value + 1.0 / 400.0).norm() < 1e-18);
        assert_eq!(report.bound(), Some(0.0));
    }

    fn integral_errors(u: f64, x: Cplx, alpha: Cplx, regime: IntegralRegime) -> Vec<f64> {
        let oracle = integral_oracle(u, x, alpha, 1e-12).unwrap();
        (0..=INTEGRAL_ORDER_CAP)
            .map(|k| (airy_exp_integral(u, x, alpha, regime, k).unwrap() - oracle).norm() / oracle.norm())
            .collect()
    }

    #[test]
    fn right_regime_matches_oracle() {
        let alpha = c(1.0, 0.0);
        let errors = integral_errors(20.0, c(1.0, 0.0), alpha, IntegralRegime::Right);
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
        assert!(errors[3] < 1e-4, "{errors:?}");
        let errors = integral_errors(50.0, c(1.0, 0.0), alpha, IntegralRegime::Right);
        assert!(errors[3] < 5e-6, "{errors:?}");
    }

    #[test]
    fn left_regime_matches_oracle() {
        let alpha = c(1.0, 0.5);
        for (x, tol) in [(c(-1.5, 0.0), 1e-6), (c(-1.2, 0.6), 1e-4)] {
            let errors = integral_errors(40.0, x, alpha, IntegralRegime::Left);
            assert!(errors[3] < tol, "{x}: {errors:?}");
            assert!(errors[3] < errors[1], "{x}: {errors:?}");
        }
    }

    #[test]
    fn central_regime_matches_oracle_for_every_pair() {
        let (u, alpha) = (20.0, c(1.0, 0.0));
        for x in [c(0.3, 0.0), c(-0.4, 0.2), c(0.1, -0.5)] {
            let oracle = integral_oracle(u, x, alpha, ORACLE_TOL).unwrap();
            for pair in SectorPair::ALL {
                let value = airy_exp_integral(u, x, alpha, IntegralRegime::Central(pair), 2).unwrap();
                assert!((value - oracle).norm() < 1e-6 * oracle.norm().max(1e-3), "{x} {pair:?}: {value} vs {oracle}");
            }
        }
    }

    #[test]
    fn regimes_reject_points_outside_their_domain() {
        let alpha = c(1.0, 0.0);
        assert!(airy_exp_integral(10.0, c(0.5, 0.0), alpha, IntegralRegime::Right, 1).is_err());
        assert!(airy_exp_integral(10.0, c(2.0, 0.0), alpha, IntegralRegime::Left, 1).is_err());
        assert!(airy_exp_integral(10.0, c(2.0, 0.0), alpha, IntegralRegime::Central(SectorPair::ZeroPlus), 1).is_err());
        assert!(airy_exp_integral(10.0, c(2.0, 0.0), alpha, IntegralRegime::Right, 4).is_err());
        assert_eq!(recommended_regime(c(-3.0, 0.5)), IntegralRegime::Left);
        assert_eq!(recommended_regime(c(3.0, 0.5)), IntegralRegime::Right);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn q_closed_form_equals_recursion(r in 0usize..=Q_INDEX_CAP) {
            prop_assert_eq!(QPolynomial::recursion(r), QPolynomial::closed_form(r));
        }

        #[test]
        fn exact_solutions_differ_by_connection_term(x in -1.5f64..1.5, y in -1.5f64..1.5, p0 in -1.0f64..1.0, p3 in -1.0f64..1.0) {
            let u = 4.0;
            let z = c(x, y);
            let coeffs = real(&[p0, 0.3, 0.0, p3]);
            let gamma = exact_gamma(&AiryForcing::Polynomial(coeffs.clone()), u);
            let a = poly_exact(u, z, SectorPair::ZeroPlus, &coeffs).unwrap().value;
            let b = poly_exact(u, z, SectorPair::MinusZero, &coeffs).unwrap().value;
            let ai_term = 2.0 * PI * crate::quadrature::I * gamma * ai(u.powf(2.0 / 3.0) * z).value;
            prop_assert!((a - b - ai_term).norm() < 1e-11 * (1.0 + a.norm() + b.norm()));
        }
    }
}
