//! Scorer functions `Hi`, `Gi` and the scaled family `Wi^{(j,k)}`.
//!
//! `Hi(z) = π⁻¹ ∫₀^∞ exp(-t³/3 + z t) dt` is evaluated by quadrature along a
//! path chosen so the integrand never grows far beyond the result. Large-`|z|`
//! expansions carry certified remainder bounds.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::airy::Sector;
use crate::quadrature::{integrate_path, ComplexPath, Cplx, PathSegment, QuadError};

/// Default angular margin `δ` for sector checks, in radians.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Default relative tolerance for Scorer quadrature.
pub const DEFAULT_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScorerError {
    #[error("|arg(-z)| = {arg:.4} exceeds the admissible limit {limit:.4}")]
    Sector { arg: f64, limit: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositive(f64),
    #[error("argument must be nonzero")]
    Zero,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Index pair `(j, k)` selecting a fundamental solution and Scorer branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SectorPair {
    /// `(-1, 1)`, bounded in `S_{-1} ∪ S_1`.
    MinusPlus,
    /// `(0, 1)`, bounded in `S_0 ∪ S_1`.
    ZeroPlus,
    /// `(-1, 0)`, bounded in `S_{-1} ∪ S_0`.
    MinusZero,
}

impl SectorPair {
    pub const ALL: [SectorPair; 3] = [SectorPair::MinusPlus, SectorPair::ZeroPlus, SectorPair::MinusZero];

    pub fn indices(self) -> (i32, i32) {
        match self {
            Self::MinusPlus => (-1, 1),
            Self::ZeroPlus => (0, 1),
            Self::MinusZero => (-1, 0),
        }
    }

    pub fn sectors(self) -> (Sector, Sector) {
        let (j, k) = self.indices();
        (Sector::from_index(j).expect("valid index"), Sector::from_index(k).expect("valid index"))
    }

    pub fn from_indices(j: i32, k: i32) -> Option<Self> {
        match (j, k) {
            (-1, 1) => Some(Self::MinusPlus),
            (0, 1) => Some(Self::ZeroPlus),
            (-1, 0) => Some(Self::MinusZero),
            _ => None,
        }
    }

    /// `ρ = e^{2(j+k)πi/3}` with `Wi^{(j,k)}(z) = π ρ Hi(ρ z)`. This choice
    /// makes `Wi^{(j,k)}` bounded in `S_j ∪ S_k` and satisfies the three
    /// connection formulas with `Ai_1`, `Ai_{-1}` and `Ai`.
    pub fn rotation(self) -> Cplx {
        let (j, k) = self.indices();
        Cplx::from_polar(1.0, 2.0 * PI * f64::from(j + k) / 3.0)
    }

    /// The sector index not contained in the pair.
    pub fn missing(self) -> Sector {
        match self {
            Self::MinusPlus => Sector::Zero,
            Self::ZeroPlus => Sector::Minus,
            Self::MinusZero => Sector::Plus,
        }
    }
}

impl fmt::Display for SectorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (j, k) = self.indices();
        write!(f, "({j},{k})")
    }
}

impl std::str::FromStr for SectorPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(format!("expected a pair j,k, got '{s}'"));
        }
        let j: i32 = parts[0].parse().map_err(|_| format!("bad index '{}'", parts[0]))?;
        let k: i32 = parts[1].parse().map_err(|_| format!("bad index '{}'", parts[1]))?;
        Self::from_indices(j, k).ok_or_else(|| format!("unsupported pair ({j},{k})"))
    }
}

/// Floating-point resolution added to certified bounds when comparing two
/// double-precision evaluations: `8 ε_mach |reference|`.
pub fn rounding_floor(reference: Cplx) -> f64 {
    8.0 * f64::EPSILON * reference.norm()
}

/// Asymptotic value paired with a certified bound on its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundedValue {
    pub value: Cplx,
    pub bound: f64,
    pub order: usize,
}

fn hi_path(z: Cplx) -> ComplexPath {
    let origin = Cplx::new(0.0, 0.0);
    if z.re <= 0.0 {
        return ComplexPath::single(PathSegment::ray_out(origin, 0.0));
    }
    // Through the saddle t = √z, leaving along the steepest-descent direction.
    let saddle = z.sqrt();
    ComplexPath::new(vec![PathSegment::line(origin, saddle), PathSegment::ray_out(saddle, -z.arg() / 4.0)])
}

/// `Hi(z)` by quadrature of its defining integral.
pub fn hi_quadrature(z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let v = integrate_path(|t| (-t * t * t / 3.0 + z * t).exp(), &hi_path(z), tol)?;
    Ok(v / PI)
}

/// `Hi'(z)` by quadrature of the differentiated integral.
pub fn hi_prime_quadrature(z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let v = integrate_path(|t| t * (-t * t * t / 3.0 + z * t).exp(), &hi_path(z), tol)?;
    Ok(v / PI)
}

/// `(3n+a)! / (3^{n+1} (n+1)!)` for `a ∈ {3, 4}`.
fn factorial_ratio(n: usize, extra: usize) -> f64 {
    let top: f64 = (1..=3 * n + extra).map(|k| k as f64).product();
    let bottom: f64 = (1..=n + 1).map(|k| k as f64).product();
    top / (3f64.powi(n as i32 + 1) * bottom)
}

/// Effective distance `|z|` or `|z| cos(|θ| - π/6)`, `θ = arg(-z)`.
fn effective_modulus(z: Cplx, delta: f64) -> Result<f64, ScorerError> {
    if z.norm() == 0.0 {
        return Err(ScorerError::Zero);
    }
    let theta = (-z).arg().abs();
    let limit = 2.0 * PI / 3.0 - delta;
    if theta > limit {
        return Err(ScorerError::Sector { arg: theta, limit });
    }
    Ok(if theta <= PI / 6.0 { z.norm() } else { z.norm() * (theta - PI / 6.0).cos() })
}

/// Bound on the remainder `ε` in `Hi = -(πz)⁻¹ Σ_{k≤n} … + ε/π`.
pub fn hi_remainder_bound(z: Cplx, n: usize, delta: f64) -> Result<f64, ScorerError> {
    let r = effective_modulus(z, delta)?;
    Ok(factorial_ratio(n, 3) / r.powi(3 * n as i32 + 4))
}

/// Bound on the remainder `ε̃` in `Hi' = (πz²)⁻¹ Σ_{k≤n} … + ε̃/π`.
pub fn hi_prime_remainder_bound(z: Cplx, n: usize, delta: f64) -> Result<f64, ScorerError> {
    let r = effective_modulus(z, delta)?;
    Ok(factorial_ratio(n, 4) / r.powi(3 * n as i32 + 5))
}

/// `Σ_{k≤n} (3k)!/(k! (3w)^k)` with `w = z³`.
fn value_series(z3: Cplx, n: usize) -> Cplx {
    let mut term = Cplx::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        term *= (3.0 * kf + 1.0) * (3.0 * kf + 2.0) / z3;
        sum += term;
    }
    sum
}

/// `Σ_{k≤n} (3k+1)!/(k! (3w)^k)` with `w = z³`.
fn derivative_series(z3: Cplx, n: usize) -> Cplx {
    let mut term = Cplx::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        term *= (3.0 * kf + 2.0) * (3.0 * kf + 4.0) / z3;
        sum += term;
    }
    sum
}

pub fn hi_asymptotic(z: Cplx, n: usize) -> Result<BoundedValue, ScorerError> {
    hi_asymptotic_with_delta(z, n, DEFAULT_DELTA)
}

/// Truncated expansion of `Hi(z)` through `k = n` with the certified bound on
/// `|Hi - value|`.
pub fn hi_asymptotic_with_delta(z: Cplx, n: usize, delta: f64) -> Result<BoundedValue, ScorerError> {
    let bound = hi_remainder_bound(z, n, delta)? / PI;
    Ok(BoundedValue { value: -value_series(z * z * z, n) / (PI * z), bound, order: n })
}

pub fn hi_prime_asymptotic(z: Cplx, n: usize) -> Result<BoundedValue, ScorerError> {
    hi_prime_asymptotic_with_delta(z, n, DEFAULT_DELTA)
}

pub fn hi_prime_asymptotic_with_delta(z: Cplx, n: usize, delta: f64) -> Result<BoundedValue, ScorerError> {
    let bound = hi_prime_remainder_bound(z, n, delta)? / PI;
    Ok(BoundedValue { value: derivative_series(z * z * z, n) / (PI * z * z), bound, order: n })
}

/// `Gi(z) = ½e^{πi/3} Hi(z e^{-2πi/3}) + ½e^{-πi/3} Hi(z e^{2πi/3})`.
pub fn gi(z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let a = hi_quadrature(z * Cplx::from_polar(1.0, -2.0 * PI / 3.0), tol)?;
    let b = hi_quadrature(z * Cplx::from_polar(1.0, 2.0 * PI / 3.0), tol)?;
    Ok(0.5 * Cplx::from_polar(1.0, PI / 3.0) * a + 0.5 * Cplx::from_polar(1.0, -PI / 3.0) * b)
}

/// Derivative of [`gi`], differentiating the same identity.
pub fn gi_prime(z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let ra = Cplx::from_polar(1.0, -2.0 * PI / 3.0);
    let rb = Cplx::from_polar(1.0, 2.0 * PI / 3.0);
    let a = hi_prime_quadrature(z * ra, tol)? * ra;
    let b = hi_prime_quadrature(z * rb, tol)? * rb;
    Ok(0.5 * Cplx::from_polar(1.0, PI / 3.0) * a + 0.5 * Cplx::from_polar(1.0, -PI / 3.0) * b)
}

fn gi_power_factor(n: usize, extra: usize, exponent_of_three: f64, x: f64, power: i32) -> f64 {
    let top: f64 = (1..=3 * n + extra).map(|k| k as f64).product();
    let bottom: f64 = (1..=n + 1).map(|k| k as f64).product();
    top / (3f64.powf(exponent_of_three) * bottom * (0.5 * x).powi(power))
}

/// Expansion of `Gi(x)` for `x > 0` with its certified bound.
pub fn gi_asymptotic(x: f64, n: usize) -> Result<BoundedValue, ScorerError> {
    if x <= 0.0 {
        return Err(ScorerError::NonPositive(x));
    }
    let z = Cplx::new(x, 0.0);
    let raw = gi_power_factor(n, 3, 2.5 * n as f64 + 3.0, x, 3 * n as i32 + 4);
    Ok(BoundedValue { value: value_series(z * z * z, n) / (PI * z), bound: raw / PI, order: n })
}

/// Expansion of `Gi'(x)` for `x > 0` with its certified bound.
pub fn gi_prime_asymptotic(x: f64, n: usize) -> Result<BoundedValue, ScorerError> {
    if x <= 0.0 {
        return Err(ScorerError::NonPositive(x));
    }
    let z = Cplx::new(x, 0.0);
    let raw = gi_power_factor(n, 4, (5.0 * n as f64 + 7.0) / 2.0, x, 3 * n as i32 + 5);
    Ok(BoundedValue { value: -derivative_series(z * z * z, n) / (PI * z * z), bound: raw / PI, order: n })
}

/// `Wi^{(j,k)}(z)`.
pub fn wi(pair: SectorPair, z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let rho = pair.rotation();
    Ok(PI * rho * hi_quadrature(rho * z, tol)?)
}

/// `d/dz Wi^{(j,k)}(z)`.
pub fn wi_prime(pair: SectorPair, z: Cplx, tol: f64) -> Result<Cplx, ScorerError> {
    let rho = pair.rotation();
    Ok(PI * rho * rho * hi_prime_quadrature(rho * z, tol)?)
}

/// Expansions of `Wi^{(j,k)}(u^{2/3}ζ)` and of `Wi^{(j,k)'}` at the same
/// argument, in powers of `(u²ζ³)⁻¹`, with bounds transferred from the
/// `Hi` theorem at the rotated argument.
pub fn wi_scaled_asymptotic(
    pair: SectorPair,
    u: Cplx,
    zeta: Cplx,
    n: usize,
) -> Result<(BoundedValue, BoundedValue), ScorerError> {
    wi_scaled_asymptotic_with_delta(pair, u, zeta, n, DEFAULT_DELTA)
}

pub fn wi_scaled_asymptotic_with_delta(
    pair: SectorPair,
    u: Cplx,
    zeta: Cplx,
    n: usize,
    delta: f64,
) -> Result<(BoundedValue, BoundedValue), ScorerError> {
    let arg = u.powf(2.0 / 3.0) * zeta;
    let rotated = pair.rotation() * arg;
    let cube = u * u * zeta * zeta * zeta;
    let value =
        BoundedValue { value: -value_series(cube, n) / arg, bound: hi_remainder_bound(rotated, n, delta)?, order: n };
    let derivative = BoundedValue {
        value: derivative_series(cube, n) / (arg * arg),
        bound: hi_prime_remainder_bound(rotated, n, delta)?,
        order: n,
    };
    Ok((value, derivative))
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::type_complexity)]
mod tests {
    use super::*;
    use crate::airy::{ai, ai_rotated};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    // Arbitrary-precision reference values of Hi, Hi' and Gi.
    const HI_REFERENCE: &[((f64, f64), (f64, f64), (f64, f64))] = &[
        ((0.0, 0.0), (0.409_951_084_964_000_51, 0.0), (0.298_858_904_902_550_9, 0.0)),
        ((-10.0, 0.0), (0.031_768_535_282_502_272, 0.0), (0.003_158_462_474_539_502_6, 0.0)),
        ((3.0, 0.0), (13.923_100_094_807_092, 0.0), (22.963_850_832_604_528, 0.0)),
        (
            (1.0, 2.0),
            (-0.185_700_792_156_569_95, 0.467_521_901_857_493_54),
            (-0.496_177_046_911_842_45, 0.286_991_409_528_475_13),
        ),
        (
            (-4.0, 3.0),
            (0.051_700_844_228_874_887, 0.037_520_248_671_015_381),
            (0.004_360_422_003_163_952_7, 0.012_077_878_251_472_583),
        ),
        (
            (2.0, -6.0),
            (-0.029_981_021_369_492_423, -0.041_831_331_277_525_53),
            (-0.026_122_883_078_954_558, 0.037_088_605_672_049_628),
        ),
        (
            (20.0, 5.0),
            (-4.845_787_380_686_739_3e24, -1.854_152_150_549_946_2e24),
            (-2.074_562_834_812_536_5e25, -1.103_639_469_920_747_6e25),
        ),
        (
            (-30.0, -20.0),
            (0.007_345_877_916_586_667_5, -0.004_896_807_561_212_065_1),
            (9.421_546_692_514_171_8e-5, -2.260_104_556_222_521_8e-4),
        ),
    ];
    const GI_REFERENCE: &[(f64, f64, f64)] = &[
        (0.5, 0.244_721_043_276_558_19, 0.019_873_553_665_575_919),
        (1.0, 0.235_218_439_810_437_94, -0.048_437_775_261_504_293),
        (3.0, 0.114_228_868_923_139_92, -0.041_635_866_222_359_784),
        (5.0, 0.064_919_784_093_853_114, -0.013_859_490_077_326_984),
        (12.0, 0.026_556_892_713_512_411, -0.002_220_936_850_145_200_9),
    ];

    #[test]
    fn hi_reference_values() {
        for &((x, y), (hr, hi), (dr, di)) in HI_REFERENCE {
            let z = c(x, y);
            let v = hi_quadrature(z, DEFAULT_TOL).unwrap();
            let d = hi_prime_quadrature(z, DEFAULT_TOL).unwrap();
            assert!((v - c(hr, hi)).norm() <= 1e-12 * c(hr, hi).norm(), "Hi({z}) = {v}");
            assert!((d - c(dr, di)).norm() <= 1e-12 * c(dr, di).norm(), "Hi'({z}) = {d}");
        }
    }

    #[test]
    fn gi_reference_values() {
        for &(x, g, dg) in GI_REFERENCE {
            let v = gi(c(x, 0.0), DEFAULT_TOL).unwrap();
            let d = gi_prime(c(x, 0.0), DEFAULT_TOL).unwrap();
            assert!((v.re - g).abs() <= 1e-12 * g.abs().max(1e-3), "Gi({x}) = {v}");
            assert!((d.re - dg).abs() <= 1e-12 * dg.abs().max(1e-3), "Gi'({x}) = {d}");
        }
    }

    #[test]
    fn hi_at_origin_closed_form() {
        // 2 / (3^{7/6} Γ(2/3))
        let v = hi_quadrature(c(0.0, 0.0), DEFAULT_TOL).unwrap();
        assert!((v.re - 0.409_951_084_964_000_5).abs() < 1e-14);
    }

    #[test]
    fn hi_inhomogeneous_equation() {
        let z = c(1.0, 2.0);
        let h = 1e-4;
        let f = |w: Cplx| hi_quadrature(w, DEFAULT_TOL).unwrap();
        let second = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
        assert!((second - z * f(z) - 1.0 / PI).norm() < 1e-5);
    }

    #[test]
    fn spot_bound_at_minus_ten() {
        let z = c(-10.0, 0.0);
        assert!((hi_remainder_bound(z, 0, DEFAULT_DELTA).unwrap() - 2e-4).abs() < 1e-18);
        let a = hi_asymptotic(z, 0).unwrap();
        assert!((a.value.re - 1.0 / (10.0 * PI)).abs() < 1e-16);
        assert!((a.bound - 2e-4 / PI).abs() < 1e-18);
        let a1 = hi_asymptotic(z, 1).unwrap();
        assert!((a1.value.re - (1.0 - 2.0 / 1000.0) / (10.0 * PI)).abs() < 1e-16);
        let q = hi_quadrature(z, DEFAULT_TOL).unwrap();
        assert!((q - a.value).norm() <= a.bound);
        assert!((hi_prime_remainder_bound(z, 0, DEFAULT_DELTA).unwrap() - 8e-5).abs() < 1e-18);
    }

    #[test]
    fn series_coefficients() {
        // k = 1 term of the value series is 2/z³; k = 0 term of the primed series is 1.
        let w = c(2.0, 0.0);
        assert!((value_series(w, 1) - (1.0 + 2.0 / w)).norm() < 1e-15);
        assert!((derivative_series(w, 0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn hi_prime_against_difference_quotient() {
        let z = c(-8.0, 0.0);
        let h = 1e-4;
        let fd = (hi_quadrature(z + h, DEFAULT_TOL).unwrap() - hi_quadrature(z - h, DEFAULT_TOL).unwrap()) / (2.0 * h);
        let a = hi_prime_asymptotic(z, 2).unwrap();
        assert!((fd - a.value).norm() <= a.bound + 1e-9);
    }

    #[test]
    fn gi_bound_formula_and_validity() {
        let b = gi_asymptotic(5.0, 0).unwrap().bound;
        assert!((b * PI - 6.0 / (27.0 * 2.5f64.powi(4))).abs() < 1e-15);
        let a = gi_asymptotic(5.0, 3).unwrap();
        assert!((gi(c(5.0, 0.0), DEFAULT_TOL).unwrap() - a.value).norm() <= a.bound);
        assert!(gi_asymptotic(-1.0, 0).is_err());
    }

    #[test]
    fn gi_plus_hi_real_on_axis() {
        for x in [1.0, 2.0, 5.0] {
            let s = gi(c(x, 0.0), DEFAULT_TOL).unwrap() + hi_quadrature(c(x, 0.0), DEFAULT_TOL).unwrap();
            assert!(s.im.abs() < 1e-12 * s.norm().max(1.0));
        }
    }

    #[test]
    fn sector_violation_is_reported() {
        assert!(matches!(hi_asymptotic(c(10.0, 0.0), 1), Err(ScorerError::Sector { .. })));
    }

    #[test]
    fn wi_examples() {
        let tol = DEFAULT_TOL;
        let z = c(0.7, 0.2);
        let lhs = wi(SectorPair::ZeroPlus, z, tol).unwrap() - wi(SectorPair::MinusZero, z, tol).unwrap();
        assert!((lhs - 2.0 * PI * crate::quadrature::I * ai(z).value).norm() < 1e-12);
        let z = c(-1.3, 0.0);
        let lhs = wi(SectorPair::MinusPlus, z, tol).unwrap() - wi(SectorPair::ZeroPlus, z, tol).unwrap();
        let rhs = 2.0 * PI * Cplx::from_polar(1.0, -PI / 6.0) * ai_rotated(z, Sector::Plus).value;
        assert!((lhs - rhs).norm() < 1e-12);
        let w0 = wi(SectorPair::MinusPlus, c(0.0, 0.0), tol).unwrap();
        assert!((w0.re - PI * 0.409_951_084_964_000_5).abs() < 1e-13);
    }

    #[test]
    fn scaled_expansion_first_terms() {
        let u = c(10.0, 0.0);
        let zeta = c(-1.0, 0.0);
        let (v, _) = wi_scaled_asymptotic(SectorPair::MinusPlus, u, zeta, 1).unwrap();
        let arg = u.powf(2.0 / 3.0) * zeta;
        let expected = -(1.0 + 2.0 / (u * u * zeta * zeta * zeta)) / arg;
        assert!((v.value - expected).norm() < 1e-15);
        let exact = wi(SectorPair::MinusPlus, arg, DEFAULT_TOL).unwrap();
        assert!((v.value - exact).norm() <= v.bound);
    }

    #[test]
    fn scaled_expansion_rotation_consistency() {
        let u = c(12.0, 0.0);
        let zeta = Cplx::from_polar(0.8, 2.5);
        for pair in SectorPair::ALL {
            let Ok((v, d)) = wi_scaled_asymptotic(pair, u, zeta, 2) else { continue };
            let rho = pair.rotation();
            let (base, based) = wi_scaled_asymptotic(SectorPair::MinusPlus, u, zeta * rho, 2).unwrap();
            // Wi^{(j,k)}(Z) = ρ Wi^{(-1,1)}(ρZ) and Wi' = ρ² Wi^{(-1,1)'}(ρZ)
            assert!((v.value - rho * base.value).norm() < 1e-14);
            assert!((d.value - rho * rho * based.value).norm() < 1e-14);
        }
    }

    #[test]
    fn pair_parsing_round_trip() {
        for pair in SectorPair::ALL {
            assert_eq!(pair.to_string().parse::<SectorPair>().unwrap(), pair);
        }
        assert_eq!("0,1".parse::<SectorPair>().unwrap(), SectorPair::ZeroPlus);
        assert!("1,1".parse::<SectorPair>().is_err());
    }

    #[test]
    fn bound_decay_rate_in_modulus() {
        for n in 0..4usize {
            let b: Vec<f64> =
                [10.0, 20.0, 40.0].iter().map(|&r| hi_remainder_bound(c(-r, 0.0), n, DEFAULT_DELTA).unwrap()).collect();
            let slope = (b[2] / b[0]).ln() / 4f64.ln();
            let target = -(3.0 * n as f64 + 4.0);
            assert!((slope - target).abs() <= 0.05 * target.abs());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn asymptotic_within_bound(r in 5.0..50.0f64, theta in -(2.0 * PI / 3.0 - 0.05)..(2.0 * PI / 3.0 - 0.05), n in 0usize..6) {
            let z = -Cplx::from_polar(r, theta);
            let a = hi_asymptotic(z, n).unwrap();
            let q = hi_quadrature(z, DEFAULT_TOL).unwrap();
            prop_assert!((a.value - q).norm() <= a.bound + rounding_floor(q));
            let a = hi_prime_asymptotic(z, n).unwrap();
            let q = hi_prime_quadrature(z, DEFAULT_TOL).unwrap();
            prop_assert!((a.value - q).norm() <= a.bound + rounding_floor(q));
        }

        #[test]
        fn connection_formulas(r in 0.0..5.0f64, theta in -PI..PI) {
            let z = Cplx::from_polar(r, theta);
            let tol = DEFAULT_TOL;
            let w_mp = wi(SectorPair::MinusPlus, z, tol).unwrap();
            let w_zp = wi(SectorPair::ZeroPlus, z, tol).unwrap();
            let w_mz = wi(SectorPair::MinusZero, z, tol).unwrap();
            let a1 = 2.0 * PI * Cplx::from_polar(1.0, -PI / 6.0) * ai_rotated(z, Sector::Plus).value;
            let am = 2.0 * PI * Cplx::from_polar(1.0, PI / 6.0) * ai_rotated(z, Sector::Minus).value;
            let a0 = 2.0 * PI * crate::quadrature::I * ai(z).value;
            let scale = w_mp.norm().max(w_zp.norm()).max(w_mz.norm()).max(1.0);
            prop_assert!((w_mp - w_zp - a1).norm() < 1e-9 * scale);
            prop_assert!((w_mp - w_mz - am).norm() < 1e-9 * scale);
            prop_assert!((w_zp - w_mz - a0).norm() < 1e-9 * scale);
        }

        #[test]
        fn wi_solves_inhomogeneous_equation(r in 0.0..3.0f64, theta in -PI..PI) {
            let z = Cplx::from_polar(r, theta);
            let h = 1e-4;
            for pair in SectorPair::ALL {
                let f = |w: Cplx| wi(pair, w, DEFAULT_TOL).unwrap();
                let second = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
                prop_assert!((second - z * f(z) - 1.0).norm() < 1e-5 * f(z).norm().max(1.0));
            }
        }
    }
}
