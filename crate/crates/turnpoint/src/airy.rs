//! Complex Airy function `Ai` and its rotations `Ai_j(z) = Ai(z e^{-2πij/3})`.
//!
//! Evaluation regimes:
//! * Maclaurin series where it does not cancel catastrophically;
//! * the Poincaré expansion (optimally truncated) for `|z| > 8`;
//! * Taylor stepping of `y'' = z y` inward from `|z| = 10` in the recessive
//!   sector, where the power series would cancel;
//! * the three-term connection formula for `|arg z|` near or beyond `2π/3`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::quadrature::{Cplx, I};

/// `Ai(0)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// `-Ai'(0)`.
pub const AI_PRIME_ZERO_NEG: f64 = 0.258_819_403_792_806_8;

/// Radius beyond which the asymptotic expansion is used directly.
pub const SWITCH_RADIUS: f64 = 8.0;
const MARCH_START_RADIUS: f64 = 10.0;
const MAX_ASYMPTOTIC_TERMS: usize = 20;
// Largest tolerated cancellation exponent |ξ| + Re ξ for the power series.
const SERIES_CANCELLATION_LIMIT: f64 = 6.0;
const CONNECTION_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AiryMethod {
    Maclaurin,
    Asymptotic,
    TaylorMarch,
    Connection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AiryValue {
    pub value: Cplx,
    pub derivative: Cplx,
    pub argument: Cplx,
    pub method: AiryMethod,
}

/// Index `j ∈ {-1, 0, 1}` of the rotated Airy function `Ai_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sector {
    Minus,
    Zero,
    Plus,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::Minus, Sector::Zero, Sector::Plus];

    pub fn index(self) -> i32 {
        match self {
            Self::Minus => -1,
            Self::Zero => 0,
            Self::Plus => 1,
        }
    }

    pub fn from_index(j: i32) -> Option<Self> {
        match j {
            -1 => Some(Self::Minus),
            0 => Some(Self::Zero),
            1 => Some(Self::Plus),
            _ => None,
        }
    }

    /// `e^{-2πij/3}`.
    pub fn rotation(self) -> Cplx {
        Cplx::from_polar(1.0, -2.0 * PI * f64::from(self.index()) / 3.0)
    }

    /// Whether `z` lies in the closed sector `|arg(z e^{-2πij/3})| ≤ π/3`.
    pub fn contains(self, z: Cplx) -> bool {
        (z * self.rotation()).arg().abs() <= PI / 3.0
    }
}

fn maclaurin(z: Cplx) -> (Cplx, Cplx) {
    let z3 = z * z * z;
    let one = Cplx::new(1.0, 0.0);
    // f = Σ z^{3k} 1·4···(3k-2)/(3k)!,  g = Σ z^{3k+1} 2·5···(3k-1)/(3k+1)!
    let (mut f, mut g) = (one, z);
    let (mut tf, mut tg) = (one, z);
    // f' = Σ_{k≥1} z^{3k-1} 1·4···(3k-2)/(3k-1)!,  g' = Σ z^{3k} 2·5···(3k-1)/(3k)!
    let mut df = Cplx::new(0.0, 0.0);
    let mut tdf = z * z / 2.0;
    let (mut dg, mut tdg) = (one, one);
    for k in 0..400 {
        let kf = k as f64;
        if k >= 1 {
            df += tdf;
            tdf *= z3 / ((3.0 * kf) * (3.0 * kf + 2.0));
        }
        tf *= z3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tdg *= z3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        dg += tdg;
        let small = |t: Cplx, s: Cplx| t.norm() <= 1e-18 * s.norm().max(1e-300);
        if k > 2 && small(tf, f) && small(tg, g) && small(tdg, dg) && small(tdf, df) {
            break;
        }
    }
    (AI_ZERO * f - AI_PRIME_ZERO_NEG * g, AI_ZERO * df - AI_PRIME_ZERO_NEG * dg)
}

/// Optimally truncated asymptotic expansion; valid for `|arg z| < π`.
fn asymptotic(z: Cplx) -> (Cplx, Cplx) {
    let xi = z.powf(1.5) * (2.0 / 3.0);
    let inv = 1.0 / xi;
    let one = Cplx::new(1.0, 0.0);
    let (mut su, mut sv) = (one, one);
    let mut uk = 1.0;
    let mut power = one;
    let mut prev_term = f64::INFINITY;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let vk = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk;
        power *= -inv;
        let term = power * uk;
        if term.norm() > prev_term {
            break;
        }
        prev_term = term.norm();
        su += term;
        sv += power * vk;
        if prev_term < 1e-17 * su.norm() {
            break;
        }
    }
    let e = (-xi).exp() / (2.0 * PI.sqrt());
    let q = z.powf(0.25);
    (e / q * su, -e * q * sv)
}

/// Steps `y'' = z y` from `start` to `end` by local Taylor series.
fn taylor_march(start: Cplx, mut y: Cplx, mut dy: Cplx, end: Cplx) -> (Cplx, Cplx) {
    let steps = ((end - start).norm() / 0.5).ceil().max(1.0) as usize;
    let h = (end - start) / steps as f64;
    let mut c = start;
    for _ in 0..steps {
        // a_{k+2} (k+2)(k+1) = c a_k + a_{k-1}
        let (mut am1, mut a0, mut a1) = (Cplx::new(0.0, 0.0), y, dy);
        let (mut val, mut der) = (a0 + a1 * h, a1);
        let mut hp = h; // h^{k+1} for the term a_{k+2}
        for k in 0..80 {
            let kf = k as f64;
            let a2 = (c * a0 + am1) / ((kf + 2.0) * (kf + 1.0));
            let term_d = a2 * (kf + 2.0) * hp;
            hp *= h;
            let term = a2 * hp;
            val += term;
            der += term_d;
            am1 = a0;
            a0 = a1;
            a1 = a2;
            if k > 4 && term.norm() < 1e-18 * val.norm() && term_d.norm() < 1e-18 * der.norm() {
                break;
            }
        }
        y = val;
        dy = der;
        c += h;
    }
    (y, dy)
}

fn direct(z: Cplx) -> (Cplx, Cplx, AiryMethod) {
    let r = z.norm();
    if r > SWITCH_RADIUS {
        let (v, d) = asymptotic(z);
        return (v, d, AiryMethod::Asymptotic);
    }
    let xi = z.powf(1.5) * (2.0 / 3.0);
    if z.arg().abs() > PI / 2.0 || xi.norm() + xi.re <= SERIES_CANCELLATION_LIMIT {
        let (v, d) = maclaurin(z);
        return (v, d, AiryMethod::Maclaurin);
    }
    let start = z * (MARCH_START_RADIUS / r);
    let (y, dy) = asymptotic(start);
    let (v, d) = taylor_march(start, y, dy, z);
    (v, d, AiryMethod::TaylorMarch)
}

/// `Ai(z)` and `Ai'(z)`.
pub fn ai(z: Cplx) -> AiryValue {
    let theta = z.arg().abs();
    if z.norm() > SWITCH_RADIUS && theta > 2.0 * PI / 3.0 - CONNECTION_MARGIN {
        // Ai(z) = -ω Ai(ωz) - ω² Ai(ω²z), ω = e^{2πi/3}
        let w = Cplx::from_polar(1.0, 2.0 * PI / 3.0);
        let w2 = w * w;
        let (a1, d1, _) = direct(w * z);
        let (a2, d2, _) = direct(w2 * z);
        return AiryValue {
            value: -w * a1 - w2 * a2,
            derivative: -w2 * d1 - w * d2,
            argument: z,
            method: AiryMethod::Connection,
        };
    }
    let (value, derivative, method) = direct(z);
    AiryValue { value, derivative, argument: z, method }
}

/// `Ai_j(z) = Ai(z e^{-2πij/3})` and its derivative with respect to `z`.
pub fn ai_rotated(z: Cplx, j: Sector) -> AiryValue {
    let rot = j.rotation();
    let inner = ai(z * rot);
    AiryValue { value: inner.value, derivative: inner.derivative * rot, argument: z, method: inner.method }
}

/// `𝒲{f, g} = f g' - f' g`.
pub fn wronskian(f: &AiryValue, g: &AiryValue) -> Cplx {
    f.value * g.derivative - f.derivative * g.value
}

/// `e^{iπ/6}/(2π)`-type constants: `𝒲{Ai, Ai_{±1}} = e^{±πi/6}/(2π)`.
pub fn wronskian_ai_rotated(j: Sector) -> Cplx {
    match j {
        Sector::Plus => Cplx::from_polar(1.0 / (2.0 * PI), PI / 6.0),
        Sector::Minus => Cplx::from_polar(1.0 / (2.0 * PI), -PI / 6.0),
        Sector::Zero => Cplx::new(0.0, 0.0),
    }
}

/// `𝒲{Ai_1, Ai_{-1}} = 1/(2πi)`.
pub fn wronskian_plus_minus() -> Cplx {
    1.0 / (2.0 * PI * I)
}
