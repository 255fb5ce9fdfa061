//! Truncated power series with complex coefficients.
//!
//! Used to carry local Taylor data of problem functions through the
//! coefficient recursions without nested contour differentiation.

use std::ops::{Add, Mul, Neg, Sub};

use crate::quadrature::Cplx;

/// `Σ coeffs[k] h^k`, truncated; the expansion point is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub coeffs: Vec<Cplx>,
}

impl Series {
    pub fn new(coeffs: Vec<Cplx>) -> Self {
        Self { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Self { coeffs: vec![Cplx::new(0.0, 0.0); len] }
    }

    pub fn constant(value: Cplx, len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.coeffs[0] = value;
        }
        s
    }

    /// The series of `h` itself.
    pub fn identity(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 1 {
            s.coeffs[1] = Cplx::new(1.0, 0.0);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at the expansion point.
    pub fn value(&self) -> Cplx {
        self.coeffs.first().copied().unwrap_or_default()
    }

    /// `k!` times coefficient `k`.
    pub fn derivative_at_center(&self, order: usize) -> Cplx {
        let factorial: f64 = (1..=order).map(|k| k as f64).product();
        self.coeffs.get(order).copied().unwrap_or_default() * factorial
    }

    pub fn truncate(mut self, len: usize) -> Self {
        self.coeffs.truncate(len);
        self
    }

    pub fn eval(&self, h: Cplx) -> Cplx {
        self.coeffs.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, &c| acc * h + c)
    }

    pub fn derivative(&self) -> Self {
        Self { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect() }
    }

    pub fn scale(&self, factor: Cplx) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * factor).collect() }
    }

    pub fn recip(&self) -> Self {
        let n = self.len();
        let mut out = vec![Cplx::new(0.0, 0.0); n];
        if n == 0 {
            return Self { coeffs: out };
        }
        let inv0 = 1.0 / self.coeffs[0];
        out[0] = inv0;
        for k in 1..n {
            let acc: Cplx = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -acc * inv0;
        }
        Self { coeffs: out }
    }

    /// `self^exponent` with the leading coefficient `root0` selecting the branch.
    pub fn powf_with(&self, exponent: f64, root0: Cplx) -> Self {
        let n = self.len();
        let mut out = vec![Cplx::new(0.0, 0.0); n];
        if n == 0 {
            return Self { coeffs: out };
        }
        out[0] = root0;
        let f0 = self.coeffs[0];
        for k in 1..n {
            let acc: Cplx = (1..=k).map(|j| self.coeffs[j] * out[k - j] * (exponent * j as f64 - (k - j) as f64)).sum();
            out[k] = acc / (k as f64 * f0);
        }
        Self { coeffs: out }
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut out = vec![Cplx::new(0.0, 0.0); n];
        if n == 0 {
            return Self { coeffs: out };
        }
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let acc: Cplx = (1..=k).map(|j| self.coeffs[j] * out[k - j] * j as f64).sum();
            out[k] = acc / k as f64;
        }
        Self { coeffs: out }
    }

    /// `ln(1 + self)` for a series with zero constant term.
    pub fn ln_1p(&self) -> Self {
        let n = self.len();
        let mut out = vec![Cplx::new(0.0, 0.0); n];
        for k in 1..n {
            let acc: Cplx = (1..k).map(|j| out[j] * self.coeffs[k - j] * j as f64).sum();
            out[k] = self.coeffs[k] - acc / k as f64;
        }
        Self { coeffs: out }
    }

    /// Coefficients of `P(c + h)` for a polynomial given in ascending powers.
    pub fn shifted_polynomial(poly: &[Cplx], center: Cplx, len: usize) -> Self {
        let mut shifted = poly.to_vec();
        // Repeated synthetic division by (z - c).
        let deg = shifted.len();
        for i in 0..deg {
            for j in (i..deg.saturating_sub(1)).rev() {
                let carry = shifted[j + 1] * center;
                shifted[j] += carry;
            }
        }
        shifted.resize(len.max(1), Cplx::new(0.0, 0.0));
        shifted.truncate(len);
        Self { coeffs: shifted }
    }

    /// `e^{α h}` truncated.
    pub fn exponential(alpha: Cplx, len: usize) -> Self {
        let mut out = vec![Cplx::new(0.0, 0.0); len];
        let mut term = Cplx::new(1.0, 0.0);
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                term = term * alpha / k as f64;
            }
            *slot = term;
        }
        Self { coeffs: out }
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series { coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect() }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series { coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series { coeffs: (0..n).map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum()).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(Cplx::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Cplx {
        Cplx::new(re, 0.0)
    }

    #[test]
    fn shifted_polynomial_matches_binomial() {
        // (2 + h)² = 4 + 4h + h²
        let s = Series::shifted_polynomial(&[c(0.0), c(0.0), c(1.0)], c(2.0), 4);
        assert_eq!(s.coeffs, vec![c(4.0), c(4.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn powers_and_reciprocals() {
        // 1 + h
        let s = Series::new(vec![c(1.0), c(1.0), c(0.0), c(0.0), c(0.0)]);
        let r = s.recip();
        assert_eq!(r.coeffs, vec![c(1.0), c(-1.0), c(1.0), c(-1.0), c(1.0)]);
        let half = s.powf_with(0.5, c(1.0));
        let squared = &half * &half;
        for (a, b) in squared.coeffs.iter().zip(&s.coeffs) {
            assert!((a - b).norm() < 1e-15);
        }
        let neg = s.powf_with(0.5, c(-1.0));
        assert!((neg.coeffs[1] + 0.5).norm() < 1e-15);
    }

    #[test]
    fn exp_and_log_are_inverse() {
        let y = Series::new(vec![c(0.0), c(0.3), c(-0.2), c(0.1), c(0.05)]);
        let l = y.ln_1p();
        let back = l.exp();
        assert!((back.coeffs[0] - 1.0).norm() < 1e-15);
        for k in 1..5 {
            assert!((back.coeffs[k] - y.coeffs[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_and_eval() {
        let s = Series::exponential(c(2.0), 20);
        assert!((s.eval(c(0.5)) - c(1.0f64.exp())).norm() < 1e-12);
        assert!((s.derivative().eval(c(0.5)) - c(2.0 * 1.0f64.exp())).norm() < 1e-12);
        assert!((s.derivative_at_center(3) - c(8.0)).norm() < 1e-13);
    }
}
