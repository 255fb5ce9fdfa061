//! Contour integration in the complex plane.
//!
//! Paths are chains of lines, circular arcs, rays and caller-parameterised
//! curves. Finite pieces use adaptive Gauss–Kronrod (7/15) with bisection;
//! rays are truncated by doubling; closed circles use the trapezoidal rule.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Shorthand for the complex scalar type used throughout the crate.
pub type Cplx = Complex64;

/// Imaginary unit.
pub const I: Cplx = Cplx::new(0.0, 1.0);

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the Kronrod nodes with odd index (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 4000;
// Rounding level of a Kronrod estimate, in units of ε times the piece's L1 norm.
const NOISE_ULPS: f64 = 200.0;
const MAX_RAY_CHUNKS: usize = 200;
const MAX_CIRCLE_NODES: usize = 1 << 18;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("path is not contiguous between segments {0} and {1}")]
    NonContiguous(usize, usize),
    #[error("integrand does not decay along ray segment {0}")]
    RayDivergent(usize),
    #[error("tolerance {tol:e} not reached (estimated error {estimate:e})")]
    Tolerance { tol: f64, estimate: f64 },
    #[error("trapezoidal rule did not converge with {0} nodes")]
    CircleNotConverged(usize),
    #[error("evaluation point lies on or outside the contour")]
    OutsideContour,
    #[error("integrand returned a non-finite value")]
    NonFinite,
}

/// Parameterised curve: maps a real parameter to a point and its derivative.
pub type CurveFn = Arc<dyn Fn(f64) -> (Cplx, Cplx) + Send + Sync>;

/// One analytic piece of a [`ComplexPath`].
#[derive(Clone)]
pub enum PathSegment {
    Line {
        from: Cplx,
        to: Cplx,
    },
    /// Arc of a circle traversed from `start_angle` to `end_angle`; the sign of
    /// the difference fixes the orientation.
    Arc {
        center: Cplx,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    /// Ray leaving `start` towards infinity in direction `angle`.
    RayOut {
        start: Cplx,
        angle: f64,
    },
    /// Ray arriving at `end` from infinity along direction `angle` (the
    /// direction of the point at infinity as seen from `end`).
    RayIn {
        end: Cplx,
        angle: f64,
    },
    Curve {
        curve: CurveFn,
        t_start: f64,
        t_end: f64,
    },
}

impl fmt::Debug for PathSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line { from, to } => write!(f, "Line({from} -> {to})"),
            Self::Arc { center, radius, start_angle, end_angle } => {
                write!(f, "Arc(c={center}, r={radius}, {start_angle} -> {end_angle})")
            }
            Self::RayOut { start, angle } => write!(f, "RayOut({start}, arg {angle})"),
            Self::RayIn { end, angle } => write!(f, "RayIn(arg {angle}, -> {end})"),
            Self::Curve { t_start, t_end, .. } => write!(f, "Curve({t_start} -> {t_end})"),
        }
    }
}

impl PathSegment {
    pub fn line(from: Cplx, to: Cplx) -> Self {
        Self::Line { from, to }
    }

    pub fn arc(center: Cplx, radius: f64, start_angle: f64, end_angle: f64) -> Self {
        assert!(radius > 0.0, "arc radius must be positive");
        Self::Arc { center, radius, start_angle, end_angle }
    }

    pub fn ray_out(start: Cplx, angle: f64) -> Self {
        Self::RayOut { start, angle }
    }

    pub fn ray_in(end: Cplx, angle: f64) -> Self {
        Self::RayIn { end, angle }
    }

    pub fn curve(curve: CurveFn, t_start: f64, t_end: f64) -> Self {
        Self::Curve { curve, t_start, t_end }
    }

    /// First point, or `None` for a ray arriving from infinity.
    pub fn start(&self) -> Option<Cplx> {
        match self {
            Self::Line { from, .. } => Some(*from),
            Self::Arc { center, radius, start_angle, .. } => Some(center + Cplx::from_polar(*radius, *start_angle)),
            Self::RayOut { start, .. } => Some(*start),
            Self::RayIn { .. } => None,
            Self::Curve { curve, t_start, .. } => Some(curve(*t_start).0),
        }
    }

    /// Last point, or `None` for a ray leaving to infinity.
    pub fn end(&self) -> Option<Cplx> {
        match self {
            Self::Line { to, .. } => Some(*to),
            Self::Arc { center, radius, end_angle, .. } => Some(center + Cplx::from_polar(*radius, *end_angle)),
            Self::RayOut { .. } => None,
            Self::RayIn { end, .. } => Some(*end),
            Self::Curve { curve, t_end, .. } => Some(curve(*t_end).0),
        }
    }

    fn is_ray(&self) -> bool {
        matches!(self, Self::RayOut { .. } | Self::RayIn { .. })
    }

    /// Point and derivative for a parameter in `[0, 1]` (finite pieces) or
    /// `[0, ∞)` (rays, measured as distance from the finite endpoint).
    fn eval(&self, s: f64) -> (Cplx, Cplx) {
        match self {
            Self::Line { from, to } => (from + (to - from) * s, to - from),
            Self::Arc { center, radius, start_angle, end_angle } => {
                let span = end_angle - start_angle;
                let e = Cplx::from_polar(*radius, start_angle + span * s);
                (center + e, I * e * span)
            }
            Self::RayOut { start, angle } => {
                let d = Cplx::from_polar(1.0, *angle);
                (start + d * s, d)
            }
            // Traversed inward; the sign is applied by the caller.
            Self::RayIn { end, angle } => {
                let d = Cplx::from_polar(1.0, *angle);
                (end + d * s, d)
            }
            Self::Curve { curve, t_start, t_end } => {
                let span = t_end - t_start;
                let (p, dp) = curve(t_start + span * s);
                (p, dp * span)
            }
        }
    }

    fn orientation(&self) -> f64 {
        if matches!(self, Self::RayIn { .. }) {
            -1.0
        } else {
            1.0
        }
    }
}

/// Contiguous chain of path segments.
#[derive(Clone, Debug, Default)]
pub struct ComplexPath {
    pub segments: Vec<PathSegment>,
}

impl ComplexPath {
    pub fn new(segments: Vec<PathSegment>) -> Self {
        Self { segments }
    }

    pub fn single(segment: PathSegment) -> Self {
        Self { segments: vec![segment] }
    }

    pub fn push(&mut self, segment: PathSegment) -> &mut Self {
        self.segments.push(segment);
        self
    }

    /// Checks endpoint continuity and that rays sit only at the ends.
    pub fn validate(&self) -> Result<(), QuadError> {
        let n = self.segments.len();
        for (k, seg) in self.segments.iter().enumerate() {
            if matches!(seg, PathSegment::RayIn { .. }) && k != 0 {
                return Err(QuadError::NonContiguous(k.saturating_sub(1), k));
            }
            if matches!(seg, PathSegment::RayOut { .. }) && k + 1 != n {
                return Err(QuadError::NonContiguous(k, k + 1));
            }
        }
        for k in 1..n {
            let (Some(a), Some(b)) = (self.segments[k - 1].end(), self.segments[k].start()) else {
                return Err(QuadError::NonContiguous(k - 1, k));
            };
            if (a - b).norm() > 1e-9 * (1.0 + a.norm()) {
                return Err(QuadError::NonContiguous(k - 1, k));
            }
        }
        Ok(())
    }

    /// The path traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| match seg.clone() {
                PathSegment::Line { from, to } => PathSegment::Line { from: to, to: from },
                PathSegment::Arc { center, radius, start_angle, end_angle } => {
                    PathSegment::Arc { center, radius, start_angle: end_angle, end_angle: start_angle }
                }
                PathSegment::RayOut { start, angle } => PathSegment::RayIn { end: start, angle },
                PathSegment::RayIn { end, angle } => PathSegment::RayOut { start: end, angle },
                PathSegment::Curve { curve, t_start, t_end } => {
                    PathSegment::Curve { curve, t_start: t_end, t_end: t_start }
                }
            })
            .collect();
        Self { segments }
    }

    /// Evenly spaced sample points (in parameter) along the finite part of
    /// every segment; rays are sampled out to distance `ray_reach`.
    pub fn sample_points(&self, per_segment: usize, ray_reach: f64) -> Vec<Cplx> {
        let mut pts = Vec::with_capacity(per_segment * self.segments.len());
        for seg in &self.segments {
            let reach = if seg.is_ray() { ray_reach } else { 1.0 };
            let mut local: Vec<Cplx> =
                (0..=per_segment).map(|k| seg.eval(reach * k as f64 / per_segment as f64).0).collect();
            if matches!(seg, PathSegment::RayIn { .. }) {
                local.reverse();
            }
            pts.extend(local);
        }
        pts
    }
}

/// Magnitude that may be infinite; produced by path integrals of absolute
/// values and suprema when the weight fails to decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Finite(f64),
    Unbounded,
}

impl std::ops::Add for Magnitude {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Unbounded,
        }
    }
}

impl Magnitude {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a.max(b)),
            _ => Self::Unbounded,
        }
    }
}

/// Circle used by the trapezoidal rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Contour {
    pub center: Cplx,
    pub radius: f64,
    pub nodes: usize,
    /// Rotation of the first node, in radians.
    pub phase: f64,
    /// Relative agreement required between successive node doublings.
    pub tol: f64,
}

impl Contour {
    pub fn new(center: Cplx, radius: f64) -> Self {
        assert!(radius > 0.0, "contour radius must be positive");
        Self { center, radius, nodes: 64, phase: 0.0, tol: 1e-13 }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes.max(16);
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn contains(&self, z: Cplx) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn point(&self, theta: f64) -> Cplx {
        self.center + Cplx::from_polar(self.radius, theta)
    }
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: Cplx,
    err: f64,
    l1: f64,
}

fn kronrod_piece<F: Fn(f64) -> Cplx>(f: &F, a: f64, b: f64) -> Result<Piece, QuadError> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    let mut l1 = fc.norm() * KRONROD_WEIGHTS[7];
    for k in 0..7 {
        let dx = half * KRONROD_NODES[k];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        let sum = f1 + f2;
        kron += sum * KRONROD_WEIGHTS[k];
        l1 += (f1.norm() + f2.norm()) * KRONROD_WEIGHTS[k];
        if k % 2 == 1 {
            gauss += sum * GAUSS_WEIGHTS[k / 2];
        }
    }
    let value = kron * half;
    let l1 = l1 * half.abs();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QuadError::NonFinite);
    }
    let err = ((kron - gauss) * half).norm();
    Ok(Piece { a, b, value, err, l1 })
}

/// Adaptive integral of a complex function of a real variable over `[a, b]`.
/// Returns the value, the error estimate and the integral of the modulus.
pub fn integrate_real_interval<F: Fn(f64) -> Cplx>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(Cplx, f64, f64), QuadError> {
    let mut pieces = vec![kronrod_piece(&f, a, b)?];
    loop {
        let value: Cplx = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        let l1: f64 = pieces.iter().map(|p| p.l1).sum();
        let target = (tol * value.norm()).max(20.0 * f64::EPSILON * l1);
        // Estimates below a piece's own rounding level cannot be reduced further.
        let excess = |p: &Piece| (p.err - NOISE_ULPS * f64::EPSILON * p.l1).max(0.0);
        let reducible: f64 = pieces.iter().map(excess).sum();
        if err <= target || reducible <= target || l1 == 0.0 {
            return Ok((value, err, l1));
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(QuadError::Tolerance { tol, estimate: err / value.norm().max(f64::MIN_POSITIVE) });
        }
        let worst =
            pieces.iter().enumerate().max_by(|x, y| excess(x.1).total_cmp(&excess(y.1))).map(|(k, _)| k).unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        pieces.push(kronrod_piece(&f, p.a, m)?);
        pieces.push(kronrod_piece(&f, m, p.b)?);
    }
}

/// Result of integrating along a ray by doubling the truncation point.
struct RayOutcome {
    value: Cplx,
    err: f64,
}

fn integrate_ray<F: Fn(f64) -> Cplx>(f: F, tol: f64, idx: usize) -> Result<RayOutcome, QuadError> {
    let mut acc = Cplx::new(0.0, 0.0);
    let mut err = 0.0;
    let mut lo = 0.0;
    let mut width = 1.0;
    let mut quiet = 0;
    let mut previous = f64::INFINITY;
    let mut last = 0.0;
    for _ in 0..MAX_RAY_CHUNKS {
        let (c, e, _) = integrate_real_interval(&f, lo, lo + width, tol).map_err(|err| match err {
            QuadError::NonFinite => QuadError::RayDivergent(idx),
            other => other,
        })?;
        acc += c;
        err += e;
        lo += width;
        if lo >= 2.0 {
            width *= 2.0;
        }
        previous = if last == 0.0 { previous } else { last };
        last = c.norm();
        if last <= tol * acc.norm() || last == 0.0 {
            quiet += 1;
            if quiet >= 3 {
                let ratio = last / previous;
                let tail = if ratio < 1.0 { last * ratio / (1.0 - ratio) } else { last };
                return Ok(RayOutcome { value: acc, err: err + tail });
            }
        } else {
            quiet = 0;
        }
    }
    Err(QuadError::RayDivergent(idx))
}

/// Integral of `integrand(t) dt` along `path`, with relative tolerance `tol`.
pub fn integrate_path<F: Fn(Cplx) -> Cplx>(integrand: F, path: &ComplexPath, tol: f64) -> Result<Cplx, QuadError> {
    integrate_path_with_error(integrand, path, tol).map(|(v, _)| v)
}

/// Like [`integrate_path`] but also returns the summed error estimate.
pub fn integrate_path_with_error<F: Fn(Cplx) -> Cplx>(
    integrand: F,
    path: &ComplexPath,
    tol: f64,
) -> Result<(Cplx, f64), QuadError> {
    path.validate()?;
    let mut total = Cplx::new(0.0, 0.0);
    let mut err = 0.0;
    for (idx, seg) in path.segments.iter().enumerate() {
        let g = |s: f64| {
            let (t, dt) = seg.eval(s);
            integrand(t) * dt
        };
        let sign = seg.orientation();
        if seg.is_ray() {
            let out = integrate_ray(g, tol, idx)?;
            total += out.value * sign;
            err += out.err;
        } else {
            let (v, e, _) = integrate_real_interval(g, 0.0, 1.0, tol)?;
            total += v;
            err += e;
        }
    }
    Ok((total, err))
}

/// `∫ |weight(t)| |dt|` along `path`; [`Magnitude::Unbounded`] when a ray
/// integral fails to converge.
pub fn abs_integral<F: Fn(Cplx) -> Cplx>(weight: F, path: &ComplexPath, tol: f64) -> Result<Magnitude, QuadError> {
    path.validate()?;
    let mut total = 0.0;
    for (idx, seg) in path.segments.iter().enumerate() {
        let g = |s: f64| {
            let (t, dt) = seg.eval(s);
            let w = weight(t).norm() * dt.norm();
            Cplx::new(if w.is_nan() { f64::INFINITY } else { w }, 0.0)
        };
        let part = if seg.is_ray() {
            match integrate_ray(g, tol, idx) {
                Ok(out) => out.value.re + out.err,
                Err(QuadError::RayDivergent(_)) | Err(QuadError::NonFinite) => return Ok(Magnitude::Unbounded),
                Err(e) => return Err(e),
            }
        } else {
            match integrate_real_interval(g, 0.0, 1.0, tol) {
                Ok((v, e, _)) => v.re + e,
                Err(QuadError::NonFinite) => return Ok(Magnitude::Unbounded),
                Err(e) => return Err(e),
            }
        };
        if !part.is_finite() {
            return Ok(Magnitude::Unbounded);
        }
        total += part;
    }
    Ok(Magnitude::Finite(total))
}

fn golden_max<F: Fn(f64) -> f64>(h: &F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d);
        }
        if (b - a).abs() < 1e-12 * (1.0 + a.abs()) {
            break;
        }
    }
    fc.max(fd)
}

fn sup_on_interval<F: Fn(f64) -> f64>(h: &F, lo: f64, hi: f64, samples: usize) -> f64 {
    let step = (hi - lo) / samples as f64;
    let vals: Vec<f64> = (0..=samples).map(|k| h(lo + step * k as f64)).collect();
    let (kbest, &best) = vals.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("non-empty sample set");
    let a = lo + step * kbest.saturating_sub(1) as f64;
    let b = (lo + step * (kbest + 1) as f64).min(hi);
    best.max(golden_max(h, a, b))
}

/// Samples per segment used by [`sup_along_path`].
pub const SUP_SAMPLES: usize = 256;

/// Supremum of `|fn|` along `path`, by dense sampling plus golden-section
/// refinement around the best sample of each segment.
pub fn sup_along_path<F: Fn(Cplx) -> Cplx>(func: F, path: &ComplexPath) -> Result<Magnitude, QuadError> {
    path.validate()?;
    let mut best: f64 = 0.0;
    for seg in &path.segments {
        let h = |s: f64| {
            let v = func(seg.eval(s).0).norm();
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        if seg.is_ray() {
            let mut lo = 0.0;
            let mut width = 1.0;
            let mut quiet = 0;
            let mut seg_best: f64 = 0.0;
            let mut converged = false;
            for _ in 0..MAX_RAY_CHUNKS {
                let m = sup_on_interval(&h, lo, lo + width, 64);
                if !m.is_finite() {
                    return Ok(Magnitude::Unbounded);
                }
                if m <= seg_best {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                seg_best = seg_best.max(m);
                lo += width;
                if lo >= 2.0 {
                    width *= 2.0;
                }
                // Four chunks in a row that stay below the running maximum
                // while the end value has decayed.
                if quiet >= 4 && h(lo) <= 1e-3 * seg_best.max(f64::MIN_POSITIVE) {
                    converged = true;
                    break;
                }
                if seg_best == 0.0 && lo > 1e3 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Ok(Magnitude::Unbounded);
            }
            best = best.max(seg_best);
        } else {
            let m = sup_on_interval(&h, 0.0, 1.0, SUP_SAMPLES);
            if !m.is_finite() {
                return Ok(Magnitude::Unbounded);
            }
            best = best.max(m);
        }
    }
    Ok(Magnitude::Finite(best))
}

/// Trapezoidal rule for `∮ integrand(t) dt` on a positively oriented circle,
/// doubling the node count until successive values agree.
pub fn integrate_circle<F: Fn(Cplx) -> Cplx>(integrand: F, contour: &Contour) -> Result<Cplx, QuadError> {
    // Sum of f(t)(t - c) over nodes; ∮ f dt = i (2π / n) Σ f(t)(t - c).
    let term = |theta: f64| {
        let e = Cplx::from_polar(contour.radius, theta);
        integrand(contour.center + e) * e
    };
    let mut n = contour.nodes.max(16);
    let mut sum = Cplx::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let v = term(contour.phase + 2.0 * PI * k as f64 / n as f64);
        sum += v;
        abs_sum += v.norm();
    }
    let mut current = I * sum * (2.0 * PI / n as f64);
    while n < MAX_CIRCLE_NODES {
        // Add the midpoints of the existing nodes.
        for k in 0..n {
            let v = term(contour.phase + 2.0 * PI * (k as f64 + 0.5) / n as f64);
            sum += v;
            abs_sum += v.norm();
        }
        n *= 2;
        let next = I * sum * (2.0 * PI / n as f64);
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(QuadError::NonFinite);
        }
        let scale = next.norm().max(1e-3 * abs_sum * 2.0 * PI / n as f64);
        let diff = (next - current).norm();
        if diff <= contour.tol * scale || diff <= 4.0 * f64::EPSILON * abs_sum * 2.0 * PI / n as f64 {
            return Ok(next);
        }
        current = next;
    }
    Err(QuadError::CircleNotConverged(n))
}

/// Trapezoidal Fourier coefficients of `func` on `contour`: entry `k` holds
/// the coefficient of `((t - c)/r)^m` for `m = k` when `k < n/2` and
/// `m = k - n` otherwise. `n` must be a power of two.
pub fn circle_fourier<F: Fn(Cplx) -> Cplx>(func: F, contour: &Contour, n: usize) -> Vec<Cplx> {
    let samples: Vec<Cplx> =
        (0..n).map(|k| func(contour.point(contour.phase + 2.0 * PI * k as f64 / n as f64))).collect();
    (0..n)
        .map(|m| {
            let mut acc = Cplx::new(0.0, 0.0);
            for (k, s) in samples.iter().enumerate() {
                let theta = contour.phase + 2.0 * PI * k as f64 / n as f64;
                let mode = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
                acc += s * Cplx::from_polar(1.0, -mode * theta);
            }
            acc / n as f64
        })
        .collect()
}

/// `order! / (2πi) ∮ func(t) / (t - at)^(order+1) dt`.
pub fn cauchy_derivative<F: Fn(Cplx) -> Cplx>(
    func: F,
    at: Cplx,
    contour: &Contour,
    order: u32,
) -> Result<Cplx, QuadError> {
    if (at - contour.center).norm() >= contour.radius * (1.0 - 1e-12) {
        return Err(QuadError::OutsideContour);
    }
    let factorial: f64 = (1..=order).map(f64::from).product();
    let loop_integral = integrate_circle(|t| func(t) / (t - at).powu(order + 1), contour)?;
    Ok(loop_integral * factorial / (2.0 * PI * I))
}
