//! Frequency-domain function rules and the elementary operators on them.
//!
//! A [`SpectralFunction`] represents `f` through an evaluable rule for its
//! Fourier transform `fhat` (convention
//! `fhat(xi) = int f(x) e^{-2 pi i x.xi} dx`). Operators — dyadic dilation,
//! L1-normalized dilation, generic multipliers — are exact rule
//! transformations; discretization only enters when a norm samples the rule
//! on a lattice.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::util::{pow2, smooth_step};

type Rule = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Axis-aligned box in frequency space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        xi.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| x >= l && x <= h)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let map = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect();
        if factor >= 0.0 {
            Self { lo: map(&self.lo), hi: map(&self.hi) }
        } else {
            Self { lo: map(&self.hi), hi: map(&self.lo) }
        }
    }

    pub fn intersect(&self, other: &BoxRegion) -> Self {
        let lo = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        Self { lo, hi }
    }
}

/// Decay information used for truncation-error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayHint {
    /// `|fhat(xi)| <~ (1+|xi|)^-rate`.
    Polynomial { rate: f64 },
    /// `|fhat(xi)| <~ exp(-pi |xi/scale|^2)`.
    Gaussian { scale: f64 },
}

/// A function represented by an evaluable frequency-domain rule.
#[derive(Clone)]
pub struct SpectralFunction {
    rule: Rule,
    dim: usize,
    support_hint: Option<BoxRegion>,
    decay_hint: Option<DecayHint>,
    /// Characteristic length of frequency features, used by scale-adapted
    /// quadrature to pick per-cell resolutions. Default 1.
    freq_scale: f64,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("dim", &self.dim)
            .field("support_hint", &self.support_hint)
            .field("decay_hint", &self.decay_hint)
            .field("freq_scale", &self.freq_scale)
            .finish_non_exhaustive()
    }
}

impl SpectralFunction {
    pub fn from_rule(
        dim: usize,
        rule: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            rule: Arc::new(rule),
            dim,
            support_hint: None,
            decay_hint: None,
            freq_scale: 1.0,
        }
    }

    pub fn with_support(mut self, support: BoxRegion) -> Self {
        assert_eq!(support.lo.len(), self.dim);
        self.support_hint = Some(support);
        self
    }

    pub fn with_decay(mut self, decay: DecayHint) -> Self {
        self.decay_hint = Some(decay);
        self
    }

    pub fn with_freq_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0);
        self.freq_scale = scale;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_hint(&self) -> Option<&BoxRegion> {
        self.support_hint.as_ref()
    }

    pub fn decay_hint(&self) -> Option<DecayHint> {
        self.decay_hint
    }

    pub fn freq_scale(&self) -> f64 {
        self.freq_scale
    }

    /// Evaluate `fhat` at a frequency point.
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dim);
        if let Some(b) = &self.support_hint {
            if !b.contains(xi) {
                return Complex64::default();
            }
        }
        (self.rule)(xi)
    }

    /// The zero function.
    pub fn zero(dim: usize) -> Self {
        Self::from_rule(dim, |_| Complex64::default())
            .with_support(BoxRegion::cube(dim, 0.0, 0.0))
    }

    /// Pointwise sum of two rules.
    pub fn add(&self, other: &SpectralFunction) -> Self {
        assert_eq!(self.dim, other.dim);
        let (f, g) = (self.clone(), other.clone());
        let mut out = Self::from_rule(self.dim, move |xi| f.eval(xi) + g.eval(xi));
        out.freq_scale = self.freq_scale.min(other.freq_scale);
        out
    }

    /// Pointwise scalar multiple of a rule.
    pub fn scale(&self, c: Complex64) -> Self {
        let f = self.clone();
        let mut out = Self::from_rule(self.dim, move |xi| f.eval(xi) * c);
        out.support_hint = self.support_hint.clone();
        out.decay_hint = self.decay_hint;
        out.freq_scale = self.freq_scale;
        out
    }

    /// Sample the rule on the frequency lattice of `grid`.
    pub fn sample(&self, grid: &GridSpec) -> Result<FreqField> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        let total = grid.total_points();
        let mut values = vec![Complex64::default(); total];
        let mut idx = vec![0i64; self.dim];
        let mut xi = vec![0f64; self.dim];
        for (flat, v) in values.iter_mut().enumerate() {
            grid.decode(flat, &mut idx);
            for (c, &n) in xi.iter_mut().zip(idx.iter()) {
                *c = grid.freq_coord(n);
            }
            *v = self.eval(&xi);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample);
            }
        }
        Ok(FreqField { grid: *grid, values })
    }
}

/// Frequency samples of a function on a lattice.
#[derive(Debug, Clone)]
pub struct FreqField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl FreqField {
    #[inline]
    pub fn at(&self, signed: &[i64]) -> Complex64 {
        self.values[self.grid.encode(signed)]
    }

    /// Wrap the samples as a rule via nearest-lattice-point lookup.
    ///
    /// Exact at the lattice points of the field's own grid (the only
    /// points the lattice-route norms evaluate); off-lattice evaluation
    /// is piecewise constant.
    pub fn into_function(self) -> SpectralFunction {
        let grid = self.grid;
        let ext = pow2(grid.b());
        let half = -(grid.index_min());
        let dxi = grid.dxi();
        let d = grid.dim();
        SpectralFunction::from_rule(d, move |xi| {
            let mut signed = vec![0i64; xi.len()];
            for (s, &c) in signed.iter_mut().zip(xi) {
                let n = (c / dxi - 0.5).round() as i64;
                if n < -half || n >= half {
                    return Complex64::default();
                }
                *s = n;
            }
            self.at(&signed)
        })
        .with_support(BoxRegion::cube(d, -ext, ext))
    }
}

/// Dyadic dilation on the physical side, `f -> f(2^j0 x)`, returned as the
/// frequency rule `xi -> 2^{-j0 d} fhat(2^{-j0} xi)`.
pub fn dilate_dyadic(f: &SpectralFunction, j0: i64) -> SpectralFunction {
    if j0 == 0 {
        return f.clone();
    }
    let lambda_inv = pow2(-j0);
    let amp = pow2(-j0 * f.dim() as i64);
    let inner = f.clone();
    let d = f.dim();
    let mut out = SpectralFunction::from_rule(d, move |xi| {
        let scaled: Vec<f64> = xi.iter().map(|c| c * lambda_inv).collect();
        inner.eval(&scaled) * amp
    });
    out.support_hint = f.support_hint().map(|b| b.scaled(pow2(j0)));
    out.decay_hint = f.decay_hint().map(|h| match h {
        DecayHint::Polynomial { rate } => DecayHint::Polynomial { rate },
        DecayHint::Gaussian { scale } => DecayHint::Gaussian { scale: scale * pow2(j0) },
    });
    out.freq_scale = f.freq_scale() * pow2(j0);
    out
}

/// L1-normalized dyadic dilation `f -> 2^{-jd} f(2^{-j} x)`, i.e. the
/// frequency rule `xi -> fhat(2^j xi)`.
pub fn dilate_l1(f: &SpectralFunction, j: i64) -> SpectralFunction {
    if j == 0 {
        return f.clone();
    }
    let lambda = pow2(j);
    let inner = f.clone();
    let d = f.dim();
    let mut out = SpectralFunction::from_rule(d, move |xi| {
        let scaled: Vec<f64> = xi.iter().map(|c| c * lambda).collect();
        inner.eval(&scaled)
    });
    out.support_hint = f.support_hint().map(|b| b.scaled(pow2(-j)));
    out.decay_hint = f.decay_hint().map(|h| match h {
        DecayHint::Polynomial { rate } => DecayHint::Polynomial { rate },
        DecayHint::Gaussian { scale } => DecayHint::Gaussian { scale: scale * pow2(-j) },
    });
    out.freq_scale = f.freq_scale() * pow2(-j);
    out
}

/// Pointwise Fourier multiplier `fhat -> m * fhat`.
pub fn apply_multiplier(
    f: &SpectralFunction,
    m: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
) -> SpectralFunction {
    apply_multiplier_with_support(f, m, None)
}

/// Multiplier with a known support box, intersected with the input's hint.
pub fn apply_multiplier_with_support(
    f: &SpectralFunction,
    m: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    m_support: Option<BoxRegion>,
) -> SpectralFunction {
    let inner = f.clone();
    let d = f.dim();
    let mut out = SpectralFunction::from_rule(d, move |xi| inner.eval(xi) * m(xi));
    out.support_hint = match (f.support_hint(), m_support) {
        (Some(a), Some(b)) => Some(a.intersect(&b)),
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    out.decay_hint = f.decay_hint();
    out.freq_scale = f.freq_scale();
    out
}

/// Named test-function kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticKind {
    /// `fhat(xi) = exp(-pi |xi|^2)`; equals its own transform.
    Gaussian,
    /// `fhat = 1` on `[-1/2, 1/2)^d`, 0 elsewhere (a sinc in space).
    CubeIndicator,
    /// `fhat(xi) = prod_i sinc(xi_i)`; the cube indicator in space.
    SincDual,
    /// `fhat(xi) = |xi|^{-d/2} |ln |xi||^{-1/2}` on `(0, 1/2)^d`, 0 outside
    /// and at every point with a zero coordinate or `|ln |xi|| = 0`.
    LogSingular,
    /// Smooth band-limited noise supported in `box_region`, reproducible
    /// from `seed`.
    RandomBandlimited { seed: u64, box_region: BoxRegion },
}

/// Construct a named test function.
pub fn synthesize(kind: SyntheticKind, dim: usize) -> Result<SpectralFunction> {
    if dim == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let f = match kind {
        SyntheticKind::Gaussian => SpectralFunction::from_rule(dim, |xi| {
            let n2: f64 = xi.iter().map(|c| c * c).sum();
            Complex64::new((-std::f64::consts::PI * n2).exp(), 0.0)
        })
        .with_decay(DecayHint::Gaussian { scale: 1.0 }),

        SyntheticKind::CubeIndicator => SpectralFunction::from_rule(dim, |xi| {
            let inside = xi.iter().all(|c| (-0.5..0.5).contains(c));
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .with_support(BoxRegion::cube(dim, -0.5, 0.5)),

        SyntheticKind::SincDual => SpectralFunction::from_rule(dim, |xi| {
            let v: f64 = xi
                .iter()
                .map(|&c| {
                    if c == 0.0 {
                        1.0
                    } else {
                        let t = std::f64::consts::PI * c;
                        t.sin() / t
                    }
                })
                .product();
            Complex64::new(v, 0.0)
        })
        .with_decay(DecayHint::Polynomial { rate: 1.0 }),

        SyntheticKind::LogSingular => {
            let d = dim as f64;
            SpectralFunction::from_rule(dim, move |xi| {
                if xi.iter().any(|&c| c <= 0.0 || c >= 0.5) {
                    return Complex64::default();
                }
                let r = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
                let log_abs = r.ln().abs();
                if log_abs == 0.0 {
                    return Complex64::default();
                }
                Complex64::new(r.powf(-d / 2.0) / log_abs.sqrt(), 0.0)
            })
            .with_support(BoxRegion::cube(dim, 0.0, 0.5))
        }

        SyntheticKind::RandomBandlimited { seed, box_region } => {
            if box_region.lo.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: box_region.lo.len(),
                });
            }
            random_bandlimited(dim, seed, box_region)
        }
    };
    Ok(f)
}

/// Smooth bump on `[lo, hi]` built from the smooth step; 1 on the middle
/// half, 0 outside.
fn edge_window(t: f64, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    let rise = smooth_step(4.0 * (t - lo) / w);
    let fall = smooth_step(4.0 * (hi - t) / w);
    rise * fall
}

fn random_bandlimited(dim: usize, seed: u64, box_region: BoxRegion) -> SpectralFunction {
    const MODES: usize = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Per-axis trigonometric polynomials with random complex coefficients.
    let mut coeffs: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        coeffs.push(
            (0..MODES)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
    }
    let region = box_region.clone();
    let min_width = region
        .lo
        .iter()
        .zip(&region.hi)
        .map(|(l, h)| h - l)
        .fold(f64::INFINITY, f64::min);
    SpectralFunction::from_rule(dim, move |xi| {
        let mut value = Complex64::new(1.0, 0.0);
        for ax in 0..xi.len() {
            let (lo, hi) = (region.lo[ax], region.hi[ax]);
            let window = edge_window(xi[ax], lo, hi);
            if window == 0.0 {
                return Complex64::default();
            }
            let theta = (xi[ax] - lo) / (hi - lo);
            let mut axis = Complex64::default();
            for (m, c) in coeffs[ax].iter().enumerate() {
                let phase = 2.0 * std::f64::consts::PI * (m as f64 + 1.0) * theta;
                axis += c * Complex64::from_polar(1.0, phase);
            }
            value *= axis * window;
        }
        value
    })
    .with_support(box_region)
    .with_freq_scale((min_width / MODES as f64).max(1e-3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_at_zero() {
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        assert_eq!(f.eval(&[0.0]), c(1.0));
        let f2 = synthesize(SyntheticKind::Gaussian, 2).unwrap();
        assert!((f2.eval(&[0.3, -0.4]).re - (-std::f64::consts::PI * 0.25).exp()).abs() < 1e-15);
    }

    #[test]
    fn log_singular_value() {
        let g = synthesize(SyntheticKind::LogSingular, 1).unwrap();
        let expected = 2.0 / (2.0 * std::f64::consts::LN_2).sqrt();
        assert!((g.eval(&[0.25]).re - expected).abs() < 1e-12);
        assert!((g.eval(&[0.25]).re - 1.6986).abs() < 1e-4);
        assert_eq!(g.eval(&[0.0]), c(0.0));
        assert_eq!(g.eval(&[0.7]), c(0.0));
        assert_eq!(g.eval(&[-0.25]), c(0.0));
    }

    #[test]
    fn cube_indicator_support() {
        let f = synthesize(SyntheticKind::CubeIndicator, 1).unwrap();
        assert_eq!(f.eval(&[0.7]), c(0.0));
        assert_eq!(f.eval(&[0.3]), c(1.0));
    }

    #[test]
    fn sinc_dual_center() {
        let f = synthesize(SyntheticKind::SincDual, 2).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]), c(1.0));
        assert!(f.eval(&[1.0, 0.5]).re.abs() < 1e-15);
    }

    #[test]
    fn dilate_dyadic_identity_and_value() {
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let same = dilate_dyadic(&f, 0);
        assert_eq!(same.eval(&[0.37]), f.eval(&[0.37]));
        let d = dilate_dyadic(&f, 1);
        let expected = 0.5 * (-std::f64::consts::PI).exp();
        assert!((d.eval(&[2.0]).re - expected).abs() < 1e-15);
    }

    #[test]
    fn dilate_l1_substitution_and_group_law() {
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let d1 = dilate_l1(&f, 1);
        assert!((d1.eval(&[1.0]).re - (-4.0 * std::f64::consts::PI).exp()).abs() < 1e-18);
        let lhs = dilate_l1(&dilate_l1(&f, 2), -3);
        let rhs = dilate_l1(&f, -1);
        for i in 0..100 {
            let xi = [-2.0 + 0.04 * i as f64 + 0.013];
            assert!((lhs.eval(&xi) - rhs.eval(&xi)).norm() <= 1e-15);
        }
    }

    #[test]
    fn l1_dilation_matches_scaled_dyadic_dilation() {
        // dilate_l1(f, j) = 2^{-jd} * dilate_dyadic(f, -j) as frequency rules.
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let j = 2;
        let a = dilate_l1(&f, j);
        let b = dilate_dyadic(&f, -j);
        for i in 0..50 {
            let xi = [-1.0 + 0.04 * i as f64];
            let lhs = a.eval(&xi);
            let rhs = b.eval(&xi) * pow2(-j);
            assert!((lhs - rhs).norm() <= 1e-15);
        }
    }

    #[test]
    fn multiplier_basics() {
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let id = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0));
        assert_eq!(id.eval(&[0.4]), f.eval(&[0.4]));
        let zero = apply_multiplier(&f, |_| Complex64::default());
        assert_eq!(zero.eval(&[0.4]), Complex64::default());
        let ramp = apply_multiplier(&f, |xi| Complex64::new(xi[0], 0.0));
        let expected = 2.0 * (-4.0 * std::f64::consts::PI).exp();
        assert!((ramp.eval(&[2.0]).re - expected).abs() < 1e-18);
    }

    #[test]
    fn random_bandlimited_reproducible_and_supported() {
        let bx = BoxRegion::cube(1, -2.0, 2.0);
        let f1 = synthesize(
            SyntheticKind::RandomBandlimited { seed: 7, box_region: bx.clone() },
            1,
        )
        .unwrap();
        let f2 = synthesize(
            SyntheticKind::RandomBandlimited { seed: 7, box_region: bx.clone() },
            1,
        )
        .unwrap();
        let f3 = synthesize(SyntheticKind::RandomBandlimited { seed: 8, box_region: bx }, 1)
            .unwrap();
        assert_eq!(f1.eval(&[0.3]), f2.eval(&[0.3]));
        assert!((f1.eval(&[0.3]) - f3.eval(&[0.3])).norm() > 1e-12);
        assert_eq!(f1.eval(&[2.5]), Complex64::default());
    }

    #[test]
    fn zero_function_samples_to_zero() {
        let z = SpectralFunction::zero(1);
        let grid = GridSpec::new(1, 2, 2).unwrap();
        let field = z.sample(&grid).unwrap();
        assert!(field.values.iter().all(|v| *v == Complex64::default()));
    }
}
