//! Short-time Fourier transform on the product lattice, the mixed-norm
//! characterization of the per-scale modulation norms, and the dilation
//! identity relating windowed transforms across scales.
//!
//! The transform is computed densely on the spatial x frequency product
//! lattice (memory `N^{2d}`), which caps practical use at d = 1 with
//! moderate grids and coarse d = 2 spot checks; these are identity and
//! equivalence probes, not production transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::SpectralFunction;
use crate::grid::GridSpec;
use crate::transform::{analysis_in_place, synthesis_in_place};
use crate::util::pow2;

type WindowRule = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A spatial window function.
#[derive(Clone)]
pub struct Window {
    rule: WindowRule,
    dim: usize,
}

impl Window {
    pub fn new(dim: usize, rule: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { rule: Arc::new(rule), dim }
    }

    /// Default window `phi(x) = exp(-pi |x|^2)`.
    pub fn gaussian(dim: usize) -> Self {
        Self::new(dim, |x| {
            let n2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-std::f64::consts::PI * n2).exp(), 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.rule)(x)
    }

    /// Dilated window `phi^j(x) = phi(2^j x)`.
    pub fn dilated(&self, j: i64) -> Self {
        if j == 0 {
            return self.clone();
        }
        let s = pow2(j);
        let inner = self.clone();
        Self::new(self.dim, move |x| {
            let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
            inner.eval(&scaled)
        })
    }
}

/// Windowed transform samples on the product lattice; the spatial index
/// is slowest: `values[m_flat * N^d + n_flat] = V(x_m, xi_n)`.
#[derive(Debug, Clone)]
pub struct StftSample {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl StftSample {
    #[inline]
    pub fn at(&self, m_flat: usize, n_flat: usize) -> Complex64 {
        self.values[m_flat * self.grid.total_points() + n_flat]
    }
}

fn spatial_samples(f: &SpectralFunction, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let field = f.sample(grid)?;
    let mut data = field.values;
    synthesis_in_place(grid, &mut data);
    Ok(data)
}

fn window_samples(window: &Window, grid: &GridSpec) -> Result<Vec<Complex64>> {
    if window.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: window.dim() });
    }
    let total = grid.total_points();
    let mut out = vec![Complex64::default(); total];
    let mut idx = vec![0i64; grid.dim()];
    let mut x = vec![0f64; grid.dim()];
    for (flat, v) in out.iter_mut().enumerate() {
        grid.decode(flat, &mut idx);
        for (c, &m) in x.iter_mut().zip(idx.iter()) {
            *c = grid.spatial_coord(m);
        }
        *v = window.eval(&x);
    }
    if out.iter().all(|v| *v == Complex64::default()) {
        return Err(Error::InvalidGrid("window is identically zero on the grid".into()));
    }
    Ok(out)
}

/// Windowed transform on the full product lattice:
/// `V(x, xi) = dx^d sum_y f(y) conj(phi(y - x)) e^{-2 pi i y.xi}`,
/// one analysis transform per spatial slice.
pub fn stft(f: &SpectralFunction, window: &Window, grid: &GridSpec) -> Result<StftSample> {
    let fs = spatial_samples(f, grid)?;
    window_samples(window, grid)?; // validates the window
    let total = grid.total_points();
    let d = grid.dim();
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .with_min_len(1)
        .flat_map_iter(|m_flat| {
            let mut idx = vec![0i64; d];
            let mut x = vec![0f64; d];
            let mut y = vec![0f64; d];
            let mut shifted = vec![0f64; d];
            grid.decode(m_flat, &mut idx);
            for (c, &m) in x.iter_mut().zip(idx.iter()) {
                *c = grid.spatial_coord(m);
            }
            let mut slice = vec![Complex64::default(); total];
            for (flat_y, s) in slice.iter_mut().enumerate() {
                grid.decode(flat_y, &mut idx);
                for ax in 0..d {
                    y[ax] = grid.spatial_coord(idx[ax]);
                    shifted[ax] = y[ax] - x[ax];
                }
                *s = fs[flat_y] * window.eval(&shifted).conj();
            }
            analysis_in_place(grid, &mut slice);
            slice
        })
        .collect();
    Ok(StftSample { grid: *grid, values })
}

/// Windowed transform at a single point by direct quadrature over the
/// spatial lattice. Independent of the product-lattice path.
pub fn stft_at(
    f: &SpectralFunction,
    window: &Window,
    x: &[f64],
    xi: &[f64],
    grid: &GridSpec,
) -> Result<Complex64> {
    let fs = spatial_samples(f, grid)?;
    stft_at_from_samples(&fs, window, x, xi, grid)
}

/// [`stft_at`] reusing precomputed spatial samples of `f`.
pub fn stft_at_from_samples(
    fs: &[Complex64],
    window: &Window,
    x: &[f64],
    xi: &[f64],
    grid: &GridSpec,
) -> Result<Complex64> {
    let d = grid.dim();
    if x.len() != d || xi.len() != d || window.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let mut idx = vec![0i64; d];
    let mut y = vec![0f64; d];
    let mut shifted = vec![0f64; d];
    let mut acc = Complex64::default();
    for (flat, v) in fs.iter().enumerate() {
        grid.decode(flat, &mut idx);
        let mut phase = 0.0;
        for ax in 0..d {
            y[ax] = grid.spatial_coord(idx[ax]);
            shifted[ax] = y[ax] - x[ax];
            phase += y[ax] * xi[ax];
        }
        acc += v
            * window.eval(&shifted).conj()
            * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase);
    }
    Ok(acc * grid.dx().powi(d as i32))
}

/// Mixed-norm modulation norm at scale `j` through the windowed
/// transform: `|| V_{phi^j} f ||_{L^q_xi L^p_x}` (inner `L^p` in space at
/// fixed frequency, outer `L^q` in frequency).
pub fn stft_mod_norm(
    f: &SpectralFunction,
    window: &Window,
    p: f64,
    q: f64,
    j: i64,
    grid: &GridSpec,
) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite() && q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(format!("need finite p, q >= 1, got ({p}, {q})")));
    }
    let sample = stft(f, &window.dilated(j), grid)?;
    let total = grid.total_points();
    let d = grid.dim() as i32;
    let dx_vol = grid.dx().powi(d);
    let dxi_vol = grid.dxi().powi(d);
    // values are laid out spatial-slowest; the inner L^p runs over x at
    // fixed xi, i.e. over strided columns.
    let mut sum_q = 0.0f64;
    for n_flat in 0..total {
        let mut sum_p = 0.0f64;
        for m_flat in 0..total {
            sum_p += sample.at(m_flat, n_flat).norm().powf(p);
        }
        let lp = (sum_p * dx_vol).powf(1.0 / p);
        sum_q += lp.powf(q);
    }
    Ok((sum_q * dxi_vol).powf(1.0 / q))
}

/// Maximum deviation of the windowed-transform dilation identity at the
/// given product-lattice index pairs:
/// `V_phi(dilate_l1(f, j))(x_m, xi_n)` on `grid` against
/// `V_{phi^j} f` at the mapped point `(2^-j x_m, 2^j xi_n)` on the
/// corresponding grid. Returns `(max |lhs - rhs|, max |lhs|)`.
pub fn dilation_identity_deviation(
    f: &SpectralFunction,
    window: &Window,
    j: i64,
    points: &[(i64, i64)],
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: grid.dim() });
    }
    let mapped = grid.corresponding(j)?;
    let half = -grid.index_min();
    for &(m, n) in points {
        if m < -half || m >= half || n < -half || n >= half {
            return Err(Error::Misaligned(format!("index pair ({m}, {n}) is off the lattice")));
        }
    }
    let dilated_samples = spatial_samples(&crate::function::dilate_l1(f, j), grid)?;
    let f_samples = spatial_samples(f, &mapped)?;
    let wj = window.dilated(j);
    let mut max_dev = 0.0f64;
    let mut max_lhs = 0.0f64;
    for &(m, n) in points {
        let x = [grid.spatial_coord(m)];
        let xi = [grid.freq_coord(n)];
        let lhs = stft_at_from_samples(&dilated_samples, window, &x, &xi, grid)?;
        // 2^-j x_m and 2^j xi_n are the same lattice indices on the
        // corresponding grid.
        let xm = [mapped.spatial_coord(m)];
        let xin = [mapped.freq_coord(n)];
        let rhs = stft_at_from_samples(&f_samples, &wj, &xm, &xin, &mapped)?;
        max_dev = max_dev.max((lhs - rhs).norm());
        max_lhs = max_lhs.max(lhs.norm());
    }
    Ok((max_dev, max_lhs))
}

/// Export product-lattice samples in the snapshot format.
pub fn write_stft_snapshot(w: &mut impl std::io::Write, sample: &StftSample) -> Result<()> {
    crate::snapshot::write_product(w, &sample.grid, &sample.values)
}
