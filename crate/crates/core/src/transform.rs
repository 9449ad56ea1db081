//! Centered discrete Fourier transforms on half-offset lattices.
//!
//! Synthesis maps frequency samples `A(xi_n)` to spatial samples
//! `f(x_m) = dxi^d * sum_n A(xi_n) e^{+2 pi i x_m . xi_n}`,
//! analysis is the adjoint direction with weight `dx^d`. Because both
//! lattices are half-offset, the kernel `e^{2 pi i (m+1/2)(n+1/2)/N}`
//! factors into a standard FFT and diagonal phase twiddles. Analysis and
//! synthesis compose to the exact identity (up to roundoff) since
//! `dxi * dx * N = 1` per axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;

/// Phase tables for one axis length `N`.
pub struct Twiddles {
    n: usize,
    /// `e^{i pi k / N}` for `k` in `[0, 2N)`.
    half: Vec<Complex64>,
}

impl Twiddles {
    fn new(n: usize) -> Self {
        let half = (0..2 * n)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Self { n, half }
    }

    /// `e^{i pi s / N}` for a signed integer `s`.
    #[inline]
    pub fn half_phase(&self, s: i64) -> Complex64 {
        let m = 2 * self.n as i64;
        let k = s.rem_euclid(m) as usize;
        self.half[k]
    }

    /// `e^{2 pi i s / N}` for a signed integer `s`.
    #[inline]
    pub fn full_phase(&self, s: i64) -> Complex64 {
        self.half_phase(2 * (s.rem_euclid(self.n as i64)))
    }

    /// Phase `e^{+2 pi i (m+1/2)(n+1/2)/N}` between signed lattice indices.
    #[inline]
    pub fn lattice_phase(&self, m: i64, n: i64) -> Complex64 {
        // (m+1/2)(n+1/2) = mn + (m+n)/2 + 1/4
        let nn = self.n as i64;
        let prod = (m.rem_euclid(nn)) * (n.rem_euclid(nn));
        self.full_phase(prod) * self.half_phase(m + n) * self.quarter()
    }

    /// `e^{i pi / (2N)}`.
    #[inline]
    pub fn quarter(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::PI / (2.0 * self.n as f64))
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn twiddle_cache(n: usize) -> Arc<Twiddles> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Twiddles>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(n).or_insert_with(|| Arc::new(Twiddles::new(n))).clone()
}

pub fn twiddles_for(grid: &GridSpec) -> Arc<Twiddles> {
    twiddle_cache(grid.points_per_axis())
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut guard = planner().lock().unwrap();
    match direction {
        FftDirection::Forward => guard.plan_fft_forward(n),
        FftDirection::Inverse => guard.plan_fft_inverse(n),
    }
}

/// One centered transform pass along a single axis of a row-major array.
///
/// `sign = +1` uses the kernel `e^{+2 pi i (m+1/2)(n+1/2)/N}` (synthesis
/// direction), `sign = -1` its conjugate.
fn centered_axis_pass(data: &mut [Complex64], n: usize, stride: usize, sign: i64) {
    let dir = if sign > 0 { FftDirection::Inverse } else { FftDirection::Forward };
    let fft = plan(n, dir);
    let tw = twiddle_cache(n);
    let half_n = (n / 2) as i64;
    let quarter = if sign > 0 { tw.quarter() } else { tw.quarter().conj() };

    let lines = data.len() / n;
    let mut buf = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    for line in 0..lines {
        // Row-major with the transform axis at `stride`: lines are indexed by
        // (block, offset) pairs.
        let block = line / stride;
        let offset = line % stride;
        let base = block * n * stride + offset;

        // Gather with pre-twiddle e^{sign * i pi n / N}, wrapping signed
        // index n into standard FFT order.
        for arr in 0..n {
            let signed = arr as i64 - half_n;
            let ph = if sign > 0 { tw.half_phase(signed) } else { tw.half_phase(signed).conj() };
            let wrapped = signed.rem_euclid(n as i64) as usize;
            buf[wrapped] = data[base + arr * stride] * ph;
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        // Scatter with post-twiddle.
        for arr in 0..n {
            let signed = arr as i64 - half_n;
            let ph = if sign > 0 { tw.half_phase(signed) } else { tw.half_phase(signed).conj() };
            let wrapped = signed.rem_euclid(n as i64) as usize;
            data[base + arr * stride] = buf[wrapped] * ph * quarter;
        }
    }
}

fn centered_transform_in_place(grid: &GridSpec, data: &mut [Complex64], sign: i64, weight: f64) {
    assert_eq!(data.len(), grid.total_points());
    let n = grid.points_per_axis();
    let d = grid.dim();
    let mut stride = 1usize;
    for _ in 0..d {
        centered_axis_pass(data, n, stride, sign);
        stride *= n;
    }
    for v in data.iter_mut() {
        *v *= weight;
    }
}

/// Frequency samples -> spatial samples (weight `dxi^d`).
pub fn synthesis_in_place(grid: &GridSpec, data: &mut [Complex64]) {
    let w = grid.dxi().powi(grid.dim() as i32);
    centered_transform_in_place(grid, data, 1, w);
}

/// Expand a short run of frequency coefficients starting at signed lattice
/// index `n_lo` to all `N` spatial samples of one axis (synthesis kernel,
/// no quadrature weight):
/// `out[m] = sum_r input[r] e^{+2 pi i (m+1/2)(n_lo+r+1/2)/N}`.
///
/// Direct per-sample recurrence; cost `len(input) * N`. Used when the run
/// is much shorter than the axis.
pub fn expand_line_direct(tw: &Twiddles, n_lo: i64, input: &[Complex64], out: &mut [Complex64]) {
    let n = out.len();
    debug_assert_eq!(n, tw.n);
    let half_n = (n / 2) as i64;
    let step_base = tw.half_phase(1); // e^{i pi / N}
    for (arr, o) in out.iter_mut().enumerate() {
        let m = arr as i64 - half_n;
        // e^{2 pi i (m + 1/2)/N}
        let step = tw.full_phase(m) * step_base;
        let mut ph = tw.lattice_phase(m, n_lo);
        let mut acc = Complex64::default();
        for &c in input {
            acc += c * ph;
            ph *= step;
        }
        *o = acc;
    }
}

/// Same map as [`expand_line_direct`] via a zero-padded centered FFT;
/// cost `N log N`. The two paths agree to roundoff.
pub fn expand_line_fft(tw: &Twiddles, n_lo: i64, input: &[Complex64], out: &mut [Complex64]) {
    let n = out.len();
    debug_assert_eq!(n, tw.n);
    let fft = plan(n, FftDirection::Inverse);
    let half_n = (n / 2) as i64;
    let mut buf = vec![Complex64::default(); n];
    for (r, &c) in input.iter().enumerate() {
        let signed = n_lo + r as i64;
        debug_assert!(signed >= -half_n && signed < half_n);
        buf[signed.rem_euclid(n as i64) as usize] = c * tw.half_phase(signed);
    }
    fft.process(&mut buf);
    let quarter = tw.quarter();
    for (arr, o) in out.iter_mut().enumerate() {
        let m = arr as i64 - half_n;
        *o = buf[m.rem_euclid(n as i64) as usize] * tw.half_phase(m) * quarter;
    }
}

/// Spatial samples -> frequency samples (weight `dx^d`).
pub fn analysis_in_place(grid: &GridSpec, data: &mut [Complex64]) {
    let w = grid.dx().powi(grid.dim() as i32);
    centered_transform_in_place(grid, data, -1, w);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn naive_synthesis(grid: &GridSpec, freq: &[Complex64]) -> Vec<Complex64> {
        let total = grid.total_points();
        let d = grid.dim();
        let mut out = vec![Complex64::default(); total];
        let mut mi = vec![0i64; d];
        let mut ni = vec![0i64; d];
        let w = grid.dxi().powi(d as i32);
        for (mf, o) in out.iter_mut().enumerate() {
            grid.decode(mf, &mut mi);
            let mut acc = Complex64::default();
            for (nf, &a) in freq.iter().enumerate() {
                grid.decode(nf, &mut ni);
                let mut phase = 0.0;
                for ax in 0..d {
                    phase += grid.spatial_coord(mi[ax]) * grid.freq_coord(ni[ax]);
                }
                acc += a * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
            }
            *o = acc * w;
        }
        out
    }

    #[test]
    fn matches_naive_dft_1d() {
        let grid = GridSpec::new(1, 2, 2).unwrap();
        let n = grid.total_points();
        let freq: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let expected = naive_synthesis(&grid, &freq);
        let mut got = freq.clone();
        synthesis_in_place(&grid, &mut got);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-12, "{g} vs {e}");
        }
    }

    #[test]
    fn matches_naive_dft_2d() {
        let grid = GridSpec::new(2, 1, 1).unwrap();
        let n = grid.total_points();
        let freq: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.83).cos(), (i as f64 * 0.29).sin()))
            .collect();
        let expected = naive_synthesis(&grid, &freq);
        let mut got = freq.clone();
        synthesis_in_place(&grid, &mut got);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-12);
        }
    }

    #[test]
    fn analysis_inverts_synthesis() {
        for grid in [GridSpec::new(1, 4, 3).unwrap(), GridSpec::new(2, 2, 2).unwrap()] {
            let n = grid.total_points();
            let freq: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.5).cos()))
                .collect();
            let mut data = freq.clone();
            synthesis_in_place(&grid, &mut data);
            analysis_in_place(&grid, &mut data);
            for (g, e) in data.iter().zip(&freq) {
                assert!((g - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_exact() {
        let grid = GridSpec::new(1, 5, 5).unwrap();
        let n = grid.total_points();
        let freq: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((0.01 * i as f64).sin(), (0.02 * i as f64).cos()))
            .collect();
        let freq_energy: f64 = freq.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dxi();
        let mut data = freq.clone();
        synthesis_in_place(&grid, &mut data);
        let space_energy: f64 = data.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
        assert!((freq_energy - space_energy).abs() <= 1e-12 * freq_energy);
    }

    #[test]
    fn expand_line_paths_agree() {
        let grid = GridSpec::new(1, 3, 2).unwrap();
        let n = grid.points_per_axis();
        let tw = twiddles_for(&grid);
        let coeffs: Vec<Complex64> = (0..5)
            .map(|i| Complex64::new(1.0 + i as f64, -0.5 * i as f64))
            .collect();
        let n_lo = -7i64;
        let mut direct = vec![Complex64::default(); n];
        let mut fft = vec![Complex64::default(); n];
        expand_line_direct(&tw, n_lo, &coeffs, &mut direct);
        expand_line_fft(&tw, n_lo, &coeffs, &mut fft);
        // Against the full transform with the coefficients embedded.
        let mut full = vec![Complex64::default(); n];
        for (r, &c) in coeffs.iter().enumerate() {
            full[(n_lo + r as i64 + (n / 2) as i64) as usize] = c;
        }
        let mut reference = full.clone();
        synthesis_in_place(&grid, &mut reference);
        let w = grid.dxi();
        for i in 0..n {
            assert!((direct[i] * w - reference[i]).norm() < 1e-12);
            assert!((fft[i] * w - reference[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn lattice_phase_consistent() {
        let grid = GridSpec::new(1, 2, 1).unwrap();
        let tw = twiddles_for(&grid);
        let n = grid.points_per_axis() as f64;
        for m in grid.axis_indices() {
            for k in grid.axis_indices() {
                let direct = Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * (m as f64 + 0.5) * (k as f64 + 0.5) / n,
                );
                let tab = tw.lattice_phase(m, k);
                assert!((direct - tab).norm() < 1e-13);
            }
        }
    }
}
