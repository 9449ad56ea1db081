//! Lattice-route norms: the inner `L^p` quadrature, the per-scale
//! modulation norm, and the weighted `l^r` aggregation over all dyadic
//! scales, plus the bilinear duality pairing.
//!
//! Cell pieces are reconstructed on the *shared* lattice of the supplied
//! grid. Under the grid correspondence `(a, b) <-> (a - j0, b + j0)` every
//! per-cell quantity maps by an exact power of two, so the dyadic scaling
//! identities hold to roundoff at any truncation. Cells much finer than
//! the lattice are still well-defined discrete objects but no longer track
//! their continuum values; [`NormReport::boundary_flag`] surfaces suspect
//! truncations and the scale-adapted route (see [`crate::adapted`]) covers
//! deep negative scales.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{FreqField, SpectralFunction};
use crate::grid::GridSpec;
use crate::partition::{FrequencyCell, PartitionOfUnity};
use crate::transform::{expand_line_direct, expand_line_fft, synthesis_in_place, twiddles_for, Twiddles};
use crate::util::pow2;
use crate::weights::VectorWeight;

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v >= 1.0 && v.is_finite()) {
        return Err(Error::InvalidExponent(format!("{name} must be finite and >= 1, got {v}")));
    }
    Ok(())
}

/// `sum |v|^p` from squared moduli.
#[inline]
fn p_sum_from_sqr(norm_sqr: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p == 2.0 {
        norm_sqr.sum()
    } else if p == 4.0 {
        norm_sqr.map(|v| v * v).sum()
    } else if p == 1.0 {
        norm_sqr.map(f64::sqrt).sum()
    } else {
        let h = 0.5 * p;
        norm_sqr.map(|v| v.powf(h)).sum()
    }
}

/// Riemann-sum `L^p` norm of spatial samples.
fn riemann_lp(samples: &[Complex64], p: f64, grid: &GridSpec) -> f64 {
    let sum = p_sum_from_sqr(samples.iter().map(|v| v.norm_sqr()), p);
    let dx_vol = grid.dx().powi(grid.dim() as i32);
    (sum * dx_vol).powf(1.0 / p)
}

/// `L^p` norm of `f` by sampling `fhat` on the frequency lattice,
/// reconstructing spatial samples with the centered inverse transform, and
/// taking the Riemann sum over one spatial period.
pub fn lp_norm(f: &SpectralFunction, p: f64, grid: &GridSpec) -> Result<f64> {
    check_exponent("p", p)?;
    let field = f.sample(grid)?;
    lp_norm_field(&field, p)
}

/// [`lp_norm`] on pre-sampled frequency data.
pub fn lp_norm_field(field: &FreqField, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let mut data = field.values.clone();
    synthesis_in_place(&field.grid, &mut data);
    if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    Ok(riemann_lp(&data, p, &field.grid))
}

/// Shared per-cell machinery over one sampled field.
pub(crate) struct LatticeEngine<'a> {
    field: &'a FreqField,
    pou: &'a PartitionOfUnity,
    tw: Arc<Twiddles>,
}

impl<'a> LatticeEngine<'a> {
    pub fn new(field: &'a FreqField, pou: &'a PartitionOfUnity) -> Result<Self> {
        if field.grid.dim() != pou.dim() {
            return Err(Error::DimensionMismatch { expected: pou.dim(), got: field.grid.dim() });
        }
        Ok(Self { field, pou, tw: twiddles_for(&field.grid) })
    }

    fn grid(&self) -> &GridSpec {
        &self.field.grid
    }

    /// Per-axis signed index ranges of lattice points inside the open cell
    /// box; `None` when some axis is empty.
    fn support_ranges(&self, cell: &FrequencyCell) -> Option<Vec<(i64, i64)>> {
        let s = pow2(cell.j);
        cell.k
            .iter()
            .map(|&k| self.grid().freq_indices_in(s * (k as f64 - 1.0), s * (k as f64 + 1.0)))
            .collect()
    }

    /// Windowed coefficients `psi(2^-j xi - k) fhat(xi)` over the support
    /// box, row-major.
    fn gather(&self, cell: &FrequencyCell, ranges: &[(i64, i64)]) -> Vec<Complex64> {
        let d = self.grid().dim();
        let sizes: Vec<usize> = ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
        let total: usize = sizes.iter().product();
        let scale = pow2(-cell.j);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        let mut signed = vec![0i64; d];
        for _ in 0..total {
            let mut w = 1.0f64;
            for ax in 0..d {
                signed[ax] = ranges[ax].0 + idx[ax] as i64;
                let t = self.grid().freq_coord(signed[ax]) * scale - cell.k[ax] as f64;
                w *= self.pou.psi1(t);
            }
            out.push(self.field.at(&signed) * w);
            // Odometer increment, last axis fastest.
            for ax in (0..d).rev() {
                idx[ax] += 1;
                if idx[ax] < sizes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        out
    }

    /// Expand support-box coefficients to the full spatial lattice
    /// (synthesis kernel, no quadrature weight), axis by axis.
    fn expand(&self, ranges: &[(i64, i64)], coeffs: Vec<Complex64>) -> Vec<Complex64> {
        let n = self.grid().points_per_axis();
        let d = self.grid().dim();
        let mut dims: Vec<usize> =
            ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
        let mut data = coeffs;
        // Direct expansion beats the padded FFT for short runs.
        let fft_threshold = 4 * (usize::BITS - n.leading_zeros()) as usize;
        for ax in (0..d).rev() {
            let s = dims[ax];
            let stride: usize = dims[ax + 1..].iter().product();
            let blocks: usize = dims[..ax].iter().product();
            let mut next = vec![Complex64::default(); blocks * n * stride];
            let mut line_in = vec![Complex64::default(); s];
            let mut line_out = vec![Complex64::default(); n];
            for b in 0..blocks {
                for o in 0..stride {
                    for r in 0..s {
                        line_in[r] = data[(b * s + r) * stride + o];
                    }
                    if s > fft_threshold {
                        expand_line_fft(&self.tw, ranges[ax].0, &line_in, &mut line_out);
                    } else {
                        expand_line_direct(&self.tw, ranges[ax].0, &line_in, &mut line_out);
                    }
                    for (m, v) in line_out.iter().enumerate() {
                        next[(b * n + m) * stride + o] = *v;
                    }
                }
            }
            data = next;
            dims[ax] = n;
        }
        data
    }

    /// `L^p` norm of the cell piece `psi_{j,k}(D) f` on the shared lattice.
    pub fn cell_norm(&self, cell: &FrequencyCell, p: f64) -> f64 {
        let Some(ranges) = self.support_ranges(cell) else {
            return 0.0;
        };
        let coeffs = self.gather(cell, &ranges);
        let grid = self.grid();
        let d = grid.dim() as i32;
        let dxi_vol = grid.dxi().powi(d);
        if coeffs.len() == 1 {
            // A single frequency sample reconstructs to constant modulus:
            // |c| dxi^d over the whole spatial period.
            return coeffs[0].norm() * dxi_vol * grid.spatial_volume().powf(1.0 / p);
        }
        let samples = self.expand(&ranges, coeffs);
        let sum = p_sum_from_sqr(samples.iter().map(|v| v.norm_sqr()), p);
        let dx_vol = grid.dx().powi(d);
        dxi_vol * (sum * dx_vol).powf(1.0 / p)
    }

    /// Frequency-side `L^p` quadrature of the windowed samples:
    /// `( dxi^d sum_n |psi_{j,k}(xi_n) fhat(xi_n)|^p )^{1/p}`.
    /// No inverse transform is involved.
    pub fn cell_freq_norm(&self, cell: &FrequencyCell, p: f64) -> f64 {
        let Some(ranges) = self.support_ranges(cell) else {
            return 0.0;
        };
        let coeffs = self.gather(cell, &ranges);
        let sum = p_sum_from_sqr(coeffs.iter().map(|v| v.norm_sqr()), p);
        let dxi_vol = self.grid().dxi().powi(self.grid().dim() as i32);
        (sum * dxi_vol).powf(1.0 / p)
    }

    /// Evaluate the cell piece at an arbitrary spatial point by direct
    /// summation over the support samples:
    /// `dxi^d sum_n psi_{j,k}(xi_n) fhat(xi_n) e^{2 pi i x . xi_n}`.
    pub fn cell_eval_at(&self, cell: &FrequencyCell, x: &[f64]) -> Complex64 {
        let Some(ranges) = self.support_ranges(cell) else {
            return Complex64::default();
        };
        let coeffs = self.gather(cell, &ranges);
        let grid = self.grid();
        let d = grid.dim();
        let sizes: Vec<usize> = ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
        let mut acc = Complex64::default();
        let mut idx = vec![0usize; d];
        for &c in &coeffs {
            let mut phase = 0.0f64;
            for ax in 0..d {
                phase += x[ax] * grid.freq_coord(ranges[ax].0 + idx[ax] as i64);
            }
            acc += c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
            for ax in (0..d).rev() {
                idx[ax] += 1;
                if idx[ax] < sizes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        acc * grid.dxi().powi(d as i32)
    }

    /// Bilinear spatial pairing of two cell pieces,
    /// `dx^d sum_m u(x_m) v(x_m)` (or `u conj(v)` when `conjugate`).
    pub fn cell_pair(
        &self,
        other: &LatticeEngine<'_>,
        cell: &FrequencyCell,
        conjugate: bool,
    ) -> Complex64 {
        let (Some(ranges_u), Some(ranges_v)) =
            (self.support_ranges(cell), other.support_ranges(cell))
        else {
            return Complex64::default();
        };
        let u = self.expand(&ranges_u, self.gather(cell, &ranges_u));
        let v = other.expand(&ranges_v, other.gather(cell, &ranges_v));
        let grid = self.grid();
        let d = grid.dim() as i32;
        let weight = grid.dxi().powi(2 * d) * grid.dx().powi(d);
        let mut acc = Complex64::default();
        if conjugate {
            for (a, b) in u.iter().zip(&v) {
                acc += a * b.conj();
            }
        } else {
            for (a, b) in u.iter().zip(&v) {
                acc += a * b;
            }
        }
        acc * weight
    }
}

/// Enumerate cells at scale `j` meeting the grid box and aggregate a
/// per-cell quantity with `l^q`; deterministic cell ordering.
pub(crate) fn lq_over_cells(
    engine: &LatticeEngine<'_>,
    j: i64,
    q: f64,
    per_cell: impl Fn(&FrequencyCell) -> f64 + Sync,
    collect: Option<&mut Vec<(Vec<i64>, f64)>>,
) -> Result<f64> {
    let grid = engine.grid();
    let d = grid.dim();
    let radius = engine.pou.cell_radius(j, grid);
    let side = (2 * radius + 1) as usize;
    let count = side.checked_pow(d as u32).ok_or(Error::EmptyCellSet)?;
    let decode = |flat: usize| -> FrequencyCell {
        let mut k = vec![0i64; d];
        let mut rem = flat;
        for ax in (0..d).rev() {
            k[ax] = (rem % side) as i64 - radius;
            rem /= side;
        }
        FrequencyCell::new(j, k)
    };
    let norms: Vec<f64> = (0..count)
        .into_par_iter()
        .with_min_len(64)
        .map(|flat| per_cell(&decode(flat)))
        .collect();
    if norms.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    if let Some(out) = collect {
        for (flat, &v) in norms.iter().enumerate() {
            if v != 0.0 {
                out.push((decode(flat).k, v));
            }
        }
    }
    let sum: f64 = norms.iter().map(|v| v.powf(q)).sum();
    Ok(sum.powf(1.0 / q))
}

/// Modulation norm at dyadic scale `j`:
/// `( sum_k || psi_{j,k}(D) f ||_{L^p}^q )^{1/q}` over all cells meeting
/// the grid box. Scale 0 is the classical modulation norm.
pub fn mod_norm(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    j: i64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<f64> {
    let field = f.sample(grid)?;
    mod_norm_field(&field, p, q, j, pou)
}

/// [`mod_norm`] on pre-sampled frequency data.
pub fn mod_norm_field(
    field: &FreqField,
    p: f64,
    q: f64,
    j: i64,
    pou: &PartitionOfUnity,
) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let engine = LatticeEngine::new(field, pou)?;
    lq_over_cells(&engine, j, q, |cell| engine.cell_norm(cell, p), None)
}

/// Exponents, weight, and truncation window of a scale-aggregated norm.
#[derive(Debug, Clone)]
pub struct NormSpec {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub weight: VectorWeight,
    pub j_min: i64,
    pub j_max: i64,
    /// Also record per-cell inner norms in the report.
    pub collect_cells: bool,
}

impl NormSpec {
    pub fn new(p: f64, q: f64, r: f64, weight: VectorWeight, j_min: i64, j_max: i64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        check_exponent("r", r)?;
        if j_min > j_max {
            return Err(Error::InvalidExponent(format!(
                "scale window is empty: [{j_min}, {j_max}]"
            )));
        }
        Ok(Self { p, q, r, weight, j_min, j_max, collect_cells: false })
    }

    pub fn with_cells(mut self) -> Self {
        self.collect_cells = true;
        self
    }
}

/// A computed scale-aggregated norm with its contribution breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    /// `( sum_j (w_j ||f||_{[j]})^r )^{1/r}` over the truncation window.
    pub value: f64,
    /// Weighted per-scale contributions `(j, w_j ||f||_{[j]})`.
    pub per_j: Vec<(i64, f64)>,
    /// True when an endpoint scale carries more than 1% of the peak
    /// contribution (truncation suspect), or when the grid neither covers
    /// the support hint nor has decay information.
    pub boundary_flag: bool,
    /// Per-cell inner norms by scale, when requested.
    #[serde(skip)]
    pub per_cell: Option<Vec<(i64, Vec<(Vec<i64>, f64)>)>>,
}

impl NormReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Per-cell rows as CSV: `j,k...,lp`.
    pub fn per_cell_csv(&self) -> Option<String> {
        let cells = self.per_cell.as_ref()?;
        let dim = cells
            .iter()
            .flat_map(|(_, rows)| rows.first())
            .map(|(k, _)| k.len())
            .next()
            .unwrap_or(1);
        let mut out = String::from("j");
        for ax in 0..dim {
            out.push_str(&format!(",k{ax}"));
        }
        out.push_str(",lp\n");
        for (j, rows) in cells {
            for (k, v) in rows {
                out.push_str(&j.to_string());
                for c in k {
                    out.push(',');
                    out.push_str(&c.to_string());
                }
                out.push_str(&format!(",{v:.17e}\n"));
            }
        }
        Some(out)
    }
}

fn support_covered(f: &SpectralFunction, grid: &GridSpec) -> bool {
    match f.support_hint() {
        Some(b) => {
            let ext = pow2(grid.b());
            b.lo.iter().all(|&l| l >= -ext) && b.hi.iter().all(|&h| h <= ext)
        }
        None => f.decay_hint().is_some(),
    }
}

/// Scale-aggregated norm: weighted `l^r` over `j` of the per-scale
/// modulation norms.
pub fn scaled_norm(
    f: &SpectralFunction,
    spec: &NormSpec,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<NormReport> {
    let field = f.sample(grid)?;
    scaled_norm_field(&field, spec, pou, support_covered(f, grid))
}

/// [`scaled_norm`] on pre-sampled data; `covered` feeds the boundary flag.
pub fn scaled_norm_field(
    field: &FreqField,
    spec: &NormSpec,
    pou: &PartitionOfUnity,
    covered: bool,
) -> Result<NormReport> {
    let engine = LatticeEngine::new(field, pou)?;
    let mut per_j = Vec::with_capacity((spec.j_max - spec.j_min + 1) as usize);
    let mut per_cell = spec.collect_cells.then(Vec::new);
    for j in spec.j_min..=spec.j_max {
        let w = spec.weight.value_checked(j)?;
        let mut cells = spec.collect_cells.then(Vec::new);
        let m = lq_over_cells(&engine, j, spec.q, |cell| engine.cell_norm(cell, spec.p), cells.as_mut())?;
        if let (Some(acc), Some(rows)) = (per_cell.as_mut(), cells) {
            acc.push((j, rows));
        }
        per_j.push((j, w * m));
    }
    let value: f64 = per_j
        .iter()
        .map(|(_, c)| c.powf(spec.r))
        .sum::<f64>()
        .powf(1.0 / spec.r);
    let peak = per_j.iter().map(|(_, c)| *c).fold(0.0f64, f64::max);
    let endpoint = per_j.first().map(|(_, c)| *c).unwrap_or(0.0).max(
        per_j.last().map(|(_, c)| *c).unwrap_or(0.0),
    );
    let boundary_flag = !covered || (peak > 0.0 && endpoint > 0.01 * peak);
    Ok(NormReport { value, per_j, boundary_flag, per_cell })
}

/// Both sides of the general (weight-translating) rescaling law.
///
/// Returns `(lhs, rhs)` with
/// `lhs = || f(2^{j0} .) ||` under weight `w` on the corresponding grid and
/// shifted scale window, and
/// `rhs = 2^{-j0 d / p} || f ||` under the translated weight `tau^{j0} w`
/// on the base grid. The two agree to roundoff at any truncation.
pub fn rescaling_check(
    f: &SpectralFunction,
    spec: &NormSpec,
    j0: i64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    let dilated = crate::function::dilate_dyadic(f, j0);
    let mut lhs_spec = spec.clone();
    lhs_spec.j_min = spec.j_min + j0;
    lhs_spec.j_max = spec.j_max + j0;
    let lhs = scaled_norm(&dilated, &lhs_spec, pou, &grid.corresponding(j0)?)?.value;

    let mut rhs_spec = spec.clone();
    rhs_spec.weight = spec.weight.shifted(j0);
    let d = grid.dim() as f64;
    let rhs = pow2(-j0).powf(d / spec.p) * scaled_norm(f, &rhs_spec, pou, grid)?.value;
    Ok((lhs, rhs))
}

/// Truncated duality pairing
/// `sum_j w_j w'_j sum_k dx^d sum_m (psi_{j,k}(D)f)(x_m) (psi_{j,k}(D)g)(x_m)`.
///
/// Bilinear by default; `conjugate` switches the second factor to its
/// complex conjugate.
#[allow(clippy::too_many_arguments)]
pub fn duality_pairing(
    f: &SpectralFunction,
    g: &SpectralFunction,
    w: &VectorWeight,
    w_dual: &VectorWeight,
    j_min: i64,
    j_max: i64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
    conjugate: bool,
) -> Result<Complex64> {
    let field_f = f.sample(grid)?;
    let field_g = g.sample(grid)?;
    let engine_f = LatticeEngine::new(&field_f, pou)?;
    let engine_g = LatticeEngine::new(&field_g, pou)?;
    let d = grid.dim();
    let mut total = Complex64::default();
    for j in j_min..=j_max {
        let wj = w.value_checked(j)? * w_dual.value_checked(j)?;
        if wj == 0.0 {
            continue;
        }
        let radius = pou.cell_radius(j, grid);
        let side = (2 * radius + 1) as usize;
        let count = side.pow(d as u32);
        let decode = |flat: usize| -> FrequencyCell {
            let mut k = vec![0i64; d];
            let mut rem = flat;
            for ax in (0..d).rev() {
                k[ax] = (rem % side) as i64 - radius;
                rem /= side;
            }
            FrequencyCell::new(j, k)
        };
        let pairs: Vec<Complex64> = (0..count)
            .into_par_iter()
            .with_min_len(64)
            .map(|flat| engine_f.cell_pair(&engine_g, &decode(flat), conjugate))
            .collect();
        let mut level = Complex64::default();
        for v in pairs {
            level += v;
        }
        total += level * wj;
    }
    Ok(total)
}
