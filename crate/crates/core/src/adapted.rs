//! Scale-adapted per-cell quadrature.
//!
//! A cell piece at scale `j` satisfies
//! `|| psi_{j,k}(D) f ||_{L^p} = 2^{j d / p'} || V ||_{L^p}` where
//! `Vhat(eta) = psi(eta) fhat(2^j (eta + k))` is the piece pulled back to
//! unit scale and centered. The right-hand side is computed on a small
//! fixed grid, so per-scale norms stay faithful to their continuum values
//! at arbitrarily deep scales — where a shared lattice would bottom out at
//! its resolution floor. Used by the decay profiles, the sharpness and
//! strictness experiments, and truncated-series convergence checks; the
//! exact-identity checks stay on the lattice route in [`crate::norms`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::SpectralFunction;
use crate::grid::GridSpec;
use crate::norms::lp_norm;
use crate::partition::PartitionOfUnity;
use crate::util::{conjugate_exponent, pow2};
use crate::weights::VectorWeight;

/// Quadrature parameters for the per-cell grids.
#[derive(Debug, Clone, Copy)]
pub struct AdaptedQuad {
    /// log2 oversampling of the unit window: the cell grid resolves the
    /// window at spacing `2^-os_freq` (finer when the function itself has
    /// sub-cell features).
    pub os_freq: i64,
    /// log2 frequency extent of the cell grid (>= 1; the window lives in
    /// `[-1, 1]`).
    pub os_box: i64,
    /// Without a support hint, cells beyond this frequency radius are
    /// dropped (times the function's frequency feature scale).
    pub freq_radius: f64,
    /// Enumerate every cell up to this count, stratify beyond it.
    pub exact_cells: usize,
    /// Strata per dyadic octave of the shift index when stratifying.
    pub samples_per_octave: usize,
}

impl Default for AdaptedQuad {
    fn default() -> Self {
        Self {
            os_freq: 5,
            os_box: 1,
            freq_radius: 6.0,
            exact_cells: 1 << 15,
            samples_per_octave: 128,
        }
    }
}

impl AdaptedQuad {
    /// One dyadic refinement of the per-cell quadrature.
    pub fn refined(&self) -> Self {
        Self { os_freq: self.os_freq + 1, ..*self }
    }

    fn cell_grid(&self, dim: usize, j: i64, freq_scale: f64) -> Result<GridSpec> {
        // Sub-cell features of fhat appear at relative scale
        // freq_scale / 2^j; refine past the window oversampling when the
        // cell is coarser than the function.
        let extra = (j - freq_scale.log2().floor() as i64).max(0);
        GridSpec::new(dim, self.os_freq + extra, self.os_box)
    }
}

/// `|| psi_{j,k}(D) f ||_{L^p}` by unit-scale reduction on a per-cell grid.
pub fn cell_norm_adapted(
    f: &SpectralFunction,
    p: f64,
    j: i64,
    k: &[i64],
    pou: &PartitionOfUnity,
    quad: &AdaptedQuad,
) -> Result<f64> {
    let d = f.dim();
    if k.len() != d || pou.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: k.len() });
    }
    let grid = quad.cell_grid(d, j, f.freq_scale())?;
    let scale = pow2(j);
    let inner = f.clone();
    let pou_owned = pou.clone();
    let shift: Vec<f64> = k.iter().map(|&c| c as f64).collect();
    let centered = SpectralFunction::from_rule(d, move |eta| {
        let w: f64 = eta.iter().map(|&t| pou_owned.psi1(t)).product();
        if w == 0.0 {
            return num_complex::Complex64::default();
        }
        let xi: Vec<f64> = eta.iter().zip(&shift).map(|(&t, &s)| scale * (t + s)).collect();
        inner.eval(&xi) * w
    });
    let unit_norm = lp_norm(&centered, p, &grid)?;
    Ok(pow2(j * d as i64).powf(1.0 / conjugate_exponent(p)) * unit_norm)
}

/// Shift indices with summation weights for one axis, stratified beyond
/// `exact_cells`. Deterministic; strata are linear within each dyadic
/// octave with midpoint representatives, so consecutive scales sample
/// identical relative positions.
fn shift_samples(k_lo: i64, k_hi: i64, quad: &AdaptedQuad) -> Vec<(i64, f64)> {
    let count = (k_hi - k_lo + 1) as usize;
    if count <= quad.exact_cells {
        return (k_lo..=k_hi).map(|k| (k, 1.0)).collect();
    }
    let mut out = Vec::new();
    let dense = 128i64;
    for k in (-dense).max(k_lo)..=dense.min(k_hi) {
        out.push((k, 1.0));
    }
    let strata = |lo: i64, hi: i64, out: &mut Vec<(i64, f64)>| {
        // [lo, hi] with lo > 0, split into linear strata.
        if lo > hi {
            return;
        }
        let total = hi - lo + 1;
        let s = quad.samples_per_octave as i64;
        if total <= s {
            for k in lo..=hi {
                out.push((k, 1.0));
            }
            return;
        }
        for i in 0..s {
            let b0 = lo + i * total / s;
            let b1 = lo + (i + 1) * total / s;
            if b1 > b0 {
                out.push(((b0 + b1 - 1) / 2, (b1 - b0) as f64));
            }
        }
    };
    // Dyadic octaves above the dense core, each side.
    let mut m = dense + 1;
    while m <= k_hi {
        let hi = (2 * m - 1).min(k_hi);
        strata(m, hi, &mut out);
        m *= 2;
    }
    let mut m = dense + 1;
    while -m >= k_lo {
        let lo = (-(2 * m - 1)).max(k_lo);
        // Mirror: strata on the positive octave, negated.
        let before = out.len();
        strata(m, -lo, &mut out);
        for entry in out[before..].iter_mut() {
            entry.0 = -entry.0;
        }
        m *= 2;
    }
    out
}

/// Per-axis shift range of cells meeting the function's frequency
/// content, from the support hint or a decay radius.
pub(crate) fn shift_range_with_radius(
    f: &SpectralFunction,
    j: i64,
    freq_radius: f64,
) -> Vec<(i64, i64)> {
    let scale = pow2(-j);
    match f.support_hint() {
        Some(b) => b
            .lo
            .iter()
            .zip(&b.hi)
            .map(|(&lo, &hi)| ((lo * scale).floor() as i64 - 1, (hi * scale).ceil() as i64 + 1))
            .collect(),
        None => {
            let r = freq_radius * f.freq_scale().max(1.0);
            let k = (r * scale).ceil() as i64 + 1;
            vec![(-k, k); f.dim()]
        }
    }
}

/// [`shift_range_with_radius`] at the default decay radius.
pub(crate) fn shift_range_for(f: &SpectralFunction, j: i64) -> Vec<(i64, i64)> {
    shift_range_with_radius(f, j, AdaptedQuad::default().freq_radius)
}

fn shift_range(f: &SpectralFunction, j: i64, quad: &AdaptedQuad) -> Vec<(i64, i64)> {
    shift_range_with_radius(f, j, quad.freq_radius)
}

/// Scale-adapted modulation norm at scale `j`: `l^q` over cells of
/// [`cell_norm_adapted`], with stratified shift enumeration at deep scales
/// (d = 1 only beyond the exact-count budget).
pub fn mod_norm_adapted(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    j: i64,
    pou: &PartitionOfUnity,
    quad: &AdaptedQuad,
) -> Result<f64> {
    let d = f.dim();
    let ranges = shift_range(f, j, quad);
    let total: usize = ranges
        .iter()
        .map(|(lo, hi)| (hi - lo + 1) as usize)
        .try_fold(1usize, |a, b| a.checked_mul(b))
        .ok_or(Error::EmptyCellSet)?;
    if total > quad.exact_cells && d != 1 {
        return Err(Error::InvalidGrid(
            "stratified cell enumeration is one-dimensional".into(),
        ));
    }
    let samples: Vec<Vec<(i64, f64)>> = if d == 1 {
        vec![shift_samples(ranges[0].0, ranges[0].1, quad)]
    } else {
        ranges
            .iter()
            .map(|(lo, hi)| (*lo..=*hi).map(|k| (k, 1.0)).collect())
            .collect()
    };
    let sizes: Vec<usize> = samples.iter().map(|s| s.len()).collect();
    let count: usize = sizes.iter().product();
    let terms: Vec<Result<f64>> = (0..count)
        .into_par_iter()
        .with_min_len(8)
        .map(|flat| {
            let mut rem = flat;
            let mut k = vec![0i64; d];
            let mut weight = 1.0f64;
            for ax in (0..d).rev() {
                let (kk, w) = samples[ax][rem % sizes[ax]];
                k[ax] = kk;
                weight *= w;
                rem /= sizes[ax];
            }
            let norm = cell_norm_adapted(f, p, j, &k, pou, quad)?;
            Ok(weight * norm.powf(q))
        })
        .collect();
    let mut sum = 0.0f64;
    for t in terms {
        sum += t?;
    }
    Ok(sum.powf(1.0 / q))
}

/// Weighted per-scale contributions `(j, w_j ||f||_{[j]})` on the adapted
/// route.
#[allow(clippy::too_many_arguments)]
pub fn scaled_contributions_adapted(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    weight: &VectorWeight,
    j_min: i64,
    j_max: i64,
    pou: &PartitionOfUnity,
    quad: &AdaptedQuad,
) -> Result<Vec<(i64, f64)>> {
    (j_min..=j_max)
        .map(|j| {
            let w = weight.value_checked(j)?;
            Ok((j, w * mod_norm_adapted(f, p, q, j, pou, quad)?))
        })
        .collect()
}

/// Scale-aggregated norm on the adapted route:
/// `( sum_j (w_j ||f||_{[j]})^r )^{1/r}`.
#[allow(clippy::too_many_arguments)]
pub fn scaled_norm_adapted(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    r: f64,
    weight: &VectorWeight,
    j_min: i64,
    j_max: i64,
    pou: &PartitionOfUnity,
    quad: &AdaptedQuad,
) -> Result<f64> {
    let contributions =
        scaled_contributions_adapted(f, p, q, weight, j_min, j_max, pou, quad)?;
    Ok(crate::util::lp_aggregate(contributions.into_iter().map(|(_, c)| c), r))
}

/// Per-scale norms with the fitted deep-scale slope and large-scale
/// plateau.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub per_j: Vec<(i64, f64)>,
    /// Least-squares slope of `log2 ||f||_{[j]}` over `j <= -4`.
    pub slope: Option<f64>,
    /// Smallest per-scale norm over `j >= 6`.
    pub plateau: Option<f64>,
}

/// Per-scale modulation norms over a scale window, with slope and plateau
/// summaries.
#[allow(clippy::too_many_arguments)]
pub fn decay_profile(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    j_min: i64,
    j_max: i64,
    pou: &PartitionOfUnity,
    quad: &AdaptedQuad,
) -> Result<DecayProfile> {
    let per_j: Vec<(i64, f64)> = (j_min..=j_max)
        .map(|j| Ok((j, mod_norm_adapted(f, p, q, j, pou, quad)?)))
        .collect::<Result<_>>()?;
    let deep: Vec<(f64, f64)> = per_j
        .iter()
        .filter(|(j, v)| *j <= -4 && *v > 0.0)
        .map(|(j, v)| (*j as f64, v.log2()))
        .collect();
    let slope = (deep.len() >= 2).then(|| crate::util::least_squares_slope(&deep));
    let plateau = per_j
        .iter()
        .filter(|(j, _)| *j >= 6)
        .map(|(_, v)| *v)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    Ok(DecayProfile { per_j, slope, plateau })
}

/// `L^2` mass of `fhat` on the dyadic octave `[2^j, 2^{j+1})` (d = 1),
/// by midpoint quadrature: `( int |fhat|^2 )^{1/2}`.
pub fn octave_l2_mass(f: &SpectralFunction, j: i64, samples: usize) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    let lo = pow2(j);
    let width = pow2(j);
    let h = width / samples as f64;
    let mut acc = 0.0;
    for i in 0..samples {
        let xi = [lo + (i as f64 + 0.5) * h];
        acc += f.eval(&xi).norm_sqr();
    }
    Ok((acc * h).sqrt())
}
