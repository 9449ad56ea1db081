//! Fourier-amalgam norms (frequency-side windowed `L^p`), their weighted
//! scale aggregation, the `L^2`-type weighted variant used in Strichartz
//! refinements, the cell-wise Hausdorff–Young comparison, and the spatial
//! Wiener amalgam norm.
//!
//! Frequency-side norms never take an inverse transform: each cell is a
//! plain lattice quadrature of `psi_{j,k} fhat`, which is cheaper and
//! keeps inequality checks free of compounded reconstruction error.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{FreqField, SpectralFunction};
use crate::grid::GridSpec;
use crate::norms::{lq_over_cells, LatticeEngine, NormReport, NormSpec};
use crate::partition::{FrequencyCell, PartitionOfUnity};
use crate::transform::synthesis_in_place;
use crate::util::conjugate_exponent;

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v >= 1.0 && v.is_finite()) {
        return Err(Error::InvalidExponent(format!("{name} must be finite and >= 1, got {v}")));
    }
    Ok(())
}

/// Fourier-amalgam norm at scale `j`:
/// `( sum_k || psi_{j,k} fhat ||_{L^p_xi}^q )^{1/q}` by frequency-lattice
/// quadrature. Scale 0 is the plain Fourier-amalgam norm.
pub fn famalgam_norm(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    j: i64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<f64> {
    let field = f.sample(grid)?;
    famalgam_norm_field(&field, p, q, j, pou)
}

/// [`famalgam_norm`] on pre-sampled data.
pub fn famalgam_norm_field(
    field: &FreqField,
    p: f64,
    q: f64,
    j: i64,
    pou: &PartitionOfUnity,
) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let engine = LatticeEngine::new(field, pou)?;
    lq_over_cells(&engine, j, q, |cell| engine.cell_freq_norm(cell, p), None)
}

/// Weighted `l^r` aggregation of per-scale Fourier-amalgam norms.
pub fn scaled_famalgam_norm(
    f: &SpectralFunction,
    spec: &NormSpec,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<NormReport> {
    let field = f.sample(grid)?;
    let engine = LatticeEngine::new(&field, pou)?;
    let mut per_j = Vec::with_capacity((spec.j_max - spec.j_min + 1) as usize);
    for j in spec.j_min..=spec.j_max {
        let w = spec.weight.value_checked(j)?;
        let m = lq_over_cells(&engine, j, spec.q, |cell| engine.cell_freq_norm(cell, spec.p), None)?;
        per_j.push((j, w * m));
    }
    let value = per_j
        .iter()
        .map(|(_, c)| c.powf(spec.r))
        .sum::<f64>()
        .powf(1.0 / spec.r);
    let peak = per_j.iter().map(|(_, c)| *c).fold(0.0f64, f64::max);
    let endpoint = per_j
        .first()
        .map(|(_, c)| *c)
        .unwrap_or(0.0)
        .max(per_j.last().map(|(_, c)| *c).unwrap_or(0.0));
    let boundary_flag = peak > 0.0 && endpoint > 0.01 * peak;
    Ok(NormReport { value, per_j, boundary_flag, per_cell: None })
}

/// The `L^2`-scaling weighted amalgam norm used in Strichartz
/// refinements:
/// `( sum_j 2^{j d (p'-2)/(2p') q} sum_k || psi_{j,k} fhat ||_{L^{p'}}^q )^{1/q}`
/// for `p > 1`, computed by an independent double loop. Coincides with the
/// weighted amalgam aggregation at exponents `(p', q, q)` and weight
/// `2^{j d (p'-2)/(2p')}`.
pub fn fx_norm(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    j_min: i64,
    j_max: i64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<f64> {
    check_exponent("q", q)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("fx norm needs 1 < p < inf, got {p}")));
    }
    let pc = conjugate_exponent(p);
    let beta = grid.dim() as f64 * (pc - 2.0) / (2.0 * pc);
    let field = f.sample(grid)?;
    let engine = LatticeEngine::new(&field, pou)?;
    let mut sum = 0.0f64;
    for j in j_min..=j_max {
        let level = lq_over_cells(&engine, j, q, |cell| engine.cell_freq_norm(cell, pc), None)?;
        sum += (beta * j as f64).exp2().powf(q) * level.powf(q);
    }
    Ok(sum.powf(1.0 / q))
}

/// Both sides of the cell-wise Hausdorff–Young comparison for `p >= 2`:
/// `lhs = || psi_{j,k}(D) f ||_{L^p_x}` (spatial reconstruction),
/// `rhs = || psi_{j,k} fhat ||_{L^{p'}_xi}` (frequency quadrature).
/// `lhs <= rhs` holds exactly for the discrete pair; at `p = 2` the two
/// agree by Plancherel.
pub fn hausdorff_young_cell_check(
    f: &SpectralFunction,
    p: f64,
    cell: &FrequencyCell,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    if !(p >= 2.0) {
        return Err(Error::InvalidExponent(format!(
            "Hausdorff-Young direction needs p >= 2, got {p}"
        )));
    }
    let field = f.sample(grid)?;
    hausdorff_young_cell_check_field(&field, p, cell, pou)
}

/// [`hausdorff_young_cell_check`] on pre-sampled data.
pub fn hausdorff_young_cell_check_field(
    field: &FreqField,
    p: f64,
    cell: &FrequencyCell,
    pou: &PartitionOfUnity,
) -> Result<(f64, f64)> {
    let engine = LatticeEngine::new(field, pou)?;
    let lhs = engine.cell_norm(cell, p);
    let rhs = engine.cell_freq_norm(cell, conjugate_exponent(p));
    Ok((lhs, rhs))
}

/// Per-window spatial norms `(k, || psi(x - k) f ||_{L^p})` over the
/// spatial period, using the same window in the spatial variable.
pub fn wiener_window_norms(
    f: &SpectralFunction,
    p: f64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<Vec<(Vec<i64>, f64)>> {
    check_exponent("p", p)?;
    let field = f.sample(grid)?;
    let mut spatial = field.values;
    synthesis_in_place(grid, &mut spatial);
    if spatial.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let d = grid.dim();
    let radius = 1i64 << (grid.a() - 1);
    let side = (2 * radius + 1) as usize;
    let count = side.pow(d as u32);
    let dx_vol = grid.dx().powi(d as i32);
    let norms: Vec<(Vec<i64>, f64)> = (0..count)
        .into_par_iter()
        .with_min_len(4)
        .map(|flat| {
            let mut k = vec![0i64; d];
            let mut rem = flat;
            for ax in (0..d).rev() {
                k[ax] = (rem % side) as i64 - radius;
                rem /= side;
            }
            // Spatial lattice points inside the window (k-1, k+1)^d.
            let mut sum = 0.0f64;
            let mut idx = vec![0i64; d];
            let mut x = vec![0f64; d];
            for (flat_m, v) in spatial.iter().enumerate() {
                grid.decode(flat_m, &mut idx);
                let mut w = 1.0f64;
                for ax in 0..d {
                    x[ax] = grid.spatial_coord(idx[ax]);
                    w *= pou.psi1(x[ax] - k[ax] as f64);
                    if w == 0.0 {
                        break;
                    }
                }
                if w != 0.0 {
                    sum += (w * v.norm()).powf(p);
                }
            }
            (k, (sum * dx_vol).powf(1.0 / p))
        })
        .collect();
    Ok(norms)
}

/// Wiener amalgam norm `|| || psi(x - k) f ||_{L^p_x} ||_{l^q_k}` over the
/// spatial period.
pub fn wiener_amalgam_norm(
    f: &SpectralFunction,
    p: f64,
    q: f64,
    pou: &PartitionOfUnity,
    grid: &GridSpec,
) -> Result<f64> {
    check_exponent("q", q)?;
    let norms = wiener_window_norms(f, p, pou, grid)?;
    Ok(norms.iter().map(|(_, v)| v.powf(q)).sum::<f64>().powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{dilate_dyadic, synthesize, BoxRegion, SpectralFunction, SyntheticKind};
    use crate::norms::lp_norm;
    use crate::util::{pow2, rel_dev};
    use crate::weights::{embedding_weight, VectorWeight};

    fn gaussian() -> SpectralFunction {
        synthesize(SyntheticKind::Gaussian, 1).unwrap()
    }

    fn pou1() -> PartitionOfUnity {
        PartitionOfUnity::new(1).unwrap()
    }

    fn random_fn(seed: u64) -> SpectralFunction {
        synthesize(
            SyntheticKind::RandomBandlimited {
                seed,
                box_region: BoxRegion::cube(1, -6.0, 6.0),
            },
            1,
        )
        .unwrap()
    }

    #[test]
    fn famalgam_zero_and_l2_sandwich() {
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        assert_eq!(
            famalgam_norm(&SpectralFunction::zero(1), 2.0, 2.0, 0, &pou, &grid).unwrap(),
            0.0
        );
        let spec = NormSpec::new(2.0, 2.0, 2.0, VectorWeight::constant_one(), -2, 2).unwrap();
        assert_eq!(
            scaled_famalgam_norm(&SpectralFunction::zero(1), &spec, &pou, &grid)
                .unwrap()
                .value,
            0.0
        );
        let cell = FrequencyCell::new(0, vec![0]);
        let (zl, zr) =
            hausdorff_young_cell_check(&SpectralFunction::zero(1), 4.0, &cell, &pou, &grid)
                .unwrap();
        assert_eq!((zl, zr), (0.0, 0.0));
        // p = q = 2: value^2 = dxi sum |fhat|^2 sum_k psi^2 in [1/2, 1] of
        // the L^2 quadrature energy.
        let f = gaussian();
        let v = famalgam_norm(&f, 2.0, 2.0, 0, &pou, &grid).unwrap();
        let field = f.sample(&grid).unwrap();
        let energy: f64 = field.values.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dxi();
        assert!(v * v <= energy * (1.0 + 1e-12));
        assert!(v * v >= 0.5 * energy * (1.0 - 1e-12));
    }

    #[test]
    fn famalgam_refinement_stable() {
        let pou = pou1();
        let coarse = famalgam_norm(&gaussian(), 4.0, 4.0, 0, &pou, &GridSpec::new(1, 6, 4).unwrap())
            .unwrap();
        let fine = famalgam_norm(&gaussian(), 4.0, 4.0, 0, &pou, &GridSpec::new(1, 7, 5).unwrap())
            .unwrap();
        assert!(rel_dev(coarse, fine) < 1e-4, "{coarse} vs {fine}");
    }

    #[test]
    fn scaled_famalgam_rescaling() {
        // || f(2^{j0} .) || = lambda^{log2 w1 - d/p'} || f || for a
        // multiplicative weight, corresponding grids and windows.
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        let w = embedding_weight(4.0, 1).unwrap();
        let spec = NormSpec::new(4.0, 4.0, 4.0, w.clone(), -4, 4).unwrap();
        let base = scaled_famalgam_norm(&gaussian(), &spec, &pou, &grid).unwrap().value;
        let log2w1 = w.value(1).unwrap().log2();
        for j0 in [-2i64, 1, 3] {
            let mut shifted = spec.clone();
            shifted.j_min += j0;
            shifted.j_max += j0;
            let lhs = scaled_famalgam_norm(
                &dilate_dyadic(&gaussian(), j0),
                &shifted,
                &pou,
                &grid.corresponding(j0).unwrap(),
            )
            .unwrap()
            .value;
            let expect = pow2(j0).powf(log2w1 - 3.0 / 4.0) * base;
            assert!(rel_dev(lhs, expect) <= 1e-10, "j0={j0}");
        }
    }

    #[test]
    fn fx_norm_equals_weighted_amalgam() {
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        let (p, q) = (4.0, 4.0);
        for f in [gaussian(), random_fn(2)] {
            let direct = fx_norm(&f, p, q, -4, 4, &pou, &grid).unwrap();
            let pc = conjugate_exponent(p);
            let beta = (pc - 2.0) / (2.0 * pc);
            let w = VectorWeight::power(1.0, beta, beta).unwrap();
            let spec = NormSpec::new(pc, q, q, w, -4, 4).unwrap();
            let via_amalgam = scaled_famalgam_norm(&f, &spec, &pou, &grid).unwrap().value;
            assert!((direct - via_amalgam).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn fx_norm_scales_like_l2() {
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        let base = fx_norm(&gaussian(), 4.0, 4.0, -4, 4, &pou, &grid).unwrap();
        for j0 in [-2i64, 1, 3] {
            let scaled = fx_norm(
                &dilate_dyadic(&gaussian(), j0),
                4.0,
                4.0,
                -4 + j0,
                4 + j0,
                &pou,
                &grid.corresponding(j0).unwrap(),
            )
            .unwrap();
            let expect = pow2(j0).powf(-0.5) * base;
            assert!(rel_dev(scaled, expect) <= 1e-10, "j0={j0}");
        }
        assert_eq!(
            fx_norm(&SpectralFunction::zero(1), 4.0, 4.0, -2, 2, &pou, &grid).unwrap(),
            0.0
        );
    }

    #[test]
    fn hausdorff_young_cells() {
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        let f = gaussian();
        let field = f.sample(&grid).unwrap();
        for j in [-2i64, 0, 2] {
            let radius = pou.cell_radius(j, &grid);
            for k in -radius..=radius {
                let cell = FrequencyCell::new(j, vec![k]);
                let (lhs, rhs) =
                    hausdorff_young_cell_check_field(&field, 4.0, &cell, &pou).unwrap();
                assert!(lhs <= rhs + 1e-12, "j={j}, k={k}: {lhs} > {rhs}");
                let (l2, r2) =
                    hausdorff_young_cell_check_field(&field, 2.0, &cell, &pou).unwrap();
                assert!((l2 - r2).abs() <= 1e-10 * r2.max(1e-30), "j={j}, k={k}");
            }
        }
        assert!(hausdorff_young_cell_check(&f, 1.5, &FrequencyCell::new(0, vec![0]), &pou, &grid)
            .is_err());
    }

    #[test]
    fn embedding_into_scaled_modulation_norm() {
        // Cell-wise Hausdorff-Young summed with identical weights: the
        // spatial-side aggregated norm is dominated by the frequency-side
        // one at exponents (p, q, q) with the matching weight.
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        for (p, q) in [(4.0, 4.0), (3.0, 4.0)] {
            let w = embedding_weight(p, 1).unwrap();
            for seed in 0..5u64 {
                let f = random_fn(seed);
                let spec = NormSpec::new(p, q, q, w.clone(), -4, 4).unwrap();
                let lhs = crate::norms::scaled_norm(&f, &spec, &pou, &grid).unwrap().value;
                let rhs = fx_norm(&f, p, q, -4, 4, &pou, &grid).unwrap();
                assert!(lhs <= rhs + 1e-10, "p={p}, q={q}, seed={seed}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn wiener_amalgam_basics() {
        let grid = GridSpec::new(1, 5, 4).unwrap();
        let pou = pou1();
        assert_eq!(
            wiener_amalgam_norm(&SpectralFunction::zero(1), 2.0, 2.0, &pou, &grid).unwrap(),
            0.0
        );
        // Narrow function: only windows around the origin see mass. The
        // dilated gaussian f(4x) has spatial width ~ 1/4.
        let narrow = dilate_dyadic(&gaussian(), 2);
        let norms = wiener_window_norms(&narrow, 2.0, &pou, &grid).unwrap();
        let peak = norms.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        for (k, v) in &norms {
            if k[0].abs() >= 3 {
                assert!(*v <= 1e-12 * peak, "k={k:?}: {v}");
            }
        }
        for k in [-1i64, 0, 1] {
            let v = norms.iter().find(|(kk, _)| kk[0] == k).unwrap().1;
            assert!(v > 1e-6 * peak);
        }
        // Windowed square norms resum to the full L^2 norm when the sum of
        // squared windows is sandwiched in [1/2, 1].
        let f = gaussian();
        let v = wiener_amalgam_norm(&f, 2.0, 2.0, &pou, &grid).unwrap();
        let l2 = lp_norm(&f, 2.0, &grid).unwrap();
        assert!(v <= l2 * (1.0 + 1e-12) && v >= l2 * 2f64.powf(-0.5) * (1.0 - 1e-12));
    }

    #[test]
    fn wiener_gaussian_reference_stable() {
        let pou = pou1();
        let coarse =
            wiener_amalgam_norm(&gaussian(), 4.0, 2.0, &pou, &GridSpec::new(1, 5, 4).unwrap())
                .unwrap();
        let fine =
            wiener_amalgam_norm(&gaussian(), 4.0, 2.0, &pou, &GridSpec::new(1, 6, 5).unwrap())
                .unwrap();
        assert!(rel_dev(coarse, fine) < 1e-4, "{coarse} vs {fine}");
    }
}
