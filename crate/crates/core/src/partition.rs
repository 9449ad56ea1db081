//! Smooth partition of unity on unit frequency cubes and its dyadic
//! dilates/translates.
//!
//! The window is `psi(xi) = prod_i psi1(xi_i)` with
//! `psi1(t) = rho(1+t) rho(1-t)` built from the smooth step `rho`. Since
//! `rho(t) + rho(1-t) = 1` algebraically, integer translates of `psi1` sum
//! to one to machine precision and `supp psi = [-1,1]^d` exactly. The cell
//! multiplier at dyadic scale `j` and lattice shift `k` is
//! `psi(2^-j xi - k)`, supported on `2^j([-1,1]^d + k)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::{apply_multiplier_with_support, BoxRegion, SpectralFunction};
use crate::grid::GridSpec;
use crate::util::{pow2, smooth_step};

type Generator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Index pair of a frequency cell: dyadic scale `j`, lattice shift `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyCell {
    pub j: i64,
    pub k: Vec<i64>,
}

impl FrequencyCell {
    pub fn new(j: i64, k: Vec<i64>) -> Self {
        Self { j, k }
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// The closed cell box `2^j ([-1,1]^d + k)`.
    pub fn box_region(&self) -> BoxRegion {
        let s = pow2(self.j);
        let lo = self.k.iter().map(|&k| s * (k as f64 - 1.0)).collect();
        let hi = self.k.iter().map(|&k| s * (k as f64 + 1.0)).collect();
        BoxRegion::new(lo, hi)
    }
}

/// The window of the uniform partition of unity, with its 1-D generator.
#[derive(Clone)]
pub struct PartitionOfUnity {
    dim: usize,
    rho: Generator,
}

impl PartitionOfUnity {
    /// Standard construction from the smooth step.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Self { dim, rho: Arc::new(smooth_step) })
    }

    /// Replace the generator; intended for negative controls in tests.
    pub fn with_generator(
        dim: usize,
        rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { dim, rho: Arc::new(rho) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1-D window `psi1(t) = rho(1+t) rho(1-t)`, zero outside `(-1, 1)`.
    #[inline]
    pub fn psi1(&self, t: f64) -> f64 {
        if t <= -1.0 || t >= 1.0 {
            return 0.0;
        }
        (self.rho)(1.0 + t) * (self.rho)(1.0 - t)
    }

    /// Tensor-product window `psi(xi)`.
    pub fn psi(&self, xi: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), self.dim);
        xi.iter().map(|&t| self.psi1(t)).product()
    }

    /// Cell multiplier value `psi(2^-j xi - k)`.
    pub fn eval_cell(&self, cell: &FrequencyCell, xi: &[f64]) -> f64 {
        debug_assert_eq!(cell.dim(), self.dim);
        let s = pow2(-cell.j);
        xi.iter()
            .zip(&cell.k)
            .map(|(&x, &k)| self.psi1(x * s - k as f64))
            .product()
    }

    /// Frequency projection onto a cell: `fhat -> psi(2^-j . - k) fhat`.
    pub fn project_cell(&self, f: &SpectralFunction, cell: &FrequencyCell) -> SpectralFunction {
        assert_eq!(f.dim(), self.dim);
        assert_eq!(cell.dim(), self.dim);
        let pou = self.clone();
        let cell_owned = cell.clone();
        let support = cell.box_region();
        apply_multiplier_with_support(
            f,
            move |xi| Complex64::new(pou.eval_cell(&cell_owned, xi), 0.0),
            Some(support),
        )
    }

    /// Largest |k| per axis for cells at scale `j` whose support meets the
    /// grid's frequency box `[-2^b, 2^b]^d`.
    pub fn cell_radius(&self, j: i64, grid: &GridSpec) -> i64 {
        if j <= grid.b() {
            1i64 << (grid.b() - j)
        } else {
            1
        }
    }

    /// Maximum deviation of `sum_k psi(xi - k)` from 1 over the frequency
    /// lattice, summing only the active translates.
    pub fn validate(&self, grid: &GridSpec) -> Result<f64> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        let mut worst = 0.0f64;
        let mut idx = vec![0i64; self.dim];
        let mut xi = vec![0f64; self.dim];
        for flat in 0..grid.total_points() {
            grid.decode(flat, &mut idx);
            for (c, &n) in xi.iter_mut().zip(idx.iter()) {
                *c = grid.freq_coord(n);
            }
            // Per-axis sums multiply because psi is a tensor product.
            let mut total = 1.0f64;
            for &t in &xi {
                let k0 = t.floor() as i64;
                let mut axis = 0.0;
                for k in k0 - 1..=k0 + 1 {
                    axis += self.psi1(t - k as f64);
                }
                total *= axis;
            }
            worst = worst.max((total - 1.0).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{synthesize, SyntheticKind};

    #[test]
    fn window_basics() {
        let pou = PartitionOfUnity::new(2).unwrap();
        assert_eq!(pou.psi(&[0.0, 0.0]), 1.0);
        assert_eq!(pou.psi(&[1.0, 0.0]), 0.0);
        assert_eq!(pou.psi(&[0.3, -1.2]), 0.0);
        for t in [-0.9, -0.4, 0.0, 0.2, 0.77] {
            let v = pou.psi1(t);
            assert!((0.0..=1.0).contains(&v));
            assert!((pou.psi1(-t) - v).abs() == 0.0);
        }
    }

    #[test]
    fn translates_sum_to_one() {
        let pou = PartitionOfUnity::new(1).unwrap();
        let sum: f64 = (-2..=2).map(|k| pou.psi1(0.37 - k as f64)).sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn validate_standard_construction() {
        let pou1 = PartitionOfUnity::new(1).unwrap();
        let g1 = GridSpec::new(1, 8, 4).unwrap();
        assert!(pou1.validate(&g1).unwrap() <= 1e-12);

        let pou2 = PartitionOfUnity::new(2).unwrap();
        let g2 = GridSpec::new(2, 6, 3).unwrap();
        assert!(pou2.validate(&g2).unwrap() <= 1e-12);
    }

    #[test]
    fn corrupted_generator_detected() {
        // Squaring rho breaks complementarity: at the midpoint the sum of
        // translates drops to 1/2.
        let pou = PartitionOfUnity::with_generator(1, |t| smooth_step(t) * smooth_step(t));
        let g = GridSpec::new(1, 4, 2).unwrap();
        assert!(pou.validate(&g).unwrap() > 0.1);
    }

    #[test]
    fn eval_cell_identities() {
        let pou = PartitionOfUnity::new(1).unwrap();
        let center = FrequencyCell::new(0, vec![0]);
        assert_eq!(pou.eval_cell(&center, &[0.0]), 1.0);

        let scaled = FrequencyCell::new(3, vec![0]);
        for i in 0..20 {
            let xi = -7.0 + 0.7 * i as f64;
            let lhs = pou.eval_cell(&scaled, &[xi]);
            let rhs = pou.eval_cell(&center, &[xi / 8.0]);
            assert!((lhs - rhs).abs() <= 1e-15);
        }

        let fine = FrequencyCell::new(-2, vec![5]);
        assert_eq!(pou.eval_cell(&fine, &[5.0 * 0.25]), 1.0);
    }

    #[test]
    fn projection_support_and_zero() {
        let pou = PartitionOfUnity::new(1).unwrap();
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let cell = FrequencyCell::new(1, vec![2]);
        let proj = pou.project_cell(&f, &cell);
        // Outside 2^1([-1,1]+2) = [2, 6].
        assert_eq!(proj.eval(&[1.9]), Complex64::default());
        assert_eq!(proj.eval(&[6.3]), Complex64::default());
        assert!(proj.eval(&[4.0]).norm() > 0.0);

        let z = SpectralFunction::zero(1);
        let pz = pou.project_cell(&z, &cell);
        assert_eq!(pz.eval(&[4.0]), Complex64::default());
    }

    #[test]
    fn cell_cover_reconstructs_rule() {
        // Sum of projections over k recovers fhat at lattice points well
        // inside the covered box.
        let pou = PartitionOfUnity::new(1).unwrap();
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let grid = GridSpec::new(1, 4, 2).unwrap();
        for j in [-1i64, 0, 2] {
            let radius = pou.cell_radius(j, &grid) + 1;
            for n in grid.axis_indices().step_by(7) {
                let xi = [grid.freq_coord(n)];
                let mut sum = Complex64::default();
                for k in -radius..=radius {
                    let cell = FrequencyCell::new(j, vec![k]);
                    sum += pou.project_cell(&f, &cell).eval(&xi);
                }
                assert!((sum - f.eval(&xi)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn cell_cover_counts() {
        // Every lattice frequency lies in at least one and at most 2^d
        // cells with nonzero window value.
        let pou = PartitionOfUnity::new(1).unwrap();
        let grid = GridSpec::new(1, 4, 2).unwrap();
        for j in [-2i64, 0, 1] {
            let radius = pou.cell_radius(j, &grid);
            for n in grid.axis_indices() {
                let xi = [grid.freq_coord(n)];
                let active = (-radius..=radius)
                    .filter(|&k| pou.eval_cell(&FrequencyCell::new(j, vec![k]), &xi) > 0.0)
                    .count();
                assert!((1..=2).contains(&active), "j={j}, n={n}: {active} active cells");
            }
        }
    }
}
