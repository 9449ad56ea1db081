//! Dyadic sampling lattices.
//!
//! A [`GridSpec`] fixes a frequency lattice with spacing `2^-a` covering
//! `[-2^b, 2^b)^d` and the dual spatial lattice with spacing `2^-(b+1)`
//! covering one period `[-2^(a-1), 2^(a-1))^d` of the discrete
//! reconstruction. Both lattices are offset by half a step so that no
//! sample lands on a coordinate axis; this keeps rules with singularities
//! at the origin evaluable and makes the lattices symmetric under
//! negation.

use crate::error::{Error, Result};
use crate::util::pow2;

/// Memory guard: `a + b + 1 <= 26`, i.e. at most 2^26 points per axis.
pub const MAX_AXIS_EXPONENT_SUM: i64 = 26;

/// Dyadic frequency/space sampling lattice in `d` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    dim: usize,
    /// Resolution exponent: frequency spacing is `2^-a`.
    a: i64,
    /// Extent exponent: the frequency lattice covers `[-2^b, 2^b)^d`.
    b: i64,
}

impl GridSpec {
    pub fn new(dim: usize, a: i64, b: i64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be >= 1".into()));
        }
        if a < 1 || b < 1 {
            return Err(Error::InvalidGrid(format!(
                "exponents must satisfy a >= 1 and b >= 1 (got a={a}, b={b})"
            )));
        }
        if a + b + 1 > MAX_AXIS_EXPONENT_SUM {
            return Err(Error::InvalidGrid(format!(
                "a+b+1 = {} exceeds the memory guard {MAX_AXIS_EXPONENT_SUM}",
                a + b + 1
            )));
        }
        Ok(Self { dim, a, b })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// Points per axis, `N = 2^(a+b+1)`.
    pub fn points_per_axis(&self) -> usize {
        1usize << (self.a + self.b + 1)
    }

    /// Total lattice size `N^d`.
    pub fn total_points(&self) -> usize {
        let n = self.points_per_axis();
        let mut total = 1usize;
        for _ in 0..self.dim {
            total = total
                .checked_mul(n)
                .expect("lattice size overflows usize");
        }
        total
    }

    /// Frequency spacing `2^-a`.
    pub fn dxi(&self) -> f64 {
        pow2(-self.a)
    }

    /// Spatial spacing `2^-(b+1)`.
    pub fn dx(&self) -> f64 {
        pow2(-self.b - 1)
    }

    /// Volume of the spatial quadrature domain, `(N dx)^d = 2^(a d)`.
    pub fn spatial_volume(&self) -> f64 {
        pow2(self.a * self.dim as i64)
    }

    /// Smallest per-axis lattice index (inclusive); largest is `-n_min()-1`.
    pub fn index_min(&self) -> i64 {
        -((self.points_per_axis() / 2) as i64)
    }

    /// Frequency coordinate of signed index `n`: `(n + 1/2) 2^-a`.
    pub fn freq_coord(&self, n: i64) -> f64 {
        (n as f64 + 0.5) * self.dxi()
    }

    /// Spatial coordinate of signed index `m`: `(m + 1/2) 2^-(b+1)`.
    pub fn spatial_coord(&self, m: i64) -> f64 {
        (m as f64 + 0.5) * self.dx()
    }

    /// Iterator over signed per-axis indices.
    pub fn axis_indices(&self) -> impl Iterator<Item = i64> + Clone {
        let lo = self.index_min();
        lo..-lo
    }

    /// Signed per-axis indices `n` with `freq_coord(n)` in the open
    /// interval `(lo, hi)`, clamped to the axis; `None` when empty.
    pub fn freq_indices_in(&self, lo: f64, hi: f64) -> Option<(i64, i64)> {
        let dxi = self.dxi();
        let mut n_lo = (lo / dxi - 0.5).floor() as i64 + 1;
        let mut n_hi = (hi / dxi - 0.5).ceil() as i64 - 1;
        let axis_lo = self.index_min();
        let axis_hi = -axis_lo - 1;
        n_lo = n_lo.max(axis_lo);
        n_hi = n_hi.min(axis_hi);
        if n_lo > n_hi {
            None
        } else {
            Some((n_lo, n_hi))
        }
    }

    /// Grid adapted to a dyadic dilation by `2^j0`: frequency features of
    /// the dilated function live at `2^j0`-scaled positions, so resolution
    /// and extent exponents shift in opposite directions. Lattice points
    /// and point counts map bijectively onto the original grid.
    pub fn corresponding(&self, j0: i64) -> Result<Self> {
        Self::new(self.dim, self.a - j0, self.b + j0)
    }

    /// One dyadic refinement in both resolution and extent.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, self.a + 1, self.b + 1)
    }

    /// Decode a flat row-major index (axis 0 slowest) into signed indices.
    pub fn decode(&self, mut flat: usize, out: &mut [i64]) {
        debug_assert_eq!(out.len(), self.dim);
        let n = self.points_per_axis();
        let half = (n / 2) as i64;
        for ax in (0..self.dim).rev() {
            out[ax] = (flat % n) as i64 - half;
            flat /= n;
        }
    }

    /// Flat row-major index of signed per-axis indices.
    pub fn encode(&self, signed: &[i64]) -> usize {
        debug_assert_eq!(signed.len(), self.dim);
        let n = self.points_per_axis();
        let half = (n / 2) as i64;
        let mut flat = 0usize;
        for &s in signed {
            debug_assert!(s >= -half && s < half);
            flat = flat * n + (s + half) as usize;
        }
        flat
    }
}
