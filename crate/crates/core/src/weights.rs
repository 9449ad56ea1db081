//! Vector weights over dyadic scales: constructors, the admissibility
//! (decay) conditions, translation, and multiplicativity.
//!
//! A weight is a sequence `{w_j}_{j in Z}` with `w_j >= 0`. The canonical
//! family is piecewise-power: `w_j = c 2^{beta_plus j}` for `j >= 0` and
//! `c 2^{beta_minus j}` for `j < 0`; a stored translation offset keeps
//! shifts exact across the branch point. Finite tabulated weights are
//! supported for experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::conjugate_exponent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VectorWeight {
    /// `w_j = c 2^{beta_plus (j+shift)}` for `j + shift >= 0`,
    /// `c 2^{beta_minus (j+shift)}` otherwise.
    #[serde(rename = "piecewise-power")]
    PiecewisePower {
        c: f64,
        beta_plus: f64,
        beta_minus: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        shift: i64,
    },
    /// Values on a finite index window `[j_lo, j_lo + values.len())`.
    #[serde(rename = "tabulated")]
    Tabulated { j_lo: i64, values: Vec<f64> },
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

/// Outcome of an admissibility test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    /// Strict-inequality margin; positive iff admissible.
    pub margin: f64,
    /// True when decided by a slope fit on tabulated data.
    pub heuristic: bool,
}

impl VectorWeight {
    /// Piecewise-power constructor; `c` must be positive.
    pub fn power(c: f64, beta_plus: f64, beta_minus: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidWeight(format!("c must be > 0, got {c}")));
        }
        Ok(Self::PiecewisePower { c, beta_plus, beta_minus, shift: 0 })
    }

    pub fn constant_one() -> Self {
        Self::PiecewisePower { c: 1.0, beta_plus: 0.0, beta_minus: 0.0, shift: 0 }
    }

    pub fn tabulated(j_lo: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeight("tabulated weight needs values".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidWeight("weights must be >= 0".into()));
        }
        Ok(Self::Tabulated { j_lo, values })
    }

    /// `w_j`, or `None` outside a tabulated window.
    pub fn value(&self, j: i64) -> Option<f64> {
        match self {
            Self::PiecewisePower { c, beta_plus, beta_minus, shift } => {
                let i = j + shift;
                let beta = if i >= 0 { beta_plus } else { beta_minus };
                Some(c * (beta * i as f64).exp2())
            }
            Self::Tabulated { j_lo, values } => {
                let idx = j.checked_sub(*j_lo)?;
                if idx < 0 || idx as usize >= values.len() {
                    None
                } else {
                    Some(values[idx as usize])
                }
            }
        }
    }

    /// `w_j`, erroring outside a tabulated window.
    pub fn value_checked(&self, j: i64) -> Result<f64> {
        self.value(j).ok_or(Error::WeightRange(j))
    }

    /// Translation `(tau^n w)_j = w_{j+n}`.
    pub fn shifted(&self, n: i64) -> Self {
        match self {
            Self::PiecewisePower { c, beta_plus, beta_minus, shift } => Self::PiecewisePower {
                c: *c,
                beta_plus: *beta_plus,
                beta_minus: *beta_minus,
                shift: shift + n,
            },
            Self::Tabulated { j_lo, values } => {
                Self::Tabulated { j_lo: j_lo - n, values: values.clone() }
            }
        }
    }

    /// Multiplicativity probe: `w_{i+j} = w_i w_j` on `[-8, 8]^2` to 1e-12
    /// relative (false wherever values are unavailable).
    pub fn is_multiplicative(&self) -> bool {
        for i in -8i64..=8 {
            for j in -8i64..=8 {
                let (Some(wij), Some(wi), Some(wj)) =
                    (self.value(i + j), self.value(i), self.value(j))
                else {
                    return false;
                };
                let prod = wi * wj;
                let scale = wij.abs().max(prod.abs()).max(f64::MIN_POSITIVE);
                if (wij - prod).abs() > 1e-12 * scale {
                    return false;
                }
            }
        }
        true
    }

    fn slopes(&self) -> (f64, f64, bool) {
        match self {
            Self::PiecewisePower { beta_plus, beta_minus, .. } => (*beta_plus, *beta_minus, false),
            Self::Tabulated { j_lo, values } => {
                // Least-squares log2-slope fits on each side of j = 0.
                let pts: Vec<(f64, f64)> = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| ((*j_lo + i as i64) as f64, v.log2()))
                    .collect();
                let fit = |side: &[(f64, f64)]| -> f64 {
                    if side.len() < 2 {
                        return 0.0;
                    }
                    crate::util::least_squares_slope(side)
                };
                let plus: Vec<_> = pts.iter().copied().filter(|p| p.0 >= 0.0).collect();
                let minus: Vec<_> = pts.iter().copied().filter(|p| p.0 < 0.0).collect();
                (fit(&plus), fit(&minus), true)
            }
        }
    }

    fn admissible_with_threshold(&self, threshold: f64) -> Admissibility {
        let (beta_plus, beta_minus, heuristic) = self.slopes();
        let margin = (-beta_plus).min(beta_minus - threshold);
        Admissibility { admissible: margin > 0.0, margin, heuristic }
    }

    /// Decay condition making smooth functions members of the scaled
    /// modulation space: decay for `j >= 0` (`beta_plus < 0`) and
    /// `beta_minus > d/q - d/p'` for `j < 0`.
    pub fn is_admissible(&self, p: f64, q: f64, d: usize) -> Admissibility {
        let threshold = d as f64 * (1.0 / q - 1.0 / conjugate_exponent(p));
        self.admissible_with_threshold(threshold)
    }

    /// Fourier-amalgam variant: the conjugate exponent is replaced by `p`
    /// itself, i.e. `beta_minus > d/q - d/p`.
    pub fn is_admissible_amalgam(&self, p: f64, q: f64, d: usize) -> Admissibility {
        let threshold = d as f64 * (1.0 / q - 1.0 / p);
        self.admissible_with_threshold(threshold)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weight serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidWeight(e.to_string()))
    }
}

/// Weight `w_j = 2^{j d (p'-2)/(2p')}` for `p > 2`; multiplicative, and
/// admissible exactly when `q > 2`. Drives the L2-embedding experiments.
pub fn embedding_weight(p: f64, d: usize) -> Result<VectorWeight> {
    if !(p > 2.0) {
        return Err(Error::InvalidExponent(format!("embedding weight needs p > 2, got {p}")));
    }
    let pc = conjugate_exponent(p);
    let beta = d as f64 * (pc - 2.0) / (2.0 * pc);
    VectorWeight::power(1.0, beta, beta)
}

/// Weight `w_j = 2^{j d (1/p - 1/p0)}` for `p > p0 > q' > 1`; the scaled
/// space then rescales like `L^{p0}`.
pub fn lp_scaling_weight(p: f64, p0: f64, q: f64, d: usize) -> Result<VectorWeight> {
    let qc = conjugate_exponent(q);
    if !(p > p0 && p0 > qc && qc > 1.0) {
        return Err(Error::InvalidExponent(format!(
            "need p > p0 > q' > 1, got p={p}, p0={p0}, q'={qc}"
        )));
    }
    let beta = d as f64 * (1.0 / p - 1.0 / p0);
    VectorWeight::power(1.0, beta, beta)
}

/// Target weight for propagator boundedness: the `j >= 0` branch is
/// damped by `2^{-j d |1 - 2/p|}`, the `j < 0` branch is untouched.
/// Admissibility is preserved (the positive-side slope only decreases).
pub fn propagator_target_weight(w: &VectorWeight, p: f64, d: usize) -> VectorWeight {
    let damp = d as f64 * (1.0 - 2.0 / p).abs();
    match w {
        VectorWeight::PiecewisePower { c, beta_plus, beta_minus, shift: 0 } => {
            VectorWeight::PiecewisePower {
                c: *c,
                beta_plus: beta_plus - damp,
                beta_minus: *beta_minus,
                shift: 0,
            }
        }
        VectorWeight::PiecewisePower { .. } => {
            // Shifted branch point: fall back to a tabulated window so the
            // damping applies at true j >= 0.
            let values: Vec<f64> = (-64i64..=64)
                .map(|j| {
                    let base = w.value(j).unwrap_or(0.0);
                    if j >= 0 {
                        base * (-damp * j as f64).exp2()
                    } else {
                        base
                    }
                })
                .collect();
            VectorWeight::Tabulated { j_lo: -64, values }
        }
        VectorWeight::Tabulated { j_lo, values } => {
            let damped = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let j = j_lo + i as i64;
                    if j >= 0 {
                        v * (-damp * j as f64).exp2()
                    } else {
                        *v
                    }
                })
                .collect();
            VectorWeight::Tabulated { j_lo: *j_lo, values: damped }
        }
    }
}

/// The pair of reciprocal Morrey-correspondence weights
/// `2^{j d (1/q - 1/p)}` and `2^{j d (1/p - 1/q)}`.
pub fn morrey_weights(p: f64, q: f64, d: usize) -> Result<(VectorWeight, VectorWeight)> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::InvalidExponent("Morrey weights need p, q >= 1".into()));
    }
    let beta = d as f64 * (1.0 / q - 1.0 / p);
    Ok((VectorWeight::power(1.0, beta, beta)?, VectorWeight::power(1.0, -beta, -beta)?))
}
