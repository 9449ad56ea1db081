//! Numerical toolkit for modulation-space norms across dyadic scales.
//!
//! Functions are frequency-domain rules; dilation, frequency projection,
//! and multiplier operators act on rules exactly, and discretization only
//! enters inside norm quadrature. Built on top of that: the uniform
//! partition of unity and its dyadic dilates, a vector-weight algebra over
//! scales, per-scale modulation and Fourier-amalgam norms with weighted
//! aggregation, an STFT cross-check, the free Schrödinger multiplier with
//! its envelope sweeps, and a suite runner that verifies the exact
//! identities and qualitative bounds the construction is built around.

pub mod adapted;
pub mod amalgam;
pub mod checks;
pub mod error;
pub mod function;
pub mod grid;
pub mod norms;
pub mod partition;
pub mod schrodinger;
pub mod snapshot;
pub mod stft;
pub mod transform;
pub mod util;
pub mod weights;

pub use error::{Error, Result};
pub use function::{
    apply_multiplier, dilate_dyadic, dilate_l1, synthesize, BoxRegion, DecayHint, FreqField,
    SpectralFunction, SyntheticKind,
};
pub use grid::GridSpec;
pub use norms::{lp_norm, mod_norm, scaled_norm, NormReport, NormSpec};
pub use partition::{FrequencyCell, PartitionOfUnity};
pub use weights::{
    embedding_weight, lp_scaling_weight, morrey_weights, propagator_target_weight, VectorWeight,
};
