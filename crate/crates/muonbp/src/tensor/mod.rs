//! Dense matrix values, SVD-based oracles, the norm family used by the
//! optimizers, and the Newton-Schulz orthogonalizer.

mod matrix;
mod newton_schulz;
pub mod norms;
mod svd;

pub use matrix::Matrix;
pub use newton_schulz::{newton_schulz, NsConfig};
pub use norms::{
    block_dual_norm, block_spectral_norm, dual_witness, frobenius_norm, nuclear_norm,
    operator_norm,
};
pub use svd::{orth_exact, rank_tolerance, svd, SvdFactors};
