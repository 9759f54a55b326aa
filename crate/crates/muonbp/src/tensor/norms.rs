//! Matrix norms and their duals.
//!
//! The operator (spectral) norm pairs with the nuclear norm; the
//! block-spectral norm `B(X) = max_ij ||X_ij||_op` over a partition
//! pairs with `B*(Y) = sum_ij ||Y_ij||_*`, attained by the blockwise
//! polar factor.

use crate::error::Result;
use crate::sharding::BlockPartition;
use crate::tensor::svd::{polar_full, svd};
use crate::tensor::Matrix;

pub fn frobenius_norm(x: &Matrix) -> f64 {
    x.frobenius_norm()
}

/// Largest singular value.
pub fn operator_norm(x: &Matrix) -> f64 {
    svd(x)
        .expect("operator_norm requires finite input")
        .singulars
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Sum of singular values, the dual of the operator norm.
pub fn nuclear_norm(x: &Matrix) -> f64 {
    svd(x)
        .expect("nuclear_norm requires finite input")
        .singulars
        .iter()
        .sum()
}

/// `B(X) = max_ij ||X_ij||_op`. With a single-block partition this is
/// exactly the operator norm.
pub fn block_spectral_norm(x: &Matrix, part: &BlockPartition) -> Result<f64> {
    part.check_matches(x, "block_spectral_norm")?;
    let mut best = 0.0f64;
    for (i, j) in part.iter_blocks() {
        best = best.max(operator_norm(&part.extract(x, i, j)));
    }
    Ok(best)
}

/// `B*(X) = sum_ij ||X_ij||_*`, the dual of the block-spectral norm.
pub fn block_dual_norm(x: &Matrix, part: &BlockPartition) -> Result<f64> {
    part.check_matches(x, "block_dual_norm")?;
    let mut total = 0.0f64;
    for (i, j) in part.iter_blocks() {
        total += nuclear_norm(&part.extract(x, i, j));
    }
    Ok(total)
}

/// The maximizer of `<X, G>` over `B(G) <= 1`: blockwise `U V^T` of each
/// nonzero block, zero on zero blocks. Satisfies
/// `<X, dual_witness(X)> = B*(X)` and `B(dual_witness(X)) <= 1`.
pub fn dual_witness(x: &Matrix, part: &BlockPartition) -> Result<Matrix> {
    part.check_matches(x, "dual_witness")?;
    let blocks: Vec<Matrix> = part
        .iter_blocks()
        .map(|(i, j)| polar_full(&part.extract(x, i, j)))
        .collect::<Result<_>>()?;
    part.assemble(&blocks)
}
