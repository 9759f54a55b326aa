use nalgebra::DMatrix;

use crate::error::Result;
use crate::tensor::Matrix;

/// Thin SVD `X = left * diag(singulars) * right^T` with `k = min(m, n)`.
///
/// Factors follow a fixed sign convention (the largest-magnitude entry
/// of each left singular vector is nonnegative, ties broken by lowest
/// row index) and the singular values are sorted nonincreasing, so
/// repeated calls on the same input are bit-identical.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left: Matrix,
    pub singulars: Vec<f64>,
    pub right: Matrix,
}

impl SvdFactors {
    /// `left * diag(singulars) * right^T`.
    pub fn reconstruct(&self) -> Matrix {
        let k = self.singulars.len();
        let scaled = Matrix::from_fn(self.left.rows(), k, |i, j| {
            self.left[(i, j)] * self.singulars[j]
        });
        scaled.matmul(&self.right.transpose())
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.singulars.iter().filter(|&&s| s > tol).count()
    }
}

/// Deterministic thin SVD of a finite matrix.
///
/// Rejects non-finite input; everything downstream (operator and nuclear
/// norms, exact orthogonalization, dual witnesses) is built on this.
pub fn svd(x: &Matrix) -> Result<SvdFactors> {
    x.check_finite("svd input")?;
    let (m, n) = x.shape();
    let k = m.min(n);

    let a = DMatrix::from_row_slice(m, n, x.data());
    let decomp = a.svd(true, true);
    let u = decomp.u.expect("svd requested u");
    let v_t = decomp.v_t.expect("svd requested v_t");
    let sv = decomp.singular_values;

    // Sort nonincreasing; stable so equal singular values keep the
    // backend's order and the result stays deterministic.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());

    let mut left = Matrix::zeros(m, k);
    let mut right = Matrix::zeros(n, k);
    let mut singulars = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        singulars.push(sv[src]);
        for i in 0..m {
            left[(i, dst)] = u[(i, src)];
        }
        for j in 0..n {
            right[(j, dst)] = v_t[(src, j)];
        }
    }

    // Sign convention: largest-magnitude entry of each left vector is
    // nonnegative, first index winning ties.
    for j in 0..k {
        let mut best = 0usize;
        let mut best_abs = left[(0, j)].abs();
        for i in 1..m {
            let a = left[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if left[(best, j)] < 0.0 {
            for i in 0..m {
                left[(i, j)] = -left[(i, j)];
            }
            for i in 0..n {
                right[(i, j)] = -right[(i, j)];
            }
        }
    }

    Ok(SvdFactors {
        left,
        singulars,
        right,
    })
}

/// Numerical-rank tolerance `max(m, n) * eps * sigma_max`.
pub fn rank_tolerance(shape: (usize, usize), sigma_max: f64) -> f64 {
    shape.0.max(shape.1) as f64 * f64::EPSILON * sigma_max
}

/// Exact polar factor `U V^T` restricted to singular values above the
/// rank tolerance. The zero matrix maps to zero (pseudoinverse
/// convention); for full-rank input the output is orthonormal on its
/// smaller side and has operator norm one.
pub fn orth_exact(g: &Matrix) -> Result<Matrix> {
    let f = svd(g)?;
    let sigma_max = f.singulars.first().copied().unwrap_or(0.0);
    let tol = rank_tolerance(g.shape(), sigma_max);
    let r = f.rank(tol);
    if r == 0 {
        return Ok(Matrix::zeros(g.rows(), g.cols()));
    }
    let u_r = f.left.submatrix(0, f.left.rows(), 0, r);
    let v_r = f.right.submatrix(0, f.right.rows(), 0, r);
    Ok(u_r.matmul(&v_r.transpose()))
}

/// Polar factor over the full thin SVD with no rank truncation, zero
/// blocks mapping to zero. This is the dual-norm witness form: it
/// attains `<X, Z> = ||X||_*` exactly even for rank-deficient `X`.
pub(crate) fn polar_full(g: &Matrix) -> Result<Matrix> {
    if g.is_zero() {
        return Ok(Matrix::zeros(g.rows(), g.cols()));
    }
    let f = svd(g)?;
    Ok(f.left.matmul(&f.right.transpose()))
}
