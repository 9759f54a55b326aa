//! Coordinate-wise steps and the RMS learning-rate transfer rule.
//!
//! Scaled sign descent is steepest descent under the entrywise
//! infinity norm; the unscaled variant is the coordinate-wise baseline
//! used for comparison plots (Adam with its averaging turned off).
//! Column normalization, the l1-to-l2 induced-norm update, is the
//! special case of blockwise orthogonalization with single-column
//! blocks: the polar factor of an `m x 1` block is the column divided
//! by its l2 norm. It is documented here for reference and not wired up
//! as a separate optimizer.

use crate::tensor::Matrix;

/// Steepest descent under the entrywise infinity norm:
/// `x - (||g||_1 / lambda) * sign(g)` with `sign(0) = 0`.
pub fn sign_descent_step(x: &Matrix, g: &Matrix, lambda: f64) -> Matrix {
    assert!(lambda > 0.0, "lambda must be positive");
    let scale = g.abs_sum() / lambda;
    x.sub_scaled(&g.signum(), scale)
}

/// Unscaled sign-of-momentum step, the coordinate-wise baseline:
/// `x - eta * sign(m)`.
pub fn baseline_sign_step(x: &Matrix, m: &Matrix, eta: f64) -> Matrix {
    x.sub_scaled(&m.signum(), eta)
}

/// RMS learning-rate transfer scale `beta * sqrt(max(a, b))` for an
/// `a x b` update matrix. Callers pass the shard shape on block steps
/// and the full shape on full steps, so block updates get the smaller
/// scale.
pub fn rms_transfer_scale((a, b): (usize, usize), beta: f64) -> f64 {
    debug_assert!(a >= 1 && b >= 1);
    beta * (a.max(b) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn zero_gradient_leaves_x() {
        let x = Matrix::from_rows(&[&[1.0, 2.0]]);
        let g = Matrix::zeros(1, 2);
        assert_eq!(sign_descent_step(&x, &g, 3.0), x);
    }

    #[test]
    fn matches_direct_formula() {
        // g = [[2, -1]], lambda = 3: update = -(3/3) * [[1, -1]] = [[-1, 1]]
        let x = Matrix::zeros(1, 2);
        let g = Matrix::from_rows(&[&[2.0, -1.0]]);
        let out = sign_descent_step(&x, &g, 3.0);
        assert_eq!(out, Matrix::from_rows(&[&[-1.0, 1.0]]));
    }

    #[test]
    fn constant_positive_gradient() {
        // n entries all k, lambda = 1: step is -(n k) * ones
        let (n, k) = (6usize, 0.5f64);
        let x = Matrix::zeros(2, 3);
        let g = Matrix::from_fn(2, 3, |_, _| k);
        let out = sign_descent_step(&x, &g, 1.0);
        let expect = -(n as f64) * k;
        for v in out.data() {
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn baseline_sign_step_direction() {
        let x = Matrix::zeros(1, 3);
        let m = Matrix::from_rows(&[&[0.5, -2.0, 0.0]]);
        let out = baseline_sign_step(&x, &m, 0.1);
        assert_eq!(out, Matrix::from_rows(&[&[-0.1, 0.1, 0.0]]));
    }

    #[test]
    fn rms_scale_values() {
        assert_abs_diff_eq!(rms_transfer_scale((1024, 4096), 0.2), 12.8, epsilon = 1e-12);
        assert_abs_diff_eq!(
            rms_transfer_scale((49, 49), 1.0),
            7.0,
            epsilon = 1e-12
        );
        // column-sharded 8 ways: block steps get a smaller scale
        let full = rms_transfer_scale((1024, 4096), 0.2);
        let shard = rms_transfer_scale((1024, 512), 0.2);
        assert_abs_diff_eq!(shard, 6.4, epsilon = 1e-12);
        assert!(shard < full);
    }
}
