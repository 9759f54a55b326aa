//! Newton-Schulz orthogonalization.
//!
//! The quintic fixed-point iteration `X <- aX + (bA + cA^2)X` with
//! `A = XX^T` drives every singular value of the normalized input toward
//! one while leaving the singular vectors untouched, so it converges to
//! the polar factor without computing an SVD. Coefficients `(2, -1.5,
//! 0.5)` make `sigma = 1` an exact fixed point: `2 - 1.5 + 0.5 = 1`.

use serde::{Deserialize, Serialize};

use crate::tensor::Matrix;

/// Newton-Schulz iteration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsConfig {
    /// Number of iterations `K >= 1`.
    pub iterations: usize,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub coeff_c: f64,
    /// Normalization guard added to the Frobenius norm so the zero
    /// matrix maps to zero instead of dividing by zero.
    pub epsilon: f64,
}

impl Default for NsConfig {
    fn default() -> Self {
        Self {
            iterations: 5,
            coeff_a: 2.0,
            coeff_b: -1.5,
            coeff_c: 0.5,
            epsilon: 1e-7,
        }
    }
}

impl NsConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        Self {
            iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if self.iterations == 0 {
            return Err(crate::error::Error::InvalidConfig(
                "Newton-Schulz iteration count must be at least 1".into(),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(crate::error::Error::InvalidConfig(
                "Newton-Schulz epsilon must be positive".into(),
            ));
        }
        Ok(())
    }

    /// One step of the scalar image of the iteration,
    /// `sigma <- a*sigma + b*sigma^3 + c*sigma^5`.
    pub fn scalar_step(&self, sigma: f64) -> f64 {
        let s2 = sigma * sigma;
        self.coeff_a * sigma + self.coeff_b * s2 * sigma + self.coeff_c * s2 * s2 * sigma
    }

    /// The scalar iteration applied `iterations` times. Because the
    /// matrix iteration preserves singular vectors, this is exactly what
    /// happens to each normalized singular value, which makes it an
    /// independent oracle for the matrix path.
    pub fn scalar_orbit(&self, sigma: f64) -> f64 {
        let mut s = sigma;
        for _ in 0..self.iterations {
            s = self.scalar_step(s);
        }
        s
    }

    /// Upper bound on how far above one any singular value can land
    /// during the iteration, computed by grid-searching the scalar map
    /// over normalized inputs. Used to widen trust-region checks when
    /// the Newton-Schulz backend replaces the exact polar factor.
    pub fn spectral_overshoot(&self) -> f64 {
        let grid = 20_000;
        let mut worst: f64 = 0.0;
        for g in 0..=grid {
            let mut s = g as f64 / grid as f64;
            for _ in 0..self.iterations {
                s = self.scalar_step(s);
                worst = worst.max(s - 1.0);
            }
        }
        worst.max(0.0)
    }
}

/// Approximate polar factor of `g` via `cfg.iterations` Newton-Schulz
/// steps on the Frobenius-normalized input. Tall inputs are transposed,
/// iterated, and transposed back so the Gram matrix stays at the smaller
/// dimension. The zero matrix maps to zero.
pub fn newton_schulz(g: &Matrix, cfg: &NsConfig) -> Matrix {
    assert!(cfg.iterations >= 1, "iteration count must be at least 1");
    assert!(cfg.epsilon > 0.0, "epsilon must be positive");

    let tall = g.rows() > g.cols();
    let work = if tall { g.transpose() } else { g.clone() };

    let scale = 1.0 / (work.frobenius_norm() + cfg.epsilon);
    let mut x = work.scale(scale);

    for _ in 0..cfg.iterations {
        let a = x.matmul(&x.transpose());
        let a2 = a.matmul(&a);
        let b = a.zip_map(&a2, |p, q| cfg.coeff_b * p + cfg.coeff_c * q);
        x = x.scale(cfg.coeff_a).zip_map(&b.matmul(&x), |p, q| p + q);
    }

    if tall {
        x.transpose()
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::tensor::svd::{orth_exact, svd};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Random matrix with prescribed singular values (condition control).
    fn matrix_with_spectrum(rows: usize, cols: usize, spectrum: &[f64], seed: u64) -> Matrix {
        let f = svd(&random_matrix(rows, cols, seed)).unwrap();
        let k = spectrum.len();
        assert_eq!(k, rows.min(cols));
        let scaled = Matrix::from_fn(rows, k, |i, j| f.left[(i, j)] * spectrum[j]);
        scaled.matmul(&f.right.transpose())
    }

    #[test]
    fn scalar_one_is_fixed_point() {
        let cfg = NsConfig::default();
        assert_eq!(cfg.scalar_step(1.0), 1.0);
    }

    #[test]
    fn scalar_single_step_value() {
        // 2(0.5) - 1.5(0.125) + 0.5(0.03125) = 0.828125
        let cfg = NsConfig::default();
        assert_eq!(cfg.scalar_step(0.5), 0.828125);
    }

    #[test]
    fn zero_maps_to_zero() {
        let out = newton_schulz(&Matrix::zeros(4, 7), &NsConfig::default());
        assert!(out.is_zero());
    }

    #[test]
    fn orthonormal_input_nearly_unchanged() {
        // A matrix whose singular values are all equal normalizes to a
        // spectrum of ones (up to the epsilon guard), at the quintic's
        // fixed point.
        let n = 6;
        let q = orth_exact(&random_matrix(n, n, 3)).unwrap();
        let g = q.scale((n as f64).sqrt()); // frobenius norm = n... normalized spectrum = 1/sqrt(n)*sqrt(n)=... see below
        // singular values of g are all sqrt(n); frobenius = sqrt(n * n) = n;
        // normalized singular values = sqrt(n)/n * sqrt(n) = 1.
        let out = newton_schulz(&g, &NsConfig::with_iterations(3));
        let s = svd(&out).unwrap().singulars;
        for v in s {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn spectrum_follows_scalar_orbit() {
        let cfg = NsConfig::with_iterations(4);
        for &(rows, cols, seed) in &[(6usize, 9usize, 1u64), (9, 6, 2), (5, 5, 3)] {
            let g = random_matrix(rows, cols, seed);
            let out = newton_schulz(&g, &cfg);
            assert_eq!(out.shape(), g.shape());

            let input = svd(&g).unwrap().singulars;
            let scale = 1.0 / (g.frobenius_norm() + cfg.epsilon);
            let mut expected: Vec<f64> =
                input.iter().map(|&s| cfg.scalar_orbit(s * scale)).collect();
            expected.sort_by(|a, b| b.partial_cmp(a).unwrap());

            let got = svd(&out).unwrap().singulars;
            for (e, o) in expected.iter().zip(&got) {
                assert_abs_diff_eq!(e, o, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn preserves_singular_vectors() {
        let cfg = NsConfig::with_iterations(3);
        let g = matrix_with_spectrum(5, 8, &[1.0, 0.8, 0.6, 0.5, 0.4], 7);
        let out = newton_schulz(&g, &cfg);
        // Same singular subspaces: out * g^T should be symmetric
        // (both share U, Sigma factors commute).
        let m = out.matmul(&g.transpose());
        let asym = (&m - &m.transpose()).frobenius_norm();
        assert!(asym < 1e-10, "asymmetry {asym}");
    }

    #[test]
    fn converges_to_exact_polar_on_well_conditioned_input() {
        let cfg = NsConfig::with_iterations(5);
        let spectrum: Vec<f64> = (0..6).map(|i| 1.0 - 0.045 * i as f64).collect();
        let g = matrix_with_spectrum(6, 10, &spectrum, 9);
        let out = newton_schulz(&g, &cfg);
        let exact = orth_exact(&g).unwrap();

        // Oracle distance from the scalar orbit on the true spectrum.
        let scale = 1.0 / (g.frobenius_norm() + cfg.epsilon);
        let oracle: f64 = svd(&g)
            .unwrap()
            .singulars
            .iter()
            .map(|&s| {
                let d = cfg.scalar_orbit(s * scale) - 1.0;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        let measured = (&out - &exact).frobenius_norm();
        assert_abs_diff_eq!(measured, oracle, epsilon = 1e-8);
    }

    #[test]
    fn tall_input_transposed_internally() {
        let cfg = NsConfig::with_iterations(2);
        let g = random_matrix(9, 4, 11);
        let out_tall = newton_schulz(&g, &cfg);
        let out_wide = newton_schulz(&g.transpose(), &cfg);
        assert_eq!(out_tall, out_wide.transpose());
    }

    #[test]
    fn overshoot_bound_is_small_and_positive() {
        let cfg = NsConfig::default();
        let d = cfg.spectral_overshoot();
        assert!(d > 0.0 && d < 0.002, "overshoot {d}");
    }
}
