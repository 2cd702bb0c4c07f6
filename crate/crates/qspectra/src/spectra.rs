//! Sample covariance matrices, Hermitian eigenvalues, and the empirical
//! spectral distribution with its Stieltjes transform.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use crate::embed::{embed_matrix, hermitian_residual, max_abs, ComplexMatrix, QuaternionMatrix};
use crate::error::{Error, Result};

/// Sorted spectrum of a `2p x 2p` embedded covariance matrix plus the
/// provenance needed to reproduce it.
#[derive(Debug, Clone)]
pub struct SpectralSample {
    /// Ascending eigenvalues, length `2p`.
    pub eigenvalues: Vec<f64>,
    pub dim_p: usize,
    pub dim_n: usize,
    /// Dimension-to-sample ratio `p / n`.
    pub y_n: f64,
    pub seed: u64,
    pub distribution_tag: String,
}

impl SpectralSample {
    pub fn new(
        eigenvalues: Vec<f64>,
        dim_p: usize,
        dim_n: usize,
        seed: u64,
        distribution_tag: impl Into<String>,
    ) -> Self {
        debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        SpectralSample {
            eigenvalues,
            dim_p,
            dim_n,
            y_n: dim_p as f64 / dim_n as f64,
            seed,
            distribution_tag: distribution_tag.into(),
        }
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Max gap within adjacent eigenvalue pairs; the embedded spectrum has
    /// even multiplicities, so this should be at rounding level.
    pub fn pairing_gap(&self) -> f64 {
        self.eigenvalues
            .chunks_exact(2)
            .map(|p| p[1] - p[0])
            .fold(0.0, f64::max)
    }

    /// Fraction of eigenvalues below `threshold`.
    pub fn mass_below(&self, threshold: f64) -> f64 {
        let count = self.eigenvalues.iter().filter(|&&l| l <= threshold).count();
        count as f64 / self.eigenvalues.len() as f64
    }
}

/// `S = psi(X) psi(X)* / n`: the `2p x 2p` Hermitian positive-semidefinite
/// covariance of the embedded data matrix.
pub fn sample_covariance(x: &QuaternionMatrix) -> ComplexMatrix {
    let e = embed_matrix(x);
    let mut s = &e * e.adjoint();
    s /= Complex64::new(x.cols() as f64, 0.0);
    // Symmetrize to kill the roundoff skew from the explicit product.
    let adj = s.adjoint();
    (s + adj) * Complex64::new(0.5, 0.0)
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
///
/// Rejects inputs whose Hermiticity residual exceeds `1e-10 * max|A|`.
/// The returned values satisfy the trace identities `sum(lambda) = tr A`
/// and `sum(lambda^2) = ||A||_F^2` to eigensolver accuracy.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigensolver requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = f64::max(1.0, max_abs(a));
    if hermitian_residual(a) > 1e-10 * scale {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: residual {:.3e} exceeds {:.3e}",
            hermitian_residual(a),
            1e-10 * scale
        )));
    }
    let eigen = SymmetricEigen::new(a.clone());
    let mut vals: Vec<f64> = eigen.eigenvalues.iter().cloned().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

/// Eigensolve the embedded covariance of `x` into a [`SpectralSample`].
pub fn spectral_sample(
    x: &QuaternionMatrix,
    seed: u64,
    distribution_tag: impl Into<String>,
) -> Result<SpectralSample> {
    let s = sample_covariance(x);
    let eigenvalues = hermitian_eigenvalues(&s)?;
    Ok(SpectralSample::new(
        eigenvalues,
        x.rows(),
        x.cols(),
        seed,
        distribution_tag,
    ))
}

/// Empirical spectral distribution at `x`: the fraction of eigenvalues
/// `<= x` (right-continuous step function).
pub fn esd_eval(s: &SpectralSample, x: f64) -> f64 {
    s.mass_below(x)
}

/// Empirical Stieltjes transform `(1/2p) sum_j 1/(lambda_j - z)` for
/// `Im z > 0`.
pub fn empirical_stieltjes(s: &SpectralSample, z: Complex64) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "Stieltjes transform requires Im z > 0, got z = {z}"
        )));
    }
    let sum: Complex64 = s
        .eigenvalues
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - z).inv())
        .sum();
    Ok(sum / s.eigenvalues.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use nalgebra::DMatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_qmatrix(rows: usize, cols: usize, seed: u64) -> QuaternionMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        QuaternionMatrix::from_fn(rows, cols, |_, _| {
            Quaternion::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        })
    }

    #[test]
    fn covariance_of_scalar() {
        let x = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::real(2.0));
        let s = sample_covariance(&x);
        assert_eq!(s, DMatrix::identity(2, 2) * Complex64::new(4.0, 0.0));
    }

    #[test]
    fn covariance_shape_and_hermiticity() {
        let x = random_qmatrix(3, 5, 41);
        let s = sample_covariance(&x);
        assert_eq!((s.nrows(), s.ncols()), (6, 6));
        assert!(hermitian_residual(&s) <= 1e-13 * max_abs(&s));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigenvalues_of_pauli_x() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
        ]);
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let raw = DMatrix::from_fn(8, 8, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let a = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        let vals = hermitian_eigenvalues(&a).unwrap();
        let trace: f64 = a.diagonal().iter().map(|z| z.re).sum();
        let frob2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let sum: f64 = vals.iter().sum();
        let sum2: f64 = vals.iter().map(|l| l * l).sum();
        assert!((sum - trace).abs() <= 1e-10 * f64::max(1.0, trace.abs()));
        assert!((sum2 - frob2).abs() <= 1e-9 * f64::max(1.0, frob2));
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0),
        ]);
        assert!(matches!(hermitian_eigenvalues(&a), Err(Error::Contract(_))));
    }

    #[test]
    fn kramers_pairing_and_psd() {
        let x = random_qmatrix(6, 9, 43);
        let s = spectral_sample(&x, 43, "test").unwrap();
        let lmax = s.lambda_max();
        assert!(s.pairing_gap() <= 1e-8 * f64::max(1.0, lmax), "gap {}", s.pairing_gap());
        assert!(s.eigenvalues[0] >= -1e-10 * lmax);
    }

    #[test]
    fn rank_nullity_atom() {
        // p > n: exactly 2(p - n) eigenvalues vanish.
        let x = random_qmatrix(7, 4, 44);
        let s = spectral_sample(&x, 44, "test").unwrap();
        let zeros = s
            .eigenvalues
            .iter()
            .filter(|&&l| l <= 1e-8 * s.lambda_max())
            .count();
        assert_eq!(zeros, 2 * (7 - 4));
        assert!((s.mass_below(1e-8 * s.lambda_max()) - (1.0 - 4.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn esd_step_values() {
        let s = SpectralSample::new(vec![0.0, 0.0, 1.0, 1.0], 2, 2, 0, "fixed");
        assert_eq!(esd_eval(&s, 0.5), 0.5);
        assert_eq!(esd_eval(&s, -0.1), 0.0);
        assert_eq!(esd_eval(&s, 1.0), 1.0);
        assert_eq!(esd_eval(&s, 5.0), 1.0);
    }

    #[test]
    fn stieltjes_of_identity() {
        let s = SpectralSample::new(vec![1.0, 1.0], 1, 1, 0, "fixed");
        let m = empirical_stieltjes(&s, Complex64::new(0.0, 1.0)).unwrap();
        assert!((m - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_bound_and_domain() {
        let x = random_qmatrix(5, 8, 45);
        let s = spectral_sample(&x, 45, "test").unwrap();
        for &z in &[
            Complex64::new(0.0, 0.3),
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.05),
        ] {
            let m = empirical_stieltjes(&s, z).unwrap();
            assert!(m.norm() <= 1.0 / z.im + 1e-12);
            assert!(m.im > 0.0);
        }
        assert!(empirical_stieltjes(&s, Complex64::new(1.0, 0.0)).is_err());
        assert!(empirical_stieltjes(&s, Complex64::new(1.0, -1.0)).is_err());
    }

    #[test]
    fn stieltjes_matches_dense_resolvent_trace() {
        let x = random_qmatrix(4, 6, 46);
        let s_mat = sample_covariance(&x);
        let sample = spectral_sample(&x, 46, "test").unwrap();
        let z = Complex64::new(0.7, 0.9);
        let resolvent = (s_mat - ComplexMatrix::identity(8, 8) * z)
            .try_inverse()
            .unwrap();
        let trace: Complex64 = resolvent.diagonal().iter().sum();
        let oracle = trace / 8.0;
        let m = empirical_stieltjes(&sample, z).unwrap();
        assert!((m - oracle).norm() <= 1e-8, "diff {}", (m - oracle).norm());
    }
}
