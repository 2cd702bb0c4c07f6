//! Quaternion matrices and their complex embedding.
//!
//! A `p x n` quaternion matrix maps to a `2p x 2n` complex matrix by
//! replacing every entry with its 2x2 block. The embedding is
//! multiplicative and adjoint-preserving, which is what lets the rest of
//! the crate treat quaternion spectral problems as complex ones.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Dense complex matrix; row/column indexed, used for everything downstream
/// of the embedding (covariance matrices, resolvents, structure checks).
pub type ComplexMatrix = DMatrix<Complex64>;

/// Dense `p x n` array of quaternions, the raw data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for k in 0..cols {
                entries.push(f(j, k));
            }
        }
        QuaternionMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QuaternionMatrix {
            rows,
            cols,
            entries: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, k: usize) -> Quaternion {
        self.entries[j * self.cols + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: Quaternion) {
        self.entries[j * self.cols + k] = v;
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    /// Entrywise map.
    pub fn map(&self, mut f: impl FnMut(Quaternion) -> Quaternion) -> Self {
        QuaternionMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&q| f(q)).collect(),
        }
    }

    /// Conjugate transpose: entry `(k, j)` of the result is the quaternion
    /// conjugate of entry `(j, k)`.
    pub fn adjoint(&self) -> Self {
        QuaternionMatrix::from_fn(self.cols, self.rows, |j, k| self.get(k, j).conjugate())
    }

    /// Plain quaternion matrix product.
    pub fn matmul(&self, rhs: &QuaternionMatrix) -> Result<QuaternionMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(QuaternionMatrix::from_fn(self.rows, rhs.cols, |j, k| {
            let mut acc = Quaternion::ZERO;
            for t in 0..self.cols {
                acc = acc + self.get(j, t) * rhs.get(t, k);
            }
            acc
        }))
    }
}

/// 2x2 complex block of a single quaternion:
/// `[[a+bi, c+di], [-c+di, a-bi]]`.
pub fn embed_scalar(q: Quaternion) -> nalgebra::Matrix2<Complex64> {
    nalgebra::Matrix2::new(
        Complex64::new(q.a, q.b),
        Complex64::new(q.c, q.d),
        Complex64::new(-q.c, q.d),
        Complex64::new(q.a, -q.b),
    )
}

/// Embed a `p x n` quaternion matrix as a `2p x 2n` complex matrix,
/// block by block.
pub fn embed_matrix(x: &QuaternionMatrix) -> ComplexMatrix {
    let mut out = DMatrix::zeros(2 * x.rows(), 2 * x.cols());
    for j in 0..x.rows() {
        for k in 0..x.cols() {
            let block = embed_scalar(x.get(j, k));
            out[(2 * j, 2 * k)] = block[(0, 0)];
            out[(2 * j, 2 * k + 1)] = block[(0, 1)];
            out[(2 * j + 1, 2 * k)] = block[(1, 0)];
            out[(2 * j + 1, 2 * k + 1)] = block[(1, 1)];
        }
    }
    out
}

/// Max absolute entry of a complex matrix; 0 for empty matrices.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermiticity residual `max |A - A*|`.
pub fn hermitian_residual(a: &ComplexMatrix) -> f64 {
    let adj = a.adjoint();
    (a - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_qmatrix(rows: usize, cols: usize, rng: &mut impl Rng) -> QuaternionMatrix {
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
    fn embed_real_scalar() {
        let x = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::real(2.0));
        let m = embed_matrix(&x);
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[
            Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0),
        ]));
    }

    #[test]
    fn embed_general_scalar() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let x = QuaternionMatrix::from_fn(1, 1, |_, _| q);
        let m = embed_matrix(&x);
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 2.0));
        assert_eq!(m[(0, 1)], Complex64::new(3.0, 4.0));
        assert_eq!(m[(1, 0)], Complex64::new(-3.0, 4.0));
        assert_eq!(m[(1, 1)], Complex64::new(1.0, -2.0));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_qmatrix(3, 2, &mut rng);
        let y = random_qmatrix(2, 4, &mut rng);
        let lhs = embed_matrix(&x.matmul(&y).unwrap());
        let rhs = embed_matrix(&x) * embed_matrix(&y);
        assert!(max_abs(&(lhs - rhs)) <= 1e-12);
    }

    #[test]
    fn embedding_preserves_adjoints_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let x = random_qmatrix(4, 3, &mut rng);
        let lhs = embed_matrix(&x.adjoint());
        let rhs = embed_matrix(&x).adjoint();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let x = QuaternionMatrix::zeros(2, 3);
        let y = QuaternionMatrix::zeros(2, 3);
        assert!(x.matmul(&y).is_err());
    }
}
