//! Structured 2x2-block patterns and the inverse-structure check.
//!
//! A `2m x 2m` complex matrix is viewed as an `m x m` grid of 2x2 blocks.
//! Three block patterns are defined; all three share the same diagonal
//! constraint (each diagonal block is a scalar multiple of the identity)
//! and the same cross relation between a block and its transpose partner.
//! The third pattern additionally constrains each above-diagonal block to
//! quaternion form. The key fact exercised downstream: the inverse of an
//! invertible Type-III matrix is Type-I.

use num_complex::Complex64;
use rand::Rng;

use crate::embed::{max_abs, ComplexMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    TypeI,
    TypeII,
    TypeIII,
}

/// Quantitative outcome of a structure check: `residual` is the max
/// absolute violation over every pattern constraint, zero iff the matrix
/// matches the pattern exactly.
#[derive(Debug, Clone, Copy)]
pub struct StructureReport {
    pub kind: StructureKind,
    pub residual: f64,
    /// Number of 2x2 blocks per side (`m` for a `2m x 2m` matrix).
    pub block_dim: usize,
}

fn block(a: &ComplexMatrix, j: usize, l: usize) -> [Complex64; 4] {
    [
        a[(2 * j, 2 * l)],
        a[(2 * j, 2 * l + 1)],
        a[(2 * j + 1, 2 * l)],
        a[(2 * j + 1, 2 * l + 1)],
    ]
}

/// Max violation of the given block pattern.
///
/// Constraints checked:
/// - every diagonal block equals `t_j * I_2` (equal diagonal pair, zero
///   anti-diagonal);
/// - for every `j < l`, the below-diagonal block `L` must relate to the
///   above-diagonal block `U = [[u00, u01], [u10, u11]]` by
///   `L = [[u11, -u01], [-u10, u00]]` (all three kinds; the Type-II
///   parametrization spans every complex 2x2 upper block, so its numerical
///   constraint set coincides with Type-I's);
/// - for Type-III only, each above-diagonal block must itself be of
///   quaternion form: `u10 = -conj(u01)` and `u11 = conj(u00)`.
pub fn structure_residual(a: &ComplexMatrix, kind: StructureKind) -> Result<StructureReport> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "structure check requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "structure check requires even dimension, got {}",
            a.nrows()
        )));
    }
    let m = a.nrows() / 2;
    let mut residual = 0.0f64;
    let mut bump = |v: Complex64| residual = residual.max(v.norm());

    for j in 0..m {
        let d = block(a, j, j);
        bump(d[1]);
        bump(d[2]);
        bump(d[0] - d[3]);
    }
    for j in 0..m {
        for l in (j + 1)..m {
            let u = block(a, j, l);
            let lo = block(a, l, j);
            bump(lo[0] - u[3]);
            bump(lo[1] + u[1]);
            bump(lo[2] + u[2]);
            bump(lo[3] - u[0]);
            if kind == StructureKind::TypeIII {
                bump(u[2] + u[1].conj());
                bump(u[3] - u[0].conj());
            }
        }
    }
    Ok(StructureReport {
        kind,
        residual,
        block_dim: m,
    })
}

/// Inverts a Type-III matrix and reports the Type-I residual of the inverse.
///
/// Preconditions: `a` must pass the Type-III check within `tol_in` and be
/// numerically invertible (condition estimate below 1e12).
pub fn inverse_structure_check(a: &ComplexMatrix, tol_in: f64) -> Result<StructureReport> {
    let pre = structure_residual(a, StructureKind::TypeIII)?;
    let scale = f64::max(1.0, max_abs(a));
    if pre.residual > tol_in * scale {
        return Err(Error::Contract(format!(
            "input is not Type-III: residual {:.3e} exceeds tolerance {:.3e}",
            pre.residual,
            tol_in * scale
        )));
    }
    let svd = a.clone().svd(false, false);
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let s_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if s_min <= 0.0 || s_max / s_min >= 1e12 {
        return Err(Error::Singular(format!(
            "matrix is singular or ill-conditioned (cond estimate {:.3e})",
            if s_min > 0.0 { s_max / s_min } else { f64::INFINITY }
        )));
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU inversion failed".into()))?;
    structure_residual(&inv, StructureKind::TypeI)
}

/// Random Type-III matrix with `m` blocks per side, made comfortably
/// invertible by shifting the diagonal scalars away from zero.
pub fn random_type_iii(m: usize, diag_shift: f64, rng: &mut impl Rng) -> ComplexMatrix {
    fn c(rng: &mut impl Rng) -> Complex64 {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
    let mut a = ComplexMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        let t = c(rng) + Complex64::new(diag_shift, 0.0);
        a[(2 * j, 2 * j)] = t;
        a[(2 * j + 1, 2 * j + 1)] = t;
    }
    for j in 0..m {
        for l in (j + 1)..m {
            let (u00, u01) = (c(rng), c(rng));
            a[(2 * j, 2 * l)] = u00;
            a[(2 * j, 2 * l + 1)] = u01;
            a[(2 * j + 1, 2 * l)] = -u01.conj();
            a[(2 * j + 1, 2 * l + 1)] = u00.conj();
            a[(2 * l, 2 * j)] = u00.conj();
            a[(2 * l, 2 * j + 1)] = -u01;
            a[(2 * l + 1, 2 * j)] = u01.conj();
            a[(2 * l + 1, 2 * j + 1)] = u00;
        }
    }
    a
}
