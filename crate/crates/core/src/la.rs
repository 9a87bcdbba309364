//! Small dense linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Largest entry modulus; the norm used in all residual reports.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn vec_to_complex(v: &RVector) -> CVector {
    v.map(|x| C64::new(x, 0.0))
}

pub fn identity_c(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Ratio of extreme singular values; `f64::INFINITY` for an exactly
/// singular matrix.
pub fn condition_estimate(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solves `a x = b` through a pivoted LU decomposition.
pub fn solve(a: &CMatrix, b: &CMatrix, context: &str) -> Result<CMatrix> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::DegeneratePair(format!("singular linear system in {context}")))
}

pub fn solve_vec(a: &CMatrix, b: &CVector, context: &str) -> Result<CVector> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::DegeneratePair(format!("singular linear system in {context}")))
}

/// Inverse square root of a real symmetric positive-definite matrix via its
/// spectral decomposition.
pub fn spd_inverse_sqrt(m: &RMatrix, context: &str) -> Result<RMatrix> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{context}: matrix is not positive definite (min eigenvalue {:.3e})",
            eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    let scaled = &eig.eigenvectors * RMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(-0.5)));
    Ok(&scaled * eig.eigenvectors.transpose())
}

/// Square root of a real symmetric positive-definite matrix.
pub fn spd_sqrt(m: &RMatrix, context: &str) -> Result<RMatrix> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{context}: matrix is not positive definite (min eigenvalue {:.3e})",
            eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    let scaled = &eig.eigenvectors * RMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(&scaled * eig.eigenvectors.transpose())
}

/// Smallest eigenvalue of the symmetrized real part `(m + m^T)/2`.
pub fn min_sym_eigenvalue(m: &RMatrix) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Transpose-dot without conjugation: `x^T y`.
pub fn dot_t(x: &CVector, y: &CVector) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}
