//! Transformation data relating the ladder operators of two Gaussians.
//!
//! The lowering/raising operators of one Gaussian are a linear-plus-shift
//! combination of those of another. Everything the overlap recursions need
//! is derived from the two parameter sets once and reused for all matrix
//! entries.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gaussian::check_pair;
use crate::la::{identity_c, max_abs, vec_to_complex, CMatrix, CVector};
use crate::params::{symplectic_form, GaussianParams, SINGULAR_CONDITION};

/// All transformation matrices and vectors for an ordered pair of
/// parameter sets. Unprimed quantities coefficient the bra-shell-raising
/// recurrence; primed ones (`*_p`) the ket-shell-raising recurrence.
#[derive(Clone, Debug)]
pub struct BogoliubovData {
    /// U, the lowering-to-lowering block.
    pub u_mat: CMatrix,
    /// V, the lowering-to-raising block.
    pub v_mat: CMatrix,
    /// v, the inhomogeneous shift of the forward transform.
    pub v_vec: CVector,
    /// v', the shift of the reverse transform.
    pub v_vec_p: CVector,
    /// w = -V^T conj(v) + v'.
    pub w_vec: CVector,
    /// w' = conj(V) v' + conj(v).
    pub w_vec_p: CVector,
    /// W = (U† U)^-1.
    pub w_mat: CMatrix,
    /// W' = (conj(U) U^T)^-1.
    pub w_mat_p: CMatrix,
    /// F = W U†.
    pub f_mat: CMatrix,
    /// G = W V^T conj(U).
    pub g_mat: CMatrix,
    /// F' = W' conj(U).
    pub f_mat_p: CMatrix,
    /// G' = W' conj(V) U†.
    pub g_mat_p: CMatrix,
    /// u = W w.
    pub u_vec: CVector,
    /// u' = W' w'.
    pub u_vec_p: CVector,
}

/// Computes the full transformation data for the ordered pair (bra, ket).
pub fn compute_bogoliubov(bra: &GaussianParams, ket: &GaussianParams) -> Result<BogoliubovData> {
    check_pair(bra, ket)?;
    let half_i = C64::new(0.0, 0.5);
    let u_mat = (ket.q_mat.transpose() * bra.p_mat.conjugate()
        - ket.p_mat.transpose() * bra.q_mat.conjugate())
        * half_i;
    let v_mat =
        (ket.q_mat.transpose() * &bra.p_mat - ket.p_mat.transpose() * &bra.q_mat) * half_i;
    let shift_scale = C64::new(0.0, 1.0 / (2.0 * bra.hbar).sqrt());
    let dq = vec_to_complex(&(&bra.q - &ket.q));
    let dp = vec_to_complex(&(&bra.p - &ket.p));
    let v_vec = (ket.q_mat.transpose() * &dp - ket.p_mat.transpose() * &dq) * shift_scale;
    // role exchange: v' = v(ket, bra)
    let v_vec_p =
        (bra.q_mat.transpose() * &(-&dp) - bra.p_mat.transpose() * &(-&dq)) * shift_scale;

    let normal = u_mat.adjoint() * &u_mat;
    let cond = crate::la::condition_estimate(&normal);
    if !cond.is_finite() || cond > SINGULAR_CONDITION {
        return Err(Error::NearDegenerateTransform(format!(
            "U† U condition estimate {cond:.3e}; inputs are not a valid Gaussian pair"
        )));
    }
    let d = bra.dim();
    let chol = nalgebra::Cholesky::new(normal.clone())
        .ok_or_else(|| Error::NearDegenerateTransform("U† U is not positive definite".into()))?;
    let w_mat = chol.solve(&identity_c(d));
    let normal_p = u_mat.conjugate() * u_mat.transpose();
    let chol_p = nalgebra::Cholesky::new(normal_p).ok_or_else(|| {
        Error::NearDegenerateTransform("conj(U) U^T is not positive definite".into())
    })?;
    let w_mat_p = chol_p.solve(&identity_c(d));

    let w_vec = -(v_mat.transpose() * v_vec.conjugate()) + &v_vec_p;
    let w_vec_p = v_mat.conjugate() * &v_vec_p + v_vec.conjugate();

    let f_mat = &w_mat * u_mat.adjoint();
    let g_mat = &w_mat * v_mat.transpose() * u_mat.conjugate();
    let f_mat_p = &w_mat_p * u_mat.conjugate();
    let g_mat_p = &w_mat_p * v_mat.conjugate() * u_mat.adjoint();
    let u_vec = &w_mat * &w_vec;
    let u_vec_p = &w_mat_p * &w_vec_p;

    Ok(BogoliubovData {
        u_mat,
        v_mat,
        v_vec,
        v_vec_p,
        w_vec,
        w_vec_p,
        w_mat,
        w_mat_p,
        f_mat,
        g_mat,
        f_mat_p,
        g_mat_p,
        u_vec,
        u_vec_p,
    })
}

/// The same U, V, v, v' derived through the symplectic form on the stacked
/// (Q; P) matrices; an independent cross-check of [`compute_bogoliubov`].
pub fn bogoliubov_from_symplectic_form(
    bra: &GaussianParams,
    ket: &GaussianParams,
) -> Result<(CMatrix, CMatrix, CVector, CVector)> {
    check_pair(bra, ket)?;
    let half_i = C64::new(0.0, 0.5);
    let z = bra.stacked_z();
    let z_p = ket.stacked_z();
    let u_mat = symplectic_form(z_p.matrix(), &z.matrix().conjugate())? * half_i;
    let v_mat = symplectic_form(z_p.matrix(), z.matrix())? * half_i;
    let shift_scale = C64::new(0.0, 1.0 / (2.0 * bra.hbar).sqrt());
    let dz = bra.center().as_complex_column() - ket.center().as_complex_column();
    let v_vec = (symplectic_form(z_p.matrix(), &dz)? * shift_scale)
        .column(0)
        .into_owned();
    let v_vec_p = (symplectic_form(z.matrix(), &(-dz))? * shift_scale)
        .column(0)
        .into_owned();
    Ok((u_mat, v_mat, v_vec, v_vec_p))
}

/// Residuals of the reverse-transform relations `U(ket,bra) = U†` and
/// `V(ket,bra) = -V^T`.
#[derive(Clone, Debug)]
pub struct ReverseReport {
    pub u_residual: f64,
    pub v_residual: f64,
}

/// Compares the transform of the reversed pair against the adjoint /
/// negated transpose of the forward transform.
pub fn check_reverse_relations(fwd: &BogoliubovData, rev: &BogoliubovData) -> ReverseReport {
    ReverseReport {
        u_residual: max_abs(&(&rev.u_mat - fwd.u_mat.adjoint())),
        v_residual: max_abs(&(&rev.v_mat + fwd.v_mat.transpose())),
    }
}

/// The four commutator matrices between the two ladder-operator families:
/// ([A, A'†], [A, A'], [A†, A'†], [A†, A']).
#[derive(Clone, Debug)]
pub struct CommutatorMatrices {
    pub lower_raise: CMatrix,
    pub lower_lower: CMatrix,
    pub raise_raise: CMatrix,
    pub raise_lower: CMatrix,
}

pub fn commutator_matrices(data: &BogoliubovData) -> CommutatorMatrices {
    CommutatorMatrices {
        lower_raise: data.u_mat.adjoint(),
        lower_lower: data.v_mat.transpose(),
        raise_raise: -data.v_mat.adjoint(),
        raise_lower: -data.u_mat.transpose(),
    }
}
