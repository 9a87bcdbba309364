//! Position-space evaluation of the Gaussian wavepacket and the closed-form
//! overlap of two Gaussians, with square-root branch tracking for time
//! series.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::la::{dot_t, max_abs, solve_vec, vec_to_complex, CMatrix, CVector, RVector};
use crate::params::GaussianParams;

/// Precomputed pieces for evaluating one Gaussian at many points.
#[derive(Clone, Debug)]
pub struct GaussianEvaluator {
    center: RVector,
    momentum: RVector,
    gamma: CMatrix,
    prefactor: C64,
    action: f64,
    hbar: f64,
}

impl GaussianEvaluator {
    pub fn new(params: &GaussianParams) -> Result<Self> {
        let gamma = params.width_matrix()?;
        let det = params.q_mat.determinant();
        if det.norm() == 0.0 {
            return Err(Error::SingularWidthMatrix("det Q = 0".into()));
        }
        let d = params.dim() as f64;
        let prefactor = (PI * params.hbar).powf(-d / 4.0) / det.sqrt();
        Ok(Self {
            center: params.q.clone(),
            momentum: params.p.clone(),
            gamma,
            prefactor,
            action: params.s,
            hbar: params.hbar,
        })
    }

    pub fn eval(&self, q: &RVector) -> C64 {
        let x = vec_to_complex(&(q - &self.center));
        let quad = dot_t(&x, &(&self.gamma * &x)) * 0.5;
        let linear = dot_t(&vec_to_complex(&self.momentum), &x);
        let phase = (quad + linear + C64::new(self.action, 0.0)) * C64::i() / self.hbar;
        self.prefactor * phase.exp()
    }
}

/// Value of the normalized Gaussian wavepacket at position `q`, including
/// the action phase.
pub fn eval_gaussian(params: &GaussianParams, q: &RVector) -> Result<C64> {
    if q.len() != params.dim() {
        return Err(Error::InvalidArgument(format!(
            "evaluation point has dimension {}, parameters have {}",
            q.len(),
            params.dim()
        )));
    }
    Ok(GaussianEvaluator::new(params)?.eval(q))
}

/// The per-pair quantities entering the closed-form Gaussian overlap:
/// the bra-side width matrix Gamma = P Q^-1, shift y = p - Gamma q, phase
/// eta = S - (y + p)^T q / 2, and the combinations
/// `delta X = X' - conj(X)` for the pair.
#[derive(Clone, Debug)]
pub struct GaussianOverlapWork {
    pub gamma: CMatrix,
    pub y: CVector,
    pub eta: C64,
    pub delta_gamma: CMatrix,
    pub delta_y: CVector,
    pub delta_eta: C64,
}

fn single_work(params: &GaussianParams) -> Result<(CMatrix, CVector, C64)> {
    let gamma = params.width_matrix()?;
    let q = vec_to_complex(&params.q);
    let p = vec_to_complex(&params.p);
    let y = &p - &gamma * &q;
    let eta = C64::new(params.s, 0.0) - dot_t(&(&y + &p), &q) * 0.5;
    Ok((gamma, y, eta))
}

impl GaussianOverlapWork {
    pub fn new(bra: &GaussianParams, ket: &GaussianParams) -> Result<Self> {
        check_pair(bra, ket)?;
        let (gamma, y, eta) = single_work(bra)?;
        let (gamma_ket, y_ket, eta_ket) = single_work(ket)?;
        Ok(Self {
            delta_gamma: &gamma_ket - gamma.conjugate(),
            delta_y: &y_ket - y.conjugate(),
            delta_eta: eta_ket - eta.conj(),
            gamma,
            y,
            eta,
        })
    }
}

pub(crate) fn check_pair(bra: &GaussianParams, ket: &GaussianParams) -> Result<()> {
    if bra.dim() != ket.dim() {
        return Err(Error::InvalidArgument(format!(
            "parameter sets have different dimensions: {} and {}",
            bra.dim(),
            ket.dim()
        )));
    }
    if bra.hbar != ket.hbar {
        return Err(Error::InvalidArgument(format!(
            "parameter sets use different hbar: {} and {}",
            bra.hbar, ket.hbar
        )));
    }
    Ok(())
}

/// Closed-form overlap of two Gaussian wavepackets, on the principal branch
/// of the determinant square root.
pub fn gaussian_overlap(bra: &GaussianParams, ket: &GaussianParams) -> Result<C64> {
    check_pair(bra, ket)?;
    let d = bra.dim();
    let den = bra.q_mat.adjoint() * &ket.p_mat - bra.p_mat.adjoint() * &ket.q_mat;
    let det = den.determinant();
    if det.norm() < 1e-300 {
        return Err(Error::DegeneratePair("det(Q† P' - P† Q') vanishes".into()));
    }
    // principal square root of the combined radicand (2i)^D / det, so the
    // self-overlap is exactly +1 in every dimension
    let prefactor = (C64::new(0.0, 2.0).powu(d as u32) / det).sqrt();
    let work = GaussianOverlapWork::new(bra, ket)?;
    if max_abs(&work.delta_gamma) == 0.0 {
        return Err(Error::DegeneratePair("delta Gamma vanishes".into()));
    }
    let xi = solve_vec(&work.delta_gamma, &work.delta_y, "delta Gamma solve")?;
    let exponent = (work.delta_eta - dot_t(&work.delta_y, &xi) * 0.5) * C64::i() / bra.hbar;
    Ok(prefactor * exponent.exp())
}

/// Overlaps of `params0` with each state along a trajectory, choosing the
/// square-root branch at every step to keep the series continuous. The
/// first sample uses the principal branch.
pub fn continuous_overlap_series(
    params0: &GaussianParams,
    trajectory: &[GaussianParams],
) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(trajectory.len());
    let mut prev: Option<C64> = None;
    for (step, state) in trajectory.iter().enumerate() {
        let principal = gaussian_overlap(params0, state)?;
        let value = match prev {
            None => principal,
            Some(prev) => {
                let keep = (principal - prev).norm();
                let flip = (-principal - prev).norm();
                if (keep - flip).abs() <= 1e-12 {
                    return Err(Error::ContinuityViolation(format!(
                        "branch candidates equidistant at step {step} (|overlap| = {:.3e})",
                        principal.norm()
                    )));
                }
                if keep < flip {
                    principal
                } else {
                    -principal
                }
            }
        };
        out.push(value);
        prev = Some(value);
    }
    Ok(out)
}
