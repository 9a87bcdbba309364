//! Gaussian parameter sets in the (q, p, Q, P, S) parametrization and the
//! canonical symplectic structure they must respect.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::{
    condition_estimate, identity_c, max_abs, min_sym_eigenvalue, solve, spd_inverse_sqrt,
    to_complex, CMatrix, RMatrix, RVector,
};

/// Default residual tolerance for the symplecticity conditions.
pub const DEFAULT_SYMPL_TOL: f64 = 1e-10;

/// Condition-number threshold beyond which a width factor is reported
/// singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// A real phase-space vector stacked as (q; p).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpacePoint {
    z: RVector,
}

impl PhaseSpacePoint {
    pub fn new(q: &RVector, p: &RVector) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::InvalidArgument(format!(
                "phase-space point needs matching position/momentum lengths, got {} and {}",
                q.len(),
                p.len()
            )));
        }
        let mut z = RVector::zeros(2 * q.len());
        z.rows_mut(0, q.len()).copy_from(q);
        z.rows_mut(q.len(), p.len()).copy_from(p);
        Ok(Self { z })
    }

    pub fn from_stacked(z: RVector) -> Result<Self> {
        if z.len() % 2 != 0 || z.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "phase-space vector must have even positive length, got {}",
                z.len()
            )));
        }
        Ok(Self { z })
    }

    pub fn dim(&self) -> usize {
        self.z.len() / 2
    }

    pub fn stacked(&self) -> &RVector {
        &self.z
    }

    pub fn position(&self) -> RVector {
        self.z.rows(0, self.dim()).into_owned()
    }

    pub fn momentum(&self) -> RVector {
        self.z.rows(self.dim(), self.dim()).into_owned()
    }

    /// The point as a complex 2D x 1 matrix, for use with [`symplectic_form`].
    pub fn as_complex_column(&self) -> CMatrix {
        CMatrix::from_iterator(self.z.len(), 1, self.z.iter().map(|&x| C64::new(x, 0.0)))
    }
}

/// The complex 2D x D matrix stacked as (Q; P).
#[derive(Clone, Debug, PartialEq)]
pub struct StackedZ {
    mat: CMatrix,
}

impl StackedZ {
    pub fn from_params(params: &GaussianParams) -> Self {
        let d = params.dim();
        let mut mat = CMatrix::zeros(2 * d, d);
        mat.view_mut((0, 0), (d, d)).copy_from(&params.q_mat);
        mat.view_mut((d, 0), (d, d)).copy_from(&params.p_mat);
        Self { mat }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.ncols()
    }
}

/// The bilinear form X^T J Y with J the standard symplectic matrix, for
/// complex matrices with 2D rows. Returns a D1 x D2 complex matrix.
pub fn symplectic_form(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    if x.nrows() != y.nrows() || x.nrows() % 2 != 0 || x.nrows() == 0 {
        return Err(Error::InvalidArgument(format!(
            "symplectic form needs matching even row counts, got {} and {}",
            x.nrows(),
            y.nrows()
        )));
    }
    let d = x.nrows() / 2;
    let x_top = x.rows(0, d);
    let x_bot = x.rows(d, d);
    let y_top = y.rows(0, d);
    let y_bot = y.rows(d, d);
    Ok(x_top.transpose() * y_bot - x_bot.transpose() * y_top)
}

/// The standard 2D x 2D symplectic matrix J as a real matrix.
pub fn standard_symplectic_matrix(dim: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        j[(i, dim + i)] = 1.0;
        j[(dim + i, i)] = -1.0;
    }
    j
}

/// The parameter tuple (q, p, Q, P, S) of a normalized Gaussian wavepacket,
/// together with the scale hbar.
///
/// The width matrices Q and P must satisfy
/// `Q^T P - P^T Q = 0` and `Q† P - P† Q = 2i I`; [`GaussianParams::validate`]
/// reports the residuals of both conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianParamsRepr", into = "GaussianParamsRepr")]
pub struct GaussianParams {
    /// Position center.
    pub q: RVector,
    /// Momentum center.
    pub p: RVector,
    /// Complex position width factor Q.
    pub q_mat: CMatrix,
    /// Complex momentum width factor P.
    pub p_mat: CMatrix,
    /// Real action phase S.
    pub s: f64,
    /// Scale of the commutator [q, p] = i hbar.
    pub hbar: f64,
}

impl GaussianParams {
    pub fn new(
        q: RVector,
        p: RVector,
        q_mat: CMatrix,
        p_mat: CMatrix,
        s: f64,
        hbar: f64,
    ) -> Result<Self> {
        let d = q.len();
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if p.len() != d
            || q_mat.nrows() != d
            || q_mat.ncols() != d
            || p_mat.nrows() != d
            || p_mat.ncols() != d
        {
            return Err(Error::InvalidArgument(format!(
                "inconsistent dimensions: q has {}, p has {}, Q is {}x{}, P is {}x{}",
                d,
                p.len(),
                q_mat.nrows(),
                q_mat.ncols(),
                p_mat.nrows(),
                p_mat.ncols()
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { q, p, q_mat, p_mat, s, hbar })
    }

    /// The standard coherent state: Q = I, P = iI, centered at the origin.
    pub fn standard(dim: usize, hbar: f64) -> Self {
        Self {
            q: RVector::zeros(dim),
            p: RVector::zeros(dim),
            q_mat: identity_c(dim),
            p_mat: identity_c(dim) * C64::i(),
            s: 0.0,
            hbar,
        }
    }

    /// Builds parameters from a complex symmetric width matrix C with
    /// positive-definite imaginary part, using the canonical factorization
    /// `Q = (Im C)^(-1/2)`, `P = C Q`.
    pub fn from_width_matrix(
        q: RVector,
        p: RVector,
        c0: &CMatrix,
        s: f64,
        hbar: f64,
    ) -> Result<Self> {
        let (q_mat, p_mat) = factorize_width_matrix(c0)?;
        Self::new(q, p, q_mat, p_mat, s, hbar)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// The complex symmetric width matrix C = P Q^-1.
    pub fn width_matrix(&self) -> Result<CMatrix> {
        let cond = condition_estimate(&self.q_mat);
        if cond > SINGULAR_CONDITION {
            return Err(Error::SingularWidthMatrix(format!(
                "condition estimate {cond:.3e} exceeds {SINGULAR_CONDITION:.0e}"
            )));
        }
        let gamma_t = solve(
            &self.q_mat.transpose(),
            &self.p_mat.transpose(),
            "width matrix P Q^-1",
        )?;
        Ok(gamma_t.transpose())
    }

    pub fn stacked_z(&self) -> StackedZ {
        StackedZ::from_params(self)
    }

    pub fn center(&self) -> PhaseSpacePoint {
        PhaseSpacePoint::new(&self.q, &self.p).expect("center lengths match by construction")
    }

    /// Position covariance hbar/2 Q Q† (a real symmetric matrix for valid
    /// parameters).
    pub fn position_covariance(&self) -> RMatrix {
        let qq = &self.q_mat * self.q_mat.adjoint();
        qq.map(|z| z.re) * (self.hbar / 2.0)
    }

    /// The real 2D x 2D matrix of Re/Im blocks of Q and P; symplectic
    /// exactly when the width conditions hold.
    pub fn real_block_matrix(&self) -> RMatrix {
        let d = self.dim();
        let mut y = RMatrix::zeros(2 * d, 2 * d);
        y.view_mut((0, 0), (d, d)).copy_from(&self.q_mat.map(|z| z.re));
        y.view_mut((0, d), (d, d)).copy_from(&self.q_mat.map(|z| z.im));
        y.view_mut((d, 0), (d, d)).copy_from(&self.p_mat.map(|z| z.re));
        y.view_mut((d, d), (d, d)).copy_from(&self.p_mat.map(|z| z.im));
        y
    }

    /// Checks the symplecticity conditions and width-matrix structure,
    /// reporting all residuals against `tol`.
    pub fn validate(&self, tol: f64) -> Result<ValidationReport> {
        let d = self.dim();
        let qt_p = self.q_mat.transpose() * &self.p_mat - self.p_mat.transpose() * &self.q_mat;
        let qdag_p = self.q_mat.adjoint() * &self.p_mat
            - self.p_mat.adjoint() * &self.q_mat
            - identity_c(d) * C64::new(0.0, 2.0);
        let qq = &self.q_mat * self.q_mat.adjoint();
        let pp = &self.p_mat * self.p_mat.adjoint();
        let j = standard_symplectic_matrix(d);
        let y = self.real_block_matrix();
        let y_residual = (y.transpose() * &j * &y - &j)
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        let gamma = self.width_matrix()?;
        let im_gamma = gamma.map(|z| z.im);
        Ok(ValidationReport {
            transpose_residual: max_abs(&qt_p),
            adjoint_residual: max_abs(&qdag_p),
            qq_dag_symmetry: max_abs(&(&qq - qq.transpose())),
            pp_dag_symmetry: max_abs(&(&pp - pp.transpose())),
            block_symplectic_residual: y_residual,
            im_width_min_eigenvalue: min_sym_eigenvalue(&im_gamma),
            q_condition: condition_estimate(&self.q_mat),
            tol,
        })
    }

    /// Projects slightly perturbed parameters back onto the symplectic
    /// manifold: extracts the width matrix C = P Q^-1, symmetrizes it, and
    /// refactorizes canonically. Parameters quoted to a few decimals (such
    /// as published tables) violate the width conditions at the rounding
    /// level; this restores them exactly while moving Q and P as little as
    /// the construction allows.
    pub fn resymplectified(&self) -> Result<Self> {
        let gamma = self.width_matrix()?;
        let c = (&gamma + gamma.transpose()) * C64::new(0.5, 0.0);
        Self::from_width_matrix(self.q.clone(), self.p.clone(), &c, self.s, self.hbar)
    }

    /// Draws a random valid parameter set: a random complex symmetric width
    /// matrix with positive-definite imaginary part is factorized, and the
    /// centers and action are drawn uniformly.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let m = RMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let sym = (&m + m.transpose()) * 0.5;
        let n = RMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let spd = n.transpose() * &n * (1.0 / dim as f64) + RMatrix::identity(dim, dim) * 0.4;
        let c0 = to_complex(&sym) + to_complex(&spd) * C64::i();
        let q = RVector::from_fn(dim, |_, _| rng.random_range(-0.8..0.8));
        let p = RVector::from_fn(dim, |_, _| rng.random_range(-0.8..0.8));
        let s = rng.random_range(-0.5..0.5);
        Self::from_width_matrix(q, p, &c0, s, 1.0)
            .expect("construction guarantees a factorizable width matrix")
    }
}

/// Splits a complex symmetric width matrix with positive-definite imaginary
/// part into the pair (Q, P) with `Q = (Im C)^(-1/2)` and `P = C Q`.
pub fn factorize_width_matrix(c0: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if c0.nrows() != c0.ncols() || c0.nrows() == 0 {
        return Err(Error::InvalidArgument(format!(
            "width matrix must be square and nonempty, got {}x{}",
            c0.nrows(),
            c0.ncols()
        )));
    }
    let scale = max_abs(c0).max(1.0);
    let asym = max_abs(&(c0 - c0.transpose()));
    if asym > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "width matrix must be symmetric; asymmetry {asym:.3e}"
        )));
    }
    let im = c0.map(|z| z.im);
    let q_mat = to_complex(&spd_inverse_sqrt(&im, "imaginary part of the width matrix")?);
    let p_mat = c0 * &q_mat;
    Ok((q_mat, p_mat))
}

/// Residuals of the width-matrix conditions for one parameter set.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// max-abs of Q^T P - P^T Q.
    pub transpose_residual: f64,
    /// max-abs of Q† P - P† Q - 2i I.
    pub adjoint_residual: f64,
    /// max-abs of Q Q† minus its transpose.
    pub qq_dag_symmetry: f64,
    /// max-abs of P P† minus its transpose.
    pub pp_dag_symmetry: f64,
    /// max-abs of Y^T J Y - J for the Re/Im block matrix Y.
    pub block_symplectic_residual: f64,
    /// Smallest eigenvalue of Im(P Q^-1); must be positive.
    pub im_width_min_eigenvalue: f64,
    /// Condition estimate of Q.
    pub q_condition: f64,
    /// Tolerance the report was evaluated against.
    pub tol: f64,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.transpose_residual
            .max(self.adjoint_residual)
            .max(self.qq_dag_symmetry)
            .max(self.pp_dag_symmetry)
            .max(self.block_symplectic_residual)
    }

    pub fn pass(&self) -> bool {
        self.max_residual() < self.tol && self.im_width_min_eigenvalue > 0.0
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "residual |Q^T P - P^T Q|          = {:.6e}", self.transpose_residual)?;
        writeln!(f, "residual |Q† P - P† Q - 2i I|     = {:.6e}", self.adjoint_residual)?;
        writeln!(f, "residual |Q Q† - (Q Q†)^T|        = {:.6e}", self.qq_dag_symmetry)?;
        writeln!(f, "residual |P P† - (P P†)^T|        = {:.6e}", self.pp_dag_symmetry)?;
        writeln!(f, "residual |Y^T J Y - J|            = {:.6e}", self.block_symplectic_residual)?;
        writeln!(f, "min eigenvalue of Im(P Q^-1)      = {:.6e}", self.im_width_min_eigenvalue)?;
        writeln!(f, "condition estimate of Q           = {:.6e}", self.q_condition)?;
        write!(
            f,
            "verdict at tol {:.1e}: {}",
            self.tol,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct GaussianParamsRepr {
    q: Vec<f64>,
    p: Vec<f64>,
    #[serde(rename = "Q_re")]
    q_re: Vec<Vec<f64>>,
    #[serde(rename = "Q_im")]
    q_im: Vec<Vec<f64>>,
    #[serde(rename = "P_re")]
    p_re: Vec<Vec<f64>>,
    #[serde(rename = "P_im")]
    p_im: Vec<Vec<f64>>,
    #[serde(rename = "S")]
    s: f64,
    #[serde(default = "default_hbar")]
    hbar: f64,
}

fn rows_to_matrix(rows: &[Vec<f64>], name: &str) -> std::result::Result<RMatrix, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{name} must be a square row-major matrix"));
    }
    Ok(RMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl TryFrom<GaussianParamsRepr> for GaussianParams {
    type Error = String;

    fn try_from(repr: GaussianParamsRepr) -> std::result::Result<Self, String> {
        let q_re = rows_to_matrix(&repr.q_re, "Q_re")?;
        let q_im = rows_to_matrix(&repr.q_im, "Q_im")?;
        let p_re = rows_to_matrix(&repr.p_re, "P_re")?;
        let p_im = rows_to_matrix(&repr.p_im, "P_im")?;
        let q_mat = to_complex(&q_re) + to_complex(&q_im) * C64::i();
        let p_mat = to_complex(&p_re) + to_complex(&p_im) * C64::i();
        GaussianParams::new(
            RVector::from_vec(repr.q),
            RVector::from_vec(repr.p),
            q_mat,
            p_mat,
            repr.s,
            repr.hbar,
        )
        .map_err(|e| e.to_string())
    }
}

impl From<GaussianParams> for GaussianParamsRepr {
    fn from(params: GaussianParams) -> Self {
        GaussianParamsRepr {
            q: params.q.iter().copied().collect(),
            p: params.p.iter().copied().collect(),
            q_re: matrix_to_rows(&params.q_mat.map(|z| z.re)),
            q_im: matrix_to_rows(&params.q_mat.map(|z| z.im)),
            p_re: matrix_to_rows(&params.p_mat.map(|z| z.re)),
            p_im: matrix_to_rows(&params.p_mat.map(|z| z.im)),
            s: params.s,
            hbar: params.hbar,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::RVector;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table1_pair() -> (GaussianParams, GaussianParams) {
        let bra = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/table1_bra.json"
        ))
        .unwrap();
        let ket = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/table1_ket.json"
        ))
        .unwrap();
        (
            serde_json::from_str(&bra).unwrap(),
            serde_json::from_str(&ket).unwrap(),
        )
    }

    #[test]
    fn symplectic_form_of_basis_column_with_itself_vanishes() {
        let e1 = CMatrix::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let w = symplectic_form(&e1, &e1).unwrap();
        assert_eq!(w[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn symplectic_form_of_stacked_z_with_conjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = GaussianParams::random(3, &mut rng);
        let z = params.stacked_z();
        let w = symplectic_form(z.matrix(), &z.matrix().conjugate()).unwrap();
        let expect = identity_c(3) * C64::new(0.0, -2.0);
        assert!(max_abs(&(&w - &expect)) < 1e-12);
        let zero = symplectic_form(z.matrix(), z.matrix()).unwrap();
        assert!(max_abs(&zero) < 1e-12);
    }

    #[test]
    fn symplectic_form_matches_componentwise_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q = RVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
            let p = RVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
            let qb = RVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
            let pb = RVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
            let a = PhaseSpacePoint::new(&q, &p).unwrap();
            let b = PhaseSpacePoint::new(&qb, &pb).unwrap();
            let w = symplectic_form(&a.as_complex_column(), &b.as_complex_column()).unwrap();
            let direct = q.dot(&pb) - p.dot(&qb);
            assert_abs_diff_eq!(w[(0, 0)].re, direct, epsilon = 1e-13);
            assert_abs_diff_eq!(w[(0, 0)].im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn symplectic_form_rejects_mismatched_rows() {
        let a = CMatrix::zeros(4, 1);
        let b = CMatrix::zeros(2, 1);
        assert!(matches!(
            symplectic_form(&a, &b),
            Err(Error::InvalidArgument(_))
        ));
        let odd = CMatrix::zeros(3, 1);
        assert!(symplectic_form(&odd, &odd).is_err());
    }

    #[test]
    fn standard_coherent_state_validates_exactly() {
        let params = GaussianParams::standard(2, 1.0);
        let report = params.validate(DEFAULT_SYMPL_TOL).unwrap();
        assert!(report.pass());
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn table1_parameters_pass_only_at_rounded_tolerance() {
        let (bra, ket) = table1_pair();
        for params in [&bra, &ket] {
            // parameters printed to 3 decimals: residuals are of order 1e-3
            let loose = params.validate(2e-3).unwrap();
            assert!(loose.pass(), "rounded parameters should pass at 2e-3:\n{loose}");
            assert!(loose.max_residual() > 1e-4, "rounding should be visible");
            let tight = params.validate(1e-12).unwrap();
            assert!(!tight.pass(), "3-decimal parameters cannot pass at 1e-12");
        }
    }

    #[test]
    fn non_normalizable_widths_fail_with_residual_two() {
        let params = GaussianParams::new(
            RVector::zeros(2),
            RVector::zeros(2),
            identity_c(2),
            identity_c(2),
            0.0,
            1.0,
        )
        .unwrap();
        let report = params.validate(DEFAULT_SYMPL_TOL).unwrap();
        assert!(!report.pass());
        assert_abs_diff_eq!(report.adjoint_residual, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_width_factor_is_reported() {
        let params = GaussianParams::new(
            RVector::zeros(2),
            RVector::zeros(2),
            CMatrix::zeros(2, 2),
            identity_c(2) * C64::i(),
            0.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            params.validate(DEFAULT_SYMPL_TOL),
            Err(Error::SingularWidthMatrix(_))
        ));
    }

    #[test]
    fn factorize_identity_width() {
        let c0 = identity_c(2) * C64::i();
        let (q_mat, p_mat) = factorize_width_matrix(&c0).unwrap();
        assert!(max_abs(&(&q_mat - identity_c(2))) < 1e-15);
        assert!(max_abs(&(&p_mat - identity_c(2) * C64::i())) < 1e-15);
    }

    #[test]
    fn factorize_diagonal_width() {
        let c0 = CMatrix::from_diagonal(&crate::la::CVector::from_vec(vec![
            C64::new(0.0, 2.0),
            C64::new(0.0, 0.5),
        ]));
        let (q_mat, p_mat) = factorize_width_matrix(&c0).unwrap();
        let r = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(q_mat[(0, 0)].re, 1.0 / r, epsilon = 1e-14);
        assert_abs_diff_eq!(q_mat[(1, 1)].re, r, epsilon = 1e-14);
        assert_abs_diff_eq!(p_mat[(0, 0)].im, r, epsilon = 1e-14);
        assert_abs_diff_eq!(p_mat[(1, 1)].im, 1.0 / r, epsilon = 1e-14);
    }

    #[test]
    fn factorize_rejects_bad_inputs() {
        let mut c0 = identity_c(2) * C64::i();
        c0[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(
            factorize_width_matrix(&c0),
            Err(Error::InvalidArgument(_))
        ));
        let negative = identity_c(2) * C64::new(0.0, -1.0);
        assert!(factorize_width_matrix(&negative).is_err());
    }

    #[test]
    fn random_parameters_validate_tightly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for dim in [1usize, 2, 3, 5] {
            for _ in 0..10 {
                let params = GaussianParams::random(dim, &mut rng);
                let report = params.validate(1e-12).unwrap();
                assert!(report.pass(), "dim {dim} failed:\n{report}");
                let gamma = params.width_matrix().unwrap();
                // factorization reproduces the width matrix
                let c0 = &params.p_mat * &params.q_mat.try_inverse().unwrap();
                assert!(max_abs(&(&gamma - &c0)) < 1e-12);
            }
        }
    }

    #[test]
    fn im_width_equals_inverse_qq_dag() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = GaussianParams::random(3, &mut rng);
        let gamma = params.width_matrix().unwrap();
        let im_gamma = gamma.map(|z| z.im);
        let qq = (&params.q_mat * params.q_mat.adjoint()).map(|z| z.re);
        let prod = &im_gamma * &qq;
        let residual = (&prod - RMatrix::identity(3, 3))
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        assert!(residual < 1e-12, "Im C (Q Q†) should be the identity, residual {residual:.3e}");
    }

    #[test]
    fn json_round_trip_preserves_parameters() {
        let (bra, _) = table1_pair();
        let text = serde_json::to_string(&bra).unwrap();
        let back: GaussianParams = serde_json::from_str(&text).unwrap();
        assert_eq!(bra, back);
        // schema field names are stable
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["q", "p", "Q_re", "Q_im", "P_re", "P_im", "S", "hbar"] {
            assert!(value.get(key).is_some(), "missing key {key}");
        }
    }

    proptest! {
        #[test]
        fn skew_symmetry_of_the_form(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 1 + (seed as usize) % 4;
            let a = RVector::from_fn(2 * d, |_, _| rng.random_range(-3.0..3.0));
            let b = RVector::from_fn(2 * d, |_, _| rng.random_range(-3.0..3.0));
            let pa = PhaseSpacePoint::from_stacked(a).unwrap();
            let pb = PhaseSpacePoint::from_stacked(b).unwrap();
            let w_ab = symplectic_form(&pa.as_complex_column(), &pb.as_complex_column()).unwrap();
            let w_ba = symplectic_form(&pb.as_complex_column(), &pa.as_complex_column()).unwrap();
            prop_assert!((w_ab[(0, 0)] + w_ba[(0, 0)]).norm() < 1e-12);
        }
    }
}
