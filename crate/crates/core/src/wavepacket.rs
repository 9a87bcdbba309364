//! Wavepackets expanded over one Gaussian's basis family: grid evaluation
//! through the ladder recurrence and projection onto another family.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{check_pair, GaussianEvaluator};
use crate::index::{IndexSet, MultiIndex};
use crate::la::{CMatrix, CVector, RVector};
use crate::overlap::{build_overlap_matrix, BuildOptions};
use crate::params::GaussianParams;

/// A finite superposition of basis functions sharing one Gaussian
/// parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WavepacketRepr", into = "WavepacketRepr")]
pub struct HagedornWavepacket {
    params: GaussianParams,
    coeffs: BTreeMap<MultiIndex, C64>,
}

impl HagedornWavepacket {
    pub fn new(
        params: GaussianParams,
        coeffs: impl IntoIterator<Item = (MultiIndex, C64)>,
    ) -> Result<Self> {
        let coeffs: BTreeMap<MultiIndex, C64> = coeffs.into_iter().collect();
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("wavepacket needs at least one coefficient".into()));
        }
        if coeffs.keys().any(|k| k.dim() != params.dim()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient indices must have dimension {}",
                params.dim()
            )));
        }
        Ok(Self { params, coeffs })
    }

    /// The bare Gaussian: a single unit coefficient on the ground index.
    pub fn gaussian(params: GaussianParams) -> Self {
        let zero = MultiIndex::zero(params.dim());
        Self {
            coeffs: [(zero, C64::new(1.0, 0.0))].into_iter().collect(),
            params,
        }
    }

    pub fn params(&self) -> &GaussianParams {
        &self.params
    }

    /// Replaces the Gaussian parameters, keeping the coefficients. The new
    /// parameters must have the same dimension.
    pub fn with_params(&self, params: GaussianParams) -> Result<Self> {
        if params.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "replacement parameters have dimension {}, wavepacket has {}",
                params.dim(),
                self.dim()
            )));
        }
        Ok(Self { params, coeffs: self.coeffs.clone() })
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, k: &MultiIndex) -> Option<C64> {
        self.coeffs.get(k).copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_shell(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::shell).max().unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero wavepacket".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (k.clone(), c / norm))
            .collect();
        Ok(Self { params: self.params.clone(), coeffs })
    }

    /// Coefficients as a dense vector over `set` (zeros off the support).
    pub fn coefficient_vector(&self, set: &IndexSet) -> Result<CVector> {
        let mut out = CVector::zeros(set.len());
        for (k, c) in &self.coeffs {
            let Some(pos) = set.position(k) else {
                return Err(Error::InvalidArgument(format!(
                    "coefficient index {k} is outside the requested index set"
                )));
            };
            out[pos] = *c;
        }
        Ok(out)
    }

    /// Values of the wavepacket at the given points.
    pub fn eval_on_grid(&self, points: &[RVector]) -> Result<CVector> {
        let basis = eval_basis_on_grid(&self.params, self.max_shell(), points)?;
        let c = self.coefficient_vector(basis.indices())?;
        Ok((c.transpose() * basis.values()).transpose())
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    k: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct WavepacketRepr {
    params: GaussianParams,
    coeffs: Vec<CoeffRepr>,
}

impl TryFrom<WavepacketRepr> for HagedornWavepacket {
    type Error = String;

    fn try_from(repr: WavepacketRepr) -> std::result::Result<Self, String> {
        HagedornWavepacket::new(
            repr.params,
            repr.coeffs
                .into_iter()
                .map(|c| (MultiIndex::new(c.k), C64::new(c.re, c.im))),
        )
        .map_err(|e| e.to_string())
    }
}

impl From<HagedornWavepacket> for WavepacketRepr {
    fn from(h: HagedornWavepacket) -> Self {
        WavepacketRepr {
            params: h.params,
            coeffs: h
                .coeffs
                .into_iter()
                .map(|(k, c)| CoeffRepr {
                    k: k.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

/// Basis functions evaluated on a list of points: row `i` of `values`
/// holds the function for `indices
/// [i]` at every point.
#[derive(Clone, Debug)]
pub struct BasisGrid {
    indices: IndexSet,
    values: CMatrix,
}

impl BasisGrid {
    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn row(&self, k: &MultiIndex) -> Option<CVector> {
        self.indices
            .position(k)
            .map(|i| self.values.row(i).transpose())
    }
}

/// Evaluates every basis function with shell at most `kmax` at the given
/// points. The ground row is the Gaussian itself; each higher shell comes
/// from one D x D linear solve in Q per parent index, factorized once and
/// reused across points.
pub fn eval_basis_on_grid(
    params: &GaussianParams,
    kmax: u32,
    points: &[RVector],
) -> Result<BasisGrid> {
    let d = params.dim();
    if points.iter().any(|q| q.len() != d) {
        return Err(Error::InvalidArgument(format!(
            "evaluation points must have dimension {d}"
        )));
    }
    let set = IndexSet::simplex(d, kmax);
    let npts = points.len();
    let evaluator = GaussianEvaluator::new(params)?;
    let mut values = CMatrix::zeros(set.len(), npts);
    for (c, q) in points.iter().enumerate() {
        values[(0, c)] = evaluator.eval(q);
    }

    let lu = params.q_mat.clone().lu();
    if lu.determinant().norm() == 0.0 {
        return Err(Error::SingularWidthMatrix("det Q = 0".into()));
    }
    let q_conj = params.q_mat.conjugate();
    let shift_scale = (2.0 / params.hbar).sqrt();
    // shifted coordinates, one column per point
    let shifted = CMatrix::from_fn(d, npts, |j, c| C64::new(shift_scale * (points[c][j] - params.q[j]), 0.0));

    let low = set.lowered_positions();
    let mut done = vec![false; set.len()];
    done[0] = true;
    for (pi, parent) in set.iter().enumerate() {
        if parent.shell() >= kmax {
            continue;
        }
        let targets: Vec<(usize, usize)> = (0..d)
            .map(|j| (j, set.position(&parent.raised(j)).expect("simplex is raise-closed below kmax")))
            .collect();
        if targets.iter().all(|&(_, ti)| done[ti]) {
            continue;
        }
        // rhs = scale (q - q_t) phi_parent - conj(Q) (sqrt(parent_j) phi_lowered)_j
        let mut rhs = CMatrix::zeros(d, npts);
        for c in 0..npts {
            let parent_val = values[(pi, c)];
            for j in 0..d {
                rhs[(j, c)] = shifted[(j, c)] * parent_val;
            }
        }
        for j in 0..d {
            if let Some(li) = low[pi][j] {
                let weight = (parent.entry(j) as f64).sqrt();
                for c in 0..npts {
                    let lowered_val = values[(li, c)] * weight;
                    for r in 0..d {
                        rhs[(r, c)] -= q_conj[(r, j)] * lowered_val;
                    }
                }
            }
        }
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::SingularWidthMatrix("solve against Q failed".into()))?;
        for &(j, ti) in &targets {
            if done[ti] {
                continue;
            }
            let weight = 1.0 / ((parent.entry(j) + 1) as f64).sqrt();
            for c in 0..npts {
                values[(ti, c)] = sol[(j, c)] * weight;
            }
            done[ti] = true;
        }
    }
    Ok(BasisGrid { indices: set, values })
}

/// Result of projecting a wavepacket onto another Gaussian's basis.
#[derive(Clone, Debug)]
pub struct Projection {
    pub wavepacket: HagedornWavepacket,
    /// Squared norm of the projected coefficients; equals the overlap
    /// magnitude with the original for a normalized input.
    pub fidelity: f64,
}

/// Projects `psi` onto the basis of `target` truncated at shell `kmax`,
/// returning the projected wavepacket and its fidelity.
pub fn project_onto_basis(
    psi: &HagedornWavepacket,
    target: &GaussianParams,
    kmax: u32,
) -> Result<Projection> {
    check_pair(psi.params(), target)?;
    let bra_set = IndexSet::simplex(psi.dim(), psi.max_shell());
    let ket_set = IndexSet::simplex(target.dim(), kmax);
    let m = build_overlap_matrix(psi.params(), target, &bra_set, &ket_set, &BuildOptions::default())?;
    let c = psi.coefficient_vector(&bra_set)?;
    let projected = m.values().adjoint() * c;
    let fidelity = projected.norm_squared();
    let coeffs = ket_set
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), projected[i]));
    Ok(Projection {
        wavepacket: HagedornWavepacket::new(target.clone(), coeffs)?,
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_points(a: f64, b: f64, n: usize) -> Vec<RVector> {
        (0..n)
            .map(|i| RVector::from_element(1, a + (i as f64 + 0.5) * (b - a) / n as f64))
            .collect()
    }

    fn tensor_points_2d(a: f64, b: f64, n: usize) -> (Vec<RVector>, f64) {
        let dx = (b - a) / n as f64;
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                pts.push(RVector::from_vec(vec![
                    a + (i as f64 + 0.5) * dx,
                    a + (j as f64 + 0.5) * dx,
                ]));
            }
        }
        (pts, dx * dx)
    }

    #[test]
    fn harmonic_limit_reproduces_hermite_functions() {
        let params = GaussianParams::standard(1, 1.0);
        let points = line_points(-4.0, 4.0, 17);
        let basis = eval_basis_on_grid(&params, 2, &points).unwrap();
        let norm = std::f64::consts::PI.powf(-0.25);
        for (c, q) in points.iter().enumerate() {
            let x = q[0];
            let gauss = norm * (-x * x / 2.0).exp();
            let k0 = basis.values()[(0, c)];
            let k1 = basis.values()[(1, c)];
            let k2 = basis.values()[(2, c)];
            assert_abs_diff_eq!(k0.re, gauss, epsilon = 1e-12);
            assert_abs_diff_eq!(k1.re, 2f64.sqrt() * x * gauss, epsilon = 1e-12);
            assert_abs_diff_eq!(
                k2.re,
                (2.0 * x * x - 1.0) / 2f64.sqrt() * gauss,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(k1.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_gram_matrix_is_identity_on_converged_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let params = GaussianParams::random(2, &mut rng);
        let (points, w) = tensor_points_2d(-12.0, 12.0, 180);
        let basis = eval_basis_on_grid(&params, 3, &points).unwrap();
        let gram = basis.values() * basis.values().adjoint() * C64::new(w, 0.0);
        let n = basis.indices().len();
        let residual = crate::la::max_abs(&(&gram - CMatrix::identity(n, n)));
        assert!(residual < 1e-6, "Gram residual {residual:.3e}");
    }

    #[test]
    fn projection_onto_own_basis_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let params = GaussianParams::random(2, &mut rng);
        let psi = HagedornWavepacket::new(
            params.clone(),
            [
                (MultiIndex::new([0, 0]), C64::new(0.6, 0.0)),
                (MultiIndex::new([2, 1]), C64::new(0.0, -0.8)),
            ],
        )
        .unwrap();
        let proj = project_onto_basis(&psi, &params, 4).unwrap();
        assert_abs_diff_eq!(proj.fidelity, 1.0, epsilon = 1e-12);
        for (k, c) in psi.coeffs() {
            let got = proj.wavepacket.coeff(k).unwrap();
            assert!((got - c).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_sweep_is_monotone_and_parseval_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let source = GaussianParams::random(2, &mut rng);
        let target = GaussianParams::random(2, &mut rng);
        let psi = HagedornWavepacket::new(
            source,
            [
                (MultiIndex::new([1, 0]), C64::new(0.5, 0.5)),
                (MultiIndex::new([0, 2]), C64::new(-0.5, 0.5)),
            ],
        )
        .unwrap()
        .normalized()
        .unwrap();
        let mut last = 0.0;
        for kmax in [0u32, 2, 4, 8, 12] {
            let proj = project_onto_basis(&psi, &target, kmax).unwrap();
            assert!(
                proj.fidelity >= last - 1e-12,
                "fidelity must be nondecreasing: {} after {last}",
                proj.fidelity
            );
            assert!(proj.fidelity <= psi.norm_sqr() + 1e-9);
            last = proj.fidelity;
        }
        assert!(last > 0.9, "projection should converge, fidelity {last}");
    }

    #[test]
    fn ground_projection_matches_grid_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let source = GaussianParams::random(2, &mut rng);
        let target = GaussianParams::random(2, &mut rng);
        let psi = HagedornWavepacket::new(
            source,
            [
                (MultiIndex::new([0, 0]), C64::new(0.8, 0.0)),
                (MultiIndex::new([1, 1]), C64::new(0.0, 0.6)),
            ],
        )
        .unwrap();
        let proj = project_onto_basis(&psi, &target, 0).unwrap();
        let c0 = proj
            .wavepacket
            .coeff(&MultiIndex::zero(2))
            .unwrap();
        // quadrature of conj(phi'_0) psi
        let (points, w) = tensor_points_2d(-12.0, 12.0, 200);
        let psi_vals = psi.eval_on_grid(&points).unwrap();
        let target_vals = eval_basis_on_grid(&target, 0, &points).unwrap();
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..points.len() {
            acc += target_vals.values()[(0, c)].conj() * psi_vals[c] * w;
        }
        assert!((c0 - acc).norm() < 1e-8, "projected {c0} vs quadrature {acc}");
        assert_abs_diff_eq!(proj.fidelity, c0.norm_sqr(), epsilon = 1e-14);
    }

    #[test]
    fn projected_wavepacket_converges_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let source = GaussianParams::random(1, &mut rng);
        let target = GaussianParams::random(1, &mut rng);
        let psi = HagedornWavepacket::new(
            source,
            [
                (MultiIndex::new([1]), C64::new(0.6, 0.0)),
                (MultiIndex::new([3]), C64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        let points = line_points(-6.0, 6.0, 60);
        let reference = psi.eval_on_grid(&points).unwrap();
        let mut last = f64::INFINITY;
        for kmax in [2u32, 6, 12, 20] {
            let proj = project_onto_basis(&psi, &target, kmax).unwrap();
            let vals = proj.wavepacket.eval_on_grid(&points).unwrap();
            let err = (0..points.len())
                .map(|c| (vals[c] - reference[c]).norm())
                .fold(0.0, f64::max);
            assert!(err < last + 1e-12, "pointwise error should decrease: {err} after {last}");
            last = err;
        }
        assert!(last < 1e-3, "final pointwise error {last}");
    }

    #[test]
    fn wavepacket_norm_and_normalization() {
        let params = GaussianParams::standard(2, 1.0);
        let psi = HagedornWavepacket::new(
            params,
            [
                (MultiIndex::new([3, 0]), C64::new(1.0, 0.0)),
                (MultiIndex::new([1, 2]), C64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(psi.norm_sqr(), 2.0, epsilon = 1e-15);
        let n = psi.normalized().unwrap();
        assert_abs_diff_eq!(n.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(n.max_shell(), 3);
    }

    #[test]
    fn wavepacket_json_round_trip() {
        let params = GaussianParams::standard(3, 1.0);
        let psi = HagedornWavepacket::new(
            params,
            [
                (MultiIndex::new([3, 0, 0]), C64::new(0.5f64.sqrt(), 0.0)),
                (MultiIndex::new([1, 2, 1]), C64::new(0.5f64.sqrt(), 0.0)),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&psi).unwrap();
        let back: HagedornWavepacket = serde_json::from_str(&text).unwrap();
        assert_eq!(psi, back);
    }

    #[test]
    fn rejects_mixed_dimension_coefficients() {
        let params = GaussianParams::standard(2, 1.0);
        let err = HagedornWavepacket::new(
            params,
            [(MultiIndex::new([1, 0, 0]), C64::new(1.0, 0.0))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
