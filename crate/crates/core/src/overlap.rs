//! Overlap matrices between the basis families of two different Gaussians,
//! built exactly by shell recursion from the Gaussian-Gaussian overlap.

use num_complex::Complex64 as C64;

use crate::bogoliubov::{compute_bogoliubov, BogoliubovData};
use crate::error::{Error, Result};
use crate::gaussian::gaussian_overlap;
use crate::index::{IndexSet, MultiIndex};
use crate::la::{CMatrix, CVector};
use crate::params::GaussianParams;
use crate::wavepacket::HagedornWavepacket;

/// How redundant derivations of one entry are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FillMode {
    /// Each entry is computed exactly once: the bra-raising recurrence when
    /// the bra index is excited, the ket-raising recurrence otherwise.
    /// Results are deterministic bit-for-bit.
    #[default]
    Canonical,
    /// Every applicable derivation is computed and averaged; the maximum
    /// disagreement is recorded. Measures accumulated round-off.
    Symmetrized,
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub fill: FillMode,
    /// Overrides the seed entry; used to carry a branch-tracked
    /// Gaussian-Gaussian overlap into the recursion along a trajectory.
    pub seed: Option<C64>,
}

/// The dense overlap matrix between two basis families, in graded-lex
/// order on both sides.
#[derive(Clone, Debug)]
pub struct OverlapMatrix {
    bra_params: GaussianParams,
    ket_params: GaussianParams,
    bra: IndexSet,
    ket: IndexSet,
    values: CMatrix,
    rederivation_spread: Option<f64>,
}

impl OverlapMatrix {
    pub fn bra_params(&self) -> &GaussianParams {
        &self.bra_params
    }

    pub fn ket_params(&self) -> &GaussianParams {
        &self.ket_params
    }

    pub fn bra_set(&self) -> &IndexSet {
        &self.bra
    }

    pub fn ket_set(&self) -> &IndexSet {
        &self.ket
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// The seed entry, the overlap of the two guiding Gaussians.
    pub fn seed(&self) -> C64 {
        self.values[(0, 0)]
    }

    pub fn get(&self, bra: &MultiIndex, ket: &MultiIndex) -> Option<C64> {
        let bi = self.bra.position(bra)?;
        let ki = self.ket.position(ket)?;
        Some(self.values[(bi, ki)])
    }

    /// Maximum disagreement between redundant derivations, when the matrix
    /// was built in symmetrized mode.
    pub fn rederivation_spread(&self) -> Option<f64> {
        self.rederivation_spread
    }
}

struct Recursion<'a> {
    data: &'a BogoliubovData,
    bra_low: Vec<Vec<Option<usize>>>,
    ket_low: Vec<Vec<Option<usize>>>,
    bra_sqrt: Vec<Vec<f64>>,
    ket_sqrt: Vec<Vec<f64>>,
    dim: usize,
}

impl<'a> Recursion<'a> {
    fn new(data: &'a BogoliubovData, bra: &IndexSet, ket: &IndexSet) -> Self {
        let sqrt_table = |set: &IndexSet| -> Vec<Vec<f64>> {
            set.iter()
                .map(|k| (0..set.dim()).map(|j| (k.entry(j) as f64).sqrt()).collect())
                .collect()
        };
        Self {
            data,
            bra_low: bra.lowered_positions(),
            ket_low: ket.lowered_positions(),
            bra_sqrt: sqrt_table(bra),
            ket_sqrt: sqrt_table(ket),
            dim: bra.dim(),
        }
    }

    /// Value of the target entry `(bi, ki)` through the bra-raising
    /// recurrence in slot `j`; the target's bra index must have a nonzero
    /// entry `j`.
    fn raise_bra(&self, values: &CMatrix, bi: usize, ki: usize, j: usize) -> C64 {
        let base = self.bra_low[bi][j].expect("caller checked the slot is lowerable");
        let mut acc = self.data.u_vec[j] * values[(base, ki)];
        for k in 0..self.dim {
            if let Some(kl) = self.ket_low[ki][k] {
                acc += self.data.f_mat[(j, k)] * self.ket_sqrt[ki][k] * values[(base, kl)];
            }
            if let Some(bl) = self.bra_low[base][k] {
                acc -= self.data.g_mat[(j, k)] * self.bra_sqrt[base][k] * values[(bl, ki)];
            }
        }
        acc / self.bra_sqrt[bi][j]
    }

    /// Value of the target entry through the ket-raising recurrence in
    /// slot `k`.
    fn raise_ket(&self, values: &CMatrix, bi: usize, ki: usize, k: usize) -> C64 {
        let base = self.ket_low[ki][k].expect("caller checked the slot is lowerable");
        let mut acc = self.data.u_vec_p[k] * values[(bi, base)];
        for j in 0..self.dim {
            if let Some(kl) = self.ket_low[base][j] {
                acc += self.data.g_mat_p[(k, j)] * self.ket_sqrt[base][j] * values[(bi, kl)];
            }
            if let Some(bl) = self.bra_low[bi][j] {
                acc += self.data.f_mat_p[(k, j)] * self.bra_sqrt[bi][j] * values[(bl, base)];
            }
        }
        acc / self.ket_sqrt[ki][k]
    }
}

/// Builds the overlap matrix over explicit (downward-closed) index sets.
pub fn build_overlap_matrix(
    bra_params: &GaussianParams,
    ket_params: &GaussianParams,
    bra: &IndexSet,
    ket: &IndexSet,
    opts: &BuildOptions,
) -> Result<OverlapMatrix> {
    if bra.dim() != bra_params.dim() || ket.dim() != ket_params.dim() {
        return Err(Error::InvalidArgument(format!(
            "index-set dimensions ({}, {}) do not match parameter dimensions ({}, {})",
            bra.dim(),
            ket.dim(),
            bra_params.dim(),
            ket_params.dim()
        )));
    }
    let data = compute_bogoliubov(bra_params, ket_params)?;
    let seed = match opts.seed {
        Some(seed) => seed,
        None => gaussian_overlap(bra_params, ket_params)?,
    };

    let rec = Recursion::new(&data, bra, ket);
    let mut values = CMatrix::zeros(bra.len(), ket.len());
    values[(0, 0)] = seed;

    let group_by_shell = |set: &IndexSet| -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); set.max_shell() as usize + 1];
        for (i, k) in set.iter().enumerate() {
            groups[k.shell() as usize].push(i);
        }
        groups
    };
    let bra_shells = group_by_shell(bra);
    let ket_shells = group_by_shell(ket);
    let max_sum = bra.max_shell() + ket.max_shell();

    let mut spread: f64 = 0.0;
    for s in 1..=max_sum {
        for a in 0..=s.min(bra.max_shell()) {
            let Some(b) = s.checked_sub(a).filter(|&b| b <= ket.max_shell()) else {
                continue;
            };
            for &bi in &bra_shells[a as usize] {
                for &ki in &ket_shells[b as usize] {
                    let value = match opts.fill {
                        FillMode::Canonical => {
                            if let Some(j) = bra.get(bi).first_nonzero() {
                                rec.raise_bra(&values, bi, ki, j)
                            } else {
                                let k = ket
                                    .get(ki)
                                    .first_nonzero()
                                    .expect("shell sum > 0 means one side is excited");
                                rec.raise_ket(&values, bi, ki, k)
                            }
                        }
                        FillMode::Symmetrized => {
                            let mut candidates: Vec<C64> = Vec::new();
                            for j in 0..rec.dim {
                                if bra.get(bi).entry(j) > 0 {
                                    candidates.push(rec.raise_bra(&values, bi, ki, j));
                                }
                            }
                            for k in 0..rec.dim {
                                if ket.get(ki).entry(k) > 0 {
                                    candidates.push(rec.raise_ket(&values, bi, ki, k));
                                }
                            }
                            for pair in candidates.iter().enumerate() {
                                for other in &candidates[pair.0 + 1..] {
                                    spread = spread.max((pair.1 - other).norm());
                                }
                            }
                            candidates.iter().sum::<C64>() / candidates.len() as f64
                        }
                    };
                    values[(bi, ki)] = value;
                }
            }
        }
    }

    Ok(OverlapMatrix {
        bra_params: bra_params.clone(),
        ket_params: ket_params.clone(),
        bra: bra.clone(),
        ket: ket.clone(),
        values,
        rederivation_spread: matches!(opts.fill, FillMode::Symmetrized).then_some(spread),
    })
}

/// Simplex-cut convenience wrapper around [`build_overlap_matrix`].
pub fn overlap_matrix_simplex(
    bra_params: &GaussianParams,
    ket_params: &GaussianParams,
    jmax: u32,
    kmax: u32,
) -> Result<OverlapMatrix> {
    build_overlap_matrix(
        bra_params,
        ket_params,
        &IndexSet::simplex(bra_params.dim(), jmax),
        &IndexSet::simplex(ket_params.dim(), kmax),
        &BuildOptions::default(),
    )
}

/// One-dimensional specialization: the recurrences collapse to scalar
/// three-term relations.
pub fn overlap_1d(
    bra_params: &GaussianParams,
    ket_params: &GaussianParams,
    jmax: u32,
    kmax: u32,
) -> Result<OverlapMatrix> {
    if bra_params.dim() != 1 || ket_params.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "one-dimensional specialization called with dimensions {} and {}",
            bra_params.dim(),
            ket_params.dim()
        )));
    }
    let data = compute_bogoliubov(bra_params, ket_params)?;
    let u = data.u_mat[(0, 0)];
    let v = data.v_mat[(0, 0)];
    let w = data.w_vec[0];
    let w_p = data.w_vec_p[0];
    let u_sq = u.norm_sqr();

    let rows = jmax as usize + 1;
    let cols = kmax as usize + 1;
    let mut m = CMatrix::zeros(rows, cols);
    m[(0, 0)] = gaussian_overlap(bra_params, ket_params)?;
    let sq = |n: usize| (n as f64).sqrt();
    let at = |m: &CMatrix, j: isize, k: isize| -> C64 {
        if j < 0 || k < 0 {
            C64::new(0.0, 0.0)
        } else {
            m[(j as usize, k as usize)]
        }
    };
    for s in 1..rows + cols - 1 {
        for j in 0..rows.min(s + 1) {
            let k = s - j;
            if k >= cols {
                continue;
            }
            let (ji, ki) = (j as isize, k as isize);
            m[(j, k)] = if j > 0 {
                (u.conj() * sq(k) * at(&m, ji - 1, ki - 1)
                    - v * u.conj() * sq(j - 1) * at(&m, ji - 2, ki)
                    + w * at(&m, ji - 1, ki))
                    / (sq(j) * u_sq)
            } else {
                (v.conj() * u.conj() * sq(k - 1) * at(&m, ji, ki - 2)
                    + w_p * at(&m, ji, ki - 1))
                    / (sq(k) * u_sq)
            };
        }
    }
    Ok(OverlapMatrix {
        bra_params: bra_params.clone(),
        ket_params: ket_params.clone(),
        bra: IndexSet::simplex(1, jmax),
        ket: IndexSet::simplex(1, kmax),
        values: m,
        rederivation_spread: None,
    })
}

/// Nonrecursive overlaps of the zeroth through second shells, written
/// directly in terms of the transform data and the Gaussian-Gaussian
/// overlap. Symmetric tensors take the symmetric average of their two
/// equivalent derivations.
#[derive(Clone, Debug)]
pub struct ClosedFormShells {
    pub dim: usize,
    pub m00: C64,
    /// `[j]` -> bra shell 1 against ket shell 0.
    pub m10: CVector,
    /// `[k]` -> bra shell 0 against ket shell 1.
    pub m01: CVector,
    /// `[(j, k)]` -> single bra excitation j against single ket excitation k.
    pub m11: CMatrix,
    /// `[(j, k)]` -> double bra excitation (j, k) against the ket ground state.
    pub m20: CMatrix,
    /// `[(j, k)]` -> bra ground state against double ket excitation (j, k).
    pub m02: CMatrix,
    /// `[l][(j, k)]` -> bra (j, k) against ket l.
    pub m21: Vec<CMatrix>,
    /// `[j][(k, l)]` -> bra j against ket (k, l).
    pub m12: Vec<CMatrix>,
    /// `[j][l][(k, m)]` -> bra (j, l) against ket (k, m).
    pub m22: Vec<Vec<CMatrix>>,
}

pub fn closed_form_shells(
    bra_params: &GaussianParams,
    ket_params: &GaussianParams,
) -> Result<ClosedFormShells> {
    let data = compute_bogoliubov(bra_params, ket_params)?;
    let m00 = gaussian_overlap(bra_params, ket_params)?;
    let d = bra_params.dim();
    let u = &data.u_vec;
    let u_p = &data.u_vec_p;
    let f = &data.f_mat;

    let m10 = u * m00;
    let m01 = u_p * m00;
    let f_uu = f + u * u_p.transpose();
    let m11 = &f_uu * m00;

    let scale = |j: usize, k: usize| if j == k { std::f64::consts::SQRT_2 } else { 1.0 };
    let b20 = -&data.g_mat + u * u.transpose();
    let b20 = (&b20 + b20.transpose()) * C64::new(0.5, 0.0);
    let m20 = CMatrix::from_fn(d, d, |j, k| b20[(j, k)] * m00 / scale(j, k));
    let b02 = &data.g_mat_p + u_p * u_p.transpose();
    let b02 = (&b02 + b02.transpose()) * C64::new(0.5, 0.0);
    let m02 = CMatrix::from_fn(d, d, |j, k| b02[(j, k)] * m00 / scale(j, k));

    let g = &data.g_mat;
    let raw21 = |j: usize, k: usize, l: usize| -> C64 {
        (f[(k, l)] * u[j] - g[(k, j)] * u_p[l] + u[k] * f_uu[(j, l)]) * m00
    };
    let m21: Vec<CMatrix> = (0..d)
        .map(|l| {
            CMatrix::from_fn(d, d, |j, k| {
                (raw21(j, k, l) + raw21(k, j, l)) * 0.5 / scale(j, k)
            })
        })
        .collect();

    let f_p = &data.f_mat_p;
    let g_p = &data.g_mat_p;
    let raw12 = |j: usize, k: usize, l: usize| -> C64 {
        (g_p[(l, k)] * u[j] + f_p[(l, j)] * u_p[k] + u_p[l] * f_uu[(j, k)]) * m00
    };
    let m12: Vec<CMatrix> = (0..d)
        .map(|j| {
            CMatrix::from_fn(d, d, |k, l| {
                (raw12(j, k, l) + raw12(j, l, k)) * 0.5 / scale(k, l)
            })
        })
        .collect();

    // raise the bra a second time on top of the (1, 2)-shell block
    let raw22 = |j: usize, l: usize, k: usize, m: usize| -> C64 {
        let lead = if k == m {
            f[(l, k)] * std::f64::consts::SQRT_2 * m11[(j, k)]
        } else {
            f[(l, k)] * m11[(j, m)] + f[(l, m)] * m11[(j, k)]
        };
        lead - g[(l, j)] * m02[(k, m)] + u[l] * m12[j][(k, m)]
    };
    let m22: Vec<Vec<CMatrix>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|l| {
                    CMatrix::from_fn(d, d, |k, m| {
                        (raw22(j, l, k, m) + raw22(l, j, k, m)) * 0.5 / scale(j, l)
                    })
                })
                .collect()
        })
        .collect();

    Ok(ClosedFormShells {
        dim: d,
        m00,
        m10,
        m01,
        m11,
        m20,
        m02,
        m21,
        m12,
        m22,
    })
}

impl ClosedFormShells {
    fn unit(&self, j: usize) -> MultiIndex {
        MultiIndex::zero(self.dim).raised(j)
    }

    fn unit2(&self, j: usize, k: usize) -> MultiIndex {
        self.unit(j).raised(k)
    }

    /// Every covered (bra index, ket index, value) triple, each pair once.
    pub fn entries(&self) -> Vec<(MultiIndex, MultiIndex, C64)> {
        let d = self.dim;
        let zero = MultiIndex::zero(d);
        let mut out = Vec::new();
        for j in 0..d {
            out.push((self.unit(j), zero.clone(), self.m10[j]));
            out.push((zero.clone(), self.unit(j), self.m01[j]));
        }
        for j in 0..d {
            for k in 0..d {
                out.push((self.unit(j), self.unit(k), self.m11[(j, k)]));
            }
        }
        for j in 0..d {
            for k in j..d {
                out.push((self.unit2(j, k), zero.clone(), self.m20[(j, k)]));
                out.push((zero.clone(), self.unit2(j, k), self.m02[(j, k)]));
            }
        }
        for l in 0..d {
            for j in 0..d {
                for k in j..d {
                    out.push((self.unit2(j, k), self.unit(l), self.m21[l][(j, k)]));
                }
            }
        }
        for j in 0..d {
            for k in 0..d {
                for l in k..d {
                    out.push((self.unit(j), self.unit2(k, l), self.m12[j][(k, l)]));
                }
            }
        }
        for j in 0..d {
            for l in j..d {
                for k in 0..d {
                    for m in k..d {
                        out.push((self.unit2(j, l), self.unit2(k, m), self.m22[j][l][(k, m)]));
                    }
                }
            }
        }
        out
    }
}

/// Residuals of the coupled shell-raising equation system evaluated on a
/// computed matrix; a consistency diagnostic for the recursion.
#[derive(Clone, Debug)]
pub struct SystemResidualReport {
    pub max_residual: f64,
    pub entries_checked: usize,
}

/// Plugs the computed entries back into the coupled 2D-equation system the
/// recursion solves, for every pair whose raised neighbours are all inside
/// the matrix cuts and whose shell sum is at most `max_shell_sum`.
pub fn two_d_system_residual(
    m: &OverlapMatrix,
    max_shell_sum: u32,
) -> Result<SystemResidualReport> {
    let data = compute_bogoliubov(m.bra_params(), m.ket_params())?;
    let d = m.bra_set().dim();
    let u_dag = data.u_mat.adjoint();
    let v_t = data.v_mat.transpose();
    let u_bar = data.u_mat.conjugate();
    let v_bar = data.v_mat.conjugate();
    let mut max_residual: f64 = 0.0;
    let mut checked = 0usize;

    for bra_idx in m.bra_set().iter() {
        for ket_idx in m.ket_set().iter() {
            if bra_idx.shell() + ket_idx.shell() > max_shell_sum {
                continue;
            }
            let raised_present = (0..d).all(|j| {
                m.bra_set().contains(&bra_idx.raised(j)) && m.ket_set().contains(&ket_idx.raised(j))
            });
            if !raised_present {
                continue;
            }
            checked += 1;
            let val = |b: &MultiIndex, k: &MultiIndex| -> C64 {
                m.get(b, k).unwrap_or_else(|| C64::new(0.0, 0.0))
            };
            let lowered_val = |idx: &MultiIndex, slot: usize, other: &MultiIndex, bra_side: bool| {
                idx.lowered(slot)
                    .map(|low| {
                        if bra_side {
                            val(&low, other)
                        } else {
                            val(other, &low)
                        }
                    })
                    .unwrap_or_else(|| C64::new(0.0, 0.0))
            };
            // bra-raising equations
            for j in 0..d {
                let lhs = ((bra_idx.entry(j) + 1) as f64).sqrt() * val(&bra_idx.raised(j), ket_idx);
                let mut rhs = data.v_vec_p[j] * val(bra_idx, ket_idx);
                for k in 0..d {
                    rhs += u_dag[(j, k)]
                        * (ket_idx.entry(k) as f64).sqrt()
                        * lowered_val(ket_idx, k, bra_idx, false);
                    rhs -= v_t[(j, k)]
                        * ((ket_idx.entry(k) + 1) as f64).sqrt()
                        * val(bra_idx, &ket_idx.raised(k));
                }
                max_residual = max_residual.max((lhs - rhs).norm());
            }
            // ket-raising equations
            for k in 0..d {
                let lhs = ((ket_idx.entry(k) + 1) as f64).sqrt() * val(bra_idx, &ket_idx.raised(k));
                let mut rhs = data.v_vec.conjugate()[k] * val(bra_idx, ket_idx);
                for j in 0..d {
                    rhs += v_bar[(k, j)]
                        * ((bra_idx.entry(j) + 1) as f64).sqrt()
                        * val(&bra_idx.raised(j), ket_idx);
                    rhs += u_bar[(k, j)]
                        * (bra_idx.entry(j) as f64).sqrt()
                        * lowered_val(bra_idx, j, ket_idx, true);
                }
                max_residual = max_residual.max((lhs - rhs).norm());
            }
        }
    }
    Ok(SystemResidualReport {
        max_residual,
        entries_checked: checked,
    })
}

/// Scalar product of two wavepackets through the overlap matrix of their
/// guiding Gaussians; collapses to the coefficient inner product when both
/// share one Gaussian.
pub fn wavepacket_overlap(h: &HagedornWavepacket, hp: &HagedornWavepacket) -> Result<C64> {
    crate::gaussian::check_pair(h.params(), hp.params())?;
    if h.params() == hp.params() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in h.coeffs() {
            if let Some(cp) = hp.coeff(k) {
                acc += c.conj() * cp;
            }
        }
        return Ok(acc);
    }
    let bra_set = IndexSet::simplex(h.dim(), h.max_shell());
    let ket_set = IndexSet::simplex(hp.dim(), hp.max_shell());
    let m = build_overlap_matrix(
        h.params(),
        hp.params(),
        &bra_set,
        &ket_set,
        &BuildOptions::default(),
    )?;
    wavepacket_overlap_with(&m, h, hp)
}

/// Scalar product through a prebuilt overlap matrix (reusable across many
/// coefficient vectors for the same Gaussian pair).
pub fn wavepacket_overlap_with(
    m: &OverlapMatrix,
    h: &HagedornWavepacket,
    hp: &HagedornWavepacket,
) -> Result<C64> {
    let c = coefficient_vector(h, m.bra_set(), "bra")?;
    let cp = coefficient_vector(hp, m.ket_set(), "ket")?;
    Ok((c.adjoint() * m.values() * cp)[(0, 0)])
}

fn coefficient_vector(
    h: &HagedornWavepacket,
    set: &IndexSet,
    side: &str,
) -> Result<CVector> {
    let mut out = CVector::zeros(set.len());
    for (k, c) in h.coeffs() {
        let Some(pos) = set.position(k) else {
            return Err(Error::InvalidArgument(format!(
                "{side} coefficient support exceeds the matrix cut: index {k} (shell {}) needs a cut of at least {}",
                k.shell(),
                k.shell()
            )));
        };
        out[pos] = *c;
    }
    Ok(out)
}
