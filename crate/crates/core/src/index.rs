//! Multi-indices labelling basis excitations and the index sets used to
//! truncate a basis.
//!
//! The canonical ordering everywhere (matrices, files, iteration) is graded
//! lexicographic: indices are sorted by total excitation first, ties broken
//! lexicographically on the entries.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A D-tuple of non-negative excitation numbers.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    entries: SmallVec<[u32; 8]>,
}

impl MultiIndex {
    pub fn new(entries: impl IntoIterator<Item = u32>) -> Self {
        Self { entries: entries.into_iter().collect() }
    }

    /// The all-zero index in `dim` dimensions (the ground state).
    pub fn zero(dim: usize) -> Self {
        Self { entries: smallvec::smallvec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total excitation |K| = K_1 + ... + K_D.
    pub fn shell(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn entry(&self, j: usize) -> u32 {
        self.entries[j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Index with entry `j` incremented.
    pub fn raised(&self, j: usize) -> Self {
        let mut out = self.clone();
        out.entries[j] += 1;
        out
    }

    /// Index with entry `j` decremented; `None` if that entry is already 0.
    pub fn lowered(&self, j: usize) -> Option<Self> {
        if self.entries[j] == 0 {
            return None;
        }
        let mut out = self.clone();
        out.entries[j] -= 1;
        Some(out)
    }

    /// Position of the first nonzero entry, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.entries.iter().position(|&k| k > 0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shell()
            .cmp(&other.shell())
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dash-joined entries, e.g. `2-0-1`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in &self.entries {
            if !first {
                write!(f, "-")?;
            }
            write!(f, "{k}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries: std::result::Result<SmallVec<[u32; 8]>, _> =
            s.split('-').map(|tok| tok.trim().parse::<u32>()).collect();
        match entries {
            Ok(entries) if !entries.is_empty() => Ok(Self { entries }),
            _ => Err(Error::InvalidArgument(format!(
                "cannot parse multi-index from {s:?}; expected dash-joined non-negative integers"
            ))),
        }
    }
}

/// Truncation rule for a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisCut {
    /// All K with |K| <= max.
    Simplex(u32),
    /// All K with every component <= max.
    Rectangle(u32),
}

impl BasisCut {
    pub fn contains(&self, k: &MultiIndex) -> bool {
        match self {
            BasisCut::Simplex(max) => k.shell() <= *max,
            BasisCut::Rectangle(max) => k.entries().iter().all(|&e| e <= *max),
        }
    }
}

/// All multi-indices with |K| <= `kmax` in `dim` dimensions, graded-lex
/// ordered. The count is binomial(kmax + dim, dim).
pub fn enumerate_simplex(dim: usize, kmax: u32) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(simplex_len(dim, kmax));
    let mut scratch: SmallVec<[u32; 8]> = smallvec::smallvec![0; dim];
    for shell in 0..=kmax {
        compositions(&mut scratch, 0, shell, &mut out);
    }
    out
}

/// All multi-indices with every component <= `cmax`, graded-lex ordered.
pub fn enumerate_rectangle(dim: usize, cmax: u32) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity((cmax as usize + 1).pow(dim as u32));
    let mut scratch: SmallVec<[u32; 8]> = smallvec::smallvec![0; dim];
    loop {
        out.push(MultiIndex { entries: scratch.clone() });
        // odometer increment
        let mut j = dim;
        loop {
            if j == 0 {
                out.sort();
                return out;
            }
            j -= 1;
            if scratch[j] < cmax {
                scratch[j] += 1;
                break;
            }
            scratch[j] = 0;
        }
    }
}

/// Number of indices in the simplex cut: binomial(kmax + dim, dim).
pub fn simplex_len(dim: usize, kmax: u32) -> usize {
    binomial(kmax as usize + dim, dim)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Lexicographically ascending compositions of `rest` into the tail of
/// `scratch` starting at `pos`.
fn compositions(
    scratch: &mut SmallVec<[u32; 8]>,
    pos: usize,
    rest: u32,
    out: &mut Vec<MultiIndex>,
) {
    if pos == scratch.len() - 1 {
        scratch[pos] = rest;
        out.push(MultiIndex { entries: scratch.clone() });
        return;
    }
    for v in 0..=rest {
        scratch[pos] = v;
        compositions(scratch, pos + 1, rest - v, out);
    }
    scratch[pos] = 0;
}

/// An ordered, downward-closed set of multi-indices with O(1) position
/// lookup. Downward closure (K in the set implies every lowered index is
/// too) is what makes the shell recursions well-posed.
#[derive(Clone, Debug)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl IndexSet {
    pub fn simplex(dim: usize, kmax: u32) -> Self {
        Self::from_sorted(dim, enumerate_simplex(dim, kmax))
    }

    pub fn rectangle(dim: usize, cmax: u32) -> Self {
        Self::from_sorted(dim, enumerate_rectangle(dim, cmax))
    }

    pub fn from_cut(dim: usize, cut: BasisCut) -> Self {
        match cut {
            BasisCut::Simplex(kmax) => Self::simplex(dim, kmax),
            BasisCut::Rectangle(cmax) => Self::rectangle(dim, cmax),
        }
    }

    /// Builds a set from arbitrary indices, sorting them graded-lex.
    /// Rejects duplicates, mixed dimensions, and sets that are not
    /// downward closed.
    pub fn from_indices(indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut indices: Vec<MultiIndex> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::InvalidArgument("index set is empty".into()));
        }
        let dim = indices[0].dim();
        if indices.iter().any(|k| k.dim() != dim) {
            return Err(Error::InvalidArgument("index set mixes dimensions".into()));
        }
        indices.sort();
        let set = Self::from_sorted(dim, indices);
        if set.positions.len() != set.indices.len() {
            return Err(Error::InvalidArgument("index set contains duplicates".into()));
        }
        for k in &set.indices {
            for j in 0..dim {
                if let Some(lower) = k.lowered(j) {
                    if !set.contains(&lower) {
                        return Err(Error::InvalidArgument(format!(
                            "index set is not downward closed: contains {k} but not {lower}"
                        )));
                    }
                }
            }
        }
        Ok(set)
    }

    fn from_sorted(dim: usize, indices: Vec<MultiIndex>) -> Self {
        let positions = indices
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Self { dim, indices, positions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.positions.get(k).copied()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.positions.contains_key(k)
    }

    pub fn max_shell(&self) -> u32 {
        self.indices.iter().map(MultiIndex::shell).max().unwrap_or(0)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    /// `table[i][j]` is the position of `indices[i]` lowered in slot `j`,
    /// or `None` at the boundary. Precomputed once so the recursions can
    /// run on plain array lookups.
    pub fn lowered_positions(&self) -> Vec<Vec<Option<usize>>> {
        self.indices
            .iter()
            .map(|k| {
                (0..self.dim)
                    .map(|j| k.lowered(j).and_then(|lower| self.position(&lower)))
                    .collect()
            })
            .collect()
    }
}
