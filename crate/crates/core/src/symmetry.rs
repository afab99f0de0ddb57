//! Symmetric backbone cuts, slices, central loops, slice swapping and the
//! bound on how many symmetric structures a search may meet.
//!
//! A bond `x` is the covalent link between bases `x` and `x + 1` inside one
//! strand; there are `N - c` of them.

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::strands::{divisors, Base, PairingRule, StrandOrdering};
use crate::structure::{
    is_connected, is_invariant_under, is_unpseudoknotted, loop_decomposition, segment_length, LoopKind, SecondaryStructure, StructureError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("degree {r} does not divide the maximum symmetry degree {v}")]
    BadDegree { r: usize, v: usize },
    #[error("{0} is not a covalent bond")]
    NotABond(usize),
    #[error("structure is not {0}-fold symmetric")]
    NotSymmetric(usize),
    #[error("cut is not admissible for the structure")]
    NotAdmissible,
    #[error("no admissible cut exists")]
    NoAdmissibleCut,
    #[error("the two structures are identical")]
    Identical,
    #[error("the structures do not share the same central interior loop")]
    CentralMismatch,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Canonical cut identity: degree and smallest bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CutKey {
    pub r: usize,
    pub min_bond: usize,
}

/// The orbit of one bond under rotation by `N / r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetricCut {
    pub r: usize,
    /// Ascending bond positions.
    pub bonds: Vec<usize>,
}

impl SymmetricCut {
    pub fn key(&self) -> CutKey {
        CutKey { r: self.r, min_bond: self.bonds[0] }
    }

    pub fn generator(&self) -> usize {
        self.bonds[0]
    }
}

pub fn is_bond(ordering: &StrandOrdering, x: usize) -> bool {
    x >= 1 && x < ordering.len() && !ordering.nick_after(x)
}

/// Orbit of bond `x` under the order-`r` rotation subgroup.
pub fn generate_cut(x: usize, r: usize, ordering: &StrandOrdering) -> Result<SymmetricCut, SymmetryError> {
    let v = ordering.max_symmetry();
    if r < 2 || v % r != 0 {
        return Err(SymmetryError::BadDegree { r, v });
    }
    if !is_bond(ordering, x) {
        return Err(SymmetryError::NotABond(x));
    }
    let shift = ordering.len() / r;
    let mut bonds: Vec<usize> = (0..r).map(|k| ordering.rotate_index(x, k * shift)).collect();
    bonds.sort_unstable();
    Ok(SymmetricCut { r, bonds })
}

/// Every distinct cut over all degrees `r > 1` dividing `v`, ordered by
/// degree then smallest bond.
pub fn enumerate_cuts(ordering: &StrandOrdering) -> Vec<SymmetricCut> {
    let v = ordering.max_symmetry();
    let n = ordering.len();
    let mut out = Vec::new();
    for r in divisors(v).into_iter().filter(|&r| r > 1) {
        let mut seen = vec![false; n + 1];
        for x in 1..n {
            if !is_bond(ordering, x) || seen[x] {
                continue;
            }
            let cut = generate_cut(x, r, ordering).expect("valid bond and degree");
            for &b in &cut.bonds {
                seen[b] = true;
            }
            out.push(cut);
        }
    }
    out
}

/// `(N - c) / v * (sigma(v) - v)`.
pub fn cut_count_formula(n: usize, c: usize, v: usize) -> usize {
    let sigma: usize = divisors(v).iter().sum();
    (n - c) * (sigma - v) / v
}

/// Bonds `x` lying inside the shorter arc of some pair; on a tie the arc
/// `i..j` counts.
pub fn enclosed_bonds(s: &SecondaryStructure) -> Vec<bool> {
    let n = s.len();
    let mut diff = vec![0i32; n + 2];
    let mut mark = |lo: usize, hi: usize| {
        // bonds lo..=hi
        if lo <= hi {
            diff[lo] += 1;
            diff[hi + 1] -= 1;
        }
    };
    for &(i, j) in s.pairs() {
        let direct = j - i + 1;
        if direct <= n - (j - i) + 1 {
            mark(i, j - 1);
        } else {
            mark(j, n - 1);
            if i >= 2 {
                mark(1, i - 1);
            }
        }
    }
    let mut acc = 0;
    let mut out = vec![false; n + 1];
    for (x, slot) in out.iter_mut().enumerate().take(n).skip(1) {
        acc += diff[x];
        *slot = acc > 0;
    }
    out
}

/// No cut bond is enclosed by a pair.
pub fn is_admissible(cut: &SymmetricCut, s: &SecondaryStructure) -> bool {
    let enclosed = enclosed_bonds(s);
    cut.bonds.iter().all(|&b| !enclosed[b])
}

/// All admissible cuts of degree `r`.
pub fn admissible_cuts(s: &SecondaryStructure, r: usize, ordering: &StrandOrdering) -> Vec<SymmetricCut> {
    let enclosed = enclosed_bonds(s);
    enumerate_cuts(ordering)
        .into_iter()
        .filter(|c| c.r == r && c.bonds.iter().all(|&b| !enclosed[b]))
        .collect()
}

/// Builds an admissible cut next to a pair of maximal span.
pub fn find_admissible_cut(s: &SecondaryStructure, r: usize, ordering: &StrandOrdering) -> Result<SymmetricCut, SymmetryError> {
    let n = ordering.len();
    let v = ordering.max_symmetry();
    if r < 2 || v % r != 0 {
        return Err(SymmetryError::BadDegree { r, v });
    }
    if !is_invariant_under(&s.pair_table(), s.pairs(), n, n / r) {
        return Err(SymmetryError::NotSymmetric(r));
    }
    let enclosed = enclosed_bonds(s);
    let widest = s.pairs().iter().copied().max_by_key(|&(i, j)| (segment_length(i, j, n), std::cmp::Reverse(i)));
    let mut candidates = Vec::new();
    if let Some((i, j)) = widest {
        if j - i + 1 <= n - (j - i) + 1 {
            candidates.extend([i.wrapping_sub(1), j]);
        } else {
            candidates.extend([j.wrapping_sub(1), i]);
        }
    }
    for x in candidates.into_iter().chain(1..n) {
        if is_bond(ordering, x) && !enclosed[x] {
            let cut = generate_cut(x, r, ordering)?;
            if cut.bonds.iter().all(|&b| !enclosed[b]) {
                return Ok(cut);
            }
        }
    }
    Err(SymmetryError::NoAdmissibleCut)
}

/// One of the `R` pieces left after removing the cut bonds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Slice {
    /// First base; the slice runs for `len` bases, wrapping past `N`.
    pub start: usize,
    pub len: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Slice {
    pub fn contains(&self, x: usize, n: usize) -> bool {
        (x + n - self.start) % n < self.len
    }

    pub fn bases(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| (self.start - 1 + k) % n + 1)
    }
}

fn require_admissible(s: &SecondaryStructure, cut: &SymmetricCut, ordering: &StrandOrdering) -> Result<(), SymmetryError> {
    let n = ordering.len();
    if !is_invariant_under(&s.pair_table(), s.pairs(), n, n / cut.r) {
        return Err(SymmetryError::NotSymmetric(cut.r));
    }
    if !is_admissible(cut, s) {
        return Err(SymmetryError::NotAdmissible);
    }
    Ok(())
}

/// Slices in order, the first starting right after the generator bond.
pub fn slices(s: &SecondaryStructure, cut: &SymmetricCut, ordering: &StrandOrdering) -> Result<Vec<Slice>, SymmetryError> {
    require_admissible(s, cut, ordering)?;
    let n = ordering.len();
    let len = n / cut.r;
    let mut out: Vec<Slice> = cut.bonds.iter().map(|&b| Slice { start: b % n + 1, len, pairs: Vec::new() }).collect();
    for &(i, j) in s.pairs() {
        let k = out.iter().position(|sl| sl.contains(i, n) && sl.contains(j, n)).ok_or(SymmetryError::NotAdmissible)?;
        out[k].pairs.push((i, j));
    }
    Ok(out)
}

/// Vertex sets of the polymer graph after deleting the cut bonds (and the
/// nicks), each sorted ascending; components ordered by smallest vertex.
pub fn components_after_cut(s: &SecondaryStructure, cut: &SymmetricCut, ordering: &StrandOrdering) -> Vec<Vec<usize>> {
    let n = ordering.len();
    let mut uf = UnionFind::<usize>::new(n + 1);
    for x in 1..n {
        if is_bond(ordering, x) && cut.bonds.binary_search(&x).is_err() {
            uf.union(x, x + 1);
        }
    }
    for &(i, j) in s.pairs() {
        uf.union(i, j);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for x in 1..=n {
        groups.entry(uf.find(x)).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralLoop {
    pub kind: LoopKind,
    /// Bordering pairs, closing pair first.
    pub bordering: Vec<(usize, usize)>,
    pub bonds: Vec<usize>,
}

/// The face that carries every cut bond.
pub fn central_loop(s: &SecondaryStructure, cut: &SymmetricCut, ordering: &StrandOrdering) -> Result<CentralLoop, SymmetryError> {
    require_admissible(s, cut, ordering)?;
    let loops = loop_decomposition(s, ordering)?;
    let lp = loops
        .into_iter()
        .find(|l| cut.bonds.iter().all(|b| l.arcs.contains(b)))
        .ok_or(SymmetryError::NotAdmissible)?;
    Ok(CentralLoop { kind: lp.kind, bordering: lp.bordering().collect(), bonds: cut.bonds.clone() })
}

/// Replaces the slice after the generator bond of `s_i` by the same slice of
/// `s_j`.
pub fn slice_and_swap(
    s_i: &SecondaryStructure,
    s_j: &SecondaryStructure,
    cut: &SymmetricCut,
    ordering: &StrandOrdering,
) -> Result<SecondaryStructure, SymmetryError> {
    if s_i == s_j {
        return Err(SymmetryError::Identical);
    }
    let a = slices(s_i, cut, ordering)?;
    let b = slices(s_j, cut, ordering)?;
    if cut.r == 2 {
        let ci = central_loop(s_i, cut, ordering)?;
        let cj = central_loop(s_j, cut, ordering)?;
        let interior = |k: LoopKind| k != LoopKind::Multiloop;
        if (interior(ci.kind) || interior(cj.kind)) && ci.bordering != cj.bordering {
            return Err(SymmetryError::CentralMismatch);
        }
    }
    let n = ordering.len();
    let swapped = &a[0];
    let mut pairs: Vec<(usize, usize)> = s_i.pairs().iter().copied().filter(|&(i, _)| !swapped.contains(i, n)).collect();
    pairs.extend(b[0].pairs.iter().copied());
    Ok(SecondaryStructure::from_pairs(n, pairs)?)
}

/// Terms of the bound on distinct symmetric structures met by one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    pub cut_term: usize,
    pub interior_term: usize,
    pub total: usize,
}

/// Cut count plus, when every strand type occurs an even number of times,
/// the number of possible central interior loops.
pub fn upper_bound(ordering: &StrandOrdering, rule: PairingRule) -> UpperBound {
    let n = ordering.len();
    let c = ordering.strand_count();
    let v = ordering.max_symmetry();
    let cut_term = cut_count_formula(n, c, v);
    let types = ordering.type_string();
    let mut counts = std::collections::BTreeMap::new();
    for &t in types {
        *counts.entry(t).or_insert(0usize) += 1;
    }
    let all_even = counts.values().all(|&k| k % 2 == 0);
    let interior_term = if all_even && v % 2 == 0 {
        let starts = ordering.strand_starts();
        (0..c / 2)
            .map(|k| {
                let lo = starts[k];
                let hi = if k + 1 < c { starts[k + 1] } else { n + 1 };
                let count = |b: Base| (lo..hi).filter(|&x| ordering.base(x) == b).count();
                let (a, t, g, cc) = (count(Base::A), count(Base::T), count(Base::G), count(Base::C));
                a * t + g * cc + if rule.wobble { g * t } else { 0 }
            })
            .sum()
    } else {
        0
    };
    UpperBound { cut_term, interior_term, total: cut_term + interior_term }
}

/// Basic sanity for a structure handed to the toolkit.
pub fn check_structure(s: &SecondaryStructure, ordering: &StrandOrdering) -> Result<(), SymmetryError> {
    if !is_unpseudoknotted(s) {
        return Err(StructureError::Pseudoknotted.into());
    }
    if !is_connected(s, ordering) {
        return Err(StructureError::Disconnected.into());
    }
    Ok(())
}
