//! Energy-level search for the symmetry-corrected optimum of one ordering.
//!
//! Structures are scanned in non-decreasing naive energy from partially
//! specified structures: a stack of unresolved segments, the pairs formed so
//! far and the energy of completed loops. The search stops at the first
//! asymmetric structure, at the first pair of symmetric structures sharing a
//! cut (or central interior loop), or once the next energy level can no
//! longer beat the best symmetric candidate.

use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use crate::dp::{AuxKind, DpState};
use crate::energy::{association_energy, naive_free_energy, symmetry_penalty, Energy, EnergyBreakdown, EnergyModel, INF};
use crate::strands::{PairingRule, StrandOrdering};
use crate::structure::{is_connected, is_unpseudoknotted, rotational_symmetry, LoopKind, SecondaryStructure};
use crate::symmetry::{admissible_cuts, central_loop, find_admissible_cut, generate_cut, is_admissible, slice_and_swap, upper_bound, CutKey, SymmetricCut};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("no connected structure exists")]
    Infeasible,
    #[error("backtracking needs the auxiliary tensors")]
    TensorsMissing,
    #[error("scanned {scanned} symmetric structures, above the bound {bound}")]
    BoundExceeded { scanned: usize, bound: usize },
    #[error("inconsistent search state: {0}")]
    Inconsistent(String),
}

/// A segment of a partially specified structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Segment {
    /// `[i,j]`, any connected substructure (or empty).
    Free { i: usize, j: usize },
    /// `[i,j]` with `i` paired to `j`.
    Paired { i: usize, j: usize },
    /// `i` pairs `j` closing an interior loop whose bases `k..j-1` are unpaired.
    Interior { i: usize, j: usize, k: usize },
    /// `i` pairs `j` closing a multiloop whose bases `k..j-1` are unpaired.
    MultiClose { i: usize, j: usize, k: usize },
    /// Inside of a multiloop, at least one pair.
    Multi { i: usize, j: usize },
}

impl Segment {
    /// Best energy attainable inside the segment.
    pub fn energy(&self, dp: &DpState) -> Energy {
        match *self {
            Segment::Free { i, j } => dp.m(i, j),
            Segment::Paired { i, j } => dp.mb(i, j),
            Segment::Interior { i, j, k } => dp.aux(AuxKind::BInt, i, j, k - 1),
            Segment::MultiClose { i, j, k } => dp.aux(AuxKind::BMul, i, j, k - 1),
            Segment::Multi { i, j } => dp.mm(i, j),
        }
    }
}

struct Node<T> {
    head: T,
    tail: List<T>,
}

type List<T> = Option<Rc<Node<T>>>;

fn cons<T>(head: T, tail: &List<T>) -> List<T> {
    Some(Rc::new(Node { head, tail: tail.clone() }))
}

fn iter<T>(list: &List<T>) -> impl Iterator<Item = &T> {
    std::iter::successors(list.as_deref(), |n| n.tail.as_deref()).map(|n| &n.head)
}

/// Search node: segment stack, formed pairs, completed-loop energy and the
/// attainable energy.
#[derive(Clone)]
pub struct Partial {
    segments: List<Segment>,
    pairs: List<(usize, usize)>,
    loops: Energy,
    energy: Energy,
}

impl Partial {
    /// The whole strand complex as one free segment.
    pub fn root(dp: &DpState) -> Self {
        let seg = Segment::Free { i: 1, j: dp.len() };
        Partial { segments: cons(seg, &None), pairs: None, loops: 0, energy: seg.energy(dp) }
    }

    /// Attainable energy (loop sum only, no association term).
    pub fn energy(&self) -> Energy {
        self.energy
    }

    /// Recomputes the attainable energy from scratch.
    pub fn attainable(&self, dp: &DpState) -> Energy {
        iter(&self.segments).fold(self.loops, |acc, s| crate::energy::add(acc, s.energy(dp)))
    }

    pub fn is_complete(&self) -> bool {
        self.segments.is_none()
    }

    pub fn segments(&self) -> Vec<Segment> {
        iter(&self.segments).copied().collect()
    }

    pub fn pair_list(&self) -> Vec<(usize, usize)> {
        iter(&self.pairs).copied().collect()
    }

    fn structure(&self, n: usize) -> SecondaryStructure {
        SecondaryStructure::from_pairs(n, self.pair_list()).expect("formed pairs are disjoint")
    }
}

/// Builds the children of one refinement step.
pub struct Refiner<'a, E: EnergyModel + ?Sized> {
    ordering: &'a StrandOrdering,
    dp: &'a DpState,
    model: &'a E,
}

struct Emit<'p> {
    rest: List<Segment>,
    pairs: &'p List<(usize, usize)>,
    loops: Energy,
    h: Energy,
    limit: Energy,
    out: &'p mut Vec<Partial>,
    generated: usize,
}

impl Emit<'_> {
    /// `push` is applied in order, so its last element ends on top.
    fn child(&mut self, push: &[(Segment, Energy)], pair: Option<(usize, usize)>, dl: Energy) {
        if dl >= INF {
            return;
        }
        let mut e = self.h + dl;
        for &(_, v) in push {
            if v >= INF {
                return;
            }
            e += v;
        }
        self.generated += 1;
        if e > self.limit {
            return;
        }
        let mut segments = self.rest.clone();
        for &(s, _) in push {
            if let Segment::Free { i, j } = s {
                if j < i {
                    continue;
                }
            }
            segments = cons(s, &segments);
        }
        let pairs = match pair {
            Some(p) => cons(p, self.pairs),
            None => self.pairs.clone(),
        };
        self.out.push(Partial { segments, pairs, loops: self.loops + dl, energy: e });
    }
}

impl<'a, E: EnergyModel + ?Sized> Refiner<'a, E> {
    pub fn new(ordering: &'a StrandOrdering, dp: &'a DpState, model: &'a E) -> Self {
        Refiner { ordering, dp, model }
    }

    #[inline]
    fn nick(&self, x: usize) -> bool {
        self.ordering.nick_after(x)
    }

    #[inline]
    fn free(&self, a: usize, b: usize) -> bool {
        self.ordering.nicks(a, b) == 0
    }

    /// Pops the top segment of `p` and appends every child with attainable
    /// energy at most `limit` to `out`. Returns the number of children with
    /// finite energy, accepted or not.
    pub fn refine(&self, p: &Partial, limit: Energy, out: &mut Vec<Partial>) -> usize {
        let node = p.segments.as_ref().expect("refine needs a segment");
        let seg = node.head;
        let h = p.energy - seg.energy(self.dp);
        let mut em = Emit { rest: node.tail.clone(), pairs: &p.pairs, loops: p.loops, h, limit, out, generated: 0 };
        let dp = self.dp;
        match seg {
            Segment::Free { i, j } => {
                if j < i {
                    em.child(&[], None, 0);
                } else {
                    if j == i || !self.nick(j - 1) {
                        let s = Segment::Free { i, j: j - 1 };
                        em.child(&[(s, s.energy(dp))], None, 0);
                    }
                    for d in i..j {
                        if d == i || !self.nick(d - 1) {
                            let inner = Segment::Paired { i: d, j };
                            let left = Segment::Free { i, j: d - 1 };
                            em.child(&[(inner, inner.energy(dp)), (left, left.energy(dp))], None, 0);
                        }
                    }
                }
            }
            Segment::Paired { i, j } => {
                if self.free(i, j - 1) {
                    em.child(&[], Some((i, j)), self.model.hairpin(self.ordering, i, j));
                }
                self.interior_children(&mut em, i, j, j);
                self.multi_children(&mut em, i, j, j);
                for x in i..j {
                    if !self.nick(x) {
                        continue;
                    }
                    let guard = (!self.nick(i) && !self.nick(j - 1))
                        || i == j - 1
                        || (x == i && !self.nick(j - 1))
                        || (x == j - 1 && !self.nick(i));
                    if guard {
                        let right = Segment::Free { i: x + 1, j: j - 1 };
                        let left = Segment::Free { i: i + 1, j: x };
                        em.child(&[(right, right.energy(dp)), (left, left.energy(dp))], Some((i, j)), 0);
                    }
                }
            }
            Segment::Interior { i, j, k } => self.interior_children(&mut em, i, j, k),
            Segment::MultiClose { i, j, k } => self.multi_children(&mut em, i, j, k),
            Segment::Multi { i, j } => {
                let nt = self.model.multi().nt;
                let bp = self.model.multi().bp;
                if j > i && !self.nick(j - 1) {
                    let s = Segment::Multi { i, j: j - 1 };
                    em.child(&[(s, s.energy(dp))], None, nt);
                }
                for d in i..j {
                    if d > i && !self.free(i, d - 1) {
                        break;
                    }
                    let s = Segment::Paired { i: d, j };
                    em.child(&[(s, s.energy(dp))], None, bp + (d - i) as Energy * nt);
                }
                for d in i + 1..j {
                    if !self.nick(d - 1) {
                        let inner = Segment::Paired { i: d, j };
                        let left = Segment::Multi { i, j: d - 1 };
                        em.child(&[(inner, inner.energy(dp)), (left, left.energy(dp))], None, bp);
                    }
                }
            }
        }
        em.generated
    }

    /// Children of `[i,j]` closing an interior loop whose bases `k..j-1` are
    /// unpaired.
    fn interior_children(&self, em: &mut Emit<'_>, i: usize, j: usize, k: usize) {
        let dp = self.dp;
        let narrower = Segment::Interior { i, j, k: k - 1 };
        em.child(&[(narrower, narrower.energy(dp))], None, 0);
        let e = k - 1;
        if e < i + 2 || !self.free(e, j - 1) {
            return;
        }
        for d in i + 1..e {
            if !self.free(i, d - 1) {
                break;
            }
            let inner = Segment::Paired { i: d, j: e };
            em.child(&[(inner, inner.energy(dp))], Some((i, j)), self.model.interior(self.ordering, i, d, e, j));
        }
    }

    /// Children of `[i,j]` closing a multiloop whose bases `k..j-1` are
    /// unpaired.
    fn multi_children(&self, em: &mut Emit<'_>, i: usize, j: usize, k: usize) {
        let dp = self.dp;
        let narrower = Segment::MultiClose { i, j, k: k - 1 };
        em.child(&[(narrower, narrower.energy(dp))], None, 0);
        let e = k - 1;
        if e < i + 2 || !self.free(e, j - 1) || self.nick(i) {
            return;
        }
        let m = self.model.multi();
        let closing = m.init + 2 * m.bp + (j - e - 1) as Energy * m.nt;
        for d in i + 2..e {
            if self.nick(d - 1) {
                continue;
            }
            let inner = Segment::Paired { i: d, j: e };
            let left = Segment::Multi { i: i + 1, j: d - 1 };
            em.child(&[(inner, inner.energy(dp)), (left, left.energy(dp))], Some((i, j)), closing);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SearchOptions {
    /// Keep only the candidates that can still be picked.
    pub low_mem: bool,
    /// Record the level and symmetry of every scanned structure.
    pub trace: bool,
    /// Record every scanned structure.
    pub keep_scanned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// An asymmetric structure was scanned.
    Asymmetric,
    /// Two symmetric structures shared a cut or central interior loop.
    Collision,
    /// The next level exceeded the best symmetric candidate.
    LevelAboveBound,
    /// No candidates remained.
    Exhausted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    /// Naive energy including association.
    pub naive: Energy,
    pub symmetry: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub scanned: usize,
    pub symmetric_scanned: usize,
    pub bound: usize,
    pub refinements: usize,
    pub max_children: usize,
    /// Largest number of stored candidates at any time.
    pub peak_candidates: usize,
    pub rejected_collisions: usize,
    pub trace: Vec<ScanRecord>,
    #[serde(skip)]
    pub scanned_structures: Vec<SecondaryStructure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MfeResult {
    /// Symmetry-corrected minimum.
    pub energy: f64,
    pub structure: SecondaryStructure,
    pub breakdown: EnergyBreakdown,
    /// Symmetry-naive minimum, association included.
    pub snmfe: Energy,
    pub termination: Termination,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RegistryKey {
    Cut(CutKey),
    Center([(usize, usize); 2]),
}

struct Registry {
    entries: Vec<SecondaryStructure>,
    index: HashMap<RegistryKey, usize>,
}

struct Candidates {
    arrays: Vec<(Vec<Partial>, Option<(Energy, usize)>)>,
    pool: std::collections::VecDeque<Partial>,
    low_mem: bool,
}

fn array_min(items: &[Partial]) -> Option<(Energy, usize)> {
    let mut best: Option<(Energy, usize)> = None;
    for (k, p) in items.iter().enumerate() {
        if best.map_or(true, |(e, _)| p.energy < e) {
            best = Some((p.energy, k));
        }
    }
    best
}

impl Candidates {
    fn stored(&self) -> usize {
        self.pool.len() + self.arrays.iter().map(|a| a.0.len()).sum::<usize>()
    }

    /// Files the children collected during one scan.
    fn absorb(&mut self, mut fresh: Vec<Partial>, cap: usize) {
        if self.low_mem {
            fresh.sort_by_key(|p| p.energy);
            let old = std::mem::take(&mut self.pool);
            let mut merged = std::collections::VecDeque::with_capacity((old.len() + fresh.len()).min(cap));
            let (mut a, mut b) = (old.into_iter().peekable(), fresh.into_iter().peekable());
            while merged.len() < cap {
                let take_old = match (a.peek(), b.peek()) {
                    (Some(x), Some(y)) => x.energy <= y.energy,
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    (None, None) => break,
                };
                merged.push_back(if take_old { a.next() } else { b.next() }.expect("peeked"));
            }
            self.pool = merged;
        } else {
            let min = array_min(&fresh);
            self.arrays.push((fresh, min));
        }
    }

    fn peek_min(&self) -> Option<Energy> {
        if self.low_mem {
            self.pool.front().map(|p| p.energy)
        } else {
            self.arrays.iter().filter_map(|a| a.1.map(|m| m.0)).min()
        }
    }

    fn pop_min(&mut self) -> Option<Partial> {
        if self.low_mem {
            return self.pool.pop_front();
        }
        let mut pick: Option<(Energy, usize)> = None;
        for (z, a) in self.arrays.iter().enumerate() {
            if let Some((e, _)) = a.1 {
                if pick.map_or(true, |(b, _)| e < b) {
                    pick = Some((e, z));
                }
            }
        }
        let (_, z) = pick?;
        let (items, min) = &mut self.arrays[z];
        let at = min.expect("non-empty").1;
        let p = items.remove(at);
        *min = array_min(items);
        Some(p)
    }
}

/// Symmetry-corrected minimum over one ordering.
pub fn true_mfe<E: EnergyModel + ?Sized>(
    ordering: &StrandOrdering,
    dp: &DpState,
    model: &E,
    rule: PairingRule,
    opts: SearchOptions,
) -> Result<MfeResult, SearchError> {
    if !dp.has_tensors() {
        return Err(SearchError::TensorsMissing);
    }
    let n = ordering.len();
    let assoc = association_energy(ordering, model);
    let snmfe = dp.snmfe().ok_or(SearchError::Infeasible)?;
    let kbt = model.kbt();
    let bound = upper_bound(ordering, rule).total;
    let refiner = Refiner::new(ordering, dp, model);

    let mut stats = SearchStats { bound, ..Default::default() };
    let mut level = snmfe - assoc;
    let mut best = snmfe as f64 + symmetry_penalty(kbt, ordering.max_symmetry());
    let mut best_witness: Option<(SecondaryStructure, usize)> = None;
    let mut registry = Registry { entries: Vec::new(), index: HashMap::new() };
    let mut cands = Candidates { arrays: Vec::new(), pool: Default::default(), low_mem: opts.low_mem };
    let mut current = Partial::root(dp);
    let mut u = 0usize;
    let mut last_level = Energy::MIN;

    let limit_of = |best: f64| -> Energy {
        let l = (best - assoc as f64).floor();
        if l >= INF as f64 {
            INF - 1
        } else {
            l as Energy
        }
    };

    loop {
        // descend along children at the current level, parking the others
        let mut fresh: Vec<Partial> = Vec::new();
        let mut kids: Vec<Partial> = Vec::new();
        while !current.is_complete() {
            kids.clear();
            let generated = refiner.refine(&current, limit_of(best), &mut kids);
            stats.refinements += 1;
            stats.max_children = stats.max_children.max(generated);
            let at = kids
                .iter()
                .position(|k| k.energy == level)
                .ok_or_else(|| SearchError::Inconsistent(format!("no child at level {level}")))?;
            let mut drained = kids.drain(..);
            for (idx, k) in drained.by_ref().enumerate() {
                if idx == at {
                    current = k;
                } else {
                    fresh.push(k);
                }
            }
            stats.peak_candidates = stats.peak_candidates.max(cands.stored() + fresh.len());
        }

        let s = current.structure(n);
        let naive = current.loops + assoc;
        if naive != level + assoc {
            return Err(SearchError::Inconsistent(format!("scanned energy {naive} off level {}", level + assoc)));
        }
        if level < last_level {
            return Err(SearchError::Inconsistent("levels decreased".into()));
        }
        last_level = level;
        stats.scanned += 1;
        let r = rotational_symmetry(&s, ordering);
        if opts.trace {
            stats.trace.push(ScanRecord { naive, symmetry: r });
        }
        if opts.keep_scanned {
            stats.scanned_structures.push(s.clone());
        }

        if r == 1 {
            return finish(ordering, model, s, snmfe, Termination::Asymmetric, stats);
        }
        stats.symmetric_scanned += 1;
        let penalized = naive as f64 + symmetry_penalty(kbt, r);
        if best_witness.is_none() || penalized < best {
            best = best.min(penalized);
            best_witness = Some((s.clone(), r));
        }

        if let Some(witness) = register(&mut registry, &s, r, ordering, model, naive)? {
            return finish(ordering, model, witness, snmfe, Termination::Collision, stats);
        }
        if registry.entries.last() != Some(&s) {
            stats.rejected_collisions += 1;
        }

        u += 1;
        if u > bound {
            return Err(SearchError::BoundExceeded { scanned: u, bound });
        }

        let cap = (bound + 2).saturating_sub(stats.scanned).max(1);
        cands.absorb(fresh, cap);
        stats.peak_candidates = stats.peak_candidates.max(cands.stored());

        let Some(next) = cands.peek_min() else {
            let (w, _) = best_witness.expect("a symmetric structure set the bound");
            return finish(ordering, model, w, snmfe, Termination::Exhausted, stats);
        };
        if (next + assoc) as f64 > best {
            let (w, _) = best_witness.expect("a symmetric structure set the bound");
            return finish(ordering, model, w, snmfe, Termination::LevelAboveBound, stats);
        }
        current = cands.pop_min().expect("peeked");
        level = current.energy;
    }
}

/// Files a scanned symmetric structure. Returns a verified asymmetric witness
/// at the same level on collision.
fn register<E: EnergyModel + ?Sized>(
    reg: &mut Registry,
    s: &SecondaryStructure,
    r: usize,
    ordering: &StrandOrdering,
    model: &E,
    naive: Energy,
) -> Result<Option<SecondaryStructure>, SearchError> {
    let bad = |e: crate::symmetry::SymmetryError| SearchError::Inconsistent(e.to_string());
    let cut = find_admissible_cut(s, r, ordering).map_err(bad)?;
    let center = central_loop(s, &cut, ordering).map_err(bad)?;
    let keys: Vec<RegistryKey> = if r >= 3 || center.kind == LoopKind::Multiloop {
        admissible_cuts(s, r, ordering).into_iter().map(|c| RegistryKey::Cut(c.key())).collect()
    } else {
        let mut b = [center.bordering[0], *center.bordering.get(1).unwrap_or(&center.bordering[0])];
        b.sort_unstable();
        vec![RegistryKey::Center(b)]
    };

    for key in &keys {
        let Some(&z) = reg.index.get(key) else { continue };
        let partner = &reg.entries[z];
        let shared: Option<SymmetricCut> = match key {
            RegistryKey::Cut(k) => generate_cut(k.min_bond, k.r, ordering).ok(),
            RegistryKey::Center(_) => admissible_cuts(s, r, ordering).into_iter().find(|c| is_admissible(c, partner)),
        };
        if let Some(cut) = shared {
            if let Ok(k) = slice_and_swap(partner, s, &cut, ordering) {
                let ok = is_unpseudoknotted(&k)
                    && is_connected(&k, ordering)
                    && rotational_symmetry(&k, ordering) == 1
                    && naive_free_energy(&k, ordering, model).ok() == Some(naive);
                if ok {
                    return Ok(Some(k));
                }
            }
        }
        // the pair did not yield a witness; keep scanning
        return Ok(None);
    }
    let z = reg.entries.len();
    reg.entries.push(s.clone());
    for key in keys {
        reg.index.insert(key, z);
    }
    Ok(None)
}

fn finish<E: EnergyModel + ?Sized>(
    ordering: &StrandOrdering,
    model: &E,
    s: SecondaryStructure,
    snmfe: Energy,
    termination: Termination,
    stats: SearchStats,
) -> Result<MfeResult, SearchError> {
    let breakdown = crate::energy::free_energy(&s, ordering, model).map_err(|e| SearchError::Inconsistent(e.to_string()))?;
    Ok(MfeResult { energy: breakdown.total, structure: s, breakdown, snmfe, termination, stats })
}
