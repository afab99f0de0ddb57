//! Exhaustive ground truth for small systems.
//!
//! Everything here is written independently of the DP, the backtracker and
//! the loop decomposition in [`crate::structure`]: own enumeration, own
//! connectivity test, own loop energy evaluation and own symmetry count.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::energy::{symmetry_penalty, Energy, EnergyModel, INF};
use crate::strands::{circular_permutations, PairingRule, StrandOrdering, StrandSystem};
use crate::structure::SecondaryStructure;

/// Hard cap on N; enumeration is exponential.
pub const HARD_MAX_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub max_n: usize,
    pub max_structures: usize,
    pub rule: PairingRule,
    /// Smallest allowed hairpin (unpaired bases, no nick inside).
    pub min_hairpin: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_n: 18, max_structures: 20_000_000, rule: PairingRule::WATSON_CRICK, min_hairpin: 3 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("N = {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("more than {0} structures")]
    CapExceeded(usize),
    #[error("no connected structure exists")]
    NoStructure,
}

fn check_size(ordering: &StrandOrdering, cfg: &EnumerationConfig) -> Result<(), OracleError> {
    let max = cfg.max_n.min(HARD_MAX_N);
    if ordering.len() > max {
        return Err(OracleError::TooLarge { n: ordering.len(), max });
    }
    Ok(())
}

/// Streams every connected, crossing-free, complementary structure over the
/// ordering that respects the minimum hairpin size. Returns the count.
pub fn enumerate_structures(
    ordering: &StrandOrdering,
    cfg: &EnumerationConfig,
    mut visit: impl FnMut(&SecondaryStructure) -> ControlFlow<()>,
) -> Result<usize, OracleError> {
    check_size(ordering, cfg)?;
    let n = ordering.len();
    let mut count = 0usize;
    let mut over = false;
    let mut emit = |pairs: &[(usize, usize)]| -> bool {
        if !admissible(pairs, ordering, cfg) {
            return true;
        }
        count += 1;
        if count > cfg.max_structures {
            over = true;
            return false;
        }
        let s = SecondaryStructure::from_pairs(n, pairs.iter().copied()).expect("enumerated pairs are disjoint");
        visit(&s).is_continue()
    };
    let mut pending = vec![(1usize, n)];
    let mut pairs = Vec::new();
    descend(ordering, cfg.rule, &mut pending, &mut pairs, &mut emit);
    if over {
        return Err(OracleError::CapExceeded(cfg.max_structures));
    }
    Ok(count)
}

/// Every noncrossing matching: the first base of the first pending interval
/// is either unpaired or paired with some later base in the interval.
fn descend(
    ordering: &StrandOrdering,
    rule: PairingRule,
    pending: &mut Vec<(usize, usize)>,
    pairs: &mut Vec<(usize, usize)>,
    emit: &mut dyn FnMut(&[(usize, usize)]) -> bool,
) -> bool {
    let Some((i, j)) = pending.pop() else {
        return emit(pairs);
    };
    let mut go = true;
    if i > j {
        go = descend(ordering, rule, pending, pairs, emit);
    } else {
        pending.push((i + 1, j));
        go &= descend(ordering, rule, pending, pairs, emit);
        pending.pop();
        let mut k = i + 1;
        while go && k <= j {
            if rule.can_pair(ordering.base(i), ordering.base(k)) {
                pending.push((k + 1, j));
                pending.push((i + 1, k - 1));
                pairs.push((i, k));
                go &= descend(ordering, rule, pending, pairs, emit);
                pairs.pop();
                pending.pop();
                pending.pop();
            }
            k += 1;
        }
    }
    pending.push((i, j));
    go
}

fn strand_ends(ordering: &StrandOrdering) -> Vec<bool> {
    // ends[x]: base x is the last base of a strand that is not the final one
    let n = ordering.len();
    let mut ends = vec![false; n + 1];
    for &s in ordering.strand_starts().iter().skip(1) {
        ends[s - 1] = true;
    }
    ends
}

fn admissible(pairs: &[(usize, usize)], ordering: &StrandOrdering, cfg: &EnumerationConfig) -> bool {
    connected(pairs, ordering) && hairpins_ok(pairs, ordering, cfg.min_hairpin)
}

fn connected(pairs: &[(usize, usize)], ordering: &StrandOrdering) -> bool {
    let n = ordering.len();
    let ends = strand_ends(ordering);
    let mut partner = vec![0usize; n + 2];
    for &(i, j) in pairs {
        partner[i] = j;
        partner[j] = i;
    }
    let mut seen = vec![false; n + 1];
    let mut queue = VecDeque::from([1usize]);
    seen[1] = true;
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        let mut next = Vec::with_capacity(3);
        if x > 1 && !ends[x - 1] {
            next.push(x - 1);
        }
        if x < n && !ends[x] {
            next.push(x + 1);
        }
        if partner[x] != 0 {
            next.push(partner[x]);
        }
        for y in next {
            if !seen[y] {
                seen[y] = true;
                reached += 1;
                queue.push_back(y);
            }
        }
    }
    reached == n
}

fn hairpins_ok(pairs: &[(usize, usize)], ordering: &StrandOrdering, min: usize) -> bool {
    let ends = strand_ends(ordering);
    pairs.iter().all(|&(i, j)| {
        let inner_pair = pairs.iter().any(|&(a, _)| a > i && a < j);
        let nick = (i..j).any(|x| ends[x]);
        inner_pair || nick || j - i - 1 >= min
    })
}

/// Second enumerator for tiny systems: all subsets of complementary
/// position pairs, filtered for disjointness, nesting, connectivity and
/// hairpin size.
pub fn enumerate_by_subsets(ordering: &StrandOrdering, cfg: &EnumerationConfig) -> Result<Vec<SecondaryStructure>, OracleError> {
    let n = ordering.len();
    if n > 8 {
        return Err(OracleError::TooLarge { n, max: 8 });
    }
    let candidates: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| cfg.rule.can_pair(ordering.base(i), ordering.base(j)))
        .collect();
    let mut out = Vec::new();
    let total: u64 = 1u64 << candidates.len();
    for mask in 0..total {
        let chosen: Vec<(usize, usize)> = candidates.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
        let mut used = vec![false; n + 1];
        if chosen.iter().any(|&(i, j)| std::mem::replace(&mut used[i], true) | std::mem::replace(&mut used[j], true)) {
            continue;
        }
        let crossing = chosen.iter().any(|&(i, j)| chosen.iter().any(|&(k, l)| i < k && k < j && j < l));
        if crossing || !admissible(&chosen, ordering, cfg) {
            continue;
        }
        out.push(SecondaryStructure::from_pairs(n, chosen).expect("disjoint"));
        if out.len() > cfg.max_structures {
            return Err(OracleError::CapExceeded(cfg.max_structures));
        }
    }
    out.sort();
    Ok(out)
}

/// Loop energies summed, evaluated face by face; `None` if some loop is
/// forbidden by the model.
pub fn oracle_loop_energy<E: EnergyModel + ?Sized>(s: &SecondaryStructure, ordering: &StrandOrdering, model: &E) -> Option<Energy> {
    let n = ordering.len();
    let ends = strand_ends(ordering);
    let mut partner = vec![0usize; n + 1];
    for &(i, j) in s.pairs() {
        partner[i] = j;
        partner[j] = i;
    }
    let multi = model.multi();
    let mut total: Energy = 0;
    for &(i, j) in s.pairs() {
        let mut inner = Vec::new();
        let mut unpaired = 0usize;
        let mut has_nick = ends[i];
        let mut k = i + 1;
        while k < j {
            if partner[k] > k {
                inner.push((k, partner[k]));
                k = partner[k];
                has_nick |= ends[k];
                k += 1;
            } else {
                unpaired += 1;
                has_nick |= ends[k];
                k += 1;
            }
        }
        let e = if has_nick {
            0
        } else {
            match inner.as_slice() {
                [] => model.hairpin(ordering, i, j),
                [(d, e)] => model.interior(ordering, i, *d, *e, j),
                many => multi.init + (many.len() as Energy + 1) * multi.bp + unpaired as Energy * multi.nt,
            }
        };
        if e >= INF {
            return None;
        }
        total += e;
    }
    Some(total)
}

/// Order of the rotation group fixing both the ordering and the structure.
pub fn oracle_symmetry(s: &SecondaryStructure, ordering: &StrandOrdering) -> usize {
    let n = ordering.len();
    let starts = ordering.strand_starts();
    let mut order = 0;
    for shift in 0..n {
        let rot = |x: usize| (x - 1 + shift) % n + 1;
        let frame_ok = starts.iter().all(|&st| starts.contains(&rot(st)))
            && (1..=n).all(|x| ordering.base(x) == ordering.base(rot(x)));
        if !frame_ok {
            continue;
        }
        let moved: std::collections::BTreeSet<(usize, usize)> = s
            .pairs()
            .iter()
            .map(|&(i, j)| (rot(i).min(rot(j)), rot(i).max(rot(j))))
            .collect();
        if moved.iter().copied().eq(s.pairs().iter().copied()) {
            order += 1;
        }
    }
    order
}

/// One enumerated structure with its energies.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluated {
    pub structure: SecondaryStructure,
    /// Loop sum plus association.
    pub naive: Energy,
    pub symmetry: usize,
    pub total: f64,
}

/// Per-ordering exhaustive minima.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingMinimum {
    pub ordering: String,
    pub count: usize,
    pub snmfe: Option<Energy>,
    pub mfe: Option<Evaluated>,
}

/// Evaluates every enumerated structure on one ordering.
pub fn evaluate_ordering<E: EnergyModel + ?Sized>(
    ordering: &StrandOrdering,
    model: &E,
    cfg: &EnumerationConfig,
    mut visit: impl FnMut(&Evaluated),
) -> Result<OrderingMinimum, OracleError> {
    let assoc = (ordering.strand_count() as Energy - 1) * model.association();
    let mut snmfe: Option<Energy> = None;
    let mut best: Option<Evaluated> = None;
    let mut count = 0;
    enumerate_structures(ordering, cfg, |s| {
        if let Some(loops) = oracle_loop_energy(s, ordering, model) {
            count += 1;
            let naive = loops + assoc;
            let r = oracle_symmetry(s, ordering);
            let total = naive as f64 + symmetry_penalty(model.kbt(), r);
            let ev = Evaluated { structure: s.clone(), naive, symmetry: r, total };
            visit(&ev);
            snmfe = Some(snmfe.map_or(naive, |m| m.min(naive)));
            if best.as_ref().map_or(true, |b| total < b.total) {
                best = Some(ev);
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(OrderingMinimum { ordering: ordering.label().to_string(), count, snmfe, mfe: best })
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteResult {
    pub energy: f64,
    pub witness: Evaluated,
    pub ordering: String,
    pub per_ordering: Vec<OrderingMinimum>,
}

/// Exhaustive symmetry-corrected minimum over all orderings.
pub fn brute_mfe<E: EnergyModel + ?Sized>(system: &StrandSystem, model: &E, cfg: &EnumerationConfig) -> Result<BruteResult, OracleError> {
    let mut per = Vec::new();
    let mut best: Option<(f64, Evaluated, String)> = None;
    for ordering in circular_permutations(system) {
        let res = evaluate_ordering(&ordering, model, cfg, |_| {})?;
        if let Some(ev) = &res.mfe {
            if best.as_ref().map_or(true, |b| ev.total < b.0) {
                best = Some((ev.total, ev.clone(), res.ordering.clone()));
            }
        }
        per.push(res);
    }
    let (energy, witness, ordering) = best.ok_or(OracleError::NoStructure)?;
    Ok(BruteResult { energy, witness, ordering, per_ordering: per })
}
