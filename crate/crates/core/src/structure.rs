//! Secondary structures over a fixed ordering: validity, loops, rotational
//! symmetry and dot-bracket text.

use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strands::{PairingRule, StrandOrdering};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("base {0} is out of range")]
    OutOfRange(usize),
    #[error("base {0} appears in more than one pair")]
    Reused(usize),
    #[error("bases {0} and {1} are not complementary")]
    NotComplementary(usize, usize),
    #[error("pair ({0},{1}) is degenerate")]
    Degenerate(usize, usize),
    #[error("structure is pseudoknotted")]
    Pseudoknotted,
    #[error("structure is disconnected")]
    Disconnected,
    #[error("unbalanced brackets at column {0}")]
    Unbalanced(usize),
    #[error("unexpected character `{0}`")]
    BadCharacter(char),
    #[error("dot-bracket length or strand breaks do not match the ordering")]
    ShapeMismatch,
}

/// A set of base pairs `(i, j)`, `i < j`, over global indices `1..=N`, kept
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SecondaryStructure {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl SecondaryStructure {
    pub fn empty(n: usize) -> Self {
        SecondaryStructure { n, pairs: Vec::new() }
    }

    /// Normalises orientation and order; checks bounds and base reuse only.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, StructureError> {
        let mut ps: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        ps.sort_unstable();
        let mut used = vec![false; n + 1];
        for &(i, j) in &ps {
            if i == 0 || j > n {
                return Err(StructureError::OutOfRange(if i == 0 { i } else { j }));
            }
            if i == j {
                return Err(StructureError::Degenerate(i, j));
            }
            for x in [i, j] {
                if std::mem::replace(&mut used[x], true) {
                    return Err(StructureError::Reused(x));
                }
            }
        }
        Ok(SecondaryStructure { n, pairs: ps })
    }

    /// Like [`from_pairs`](Self::from_pairs) but also checks complementarity.
    pub fn new(
        ordering: &StrandOrdering,
        pairs: impl IntoIterator<Item = (usize, usize)>,
        rule: PairingRule,
    ) -> Result<Self, StructureError> {
        let s = Self::from_pairs(ordering.len(), pairs)?;
        for &(i, j) in &s.pairs {
            if !ordering.can_pair(i, j, rule) {
                return Err(StructureError::NotComplementary(i, j));
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        let p = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.pairs.binary_search(&p).is_ok()
    }

    /// `table[i]` is the partner of base `i`, or 0.
    pub fn pair_table(&self) -> Vec<usize> {
        let mut t = vec![0; self.n + 1];
        for &(i, j) in &self.pairs {
            t[i] = j;
            t[j] = i;
        }
        t
    }

    /// Every pair shifted forward by `shift` positions around the circle.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.n;
        let rot = |x: usize| (x - 1 + shift) % n + 1;
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| {
            let (a, b) = (rot(i), rot(j));
            (a.min(b), a.max(b))
        }).collect();
        pairs.sort_unstable();
        SecondaryStructure { n, pairs }
    }
}

/// True iff no two pairs cross.
pub fn is_unpseudoknotted(s: &SecondaryStructure) -> bool {
    let table = s.pair_table();
    let mut stack: Vec<usize> = Vec::new();
    for x in 1..=s.len() {
        let p = table[x];
        if p == 0 {
            continue;
        }
        if p > x {
            stack.push(x);
        } else if stack.pop() != Some(p) {
            return false;
        }
    }
    true
}

/// True iff bases, backbone bonds and pairs form one connected graph.
pub fn is_connected(s: &SecondaryStructure, ordering: &StrandOrdering) -> bool {
    let n = ordering.len();
    if n == 0 {
        return true;
    }
    let mut uf = UnionFind::<usize>::new(n + 1);
    for x in 1..n {
        if !ordering.nick_after(x) {
            uf.union(x, x + 1);
        }
    }
    for &(i, j) in s.pairs() {
        uf.union(i, j);
    }
    let root = uf.find(1);
    (2..=n).all(|x| uf.find(x) == root)
}

/// Checks everything a member of the structure ensemble must satisfy.
pub fn validate(s: &SecondaryStructure, ordering: &StrandOrdering, rule: PairingRule) -> Result<(), StructureError> {
    if s.len() != ordering.len() {
        return Err(StructureError::ShapeMismatch);
    }
    for &(i, j) in s.pairs() {
        if !ordering.can_pair(i, j, rule) {
            return Err(StructureError::NotComplementary(i, j));
        }
    }
    if !is_unpseudoknotted(s) {
        return Err(StructureError::Pseudoknotted);
    }
    if !is_connected(s, ordering) {
        return Err(StructureError::Disconnected);
    }
    Ok(())
}

/// `l[i,j]`: length of the shorter path between `i` and `j` on a circle of
/// `n` bases, counting both ends.
pub fn segment_length(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    (d + 1).min(n - d + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    Hairpin,
    Stack,
    Bulge,
    Interior,
    Multiloop,
    Exterior,
}

/// One face of the planar polymer graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Loop {
    pub kind: LoopKind,
    /// Closing pair in the linear view; `None` for the top-level loop.
    pub closing: Option<(usize, usize)>,
    /// Pairs directly enclosed by the closing pair (or top-level pairs).
    pub children: Vec<(usize, usize)>,
    /// Backbone arcs on the loop boundary; arc `x` joins `x` and `x + 1`,
    /// arc `N` joins `N` and `1`.
    pub arcs: Vec<usize>,
    pub unpaired: usize,
    /// Nick positions `x` (nick at `x + 1/2`) on the boundary; the circular
    /// closure at `N` is not listed.
    pub nicks: Vec<usize>,
}

impl Loop {
    /// All pairs bordering the loop.
    pub fn bordering(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.closing.iter().copied().chain(self.children.iter().copied())
    }

    pub fn bordering_count(&self) -> usize {
        self.children.len() + usize::from(self.closing.is_some())
    }
}

/// Decomposes a connected, unpseudoknotted structure into loops: one per pair
/// plus the top-level loop. The empty structure has no loops.
pub fn loop_decomposition(s: &SecondaryStructure, ordering: &StrandOrdering) -> Result<Vec<Loop>, StructureError> {
    if !is_unpseudoknotted(s) {
        return Err(StructureError::Pseudoknotted);
    }
    if !is_connected(s, ordering) {
        return Err(StructureError::Disconnected);
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let n = ordering.len();
    let table = s.pair_table();
    let mut loops = Vec::with_capacity(s.pairs().len() + 1);

    let mut top = Loop { kind: LoopKind::Exterior, closing: None, children: Vec::new(), arcs: Vec::new(), unpaired: 0, nicks: Vec::new() };
    walk(&table, 0, n + 1, n, ordering, &mut top);
    top.arcs.push(n);
    loops.push(top);

    for &(i, j) in s.pairs() {
        let mut lp = Loop { kind: LoopKind::Exterior, closing: Some((i, j)), children: Vec::new(), arcs: Vec::new(), unpaired: 0, nicks: Vec::new() };
        walk(&table, i, j, n, ordering, &mut lp);
        lp.kind = if !lp.nicks.is_empty() {
            LoopKind::Exterior
        } else {
            match lp.children.len() {
                0 => LoopKind::Hairpin,
                1 => {
                    let (d, e) = lp.children[0];
                    match (d - i - 1, j - e - 1) {
                        (0, 0) => LoopKind::Stack,
                        (0, _) | (_, 0) => LoopKind::Bulge,
                        _ => LoopKind::Interior,
                    }
                }
                _ => LoopKind::Multiloop,
            }
        };
        loops.push(lp);
    }
    Ok(loops)
}

/// Walks the boundary from `start` to `end`, hopping over enclosed pairs.
/// `start = 0`, `end = n + 1` walks the top level.
fn walk(table: &[usize], start: usize, end: usize, n: usize, ordering: &StrandOrdering, out: &mut Loop) {
    let mut x = start;
    loop {
        if x >= 1 && x + 1 <= n && x + 1 <= end {
            out.arcs.push(x);
            if ordering.nick_after(x) {
                out.nicks.push(x);
            }
        }
        let y = x + 1;
        if y >= end {
            break;
        }
        let p = table[y];
        if p > y {
            out.children.push((y, p));
            x = p;
        } else {
            out.unpaired += 1;
            x = y;
        }
    }
}

/// Largest degree R such that rotating by N/R maps the structure onto itself.
pub fn rotational_symmetry(s: &SecondaryStructure, ordering: &StrandOrdering) -> usize {
    let v = ordering.max_symmetry();
    if v == 1 {
        return 1;
    }
    let table = s.pair_table();
    let n = ordering.len();
    for r in crate::strands::divisors(v).into_iter().rev() {
        if r == 1 {
            break;
        }
        if is_invariant_under(&table, s.pairs(), n, n / r) {
            return r;
        }
    }
    1
}

/// True when shifting by `shift` positions fixes the pair set.
pub fn is_invariant_under(table: &[usize], pairs: &[(usize, usize)], n: usize, shift: usize) -> bool {
    let rot = |x: usize| (x - 1 + shift) % n + 1;
    pairs.iter().all(|&(i, j)| table[rot(i)] == rot(j))
}

/// Renders `()` pairs, `.` unpaired and `+` between strands.
pub fn to_dot_bracket(s: &SecondaryStructure, ordering: &StrandOrdering) -> Result<String, StructureError> {
    if !is_unpseudoknotted(s) {
        return Err(StructureError::Pseudoknotted);
    }
    let table = s.pair_table();
    let starts = ordering.strand_starts();
    let mut out = String::with_capacity(s.len() + starts.len());
    for x in 1..=s.len() {
        if x > 1 && starts.binary_search(&x).is_ok() {
            out.push('+');
        }
        out.push(match table[x] {
            0 => '.',
            p if p > x => '(',
            _ => ')',
        });
    }
    Ok(out)
}

/// Parses one dot-bracket line; a trailing `# ...` comment is ignored.
pub fn parse_dot_bracket(text: &str, ordering: &StrandOrdering, rule: PairingRule) -> Result<SecondaryStructure, StructureError> {
    let body = text.split('#').next().unwrap_or("").trim();
    let mut pairs = Vec::new();
    let mut stack = Vec::new();
    let mut breaks = Vec::new();
    let mut x = 0;
    for (col, ch) in body.chars().enumerate() {
        match ch {
            '+' => breaks.push(x + 1),
            '.' => x += 1,
            '(' => {
                x += 1;
                stack.push(x);
            }
            ')' => {
                x += 1;
                pairs.push((stack.pop().ok_or(StructureError::Unbalanced(col + 1))?, x));
            }
            c => return Err(StructureError::BadCharacter(c)),
        }
    }
    if let Some(&open) = stack.last() {
        return Err(StructureError::Unbalanced(open));
    }
    if x != ordering.len() || breaks != ordering.strand_starts()[1..] {
        return Err(StructureError::ShapeMismatch);
    }
    SecondaryStructure::new(ordering, pairs, rule)
}

/// Reads the integer from an `# energy=<int>` annotation, if present.
pub fn energy_annotation(text: &str) -> Option<i64> {
    let comment = text.split_once('#')?.1;
    comment.split_whitespace().find_map(|tok| tok.strip_prefix("energy=")?.parse().ok())
}

impl fmt::Display for SecondaryStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{j})")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(seqs: &[&str]) -> StrandOrdering {
        StrandOrdering::from_sequences(seqs).unwrap()
    }

    #[test]
    fn crossing_detection() {
        let nested = SecondaryStructure::from_pairs(8, [(1, 8), (2, 7)]).unwrap();
        assert!(is_unpseudoknotted(&nested));
        let crossing = SecondaryStructure::from_pairs(8, [(1, 5), (3, 8)]).unwrap();
        assert!(!is_unpseudoknotted(&crossing));
    }

    #[test]
    fn connectivity() {
        let one = ord(&["GGGAAAACCC"]);
        assert!(is_connected(&SecondaryStructure::empty(10), &one));
        let two = ord(&["AT", "AT"]);
        assert!(!is_connected(&SecondaryStructure::empty(4), &two));
        assert!(is_connected(&SecondaryStructure::from_pairs(4, [(1, 4)]).unwrap(), &two));
        assert!(!is_connected(&SecondaryStructure::from_pairs(4, [(1, 2)]).unwrap(), &two));
    }

    #[test]
    fn hairpin_decomposition() {
        let o = ord(&["GGGAAAACCC"]);
        let s = SecondaryStructure::from_pairs(10, [(1, 10), (2, 9), (3, 8)]).unwrap();
        let loops = loop_decomposition(&s, &o).unwrap();
        let kinds: Vec<LoopKind> = loops.iter().map(|l| l.kind).collect();
        assert_eq!(kinds, vec![LoopKind::Exterior, LoopKind::Stack, LoopKind::Stack, LoopKind::Hairpin]);
        assert_eq!(loops[3].unpaired, 4);
        assert!(loop_decomposition(&SecondaryStructure::empty(10), &o).unwrap().is_empty());
    }

    #[test]
    fn mixed_decomposition() {
        // 1( 2( 3. 4( 5. 6. 7. 8) 9( 10. 11. 12. 13) 14) 15. 16)
        let o = ord(&["GGAGAAACGAAACCAC"]);
        let s = SecondaryStructure::from_pairs(16, [(1, 16), (2, 14), (4, 8), (9, 13)]).unwrap();
        let loops = loop_decomposition(&s, &o).unwrap();
        let kinds: Vec<LoopKind> = loops.iter().map(|l| l.kind).collect();
        assert_eq!(kinds, vec![LoopKind::Exterior, LoopKind::Bulge, LoopKind::Multiloop, LoopKind::Hairpin, LoopKind::Hairpin]);
        assert_eq!(loops[2].unpaired, 1);
        assert_eq!(loops[2].bordering_count(), 3);
    }

    #[test]
    fn exterior_by_nick() {
        let o = ord(&["GAAA", "AAAC"]);
        let s = SecondaryStructure::from_pairs(8, [(1, 8)]).unwrap();
        let loops = loop_decomposition(&s, &o).unwrap();
        assert_eq!(loops[1].kind, LoopKind::Exterior);
        assert_eq!(loops[1].nicks, vec![4]);
        assert_eq!(loops[0].arcs, vec![8]);
    }

    #[test]
    fn segment_lengths() {
        assert_eq!(segment_length(2, 9, 10), 4);
        assert_eq!(segment_length(5, 5, 10), 1);
        assert_eq!(segment_length(1, 7, 12), 7);
    }

    #[test]
    fn symmetry_detection() {
        let o = ord(&["AT", "AT"]);
        let s = SecondaryStructure::from_pairs(4, [(1, 4), (2, 3)]).unwrap();
        assert_eq!(rotational_symmetry(&s, &o), 2);
        let s = SecondaryStructure::from_pairs(4, [(1, 4)]).unwrap();
        assert_eq!(rotational_symmetry(&s, &o), 1);
        let single = ord(&["GGGAAAACCC"]);
        let s = SecondaryStructure::from_pairs(10, [(1, 10)]).unwrap();
        assert_eq!(rotational_symmetry(&s, &single), 1);
    }

    #[test]
    fn four_fold_and_two_fold() {
        // four strands GAAC: each G pairs the C of the next strand
        let o = ord(&["GAAC", "GAAC", "GAAC", "GAAC"]);
        let s4 = SecondaryStructure::from_pairs(16, [(1, 16), (4, 5), (8, 9), (12, 13)]).unwrap();
        assert_eq!(rotational_symmetry(&s4, &o), 4);
        let s2 = SecondaryStructure::from_pairs(16, [(1, 16), (4, 5), (8, 9)]).unwrap();
        // not invariant at all
        assert_eq!(rotational_symmetry(&s2, &o), 1);
        let s2 = SecondaryStructure::from_pairs(16, [(1, 8), (9, 16)]).unwrap();
        assert_eq!(rotational_symmetry(&s2, &o), 2);
    }

    #[test]
    fn dot_bracket_round_trip() {
        let o = ord(&["ACGT"]);
        assert_eq!(to_dot_bracket(&SecondaryStructure::empty(4), &o).unwrap(), "....");
        let o = ord(&["AT", "AT"]);
        let s = SecondaryStructure::from_pairs(4, [(1, 4)]).unwrap();
        assert_eq!(to_dot_bracket(&s, &o).unwrap(), "(.+.)");
        let back = parse_dot_bracket("(.+.)  # energy=-4", &o, PairingRule::WATSON_CRICK).unwrap();
        assert_eq!(back, s);
        assert_eq!(energy_annotation("(.+.)  # energy=-4"), Some(-4));
    }

    #[test]
    fn dot_bracket_errors() {
        let o = ord(&["AT", "AT"]);
        let rule = PairingRule::WATSON_CRICK;
        assert_eq!(parse_dot_bracket("((+.)", &o, rule), Err(StructureError::Unbalanced(1)));
        assert_eq!(parse_dot_bracket("(+..)", &o, rule), Err(StructureError::ShapeMismatch));
        assert_eq!(parse_dot_bracket("(.+).", &o, rule), Err(StructureError::NotComplementary(1, 3)));
        assert_eq!(parse_dot_bracket("(...)", &o, rule), Err(StructureError::ShapeMismatch));
        assert_eq!(parse_dot_bracket("(.+).", &o, rule), Err(StructureError::NotComplementary(1, 3)));
        assert_eq!(parse_dot_bracket("(.+x)", &o, rule), Err(StructureError::BadCharacter('x')));
    }
}
