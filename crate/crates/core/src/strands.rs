//! Strands, strand multisets, circular orderings and nick indexing.
//!
//! Bases are addressed with global 1-based indices `1..=N` along the chosen
//! ordering. A nick sits at half-position `x + 1/2` whenever base `x` ends a
//! strand and `x < N`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the total strand count; enumeration cost grows as (c-1)!.
pub const DEFAULT_MAX_STRANDS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    A,
    C,
    G,
    /// T in DNA, U in RNA.
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    #[default]
    Dna,
    Rna,
}

/// Which base pairs may form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PairingRule {
    pub wobble: bool,
}

impl PairingRule {
    pub const WATSON_CRICK: PairingRule = PairingRule { wobble: false };
    pub const WITH_WOBBLE: PairingRule = PairingRule { wobble: true };

    pub fn can_pair(self, a: Base, b: Base) -> bool {
        use Base::*;
        matches!((a, b), (A, T) | (T, A) | (C, G) | (G, C))
            || (self.wobble && matches!((a, b), (G, T) | (T, G)))
    }
}

impl Base {
    pub fn symbol(self, alphabet: Alphabet) -> char {
        match (self, alphabet) {
            (Base::A, _) => 'A',
            (Base::C, _) => 'C',
            (Base::G, _) => 'G',
            (Base::T, Alphabet::Dna) => 'T',
            (Base::T, Alphabet::Rna) => 'U',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `<name> <sequence> <repetition>`")]
    MalformedLine { line: usize },
    #[error("line {line}: illegal base `{ch}`")]
    IllegalBase { line: usize, ch: char },
    #[error("line {line}: sequence mixes T and U")]
    MixedAlphabet { line: usize },
    #[error("line {line}: repetition must be a positive integer")]
    BadRepetition { line: usize },
    #[error("line {line}: duplicate strand name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("no strands declared")]
    Empty,
    #[error("{count} strands exceed the limit of {max}")]
    TooManyStrands { count: usize, max: usize },
    #[error("unknown strand name in ordering `{0}`")]
    UnknownOrdering(String),
    #[error("ordering `{0}` does not use every strand exactly as often as declared")]
    OrderingMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strand {
    pub name: String,
    pub sequence: Vec<Base>,
}

impl Strand {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandType {
    pub strand: Strand,
    pub count: usize,
}

/// A multiset of strand types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandSystem {
    pub types: Vec<StrandType>,
    pub alphabet: Alphabet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Merge strands whose sequences are equal into one type.
    pub merge: bool,
    pub max_strands: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { merge: true, max_strands: DEFAULT_MAX_STRANDS }
    }
}

/// Parses a strand file with default options.
pub fn parse_system(text: &str) -> Result<StrandSystem, ParseError> {
    parse_system_with(text, ParseOptions::default())
}

pub fn parse_system_with(text: &str, opts: ParseOptions) -> Result<StrandSystem, ParseError> {
    let mut types: Vec<StrandType> = Vec::new();
    let mut alphabet: Option<Alphabet> = None;
    let mut names = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ParseError::MalformedLine { line });
        }
        let name = fields[0].to_string();
        let mut seq = Vec::with_capacity(fields[1].len());
        for ch in fields[1].chars() {
            let (base, alpha) = match ch.to_ascii_uppercase() {
                'A' => (Base::A, None),
                'C' => (Base::C, None),
                'G' => (Base::G, None),
                'T' => (Base::T, Some(Alphabet::Dna)),
                'U' => (Base::T, Some(Alphabet::Rna)),
                _ => return Err(ParseError::IllegalBase { line, ch }),
            };
            if let Some(a) = alpha {
                match alphabet {
                    Some(prev) if prev != a => return Err(ParseError::MixedAlphabet { line }),
                    _ => alphabet = Some(a),
                }
            }
            seq.push(base);
        }
        let count: usize = fields[2].parse().map_err(|_| ParseError::BadRepetition { line })?;
        if count == 0 {
            return Err(ParseError::BadRepetition { line });
        }
        if !names.insert(name.clone()) {
            return Err(ParseError::DuplicateName { line, name });
        }
        if opts.merge {
            if let Some(t) = types.iter_mut().find(|t| t.strand.sequence == seq) {
                t.count += count;
                continue;
            }
        }
        types.push(StrandType { strand: Strand { name, sequence: seq }, count });
    }
    if types.is_empty() {
        return Err(ParseError::Empty);
    }
    let system = StrandSystem { types, alphabet: alphabet.unwrap_or_default() };
    let c = system.strand_count();
    if c > opts.max_strands {
        return Err(ParseError::TooManyStrands { count: c, max: opts.max_strands });
    }
    Ok(system)
}

impl StrandSystem {
    pub fn new(types: Vec<(Strand, usize)>, alphabet: Alphabet) -> Self {
        StrandSystem {
            types: types.into_iter().map(|(strand, count)| StrandType { strand, count }).collect(),
            alphabet,
        }
    }

    /// Total strand count c.
    pub fn strand_count(&self) -> usize {
        self.types.iter().map(|t| t.count).sum()
    }

    pub fn total_bases(&self) -> usize {
        self.types.iter().map(|t| t.count * t.strand.len()).sum()
    }

    /// Builds the ordering with the given type string, canonicalised to its
    /// least rotation.
    pub fn ordering(&self, type_string: &[usize]) -> Result<StrandOrdering, ParseError> {
        let mut counts = vec![0usize; self.types.len()];
        for &t in type_string {
            if t >= self.types.len() {
                return Err(ParseError::UnknownOrdering(format!("{type_string:?}")));
            }
            counts[t] += 1;
        }
        if counts.iter().zip(&self.types).any(|(&n, t)| n != t.count) {
            return Err(ParseError::OrderingMismatch(self.render_types(type_string)));
        }
        Ok(StrandOrdering::build(self, least_rotation(type_string)))
    }

    /// Parses an ordering given either as separated names (`X,Y X`) or as a
    /// concatenation of names (`XYX`).
    pub fn parse_ordering(&self, text: &str) -> Result<StrandOrdering, ParseError> {
        let text = text.trim();
        let tokens: Vec<&str> = if text.contains([',', ' ', '+']) {
            text.split([',', ' ', '+']).filter(|s| !s.is_empty()).collect()
        } else {
            let mut out = Vec::new();
            let mut rest = text;
            while !rest.is_empty() {
                let hit = self
                    .types
                    .iter()
                    .map(|t| t.strand.name.as_str())
                    .filter(|n| rest.starts_with(n))
                    .max_by_key(|n| n.len())
                    .ok_or_else(|| ParseError::UnknownOrdering(text.to_string()))?;
                out.push(hit);
                rest = &rest[hit.len()..];
            }
            out
        };
        let mut ids = Vec::with_capacity(tokens.len());
        for tok in tokens {
            let id = self
                .types
                .iter()
                .position(|t| t.strand.name == tok)
                .ok_or_else(|| ParseError::UnknownOrdering(text.to_string()))?;
            ids.push(id);
        }
        self.ordering(&ids)
    }

    pub fn render_types(&self, type_string: &[usize]) -> String {
        let single = self.types.iter().all(|t| t.strand.name.chars().count() == 1);
        let names: Vec<&str> = type_string.iter().map(|&t| self.types[t].strand.name.as_str()).collect();
        if single {
            names.concat()
        } else {
            names.join(",")
        }
    }
}

/// One canonical representative per distinct circular arrangement of the
/// multiset, in lexicographic order of type strings.
pub fn circular_permutations(system: &StrandSystem) -> Vec<StrandOrdering> {
    necklaces(&system.types.iter().map(|t| t.count).collect::<Vec<_>>())
        .into_iter()
        .map(|word| StrandOrdering::build(system, word))
        .collect()
}

/// All necklaces (least-rotation words) with the given letter multiplicities.
pub fn necklaces(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut word: Vec<usize> = counts.iter().enumerate().flat_map(|(t, &n)| std::iter::repeat(t).take(n)).collect();
    let mut out = Vec::new();
    if word.is_empty() {
        return out;
    }
    // the least rotation always starts with the smallest letter, which sits at
    // position 0 of the sorted word; permute the remainder only
    loop {
        if is_least_rotation(&word) {
            out.push(word.clone());
        }
        if !next_permutation(&mut word[1..]) {
            break;
        }
    }
    out
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn is_least_rotation(word: &[usize]) -> bool {
    let n = word.len();
    (1..n).all(|r| {
        for k in 0..n {
            let a = word[k];
            let b = word[(k + r) % n];
            if a != b {
                return a < b;
            }
        }
        true
    })
}

/// Lexicographically least rotation.
pub fn least_rotation(word: &[usize]) -> Vec<usize> {
    let n = word.len();
    (0..n.max(1))
        .map(|r| word.iter().cycle().skip(r).take(n).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Shortest repeating prefix, its repetition count and all symmetry degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryProfile {
    /// Fundamental component as a type string.
    pub fundamental: Vec<usize>,
    /// Maximum symmetry degree v.
    pub v: usize,
    /// All symmetry degrees (the divisors of v), ascending.
    pub degrees: Vec<usize>,
}

pub fn symmetry_profile_of(types: &[usize]) -> SymmetryProfile {
    let c = types.len();
    let p = (1..=c)
        .find(|&p| c % p == 0 && (p..c).all(|k| types[k] == types[k - p]))
        .unwrap_or(c);
    let v = c / p.max(1);
    SymmetryProfile { fundamental: types[..p].to_vec(), v, degrees: divisors(v) }
}

/// Ascending divisors of `n`.
pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// A concrete circular ordering with global base indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandOrdering {
    types: Vec<usize>,
    names: Vec<String>,
    label: String,
    /// bases[0] is a placeholder so indices are 1-based.
    bases: Vec<Base>,
    /// 1-based index of each strand's first base.
    starts: Vec<usize>,
    /// nick_prefix[x] = number of nicks at half-positions y + 1/2 with y <= x.
    nick_prefix: Vec<u32>,
    profile: SymmetryProfile,
    alphabet: Alphabet,
}

impl StrandOrdering {
    fn build(system: &StrandSystem, types: Vec<usize>) -> Self {
        let mut bases = vec![Base::A];
        let mut starts = Vec::with_capacity(types.len());
        for &t in &types {
            starts.push(bases.len());
            bases.extend_from_slice(&system.types[t].strand.sequence);
        }
        let n = bases.len() - 1;
        let mut nick_prefix = vec![0u32; n + 1];
        let mut running = 0;
        for (x, slot) in nick_prefix.iter_mut().enumerate().skip(1) {
            if x < n && starts.contains(&(x + 1)) {
                running += 1;
            }
            *slot = running;
        }
        let profile = symmetry_profile_of(&types);
        StrandOrdering {
            label: system.render_types(&types),
            names: system.types.iter().map(|t| t.strand.name.clone()).collect(),
            types,
            bases,
            starts,
            nick_prefix,
            profile,
            alphabet: system.alphabet,
        }
    }

    /// Builds a single-type-per-strand ordering directly from sequences, in
    /// the order given (no canonical rotation).
    pub fn from_sequences(seqs: &[&str]) -> Result<Self, ParseError> {
        let mut types: Vec<StrandType> = Vec::new();
        let mut word = Vec::new();
        let mut alphabet = None;
        for s in seqs {
            let sys = parse_system(&format!("s {s} 1"))?;
            if s.contains(['T', 't']) || s.contains(['U', 'u']) {
                if alphabet.is_some_and(|a| a != sys.alphabet) {
                    return Err(ParseError::MixedAlphabet { line: 1 });
                }
                alphabet = Some(sys.alphabet);
            }
            let seq = sys.types[0].strand.sequence.clone();
            let id = match types.iter().position(|t| t.strand.sequence == seq) {
                Some(id) => id,
                None => {
                    let name = ((b'A' + types.len() as u8) as char).to_string();
                    types.push(StrandType { strand: Strand { name, sequence: seq }, count: 0 });
                    types.len() - 1
                }
            };
            types[id].count += 1;
            word.push(id);
        }
        let system = StrandSystem { types, alphabet: alphabet.unwrap_or_default() };
        Ok(StrandOrdering::build(&system, word))
    }

    /// Total base count N.
    pub fn len(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Strand count c.
    pub fn strand_count(&self) -> usize {
        self.types.len()
    }

    pub fn type_string(&self) -> &[usize] {
        &self.types
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn type_name(&self, t: usize) -> &str {
        &self.names[t]
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Base at global 1-based index `i`.
    #[inline]
    pub fn base(&self, i: usize) -> Base {
        self.bases[i]
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases[1..]
    }

    /// 1-based start of each strand.
    pub fn strand_starts(&self) -> &[usize] {
        &self.starts
    }

    /// Index of the strand containing base `i`.
    pub fn strand_of(&self, i: usize) -> usize {
        self.starts.partition_point(|&s| s <= i) - 1
    }

    /// True if a nick sits at `x + 1/2`.
    #[inline]
    pub fn nick_after(&self, x: usize) -> bool {
        x >= 1 && x < self.len() && self.nick_prefix[x] != self.nick_prefix[x - 1]
    }

    /// Nicks at half-positions `x + 1/2` for `from <= x <= to`; zero when
    /// `to < from`.
    #[inline]
    pub fn nicks(&self, from: usize, to: usize) -> u32 {
        if to < from {
            return 0;
        }
        let to = to.min(self.len());
        let lo = if from == 0 { 0 } else { self.nick_prefix[from - 1] };
        self.nick_prefix[to] - lo
    }

    /// Nick positions x (nick at x + 1/2), ascending.
    pub fn nick_positions(&self) -> Vec<usize> {
        self.starts.iter().skip(1).map(|s| s - 1).collect()
    }

    pub fn symmetry_profile(&self) -> &SymmetryProfile {
        &self.profile
    }

    /// Maximum symmetry degree v.
    pub fn max_symmetry(&self) -> usize {
        self.profile.v
    }

    #[inline]
    pub fn can_pair(&self, i: usize, j: usize, rule: PairingRule) -> bool {
        rule.can_pair(self.bases[i], self.bases[j])
    }

    /// Sequence rendered with `+` between strands.
    pub fn sequence_string(&self) -> String {
        let mut s = String::with_capacity(self.len() + self.strand_count());
        for i in 1..=self.len() {
            if i > 1 && self.starts.contains(&i) {
                s.push('+');
            }
            s.push(self.bases[i].symbol(self.alphabet));
        }
        s
    }

    /// Maps index `i` forward by `shift` positions around the circle.
    #[inline]
    pub fn rotate_index(&self, i: usize, shift: usize) -> usize {
        (i - 1 + shift) % self.len() + 1
    }
}

impl fmt::Display for StrandOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
