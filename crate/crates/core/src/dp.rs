//! Symmetry-naive MFE dynamic program over one ordering.
//!
//! `M[i,j]`: best energy of segment `[i,j]` as a connected piece (or empty).
//! `Mb[i,j]`: `i` pairs with `j`. `Mm[i,j]`: inside of a multiloop, at least
//! one pair. The tensors keep running minima over the last enclosed base:
//! `Mb:int[i,j,k]` and `Mb:mul[i,j,k]` restrict the inner pair (interior loop
//! or rightmost multiloop pair) to end at or before `k`; `Mm:2[i,j,k]` is the
//! same for the more-than-one-pair branch of `Mm`.

use serde::Serialize;
use thiserror::Error;

use crate::energy::{add, Energy, EnergyModel, INF};
use crate::strands::{PairingRule, StrandOrdering};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("index ({i},{j},{k}) outside the defined range of {kind:?}")]
    OutOfRange { kind: AuxKind, i: usize, j: usize, k: usize },
    #[error("auxiliary tensors were not kept")]
    TensorsDropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AuxKind {
    /// `Mb:int`
    BInt,
    /// `Mb:mul`
    BMul,
    /// `Mm:2`
    M2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Keep the three O(N^3) tensors (needed for backtracking).
    pub keep_tensors: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { keep_tensors: true }
    }
}

/// Upper-triangular matrix over `1 <= i <= j + 1 <= N + 1`, rows contiguous.
#[derive(Debug, Clone)]
struct RowTri {
    n: usize,
    row: Vec<usize>,
    data: Vec<Energy>,
}

impl RowTri {
    fn new(n: usize, fill: Energy) -> Self {
        let mut row = vec![0; n + 2];
        let mut acc = 0;
        for (i, slot) in row.iter_mut().enumerate().skip(1) {
            *slot = acc;
            // j runs over i-1..=n
            acc += n + 2 - i;
        }
        RowTri { n, row, data: vec![fill; acc] }
    }

    #[inline(always)]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n + 1 && j + 1 >= i && j <= self.n);
        self.row[i] + (j + 1 - i)
    }

    #[inline(always)]
    fn get(&self, i: usize, j: usize) -> Energy {
        self.data[self.idx(i, j)]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, v: Energy) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

/// Same index set, columns contiguous.
#[derive(Debug, Clone)]
struct ColTri {
    n: usize,
    data: Vec<Energy>,
}

impl ColTri {
    fn new(n: usize, fill: Energy) -> Self {
        ColTri { n, data: vec![fill; (n + 1) * (n + 2) / 2] }
    }

    #[inline(always)]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= j + 1 && j <= self.n);
        j * (j + 1) / 2 + (i - 1)
    }

    #[inline(always)]
    fn get(&self, i: usize, j: usize) -> Energy {
        self.data[self.idx(i, j)]
    }

    #[inline(always)]
    fn column(&self, j: usize) -> &[Energy] {
        let s = j * (j + 1) / 2;
        &self.data[s..s + j + 1]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, v: Energy) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

/// Per-`(i,j)` slices indexed by `k - i`, `k` in `i..=j`.
#[derive(Debug, Clone)]
struct Tensors {
    n: usize,
    offset: Vec<usize>,
    bint: Vec<Energy>,
    bmul: Vec<Energy>,
    m2: Vec<Energy>,
}

impl Tensors {
    fn new(n: usize) -> Self {
        let mut offset = vec![0; (n + 1) * (n + 1)];
        let mut acc = 0;
        for i in 1..=n {
            for j in i..=n {
                offset[i * (n + 1) + j] = acc;
                acc += j - i + 1;
            }
        }
        Tensors { n, offset, bint: vec![INF; acc], bmul: vec![INF; acc], m2: vec![INF; acc] }
    }

    #[inline(always)]
    fn base(&self, i: usize, j: usize) -> usize {
        self.offset[i * (self.n + 1) + j]
    }

    fn cells(&self) -> usize {
        self.bint.len() * 3
    }
}

/// Filled DP matrices for one ordering.
#[derive(Debug, Clone)]
pub struct DpState {
    n: usize,
    strands: usize,
    assoc_total: Energy,
    m: RowTri,
    mm: RowTri,
    mb: ColTri,
    tensors: Option<Tensors>,
}

impl DpState {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn strand_count(&self) -> usize {
        self.strands
    }

    /// `(c - 1) * assoc`.
    pub fn association(&self) -> Energy {
        self.assoc_total
    }

    /// `M[i,j]`, defined for `1 <= i <= j + 1 <= N + 1`.
    #[inline]
    pub fn m(&self, i: usize, j: usize) -> Energy {
        self.m.get(i, j)
    }

    /// `Mb[i,j]`; `INF` for `j <= i`.
    #[inline]
    pub fn mb(&self, i: usize, j: usize) -> Energy {
        if j <= i {
            INF
        } else {
            self.mb.get(i, j)
        }
    }

    /// `Mm[i,j]`; `INF` for empty segments.
    #[inline]
    pub fn mm(&self, i: usize, j: usize) -> Energy {
        if j < i {
            INF
        } else {
            self.mm.get(i, j)
        }
    }

    /// Symmetry-naive MFE, `None` if no connected structure exists.
    pub fn snmfe(&self) -> Option<Energy> {
        let m = self.m(1, self.n);
        (m < INF).then(|| m + self.assoc_total)
    }

    pub fn has_tensors(&self) -> bool {
        self.tensors.is_some()
    }

    /// Checked tensor lookup. `Mb:int` and `Mb:mul` are defined for
    /// `i + 2 <= k <= j - 1`, `Mm:2` for `i + 1 <= k <= j`.
    pub fn aux_lookup(&self, kind: AuxKind, i: usize, j: usize, k: usize) -> Result<Energy, DpError> {
        let t = self.tensors.as_ref().ok_or(DpError::TensorsDropped)?;
        let ok = i >= 1
            && j <= self.n
            && match kind {
                AuxKind::BInt | AuxKind::BMul => i + 2 <= k && k + 1 <= j,
                AuxKind::M2 => i < k && k <= j,
            };
        if !ok {
            return Err(DpError::OutOfRange { kind, i, j, k });
        }
        Ok(self.aux_raw(t, kind, i, j, k))
    }

    /// Unchecked-range lookup: `INF` outside the defined range.
    #[inline]
    pub fn aux(&self, kind: AuxKind, i: usize, j: usize, k: usize) -> Energy {
        self.aux_lookup(kind, i, j, k).unwrap_or(INF)
    }

    #[inline(always)]
    fn aux_raw(&self, t: &Tensors, kind: AuxKind, i: usize, j: usize, k: usize) -> Energy {
        let at = t.base(i, j) + (k - i);
        match kind {
            AuxKind::BInt => t.bint[at],
            AuxKind::BMul => t.bmul[at],
            AuxKind::M2 => t.m2[at],
        }
    }

    /// Stored energy cells, matrices plus tensors.
    pub fn cell_count(&self) -> usize {
        self.m.data.len() + self.mm.data.len() + self.mb.data.len() + self.tensors.as_ref().map_or(0, Tensors::cells)
    }

    /// Tensor cells only.
    pub fn tensor_cells(&self) -> usize {
        self.tensors.as_ref().map_or(0, Tensors::cells)
    }
}

/// Fills every matrix for `ordering`.
pub fn fill<E: EnergyModel + ?Sized>(ordering: &StrandOrdering, model: &E, rule: PairingRule, opts: DpOptions) -> DpState {
    let n = ordering.len();
    let multi = model.multi();
    let (init, bp, nt) = (multi.init, multi.bp, multi.nt);

    let mut m = RowTri::new(n, INF);
    let mut mm = RowTri::new(n, INF);
    let mut mb = ColTri::new(n, INF);
    let mut tensors = opts.keep_tensors.then(|| Tensors::new(n));

    for i in 1..=n + 1 {
        m.set(i, i - 1, 0);
    }

    // nick_after[x]: nick at x + 1/2; first_nick[x]: smallest nick position >= x
    let nick_after: Vec<bool> = (0..=n + 1).map(|x| ordering.nick_after(x)).collect();
    let mut first_nick = vec![usize::MAX; n + 2];
    for x in (1..=n).rev() {
        first_nick[x] = if nick_after[x] { x } else { first_nick[x + 1] };
    }
    let free = |a: usize, b: usize| -> bool { b < a || first_nick[a] > b };

    let mut row_int = vec![INF; n + 1];
    let mut row_mul = vec![INF; n + 1];
    let mut row_m2 = vec![INF; n + 1];

    for l in 1..=n {
        for i in 1..=n + 1 - l {
            let j = i + l - 1;

            // Mb
            if j > i && ordering.can_pair(i, j, rule) {
                let mut best = INF;
                if free(i, j - 1) {
                    best = model.hairpin(ordering, i, j);
                }
                let mut min_int = INF;
                let mut min_mul = INF;
                let outer_mul_ok = !nick_after[i];
                for e in i + 2..j {
                    if free(e, j - 1) {
                        let col = mb.column(e);
                        let d_int_max = first_nick[i].min(e - 1);
                        for d in i + 1..e {
                            let inner = col[d - 1];
                            if inner >= INF {
                                continue;
                            }
                            if d <= d_int_max {
                                let v = inner + model.interior(ordering, i, d, e, j);
                                if v < min_int {
                                    min_int = v;
                                }
                            }
                            if outer_mul_ok && d >= i + 2 && !nick_after[d - 1] {
                                let left = mm.get(i + 1, d - 1);
                                if left < INF {
                                    let v = inner + left + init + 2 * bp + (j - e - 1) as Energy * nt;
                                    if v < min_mul {
                                        min_mul = v;
                                    }
                                }
                            }
                        }
                    }
                    row_int[e] = min_int;
                    row_mul[e] = min_mul;
                }
                best = best.min(min_int).min(min_mul);
                for x in i..j {
                    if !nick_after[x] {
                        continue;
                    }
                    let guard = (!nick_after[i] && !nick_after[j - 1])
                        || i == j - 1
                        || (x == i && !nick_after[j - 1])
                        || (x == j - 1 && !nick_after[i]);
                    if guard {
                        best = best.min(add(m.get(i + 1, x), m.get(x + 1, j - 1)));
                    }
                }
                mb.set(i, j, best);
                if let Some(t) = tensors.as_mut() {
                    let base = t.base(i, j);
                    for e in i + 2..j {
                        t.bint[base + e - i] = row_int[e];
                        t.bmul[base + e - i] = row_mul[e];
                    }
                }
            }

            // M and Mm
            let mut best_m = if free(i, j - 1) { 0 } else { INF };
            let mut best_mm = INF;
            let mut min_m2 = INF;
            for e in i + 1..=j {
                if free(e, j - 1) {
                    let col = mb.column(e);
                    for d in i..e {
                        let inner = col[d - 1];
                        if inner >= INF {
                            continue;
                        }
                        if d == i || !nick_after[d - 1] {
                            let v = add(m.get(i, d - 1), inner);
                            if v < best_m {
                                best_m = v;
                            }
                        }
                        if free(i, d - 1) {
                            let v = inner + bp + (d - i + j - e) as Energy * nt;
                            if v < best_mm {
                                best_mm = v;
                            }
                        }
                        if d > i && !nick_after[d - 1] {
                            let left = mm.get(i, d - 1);
                            if left < INF {
                                let v = inner + left + bp + (j - e) as Energy * nt;
                                if v < min_m2 {
                                    min_m2 = v;
                                }
                            }
                        }
                    }
                }
                row_m2[e] = min_m2;
            }
            m.set(i, j, best_m);
            mm.set(i, j, best_mm.min(min_m2));
            if let Some(t) = tensors.as_mut() {
                let base = t.base(i, j);
                for e in i + 1..=j {
                    t.m2[base + e - i] = row_m2[e];
                }
            }
        }
    }

    DpState {
        n,
        strands: ordering.strand_count(),
        assoc_total: crate::energy::association_energy(ordering, model),
        m,
        mm,
        mb,
        tensors,
    }
}
