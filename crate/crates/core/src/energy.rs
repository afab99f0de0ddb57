//! Loop energies, parameter files and total free energy.
//!
//! Loop energies are integers in hundredths of kcal/mol. Only the symmetry
//! term `kBT ln R` is real-valued.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strands::StrandOrdering;
use crate::structure::{loop_decomposition, rotational_symmetry, LoopKind, SecondaryStructure, StructureError};

/// Energy in centi-units.
pub type Energy = i32;

/// Sentinel for "no structure". Additions through [`add`] saturate here.
pub const INF: Energy = i32::MAX / 4;

/// Saturating sum that never leaves the `INF` sentinel.
#[inline(always)]
pub fn add(a: Energy, b: Energy) -> Energy {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

#[inline(always)]
pub fn is_finite(e: Energy) -> bool {
    e < INF
}

/// Loop energy provider. Indices are global and 1-based; `(i, j)` is the
/// closing pair and `(d, e)` the enclosed pair of an interior loop.
pub trait EnergyModel: Send + Sync {
    /// Hairpin closed by `(i, j)`; `INF` if not allowed.
    fn hairpin(&self, ordering: &StrandOrdering, i: usize, j: usize) -> Energy;
    /// Interior loop, bulge or stack.
    fn interior(&self, ordering: &StrandOrdering, i: usize, d: usize, e: usize, j: usize) -> Energy;
    fn multi(&self) -> MultiloopParams;
    /// Per-strand association penalty.
    fn association(&self) -> Energy;
    /// Thermal energy in centi-units.
    fn kbt(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiloopParams {
    pub init: Energy,
    pub bp: Energy,
    pub nt: Energy,
}

impl MultiloopParams {
    /// `init + b*bp + n*nt`.
    pub fn energy(&self, b: usize, n: usize) -> Energy {
        self.init + b as Energy * self.bp + n as Energy * self.nt
    }
}

/// Linear test model: sequence independent, integer constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub hairpin_base: Energy,
    pub hairpin_per_nt: Energy,
    pub stack: Energy,
    pub interior_base: Energy,
    pub interior_per_nt: Energy,
    pub multi_init: Energy,
    pub multi_bp: Energy,
    pub multi_nt: Energy,
    pub assoc: Energy,
    pub kbt: f64,
    pub min_hairpin: usize,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams {
            hairpin_base: 300,
            hairpin_per_nt: 10,
            stack: -200,
            interior_base: 100,
            interior_per_nt: 30,
            multi_init: 340,
            multi_bp: 40,
            multi_nt: 10,
            assoc: 196,
            kbt: 61.6,
            min_hairpin: 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("line {line}: expected `key=value`")]
    Malformed { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`")]
    BadValue { line: usize, key: String },
    #[error("kbt must be positive")]
    NonPositiveKbt,
}

impl LinearParams {
    pub fn test_model() -> Self {
        Self::default()
    }

    /// Overrides defaults with `key=value` lines.
    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let mut p = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ParamsError::Malformed { line })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ParamsError::BadValue { line, key: key.to_string() };
            let int = || value.parse::<Energy>().map_err(|_| bad());
            match key {
                "hairpin_base" => p.hairpin_base = int()?,
                "hairpin_per_nt" => p.hairpin_per_nt = int()?,
                "stack" => p.stack = int()?,
                "interior_base" => p.interior_base = int()?,
                "interior_per_nt" => p.interior_per_nt = int()?,
                "multi_init" => p.multi_init = int()?,
                "multi_bp" => p.multi_bp = int()?,
                "multi_nt" => p.multi_nt = int()?,
                "assoc" => p.assoc = int()?,
                "kbt_centi" | "kbt" => p.kbt = value.parse().map_err(|_| bad())?,
                "min_hairpin" => p.min_hairpin = value.parse().map_err(|_| bad())?,
                _ => return Err(ParamsError::UnknownKey { line, key: key.to_string() }),
            }
        }
        if !(p.kbt > 0.0) || !p.kbt.is_finite() {
            return Err(ParamsError::NonPositiveKbt);
        }
        Ok(p)
    }

    pub fn hairpin_size(&self, unpaired: usize) -> Energy {
        if unpaired < self.min_hairpin {
            INF
        } else {
            self.hairpin_base + self.hairpin_per_nt * unpaired as Energy
        }
    }

    pub fn interior_sides(&self, s1: usize, s2: usize) -> Energy {
        if s1 == 0 && s2 == 0 {
            self.stack
        } else {
            self.interior_base + self.interior_per_nt * (s1 + s2) as Energy
        }
    }
}

impl EnergyModel for LinearParams {
    #[inline]
    fn hairpin(&self, _: &StrandOrdering, i: usize, j: usize) -> Energy {
        self.hairpin_size(j - i - 1)
    }

    #[inline]
    fn interior(&self, _: &StrandOrdering, i: usize, d: usize, e: usize, j: usize) -> Energy {
        self.interior_sides(d - i - 1, j - e - 1)
    }

    #[inline]
    fn multi(&self) -> MultiloopParams {
        MultiloopParams { init: self.multi_init, bp: self.multi_bp, nt: self.multi_nt }
    }

    #[inline]
    fn association(&self) -> Energy {
        self.assoc
    }

    #[inline]
    fn kbt(&self) -> f64 {
        self.kbt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// Sum of loop energies.
    pub loops: Energy,
    /// `(c - 1) * assoc`.
    pub association: Energy,
    /// `kBT ln R`.
    pub symmetry: f64,
    pub symmetry_degree: usize,
    pub total: f64,
}

impl EnergyBreakdown {
    /// Loop and association terms only.
    pub fn naive(&self) -> Energy {
        self.loops + self.association
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnergyError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("loop closed by ({0},{1}) is not allowed by the energy model")]
    Forbidden(usize, usize),
}

/// Sum of loop energies (no association, no symmetry term).
pub fn loop_energy<E: EnergyModel + ?Sized>(s: &SecondaryStructure, ordering: &StrandOrdering, model: &E) -> Result<Energy, EnergyError> {
    let loops = loop_decomposition(s, ordering)?;
    let multi = model.multi();
    let mut total: Energy = 0;
    for lp in &loops {
        let Some((i, j)) = lp.closing else { continue };
        let e = match lp.kind {
            LoopKind::Exterior => 0,
            LoopKind::Hairpin => model.hairpin(ordering, i, j),
            LoopKind::Stack | LoopKind::Bulge | LoopKind::Interior => {
                let (d, e) = lp.children[0];
                model.interior(ordering, i, d, e, j)
            }
            LoopKind::Multiloop => multi.energy(lp.bordering_count(), lp.unpaired),
        };
        if !is_finite(e) {
            return Err(EnergyError::Forbidden(i, j));
        }
        total += e;
    }
    Ok(total)
}

/// Loop energies plus the association term.
pub fn naive_free_energy<E: EnergyModel + ?Sized>(s: &SecondaryStructure, ordering: &StrandOrdering, model: &E) -> Result<Energy, EnergyError> {
    Ok(loop_energy(s, ordering, model)? + association_energy(ordering, model))
}

pub fn association_energy<E: EnergyModel + ?Sized>(ordering: &StrandOrdering, model: &E) -> Energy {
    (ordering.strand_count() as Energy - 1) * model.association()
}

/// `kBT ln R`.
pub fn symmetry_penalty(kbt: f64, r: usize) -> f64 {
    if r <= 1 {
        0.0
    } else {
        kbt * (r as f64).ln()
    }
}

pub fn free_energy<E: EnergyModel + ?Sized>(s: &SecondaryStructure, ordering: &StrandOrdering, model: &E) -> Result<EnergyBreakdown, EnergyError> {
    let loops = loop_energy(s, ordering, model)?;
    let association = association_energy(ordering, model);
    let r = rotational_symmetry(s, ordering);
    let symmetry = symmetry_penalty(model.kbt(), r);
    Ok(EnergyBreakdown { loops, association, symmetry, symmetry_degree: r, total: (loops + association) as f64 + symmetry })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiloop_linear_form() {
        let m = LinearParams::test_model().multi();
        assert_eq!(m.energy(3, 4), 500);
        assert_eq!(m.energy(0, 0), 340);
        assert_eq!(m.energy(5, 7) - m.init, (m.energy(2, 3) - m.init) + (m.energy(3, 4) - m.init));
    }

    #[test]
    fn saturating_sentinel() {
        assert_eq!(add(INF, -1000), INF);
        assert_eq!(add(INF - 1, 5), INF);
        assert_eq!(add(-3, 5), 2);
    }

    #[test]
    fn hairpin_stack_example() {
        let o = StrandOrdering::from_sequences(&["GGGAAAACCC"]).unwrap();
        let p = LinearParams::test_model();
        let s = SecondaryStructure::from_pairs(10, [(1, 10), (2, 9), (3, 8)]).unwrap();
        assert_eq!(naive_free_energy(&s, &o, &p).unwrap(), -60);
        assert_eq!(naive_free_energy(&SecondaryStructure::empty(10), &o, &p).unwrap(), 0);
        let tight = SecondaryStructure::from_pairs(10, [(3, 5)]).unwrap();
        assert_eq!(naive_free_energy(&tight, &o, &p), Err(EnergyError::Forbidden(3, 5)));
    }

    #[test]
    fn dimer_breakdown() {
        let o = StrandOrdering::from_sequences(&["AT", "AT"]).unwrap();
        let p = LinearParams::test_model();
        let sym = SecondaryStructure::from_pairs(4, [(1, 4), (2, 3)]).unwrap();
        let b = free_energy(&sym, &o, &p).unwrap();
        assert_eq!((b.loops, b.association, b.symmetry_degree), (-200, 196, 2));
        assert!((b.symmetry - 61.6 * 2f64.ln()).abs() < 1e-12);
        assert!((b.symmetry - 42.70).abs() < 0.005);
        let asym = SecondaryStructure::from_pairs(4, [(1, 4)]).unwrap();
        let b = free_energy(&asym, &o, &p).unwrap();
        assert_eq!((b.loops, b.symmetry, b.total), (0, 0.0, 196.0));
    }

    #[test]
    fn params_file() {
        let p = LinearParams::parse("stack=-150\n# c\nkbt_centi = 59.3\nmin_hairpin=0\n").unwrap();
        assert_eq!(p.stack, -150);
        assert_eq!(p.min_hairpin, 0);
        assert!((p.kbt - 59.3).abs() < 1e-12);
        assert!(matches!(LinearParams::parse("stack"), Err(ParamsError::Malformed { line: 1 })));
        assert!(matches!(LinearParams::parse("foo=1"), Err(ParamsError::UnknownKey { .. })));
        assert!(matches!(LinearParams::parse("assoc=1.5"), Err(ParamsError::BadValue { .. })));
        assert_eq!(LinearParams::parse("kbt_centi=0"), Err(ParamsError::NonPositiveKbt));
    }

    #[test]
    fn penalty_monotone() {
        let mut last = -1.0;
        for r in 1..10 {
            let p = symmetry_penalty(61.6, r);
            assert!(p > last);
            last = p;
        }
    }
}
