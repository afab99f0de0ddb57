//! Per-ordering solves, fanned out over a worker pool.

use rayon::prelude::*;
use serde::Serialize;

use crate::backtrack::{true_mfe, MfeResult, SearchError, SearchOptions};
use crate::dp::{fill, DpOptions};
use crate::energy::{Energy, EnergyModel};
use crate::strands::{circular_permutations, PairingRule, StrandOrdering, StrandSystem};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MFE_THREADS";

#[derive(Debug, Clone, Serialize)]
pub struct OrderingOutcome {
    pub label: String,
    pub rank: usize,
    pub result: Result<MfeResult, String>,
    #[serde(skip)]
    pub error: Option<SearchError>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemResult {
    /// Index into `orderings` of the winner.
    pub best: usize,
    pub orderings: Vec<OrderingOutcome>,
}

impl SystemResult {
    pub fn winner(&self) -> &MfeResult {
        self.orderings[self.best].result.as_ref().expect("winner is feasible")
    }

    pub fn winner_label(&self) -> &str {
        &self.orderings[self.best].label
    }
}

fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            b = b.num_threads(n);
        }
    }
    b.build().expect("thread pool")
}

/// Orders to solve: every circular permutation, or the one requested.
pub fn orderings_for(system: &StrandSystem, only: Option<&StrandOrdering>) -> Vec<StrandOrdering> {
    match only {
        Some(o) => vec![o.clone()],
        None => circular_permutations(system),
    }
}

/// Fills and searches one ordering.
pub fn solve_ordering<E: EnergyModel + ?Sized>(
    ordering: &StrandOrdering,
    model: &E,
    rule: PairingRule,
    opts: SearchOptions,
) -> Result<MfeResult, SearchError> {
    let dp = fill(ordering, model, rule, DpOptions::default());
    true_mfe(ordering, &dp, model, rule, opts)
}

/// Symmetry-corrected minimum over the given orderings. Ties go to the
/// earliest ordering.
pub fn mfe_over<E: EnergyModel + ?Sized>(
    orderings: &[StrandOrdering],
    model: &E,
    rule: PairingRule,
    opts: SearchOptions,
) -> Result<SystemResult, SearchError> {
    let outcomes: Vec<OrderingOutcome> = pool().install(|| {
        orderings
            .par_iter()
            .enumerate()
            .map(|(rank, o)| {
                let r = solve_ordering(o, model, rule, opts);
                OrderingOutcome {
                    label: o.label().to_string(),
                    rank,
                    error: r.as_ref().err().cloned(),
                    result: r.map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    // a bound violation is a real failure, not an infeasible ordering
    if let Some(e) = outcomes.iter().filter_map(|o| o.error.clone()).find(|e| *e != SearchError::Infeasible) {
        return Err(e);
    }
    let mut best: Option<usize> = None;
    for (z, o) in outcomes.iter().enumerate() {
        if let Ok(r) = &o.result {
            let better = match best {
                None => true,
                Some(b) => r.energy < outcomes[b].result.as_ref().expect("feasible").energy,
            };
            if better {
                best = Some(z);
            }
        }
    }
    let best = best.ok_or(SearchError::Infeasible)?;
    Ok(SystemResult { best, orderings: outcomes })
}

pub fn mfe_all_orderings<E: EnergyModel + ?Sized>(
    system: &StrandSystem,
    model: &E,
    rule: PairingRule,
    opts: SearchOptions,
) -> Result<SystemResult, SearchError> {
    mfe_over(&circular_permutations(system), model, rule, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct SnmfeRow {
    pub label: String,
    /// `None` when the ordering admits no connected structure.
    pub snmfe: Option<Energy>,
}

/// Symmetry-naive minimum per ordering, without tensors.
pub fn snmfe_over<E: EnergyModel + ?Sized>(orderings: &[StrandOrdering], model: &E, rule: PairingRule) -> Vec<SnmfeRow> {
    pool().install(|| {
        orderings
            .par_iter()
            .map(|o| {
                let dp = fill(o, model, rule, DpOptions { keep_tensors: false });
                SnmfeRow { label: o.label().to_string(), snmfe: dp.snmfe() }
            })
            .collect()
    })
}
