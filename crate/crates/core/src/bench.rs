//! Wall-clock scaling runs.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backtrack::{true_mfe, SearchOptions};
use crate::dp::{fill, DpOptions};
use crate::energy::EnergyModel;
use crate::strands::{PairingRule, StrandOrdering};

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub fill_ms: f64,
    pub backtrack_ms: f64,
    pub scanned_structures: usize,
}

/// A random single strand of length `n`.
pub fn random_strand(n: usize, seed: u64) -> StrandOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let seq: String = (0..n).map(|_| ['A', 'C', 'G', 'U'][rng.gen_range(0..4)]).collect();
    StrandOrdering::from_sequences(&[seq.as_str()]).expect("valid sequence")
}

/// Best-of-`repeats` fill and backtrack times on a random strand per size.
pub fn run<E: EnergyModel + ?Sized>(sizes: &[usize], repeats: usize, seed: u64, model: &E, rule: PairingRule) -> Vec<BenchRow> {
    sizes
        .iter()
        .map(|&n| {
            let o = random_strand(n, seed);
            let mut fill_ms = f64::INFINITY;
            let mut backtrack_ms = f64::INFINITY;
            let mut scanned = 0;
            for _ in 0..repeats.max(1) {
                let t = Instant::now();
                let dp = fill(&o, model, rule, DpOptions::default());
                fill_ms = fill_ms.min(t.elapsed().as_secs_f64() * 1e3);
                let t = Instant::now();
                let r = true_mfe(&o, &dp, model, rule, SearchOptions::default());
                backtrack_ms = backtrack_ms.min(t.elapsed().as_secs_f64() * 1e3);
                scanned = r.map(|r| r.stats.scanned).unwrap_or(0);
            }
            BenchRow { n, fill_ms, backtrack_ms, scanned_structures: scanned }
        })
        .collect()
}

/// Time ratios between consecutive rows.
pub fn ratios(rows: &[BenchRow]) -> Vec<f64> {
    rows.windows(2).map(|w| w[1].fill_ms / w[0].fill_ms).collect()
}
