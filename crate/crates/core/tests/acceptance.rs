//! End-to-end acceptance checks, one report line per criterion.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strandfold::backtrack::{MfeResult, SearchError, SearchOptions, Termination};
use strandfold::bench;
use strandfold::energy::{free_energy, naive_free_energy, LinearParams};
use strandfold::oracle::{brute_mfe, enumerate_structures, oracle_symmetry, BruteResult, EnumerationConfig, OracleError};
use strandfold::pipeline::{mfe_all_orderings, snmfe_over, SystemResult};
use strandfold::strands::{circular_permutations, divisors, parse_system, PairingRule, StrandOrdering};
use strandfold::structure::{is_connected, is_unpseudoknotted, rotational_symmetry, segment_length, LoopKind, SecondaryStructure};
use strandfold::symmetry::{
    admissible_cuts, central_loop, components_after_cut, cut_count_formula, enumerate_cuts, find_admissible_cut, is_admissible,
    slice_and_swap, SymmetricCut,
};

const CORPUS_SEED: u64 = 0x5EED_2024;
const CORPUS_SIZE: usize = 600;
const RULE: PairingRule = PairingRule::WATSON_CRICK;

struct Run {
    text: String,
    brute: Result<BruteResult, OracleError>,
    ours: Result<SystemResult, SearchError>,
    low: Result<SystemResult, SearchError>,
}

struct Context {
    runs: Vec<Run>,
    brute_time: Duration,
    ours_time: Duration,
}

fn traced() -> SearchOptions {
    SearchOptions { trace: true, keep_scanned: true, ..Default::default() }
}

fn build_context() -> Context {
    let model = LinearParams::test_model();
    let cfg = EnumerationConfig::default();
    let mut runs = Vec::new();
    let (mut brute_time, mut ours_time) = (Duration::ZERO, Duration::ZERO);
    for inst in common::corpus(CORPUS_SEED, CORPUS_SIZE) {
        let t = Instant::now();
        let brute = brute_mfe(&inst.system, &model, &cfg);
        brute_time += t.elapsed();
        let t = Instant::now();
        let ours = mfe_all_orderings(&inst.system, &model, RULE, traced());
        ours_time += t.elapsed();
        let low = mfe_all_orderings(&inst.system, &model, RULE, SearchOptions { low_mem: true, ..traced() });
        runs.push(Run { text: inst.text, brute, ours, low });
    }
    Context { runs, brute_time, ours_time }
}

fn feasible(sys: &SystemResult) -> impl Iterator<Item = &MfeResult> {
    sys.orderings.iter().filter_map(|o| o.result.as_ref().ok())
}

fn criterion_1(ctx: &Context) -> Result<String, String> {
    let model = LinearParams::test_model();
    let mut compared = 0;
    let mut infeasible = 0;
    let mut symmetric_wins = 0;
    for run in &ctx.runs {
        match (&run.brute, &run.ours) {
            (Err(OracleError::NoStructure), Err(SearchError::Infeasible)) => infeasible += 1,
            (Ok(b), Ok(r)) => {
                let w = r.winner();
                if (w.energy - b.energy).abs() > 1e-9 {
                    return Err(format!("{}: ours {} vs oracle {}", run.text.trim(), w.energy, b.energy));
                }
                if w.breakdown.symmetry_degree == b.witness.symmetry && w.breakdown.naive() != b.witness.naive {
                    return Err(format!("{}: integer parts differ", run.text.trim()));
                }
                let systems = circular_permutations(&parse_system(&run.text).unwrap());
                let ordering = systems.iter().find(|o| o.label() == r.winner_label()).expect("winner ordering");
                let again = free_energy(&w.structure, ordering, &model).map_err(|e| e.to_string())?;
                if again.total != w.energy {
                    return Err(format!("{}: witness re-evaluates to {}", run.text.trim(), again.total));
                }
                if w.breakdown.symmetry_degree > 1 {
                    symmetric_wins += 1;
                }
                compared += 1;
            }
            (b, r) => {
                return Err(format!(
                    "{}: oracle {:?} vs ours {:?}",
                    run.text.trim(),
                    b.as_ref().map(|x| x.energy),
                    r.as_ref().map(|x| x.winner().energy)
                ))
            }
        }
    }
    let total = ctx.brute_time + ctx.ours_time;
    if total > Duration::from_secs(300) {
        return Err(format!("corpus took {total:?}"));
    }
    if compared + infeasible < 500 {
        return Err(format!("only {} systems", compared + infeasible));
    }
    Ok(format!(
        "{compared} systems agree, {infeasible} infeasible on both sides, {symmetric_wins} with symmetric optimum, {:.1}s",
        total.as_secs_f64()
    ))
}

fn criterion_2(ctx: &Context) -> Result<String, String> {
    let model = LinearParams::test_model();
    let mut orderings = 0;
    for run in &ctx.runs {
        let system = parse_system(&run.text).unwrap();
        let rows = snmfe_over(&circular_permutations(&system), &model, RULE);
        let oracle: BTreeMap<String, Option<i32>> = match &run.brute {
            Ok(b) => b.per_ordering.iter().map(|o| (o.ordering.clone(), o.snmfe)).collect(),
            Err(OracleError::NoStructure) => rows.iter().map(|r| (r.label.clone(), None)).collect(),
            Err(e) => return Err(format!("{}: {e}", run.text.trim())),
        };
        for row in rows {
            if oracle.get(&row.label) != Some(&row.snmfe) {
                return Err(format!("{} [{}]: dp {:?} vs oracle {:?}", run.text.trim(), row.label, row.snmfe, oracle.get(&row.label)));
            }
            orderings += 1;
        }
    }
    Ok(format!("{orderings} orderings match exactly"))
}

fn criterion_3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for &v in &[2usize, 3, 4, 6] {
        for len in 1..=60 / v {
            for types in 1..=2usize {
                // v copies of a block of `types` strands
                if types * len * v > 60 || (types == 2 && len < 2) {
                    continue;
                }
                let lens: Vec<usize> = if types == 1 { vec![len] } else { vec![len / 2 + len % 2, len / 2] };
                let block: Vec<String> =
                    lens.iter().map(|&l| (0..l).map(|_| *['A', 'C', 'G', 'T'].choose(&mut rng).unwrap()).collect()).collect();
                if types == 2 && block[0] == block[1] {
                    continue;
                }
                let seqs: Vec<&str> = (0..v).flat_map(|_| block.iter().map(String::as_str)).collect();
                let o = StrandOrdering::from_sequences(&seqs).unwrap();
                if o.max_symmetry() != v {
                    continue;
                }
                let n = o.len();
                let c = o.strand_count();
                let mut direct = HashSet::new();
                for r in divisors(v).into_iter().filter(|&r| r > 1) {
                    for x in 1..n {
                        if o.nick_after(x) {
                            continue;
                        }
                        let mut orbit: Vec<usize> = (0..r).map(|k| (x - 1 + k * n / r) % n + 1).collect();
                        orbit.sort_unstable();
                        direct.insert((r, orbit));
                    }
                }
                let formula = cut_count_formula(n, c, v);
                let listed = enumerate_cuts(&o).len();
                if listed != formula || direct.len() != formula {
                    return Err(format!("v={v} N={n} c={c}: listed {listed}, direct {}, formula {formula}", direct.len()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} orderings, counts match"))
}

/// Symmetric orderings with N <= 14 for exhaustive sweeps.
fn sweep_orderings() -> Vec<StrandOrdering> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    let mut random = |len: usize| -> String { (0..len).map(|_| *['A', 'C', 'G', 'T'].choose(&mut rng).unwrap()).collect() };
    let mut shapes: Vec<Vec<String>> = Vec::new();
    for len in 3..=7 {
        for _ in 0..6 {
            let x = random(len);
            shapes.push(vec![x.clone(), x]);
        }
    }
    for x in ["GCATGC", "GGATCC", "ACGCGT", "GACGTC", "GCGCGC", "AGCGCT", "GCAAGC", "CGATCG", "GGCGCC", "GACGTCA", "GCAATGC"] {
        shapes.push(vec![x.into(), x.into()]);
    }
    for len in 3..=4 {
        for _ in 0..8 {
            let x = random(len);
            shapes.push(vec![x.clone(), x.clone(), x]);
        }
    }
    for x in ["GCGC", "GATC", "GGCC", "CGCG", "ACGT"] {
        shapes.push(vec![x.into(), x.into(), x.into()]);
    }
    for _ in 0..8 {
        let x = random(3);
        shapes.push(vec![x.clone(); 4]);
    }
    for x in ["GCC", "GGC", "GAC", "GTC", "CGA"] {
        shapes.push(vec![x.into(); 4]);
    }
    for x in ["GC", "AT", "GA"] {
        shapes.push(vec![x.into(); 6]);
    }
    for _ in 0..6 {
        let x = random(3);
        let y = random(3);
        if x != y {
            shapes.push(vec![x.clone(), y.clone(), x, y]);
        }
    }
    for s in shapes {
        let refs: Vec<&str> = s.iter().map(String::as_str).collect();
        let o = StrandOrdering::from_sequences(&refs).unwrap();
        if o.max_symmetry() > 1 && o.len() <= 14 {
            out.push(o);
        }
    }
    out
}

/// Larger symmetric orderings (N <= 18) for building swap pairs.
fn sandwich_orderings() -> Vec<StrandOrdering> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = sweep_orderings();
    for (len, copies, samples) in [(8, 2, 30), (9, 2, 30), (5, 3, 30), (6, 3, 30), (4, 4, 30)] {
        for _ in 0..samples {
            let x: String = (0..len).map(|_| *['A', 'C', 'G', 'T'].choose(&mut rng).unwrap()).collect();
            let o = StrandOrdering::from_sequences(&vec![x.as_str(); copies]).unwrap();
            if o.max_symmetry() > 1 {
                out.push(o);
            }
        }
    }
    out
}

fn symmetric_structures(o: &StrandOrdering) -> Vec<(SecondaryStructure, usize)> {
    let cfg = EnumerationConfig::default();
    let mut out = Vec::new();
    enumerate_structures(o, &cfg, |s| {
        let r = rotational_symmetry(s, o);
        if r > 1 {
            out.push((s.clone(), r));
        }
        ControlFlow::Continue(())
    })
    .expect("enumeration fits");
    out
}

fn rotate_set(set: &[usize], shift: usize, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = set.iter().map(|&x| (x - 1 + shift) % n + 1).collect();
    v.sort_unstable();
    v
}

fn criterion_4() -> Result<String, String> {
    let mut structures = 0;
    let mut cuts = 0;
    for o in sweep_orderings() {
        let n = o.len();
        for (s, r_full) in symmetric_structures(&o) {
            structures += 1;
            let found = find_admissible_cut(&s, r_full, &o).map_err(|e| format!("{o}: {e}"))?;
            if !is_admissible(&found, &s) {
                return Err(format!("{o}: find_admissible_cut returned an inadmissible cut"));
            }
            for r in divisors(r_full).into_iter().filter(|&r| r > 1) {
                let all = admissible_cuts(&s, r, &o);
                if all.is_empty() {
                    return Err(format!("{o}: no admissible {r}-cut"));
                }
                for cut in all {
                    cuts += 1;
                    let comps = components_after_cut(&s, &cut, &o);
                    if comps.len() != r {
                        return Err(format!("{o} {:?}: {} components for R={r}", s.pairs(), comps.len()));
                    }
                    let table = s.pair_table();
                    for comp in &comps {
                        let image = rotate_set(comp, n / r, n);
                        if !comps.contains(&image) {
                            return Err(format!("{o} {:?}: component not carried to a component", s.pairs()));
                        }
                        let inside = |c: &Vec<usize>| c.iter().filter(|&&x| table[x] != 0 && c.binary_search(&table[x]).is_ok()).count();
                        if inside(comp) != inside(&image) {
                            return Err(format!("{o} {:?}: components not isomorphic", s.pairs()));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{structures} symmetric structures, {cuts} admissible cuts"))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Case {
    ThreeOrMore,
    TwoMultiloop,
    TwoInterior,
}

fn criterion_5() -> Result<String, String> {
    let model = LinearParams::test_model();
    let mut tested: HashMap<Case, usize> = HashMap::new();
    const PER_CASE: usize = 400;
    for o in sandwich_orderings() {
        // group by shared cut or shared central interior loop
        let mut groups: HashMap<(Case, Vec<(usize, usize)>), Vec<(SecondaryStructure, i32, Option<SymmetricCut>)>> = HashMap::new();
        for (s, r) in symmetric_structures(&o) {
            let naive = naive_free_energy(&s, &o, &model).map_err(|e| e.to_string())?;
            let cut = find_admissible_cut(&s, r, &o).map_err(|e| e.to_string())?;
            let center = central_loop(&s, &cut, &o).map_err(|e| e.to_string())?;
            if r >= 3 || center.kind == LoopKind::Multiloop {
                let case = if r >= 3 { Case::ThreeOrMore } else { Case::TwoMultiloop };
                for c in admissible_cuts(&s, r, &o) {
                    let key = vec![(c.r, c.bonds[0])];
                    groups.entry((case, key)).or_default().push((s.clone(), naive, Some(c)));
                }
            } else {
                let mut b = center.bordering.clone();
                b.sort_unstable();
                groups.entry((Case::TwoInterior, b)).or_default().push((s.clone(), naive, None));
            }
        }
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        for key in keys {
            let members = &groups[&key];
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    if tested.get(&key.0).copied().unwrap_or(0) >= PER_CASE {
                        continue;
                    }
                    let (lo, hi) = if members[a].1 <= members[b].1 { (&members[a], &members[b]) } else { (&members[b], &members[a]) };
                    let cut = match &lo.2 {
                        Some(c) => c.clone(),
                        None => match admissible_cuts(&hi.0, 2, &o).into_iter().find(|c| is_admissible(c, &lo.0)) {
                            Some(c) => c,
                            None => return Err(format!("{o}: shared interior center without a common cut")),
                        },
                    };
                    let k = slice_and_swap(&lo.0, &hi.0, &cut, &o).map_err(|e| format!("{o} {:?}/{:?}: {e}", lo.0.pairs(), hi.0.pairs()))?;
                    let e = naive_free_energy(&k, &o, &model).map_err(|e| e.to_string())?;
                    let ok = is_connected(&k, &o) && is_unpseudoknotted(&k) && rotational_symmetry(&k, &o) == 1 && lo.1 <= e && e <= hi.1;
                    if !ok {
                        return Err(format!("{o}: swap of {:?} and {:?} gave {:?} at {e}", lo.0.pairs(), hi.0.pairs(), k.pairs()));
                    }
                    *tested.entry(key.0).or_default() += 1;
                }
            }
        }
    }
    let count = |c: Case| tested.get(&c).copied().unwrap_or(0);
    let summary = format!(
        "R>=3: {}, R=2 multiloop: {}, R=2 interior: {}",
        count(Case::ThreeOrMore),
        count(Case::TwoMultiloop),
        count(Case::TwoInterior)
    );
    if [Case::ThreeOrMore, Case::TwoMultiloop, Case::TwoInterior].iter().any(|&c| count(c) < 100) {
        return Err(format!("too few constructed pairs ({summary})"));
    }
    Ok(summary)
}

fn criterion_6(ctx: &Context) -> Result<String, String> {
    let mut searches = 0;
    let mut collisions = 0;
    let mut max_ratio: f64 = 0.0;
    for run in &ctx.runs {
        let sys = match &run.ours {
            Ok(s) => s,
            Err(SearchError::Infeasible) => continue,
            Err(e) => return Err(format!("{}: {e}", run.text.trim())),
        };
        for r in feasible(sys) {
            searches += 1;
            let st = &r.stats;
            if st.symmetric_scanned > st.bound {
                return Err(format!("{}: {} symmetric scans above bound {}", run.text.trim(), st.symmetric_scanned, st.bound));
            }
            if st.rejected_collisions > 0 {
                return Err(format!("{}: a registry collision failed verification", run.text.trim()));
            }
            if st.trace.windows(2).any(|w| w[1].naive < w[0].naive) {
                return Err(format!("{}: scanned levels decreased", run.text.trim()));
            }
            let unique: HashSet<&SecondaryStructure> = st.scanned_structures.iter().collect();
            if unique.len() != st.scanned_structures.len() {
                return Err(format!("{}: a structure was scanned twice", run.text.trim()));
            }
            if st.max_children > 0 {
                let n = r.structure.len();
                if st.max_children > 2 * n + 2 {
                    return Err(format!("{}: {} children in one refinement", run.text.trim(), st.max_children));
                }
            }
            if st.bound > 0 {
                max_ratio = max_ratio.max(st.symmetric_scanned as f64 / st.bound as f64);
            }
            if r.termination == Termination::Collision {
                collisions += 1;
            }
        }
    }
    Ok(format!("{searches} searches, {collisions} ended by collision, max scanned/bound {max_ratio:.2}"))
}

/// Adds random complementary pairs, whole rotation orbits at a time.
fn random_structure(o: &StrandOrdering, rng: &mut ChaCha8Rng) -> SecondaryStructure {
    let n = o.len();
    let v = o.max_symmetry();
    let degrees = divisors(v);
    let r = *degrees.choose(rng).unwrap();
    let shift = n / r;
    let mut table = vec![0usize; n + 1];
    let crosses = |table: &[usize], i: usize, j: usize| (i + 1..j).any(|x| table[x] != 0 && (table[x] < i || table[x] > j));
    for _ in 0..3 * n {
        let i = rng.gen_range(1..=n);
        let j = rng.gen_range(1..=n);
        let (i, j) = (i.min(j), i.max(j));
        if i == j || !o.can_pair(i, j, RULE) {
            continue;
        }
        let orbit: Vec<(usize, usize)> = (0..r)
            .map(|k| {
                let a = (i - 1 + k * shift) % n + 1;
                let b = (j - 1 + k * shift) % n + 1;
                (a.min(b), a.max(b))
            })
            .collect();
        let mut trial = table.clone();
        let mut ok = true;
        for &(a, b) in &orbit {
            if trial[a] != 0 || trial[b] != 0 || a == b {
                ok = false;
                break;
            }
            trial[a] = b;
            trial[b] = a;
        }
        if ok && orbit.iter().all(|&(a, b)| !crosses(&trial, a, b)) {
            table = trial;
        }
    }
    let pairs: Vec<(usize, usize)> = (1..=n).filter(|&x| table[x] > x).map(|x| (x, table[x])).collect();
    SecondaryStructure::from_pairs(n, pairs).unwrap()
}

fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let blocks = ["GC", "AT", "GCA", "GGCC", "ACGU", "GAC", "GCAUGC", "CG", "AGCU"];
    let mut histogram = BTreeMap::new();
    for _ in 0..10_000 {
        let block = blocks.choose(&mut rng).unwrap();
        let copies = rng.gen_range(1..=6);
        let seqs = vec![*block; copies];
        let o = StrandOrdering::from_sequences(&seqs).unwrap();
        let s = random_structure(&o, &mut rng);
        let r = rotational_symmetry(&s, &o);
        let v = o.max_symmetry();
        if v % r != 0 {
            return Err(format!("R={r} does not divide v={v}"));
        }
        if r != oracle_symmetry(&s, &o) {
            return Err(format!("{o} {:?}: symmetry disagrees with the independent count", s.pairs()));
        }
        let n = o.len();
        if let Some(&(i, j)) = s.pairs().iter().find(|&&(i, j)| segment_length(i, j, n) > n / r) {
            return Err(format!("{o}: pair ({i},{j}) too long for R={r}"));
        }
        *histogram.entry(r).or_insert(0usize) += 1;
    }
    Ok(format!("10000 structures, degree histogram {histogram:?}"))
}

fn criterion_8(ctx: &Context) -> Result<String, String> {
    let model = LinearParams::test_model();
    let rows = bench::run(&[64, 128, 256], 3, 8, &model, RULE);
    let ratios = bench::ratios(&rows);
    let timing = format!(
        "fill ms {:?}, ratios {:?}",
        rows.iter().map(|r| (r.fill_ms * 10.0).round() / 10.0).collect::<Vec<_>>(),
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    if ratios.iter().any(|&q| !(8.0..=32.0).contains(&q)) {
        return Err(format!("scaling out of range: {timing}"));
    }
    let (mut base_peak, mut low_peak) = (0usize, 0usize);
    for run in &ctx.runs {
        match (&run.ours, &run.low) {
            (Err(a), Err(b)) if a == b => {}
            (Ok(a), Ok(b)) => {
                for (x, y) in a.orderings.iter().zip(&b.orderings) {
                    match (&x.result, &y.result) {
                        (Ok(p), Ok(q)) => {
                            if p.energy != q.energy || p.structure != q.structure {
                                return Err(format!("{}: low-memory output differs", run.text.trim()));
                            }
                            if q.stats.peak_candidates > p.stats.peak_candidates {
                                return Err(format!("{}: low-memory peak above baseline", run.text.trim()));
                            }
                            base_peak += p.stats.peak_candidates;
                            low_peak += q.stats.peak_candidates;
                        }
                        (Err(p), Err(q)) if p == q => {}
                        _ => return Err(format!("{}: low-memory outcome differs", run.text.trim())),
                    }
                }
            }
            _ => return Err(format!("{}: low-memory outcome differs", run.text.trim())),
        }
    }
    let (small_low, small_base) = (low_peak, base_peak);
    // larger symmetric systems and a wide symmetry window, where the candidate cap binds
    let wide = LinearParams { kbt: 1000.0, ..LinearParams::test_model() };
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let (mut big_low, mut big_base, mut big) = (0usize, 0usize, 0usize);
    while big < 60 {
        let copies = *[2usize, 3, 4].choose(&mut rng).unwrap();
        let len = rng.gen_range(24..=40) / copies;
        let x: String = (0..len).map(|_| *['A', 'C', 'G', 'T'].choose(&mut rng).unwrap()).collect();
        let o = StrandOrdering::from_sequences(&vec![x.as_str(); copies]).unwrap();
        let base = strandfold::pipeline::solve_ordering(&o, &wide, RULE, SearchOptions::default());
        let low = strandfold::pipeline::solve_ordering(&o, &wide, RULE, SearchOptions { low_mem: true, ..Default::default() });
        match (base, low) {
            (Ok(p), Ok(q)) => {
                if p.energy != q.energy || p.structure != q.structure {
                    return Err(format!("{o}: low-memory output differs"));
                }
                if q.stats.peak_candidates > p.stats.peak_candidates {
                    return Err(format!("{o}: low-memory peak above baseline"));
                }
                big_base += p.stats.peak_candidates;
                big_low += q.stats.peak_candidates;
                big += 1;
            }
            (Err(a), Err(b)) if a == b => {}
            _ => return Err(format!("{o}: low-memory outcome differs")),
        }
    }
    if big_low >= big_base {
        return Err(format!("low-memory mode stored {big_low} candidates vs {big_base} on large systems"));
    }
    Ok(format!(
        "{timing}; low-memory identical, stored candidates {small_low} vs {small_base} (corpus), {big_low} vs {big_base} (N 24..40, wide window)"
    ))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    type Check<'a> = Box<dyn FnOnce() -> Result<String, String> + 'a>;
    let mut failed = 0;
    let mut report = |k: usize, name: &str, check: Check<'_>| {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {k} [{name}]: PASS ({detail}) [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {k} [{name}]: FAIL ({why}) [{secs:.1}s]");
            }
        }
    };
    let ctx = build_context();
    let c = &ctx;
    report(1, "oracle equivalence", Box::new(|| criterion_1(c)));
    report(2, "snMFE equivalence", Box::new(|| criterion_2(c)));
    report(3, "cut-count formula", Box::new(criterion_3));
    report(4, "slicing into isomorphic components", Box::new(criterion_4));
    report(5, "slice-and-swap sandwich", Box::new(criterion_5));
    report(6, "bound discipline", Box::new(|| criterion_6(c)));
    report(7, "symmetry divisibility", Box::new(criterion_7));
    report(8, "complexity and low-memory mode", Box::new(|| criterion_8(c)));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
