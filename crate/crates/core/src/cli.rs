//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::backtrack::{MfeResult, SearchError, SearchOptions};
use crate::bench;
use crate::energy::{Energy, LinearParams, ParamsError};
use crate::oracle::{evaluate_ordering, EnumerationConfig, OracleError};
use crate::pipeline::{mfe_over, orderings_for, snmfe_over};
use crate::strands::{parse_system_with, PairingRule, ParseError, ParseOptions, StrandOrdering};
use crate::structure::{to_dot_bracket, SecondaryStructure};
use crate::symmetry::{enumerate_cuts, upper_bound};

/// Exit status for malformed input, parameters or arguments.
pub const EXIT_PARSE: i32 = 1;
/// Exit status when no connected structure exists.
pub const EXIT_INFEASIBLE: i32 = 2;
/// Exit status for any other failure.
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "strandfold", version, about = "Symmetry-corrected MFE of multistranded nucleic acid systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalArgs {
    /// Energy parameter file (`key=value` lines); the built-in model when absent.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Restrict to one circular ordering, e.g. `XXY` or `X,X,Y`.
    #[arg(long, global = true)]
    pub ordering: Option<String>,
    /// Minimum unpaired bases in a hairpin loop.
    #[arg(long, global = true)]
    pub min_hairpin: Option<usize>,
    /// Allow G-U / G-T pairs.
    #[arg(long, global = true)]
    pub wobble: bool,
    /// Keep only the candidates that can still be picked.
    #[arg(long, global = true)]
    pub low_mem: bool,
    /// Include search statistics.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Keep strands with equal sequences as separate types.
    #[arg(long, global = true)]
    pub no_merge: bool,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetry-corrected minimum free energy and a structure achieving it.
    Mfe { input: PathBuf },
    /// Symmetry-naive minimum per ordering.
    Snmfe { input: PathBuf },
    /// Symmetric backbone cuts per ordering.
    Cuts { input: PathBuf },
    /// Bound on symmetric structures scanned per ordering.
    Bound { input: PathBuf },
    /// Exhaustive enumeration with energies, one line per structure.
    Oracle { input: PathBuf },
    /// Fill and backtrack timings on random single strands (CSV).
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("input: {0}")]
    Input(#[from] ParseError),
    #[error("params: {0}")]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Input(_) | CliError::Params(_) => EXIT_PARSE,
            CliError::Search(SearchError::Infeasible) | CliError::Oracle(OracleError::NoStructure) => EXIT_INFEASIBLE,
            _ => EXIT_FAILURE,
        }
    }
}

/// `0.01 kcal/mol` units rendered as kcal/mol.
pub fn kcal(centi: f64) -> String {
    format!("{:.2}", centi / 100.0)
}

struct Setup {
    model: LinearParams,
    rule: PairingRule,
    orderings: Vec<StrandOrdering>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn model_of(g: &GlobalArgs) -> Result<LinearParams, CliError> {
    let mut model = match &g.params {
        Some(p) => LinearParams::parse(&read(p)?)?,
        None => LinearParams::test_model(),
    };
    if let Some(h) = g.min_hairpin {
        model.min_hairpin = h;
    }
    Ok(model)
}

fn setup(input: &Path, g: &GlobalArgs) -> Result<Setup, CliError> {
    let opts = ParseOptions { merge: !g.no_merge, ..Default::default() };
    let system = parse_system_with(&read(input)?, opts)?;
    let model = model_of(g)?;
    let only = g.ordering.as_deref().map(|t| system.parse_ordering(t)).transpose()?;
    let orderings = orderings_for(&system, only.as_ref());
    let rule = if g.wobble { PairingRule::WITH_WOBBLE } else { PairingRule::WATSON_CRICK };
    Ok(Setup { model, rule, orderings })
}

fn pairs_json(s: &SecondaryStructure) -> Value {
    json!(s.pairs().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>())
}

fn dot(s: &SecondaryStructure, o: &StrandOrdering) -> String {
    to_dot_bracket(s, o).unwrap_or_default()
}

fn result_json(r: &MfeResult, o: &StrandOrdering, trace: bool) -> Value {
    let b = &r.breakdown;
    let mut v = json!({
        "ordering": o.label(),
        "structure": dot(&r.structure, o),
        "pairs": pairs_json(&r.structure),
        "loops": b.loops,
        "association": b.association,
        "naive": b.naive(),
        "symmetry_degree": b.symmetry_degree,
        "symmetry_term": b.symmetry,
        "total": b.total,
        "snmfe": r.snmfe,
        "termination": r.termination,
    });
    if trace {
        v["stats"] = serde_json::to_value(&r.stats).expect("stats serialize");
    }
    v
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string(v).expect("json"))?;
    Ok(())
}

fn cmd_mfe(s: &Setup, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = SearchOptions { low_mem: g.low_mem, trace: g.trace, keep_scanned: false };
    let res = mfe_over(&s.orderings, &s.model, s.rule, opts)?;
    let best = &s.orderings[res.best];
    let w = res.winner();
    match g.format {
        Format::Json => {
            let per: Vec<Value> = res
                .orderings
                .iter()
                .zip(&s.orderings)
                .map(|(o, ord)| match &o.result {
                    Ok(r) => result_json(r, ord, g.trace),
                    Err(e) => json!({ "ordering": ord.label(), "error": e }),
                })
                .collect();
            let mut v = result_json(w, best, g.trace);
            v["command"] = json!("mfe");
            v["units"] = json!("0.01 kcal/mol");
            v["sequence"] = json!(best.sequence_string());
            v["orderings"] = json!(per);
            emit_json(out, &v)
        }
        Format::Text => {
            let b = &w.breakdown;
            writeln!(out, "ordering    {}", best.label())?;
            writeln!(out, "sequence    {}", best.sequence_string())?;
            writeln!(out, "structure   {}", dot(&w.structure, best))?;
            writeln!(out, "mfe         {} kcal/mol", kcal(w.energy))?;
            writeln!(out, "loops       {} kcal/mol", kcal(b.loops as f64))?;
            writeln!(out, "association {} kcal/mol", kcal(b.association as f64))?;
            writeln!(out, "symmetry    {} kcal/mol (R = {})", kcal(b.symmetry), b.symmetry_degree)?;
            writeln!(out, "snmfe       {} kcal/mol", kcal(w.snmfe as f64))?;
            if g.trace {
                for (o, ord) in res.orderings.iter().zip(&s.orderings) {
                    if let Ok(r) = &o.result {
                        let st = &r.stats;
                        writeln!(
                            out,
                            "trace {}: scanned {} (symmetric {}), bound {}, refinements {}, peak candidates {}, {:?}",
                            ord.label(),
                            st.scanned,
                            st.symmetric_scanned,
                            st.bound,
                            st.refinements,
                            st.peak_candidates,
                            r.termination
                        )?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn cmd_snmfe(s: &Setup, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = snmfe_over(&s.orderings, &s.model, s.rule);
    let best: Option<Energy> = rows.iter().filter_map(|r| r.snmfe).min();
    match g.format {
        Format::Json => emit_json(out, &json!({ "command": "snmfe", "units": "0.01 kcal/mol", "snmfe": best, "orderings": rows })),
        Format::Text => {
            for r in &rows {
                let e = r.snmfe.map_or_else(|| "infeasible".to_string(), |e| format!("{} kcal/mol", kcal(e as f64)));
                writeln!(out, "{:<12} {e}", r.label)?;
            }
            Ok(())
        }
    }
    .and_then(|()| if best.is_none() { Err(SearchError::Infeasible.into()) } else { Ok(()) })
}

#[derive(Serialize)]
struct CutRow {
    r: usize,
    bonds: Vec<usize>,
}

fn cmd_cuts(s: &Setup, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let per: Vec<(String, Vec<CutRow>)> = s
        .orderings
        .iter()
        .map(|o| (o.label().to_string(), enumerate_cuts(o).into_iter().map(|c| CutRow { r: c.r, bonds: c.bonds }).collect()))
        .collect();
    match g.format {
        Format::Json => {
            let v: Vec<Value> = per.iter().map(|(l, c)| json!({ "ordering": l, "cuts": c })).collect();
            emit_json(out, &json!({ "command": "cuts", "orderings": v }))
        }
        Format::Text => {
            for (l, cuts) in &per {
                writeln!(out, "{l}: {} cuts", cuts.len())?;
                for c in cuts {
                    let b: Vec<String> = c.bonds.iter().map(|x| format!("{x}.5")).collect();
                    writeln!(out, "  R={} {}", c.r, b.join(" "))?;
                }
            }
            Ok(())
        }
    }
}

fn cmd_bound(s: &Setup, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rows: Vec<(String, crate::symmetry::UpperBound)> = s.orderings.iter().map(|o| (o.label().to_string(), upper_bound(o, s.rule))).collect();
    match g.format {
        Format::Json => {
            let v: Vec<Value> = rows.iter().map(|(l, u)| json!({ "ordering": l, "cut_term": u.cut_term, "interior_term": u.interior_term, "bound": u.total })).collect();
            emit_json(out, &json!({ "command": "bound", "orderings": v }))
        }
        Format::Text => {
            for (l, u) in &rows {
                writeln!(out, "{l}: U = {} (cuts {}, central interior loops {})", u.total, u.cut_term, u.interior_term)?;
            }
            Ok(())
        }
    }
}

fn cmd_oracle(s: &Setup, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = EnumerationConfig { rule: s.rule, min_hairpin: s.model.min_hairpin, ..Default::default() };
    let mut best: Option<(f64, String, String)> = None;
    let mut write_err: Option<std::io::Error> = None;
    for o in &s.orderings {
        let summary = evaluate_ordering(o, &s.model, &cfg, |ev| {
            if write_err.is_some() {
                return;
            }
            let line = match g.format {
                Format::Json => serde_json::to_string(&json!({
                    "ordering": o.label(),
                    "structure": dot(&ev.structure, o),
                    "naive": ev.naive,
                    "symmetry_degree": ev.symmetry,
                    "total": ev.total,
                }))
                .expect("json"),
                Format::Text => format!("{}\t{}\t{}\t{}\t{}", o.label(), dot(&ev.structure, o), ev.naive, ev.symmetry, kcal(ev.total)),
            };
            if let Err(e) = writeln!(out, "{line}") {
                write_err = Some(e);
            }
        })?;
        if let Some(e) = write_err.take() {
            return Err(e.into());
        }
        if let Some(m) = summary.mfe {
            if best.as_ref().map_or(true, |b| m.total < b.0) {
                best = Some((m.total, o.label().to_string(), dot(&m.structure, o)));
            }
        }
    }
    let (total, label, structure) = best.ok_or(OracleError::NoStructure)?;
    match g.format {
        Format::Json => emit_json(out, &json!({ "command": "oracle", "units": "0.01 kcal/mol", "ordering": label, "structure": structure, "total": total })),
        Format::Text => {
            writeln!(out, "# minimum {} kcal/mol on {label}: {structure}", kcal(total))?;
            Ok(())
        }
    }
}

fn cmd_bench(sizes: &[usize], repeats: usize, g: &GlobalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = model_of(g)?;
    let rule = if g.wobble { PairingRule::WITH_WOBBLE } else { PairingRule::WATSON_CRICK };
    let rows = bench::run(sizes, repeats, g.seed, &model, rule);
    match g.format {
        Format::Json => emit_json(out, &json!({ "command": "bench", "rows": rows })),
        Format::Text => {
            writeln!(out, "n,fill_ms,backtrack_ms,scanned_structures")?;
            for r in rows {
                writeln!(out, "{},{:.3},{:.3},{}", r.n, r.fill_ms, r.backtrack_ms, r.scanned_structures)?;
            }
            Ok(())
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Mfe { input } => cmd_mfe(&setup(input, g)?, g, out),
        Command::Snmfe { input } => cmd_snmfe(&setup(input, g)?, g, out),
        Command::Cuts { input } => cmd_cuts(&setup(input, g)?, g, out),
        Command::Bound { input } => cmd_bound(&setup(input, g)?, g, out),
        Command::Oracle { input } => cmd_oracle(&setup(input, g)?, g, out),
        Command::Bench { sizes, repeats } => cmd_bench(sizes, *repeats, g, out),
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
