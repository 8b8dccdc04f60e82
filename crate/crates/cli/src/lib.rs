//! The `semichar` command line.
//!
//! Exit codes: 0 success, 1 a violation (or a failed check) was found,
//! 2 something was infeasible within the caps, 3 bad input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use semichar::constructions::{
    attach_exact, construct_for, gl2_cyclic_subgroup_count, gl2_sylow_facts, ConstructionError, ConstructionReport,
};
use semichar::engine::{
    l_torsion_rank, localized_semichar_group, primary_decomposition_check, semichar_group, EngineConfig, EngineError,
};
use semichar::families::{builtin_corpus, FamilyError, FamilySpec, RealizedGroup};
use semichar::io::{
    export_group_file, format_factored, format_invariant_factors, parse_group_file, run_report, BatchLine, BatchStatus, BatchSummary, IoError,
};
use semichar::par;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "semichar", version, about = "Semicharacter groups of finite groups")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest group order for a full Smith form.
    #[arg(long, global = true)]
    snf_cap: Option<usize>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Accepted for harness compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Family name: c6, abelian:2x4, d4, dic3, q8, s4, a5, gl2:3, sl2:3, u3:5, heis:3, s3*c2.
    #[arg(long)]
    family: Option<String>,
    /// JSON group file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute Ĝ and check whether |G| divides |Ĝ|.
    Compute {
        #[command(flatten)]
        input: Input,
        /// Skip the per-prime constructions.
        #[arg(long)]
        no_constructions: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        time: bool,
    },
    /// Check every group of a corpus.
    Batch {
        #[arg(long, value_parser = ["builtin"], default_value = "builtin")]
        corpus: String,
        #[arg(long, default_value_t = 2048)]
        max_order: u64,
        /// Exit 2 when any group was skipped.
        #[arg(long)]
        strict: bool,
    },
    /// Run the explicit construction for one prime.
    Construct {
        #[arg(long)]
        family: String,
        #[arg(long)]
        prime: u64,
    },
    /// Dimension of the l-torsion of Ĝ.
    Torsion {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        prime: u64,
    },
    /// Semicharacters of the l-power-order elements.
    Localize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        prime: u64,
    },
    /// Sylow and cyclic-subgroup facts for GL(2,q).
    Facts {
        #[arg(long)]
        gl2: u64,
    },
    /// Write the multiplication table as a group file.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, short)]
        output: PathBuf,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let code = match e {
            FamilyError::OverCap { .. } => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::TooLarge { .. } => EXIT_INFEASIBLE,
            EngineError::InvalidOnSubset(..) | EngineError::Uncertified => EXIT_VIOLATION,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Family(f) => f.into(),
            IoError::ExportTooLarge { .. } => Failure { code: EXIT_INFEASIBLE, message: e.to_string() },
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        let code = match &e {
            ConstructionError::Family(f) => return f.clone().into(),
            ConstructionError::Engine(x) => return x.clone().into(),
            ConstructionError::TooLarge { .. } | ConstructionError::SylowNotCyclic { .. } => EXIT_INFEASIBLE,
            ConstructionError::BadParameter(_) | ConstructionError::NotNilpotent(_) => EXIT_INPUT,
            ConstructionError::Verification { .. } | ConstructionError::Inconsistent(_) => EXIT_VIOLATION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut cfg = EngineConfig::default();
    if let Some(cap) = cli.snf_cap {
        cfg.snf_cap = cap;
    }
    let threads = cli.threads.unwrap_or_else(par::current_threads).max(1);
    let (result, buffer) = par::with_threads(threads, || {
        let mut buffer = Vec::new();
        (dispatch(&cli, &cfg, &mut buffer), buffer)
    });
    if out.write_all(&buffer).and_then(|_| out.flush()).is_err() {
        return EXIT_INPUT;
    }
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, cfg: &EngineConfig, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Compute { input, no_constructions, time } => compute(input, cfg, !no_constructions, *time, cli.json, out),
        Command::Batch { max_order, strict, .. } => batch(*max_order, *strict, cfg, cli.json, out),
        Command::Construct { family, prime } => construct(family, *prime, cfg, cli.json, out),
        Command::Torsion { input, prime } => torsion(input, *prime, cfg, cli.json, out),
        Command::Localize { input, prime } => localize(input, *prime, cfg, cli.json, out),
        Command::Facts { gl2 } => facts(*gl2, cli.json, out),
        Command::Export { input, output } => {
            let (g, _) = load(input)?;
            export_group_file(&g, output)?;
            writeln!(out, "wrote {} ({} elements)", output.display(), g.order())?;
            Ok(EXIT_OK)
        }
    }
}

fn load(input: &Input) -> Result<(RealizedGroup, Option<FamilySpec>), Failure> {
    match (&input.family, &input.file) {
        (Some(name), _) => {
            let spec = FamilySpec::parse(name)?;
            Ok((spec.build()?, Some(spec)))
        }
        (None, Some(path)) => Ok((parse_group_file(path)?, None)),
        (None, None) => Err(Failure::input("one of --family or --file is required")),
    }
}

fn compute(input: &Input, cfg: &EngineConfig, constructions: bool, time: bool, json: bool, out: &mut dyn Write) -> Outcome {
    let start = Instant::now();
    let (g, spec) = load(input)?;
    let mut report = run_report(&g, spec.as_ref(), cfg, constructions)?;
    if time {
        report = report.with_elapsed(start.elapsed());
    }
    if json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        write!(out, "{}", report.render_text())?;
    }
    Ok(if report.holds { EXIT_OK } else { EXIT_VIOLATION })
}

fn batch(max_order: u64, strict: bool, cfg: &EngineConfig, json: bool, out: &mut dyn Write) -> Outcome {
    let corpus = builtin_corpus(max_order);
    let lines = par::map_slice(&corpus, |spec| BatchLine::evaluate(spec, cfg));
    for line in &lines {
        writeln!(out, "{}", if json { line.to_json() } else { line.render_text() })?;
    }
    let summary = BatchSummary::of(&lines);
    if json {
        writeln!(out, "{}", json!({ "summary": summary }))?;
    } else {
        writeln!(out, "{}", summary.render_text())?;
    }
    Ok(if lines.iter().any(|l| l.status == BatchStatus::Violation) {
        EXIT_VIOLATION
    } else if strict && summary.skipped > 0 {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    })
}

fn construction_json(r: &ConstructionReport) -> serde_json::Value {
    json!({
        "construction": r.construction,
        "group": r.group,
        "prime": r.prime,
        "domain": r.domain,
        "functions": r.produced.len(),
        "independence_rank": r.independence_rank,
        "claimed_lower_bound": r.claimed_lower_bound,
        "certified_valuation": r.certified_valuation,
        "exact_valuation": r.exact_valuation,
        "target_valuation": r.target_valuation,
        "meets_target": r.meets_target(),
        "notes": r.notes,
    })
}

fn construct(family: &str, prime: u64, cfg: &EngineConfig, json: bool, out: &mut dyn Write) -> Outcome {
    let spec = FamilySpec::parse(family)?;
    let mut report = construct_for(&spec, prime)?;
    if spec.order() <= cfg.snf_cap as u128 {
        let g = spec.build()?;
        attach_exact(&mut report, &semichar_group(&g.table, cfg)?);
    }
    if json {
        writeln!(out, "{}", construction_json(&report))?;
    } else {
        writeln!(out, "{report}")?;
    }
    Ok(match report.consistent_with_exact() {
        Some(false) => EXIT_VIOLATION,
        _ => EXIT_OK,
    })
}

fn torsion(input: &Input, prime: u64, cfg: &EngineConfig, json: bool, out: &mut dyn Write) -> Outcome {
    let (g, spec) = load(input)?;
    let name = spec.map_or_else(|| g.name(), |s| s.name());
    let rank = l_torsion_rank(&g.table, prime, cfg)?;
    if json {
        writeln!(out, "{}", json!({ "group": name, "order": g.order(), "prime": prime, "torsion_rank": rank }))?;
    } else {
        writeln!(out, "{name}: dim_F{prime} Ĝ[{prime}] = {rank}")?;
    }
    Ok(EXIT_OK)
}

fn localize(input: &Input, prime: u64, cfg: &EngineConfig, json: bool, out: &mut dyn Write) -> Outcome {
    let (g, spec) = load(input)?;
    let name = spec.map_or_else(|| g.name(), |s| s.name());
    let local = localized_semichar_group(&g.table, prime, cfg)?;
    let check = match primary_decomposition_check(&g.table, cfg) {
        Ok(d) => Ok(d.holds),
        Err(e @ EngineError::TooLarge { .. }) => Err(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    if json {
        let check = match &check {
            Ok(holds) => json!({ "status": if *holds { "holds" } else { "violation" } }),
            Err(reason) => json!({ "status": "skipped", "reason": reason }),
        };
        writeln!(
            out,
            "{}",
            json!({
                "group": name,
                "prime": prime,
                "subset_size": local.source_order,
                "local_order": local.order().to_string(),
                "invariant_factors": local.invariant_factors,
                "primary_decomposition": check,
            })
        )?;
    } else {
        writeln!(out, "{name}: {} elements of {prime}-power order", local.source_order)?;
        writeln!(
            out,
            "local semicharacter group: order {} = {}, factors {}",
            local.order(),
            format_factored(&local.factored_order),
            format_invariant_factors(&local.invariant_factors)
        )?;
        match &check {
            Ok(true) => writeln!(out, "primary decomposition: holds")?,
            Ok(false) => writeln!(out, "primary decomposition: VIOLATED")?,
            Err(reason) => writeln!(out, "primary decomposition: skipped ({reason})")?,
        }
    }
    Ok(if check == Ok(false) { EXIT_VIOLATION } else { EXIT_OK })
}

fn facts(q: u64, json: bool, out: &mut dyn Write) -> Outcome {
    let facts = gl2_sylow_facts(q)?;
    let counts = (3..=q + 1)
        .filter(|k| (q + 1).is_multiple_of(*k))
        .map(|k| gl2_cyclic_subgroup_count(q, k))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = counts.iter().all(|c| c.matches())
        && facts.split_primes.iter().all(|s| !s.formula_applies || s.formula_valuation == s.actual_valuation)
        && facts.cyclic_primes.iter().all(|&(_, cyclic)| cyclic)
        && facts.dihedral.as_ref().is_none_or(|d| d.order == d.expected_order);
    if json {
        writeln!(out, "{}", json!({ "sylow": facts, "cyclic_subgroups": counts, "consistent": ok }))?;
    } else {
        writeln!(out, "GL(2,{q}), order {} = {}", facts.order, format_factored(&semichar::numtheory::factorize(facts.order)))?;
        for s in &facts.split_primes {
            writeln!(
                out,
                "  l = {}: val_l|G| = {}{}, monomial {}-subgroup has {} elements{}",
                s.l,
                s.actual_valuation,
                if s.formula_applies { format!(" (formula {})", s.formula_valuation) } else { String::new() },
                s.l,
                s.monomial_count,
                if s.monomial_contains_sylow { ", a full Sylow" } else { ", smaller than a Sylow" },
            )?;
        }
        for (l, cyclic) in &facts.cyclic_primes {
            writeln!(out, "  l = {l}: Sylow {}", if *cyclic { "cyclic" } else { "NOT cyclic" })?;
        }
        if let Some(d) = &facts.dihedral {
            writeln!(
                out,
                "  2-Sylow: order {} (expected {}), max element order {}, {}",
                d.order,
                d.expected_order,
                d.max_element_order,
                if d.is_abelian { "abelian" } else { "nonabelian" },
            )?;
        }
        for c in &counts {
            writeln!(
                out,
                "  cyclic subgroups of order {}: {} (expected q(q-1)/2 = {}), {} elements{}",
                c.k,
                c.subgroups,
                c.expected_subgroups,
                c.elements,
                if c.matches() { "" } else { "  MISMATCH" },
            )?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}
