//! Group files and run reports.
//!
//! A group file is JSON with a `version` field and exactly one of three
//! bodies:
//!
//! ```text
//! {"version": 1, "name": "C2", "order": 2, "mul": [0, 1, 1, 0]}
//! {"version": 1, "perm": ["(1 2)", "(1 2 3)"]}
//! {"version": 1, "matrix": {"p": 2, "e": 2, "generators": [[[1, [0, 1]], [0, 1]]]}}
//! ```
//!
//! Tables are row-major with 0-based indices: `mul[a * order + b]` is the
//! index of `a·b`. Matrix entries are either integers (reduced mod `p`) or
//! coefficient vectors over `F_p`, lowest degree first. Generator files are
//! closed breadth-first, so the element order is reproducible.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{perm_parse, AlgebraError, FiniteField, MatrixFq, Permutation};
use crate::constructions::{attach_exact, construct_for, cyclic_sylow_semichars, ConstructionReport};
use crate::engine::{verdict_from_desc, ConjectureVerdict, EngineConfig, EngineError, SemicharGroupDesc};
use crate::families::{
    closure_from_generators, FamilyDescriptor, FamilyError, FamilySpec, Generators, Realization, RealizedGroup,
};
use crate::group::{AssociativityCheck, GroupError, GroupTable};
use crate::numtheory::factorize;

pub const FORMAT_VERSION: u32 = 1;

/// Largest table written by [`export_group_file`].
pub const EXPORT_CAP: usize = 2048;

/// Largest group closed from a generator file.
pub const FILE_CLOSURE_CAP: usize = 5040;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("malformed group file: {0}")]
    Format(String),
    #[error("refusing to export a table of order {order} (cap {cap}); describe the group by generators instead")]
    ExportTooLarge { order: usize, cap: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        IoError::Syntax { line: e.line(), column: e.column(), message }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: u32,
    name: Option<String>,
    order: Option<usize>,
    labels: Option<Vec<String>>,
    mul: Option<Vec<usize>>,
    perm: Option<Vec<String>>,
    degree: Option<usize>,
    matrix: Option<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    p: u64,
    e: Option<u32>,
    modulus: Option<Vec<u32>>,
    generators: Vec<Vec<Vec<RawEntry>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Int(i64),
    Coeffs(Vec<u32>),
}

/// Parses group-file text. Generator files are closed up to `closure_cap`
/// elements.
pub fn parse_group_str(text: &str, closure_cap: usize) -> Result<RealizedGroup, IoError> {
    let raw: RawFile = serde_json::from_str(text)?;
    if raw.version != FORMAT_VERSION {
        return Err(IoError::Version(raw.version));
    }
    let bodies = [raw.mul.is_some(), raw.perm.is_some(), raw.matrix.is_some()];
    if bodies.iter().filter(|&&b| b).count() != 1 {
        return Err(IoError::Format("exactly one of \"mul\", \"perm\", \"matrix\" is required".into()));
    }
    let descriptor = FamilyDescriptor::new(raw.name.as_deref().unwrap_or("file"), &[]);
    if let Some(mul) = raw.mul {
        if raw.degree.is_some() {
            return Err(IoError::Format("\"degree\" only applies to permutation generators".into()));
        }
        let order = raw.order.ok_or_else(|| IoError::Format("a table needs \"order\"".into()))?;
        let table = GroupTable::from_table(order, &mul, raw.labels, AssociativityCheck::Auto)?;
        return Ok(RealizedGroup { table, realization: Realization::Abstract, descriptor, abelian_invariants: None });
    }
    if raw.order.is_some() || raw.labels.is_some() {
        return Err(IoError::Format("\"order\" and \"labels\" only apply to tables".into()));
    }
    let gens = match (raw.perm, raw.matrix) {
        (Some(perm), _) => {
            if raw.degree.is_some_and(|d| d == 0) {
                return Err(IoError::Format("\"degree\" must be positive".into()));
            }
            Generators::Permutations(parse_permutations(&perm, raw.degree)?)
        }
        (None, Some(m)) => parse_matrices(m)?,
        (None, None) => unreachable!("one body is present"),
    };
    let mut g = closure_from_generators(&gens, closure_cap)?;
    g.descriptor = descriptor;
    Ok(g)
}

fn parse_permutations(cycles: &[String], degree: Option<usize>) -> Result<Vec<Permutation>, IoError> {
    if cycles.is_empty() {
        return Err(FamilyError::NoGenerators.into());
    }
    let inferred = cycles
        .iter()
        .map(|c| perm_parse(c, None).map(|p| p.degree()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(1)
        .max(1);
    let degree = match degree {
        Some(d) if d < inferred => {
            return Err(IoError::Format(format!("\"degree\" {d} is below the largest point {inferred}")))
        }
        Some(d) => d,
        None => inferred,
    };
    Ok(cycles.iter().map(|c| perm_parse(c, Some(degree))).collect::<Result<Vec<_>, _>>()?)
}

fn parse_matrices(m: RawMatrix) -> Result<Generators, IoError> {
    let field = match m.modulus {
        Some(modulus) => {
            if let Some(e) = m.e.filter(|&e| modulus.len() != e as usize + 1) {
                return Err(IoError::Format(format!("modulus must have e + 1 = {} coefficients", e + 1)));
            }
            FiniteField::with_modulus(m.p, modulus)?
        }
        None => FiniteField::new(m.p, m.e.unwrap_or(1))?,
    };
    let matrices = m
        .generators
        .iter()
        .map(|rows| {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(IoError::Format("generator matrices must be square and nonempty".into()));
            }
            let entries = rows
                .iter()
                .flatten()
                .map(|entry| match entry {
                    RawEntry::Int(k) => Ok(field.from_int(*k)),
                    RawEntry::Coeffs(c) => field.from_coeffs(c),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MatrixFq::new(n, n, entries)?)
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Generators::Matrices { field, matrices })
}

pub fn parse_group_file(path: &Path) -> Result<RealizedGroup, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })?;
    parse_group_str(&text, FILE_CLOSURE_CAP)
}

/// Canonical table-form text: fixed key order, one table row per line,
/// trailing newline. Parsing it and rendering again gives the same bytes.
pub fn render_group_file(table: &GroupTable, name: Option<&str>) -> Result<String, IoError> {
    let n = table.order();
    if n > EXPORT_CAP {
        return Err(IoError::ExportTooLarge { order: n, cap: EXPORT_CAP });
    }
    let json = |s: &str| serde_json::to_string(s).expect("strings serialize");
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"version\": {FORMAT_VERSION},");
    if let Some(name) = name {
        let _ = writeln!(out, "  \"name\": {},", json(name));
    }
    let _ = writeln!(out, "  \"order\": {n},");
    if let Some(labels) = table.labels() {
        let quoted: Vec<String> = labels.iter().map(|l| json(l)).collect();
        let _ = writeln!(out, "  \"labels\": [{}],", quoted.join(", "));
    }
    out.push_str("  \"mul\": [\n");
    for a in 0..n {
        let row: Vec<String> = (0..n).map(|b| table.mul(a, b).to_string()).collect();
        let _ = writeln!(out, "    {}{}", row.join(", "), if a + 1 < n { "," } else { "" });
    }
    out.push_str("  ]\n}\n");
    Ok(out)
}

/// Writes the table of `g` in canonical form, named after its descriptor.
pub fn export_group_file(g: &RealizedGroup, path: &Path) -> Result<(), IoError> {
    let text = render_group_file(&g.table, Some(&g.name()))?;
    std::fs::write(path, text).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

/// One prime of a construction cross-check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConstructionSummary {
    Ran {
        prime: u64,
        construction: String,
        claimed_lower_bound: u64,
        certified_valuation: u32,
        exact_valuation: Option<u32>,
        target_valuation: u32,
    },
    Unavailable {
        prime: u64,
        reason: String,
    },
}

impl ConstructionSummary {
    pub fn from_report(r: &ConstructionReport) -> Self {
        ConstructionSummary::Ran {
            prime: r.prime,
            construction: r.construction.to_string(),
            claimed_lower_bound: r.claimed_lower_bound,
            certified_valuation: r.certified_valuation,
            exact_valuation: r.exact_valuation,
            target_valuation: r.target_valuation,
        }
    }

    pub fn prime(&self) -> u64 {
        match self {
            ConstructionSummary::Ran { prime, .. } | ConstructionSummary::Unavailable { prime, .. } => *prime,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationRow {
    pub prime: u64,
    pub group: u32,
    pub semichar: u32,
    pub excess: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub group: String,
    pub order: u64,
    /// `|Ĝ|` in decimal (it can exceed 64 bits).
    pub semichar_order: String,
    pub factored_order: Vec<(u64, u32)>,
    pub invariant_factors: Vec<u64>,
    pub valuations: Vec<ValuationRow>,
    pub holds: bool,
    pub constructions: Vec<ConstructionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    pub fn from_verdict(group: String, verdict: &ConjectureVerdict, constructions: Vec<ConstructionSummary>) -> Self {
        RunReport {
            group,
            order: verdict.group_order,
            semichar_order: verdict.desc.order().to_string(),
            factored_order: verdict.desc.factored_order.clone(),
            invariant_factors: verdict.desc.invariant_factors.clone(),
            valuations: verdict
                .valuations
                .iter()
                .map(|v| ValuationRow { prime: v.prime, group: v.group, semichar: v.semichar, excess: v.excess() })
                .collect(),
            holds: verdict.holds,
            constructions,
            elapsed_ms: None,
        }
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.elapsed_ms = Some(elapsed.as_millis() as u64);
        self
    }

    /// The verdict agrees with the valuation table and the factored order.
    pub fn is_consistent(&self) -> bool {
        let by_rows = self.valuations.iter().all(|v| v.excess >= 0 && v.excess == v.semichar as i64 - v.group as i64);
        let order: BigUint =
            self.factored_order.iter().map(|&(p, e)| BigUint::from(p).pow(e)).product();
        self.holds == by_rows && order.to_string() == self.semichar_order
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "group: {}", self.group);
        let _ = writeln!(s, "|G| = {}", with_factored(&self.order.to_string(), &factorize(self.order)));
        let _ = writeln!(s, "|Ĝ| = {}", with_factored(&self.semichar_order, &self.factored_order));
        let _ = writeln!(s, "invariant factors: {}", format_invariant_factors(&self.invariant_factors));
        let _ = writeln!(s, "{:>6} {:>9} {:>9} {:>7}", "prime", "val(|G|)", "val(|Ĝ|)", "excess");
        for v in &self.valuations {
            let _ = writeln!(s, "{:>6} {:>9} {:>9} {:>+7}", v.prime, v.group, v.semichar, v.excess);
        }
        let verdict = if self.holds { "holds: |G| divides |Ĝ|" } else { "VIOLATED: |G| does not divide |Ĝ|" };
        let _ = writeln!(s, "verdict: {verdict}");
        if !self.constructions.is_empty() {
            let _ = writeln!(s, "constructions:");
            for c in &self.constructions {
                let _ = match c {
                    ConstructionSummary::Ran {
                        prime,
                        construction,
                        claimed_lower_bound,
                        certified_valuation,
                        exact_valuation,
                        target_valuation,
                    } => {
                        let exact = exact_valuation.map_or("?".to_string(), |v| v.to_string());
                        writeln!(
                            s,
                            "  l = {prime}: {construction}: claimed {claimed_lower_bound}, certified {certified_valuation}, exact {exact}, target {target_valuation}"
                        )
                    }
                    ConstructionSummary::Unavailable { prime, reason } => {
                        writeln!(s, "  l = {prime}: unavailable ({reason})")
                    }
                };
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(s, "time: {ms} ms");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `2^3 * 3`, or `1` for the empty product.
pub fn format_factored(factors: &[(u64, u32)]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> =
        factors.iter().map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
    parts.join(" * ")
}

fn format_list(xs: &[u64]) -> String {
    let parts: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Invariant factors with runs collapsed: `[2 x16, 32]`.
pub fn format_invariant_factors(xs: &[u64]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let run = xs[i..].iter().take_while(|&&d| d == xs[i]).count();
        parts.push(if run > 3 { format!("{} x{run}", xs[i]) } else { vec![xs[i].to_string(); run].join(", ") });
        i += run;
    }
    format!("[{}]", parts.join(", "))
}

/// `n`, followed by `= factorization` when that says more.
fn with_factored(n: &str, factors: &[(u64, u32)]) -> String {
    let f = format_factored(factors);
    if f == n {
        n.to_string()
    } else {
        format!("{n} = {f}")
    }
}

/// Runs the construction for each prime dividing `|G|` and records it next
/// to the exact valuation from `desc`. Without a family, cyclic Sylow gluing
/// is tried on the table.
pub fn construction_summaries(
    spec: Option<&FamilySpec>,
    table: &GroupTable,
    desc: &SemicharGroupDesc,
) -> Vec<ConstructionSummary> {
    let primes: Vec<u64> = factorize(table.order() as u64).into_iter().map(|(p, _)| p).collect();
    primes
        .into_iter()
        .map(|l| {
            let result = match spec {
                Some(spec) => construct_for(spec, l),
                None => cyclic_sylow_semichars(table, l),
            };
            match result {
                Ok(mut r) => {
                    attach_exact(&mut r, desc);
                    ConstructionSummary::from_report(&r)
                }
                Err(e) => ConstructionSummary::Unavailable { prime: l, reason: e.to_string() },
            }
        })
        .collect()
}

/// Computes `Ĝ` and the verdict, plus construction summaries when asked.
pub fn run_report(
    g: &RealizedGroup,
    spec: Option<&FamilySpec>,
    cfg: &EngineConfig,
    with_constructions: bool,
) -> Result<RunReport, EngineError> {
    let desc = crate::engine::semichar_group(&g.table, cfg)?;
    let constructions =
        if with_constructions { construction_summaries(spec, &g.table, &desc) } else { Vec::new() };
    let verdict = verdict_from_desc(g.order() as u64, desc);
    let name = spec.map_or_else(|| g.name(), FamilySpec::name);
    Ok(RunReport::from_verdict(name, &verdict, constructions))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStatus {
    Holds,
    Violation,
    Skipped,
}

/// One group of a batch run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchLine {
    pub group: String,
    pub order: u64,
    pub status: BatchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semichar_order: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invariant_factors: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl BatchLine {
    /// Runs one corpus entry. Anything that cannot be computed within the
    /// caps is `Skipped` with the reason.
    pub fn evaluate(spec: &FamilySpec, cfg: &EngineConfig) -> Self {
        let order = u64::try_from(spec.order()).unwrap_or(u64::MAX);
        let skipped = |reason: String| BatchLine {
            group: spec.name(),
            order,
            status: BatchStatus::Skipped,
            semichar_order: None,
            invariant_factors: Vec::new(),
            reason: Some(reason),
        };
        if spec.order() > cfg.snf_cap as u128 {
            return skipped(format!("order {} exceeds the Smith form cap of {}", spec.order(), cfg.snf_cap));
        }
        let g = match spec.build() {
            Ok(g) => g,
            Err(e) => return skipped(e.to_string()),
        };
        match crate::engine::semichar_group(&g.table, cfg) {
            Ok(desc) => {
                let verdict = verdict_from_desc(order, desc);
                BatchLine {
                    group: spec.name(),
                    order,
                    status: if verdict.holds { BatchStatus::Holds } else { BatchStatus::Violation },
                    semichar_order: Some(verdict.desc.order().to_string()),
                    invariant_factors: verdict.desc.invariant_factors,
                    reason: None,
                }
            }
            Err(e) => skipped(e.to_string()),
        }
    }

    /// Tab-separated: group, order, status, then `|Ĝ|` and factors or the
    /// skip reason.
    pub fn render_text(&self) -> String {
        let status = match self.status {
            BatchStatus::Holds => "holds",
            BatchStatus::Violation => "violation",
            BatchStatus::Skipped => "skipped",
        };
        let tail = match (&self.semichar_order, &self.reason) {
            (Some(o), _) => format!("{o}\t{}", format_list(&self.invariant_factors)),
            (None, Some(r)) => r.clone(),
            (None, None) => String::new(),
        };
        format!("{}\t{}\t{status}\t{tail}", self.group, self.order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("batch line serializes")
    }
}

/// Totals over a batch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub total: usize,
    pub holds: usize,
    pub violations: usize,
    pub skipped: usize,
}

impl BatchSummary {
    pub fn of(lines: &[BatchLine]) -> Self {
        let count = |s: BatchStatus| lines.iter().filter(|l| l.status == s).count();
        BatchSummary {
            total: lines.len(),
            holds: count(BatchStatus::Holds),
            violations: count(BatchStatus::Violation),
            skipped: count(BatchStatus::Skipped),
        }
    }

    pub fn render_text(&self) -> String {
        format!(
            "summary\ttotal={}\tholds={}\tviolations={}\tskipped={}",
            self.total, self.holds, self.violations, self.skipped
        )
    }
}
