//! Explicit semicharacter families, each reported together with the lower
//! bound on `val_l(|Ĝ|)` it certifies.
//!
//! Functions with values in `F_l` are stored as semicharacters with values in
//! `{0, 1/l, ..., (l-1)/l}`, so one verifier covers every construction.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    self, certified_generated_order, extend_from_l_part, verify_on_commuting, verify_semicharacter,
    EngineError, Semicharacter, Violation,
};
use crate::families::{FamilyError, FamilySpec};
use crate::group::{CommutingSubset, GroupTable, LPartSubset};
use crate::numtheory::{is_prime, valuation_big};
use crate::zlattice;

mod cyclic;
mod gl2;
mod symmetric;
mod unipotent;

pub use cyclic::cyclic_sylow_semichars;
pub use gl2::{
    gl2_cyclic_subgroup_count, gl2_suite, gl2_sylow_facts, CyclicSubgroupCount, DihedralSylow, SplitPrimeFact,
    SylowFacts,
};
pub use symmetric::{
    alternating_two_semichars, legendre_valuation, restriction_kernel, symmetric_cycle_semichars,
    transposition_relation_system, RestrictionKernel, TranspositionSystem,
};
pub use unipotent::{
    gl_p_part_semichars, heisenberg_semichars, matrix_log, truncated_exp, truncated_log,
    unitriangular_log_semichars, w_polynomial, HeisenbergReport, LogPolynomial,
};

/// Elements materialized for a construction that never builds a full table.
pub const PRIMARY_PART_CAP: usize = 25_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the {prime}-Sylow subgroups are not cyclic (largest {prime}-element order {max_order}, Sylow order {sylow_order})")]
    SylowNotCyclic { prime: u64, max_order: u64, sylow_order: u64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("{what} needs {size} elements, above the cap of {cap}")]
    TooLarge { what: &'static str, size: u128, cap: usize },
    #[error("matrix is not nilpotent of degree at most {0}")]
    NotNilpotent(usize),
    #[error("{construction}: produced function fails on the pair ({a}, {b})")]
    Verification { construction: &'static str, a: usize, b: usize },
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// What the produced functions are defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Every element of the group, in table order.
    FullGroup { order: usize },
    /// An explicit list of `l`-power-order elements, closed under commuting
    /// products.
    PrimaryPart { size: usize },
}

impl Domain {
    pub fn size(&self) -> usize {
        match *self {
            Domain::FullGroup { order } => order,
            Domain::PrimaryPart { size } => size,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub construction: &'static str,
    pub group: String,
    pub prime: u64,
    pub domain: Domain,
    pub produced: Vec<Semicharacter>,
    /// Rank over `F_l` of the order-`l` multiples of the produced functions.
    pub independence_rank: usize,
    /// The bound on `val_l(|Ĝ|)` the construction is meant to deliver.
    pub claimed_lower_bound: u64,
    /// The bound the produced functions actually certify.
    pub certified_valuation: u32,
    /// `val_l(|G|)`.
    pub target_valuation: u32,
    /// `val_l(|Ĝ|)` from an exact computation, when one was run.
    pub exact_valuation: Option<u32>,
    pub notes: Vec<String>,
}

impl ConstructionReport {
    /// The best proven lower bound on `val_l(|Ĝ|)`.
    pub fn best_valuation(&self) -> u32 {
        self.certified_valuation.max(self.exact_valuation.unwrap_or(0))
    }

    pub fn meets_target(&self) -> bool {
        self.best_valuation() >= self.target_valuation
    }

    /// Whether the produced functions certify the claimed bound.
    pub fn bound_certified(&self) -> bool {
        self.certified_valuation as u64 >= self.claimed_lower_bound
    }

    /// `None` without an exact value; otherwise whether the construction
    /// stayed below it.
    pub fn consistent_with_exact(&self) -> Option<bool> {
        self.exact_valuation.map(|v| v >= self.certified_valuation)
    }
}

impl fmt::Display for ConstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let domain = match self.domain {
            Domain::FullGroup { order } => format!("all {order} elements"),
            Domain::PrimaryPart { size } => format!("{size} elements of {}-power order", self.prime),
        };
        writeln!(f, "{} on {} at l = {}", self.construction, self.group, self.prime)?;
        writeln!(f, "  domain: {domain}")?;
        writeln!(f, "  functions produced: {}", self.produced.len())?;
        writeln!(f, "  independence rank over F_{}: {}", self.prime, self.independence_rank)?;
        writeln!(f, "  claimed bound: val_{}(|Ĝ|) >= {}", self.prime, self.claimed_lower_bound)?;
        writeln!(f, "  certified:     val_{}(|Ĝ|) >= {}", self.prime, self.certified_valuation)?;
        if let Some(v) = self.exact_valuation {
            writeln!(f, "  exact:         val_{}(|Ĝ|) = {v}", self.prime)?;
        }
        write!(f, "  target val_{}(|G|) = {}: {}", self.prime, self.target_valuation, if self.meets_target() { "met" } else { "NOT met" })?;
        for note in &self.notes {
            write!(f, "\n  note: {note}")?;
        }
        Ok(())
    }
}

/// Rank of the socles and the certified valuation of the generated group.
fn certify(produced: &[Semicharacter], l: u64) -> (usize, u32) {
    let socle: Vec<Vec<u64>> = produced
        .iter()
        .filter_map(|f| {
            let d = f.order();
            (d % l == 0).then(|| f.scale((d / l) as i128).to_fl(l).expect("order l"))
        })
        .collect();
    let rank = zlattice::vectors_rank_mod_p(&socle, l);
    let nonzero: Vec<Semicharacter> = produced.iter().filter(|f| !f.is_zero()).cloned().collect();
    let certified = match certified_generated_order(&nonzero) {
        Some(order) => valuation_big(&order, l),
        None => rank as u32,
    };
    (rank, certified.max(rank as u32))
}

fn check_prime(l: u64) -> Result<(), ConstructionError> {
    if is_prime(l) {
        Ok(())
    } else {
        Err(ConstructionError::BadParameter(format!("{l} is not prime")))
    }
}

/// Verifies `F_l`-valued functions on `G[l^∞]` (local indices of `a`),
/// extends them to all of `G`, and verifies the extensions.
fn extend_verified(
    construction: &'static str,
    g: &GroupTable,
    a: &LPartSubset,
    local: Vec<Semicharacter>,
) -> Result<Vec<Semicharacter>, ConstructionError> {
    let c = CommutingSubset::of_subset(g, &a.members);
    for f in &local {
        verify_local(construction, &c, f).map_err(|e| match e {
            ConstructionError::Verification { construction, a: x, b: y } => {
                ConstructionError::Verification { construction, a: a.members[x], b: a.members[y] }
            }
            other => other,
        })?;
    }
    let extended = local
        .iter()
        .map(|f| extend_from_l_part(g, a, f))
        .collect::<Result<Vec<_>, EngineError>>()?;
    for f in &extended {
        verify_full(construction, g, f)?;
    }
    Ok(extended)
}

fn verify_local(construction: &'static str, c: &CommutingSubset, f: &Semicharacter) -> Result<(), ConstructionError> {
    match verify_on_commuting(c, f) {
        Ok(()) => Ok(()),
        Err(Violation::Pair { a, b }) => Err(ConstructionError::Verification { construction, a, b }),
        Err(Violation::WrongLength { expected, got }) => {
            Err(EngineError::WrongLength { expected, got }.into())
        }
    }
}

fn verify_full(construction: &'static str, g: &GroupTable, f: &Semicharacter) -> Result<(), ConstructionError> {
    match verify_semicharacter(g, f) {
        Ok(()) => Ok(()),
        Err(Violation::Pair { a, b }) => Err(ConstructionError::Verification { construction, a, b }),
        Err(Violation::WrongLength { expected, got }) => {
            Err(EngineError::WrongLength { expected, got }.into())
        }
    }
}

/// Runs the construction that applies to `spec` at the prime `l`: the
/// cycle constructions for `S_n`/`A_n`, the logarithm for unitriangular
/// and Heisenberg groups, the per-prime branch for `GL(2,q)`, and cyclic
/// Sylow gluing for anything else.
pub fn construct_for(spec: &FamilySpec, l: u64) -> Result<ConstructionReport, ConstructionError> {
    check_prime(l)?;
    match *spec {
        FamilySpec::Symmetric(n) => symmetric_cycle_semichars(n, l),
        FamilySpec::Alternating(n) if l == 2 => alternating_two_semichars(n),
        FamilySpec::Alternating(n) => {
            let mut r = symmetric_cycle_semichars(n, l)?;
            r.group = format!("A{n}");
            r.notes.push(format!("A{n} and S{n} have the same elements of odd {l}-power order"));
            Ok(r)
        }
        FamilySpec::Heisenberg(q) if q % l == 0 && q % 2 == 1 => Ok(heisenberg_semichars(q)?.report),
        FamilySpec::Heisenberg(q) if q % l == 0 => unitriangular_log_semichars(3, q),
        FamilySpec::Unitriangular(n, q) if q % l == 0 => unitriangular_log_semichars(n, q),
        FamilySpec::Gl2(q) => gl2_suite(q)
            .remove(&l)
            .unwrap_or(Err(ConstructionError::BadParameter(format!("{l} does not divide |GL(2,{q})|")))),
        _ => {
            let g = spec.build()?;
            let mut r = cyclic_sylow_semichars(&g.table, l)?;
            r.group = g.name();
            Ok(r)
        }
    }
}

/// Fills `exact_valuation` from an exact computation of `Ĝ`.
pub fn attach_exact(report: &mut ConstructionReport, desc: &engine::SemicharGroupDesc) {
    report.exact_valuation = Some(desc.valuation(report.prime));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certify_counts_independent_socles() {
        let f = Semicharacter::from_fl(&[0, 1, 0, 1], 2);
        let g = Semicharacter::from_fl(&[0, 0, 1, 1], 2);
        let (rank, cert) = certify(&[f.clone(), g.clone(), f.add(&g)], 2);
        assert_eq!((rank, cert), (2, 2));
    }

    #[test]
    fn construct_for_dispatches() {
        let r = construct_for(&FamilySpec::Symmetric(4), 2).unwrap();
        assert_eq!(r.construction, "symmetric cycle classes");
        let r = construct_for(&FamilySpec::Dihedral(5), 5).unwrap();
        assert_eq!(r.construction, "cyclic Sylow gluing");
        assert_eq!(r.claimed_lower_bound, 1);
        assert!(construct_for(&FamilySpec::Cyclic(6), 4).is_err());
    }
}
