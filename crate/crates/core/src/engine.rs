//! The relation lattice of a finite group and its semicharacter group `Ĝ`.
//!
//! `Ĝ ≅ Z^n / L` where `L` is spanned by `e_i + e_j - e_k` for every ordered
//! commuting pair `g_i g_j = g_k`. A semicharacter is a vector of residues
//! annihilating `L`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{CommutingSubset, GroupTable, LPartSubset};
use crate::numtheory::{factorize, is_prime, l_part, l_prime_part, mod_inverse, prime_divisors, valuation};
use crate::par;
use crate::residue::Residue;
use crate::zlattice::{self, LatticeError, SparseMatrix};

/// Feasibility envelopes, all measured in group (or subset) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest order for which a full Smith form is attempted.
    pub snf_cap: usize,
    /// Largest order for a mod-l nullspace.
    pub torsion_cap: usize,
    /// Largest order for which explicit generators are produced.
    pub generator_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { snf_cap: 1500, torsion_cap: 6000, generator_cap: 1000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("{what} on {order} elements exceeds the cap of {cap}; {hint}")]
    TooLarge { what: &'static str, order: usize, cap: usize, hint: &'static str },
    #[error("relation lattice has a free part of rank {0}")]
    FreePart(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("semicharacter has {got} values, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("function is not a semicharacter on the subset: pair ({0}, {1}) fails")]
    InvalidOnSubset(usize, usize),
    #[error("generated subgroup could not be certified to have order |Ĝ|")]
    Uncertified,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn check_cap(what: &'static str, order: usize, cap: usize, hint: &'static str) -> Result<(), EngineError> {
    if order > cap {
        Err(EngineError::TooLarge { what, order, cap, hint })
    } else {
        Ok(())
    }
}

const SNF_HINT: &str = "use the torsion or localize commands instead";

/// Sparse rows `e_i + e_j - e_k`, one per ordered commuting pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    n: usize,
    matrix: SparseMatrix,
}

impl RelationLattice {
    /// Rows in the order of the triples (local indices).
    pub fn from_commuting(c: &CommutingSubset) -> Self {
        let mut matrix = SparseMatrix::new(c.size());
        for &[i, j, k] in c.triples() {
            matrix.push_row([(i as usize, 1), (j as usize, 1), (k as usize, -1)]);
        }
        RelationLattice { n: c.size(), matrix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_count(&self) -> usize {
        self.matrix.row_count()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }
}

/// Relations over the whole group, i-major then j.
pub fn build_relations(g: &GroupTable) -> RelationLattice {
    RelationLattice::from_commuting(&CommutingSubset::of_group(g))
}

/// Invariant factors and factored order of a semicharacter group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicharGroupDesc {
    /// Nontrivial factors, each dividing the next.
    pub invariant_factors: Vec<u64>,
    /// `(prime, exponent)` pairs, ascending primes.
    pub factored_order: Vec<(u64, u32)>,
    /// Order of the group (or element subset) it was computed from.
    pub source_order: usize,
}

impl SemicharGroupDesc {
    fn from_factors(invariant_factors: Vec<u64>, source_order: usize) -> Self {
        let mut exps: std::collections::BTreeMap<u64, u32> = Default::default();
        for &d in &invariant_factors {
            for (p, e) in factorize(d) {
                *exps.entry(p).or_default() += e;
            }
        }
        SemicharGroupDesc { invariant_factors, factored_order: exps.into_iter().collect(), source_order }
    }

    pub fn order(&self) -> BigUint {
        self.invariant_factors.iter().map(|&d| BigUint::from(d)).product()
    }

    pub fn valuation(&self, l: u64) -> u32 {
        self.factored_order.iter().find(|(p, _)| *p == l).map_or(0, |&(_, e)| e)
    }

    /// Number of invariant factors divisible by `l` (the `F_l`-dimension
    /// of the `l`-torsion).
    pub fn l_rank(&self, l: u64) -> usize {
        self.invariant_factors.iter().filter(|&&d| d % l == 0).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for SemicharGroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.invariant_factors.iter().map(u64::to_string).collect();
        write!(f, "order {} factors [{}]", self.order(), parts.join(", "))
    }
}

/// `Z^n / L` for a relation lattice, asserting there is no free part.
pub fn quotient_desc(lattice: &RelationLattice) -> Result<SemicharGroupDesc, EngineError> {
    let q = zlattice::sparse_quotient(lattice.matrix(), false)?;
    if q.free_rank() > 0 {
        return Err(EngineError::FreePart(q.free_rank()));
    }
    let factors = q
        .nontrivial_factors()
        .iter()
        .map(|d| d.to_u64().ok_or_else(|| LatticeError::FactorTooLarge(d.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SemicharGroupDesc::from_factors(factors, lattice.n()))
}

pub fn semichar_group(g: &GroupTable, cfg: &EngineConfig) -> Result<SemicharGroupDesc, EngineError> {
    check_cap("full Smith form", g.order(), cfg.snf_cap, SNF_HINT)?;
    log::debug!("building relations for a group of order {}", g.order());
    quotient_desc(&build_relations(g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeValuation {
    pub prime: u64,
    pub group: u32,
    pub semichar: u32,
}

impl PrimeValuation {
    pub fn excess(&self) -> i64 {
        self.semichar as i64 - self.group as i64
    }
}

/// Whether `|G|` divides `|Ĝ|`, with the per-prime comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureVerdict {
    pub holds: bool,
    pub group_order: u64,
    pub desc: SemicharGroupDesc,
    pub valuations: Vec<PrimeValuation>,
}

pub fn verdict_from_desc(group_order: u64, desc: SemicharGroupDesc) -> ConjectureVerdict {
    let mut primes = prime_divisors(group_order);
    for &(p, _) in &desc.factored_order {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    let valuations: Vec<PrimeValuation> = primes
        .into_iter()
        .map(|p| PrimeValuation { prime: p, group: valuation(group_order, p), semichar: desc.valuation(p) })
        .collect();
    let holds = valuations.iter().all(|v| v.excess() >= 0);
    ConjectureVerdict { holds, group_order, desc, valuations }
}

pub fn conjecture_check(g: &GroupTable, cfg: &EngineConfig) -> Result<ConjectureVerdict, EngineError> {
    Ok(verdict_from_desc(g.order() as u64, semichar_group(g, cfg)?))
}

/// A function `G -> Q/Z`, one residue per element (the additive form of a
/// `C*`-valued function).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Semicharacter {
    values: Vec<Residue>,
}

impl Semicharacter {
    pub fn new(values: Vec<Residue>) -> Self {
        Semicharacter { values }
    }

    pub fn zero(n: usize) -> Self {
        Semicharacter { values: vec![Residue::ZERO; n] }
    }

    /// Values `k/l` for `k` in `F_l`.
    pub fn from_fl(values: &[u64], l: u64) -> Self {
        Semicharacter { values: values.iter().map(|&k| Residue::new(k as i128, l)).collect() }
    }

    pub fn values(&self) -> &[Residue] {
        &self.values
    }

    pub fn value(&self, g: usize) -> Residue {
        self.values[g]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Additive order: lcm of the denominators.
    pub fn order(&self) -> u64 {
        self.values.iter().fold(1u64, |acc, v| num_integer::lcm(acc, v.den()))
    }

    pub fn scale(&self, k: i128) -> Self {
        Semicharacter { values: self.values.iter().map(|v| v.scale(k)).collect() }
    }

    pub fn add(&self, other: &Semicharacter) -> Self {
        Semicharacter { values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect() }
    }

    /// `l · values` as an `F_l` vector, if every value lies in `(1/l)Z/Z`.
    pub fn to_fl(&self, l: u64) -> Option<Vec<u64>> {
        self.values.iter().map(|v| v.numerator_over(l)).collect()
    }

    /// Values at the listed elements, in that order.
    pub fn restrict(&self, members: &[usize]) -> Semicharacter {
        Semicharacter { values: members.iter().map(|&g| self.values[g]).collect() }
    }

    /// `g ↦ self(π(g))` for a map `π` into this function's domain.
    pub fn pullback(&self, map: &[usize]) -> Semicharacter {
        Semicharacter { values: map.iter().map(|&g| self.values[g]).collect() }
    }
}

impl fmt::Display for Semicharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(Residue::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Why a function failed to be a semicharacter.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("f({a}·{b}) differs from f({a}) + f({b})")]
    Pair { a: usize, b: usize },
}

/// Exhaustive check over all ordered commuting pairs; reports the first
/// failing pair in i-major order.
pub fn verify_semicharacter(g: &GroupTable, f: &Semicharacter) -> Result<(), Violation> {
    let n = g.order();
    if f.len() != n {
        return Err(Violation::WrongLength { expected: n, got: f.len() });
    }
    let v = f.values();
    match par::find_first(n, |a| {
        (0..n).find(|&b| g.commutes(a, b) && v[g.mul(a, b)] != v[a] + v[b]).map(|b| (a, b))
    }) {
        Some((a, b)) => Err(Violation::Pair { a, b }),
        None => Ok(()),
    }
}

/// The same check against precomputed commuting triples (local indices).
pub fn verify_on_commuting(c: &CommutingSubset, f: &Semicharacter) -> Result<(), Violation> {
    if f.len() != c.size() {
        return Err(Violation::WrongLength { expected: c.size(), got: f.len() });
    }
    let v = f.values();
    let t = c.triples();
    match par::find_first(t.len(), |idx| {
        let [a, b, k] = t[idx];
        (v[k as usize] != v[a as usize] + v[b as usize]).then_some((a as usize, b as usize))
    }) {
        Some((a, b)) => Err(Violation::Pair { a, b }),
        None => Ok(()),
    }
}

/// First pair (over all pairs, commuting or not) where `f` fails to be
/// additive, if any.
pub fn homomorphism_failure(g: &GroupTable, f: &Semicharacter) -> Option<(usize, usize)> {
    let n = g.order();
    let v = f.values();
    par::find_first(n, |a| (0..n).find(|&b| v[g.mul(a, b)] != v[a] + v[b]).map(|b| (a, b)))
}

/// Order of the subgroup generated by `gens`, when it can be certified to be
/// the product of the generator orders.
///
/// For each prime `l` the `l`-primary parts `h_i` of the generators are
/// taken with orders `l^{v_i}`; if the socle elements `l^{v_i - 1} h_i` are
/// independent over `F_l`, the generated group is `⊕ Z/l^{v_i}`.
pub fn certified_generated_order(gens: &[Semicharacter]) -> Option<BigUint> {
    let orders: Vec<u64> = gens.iter().map(Semicharacter::order).collect();
    let mut primes: Vec<u64> = orders.iter().flat_map(|&d| prime_divisors(d)).collect();
    primes.sort_unstable();
    primes.dedup();
    for l in primes {
        let socle: Vec<Vec<u64>> = gens
            .iter()
            .zip(&orders)
            .filter(|(_, &d)| d % l == 0)
            .map(|(f, &d)| {
                let lp = l_part(d, l);
                f.scale((d / lp) as i128).scale((lp / l) as i128).to_fl(l).expect("order l")
            })
            .collect();
        if zlattice::vectors_rank_mod_p(&socle, l) != socle.len() {
            return None;
        }
    }
    Some(orders.iter().map(|&d| BigUint::from(d)).product())
}

/// Rank over `F_l` of functions with values in `(1/l)Z/Z`; `None` if some
/// value is outside.
pub fn independence_rank(functions: &[Semicharacter], l: u64) -> Option<usize> {
    let vecs: Vec<Vec<u64>> = functions.iter().map(|f| f.to_fl(l)).collect::<Option<_>>()?;
    Some(zlattice::vectors_rank_mod_p(&vecs, l))
}

fn generators_for(lattice: &RelationLattice) -> Result<Vec<Semicharacter>, EngineError> {
    let q = zlattice::sparse_quotient(lattice.matrix(), true)?;
    if q.free_rank() > 0 {
        return Err(EngineError::FreePart(q.free_rank()));
    }
    Ok(q.generators.expect("requested").into_iter().map(|g| Semicharacter::new(g.values)).collect())
}

/// One semicharacter per nontrivial invariant factor, each verified, and
/// jointly certified to generate all of `Ĝ`.
pub fn enumerate_semichar_generators(g: &GroupTable, cfg: &EngineConfig) -> Result<Vec<Semicharacter>, EngineError> {
    check_cap("semicharacter generators", g.order(), cfg.generator_cap, SNF_HINT)?;
    let lattice = build_relations(g);
    let desc = quotient_desc(&lattice)?;
    let gens = generators_for(&lattice)?;
    for f in &gens {
        if let Err(Violation::Pair { a, b }) = verify_semicharacter(g, f) {
            return Err(EngineError::InvalidOnSubset(a, b));
        }
    }
    match certified_generated_order(&gens) {
        Some(order) if order == desc.order() => Ok(gens),
        _ => Err(EngineError::Uncertified),
    }
}

/// `dim_{F_l} Ĝ[l]`: the nullity of the relation matrix mod `l`.
pub fn l_torsion_rank(g: &GroupTable, l: u64, cfg: &EngineConfig) -> Result<usize, EngineError> {
    if !is_prime(l) {
        return Err(EngineError::NotPrime(l));
    }
    check_cap("mod-l nullspace", g.order(), cfg.torsion_cap, "raise --snf-cap or use localize")?;
    Ok(zlattice::nullspace_mod_p_sparse(build_relations(g).matrix(), l)?.len())
}

/// `G[l^∞]` with its internal commuting data.
pub fn l_part_data(g: &GroupTable, l: u64) -> Result<(LPartSubset, CommutingSubset), EngineError> {
    let a = g.l_part(l).map_err(|_| EngineError::NotPrime(l))?;
    let c = CommutingSubset::of_subset(g, &a.members);
    debug_assert_eq!(c.dropped_pairs(), 0, "commuting l-elements multiply to l-elements");
    Ok((a, c))
}

/// `Â` for `A = G[l^∞]`, which is isomorphic to the `l`-primary part of `Ĝ`.
pub fn localized_semichar_group(g: &GroupTable, l: u64, cfg: &EngineConfig) -> Result<SemicharGroupDesc, EngineError> {
    if !is_prime(l) {
        return Err(EngineError::NotPrime(l));
    }
    let a = g.l_part(l).map_err(|_| EngineError::NotPrime(l))?;
    check_cap("localized Smith form", a.len(), cfg.snf_cap, "the l-part is too large")?;
    let (_, c) = l_part_data(g, l)?;
    quotient_desc(&RelationLattice::from_commuting(&c))
}

/// Generators of `Â` as functions on `A = G[l^∞]` (indexed like
/// `LPartSubset::members`).
pub fn localized_generators(
    g: &GroupTable,
    l: u64,
    cfg: &EngineConfig,
) -> Result<(LPartSubset, Vec<Semicharacter>), EngineError> {
    let (a, c) = l_part_data(g, l)?;
    check_cap("localized generators", a.len(), cfg.generator_cap, "the l-part is too large")?;
    let gens = generators_for(&RelationLattice::from_commuting(&c))?;
    Ok((a, gens))
}

/// `f̃(g) = b·f(g^m)` where `m` is the `l'`-part of `|G|` and `b·m ≡ 1`
/// modulo the `l`-part.
pub fn extend_from_l_part(
    g: &GroupTable,
    a: &LPartSubset,
    f: &Semicharacter,
) -> Result<Semicharacter, EngineError> {
    let l = a.prime;
    let c = CommutingSubset::of_subset(g, &a.members);
    match verify_on_commuting(&c, f) {
        Ok(()) => {}
        Err(Violation::WrongLength { expected, got }) => return Err(EngineError::WrongLength { expected, got }),
        Err(Violation::Pair { a: x, b: y }) => return Err(EngineError::InvalidOnSubset(a.members[x], a.members[y])),
    }
    let order = g.order() as u64;
    let m = l_prime_part(order, l);
    let la = l_part(order, l);
    let b = if la == 1 { 0 } else { mod_inverse(m as i64 % la as i64, la as i64).expect("coprime") };
    let values = par::map_range(g.order(), |x| {
        let y = g.power(x, m as i64);
        let pos = a.position(y).expect("g^m has l-power order");
        f.value(pos).scale(b as i128)
    });
    Ok(Semicharacter::new(values))
}

/// `|Ĝ|` against the product of the localized orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimaryDecomposition {
    pub holds: bool,
    pub global: SemicharGroupDesc,
    pub local: Vec<(u64, SemicharGroupDesc)>,
}

pub fn primary_decomposition_check(g: &GroupTable, cfg: &EngineConfig) -> Result<PrimaryDecomposition, EngineError> {
    let global = semichar_group(g, cfg)?;
    let local = prime_divisors(g.order() as u64)
        .into_iter()
        .map(|l| Ok((l, localized_semichar_group(g, l, cfg)?)))
        .collect::<Result<Vec<_>, EngineError>>()?;
    let product: BigUint = local.iter().map(|(_, d)| d.order()).product();
    let per_prime = local.iter().all(|(l, d)| d.valuation(*l) == global.valuation(*l) && d.order() == BigUint::from(*l).pow(d.valuation(*l)));
    Ok(PrimaryDecomposition { holds: per_prime && product == global.order(), global, local })
}

/// Whether `|Ĝ|` divides `∏_g ord(g)`, prime by prime.
pub fn divides_order_product(g: &GroupTable, desc: &SemicharGroupDesc) -> bool {
    desc.factored_order.iter().all(|&(p, e)| {
        let available: u64 = g.element_orders().iter().map(|&o| valuation(o as u64, p) as u64).sum();
        e as u64 <= available
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_cyclic, make_dicyclic, make_symmetric};

    #[test]
    fn relation_rows() {
        let c2 = make_cyclic(2).unwrap();
        assert_eq!(build_relations(&c2.table).row_count(), 4);
        let s3 = make_symmetric(3).unwrap();
        let r = build_relations(&s3.table);
        assert_eq!((r.row_count(), r.n()), (18, 6));
        let c1 = make_cyclic(1).unwrap();
        let r1 = build_relations(&c1.table);
        assert_eq!(r1.matrix().rows().collect::<Vec<_>>(), vec![&[(0u32, 1i64)][..]]);
    }

    #[test]
    fn small_groups() {
        let cfg = EngineConfig::default();
        let s3 = semichar_group(&make_symmetric(3).unwrap().table, &cfg).unwrap();
        assert_eq!(s3.invariant_factors, vec![2, 2, 6]);
        let q8 = semichar_group(&make_dicyclic(2).unwrap().table, &cfg).unwrap();
        assert_eq!(q8.invariant_factors, vec![2, 2, 4]);
        let c1 = semichar_group(&make_cyclic(1).unwrap().table, &cfg).unwrap();
        assert!(c1.is_trivial());
    }

    #[test]
    fn c4_generator() {
        let g = make_cyclic(4).unwrap();
        let gens = enumerate_semichar_generators(&g.table, &EngineConfig::default()).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].order(), 4);
        // Some multiple coprime to 4 is the standard character.
        let std = Semicharacter::new((0..4).map(|k| Residue::new(k, 4)).collect());
        assert!(gens[0] == std || gens[0].scale(3) == std);
    }

    #[test]
    fn certification_rejects_dependent_sets() {
        let f = Semicharacter::new(vec![Residue::ZERO, Residue::new(1, 2)]);
        assert_eq!(certified_generated_order(std::slice::from_ref(&f)), Some(BigUint::from(2u32)));
        assert_eq!(certified_generated_order(&[f.clone(), f]), None);
    }
}
