use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Cycle, Permutation};
use crate::engine::{semichar_group, verify_semicharacter, EngineConfig, EngineError, RelationLattice, Semicharacter};
use crate::families::{all_permutations, make_alternating, make_symmetric};
use crate::group::CommutingSubset;
use crate::numtheory::{binomial, factorial, is_prime, valuation};
use crate::residue::Residue;
use crate::zlattice::{self, IntMatrix};

use super::{certify, verify_local, ConstructionError, ConstructionReport, Domain, PRIMARY_PART_CAP};

/// Degrees for which every permutation is enumerated to find an l-part.
const MAX_ENUMERATED_DEGREE: usize = 9;

/// `val_l(n!)` by Legendre's formula; also checks `val_l(n!) < n/(l-1)`.
pub fn legendre_valuation(n: u64, l: u64) -> u32 {
    assert!(is_prime(l), "{l} is not prime");
    let mut total = 0u64;
    let mut power = l;
    while power <= n {
        total += n / power;
        power = match power.checked_mul(l) {
            Some(p) => p,
            None => break,
        };
    }
    assert!(n == 0 || total * (l - 1) < n, "Legendre bound violated");
    total as u32
}

/// `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `k`-cycles of `S_n` grouped into classes `π ~ π^i`, `gcd(i, l) = 1`.
/// Each cycle maps to its class and to `i mod l`, where `π = c^i` for the
/// class representative `c`.
struct CycleClasses {
    lookup: HashMap<Cycle, (usize, u64)>,
    count: usize,
}

impl CycleClasses {
    fn new(n: usize, k: usize, l: u64) -> Self {
        let mut lookup = HashMap::new();
        let mut count = 0;
        let arrangements = all_permutations(k - 1);
        for subset in subsets(n, k) {
            for arr in &arrangements {
                let mut points = vec![subset[0]];
                points.extend(arr.images().iter().map(|&i| subset[i + 1]));
                let cycle = Cycle(points);
                if lookup.contains_key(&cycle) {
                    continue;
                }
                let rep = cycle.to_permutation(n);
                for i in (1..k as i64).filter(|&i| i.gcd(&(l as i64)) == 1) {
                    let power = rep.pow(i).cycles_of_length(k).pop().expect("power of a k-cycle");
                    lookup.insert(power, (count, i as u64 % l));
                }
                count += 1;
            }
        }
        CycleClasses { lookup, count }
    }

    /// One function per class: `π ↦ Σ f(c)` over the `k`-cycles `c` of
    /// `π` (or of `π²` when `square` is set).
    fn functions(&self, elements: &[Permutation], k: usize, l: u64, square: bool) -> Vec<Semicharacter> {
        let mut values = vec![vec![0u64; elements.len()]; self.count];
        for (idx, p) in elements.iter().enumerate() {
            let source = if square { p.then(p) } else { p.clone() };
            for c in source.cycles_of_length(k) {
                let (class, v) = self.lookup[&c];
                values[class][idx] = (values[class][idx] + v) % l;
            }
        }
        values.iter().map(|v| Semicharacter::from_fl(v, l)).collect()
    }
}

/// Elements of `S_n` (or `A_n`) of `l`-power order, in lexicographic order.
fn primary_permutations(n: usize, l: u64, even_only: bool) -> Result<Vec<Permutation>, ConstructionError> {
    if n > MAX_ENUMERATED_DEGREE {
        return Err(ConstructionError::TooLarge {
            what: "enumerating permutations",
            size: factorial(n as u64) as u128,
            cap: factorial(MAX_ENUMERATED_DEGREE as u64) as usize,
        });
    }
    let elements: Vec<Permutation> = all_permutations(n)
        .into_iter()
        .filter(|p| (!even_only || p.is_even()) && crate::group::is_power_of(p.order(), l))
        .collect();
    if elements.len() > PRIMARY_PART_CAP {
        return Err(ConstructionError::TooLarge {
            what: "primary part",
            size: elements.len() as u128,
            cap: PRIMARY_PART_CAP,
        });
    }
    Ok(elements)
}

fn commuting_data(elements: &[Permutation]) -> CommutingSubset {
    CommutingSubset::from_elements(elements, |a, b| a.commutes_with(b), |a, b| a.then(b))
}

fn report_on_primary_part(
    construction: &'static str,
    group: String,
    l: u64,
    elements: &[Permutation],
    produced: Vec<Semicharacter>,
    claimed: u64,
    target: u32,
    notes: Vec<String>,
) -> Result<ConstructionReport, ConstructionError> {
    let c = commuting_data(elements);
    for f in &produced {
        verify_local(construction, &c, f)?;
    }
    let (independence_rank, certified_valuation) = certify(&produced, l);
    Ok(ConstructionReport {
        construction,
        group,
        prime: l,
        domain: Domain::PrimaryPart { size: elements.len() },
        produced,
        independence_rank,
        claimed_lower_bound: claimed,
        certified_valuation,
        target_valuation: target,
        exact_valuation: None,
        notes,
    })
}

/// `binom(n, k)·(k-1)!/(k - k/l)`: the number of `k`-cycles up to coprime
/// powers.
fn class_count_formula(n: u64, k: u64, l: u64) -> u64 {
    binomial(n, k) * factorial(k - 1) / (k - k / l)
}

/// Semicharacters of `S_n[l^∞]` from the `l^e`-cycles, `l^e ≤ n < l^{e+1}`:
/// for each power class of `l^e`-cycles, the function counting (with
/// exponent) the cycles of that class in a permutation.
pub fn symmetric_cycle_semichars(n: usize, l: u64) -> Result<ConstructionReport, ConstructionError> {
    if !is_prime(l) || l as usize > n {
        return Err(ConstructionError::BadParameter(format!("need a prime l <= n, got l = {l}, n = {n}")));
    }
    let mut k = l as usize;
    while k * l as usize <= n {
        k *= l as usize;
    }
    let elements = primary_permutations(n, l, false)?;
    let classes = CycleClasses::new(n, k, l);
    let formula = class_count_formula(n as u64, k as u64, l);
    if classes.count as u64 != formula {
        return Err(ConstructionError::Inconsistent(format!(
            "{} classes of {k}-cycles counted, formula gives {formula}",
            classes.count
        )));
    }
    let produced = classes.functions(&elements, k, l, false);
    report_on_primary_part(
        "symmetric cycle classes",
        format!("S{n}"),
        l,
        &elements,
        produced,
        formula,
        legendre_valuation(n as u64, l),
        vec![format!("{} power classes of {k}-cycles", classes.count)],
    )
}

/// 2-power-order semicharacters of `A_n` for `n ∈ {4, 5}` and
/// `n ∈ {2^k, 2^k + 1}` with `k ≥ 3`.
pub fn alternating_two_semichars(n: usize) -> Result<ConstructionReport, ConstructionError> {
    let target = valuation(factorial(n as u64) / 2, 2);
    match n {
        4 | 5 => {
            let elements = primary_permutations(n, 2, true)?;
            // The Klein four-group on {0,1,2,3}, as positions in `elements`.
            let klein: Vec<usize> = elements
                .iter()
                .enumerate()
                .filter(|(_, p)| (4..n).all(|x| p.apply(x) == x))
                .map(|(i, _)| i)
                .collect();
            let (a, b) = (klein[1], klein[2]);
            let ab = elements.iter().position(|p| *p == elements[a].then(&elements[b])).expect("closed");
            let produced = (0..4u64)
                .map(|bits| {
                    let (s, t) = (bits & 1, bits >> 1);
                    let mut values = vec![0u64; elements.len()];
                    values[a] = s;
                    values[b] = t;
                    values[ab] = (s + t) % 2;
                    Semicharacter::from_fl(&values, 2)
                })
                .collect();
            let note = if n == 4 {
                "A4[2^∞] is the Klein four-group; its full dual".to_string()
            } else {
                "dual of the Klein four-group fixing 5, extended by zero".to_string()
            };
            report_on_primary_part("alternating 2-part", format!("A{n}"), 2, &elements, produced, 2, target, vec![note])
        }
        _ => {
            let m = if n.is_power_of_two() { n } else { n - 1 };
            if m < 8 || !m.is_power_of_two() {
                return Err(ConstructionError::BadParameter(format!(
                    "n must be 4, 5, 2^k or 2^k+1 with k >= 3, got {n}"
                )));
            }
            let k = m / 4;
            let elements = primary_permutations(n, 2, true)?;
            let classes = CycleClasses::new(n, k, 2);
            let formula = class_count_formula(n as u64, k as u64, 2);
            let produced = classes.functions(&elements, k, 2, true);
            let mut report = report_on_primary_part(
                "alternating 2-part",
                format!("A{n}"),
                2,
                &elements,
                produced,
                formula,
                target,
                vec![format!("{} power classes of {k}-cycles, read off squares", classes.count)],
            )?;
            if report.independence_rank < formula as usize {
                report.notes.push(format!(
                    "the class functions span only {} dimensions: every {}-cycle of π squares to two {k}-cycles, so the sum of all class functions vanishes",
                    report.independence_rank,
                    2 * k
                ));
            }
            Ok(report)
        }
    }
}

/// The `F_2` system `Σ_{i<j in T} x_{ij} = 0` over all 4-subsets `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranspositionSystem {
    pub n: usize,
    pub equations: usize,
    pub variables: usize,
    pub rank: usize,
    pub nullspace_dim: usize,
    /// A basis of the solution space, one value per pair `i < j` in
    /// lexicographic order.
    pub solutions: Vec<Vec<u64>>,
    /// Whether the all-ones assignment (every transposition sent to `-1`)
    /// solves the system.
    pub constants_solve: bool,
}

pub fn transposition_relation_system(n: usize) -> Result<TranspositionSystem, ConstructionError> {
    if n < 4 {
        return Err(ConstructionError::BadParameter(format!("need n >= 4, got {n}")));
    }
    let pairs = subsets(n, 2);
    let pair_index: HashMap<Vec<usize>, usize> = pairs.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let rows: Vec<Vec<i64>> = subsets(n, 4)
        .into_iter()
        .map(|t| {
            let mut row = vec![0i64; pairs.len()];
            for pair in subsets(4, 2) {
                row[pair_index[&vec![t[pair[0]], t[pair[1]]]]] = 1;
            }
            row
        })
        .collect();
    let m = IntMatrix::from_rows(pairs.len(), &rows);
    let solutions = zlattice::nullspace_mod_p(&m, 2).map_err(EngineError::from)?;
    let rank = pairs.len() - solutions.len();
    let constants_solve = rows.iter().all(|r| r.iter().sum::<i64>() % 2 == 0);
    Ok(TranspositionSystem {
        n,
        equations: rows.len(),
        variables: pairs.len(),
        rank,
        nullspace_dim: solutions.len(),
        solutions,
        constants_solve,
    })
}

/// `ker(Ŝ_n → Â_n)` for the restriction along `A_n ⊆ S_n`.
#[derive(Clone, Debug)]
pub struct RestrictionKernel {
    pub n: usize,
    pub order: u64,
    pub invariant_factors: Vec<u64>,
    pub exponent: u64,
    /// Generators as functions on `S_n` (lexicographic element order).
    pub generators: Vec<Semicharacter>,
    /// Every kernel element (listed when there are at most 256).
    pub elements: Vec<Semicharacter>,
    pub sign: Semicharacter,
    pub contains_sign: bool,
    pub symmetric_order: BigUint,
    pub alternating_order: BigUint,
    /// Whether `|Ŝ_n| / |ker|` divides `|Â_n|`.
    pub image_divides: bool,
}

const MAX_KERNEL_DEGREE: usize = 6;

/// Computes the kernel as `Z^{S_n}` modulo the relation lattice plus the
/// coordinates of `A_n`: its dual is exactly the set of semicharacters of
/// `S_n` vanishing on `A_n`.
pub fn restriction_kernel(n: usize) -> Result<RestrictionKernel, ConstructionError> {
    if n == 0 || n > MAX_KERNEL_DEGREE {
        return Err(ConstructionError::BadParameter(format!(
            "restriction kernel needs 1 <= n <= {MAX_KERNEL_DEGREE}, got {n}"
        )));
    }
    let s = make_symmetric(n)?;
    let a = make_alternating(n)?;
    let perms = match &s.realization {
        crate::families::Realization::Permutations(p) => p,
        _ => unreachable!("symmetric groups are realized by permutations"),
    };
    let lattice = RelationLattice::from_commuting(&CommutingSubset::of_group(&s.table));
    let mut m = lattice.matrix().clone();
    for (i, p) in perms.iter().enumerate() {
        if p.is_even() {
            m.push_row([(i, 1)]);
        }
    }
    let q = zlattice::sparse_quotient(&m, true).map_err(EngineError::from)?;
    if q.free_rank() > 0 {
        return Err(EngineError::FreePart(q.free_rank()).into());
    }
    let invariant_factors: Vec<u64> = q
        .nontrivial_factors()
        .iter()
        .map(|d| u64::try_from(d).expect("small factor"))
        .collect();
    let generators: Vec<Semicharacter> =
        q.generators.expect("requested").into_iter().map(|g| Semicharacter::new(g.values)).collect();
    for f in &generators {
        super::verify_full("restriction kernel", &s.table, f)?;
        if perms.iter().zip(f.values()).any(|(p, v)| p.is_even() && !v.is_zero()) {
            return Err(ConstructionError::Inconsistent("kernel generator is nonzero on A_n".into()));
        }
    }
    let order: u64 = invariant_factors.iter().product();
    let exponent = invariant_factors.iter().copied().max().unwrap_or(1);
    let elements = if order <= 256 { span(&generators, s.order()) } else { Vec::new() };
    let sign = Semicharacter::new(
        perms.iter().map(|p| if p.is_even() { Residue::ZERO } else { Residue::new(1, 2) }).collect(),
    );
    let contains_sign = verify_semicharacter(&s.table, &sign).is_ok()
        && (elements.is_empty() || elements.contains(&sign));
    let cfg = EngineConfig::default();
    let symmetric_order = semichar_group(&s.table, &cfg)?.order();
    let alternating_order = semichar_group(&a.table, &cfg)?.order();
    let kernel = BigUint::from(order);
    let image_divides = (&symmetric_order % &kernel).is_zero()
        && (&alternating_order % (&symmetric_order / &kernel)).is_zero();
    Ok(RestrictionKernel {
        n,
        order,
        invariant_factors,
        exponent,
        generators,
        elements,
        sign,
        contains_sign,
        symmetric_order,
        alternating_order,
        image_divides,
    })
}

/// All sums `Σ c_i f_i`, `0 <= c_i < ord(f_i)`.
fn span(generators: &[Semicharacter], len: usize) -> Vec<Semicharacter> {
    let mut out = vec![Semicharacter::zero(len)];
    for g in generators {
        let multiples: Vec<Semicharacter> = (0..g.order() as i128).map(|c| g.scale(c)).collect();
        out = out.iter().flat_map(|x| multiples.iter().map(move |y| x.add(y))).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(4, 2), 3);
        assert_eq!(legendre_valuation(7, 2), 4);
        assert_eq!(legendre_valuation(25, 5), 6);
    }

    #[test]
    fn symmetric_examples() {
        for (n, l, rank) in [(4, 2, 3), (3, 2, 3), (5, 5, 6)] {
            let r = symmetric_cycle_semichars(n, l).unwrap();
            assert_eq!(r.independence_rank, rank, "S{n} at {l}");
            assert_eq!(r.claimed_lower_bound, rank as u64);
        }
        assert!(symmetric_cycle_semichars(3, 5).is_err());
    }

    #[test]
    fn alternating_small() {
        let r = alternating_two_semichars(4).unwrap();
        assert_eq!((r.produced.len(), r.independence_rank), (4, 2));
        let r = alternating_two_semichars(5).unwrap();
        assert_eq!(r.domain, Domain::PrimaryPart { size: 16 });
        assert_eq!(r.independence_rank, 2);
        assert!(alternating_two_semichars(6).is_err());
    }

    #[test]
    fn transposition_small() {
        let t = transposition_relation_system(4).unwrap();
        assert_eq!((t.equations, t.variables, t.nullspace_dim), (1, 6, 5));
        assert!(t.constants_solve);
    }

    #[test]
    fn kernel_s3() {
        let k = restriction_kernel(3).unwrap();
        assert_eq!(k.order, 8);
        assert_eq!(k.exponent, 2);
        assert!(k.contains_sign);
        assert_eq!(k.elements.len(), 8);
    }
}
