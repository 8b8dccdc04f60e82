use crate::engine::Semicharacter;
use crate::group::GroupTable;
use crate::numtheory::{l_part, valuation};

use super::{certify, check_prime, extend_verified, ConstructionError, ConstructionReport, Domain};

/// The distinct cyclic subgroups generated by elements of order `k`, each
/// listed as `[1, c, c^2, ...]` for its first generator `c`.
pub(super) fn cyclic_subgroups_of_order(g: &GroupTable, k: u64) -> Vec<Vec<usize>> {
    let mut taken = vec![false; g.order()];
    let mut out = Vec::new();
    for x in 0..g.order() {
        if taken[x] || g.element_order(x) != k {
            continue;
        }
        let powers: Vec<usize> = (0..k as i64).map(|i| g.power(x, i)).collect();
        for (i, &y) in powers.iter().enumerate() {
            if num_integer::gcd(i as u64, k) == 1 {
                taken[y] = true;
            }
        }
        out.push(powers);
    }
    out
}

/// One `F_l`-valued function per cyclic `l`-Sylow subgroup `L_i`: the
/// nontrivial homomorphism `c^k ↦ k/l` on `L_i`, zero elsewhere on
/// `G[l^∞]`, extended to `G`.
///
/// Sylows are recognized as cyclic when some element has order equal to the
/// `l`-part of `|G|`; the subgroups are the ones such elements generate.
pub fn cyclic_sylow_semichars(g: &GroupTable, l: u64) -> Result<ConstructionReport, ConstructionError> {
    check_prime(l)?;
    let order = g.order() as u64;
    let sylow_order = l_part(order, l);
    if sylow_order == 1 {
        return Err(ConstructionError::BadParameter(format!("{l} does not divide |G| = {order}")));
    }
    let sylows = cyclic_subgroups_of_order(g, sylow_order);
    if sylows.is_empty() {
        let max_order = (0..g.order())
            .map(|x| g.element_order(x))
            .filter(|&o| l_part(o, l) == o)
            .max()
            .unwrap_or(1);
        return Err(ConstructionError::SylowNotCyclic { prime: l, max_order, sylow_order });
    }
    let a = g.l_part(l).map_err(|_| ConstructionError::BadParameter(format!("{l} is not prime")))?;
    let local: Vec<Semicharacter> = sylows
        .iter()
        .map(|powers| {
            let mut values = vec![0u64; a.len()];
            for (k, &x) in powers.iter().enumerate() {
                values[a.position(x).expect("l-element")] = k as u64 % l;
            }
            Semicharacter::from_fl(&values, l)
        })
        .collect();
    let produced = extend_verified("cyclic Sylow gluing", g, &a, local)?;
    let (independence_rank, certified_valuation) = certify(&produced, l);
    Ok(ConstructionReport {
        construction: "cyclic Sylow gluing",
        group: format!("group of order {order}"),
        prime: l,
        domain: Domain::FullGroup { order: g.order() },
        produced,
        independence_rank,
        claimed_lower_bound: sylows.len() as u64,
        certified_valuation,
        target_valuation: valuation(order, l),
        exact_valuation: None,
        notes: vec![format!("{} cyclic Sylow subgroups of order {sylow_order}", sylows.len())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_alternating, make_gl2, make_symmetric};

    #[test]
    fn small_examples() {
        let s3 = make_symmetric(3).unwrap();
        let r = cyclic_sylow_semichars(&s3.table, 3).unwrap();
        assert_eq!((r.claimed_lower_bound, r.independence_rank), (1, 1));
        let a4 = make_alternating(4).unwrap();
        let r = cyclic_sylow_semichars(&a4.table, 3).unwrap();
        assert_eq!((r.claimed_lower_bound, r.independence_rank), (4, 4));
        assert!(matches!(
            cyclic_sylow_semichars(&a4.table, 2),
            Err(ConstructionError::SylowNotCyclic { max_order: 2, sylow_order: 4, .. })
        ));
        let gl = make_gl2(4).unwrap();
        let r = cyclic_sylow_semichars(&gl.table, 5).unwrap();
        assert_eq!((r.claimed_lower_bound, r.certified_valuation), (6, 6));
    }
}
