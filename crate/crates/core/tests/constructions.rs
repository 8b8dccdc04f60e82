mod common;

use common::{fl_vector, is_semichar, rank_mod_p, val, Table};
use semichar::constructions::{
    alternating_two_semichars, attach_exact, construct_for, cyclic_sylow_semichars, gl_p_part_semichars,
    ConstructionError, Domain,
};
use semichar::engine::{semichar_group, EngineConfig};
use semichar::families::FamilySpec;

/// Images of every permutation of `0..n`, lexicographic.
fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_lengths(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    p.iter().map(|&x| q[x]).collect()
}

#[test]
fn a8_two_part_has_rank_27() {
    let elements: Vec<Vec<usize>> = lex_permutations(8)
        .into_iter()
        .filter(|p| {
            let c = cycle_lengths(p);
            c.iter().all(|l| l.is_power_of_two()) && c.iter().filter(|&&l| l % 2 == 0).count() % 2 == 0
        })
        .collect();
    let r = alternating_two_semichars(8).unwrap();
    assert_eq!(r.domain, Domain::PrimaryPart { size: elements.len() });
    assert_eq!(r.claimed_lower_bound, 28);
    let vectors: Vec<Vec<u64>> = r.produced.iter().map(|f| fl_vector(f.values(), 2)).collect();
    assert_eq!(vectors.len(), 28);

    let index: std::collections::HashMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
    for (a, p) in elements.iter().enumerate() {
        for (b, q) in elements.iter().enumerate().skip(a) {
            let pq = compose(p, q);
            if pq != compose(q, p) {
                continue;
            }
            let c = index[&pq];
            for v in &vectors {
                assert_eq!((v[a] + v[b]) % 2, v[c], "not additive at ({a}, {b})");
            }
        }
    }
    assert_eq!(rank_mod_p(&vectors, 2), 27);
    let sum: Vec<u64> = (0..elements.len()).map(|i| vectors.iter().map(|v| v[i]).sum::<u64>() % 2).collect();
    assert!(sum.iter().all(|&x| x == 0));
    assert_eq!(r.independence_rank, 27);
    assert!(r.certified_valuation >= val(20160, 2));
}

#[test]
fn a4_klein_dual() {
    let r = alternating_two_semichars(4).unwrap();
    assert_eq!(r.produced.len(), 4);
    assert_eq!(r.certified_valuation, 2);
    assert!(matches!(alternating_two_semichars(6), Err(ConstructionError::BadParameter(_))));
}

#[test]
fn cyclic_sylows_glue_to_semicharacters() {
    for (name, l) in [("s3", 3), ("d5", 5), ("a4", 3), ("dic3", 3), ("s3*c2", 3)] {
        let g = FamilySpec::parse(name).unwrap().build().unwrap();
        let t = Table::of(&g.table);
        let r = cyclic_sylow_semichars(&g.table, l).unwrap();
        assert_eq!(r.domain, Domain::FullGroup { order: t.n });
        assert!(r.produced.iter().all(|f| is_semichar(&t, f.values())), "{name} at {l}");
        assert!(r.meets_target(), "{name} at {l}");
    }
    let q8 = FamilySpec::parse("q8").unwrap().build().unwrap();
    assert!(matches!(
        cyclic_sylow_semichars(&q8.table, 2),
        Err(ConstructionError::SylowNotCyclic { prime: 2, max_order: 4, sylow_order: 8 })
    ));
    assert!(cyclic_sylow_semichars(&q8.table, 3).is_err());
}

#[test]
fn unipotent_part_agrees_with_exact() {
    let cfg = EngineConfig::default();
    for q in [2, 3, 4] {
        let mut r = gl_p_part_semichars(2, q).unwrap();
        let g = FamilySpec::Gl2(q).build().unwrap();
        attach_exact(&mut r, &semichar_group(&g.table, &cfg).unwrap());
        assert_eq!(r.consistent_with_exact(), Some(true));
        assert!(r.meets_target(), "GL(2,{q})");
    }
}

#[test]
fn dispatch_picks_the_construction() {
    let cases = [
        ("s5", 2, "symmetric cycle classes"),
        ("a5", 2, "alternating 2-part"),
        ("a5", 3, "symmetric cycle classes"),
        ("heis:3", 3, "Heisenberg coordinates"),
        ("u3:3", 3, "unitriangular logarithm"),
        ("d7", 7, "cyclic Sylow gluing"),
    ];
    for (name, l, construction) in cases {
        let r = construct_for(&FamilySpec::parse(name).unwrap(), l).unwrap();
        assert_eq!(r.construction, construction, "{name} at {l}");
    }
    assert!(construct_for(&FamilySpec::parse("s4").unwrap(), 4).is_err());
    assert!(matches!(construct_for(&FamilySpec::parse("u3:2").unwrap(), 2), Err(ConstructionError::BadParameter(_))));
}
