mod common;

use common::{brute_force_dual, is_semichar, Table};
use semichar::engine::{
    divides_order_product, enumerate_semichar_generators, extend_from_l_part, localized_generators,
    semichar_group, verify_semicharacter, EngineConfig, EngineError, Violation,
};
use semichar::families::{builtin_corpus, make_dihedral, make_symmetric, FamilySpec};
use semichar::{Residue, Semicharacter};

#[test]
fn small_groups_match_enumeration() {
    let cfg = EngineConfig::default();
    let mut specs = builtin_corpus(16);
    specs.push(FamilySpec::parse("heis:3").unwrap());
    specs.retain(|s| s.order() <= 16 || s.order() == 27);
    assert!(specs.len() > 20);
    for spec in specs {
        let g = spec.build().unwrap();
        let d = semichar_group(&g.table, &cfg).unwrap();
        assert_eq!(d.invariant_factors, brute_force_dual(&Table::of(&g.table)), "{}", spec.name());
        assert!(divides_order_product(&g.table, &d));
    }
}

#[test]
fn generators_are_semicharacters() {
    let cfg = EngineConfig::default();
    for name in ["s4", "d6", "dic3", "gl2:2", "s3*c2"] {
        let g = FamilySpec::parse(name).unwrap().build().unwrap();
        let t = Table::of(&g.table);
        let gens = enumerate_semichar_generators(&g.table, &cfg).unwrap();
        assert!(gens.iter().all(|f| is_semichar(&t, f.values())), "{name}");
    }
}

#[test]
fn localized_generators_extend() {
    let cfg = EngineConfig::default();
    let g = make_symmetric(4).unwrap();
    let t = Table::of(&g.table);
    for l in [2, 3] {
        let (a, gens) = localized_generators(&g.table, l, &cfg).unwrap();
        for f in &gens {
            let ext = extend_from_l_part(&g.table, &a, f).unwrap();
            assert!(is_semichar(&t, ext.values()));
            // The extension agrees with f on l-elements.
            for (i, &x) in a.members.iter().enumerate() {
                assert_eq!(ext.value(x), f.value(i));
            }
        }
    }
}

#[test]
fn verifier_rejects_non_semicharacters() {
    let g = make_dihedral(3).unwrap();
    let mut values = vec![Residue::ZERO; 6];
    values[1] = Residue::new(1, 2);
    let f = Semicharacter::new(values);
    assert!(matches!(verify_semicharacter(&g.table, &f), Err(Violation::Pair { .. })));
    assert!(matches!(
        verify_semicharacter(&g.table, &Semicharacter::zero(5)),
        Err(Violation::WrongLength { expected: 6, got: 5 })
    ));
}

#[test]
fn caps_refuse_with_hint() {
    let g = make_symmetric(7).unwrap();
    match semichar_group(&g.table, &EngineConfig::default()) {
        Err(EngineError::TooLarge { order: 5040, hint, .. }) => assert!(hint.contains("torsion")),
        other => panic!("expected a refusal, got {other:?}"),
    }
}
