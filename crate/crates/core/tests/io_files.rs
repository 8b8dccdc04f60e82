use semichar::engine::{semichar_group, EngineConfig};
use semichar::families::{make_symmetric, FamilySpec};
use semichar::group::GroupError;
use semichar::io::{
    export_group_file, parse_group_file, parse_group_str, render_group_file, IoError, EXPORT_CAP, FILE_CLOSURE_CAP,
};

fn factors(text: &str) -> Vec<u64> {
    let g = parse_group_str(text, FILE_CLOSURE_CAP).unwrap();
    semichar_group(&g.table, &EngineConfig::default()).unwrap().invariant_factors
}

#[test]
fn table_file_keeps_labels() {
    let text = r#"{"version": 1, "name": "klein", "order": 4, "labels": ["e", "a", "b", "ab"],
        "mul": [0,1,2,3, 1,0,3,2, 2,3,0,1, 3,2,1,0]}"#;
    let g = parse_group_str(text, FILE_CLOSURE_CAP).unwrap();
    assert_eq!(g.order(), 4);
    assert_eq!(g.table.labels().unwrap()[3], "ab");
    assert_eq!(g.name(), "klein");
    assert_eq!(factors(text), vec![2, 2]);
}

#[test]
fn generator_files() {
    assert_eq!(factors(r#"{"version": 1, "perm": ["(1 2 3)", "(1 2)"]}"#), vec![2, 2, 6]);
    let s4 = parse_group_str(r#"{"version": 1, "perm": ["(1 2 3 4)", "(1 2)"]}"#, FILE_CLOSURE_CAP).unwrap();
    assert_eq!(s4.order(), 24);
    let fixed = parse_group_str(r#"{"version": 1, "perm": ["(1 2)"], "degree": 5}"#, FILE_CLOSURE_CAP).unwrap();
    assert_eq!(fixed.order(), 2);

    let sl23 = r#"{"version": 1, "matrix": {"p": 3, "generators": [[[1,1],[0,1]], [[1,0],[1,1]]]}}"#;
    assert_eq!(parse_group_str(sl23, FILE_CLOSURE_CAP).unwrap().order(), 24);
    // Over F_4 = F_2[x]/(x^2+x+1): diag(x, 1) and a unipotent generate a group of order 12.
    let f4 = r#"{"version": 1, "matrix": {"p": 2, "e": 2, "modulus": [1,1,1],
        "generators": [[[[0,1],0],[0,1]], [[1,1],[0,1]]]}}"#;
    assert_eq!(parse_group_str(f4, FILE_CLOSURE_CAP).unwrap().order(), 12);
}

#[test]
fn export_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["c3", "s4", "q8", "gl2:3"] {
        let g = FamilySpec::parse(name).unwrap().build().unwrap();
        let path = dir.path().join(format!("{name}.json").replace(':', "_"));
        export_group_file(&g, &path).unwrap();
        let first = std::fs::read_to_string(&path).unwrap();
        let back = parse_group_file(&path).unwrap();
        assert_eq!(back.table.table(), g.table.table(), "{name}");
        assert_eq!(render_group_file(&back.table, Some(&g.name())).unwrap(), first, "{name}");
    }
}

#[test]
fn errors_are_specific() {
    match parse_group_str("{\"version\": 1,\n  \"mul\": [0, 1,, 1]}", FILE_CLOSURE_CAP) {
        Err(IoError::Syntax { line: 2, column, .. }) => assert!(column > 1),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    assert!(matches!(
        parse_group_str(r#"{"version": 1, "order": 2, "mul": [0,1,1,1]}"#, FILE_CLOSURE_CAP),
        Err(IoError::Group(GroupError::NoInverse(1)))
    ));
    assert!(matches!(parse_group_str(r#"{"version": 2, "perm": ["(1 2)"]}"#, FILE_CLOSURE_CAP), Err(IoError::Version(2))));
    assert!(matches!(
        parse_group_str(r#"{"version": 1, "perm": ["(1 2)"], "mul": [0]}"#, FILE_CLOSURE_CAP),
        Err(IoError::Format(_))
    ));
    assert!(matches!(
        parse_group_str(r#"{"version": 1, "perm": ["(1 2)"], "colour": 3}"#, FILE_CLOSURE_CAP),
        Err(IoError::Syntax { .. })
    ));
    assert!(parse_group_file(std::path::Path::new("/nonexistent/group.json")).is_err());
}

#[test]
fn large_groups_stay_as_generators() {
    let s7 = parse_group_str(r#"{"version": 1, "perm": ["(1 2 3 4 5 6 7)", "(1 2)"]}"#, FILE_CLOSURE_CAP).unwrap();
    assert_eq!(s7.order(), 5040);
    let dir = tempfile::tempdir().unwrap();
    match export_group_file(&make_symmetric(7).unwrap(), &dir.path().join("s7.json")) {
        Err(IoError::ExportTooLarge { order: 5040, cap }) => assert_eq!(cap, EXPORT_CAP),
        other => panic!("expected a refusal, got {other:?}"),
    }
    assert!(parse_group_str(r#"{"version": 1, "perm": ["(1 2 3 4 5 6 7 8)", "(1 2)"]}"#, FILE_CLOSURE_CAP).is_err());
}
