use semichar_cli::{run, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK};

fn semichar(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("semichar").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn compute_q8() {
    let (code, out, _) = semichar(&["compute", "--family", "q8"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("invariant factors: [2, 2, 4]"), "{out}");
    assert!(out.contains("holds"));

    let (code, out, _) = semichar(&["--json", "compute", "--family", "q8", "--no-constructions"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["invariant_factors"], serde_json::json!([2, 2, 4]));
    assert_eq!(v["semichar_order"], "16");
    assert_eq!(v["holds"], true);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "compute", "--family", "s4"];
    assert_eq!(semichar(&args).1, semichar(&args).1);
    let one = semichar(&["--threads", "1", "compute", "--family", "gl2:3"]).1;
    assert_eq!(one, semichar(&["compute", "--family", "gl2:3"]).1);
}

#[test]
fn batch_small_corpus() {
    let (code, out, _) = semichar(&["batch", "--max-order", "60"]);
    assert_eq!(code, EXIT_OK);
    let summary = out.lines().last().unwrap();
    assert!(summary.starts_with("summary\t"), "{summary}");
    assert!(summary.contains("violations=0"));
    assert!(out.lines().any(|l| l.starts_with("A5\t60\tholds")), "{out}");
}

#[test]
fn oversized_groups_are_refused() {
    let (code, _, err) = semichar(&["compute", "--family", "s7"]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(err.contains("torsion"), "{err}");
    let (code, out, _) = semichar(&["torsion", "--family", "s7", "--prime", "7"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("= 120"), "{out}");
}

#[test]
fn export_then_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d4.json");
    let p = path.to_str().unwrap();
    assert_eq!(semichar(&["export", "--family", "d4", "-o", p]).0, EXIT_OK);
    let from_file = semichar(&["--json", "compute", "--file", p, "--no-constructions"]).1;
    let v: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    assert_eq!(v["group"], "D4");
    assert_eq!(v["order"], 8);
    assert_eq!(semichar(&["export", "--family", "s7", "-o", p]).0, EXIT_INFEASIBLE);
}

#[test]
fn other_subcommands() {
    let (code, out, _) = semichar(&["facts", "--gl2", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("GL(2,3)"), "{out}");

    let (code, out, _) = semichar(&["construct", "--family", "s5", "--prime", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("symmetric cycle classes"), "{out}");

    let (code, out, _) = semichar(&["localize", "--family", "s4", "--prime", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("16 elements"), "{out}");
}

#[test]
fn bad_input_exits_3() {
    assert_eq!(semichar(&["compute", "--family", "x9"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["compute"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["compute", "--family", "c4", "--file", "g.json"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["torsion", "--family", "c4", "--prime", "4"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["compute", "--file", "/nonexistent.json"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(semichar(&["--help"]).0, EXIT_OK);
}
