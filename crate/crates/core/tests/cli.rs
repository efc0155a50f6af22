use std::process::Command;

fn knotstrata(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_knotstrata"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn v2_of_trefoil() {
    let (code, out, _) = knotstrata(&["eval-invariant", "--formula", "v2", "--gauss", "data/trefoil.gauss"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");
}

#[test]
fn formula_text_is_accepted() {
    let (code, out, _) = knotstrata(&["eval-invariant", "--formula", "2 * D[1>3, 4>2]", "--gauss", "data/trefoil.gauss"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "2");
}

#[test]
fn chains_of_complexity_one() {
    let (code, out, _) = knotstrata(&["verify-chains", "--p", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains(": ok"));
    assert!(out.contains("∂∂ = 0 on all"));
}

#[test]
fn chains_of_complexity_two() {
    let (code, out, _) = knotstrata(&["verify-chains", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("13/13"));
}

#[test]
fn great_circles_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let (code, out, err) = knotstrata(&[
        "--config",
        "data/config.json",
        "eval-cocycle",
        "--class",
        "C",
        "--family",
        "data/great_circles.json",
        "--out",
        out_dir,
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("|value|=1"), "{out}");
    for f in ["result.json", "events.jsonl", "summary.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn dimension_mismatch_fails() {
    let (code, _, err) = knotstrata(&["eval-cocycle", "--class", "C", "--family", "data/great_circles.json", "--n", "4"]);
    assert_ne!(code, 0);
    assert!(err.starts_with("error:"));
}

#[test]
fn scenario_list_and_run() {
    let (code, out, _) = knotstrata(&["scenario", "list"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "trefoil_bead_loop"));
    let (code, out, _) = knotstrata(&["scenario", "run", "knot", "--params", r#"{"knot": "figure_eight"}"#]);
    assert_eq!(code, 0);
    assert!(out.contains("value mod 2 = 1"), "{out}");
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.gauss");
    std::fs::write(&g, "compact: O1+ U2+").unwrap();
    let (code, _, err) = knotstrata(&["eval-invariant", "--formula", "v2", "--gauss", g.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert!(err.contains("incomplete"), "{err}");
    let (code, _, _) = knotstrata(&["verify-chains", "--p", "4"]);
    assert_ne!(code, 0);
}
