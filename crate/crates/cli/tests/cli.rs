use std::process::{Command, Output};

fn gparity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gparity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn canon_relabels() {
    let o = gparity(&["canon", "2 1 2 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 2 1 2");
}

#[test]
fn invariants_of_two_crossings() {
    let o = gparity(&["invariants", "1 2 1 2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["gp"], serde_json::json!([1, 1]));
    assert_eq!(v["bracket"]["terms"], serde_json::json!([""]));
}

#[test]
fn virtual_report_has_surface() {
    let o = gparity(&["invariants", "O1+ O2+ U1+ U2+", "--level", "virtual", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["surface"]["genus"], 1);
    assert_eq!(v["surface"]["colourable"], false);
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["canon", "1 2 1"][..],
        &["canon", "1 1 1 2 2 2"],
        &["invariants", "O1+ U1-", "--level", "virtual"],
    ] {
        let o = gparity(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn reports_are_deterministic() {
    for code in ["1 2 3 1 2 3", "1 2 1 3 2 4 3 4", "1 2 3 4 1 5 2 3 4 5"] {
        let a = gparity(&["invariants", code, "--json"]);
        let b = gparity(&["invariants", code, "--json"]);
        assert_eq!(a.stdout, b.stdout);
        let one = Command::new(env!("CARGO_BIN_EXE_gparity"))
            .args(["invariants", code, "--json"])
            .env("PARITY_THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, one.stdout);
    }
}

#[test]
fn canonical_input_reproduces_report() {
    let a: serde_json::Value =
        serde_json::from_slice(&gparity(&["invariants", "3 1 2 3 1 2", "--json"]).stdout).unwrap();
    let canon = a["canonical"].as_str().unwrap().to_string();
    let mut b: serde_json::Value =
        serde_json::from_slice(&gparity(&["invariants", &canon, "--json"]).stdout).unwrap();
    b["input"] = a["input"].clone();
    assert_eq!(a, b);
}

#[test]
fn corpus_keeps_input_order() {
    let dir = std::env::temp_dir().join(format!("gparity-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("codes.txt");
    std::fs::write(&file, "# fixtures\n2 1 2 1\n\n1 1\nbad\n1 2 3 3 2 1\n").unwrap();
    let o = gparity(&["canon", "--corpus", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["canonical"], "1 2 1 2");
    assert_eq!(lines[1]["canonical"], "1 1");
    assert!(lines[2]["error"].is_string());
    assert_eq!(lines[3]["canonical"], "1 1 2 3 3 2");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn fuzz_passes_with_gp() {
    for suite in ["axioms", "bracket"] {
        let o = gparity(&["fuzz", suite, "--traces", "60", "--seed", "5"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn broken_parity_is_caught_and_replays() {
    let dir = std::env::temp_dir().join(format!("gparity-fuzz-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("counterexample.json");
    let o = gparity(&[
        "fuzz",
        "axioms",
        "--parity",
        "broken",
        "--traces",
        "20",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = gparity(&["replay", file.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["reproduced"], true);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn certify_explains_refusal() {
    let o = gparity(&["certify", "1 2 1 2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], false);
}

#[test]
fn universal_reports_presentation() {
    let o = gparity(&["universal", "1 2 1 2", "--radius", "1", "--cap", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let p = &v["presentation"];
    for key in ["generators", "invariant_factors", "free_rank", "generator_images", "radius", "cap", "truncated"] {
        assert!(p.get(key).is_some(), "{key}");
    }
    assert_eq!(v["gp_factors"], true);
}

#[test]
fn help_mentions_detour() {
    let o = gparity(&["--help"]);
    assert!(stdout(&o).contains("detour move is the identity"));
}
