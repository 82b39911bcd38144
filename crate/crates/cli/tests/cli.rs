use std::process::{Command, Output};

fn zhelo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhelo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn verify_a1_passes_with_power_two() {
    let o = zhelo(&["verify", "--type", "A1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["type"], "A1");
    assert_eq!(v["generators"][0]["m"], 1);
    assert_eq!(v["generators"][0]["minimal_power"], 2);
    assert_eq!(v["generators"][0]["theorem85"], true);
    assert_eq!(v["exponent_check"]["pass"], true);
}

#[test]
fn f4_census_has_42_vertices() {
    let o = zhelo(&["monoid", "--type", "F4", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 42);
    let levels: Vec<u64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(levels, [4, 4, 5, 6, 5, 4, 4, 4, 3, 2, 1]);
}

#[test]
fn b3_dot_lists_the_expected_words() {
    let o = zhelo(&["monoid", "--type", "B3", "--format", "dot"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph zhelobenko_B3 {"));
    for w in [
        "(1)", "2(1)", "3(2)", "2(3)", "12(3)", "23(2)", "32(1)", "123(2)", "232(1)", "1232(1)",
    ] {
        assert!(dot.contains(&format!("label=\"{w}\"")), "missing {w}");
    }
    assert_eq!(dot.matches("subgraph level_").count(), 5);
}

#[test]
fn output_is_deterministic_and_honours_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = zhelo(&[
            "verify",
            "--type",
            "B2,A2",
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["type"], "B2");
}

#[test]
fn unknown_type_is_a_usage_error() {
    let o = zhelo(&["roots", "--type", "Q7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q7"));
}

#[test]
fn dot_only_for_monoid() {
    let o = zhelo(&["exponents", "--type", "B2", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn roots_and_exponents_text() {
    let o = zhelo(&["roots", "--type", "B3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("weyl group order: 48"));
    assert!(s.contains("positive coroots (9)"));
    let o = zhelo(&["exponents", "--type", "D4"]);
    assert!(stdout(&o).contains("exponents: 1 3 3 5"));
}

#[test]
fn invariants_json_schema() {
    let o = zhelo(&["invariants", "--type", "A2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let gens = v.as_array().unwrap();
    assert_eq!(gens.len(), 2);
    for g in gens {
        assert_eq!(g["type"], "A2");
        assert_eq!(g["q"].as_array().unwrap().len(), 2);
        assert_eq!(g["P"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn max_degree_limits_generators() {
    let o = zhelo(&[
        "invariants",
        "--type",
        "B3",
        "--format",
        "json",
        "--max-degree",
        "4",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let degrees: Vec<u64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["degree"].as_u64().unwrap())
        .collect();
    assert_eq!(degrees, [1, 3]);
    let o = zhelo(&["verify", "--type", "B3", "--max-degree", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn g2_monoid_is_drawn_without_coroot_marks() {
    let o = zhelo(&["monoid", "--type", "G2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["in_p_image"] == false));
}
