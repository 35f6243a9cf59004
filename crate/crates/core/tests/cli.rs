use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn unasp(args: &[&str], files: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unasp"))
        .args(args)
        .args(files.iter().map(|f| fixture(f)))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_values() {
    let o = unasp(&["solve"], &["example_p1.ulp"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s: [1,1]"));
    let o = unasp(&["solve", "--json"], &["example_p1.ulp"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["consistent"], true);
    assert_eq!(v["values"]["q"], serde_json::json!([0.75, 0.9]));
}

#[test]
fn revise_json_report() {
    let o = unasp(&["revise", "--json"], &["example_p1.ulp", "example_p2.ulp"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["removed"], serde_json::json!(["r11"]));
    assert_eq!(v["contradiction_set"], serde_json::json!(["p"]));
    assert_eq!(v["prs"]["p"].as_array().unwrap().len(), 5);
    assert!(v["program"]
        .as_str()
        .unwrap()
        .contains("r21: p :- a, b @ [0.4,0.8]."));
}

#[test]
fn revise_failure_exits_with_three() {
    let o = unasp(
        &["revise"],
        &["unresolvable_base.ulp", "unresolvable_new.ulp"],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    assert_eq!(
        unasp(&["revise"], &["example_p1.ulp"]).status.code(),
        Some(2)
    );
    assert_eq!(unasp(&["solve"], &["missing.ulp"]).status.code(), Some(2));
    let o = unasp(
        &["check", "--postulates", "bogus"],
        &["example_p1.ulp", "example_p2.ulp"],
    );
    assert_eq!(o.status.code(), Some(2));
    let dir = std::env::temp_dir().join("unasp-cli-test.ulp");
    std::fs::write(&dir, "p :- q @ [0.9,0.1].").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_unasp"))
        .arg("solve")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_lists_the_derivation() {
    let o = unasp(&["explain", "--atom", "p"], &["example_p1.ulp"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("r1^T: p ⟵ ([0.7,0.9] ∧ q ∧ r) ⊗k ¬t\n"));
    assert!(text.ends_with("rules: {r11, r12, r13, r14, r15}\n"));
    let o = unasp(&["explain", "--atom", "p", "--json"], &["example_p1.ulp"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["literal"], "p");
    assert_eq!(v["children"].as_array().unwrap().len(), 3);
}

#[test]
fn check_reports_every_postulate() {
    let o = unasp(&["check"], &["example_p1.ulp", "example_p2.ulp"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
    let o = unasp(
        &[
            "check",
            "--postulates",
            "uniformity",
            "--third",
            fixture("uniformity_third.ulp").to_str().unwrap(),
        ],
        &["uniformity_base.ulp", "uniformity_new.ulp"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("uniformity   holds"));
}

#[test]
fn fuzz_is_reproducible() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_unasp"))
            .args([
                "fuzz", "--seed", "3", "--cases", "4", "--atoms", "4", "--rules", "4", "--json",
            ])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
