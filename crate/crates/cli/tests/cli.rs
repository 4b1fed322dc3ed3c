use std::process::{Command, Output};

use pealab::CheckReport;

fn pealab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pealab"))
        .args(args)
        .env_remove("PEALAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> CheckReport {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

#[test]
fn build_writes_algebra_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a3.json");
    let out = pealab(&[
        "build",
        "--p",
        "3",
        "--alpha",
        "3",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep
        .record("cross_check/closure_atoms_match_formula")
        .unwrap()
        .passed());
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(written["schema"], 1);
    assert!(written["ap"]["transpStar"].is_array());
    assert!(written["set_algebra"]["labels"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l["type"] == "Q"));

    let axioms = pealab(&[
        "axioms",
        "--algebra",
        file.to_str().unwrap(),
        "--suite",
        "F",
        "--mode",
        "sampled",
        "--samples",
        "50",
    ]);
    assert_eq!(axioms.status.code(), Some(0));
    assert_eq!(report(&axioms).parameters["suite"], "F");
}

#[test]
fn invalid_parameters_exit_with_two() {
    assert_eq!(pealab(&["build", "--p", "4"]).status.code(), Some(2));
    assert_eq!(
        pealab(&["build", "--p", "3", "--alpha", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pealab(&["reducts", "--p", "5", "--merge-m", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pealab(&["lemmas", "--which", "walecki", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pealab(&["nonsense"]).status.code(), Some(2));
    let starved = Command::new(env!("CARGO_BIN_EXE_pealab"))
        .args(["build", "--p", "3"])
        .env("PEALAB_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(starved.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&starved.stderr).contains("budget"));
}

#[test]
fn failing_equation_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("eqs.txt");
    std::fs::write(
        &file,
        "# converse symmetry is false in A_3\np[0,1](x) = x\nx + x = x\n",
    )
    .unwrap();
    let out = pealab(&[
        "axioms",
        "--p",
        "3",
        "--suite",
        file.to_str().unwrap(),
        "--mode",
        "atom-level",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    assert!(!rep.record("line0002").unwrap().passed());
    assert!(rep.record("line0003").unwrap().passed());
}

#[test]
fn witness_against_five() {
    let out = pealab(&["witness", "--p", "3", "--against", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    for name in ["E3_distinguished", "e3_refuted", "e5_valid"] {
        assert!(rep.record(name).unwrap().passed(), "{name}");
    }
}

#[test]
fn lemma_y_reports_no_system_for_five() {
    let out = pealab(&["lemmas", "--which", "y", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep.records[0].detail.as_ref().unwrap()["result"], "none");
    let even = report(&pealab(&["lemmas", "--which", "y", "--n", "6"]));
    assert_eq!(
        even.records
            .iter()
            .find(|r| r.name == "search_complete")
            .unwrap()
            .detail
            .as_ref()
            .unwrap()["result"],
        "exists"
    );
    assert!(even.passed());
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "axioms",
        "--p",
        "3",
        "--suite",
        "P",
        "--mode",
        "sampled",
        "--seed",
        "42",
        "--samples",
        "200",
    ];
    let first = report(&pealab(&args));
    let second = report(&pealab(&args));
    assert_eq!(first.canonical_json(), second.canonical_json());
    let names: Vec<&str> = first.records.iter().map(|r| r.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);

    let reducts = ["reducts", "--p", "3"];
    assert_eq!(
        report(&pealab(&reducts)).digest(),
        report(&pealab(&reducts)).digest()
    );
}

#[test]
fn report_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.json");
    let out = pealab(&[
        "lemmas",
        "--which",
        "x",
        "--p",
        "5",
        "--report",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep: CheckReport = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert!(rep.passed());
}
