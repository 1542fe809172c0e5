use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

static COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("matchkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(format!("{}-{name}", COUNTER.fetch_add(1, Ordering::Relaxed)))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    fn error_code(&self) -> String {
        let v: Value = serde_json::from_str(self.stderr.trim()).unwrap_or_else(|e| panic!("{e}: {}", self.stderr));
        v["error"].as_str().unwrap().to_string()
    }
}

fn matchkit(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_matchkit")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Runs `args --input <file holding input>`.
fn with_input(args: &[&str], input: &str) -> Run {
    let path = scratch("input.json");
    std::fs::write(&path, input).unwrap();
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--input", &p]);
    matchkit(&all)
}

#[test]
fn group_match_on_z6() {
    let r = with_input(&["group", "match"], r#"{"group":{"factors":[6]},"a":[1,2,3,4,5],"b":[1,2,3,4,5]}"#);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["deficiency"]["M"], 5);
    assert_eq!(v["deficiency"]["D"], 0);
}

#[test]
fn group_match_rejects_unequal_sizes() {
    let r = with_input(&["group", "match"], r#"{"group":{"factors":[6]},"a":[1,2],"b":[1]}"#);
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "STRUCTURAL");
}

#[test]
fn malformed_json_is_a_parse_error() {
    let r = with_input(&["group", "match"], "{not json");
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "PARSE");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(matchkit(&["field", "phi-psi", "--frobnicate"]).code, 2);
    assert_eq!(matchkit(&[]).code, 2);
}

#[test]
fn phi_psi_of_f16() {
    let r = matchkit(&["field", "phi-psi", "--q", "2", "--n", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["report"]["psi"], 2);
    assert_eq!(v["report"]["phi"], 2);
}

#[test]
fn non_prime_power_q_is_rejected() {
    let r = matchkit(&["field", "phi-psi", "--q", "6", "--n", "2"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "PRECONDITION");
}

#[test]
fn oversized_field_reports_cap() {
    let r = matchkit(&["field", "phi-psi", "--q", "2", "--n", "40"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.error_code(), "CAP_EXCEEDED");
}

#[test]
fn partition_counts() {
    let r = matchkit(&["field", "partition", "--q", "2", "--n", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["plan"]["nonzero_count"], 15);
    assert_eq!(v["plan"]["coverage_verified"], true);
}

#[test]
fn three_lines_hit_the_bound() {
    let r = with_input(
        &["field", "max-trivial-intersector"],
        r#"{"p":2,"dim":2,"members":[[[1,0]],[[0,1]],[[1,1]]]}"#,
    );
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "THEOREM2_BOUND");
}

#[test]
fn non_rref_input_gets_a_suggestion() {
    let r = with_input(
        &["lin", "subspace-match"],
        r#"{"tower":{"p":2,"n":2},"a":[[1,1],[0,1]],"b":[[1,0],[0,1]]}"#,
    );
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "NOT_RREF");
    assert!(r.stderr.contains("[[1, 0], [0, 1]]"), "{}", r.stderr);
}

#[test]
fn subspace_match_of_full_field_is_unmatched() {
    let r = with_input(
        &["lin", "subspace-match"],
        r#"{"tower":{"p":2,"n":2},"a":[[1,0],[0,1]],"b":[[1,0],[0,1]]}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["verdict"]["verdict"], "unmatched", "{}", r.stdout);
}

#[test]
fn basis_match_modes_agree() {
    let input = r#"{"tower":{"p":2,"n":4},"basis":[[0,1,0,0]],"b":[[0,0,1,0]]}"#;
    let ex = with_input(&["lin", "basis-match", "--mode", "exhaustive-j"], input);
    let ra = with_input(&["lin", "basis-match", "--mode", "rado"], input);
    assert_eq!(ex.code, 0, "{}", ex.stderr);
    assert_eq!(ra.code, 0, "{}", ra.stderr);
    assert_eq!(ex.json()["report"]["matched"], ra.json()["report"]["matched"]);
}

#[test]
fn set_family_check_and_extend() {
    let r = with_input(&["fam", "check", "--sets"], r#"{"n":3,"m":3,"members":[[1,2],[1,2]]}"#);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["holds"], false);
    assert_eq!(r.json()["violator"], serde_json::json!([0, 1]));

    let r = with_input(&["fam", "extend", "--sets"], r#"{"n":3,"m":3,"members":[[1,2]]}"#);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["members"].as_array().unwrap().len(), 3);
}

#[test]
fn transversal_violator() {
    let r = with_input(&["fam", "transversal"], r#"{"p":2,"dim":2,"members":[[[1,1]],[[1,1]]]}"#);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["outcome"], "violator");
    assert_eq!(v["value"], serde_json::json!([0, 1]));
}

#[test]
fn dual_basis_duplicate_hyperplanes() {
    let r = with_input(
        &["fam", "dual-basis"],
        r#"{"p":2,"dim":3,"members":[[[1,0,0],[0,1,0]],[[1,0,0],[0,1,0]]]}"#,
    );
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "PROPERTY_VIOLATED");
}

#[test]
fn linear_deficiency_formats() {
    let r = matchkit(&["conjecture", "linear-deficiency", "--q", "2", "--n", "2", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some("q,n,dimA,dimB,D,M,holds,complete"));

    let r = matchkit(&["conjecture", "linear-deficiency", "--q", "2", "--n", "2", "--seed", "5"]);
    let v = r.json();
    assert_eq!(v["schema_version"], "matchkit-report/1");
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["complete"], true);
}

#[test]
fn tight_budget_flags_incomplete() {
    let r = matchkit(&["conjecture", "linear-deficiency", "--q", "2", "--n", "3", "--budget", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(r.json()["complete"], false);
}

#[test]
fn report_verify_roundtrip_and_tamper() {
    let path = scratch("run.json");
    let p = path.to_str().unwrap();
    let r = matchkit(&["conjecture", "divisor-family", "--q", "2", "--n", "4", "--json", p]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ok = matchkit(&["report", "verify", "--input", p]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(ok.json()["verified"], true);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let md = v["reports"][0]["max_trivial_dim"].as_u64().unwrap();
    v["reports"][0]["max_trivial_dim"] = (md + 1).into();
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_ne!(matchkit(&["report", "verify", "--input", p]).code, 0);
}

#[test]
fn divisor_family_rejects_prime_degree() {
    let r = matchkit(&["conjecture", "divisor-family", "--q", "2", "--n", "5"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.error_code(), "PRECONDITION");
}
