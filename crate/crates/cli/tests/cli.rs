use std::process::Command as Process;

use mirror_arith_cli::{run, SCHEMA_VERSION};
use serde_json::Value;

fn ok(args: &[&str]) -> Value {
    let mut argv = vec!["mirror-arith"];
    argv.extend_from_slice(args);
    let out = run(argv);
    assert_eq!(out.code, 0, "{}", out.summary);
    assert_eq!(out.document["schema_version"], SCHEMA_VERSION);
    out.document["result"].clone()
}

fn code(args: &[&str]) -> i32 {
    let mut argv = vec!["mirror-arith"];
    argv.extend_from_slice(args);
    run(argv).code
}

#[test]
fn charcount_verify_matches_brute_force() {
    let r = ok(&["charcount", "--family", "dwork", "--n", "5", "--p", "7", "--psi", "2", "--precision", "5", "--verify"]);
    assert_eq!(r["match"], true);
    assert_eq!(r["brute_force"], 410);
    assert_eq!(r["projective_exact"], 410);
    assert!(r["value"].is_string());
}

#[test]
fn quintic_operator_in_lambda() {
    let r = ok(&["pf", "--family", "dwork", "--n", "5", "--variable", "lambda"]);
    assert_eq!(r["canonical_text"], "t^4 - 5*l*(5t+1)*(5t+2)*(5t+3)*(5t+4)");
    assert_eq!(r["order"], 4);
}

#[test]
fn count_fermat_cubic() {
    let r = ok(&["count", "--family", "dwork", "--n", "3", "--p", "5", "--psi", "0"]);
    assert_eq!(r["N"], 6);
}

#[test]
fn count_table_and_descriptor_input() {
    let json = r#"{"type":"dwork","n":3,"psi":"2","field":{"p":5,"r":1}}"#;
    let r = ok(&["count", "--family-json", json, "--table", "2"]);
    let counts: Vec<u64> = r["rows"].as_array().unwrap().iter().map(|x| x["N"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![9, 27]);
}

#[test]
fn zeta_of_a_cubic_curve() {
    let r = ok(&["zeta", "--n", "3", "--p", "5", "--psi", "0", "--r-max", "3"]);
    assert_eq!(r["zeta"]["numerator"], serde_json::json!(["1", "0", "5"]));
    assert_eq!(r["zeta"]["counts"], serde_json::json!([6, 36, 126]));
}

#[test]
fn wan_report() {
    let r = ok(&["zeta", "--n", "3", "--p", "5", "--psi", "2", "--r-max", "2", "--wan"]);
    assert_eq!(r["model"], "closure");
    assert!(r["rows"].as_array().unwrap().iter().all(|w| w["pass"] == true));
}

#[test]
fn periods_report_hypergeometric_data() {
    let r = ok(&["periods", "--n", "5", "--terms", "12"]);
    assert_eq!(r["hypergeometric"]["upper"], serde_json::json!(["1/5", "2/5", "3/5", "4/5"]));
    assert_eq!(r["solutions"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["count", "--bogus"]), 2);
    assert_eq!(code(&["count", "--n", "3", "--p", "4", "--psi", "0"]), 2);
    assert_eq!(code(&["charcount", "--n", "4", "--p", "7", "--psi", "2"]), 2);
    assert_eq!(code(&["charcount", "--n", "5", "--p", "11", "--psi", "2"]), 2);
    assert_eq!(code(&["count", "--n", "5", "--p", "13", "--psi", "2", "--cap", "10"]), 1);
    assert_eq!(code(&["verify", "--criterion", "12"]), 2);
    assert_eq!(code(&["verify", "--criterion", "8"]), 0);
}

#[test]
fn output_is_deterministic_and_written() {
    let dir = std::env::temp_dir().join(format!("mirror-arith-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let args = ["mirror-arith", "count", "--n", "5", "--p", "7", "--psi", "3", "--threads", threads, "--output", path.to_str().unwrap()];
        assert_eq!(run(args).code, 0);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["result"]["N"], 405);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_mirror-arith");
    let out = Process::new(bin).args(["count", "--n", "3", "--p", "5", "--psi", "0"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("N = 6"));
    let bad = Process::new(bin).args(["pf", "--variable", "nope"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--variable"));
}
