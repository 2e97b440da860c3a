use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ccz_codes::linalg::Mat;
use ccz_codes::transversal::check_triple_conditions;
use serde_json::Value;

fn ccz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccz")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn build_hermitian(dir: &Path) {
    let out = ccz(dir, &["code", "build", "--family", "hermitian", "--q0", "2", "--s", "2", "--out", "herm.code"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ccz(dir.path(), &["field", "info", "--m", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(ccz(dir.path(), &["field", "info", "--m", "17"]).status.code(), Some(2));
    assert_eq!(ccz(dir.path(), &["code", "check", "--code", "missing.code"]).status.code(), Some(2));
}

#[test]
fn rs_code_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccz(dir.path(), &["code", "build", "--family", "rs", "--m", "4", "--k", "5", "--out", "rs.code"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ccz(dir.path(), &["code", "check", "--code", "rs.code", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["mult_property"], Value::Bool(true));
    assert_eq!(r["result"]["n"], 16);
    assert_eq!(r["result"]["k"], 5);
    assert_eq!(r["result"]["d"]["exact"], 12);
    assert_eq!(r["inputs"]["rs.code"].as_str().unwrap().len(), 64);

    let out = ccz(dir.path(), &["code", "build", "--family", "rs", "--m", "4", "--k", "6", "--out", "rs6.code"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ccz(dir.path(), &["code", "check", "--code", "rs6.code", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["result"]["mult_report"]["violation"].is_array());
}

#[test]
fn budget_exceeded_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    ccz(dir.path(), &["code", "build", "--family", "rs", "--m", "4", "--k", "5", "--out", "rs.code"]);
    assert_eq!(ccz(dir.path(), &["code", "distance", "--code", "rs.code", "--budget", "10"]).status.code(), Some(3));
    let out = ccz(dir.path(), &["code", "distance", "--code", "rs.code", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["d"]["exact"], 12);
}

#[test]
fn css_build_and_transversal_verify() {
    let dir = tempfile::tempdir().unwrap();
    build_hermitian(dir.path());
    let out = ccz(dir.path(), &["css", "build", "--code", "herm.code", "--K", "1", "--out", "hcss", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["N"], 7);
    assert_eq!(r["result"]["dx_bound"], 5);
    assert_eq!(r["checks"]["triple_sums"], Value::Bool(true));

    let out = ccz(dir.path(), &["transversal", "verify", "--css", "hcss", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["checks"], 4096);

    let gate = r#"{"monomials":[{"e":[2,1,0],"coeff":"0x1"}],"f_mask":"0x2","basis":"polynomial"}"#;
    fs::write(dir.path().join("gate.json"), gate).unwrap();
    let out = ccz(dir.path(), &["transversal", "verify", "--css", "hcss", "--gate", "gate.json", "--mode", "sampled:500:4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn mutated_h0_gives_witness() {
    let dir = tempfile::tempdir().unwrap();
    build_hermitian(dir.path());
    ccz(dir.path(), &["css", "build", "--code", "herm.code", "--K", "1", "--out", "hcss"]);
    let h0_path = dir.path().join("hcss/h0.mat");
    let h1 = Mat::from_text(&fs::read_to_string(dir.path().join("hcss/h1.mat")).unwrap()).unwrap();
    let h0 = Mat::from_text(&fs::read_to_string(&h0_path).unwrap()).unwrap();
    // Flip entries until the triple identity breaks.
    let mutated = (0..h0.cols())
        .map(|j| {
            let mut m = h0.clone();
            m.set(0, j, m.get(0, j) ^ 1);
            m
        })
        .find(|m| !check_triple_conditions(&h1, m).unwrap().triples.is_empty())
        .expect("some single-entry mutation breaks the identity");
    fs::write(&h0_path, mutated.to_text()).unwrap();
    fs::remove_file(dir.path().join("hcss/css.json")).unwrap();
    let out = ccz(dir.path(), &["transversal", "verify", "--css", "hcss", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["result"]["result"], "counterexample");
    let w = &r["result"]["witness"];
    assert_ne!(w["physical"], w["logical"]);
    assert_eq!(r["checks"]["transversal"], Value::Bool(false));
}

#[test]
fn qubitize_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    build_hermitian(dir.path());
    let args = ["qubitize", "run", "--code", "herm.code", "--K", "1", "--out", "p1", "--distances", "--json", "--no-timings"];
    let a = ccz(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    let r = json(&a);
    assert_eq!(r["result"]["params"]["N3"], 56);
    assert_eq!(r["result"]["pipeline"]["checks"], 512);
    assert!(r.get("timings").is_none());
    let b = ccz(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
    let report = fs::read(dir.path().join("p1/report.json")).unwrap();
    assert_eq!(report, a.stdout);
    for f in ["x_stab.mat", "z_stab.mat", "logical_x.mat", "logical_z.mat", "schedule.json", "embeddings.json"] {
        assert!(dir.path().join("p1").join(f).exists(), "{f}");
    }
    let sched: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("p1/schedule.json")).unwrap()).unwrap();
    assert_eq!(sched["triples"].as_array().unwrap().len(), 35);
    assert_eq!(sched["N3"], 56);
    assert_eq!(sched["K3"], 1);

    let csv = ccz(dir.path(), &["schedule", "export", "--pipeline", "p1"]);
    assert_eq!(csv.status.code(), Some(0));
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 36);

    let sim = ["msd", "simulate", "--pipeline", "p1", "--p", "0.02", "--trials", "2000", "--seed", "7", "--json", "--no-timings"];
    let s1 = ccz(dir.path(), &sim);
    assert_eq!(s1.status.code(), Some(0));
    assert_eq!(s1.stdout, ccz(dir.path(), &sim).stdout);
    assert_eq!(json(&s1)["seed"], 7);

    let timed = ccz(dir.path(), &["qubitize", "run", "--code", "herm.code", "--K", "1", "--out", "p2", "--json"]);
    assert!(json(&timed)["timings"]["total_ms"].is_number());
}

#[test]
fn search_rmfe_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    build_hermitian(dir.path());
    let out = ccz(dir.path(), &["qubitize", "run", "--code", "herm.code", "--K", "1", "--rmfe", "search:1", "--out", "p"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ccz(dir.path(), &["qubitize", "run", "--code", "herm.code", "--K", "1", "--rmfe", "search:1", "--seed", "0", "--out", "p"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn msd_estimate_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccz(dir.path(), &["msd", "estimate", "--rate", "0.25", "--delta", "0.2", "--c", "1", "--eps", "1e-12", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["N"], 139);
    assert_eq!(r["result"]["overhead"], 12.0);
    assert_eq!(ccz(dir.path(), &["msd", "estimate", "--rate", "0.25", "--delta", "0.2", "--c", "1", "--eps", "2"]).status.code(), Some(2));
}

#[test]
fn hypothesis_failure_is_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    ccz(dir.path(), &["code", "build", "--family", "rs", "--m", "2", "--k", "2", "--out", "bad.code"]);
    let out = ccz(dir.path(), &["css", "build", "--code", "bad.code", "--K", "1", "--out", "c", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["witness"]["identity"], "mult-property");
}
