use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cosk_core::models::fubini_study;
use cosk_core::operators::cosk_spectrum;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn cosk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosk")).args(args).env_remove("COSK_SEED").output().expect("cosk runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn near(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_match_the_model_command() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 4] = [
        ("s2xs2.ctj", &["s2xs2"]),
        ("cp2_c4.ctj", &["fubini-study", "--m", "2", "--c", "4"]),
        ("sphere4.ctj", &["space-form", "--n", "4", "--kappa", "1"]),
        ("s2xs2_corrupted.ctj", &["product-surfaces", "--k1", "1", "--k2", "2"]),
    ];
    for (name, args) in cases {
        let out = dir.path().join(name);
        let mut full = vec!["model"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", s(&out)]);
        let run = cosk(&full);
        assert!(run.status.success(), "{name}: {}", String::from_utf8_lossy(&run.stderr));
        assert_eq!(fs::read(&out).unwrap(), fs::read(fixture(name)).unwrap(), "{name} drifted");
        let digest = String::from_utf8(run.stdout).unwrap();
        assert!(digest.starts_with("sha256:"));
    }
}

#[test]
fn spectrum_of_fixtures() {
    let cases = [
        ("s2xs2.ctj", vec![-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 6.0),
        ("cp2_c4.ctj", vec![-2.0, -2.0, -2.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0], 4.5),
        ("sphere4.ctj", vec![1.0; 9], 9.0),
    ];
    for (name, eigs, alpha) in cases {
        let out = cosk(&["spectrum", s(&fixture(name)), "--json"]);
        assert!(out.status.success());
        let v = json(&out);
        assert_eq!(v["schema"], "report-1");
        let got = floats(&v["results"]["r_ring_eigenvalues"]);
        assert!(near(&got, &eigs), "{name}: {got:?}");
        assert!((v["results"]["max_alpha"].as_f64().unwrap() - alpha).abs() < 1e-12);
        assert_eq!(v["results"]["alpha_sums"].as_object().unwrap().len(), 4);
    }
}

#[test]
fn model_then_spectrum_matches_the_library_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fs3.ctj");
    assert!(cosk(&["model", "fubini-study", "--m", "3", "--c", "-1.5", "--out", s(&path)]).status.success());
    let v = json(&cosk(&["spectrum", s(&path), "--json"]));
    let (r, _) = fubini_study(3, -1.5).unwrap();
    let lib = cosk_spectrum(&r).unwrap();
    assert_eq!(floats(&v["results"]["r_ring_eigenvalues"]), lib.eigs);
    assert_eq!(v["results"]["scalar"].as_f64().unwrap(), lib.scalar);
}

#[test]
fn model_to_stdout_and_parameter_validation() {
    let out = cosk(&["model", "product-surfaces", "--k1", "1", "--k2", "2", "--out", "-"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["components"][1]["v"], 2.0);
    assert_eq!(cosk(&["model", "s2xs2", "--m", "2", "--out", "-"]).status.code(), Some(2));
    assert_eq!(cosk(&["model", "torus", "--out", "-"]).status.code(), Some(2));
    assert_eq!(cosk(&["model", "fubini-study", "--m", "5", "--out", "-"]).status.code(), Some(2));
    assert_eq!(cosk(&["model", "space-form", "--n", "1", "--out", "-"]).status.code(), Some(2));
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("bad.ctj");
    fs::write(&malformed, "{ not json").unwrap();
    assert_eq!(cosk(&["spectrum", s(&malformed)]).status.code(), Some(2));
    assert_eq!(cosk(&["spectrum", s(&dir.path().join("missing.ctj"))]).status.code(), Some(2));

    let bianchi = dir.path().join("bianchi.ctj");
    fs::write(&bianchi, r#"{"format":"ctj-1","n":4,"components":[{"i":1,"j":2,"k":3,"l":4,"v":1}]}"#).unwrap();
    let out = cosk(&["spectrum", s(&bianchi)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Bianchi"));

    assert_eq!(cosk(&["kahler-check", s(&fixture("sphere4.ctj"))]).status.code(), Some(4));

    let sphere5 = dir.path().join("sphere5.ctj");
    assert!(cosk(&["model", "space-form", "--n", "5", "--out", s(&sphere5)]).status.success());
    assert_eq!(cosk(&["decompose4", s(&sphere5)]).status.code(), Some(5));

    let not_kahler = dir.path().join("not_kahler.ctj");
    let mut doc: Value = serde_json::from_slice(&fs::read(fixture("sphere4.ctj")).unwrap()).unwrap();
    doc["J"] = serde_json::json!([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]);
    fs::write(&not_kahler, doc.to_string()).unwrap();
    assert_eq!(cosk(&["kahler-check", s(&not_kahler)]).status.code(), Some(3));
}

#[test]
fn kahler_check_reports() {
    let v = json(&cosk(&["kahler-check", s(&fixture("cp2_c4.ctj")), "--json", "--samples", "64"]));
    assert!((v["results"]["min_orth_bisectional"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["results"]["implication"], "holds");
    assert_eq!(v["seed"], 0);
    let v = json(&cosk(&["kahler-check", s(&fixture("s2xs2.ctj")), "--json"]));
    assert!(v["results"]["min_orth_bisectional"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["results"]["six_nonnegative"], true);
    let v = json(&cosk(&["kahler-check", s(&fixture("s2xs2_corrupted.ctj")), "--json"]));
    assert_eq!(v["results"]["implication"], "vacuous");
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cosk"))
        .args(["kahler-check", s(&fixture("cp2_c4.ctj")), "--json", "--samples", "8"])
        .env("COSK_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 42);
}

#[test]
fn decompose4_reports_blocks_and_certificates() {
    let v = json(&cosk(&["decompose4", s(&fixture("cp2_c4.ctj")), "--json"]));
    let r = &v["results"];
    assert!(near(&floats(&r["lambda"]), &[4.0, -2.0, -2.0]));
    assert!(floats(&r["mu"]).iter().all(|m| m.abs() < 1e-12));
    assert_eq!(r["certificate"]["verdict"], "cp2-type");
    assert_eq!(r["einstein"], true);
    let v = json(&cosk(&["decompose4", s(&fixture("s2xs2.ctj")), "--json"]));
    assert_eq!(v["results"]["certificate"]["verdict"], "inconclusive");
    let v = json(&cosk(&["decompose4", s(&fixture("sphere4.ctj")), "--json"]));
    assert!(v["results"]["certificate"].is_null());

    let flipped = json(&cosk(&["decompose4", s(&fixture("cp2_c4.ctj")), "--json", "--orientation", "reversed"]));
    assert!(near(&floats(&flipped["results"]["mu"]), &[4.0, -2.0, -2.0]));
}

#[test]
fn reports_are_byte_identical_and_match_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let a = cosk(&["verify-paper", "--trials", "4", "--seed", "9", "--json", "--report", s(&file)]);
    let b = cosk(&["verify-paper", "--trials", "4", "--seed", "9", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(fs::read(&file).unwrap(), a.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 9);
    assert!(v["results"]["checks"].as_array().unwrap().len() >= 25);
    assert!(v.get("wall_time").is_none());
}

#[test]
fn verify_paper_flags_the_corrupted_fixture() {
    let ok = cosk(&["verify-paper", "--trials", "10"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = cosk(&["verify-paper", "--trials", "10", "--json", "--s2xs2", s(&fixture("s2xs2_corrupted.ctj"))]);
    assert_eq!(bad.status.code(), Some(1));
    let failed: Vec<String> =
        json(&bad)["results"]["failed"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()).collect();
    assert!(failed.contains(&"s2xs2_six_nonneg".to_string()));
}
