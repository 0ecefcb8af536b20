use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn circsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circsep"))
        .args(args)
        .env("CIRCSEP_NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn golden() -> String {
    fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/tests/golden/pattern_d3_identity.txt"
    ))
    .unwrap()
}

#[test]
fn build_isotropic() {
    let v = json(&circsep(&["build", "--family", "isotropic", "--d", "3", "--lambda", "0.25"]));
    assert_eq!(v["d"], 3);
    let rows = v["entries"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 9));
    let corner = v["entries"][0][4][0].as_f64().unwrap();
    assert!((corner - 0.25 / 3.0).abs() < 1e-16);
}

#[test]
fn build_horodecki_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let out = circsep(&["build", "--family", "horodecki", "--alpha", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 9);
    let rep = json(&circsep(&["analyze", path.to_str().unwrap()]));
    assert_eq!(rep["verdict"], "separable");
}

#[test]
fn build_from_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blocks.json");
    let third = [1.0 / 9.0, 0.0];
    let zero = [0.0, 0.0];
    let block = serde_json::json!([[third, zero, zero], [zero, third, zero], [zero, zero, third]]);
    let doc = serde_json::json!({"d": 3, "permutation": [0, 2, 1], "blocks": [block, block, block]});
    fs::write(&path, doc.to_string()).unwrap();
    let v = json(&circsep(&["build", "--blocks", path.to_str().unwrap()]));
    assert_eq!(v["permutation"], serde_json::json!([0, 2, 1]));
    assert_eq!(v["entries"][4][4][0].as_f64().unwrap(), 1.0 / 9.0);
}

#[test]
fn analyze_isotropic_separable() {
    let v = json(&circsep(&["analyze", "--family", "isotropic", "--d", "3", "--lambda", "0.2"]));
    assert_eq!(v["verdict"], "separable");
    assert_eq!(v["ppt_blocks_passed"], true);
    assert_eq!(v["ppt_full_passed"], true);
    assert!(v["certificate"]["residual"].as_f64().unwrap() < 1e-9);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert!(v["version"].is_string());
}

#[test]
fn analyze_horodecki_regions() {
    let v = json(&circsep(&["analyze", "--family", "horodecki", "--alpha", "3.5"]));
    assert_eq!(v["verdict"], "inconclusive");
    assert_eq!(v["ppt_blocks_passed"], true);
    assert!(v["shortfall"].as_f64().unwrap() > 0.0);

    let v = json(&circsep(&["analyze", "--family", "horodecki", "--alpha", "4.5"]));
    assert_eq!(v["verdict"], "entangled");
    assert!(v["ppt_witness"].is_u64());
}

#[test]
fn analyze_partial_transpose_families() {
    let v = json(&circsep(&["analyze", "--family", "werner", "--d", "3", "--p", "0.4"]));
    assert_eq!(v["verdict"], "separable");
    assert_eq!(v["pt_form"], true);
    let v = json(&circsep(&["analyze", "--family", "werner", "--d", "3", "--p", "0.7"]));
    assert_eq!(v["verdict"], "entangled");
    assert_eq!(v["ppt_full_passed"], false);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let args = ["analyze", "--family", "random-circulant", "--d", "5", "--seed", "7", "--permutation", "0,3,1,4,2"];
    let mut a = json(&circsep(&args));
    let mut b = json(&circsep(&args));
    a.as_object_mut().unwrap().remove("timing");
    b.as_object_mut().unwrap().remove("timing");
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a["input"]["permutation"], serde_json::json!([0, 3, 1, 4, 2]));
}

#[test]
fn sweep_isotropic() {
    let v = json(&circsep(&["sweep", "--family", "isotropic", "--d", "3"]));
    assert!((v["separable"]["upper"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!((v["ppt"]["upper"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert_eq!(v["expected"]["separable_upper"], 0.25);
}

#[test]
fn sweep_werner() {
    let v = json(&circsep(&["sweep", "--family", "werner", "--d", "3"]));
    assert!((v["separable"]["upper"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn sweep_horodecki() {
    let v = json(&circsep(&["sweep", "--family", "horodecki"]));
    assert!((v["separable"]["upper"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!((v["ppt"]["upper"].as_f64().unwrap() - 4.0).abs() < 1e-6);
}

#[test]
fn render_golden_and_variants() {
    let out = circsep(&["render", "--d", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden());

    let out = circsep(&["render", "--d", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "x0 .  .  x0\n.  x1 x1 .\n.  x1 x1 .\nx0 .  .  x0\n");

    let out = circsep(&["render", "--gf", "4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 16);

    let out = circsep(&["render", "--d", "3", "--format", "svg"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));

    let v = json(&circsep(&["render", "--d", "3", "--format", "json"]));
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
}

#[test]
fn validation_errors_exit_2() {
    let out = circsep(&["build", "--family", "isotropic", "--d", "3", "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = circsep(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut entries = vec![vec![[0.0, 0.0]; 9]; 9];
    for (i, row) in entries.iter_mut().enumerate() {
        row[i] = [1.0 / 9.0, 0.0];
    }
    entries[0][1] = [0.01, 0.0];
    entries[1][0] = [0.01, 0.0];
    let doc = serde_json::json!({"d": 3, "permutation": [0, 1, 2], "entries": entries});
    fs::write(&path, doc.to_string()).unwrap();
    let out = circsep(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(0, 1)"), "{err}");
}

#[test]
fn text_output_without_color() {
    let out = circsep(&["analyze", "--family", "isotropic", "--d", "3", "--lambda", "0.2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("verdict      separable"));
    assert!(!text.contains('\x1b'));
}
