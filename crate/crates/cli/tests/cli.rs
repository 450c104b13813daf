use std::fs::File;
use std::path::Path;
use std::process::{Command, Output};

use hplanar_core::io::write_tensor;
use hplanar_core::planar::{make_a1, AStructure, OneFormList, SymTensor};
use hplanar_core::rng::{gaussian_vector, seeded};

fn hplanar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hplanar"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_reader(File::open(path).unwrap()).unwrap()
}

#[test]
fn thm34_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = hplanar(&["experiment", "thm34", "--n", "2", "--seed", "1", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r["pass"], true);
    assert_eq!(r["scenario"], "thm34");
    assert!(r["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hplanar(&["experiment", "bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(hplanar(&["all", "--no-such-flag"], dir.path()).status.code(), Some(2));
    assert_eq!(hplanar(&["frobnicate"], dir.path()).status.code(), Some(2));
    // quaternionic structure forced on R^4 violates the dimension bound
    assert_eq!(hplanar(&["experiment", "thm25", "--n", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(hplanar(&["decompose", "--tensor", "missing.json"], dir.path()).status.code(), Some(2));
    assert_eq!(hplanar(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn decompose_recovers_forms_and_rejects_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let q = AStructure::quaternionic(2).unwrap();
    let mut rng = seeded(7);
    let forms = OneFormList((0..4).map(|_| gaussian_vector(&mut rng, 8)).collect());
    write_tensor(&make_a1(&forms, &q).unwrap(), File::create(dir.path().join("P.json")).unwrap()).unwrap();
    write_tensor(&SymTensor::componentwise_cube(8), File::create(dir.path().join("C.json")).unwrap()).unwrap();

    let args = ["decompose", "--tensor", "P.json", "--structure", "quaternionic", "--n", "2", "--out", "d.json"];
    let out = hplanar(&args, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("d.json"));
    let got = r["data"]["forms"].as_array().unwrap();
    for (row, truth) in got.iter().zip(&forms.0) {
        for (g, t) in row.as_array().unwrap().iter().zip(truth.iter()) {
            assert!((g.as_f64().unwrap() - t).abs() < 1e-8);
        }
    }

    let out = hplanar(&["decompose", "--tensor", "C.json", "--n", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["data"]["member"], false);
}

#[test]
fn geodesic_csv_feeds_planarity() {
    let dir = tempfile::tempdir().unwrap();
    let out = hplanar(&["geodesic", "--format", "csv", "--out", "c.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("t,x0,x1,x2,x3,x4,x5,x6,x7\n"));
    assert_eq!(text.lines().count(), 1002);

    let out = hplanar(&["planarity", "--curve", "c.csv", "--out", "p.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&dir.path().join("p.json"))["pass"], true);
}

#[test]
fn all_aggregates_theorem_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = hplanar(&["all", "--seed", "2", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("scenario,seed,name,value,threshold,relation,pass\n"));
    for id in ["thm25", "thm26", "lem32", "thm34", "thm31"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{id},2,"))), "{id} missing");
    }
    assert!(!text.contains(",false"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |mut v: serde_json::Value| {
        v["duration_ms"] = 0.into();
        v
    };
    for name in ["a.json", "b.json"] {
        hplanar(&["experiment", "lem32", "--seed", "1", "--out", name], dir.path());
    }
    assert_eq!(strip(report(&dir.path().join("a.json"))), strip(report(&dir.path().join("b.json"))));
}
