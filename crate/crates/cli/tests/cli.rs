use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpreserve")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn identity_matrix_json(d: usize) -> String {
    let entries: Vec<String> =
        (0..d * d).map(|i| if i / d == i % d { "[1.0,0.0]".to_string() } else { "[0.0,0.0]".to_string() }).collect();
    format!("{{\"dim\":{d},\"entries\":[{}]}}", entries.join(","))
}

#[test]
fn range_of_identity_is_a_point() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("i4.json"), identity_matrix_json(4)).unwrap();
    let o = run(&["range", "i4.json", "--k", "2", "--angles", "24", "--out", "p.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("hermitian interval [1.00000000000000, 1.00000000000000]"), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,support,boundary_re,boundary_im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 24);
    for row in rows {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[2] - 1.0).abs() < 1e-12 && f[3].abs() < 1e-12);
    }
}

#[test]
fn range_svg_and_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("i3.json"), identity_matrix_json(3)).unwrap();
    let o = run(&["range", "i3.json", "--k", "1", "--angles", "12", "--format", "svg"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("<svg"));
    let o = run(&["range", "i3.json", "--k", "1", "--angles", "12", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["support"].as_array().unwrap().len(), 12);
}

#[test]
fn range_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["range", "missing.json", "--k", "1"], dir.path())), 2);
    fs::write(dir.path().join("i2.json"), identity_matrix_json(2)).unwrap();
    assert_eq!(code(&run(&["range", "i2.json", "--k", "2"], dir.path())), 2);
    fs::write(dir.path().join("bad.json"), "{\"dim\":2,\"entries\":[[1,0]]}").unwrap();
    assert_eq!(code(&run(&["range", "bad.json", "--k", "1"], dir.path())), 2);
    assert_eq!(code(&run(&["range"], dir.path())), 2);
}

#[test]
fn paper_writes_example_and_range_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["paper", "--m", "3", "--n", "3", "--k", "2", "--trials", "4", "--angles", "72", "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    for f in ["summary.json", "example1_a.json", "example1_b.json", "example1_ab.json", "example1_abt.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    let items = summary.as_array().unwrap();
    assert!(items.iter().all(|i| i["pass"] == true));
    assert!(items.iter().any(|i| i["item"] == "example1"));

    let o = run(&["range", "out/example1_ab.json", "--k", "1", "--angles", "36", "--out", "ab.csv"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("max support 4.52769256906871"));
}

#[test]
fn paper_two_by_two_half_and_bad_k() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["paper", "--m", "2", "--n", "2", "--k", "2", "--trials", "4", "--angles", "36", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS sufficiency/pt_left/affine"));
    assert_eq!(code(&run(&["paper", "--m", "2", "--n", "2", "--k", "5", "--out", "o"], dir.path())), 2);
}

#[test]
fn verify_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("id.json"), r#"{"varphi":"id","affine":false,"unitary":"identity"}"#).unwrap();
    let o = run(&["verify", "id.json", "--m", "2", "--n", "2", "--k", "1", "--trials", "5", "--angles", "36"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"]["verdict"], "classified");

    fs::write(dir.path().join("pt.json"), r#"{"varphi":"pt_right","affine":false,"unitary":"identity"}"#).unwrap();
    let o = run(&["verify", "pt.json", "--m", "3", "--n", "3", "--k", "2", "--trials", "3", "--angles", "36"], dir.path());
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let w = &v["verification"]["witnesses"][0];
    assert_eq!(w["trial"], 0);
    assert_eq!(w["a"]["entries"][1][0], 3.0);
    assert_eq!(w["a"]["entries"][5][0], 1.0);

    // descriptor without shape
    assert_eq!(code(&run(&["verify", "id.json"], dir.path())), 2);
    // affine with mn ≠ 2k
    fs::write(dir.path().join("aff.json"), r#"{"varphi":"id","affine":true,"unitary":"identity"}"#).unwrap();
    assert_eq!(code(&run(&["verify", "aff.json", "--m", "2", "--n", "2", "--k", "1"], dir.path())), 2);
}

#[test]
fn falsified_map_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["falsify", "--m", "2", "--n", "2", "--k", "1", "--count", "2", "--trials", "4", "--angles", "36", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["passes"], 0);
    let o = run(&["verify", "r.json", "--trials", "5", "--angles", "36"], dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["verify", "r.json", "--k", "2"], dir.path())), 2);
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["falsify", "--m", "2", "--n", "2", "--k", "1", "--count", "2", "--trials", "3", "--angles", "24"];
    assert_eq!(run(&args, dir.path()).stdout, run(&args, dir.path()).stdout);
}
