use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn difflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_difflab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SIGMA_FILE: &str =
    "alphabet = \"ABCD\"\n\n[rules]\nA = \"ABDB\"\nB = \"ABAC\"\nC = \"DCDB\"\nD = \"DCAC\"\n";

#[test]
fn generate_prefixes() {
    let cases = [
        ("+-", "16", "1,1,-1,1,1,1,1,-1,-1,-1,1,-1,1,1,1,-1\n"),
        ("+", "8", "1,1,1,-1,1,1,-1,1\n"),
        ("+", "1", "1\n"),
    ];
    for (signs, n, want) in cases {
        let o = difflab(&["generate", "--signs", signs, "-N", n]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), want);
    }
}

#[test]
fn generate_from_file_matches_signs() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "sigma.toml", SIGMA_FILE);
    let a = difflab(&["generate", "--file", &file, "-N", "1000"]);
    let b = difflab(&["generate", "--signs", "+-", "-N", "1000"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn bad_signs_are_a_usage_error() {
    let o = difflab(&["generate", "--signs", "+*", "-N", "4"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("'*'"));
}

#[test]
fn exactly_one_source() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "sigma.toml", SIGMA_FILE);
    assert_eq!(difflab(&["generate", "-N", "4"]).status.code(), Some(64));
    assert_eq!(
        difflab(&["spectra", "--signs", "+?"]).status.code(),
        Some(64)
    );
    assert!(difflab(&["--help"]).status.success());
    assert!(
        !difflab(&["generate", "--signs", "+", "--file", &file, "-N", "4"])
            .status
            .success()
    );
}

#[test]
fn derive_writes_rule_files() {
    let o = difflab(&["derive", "--signs", "+-"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), SIGMA_FILE);

    let rho = stdout(&difflab(&["derive", "--signs", "+"]));
    assert!(rho.contains("A = \"AB\"") && rho.contains("D = \"DC\""));

    let o = difflab(&["derive", "--signs", "+++", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["length"], 8);
}

#[test]
fn derived_file_feeds_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.toml");
    let o = difflab(&["derive", "--signs", "+--", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let a = difflab(&["generate", "--file", out.to_str().unwrap(), "-N", "512"]);
    let b = difflab(&["generate", "--signs", "+--", "-N", "512"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn analyze_reports_perron_data() {
    let o = difflab(&["analyze", "--signs", "+-", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["primitivity_exponent"], 2);
    assert_eq!(v["aperiodicity_witness"], "A");
    assert_eq!(
        v["frequencies"],
        serde_json::json!(["1/4", "1/4", "1/4", "1/4"])
    );
}

#[test]
fn spectra_new_system() {
    let o = difflab(&["spectra", "--signs", "+-", "-K", "64", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "purely AC (balanced weights)");
    assert_eq!(
        v["ergodic_classes"],
        serde_json::json!([["AA", "BB", "CC", "DD"], ["AD", "BC", "CB", "DA"]])
    );
    assert_eq!(v["rays"][1]["vector"][3], "-1");
    assert_eq!(v["sigma_hat"][1]["entries"][1], "1/8");
    assert_eq!(v["sigma_hat"].as_array().unwrap().len(), 65);
}

#[test]
fn spectra_classic_and_file() {
    let o = difflab(&["spectra", "--signs", "+", "-K", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: purely AC (balanced weights)"));

    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "rule.sub", SIGMA_FILE);
    let o = difflab(&["spectra", "--file", &file, "-K", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Sigma(4) = (1/8, 0, 0, 1/8"));
}

#[test]
fn spectra_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // three closed pair classes
    let three = write_file(
        dir.path(),
        "three.toml",
        "alphabet = \"abc\"\n\n[rules]\na = \"ab\"\nb = \"bc\"\nc = \"ca\"\n",
    );
    assert_eq!(
        difflab(&["spectra", "--file", &three]).status.code(),
        Some(3)
    );

    // corrupted rule: one ergodic class, eta does not vanish
    let bad = write_file(dir.path(), "bad.toml", &SIGMA_FILE.replace("ABDB", "ABDC"));
    let o = difflab(&["spectra", "--file", &bad, "-K", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: Inconclusive"));

    let not_primitive = write_file(
        dir.path(),
        "id.toml",
        "alphabet = \"ab\"\n\n[rules]\na = \"aa\"\nb = \"bb\"\n",
    );
    assert_eq!(
        difflab(&["spectra", "--file", &not_primitive])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn autocorr_is_exact_and_matches_empirical() {
    let o = difflab(&[
        "autocorr", "--signs", "+-", "-K", "4", "-N", "65536", "--format", "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,eta,empirical"));
    assert!(lines.next().unwrap().starts_with("0,1,"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "0");
        assert!(cols[2].parse::<f64>().unwrap().abs() < 1e-2);
    }
}

#[test]
fn diffract_csv_headers_and_budget() {
    let o = difflab(&["diffract", "--signs", "+-", "-N", "64", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("freq_index,intensity\n"));
    assert_eq!(text.lines().count(), 65);
    assert!(!text.contains('\r'));

    let o = difflab(&[
        "diffract", "--signs", "+", "-N", "64", "--mode", "sup", "--format", "csv",
    ]);
    assert!(stdout(&o).starts_with("theta,magnitude\n"));
    assert_eq!(stdout(&o).lines().count(), 64 * 8 + 1);

    let o = Command::new(env!("CARGO_BIN_EXE_difflab"))
        .args(["diffract", "--signs", "+-", "-N", "4096", "--mode", "sup"])
        .env("DIFFLAB_MAX_FFT", "1024")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn diffract_sup_summary() {
    let o = difflab(&[
        "diffract", "--signs", "+-", "-N", "1024", "--mode", "sup", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratio = v["ratio"].as_f64().unwrap();
    assert!(ratio > 1.0 && ratio <= 2f64.sqrt() + 0.01);
    assert!(v["sup_upper_bound"].as_f64().unwrap() >= v["sup_estimate"].as_f64().unwrap());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = difflab(&[
            "spectra",
            "--signs",
            "+--",
            "-K",
            "32",
            "--format",
            "json",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    let d = dir.path().join("d.csv");
    for p in [&c, &d] {
        difflab(&[
            "diffract",
            "--signs",
            "+-",
            "-N",
            "4096",
            "--format",
            "csv",
            "--out",
            p.to_str().unwrap(),
        ]);
    }
    assert_eq!(fs::read(&c).unwrap(), fs::read(&d).unwrap());
}

#[test]
fn verify_passes_and_catches_a_corrupted_rule() {
    let o = difflab(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
    assert!(!stdout(&o).contains("4^9"));

    let o = difflab(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4^9"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.toml", &SIGMA_FILE.replace("ABDB", "ABDC"));
    let o = difflab(&["verify", "--quick", "--file", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  Sigma(1) = Sigma(3)"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Sigma(1) = Sigma(3)"));
}
