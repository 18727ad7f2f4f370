use std::path::PathBuf;
use std::process::{Command, Output};

use logperiod::region::RegionDocument;

fn regions() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../regions")
}

fn region(name: &str) -> String {
    regions().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logperiod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_after(text: &str, key: &str) -> f64 {
    let rest = &text[text.find(key).unwrap_or_else(|| panic!("`{key}` in {text}")) + key.len()..];
    let end = rest.find(|c: char| c.is_whitespace()).unwrap_or(rest.len());
    rest[..end].parse().unwrap()
}

#[test]
fn check_verdicts_and_exit_codes() {
    let o = run(&["check", &region("s_half.region")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ALLOWABLE");
    let o = run(&["check", &region("unit_box_p2.region")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("violated at face {1}"), "{}", stdout(&o));
    let o = run(&["check", &region("quarter_disk.region")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn integrate_dilogarithm_and_divergence() {
    let o = run(&["integrate", &region("s_half.region"), "--form", "dr1/r1 ^ dr2/r2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = value_after(&stdout(&o), "value=");
    assert!((v - 0.582241).abs() < 1e-5, "{v}");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ladder.csv");
    let o = run(&[
        "integrate",
        &region("unit_box_p2.region"),
        "--form",
        "dr1/r1 ^ dr2/r2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("DIVERGING"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("param,value,stderr"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 13);
}

#[test]
fn complex_and_decay_commands() {
    let o = run(&["integrate-complex", &region("quarter_disk.region")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("value=-2.0000") && s.contains("- 2.0000"), "{s}");
    let o = run(&["decay", &region("upper_triangle.region"), "--u", "r1"]);
    assert_eq!(o.status.code(), Some(0));
    let alpha = value_after(&stdout(&o), "alpha=");
    assert!((0.9..=1.1).contains(&alpha), "{alpha}");
    let o = run(&["decay", &region("upper_triangle.region"), "--u", "2*r1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn blowup_stokes_bound_and_fibers() {
    let o = run(&[
        "blowup",
        &region("s_half.region"),
        "--witness",
        "r1 + r2^2",
        "--form",
        "dr1/r1 ^ dr2/r2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(
        s.contains("stage 2") && s.contains("PROPER") && s.contains("PASS"),
        "{s}"
    );
    let o = run(&["stokes"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 11);
    let o = run(&["stokes", "--map", "x1; x2", "--form", "x1*dx2", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["bound-check", &region("symmetric_interval.region"), "--map", "x1^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("delta=2"));
    let o = run(&["probe-fibers", &region("parabola.region"), "--axis", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FINITE max=2"), "{}", stdout(&o));
    let o = run(&["probe-fibers", &region("unit_box_p2.region"), "--axis", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(run(&["integrate", &region("missing.region")]).status.code(), Some(1));
    assert_eq!(
        run(&["integrate", &region("unit_box_p2.region")]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["integrate", &region("s_half.region"), "--ratio", "0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let o = run(&["check", &region("quarter_disk.region"), "--m", "x"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let args = ["integrate-complex", &region("disk.region"), "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["check", &region("annulus.region"), "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn region_documents_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(regions()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "region") {
            let doc = RegionDocument::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let again = RegionDocument::parse(&doc.to_json()).unwrap();
            assert_eq!(doc, again, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 10);
}
