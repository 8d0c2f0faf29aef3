use std::path::Path;
use std::process::{Command, Output};

use jointbound::cli::{parse_json_report, render_report, Format, Payload, Report};

fn jointbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jointbound"))
        .args(args)
        .env_remove("JOINTBOUND_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn report_from(out: &Output) -> Report {
    parse_json_report(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn without_timestamp(bytes: &[u8]) -> String {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let start = text.find("\"timestamp\":").unwrap();
    let end = start + text[start..].find('}').unwrap();
    format!("{}{}", &text[..start], &text[end..])
}

#[test]
fn verify_passes_with_exit_zero() {
    let out = jointbound(&["verify", "--seed", "7", "--tolerance", "1e-9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report_from(&out);
    assert!(r.all_pass());
    assert_eq!(r.pass_flags.len(), r.checks.len());
    for id in 1..=10 {
        assert!(r.checks.iter().any(|c| c.name.starts_with(&format!("c{id:02}."))));
    }
}

#[test]
fn failing_tolerance_gives_nonzero_exit() {
    let ok = jointbound(&["scan", "--what", "eq21", "--grid-steps", "2001"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = jointbound(&["scan", "--what", "eq21", "--grid-steps", "2001", "--tolerance", "1e-300"]);
    assert_eq!(bad.status.code(), Some(1));
    let r = report_from(&bad);
    assert!(!r.pass_flags["quantum_chsh_at_argmax"]);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL quantum_chsh_at_argmax"));
}

#[test]
fn eq21_scan_peaks_at_cos_one_half() {
    let r = report_from(&jointbound(&["scan", "--what", "eq21", "--grid-steps", "10001"]));
    assert!((r.scalar("max_value").unwrap() - 1.25).abs() < 1e-6);
    assert!((r.scalar("argmax_cos_phi").unwrap() - 0.5).abs() < 1e-6);
    let Some(Payload::Table(t)) = r.results.get("curve") else { panic!("missing curve") };
    assert_eq!(t.rows.len(), 10001);
    let table_max = t.rows.iter().map(|row| row[2]).fold(f64::NEG_INFINITY, f64::max);
    assert!((table_max - 1.25).abs() < 1e-6);
}

#[test]
fn eq20_scan_at_pi_over_4() {
    let r = report_from(&jointbound(&["scan", "--what", "eq20", "--phi", "0.7853981634"]));
    assert!((r.scalar("max_value").unwrap() - 2f64.sqrt()).abs() < 1e-6);
    assert!(r.all_pass());
}

#[test]
fn bound_on_bell_pi_over_4_reaches_two_root_two() {
    let r = report_from(&jointbound(&["bound", "--state", "bell", "--phi", "0.7853981634"]));
    assert!((r.scalar("chsh").unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!((r.scalar("tight_lhs").unwrap() - 2.0).abs() < 1e-9);
    assert!(r.all_pass());
}

#[test]
fn json_report_round_trips_bit_exactly() {
    let out = jointbound(&["bound", "--state", "mixed", "--seed", "5"]);
    let r = report_from(&out);
    assert_eq!(render_report(&r, Format::Json).unwrap(), out.stdout);
    let before = r.scalar("tight_lhs").unwrap();
    let after = parse_json_report(&render_report(&r, Format::Json).unwrap()).unwrap().scalar("tight_lhs").unwrap();
    assert_eq!(before.to_bits(), after.to_bits());
}

#[test]
fn same_seed_same_report_and_shots() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let shots = dir.path().join("shots.csv");
    let run = || {
        let out = jointbound(&[
            "sample",
            "--seed",
            "11",
            "--shots",
            "20000",
            "--phi",
            "1.0",
            "--output",
            report.to_str().unwrap(),
            "--shots-path",
            shots.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let bytes = (std::fs::read(&report).unwrap(), std::fs::read(&shots).unwrap());
        std::fs::remove_file(&report).unwrap();
        std::fs::remove_file(&shots).unwrap();
        bytes
    };
    let (r1, s1) = run();
    let (r2, s2) = run();
    assert_eq!(without_timestamp(&r1), without_timestamp(&r2));
    assert_eq!(s1, s2);
    let text = String::from_utf8(s1).unwrap();
    assert_eq!(text.lines().next(), Some("index,x_a,y_a,x_b,y_b"));
    assert_eq!(text.lines().count(), 20_001);
}

#[test]
fn csv_report_rows() {
    let out = jointbound(&["pair", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value,bound,tolerance,pass"));
    assert!(lines.all(|l| l.split(',').count() == 5 && l.ends_with(",true")));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jointbound"))
        .args(["single", "--alpha", "0.3"])
        .env("JOINTBOUND_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = parse_json_report(&std::fs::read(dir.path().join("single-report.json")).unwrap()).unwrap();
    assert!(r.all_pass());
}

#[test]
fn state_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let h = 0.5;
    let rows = serde_json::json!([
        [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]]
    ]);
    std::fs::write(&path, rows.to_string()).unwrap();
    let r = report_from(&jointbound(&["bound", "--state", "file", "--state-file", path.to_str().unwrap()]));
    assert!((r.scalar("chsh").unwrap() - 2.0).abs() < 1e-12);
    assert!((r.scalar("coherence_lhs").unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn invalid_configurations_are_rejected() {
    for args in [
        vec!["scan"],
        vec!["bound", "--state", "file"],
        vec!["bound", "--tolerance", "0"],
        vec!["bound", "--grid-steps", "4"],
        vec!["pair", "--what", "eq20"],
        vec!["sample", "--shots", "1"],
    ] {
        let out = jointbound(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("jointbound:"), "{args:?}");
    }
    let out = jointbound(&["nonsense"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn unwritable_output_names_the_path() {
    let target = Path::new("/nonexistent-dir/report.json");
    let out = jointbound(&["bound", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/report.json"));
}
