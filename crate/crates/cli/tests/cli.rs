//! End-to-end tests of the `empkl` binary: exit-code contract, report
//! schema, format parity, and determinism across thread counts.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_empkl"))
        .args(args)
        .env_remove("NO_COLOR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn tail_bound_matches_golden_json() {
    let out = run(&["bound", "tail", "--n", "10", "--k", "2", "--eps", "0.5", "--side", "upper"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"command\": \"bound tail\""), "{text}");
    assert!(text.contains("5.7237051896903646e-1"), "{text}");
    assert!(text.contains("\"version\": \"0.1.0\""));
    assert!(text.contains("\"seed\": null"));
}

#[test]
fn tail_bound_trivial_eps_is_one() {
    let out = run(&["bound", "tail", "--n", "10", "--k", "2", "--eps", "0", "--side", "upper"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"primary\": 1.0000000000000000e0"));
}

#[test]
fn every_json_float_round_trips() {
    let out = run(&["bound", "mgf", "--n", "7", "--k", "3", "--t", "-1.234"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for token in text
        .split(|c: char| c == ' ' || c == ',' || c == '\n')
        .filter(|t| t.contains('e') && t.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-'))
    {
        let parsed: f64 = token.parse().expect("float token parses");
        assert_eq!(format!("{parsed:.16e}"), *token, "token {token}");
    }
}

#[test]
fn domain_error_exits_two() {
    let out = run(&["bound", "mgf", "--n", "2", "--k", "2", "--t", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("domain error"), "{err}");
    assert!(err.contains('1'), "boundary n/2 should be named: {err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn unknown_flag_exits_two_with_usage() {
    let out = run(&["bound", "mean", "--n", "4", "--k", "2", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).to_lowercase().contains("usage"));
}

#[test]
fn missing_seed_is_usage_error() {
    let out = run(&["verify", "mc", "--n", "20", "--k", "3", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn verify_exact_small_sweep_passes() {
    let out = run(&["verify", "exact", "--max-n", "5", "--k", "2", "--t-points", "8", "--eps-points", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"passed\": true"));
    assert!(stderr(&out).contains("PASS"));
}

#[test]
fn verify_mc_scaled_bounds_exit_one() {
    let out = run(&[
        "verify", "mc", "--n", "50", "--k", "5", "--trials", "4000", "--seed", "3",
        "--eps", "0,0.05", "--bound-scale", "0.0001",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"passed\": false"));
    assert!(stderr(&out).contains("FAIL"));
}

#[test]
fn verify_mc_deterministic_across_threads() {
    let base = [
        "verify", "mc", "--n", "40", "--k", "4", "--trials", "20000", "--seed", "11",
    ];
    let mut one: Vec<&str> = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut two: Vec<&str> = base.to_vec();
    two.extend(["--threads", "2"]);
    let a = run(&one);
    let b = run(&two);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b), "reports differ across --threads");
}

#[test]
fn csv_and_json_carry_identical_values() {
    let args = ["bound", "moment", "--n", "10", "--k", "2", "--m", "1"];
    let json = stdout(&run(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = stdout(&run(&csv_args));

    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
    // every CSV numeric cell appears verbatim in the JSON report
    for (name, cell) in header.iter().zip(&row) {
        if cell.contains('e') {
            assert!(json.contains(cell), "{name}={cell} missing from JSON");
        }
    }
    let idx = header.iter().position(|h| *h == "central_moment_bound").unwrap();
    assert!(row[idx].starts_with("2.5600000000000"), "{}", row[idx]);
}

#[test]
fn curve_emits_plot_ready_csv() {
    let out = run(&[
        "curve", "--quantity", "tail-upper", "--param", "eps", "--start", "0", "--stop", "1",
        "--points", "5", "--n", "10", "--k", "2", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,primary,relaxed_quadratic,relaxed_minform"
    );
    assert_eq!(lines.count(), 5);
    // values at eps = 0.5 match the closed form
    assert!(text.contains("5.7237051896903646e-1"));
    assert!(!text.contains('"'), "CSV needs no quoting");
}

#[test]
fn curve_missing_fixed_param_is_usage_error() {
    let out = run(&[
        "curve", "--quantity", "tail-upper", "--param", "eps", "--start", "0", "--stop", "1",
        "--points", "5", "--n", "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--k"));
}

#[test]
fn gof_reads_count_and_probability_files() {
    let dir = std::env::temp_dir().join(format!("empkl-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let counts = dir.join("counts.txt");
    let probs = dir.join("p.txt");
    std::fs::write(&counts, "8\n2\n").unwrap();
    std::fs::write(&probs, "0.5\n0.5\n").unwrap();
    let out = run(&[
        "test", "gof",
        "--counts-file", counts.to_str().unwrap(),
        "--p-file", probs.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("1.9274475702175753e-1"), "{text}");
    let inline = stdout(&run(&["test", "gof", "--counts", "8,2", "--p", "0.5,0.5"]));
    assert_eq!(text, inline);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gof_rejects_unnormalized_without_flag() {
    let out = run(&["test", "gof", "--counts", "8,2", "--p", "0.5,0.6"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&["test", "gof", "--counts", "8,2", "--p", "0.5,0.6", "--renormalize"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn gof_impossible_observation_reports_inf() {
    let out = run(&["test", "gof", "--counts", "3,1", "--p", "1,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"statistic\": \"inf\""), "{text}");
    assert!(text.contains("\"pvalue\": 0.0000000000000000e0"));
}

#[test]
fn invert_radius_round_trips_through_cli() {
    let out = run(&["invert", "radius", "--n", "100", "--k", "5", "--delta", "0.05", "--side", "upper"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1.97077434"));
    let n = run(&["invert", "samplesize", "--k", "5", "--eps", "0.1", "--delta", "0.05", "--side", "upper"]);
    assert!(stdout(&n).contains("\"n\": 198"));
}

#[test]
fn envelope_command_reports_relaxations() {
    let out = run(&["envelope", "--t", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("3.7156355643248301e-1"), "{text}");
    assert!(text.contains("relaxation_ratio"));
    assert!(text.contains("relaxation_gamma"));
}

#[test]
fn no_color_strips_ansi_from_diagnostics() {
    let out = Command::new(env!("CARGO_BIN_EXE_empkl"))
        .args(["verify", "reduction", "--max-n", "2", "--t-points", "4", "--dists", "1"])
        .env("NO_COLOR", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!stderr(&out).contains('\x1b'));
}
