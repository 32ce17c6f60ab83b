use std::process::Command;

use lanfa::cli::{embedded_config, main_with, RunConfig, EXIT_CONFIG, EXIT_OK, LINSYS_HEADER, QUADFORM_HEADER, RUN_HEADER};
use lanfa::linalg::read_matrix_market;

fn lanfa(args: &[&str]) -> (i32, String) {
    let mut err = Vec::new();
    let mut argv = vec!["lanfa"];
    argv.extend_from_slice(args);
    let code = main_with(argv, &mut err);
    (code, String::from_utf8(err).unwrap())
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn run_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let (code, err) = lanfa(&["run", "--problem", "uniform", "--n", "50", "--f", "sqrt", "--kmax", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines = data_lines(&csv);
    assert_eq!(lines[0], RUN_HEADER);
    assert_eq!(lines.len(), 13);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        let err: f64 = cols[1].parse().unwrap();
        let bound: f64 = cols[5].parse().unwrap();
        assert!(err <= bound, "{l}");
    }
}

#[test]
fn embedded_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let (code, err) = lanfa(&["run", "--problem", "strakos", "--f", "invpow:2", "--kmax", "10", "--sets", "apriori", "--out", first.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let csv = std::fs::read_to_string(&first).unwrap();
    let mut cfg = embedded_config(&csv).unwrap();
    assert_eq!(cfg.sets.as_deref(), Some("apriori"));
    assert!(cfg.contour.is_some() && cfg.norm.is_some() && cfg.w.is_some());

    let second = dir.path().join("b.csv");
    cfg.out = Some(second.clone());
    let toml_path = dir.path().join("cfg.toml");
    std::fs::write(&toml_path, cfg.to_toml().unwrap()).unwrap();
    let (code, err) = lanfa(&["run", "--config", toml_path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let again = std::fs::read_to_string(&second).unwrap();
    assert_eq!(data_lines(&csv), data_lines(&again));
}

#[test]
fn quadform_and_linsys_headers() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.csv");
    let (code, err) = lanfa(&["quadform", "--problem", "uniform", "--n", "40", "--f", "log", "--kmax", "8", "--out", q.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(data_lines(&std::fs::read_to_string(&q).unwrap())[0], QUADFORM_HEADER);

    let l = dir.path().join("l.csv");
    let (code, err) = lanfa(&["linsys", "--problem", "uniform", "--n", "40", "--w", "-0.5", "--kmax", "8", "--out", l.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = std::fs::read_to_string(&l).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], LINSYS_HEADER);
    assert_eq!(lines.len(), 10);
}

#[test]
fn generated_matrix_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("a.mtx");
    let (code, err) = lanfa(&["gen", "--problem", "strakos", "--n", "30", "--out", mtx.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let a = read_matrix_market(&mtx).unwrap();
    assert_eq!(a.dim(), 30);
    let direct = RunConfig { problem: Some("strakos".into()), n: Some(30), ..Default::default() };
    let (spec, _) = direct.problem_spec().unwrap();
    let reference = spec.operator().unwrap();
    let (s, t) = (a.spectrum().unwrap(), reference.spectrum().unwrap());
    assert!((s.min() - t.min()).abs() < 1e-12 * t.max());
    assert!((s.max() - t.max()).abs() < 1e-12 * t.max());

    let out = dir.path().join("file.csv");
    let (code, err) =
        lanfa(&["run", "--problem", "file", "--matrix", mtx.to_str().unwrap(), "--f", "sqrt", "--kmax", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
}

#[test]
fn bad_input_exits_with_config_error() {
    assert_eq!(lanfa(&["run", "--problem", "nonesuch"]).0, EXIT_CONFIG);
    assert_eq!(lanfa(&["run", "--f", "frobnicate"]).0, EXIT_CONFIG);
    assert_eq!(lanfa(&["run", "--kmax", "zero"]).0, EXIT_CONFIG);
    assert_eq!(lanfa(&["gen", "--problem", "uniform"]).0, EXIT_CONFIG);
    let (code, err) = lanfa(&["run", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lanfa");
    let out = Command::new(bin).args(["run", "--problem", "uniform", "--n", "30", "--f", "sqrt", "--kmax", "4"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("# lanfa run\n"));
    assert!(stdout.contains(RUN_HEADER));

    let bad = Command::new(bin).args(["run", "--norm", "q"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
}
