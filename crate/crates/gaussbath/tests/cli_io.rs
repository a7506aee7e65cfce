//! End-to-end checks of the command-line surface: file layout, CSV schemas,
//! summary/trajectory consistency, exit codes, and the output-directory
//! environment variable.

use std::path::Path;
use std::process::Command;

use gaussbath::analysis::{self, Trajectory};
use gaussbath::cli::{self, RunOptions};
use gaussbath::model::{Mode, Model};
use gaussbath::states::{InitialState, PhysicalConstants};
use gaussbath::free_dynamics::SystemParams;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussbath"))
}

fn parse_trajectory_csv(path: &Path) -> Trajectory {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,log_negativity,physical,min_symplectic_margin"
    );
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut physical = Vec::new();
    let mut margins = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4, "bad row: {line}");
        times.push(cols[0].parse().unwrap());
        values.push(cols[1].parse().unwrap());
        physical.push(cols[2] == "true");
        margins.push(cols[3].parse().unwrap());
    }
    Trajectory::new(times, values, physical, margins).unwrap()
}

#[test]
fn fig1_run_writes_trajectories_and_consistent_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cli::preset("fig1").unwrap();
    cfg.out = Some(dir.path().to_path_buf());
    let summary = cli::run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(summary.rows.len(), 3);

    let summary_text = std::fs::read_to_string(&summary.summary_file).unwrap();
    let mut lines = summary_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param_value,esd_time,revival_count,asymptote_mean,asymptote_amplitude,regime"
    );

    for (row, line) in summary.rows.iter().zip(lines) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);

        // Recompute every summary quantity from the written trajectory CSV.
        let tr = parse_trajectory_csv(&row.trajectory_file);
        let s: f64 = cols[0].parse().unwrap();
        let state = InitialState::new(s, cfg.d).unwrap();
        let params = SystemParams::new(
            cfg.m,
            cfg.gamma1,
            cfg.gamma2,
            cfg.temp1,
            cfg.temp2,
            0.0,
            PhysicalConstants::new(cfg.hbar, cfg.k).unwrap(),
        )
        .unwrap();
        let model = Model::new(state, params, Mode::Free).unwrap();

        let esd = analysis::esd_time(&tr, model.en_evaluator(), 1e-12).unwrap();
        match (esd, row.esd_time) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 2e-6),
            (None, None) => {}
            other => panic!("esd mismatch: {other:?}"),
        }
        assert!(esd.unwrap().is_finite(), "fig1 runs all die in finite time");
        let expected_esd: f64 = cols[1].parse().unwrap();
        assert!((expected_esd - row.esd_time.unwrap()).abs() < 1e-12);

        let pairs = analysis::revivals(&tr, model.en_evaluator(), 1e-12).unwrap();
        assert_eq!(pairs.len(), row.revival_count);
        assert_eq!(cols[2].parse::<usize>().unwrap(), row.revival_count);

        let (mean, amp) = analysis::asymptote(&tr, 0.2).unwrap();
        assert_eq!(cols[3].parse::<f64>().unwrap(), mean);
        assert_eq!(cols[4].parse::<f64>().unwrap(), amp);
        assert_eq!(cols[5], row.regime.to_string());
    }
}

#[test]
fn single_point_run_uses_plain_trajectory_name() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cli::preset("fig1").unwrap();
    cfg.sweep_param = None;
    cfg.sweep_values = None;
    cfg.out = Some(dir.path().to_path_buf());
    let summary = cli::run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(summary.rows.len(), 1);
    assert!(dir.path().join("trajectory.csv").exists());
    let summary_text = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let row = summary_text.lines().nth(1).unwrap();
    assert!(row.starts_with(','), "no param_value for single runs: {row}");
}

#[test]
fn floats_are_written_with_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cli::preset("fig3").unwrap();
    cfg.n_points = 200;
    cfg.t_end = 10.0;
    cfg.out = Some(dir.path().to_path_buf());
    cli::run(&cfg, &RunOptions::default()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("trajectory_omega0_1.csv")).unwrap();
    let sample = text.lines().nth(1).unwrap().split(',').next().unwrap();
    // 17 significant digits in scientific notation: d.16-digits e exponent.
    assert!(
        sample.contains('e') && sample.split('e').next().unwrap().len() == 18,
        "unexpected float format: {sample}"
    );
}

#[test]
fn binary_run_preset_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["run", "--preset", "fig2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("summary ->"));
    assert!(dir.path().join("summary.csv").exists());

    // Unknown preset: config error, exit 1.
    let out = binary().args(["run", "--preset", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Invalid config file: exit 1, message names the field.
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"mode":"free","s":1.0,"d":1.0,"m":1.0,"gamma1":-1.0,"gamma2":1.0,
           "T1":1.0,"T2":1.0,"omega0":0.0,"hbar":1.0,"k":1.0,"t_end":10.0,"n_points":50}"#,
    )
    .unwrap();
    let out = binary()
        .args(["run", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma1"));
}

#[test]
fn binary_validate_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // A valid preset config validates silently.
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        serde_json::to_string(&cli::preset("fig2").unwrap()).unwrap(),
    )
    .unwrap();
    let out = binary().args(["validate", "--config"]).arg(&good).output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "expected empty report");

    // Unequal baths with coupling: warning, still exit 0.
    let mut cfg = cli::preset("fig2").unwrap();
    cfg.gamma2 = 2.0;
    let warn = dir.path().join("warn.json");
    std::fs::write(&warn, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = binary().args(["validate", "--config"]).arg(&warn).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("unsupported configuration"));

    // Bad field: exit 1 and the field is named.
    cfg.gamma2 = 3.0;
    cfg.temp1 = -0.5;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = binary().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("T1"));
}

#[test]
fn output_env_var_sets_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cli::preset("fig1").unwrap();
    cfg.n_points = 50;
    cfg.t_end = 2.0;
    let cfg_file = dir.path().join("cfg.json");
    std::fs::write(&cfg_file, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out_dir = dir.path().join("from_env");
    let out = binary()
        .args(["run", "--config"])
        .arg(&cfg_file)
        .env("GAUSSBATH_OUT", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.csv").exists());
}

#[test]
fn unequal_bath_run_needs_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cli::preset("fig3").unwrap();
    cfg.gamma2 = 0.4;
    cfg.out = Some(dir.path().to_path_buf());
    let err = cli::run(&cfg, &RunOptions::default()).unwrap_err();
    assert!(err.to_string().contains("unsupported configuration"));
    cfg.allow_unequal_baths = true;
    assert!(cli::run(&cfg, &RunOptions::default()).is_ok());
}
