//! Run configurations, validation, presets, and the CSV-emitting driver
//! behind the command-line binary.
//!
//! Configurations are flat JSON documents with exactly the fields of
//! [`RunConfig`]; unknown keys are rejected so sweep definitions stay
//! reproducible. Output is deterministic: identical configs produce
//! byte-identical CSV files regardless of thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{self, RegimeClass, Trajectory, DEATH_EPS};
use crate::error::{Error, Result};
use crate::free_dynamics::SystemParams;
use crate::model::{Mode, Model};
use crate::states::{InitialState, PhysicalConstants};

/// Environment variable naming the default output directory.
pub const OUT_ENV_VAR: &str = "GAUSSBATH_OUT";

/// Fraction of the trajectory used for the asymptote window in summaries.
const TAIL_FRACTION: f64 = 0.2;

/// A single run or sweep definition. Field names are the JSON keys.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub s: f64,
    pub d: f64,
    pub m: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(rename = "T1")]
    pub temp1: f64,
    #[serde(rename = "T2")]
    pub temp2: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub k: f64,
    pub t_end: f64,
    pub n_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_param: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub allow_unequal_baths: bool,
}

/// Severity of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, tied to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
    pub severity: Severity,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

/// Parameters a sweep may scan.
const SWEEPABLE: [&str; 8] = ["s", "d", "m", "gamma1", "gamma2", "T1", "T2", "omega0"];

/// Lists violated invariants without running anything.
pub fn validate(cfg: &RunConfig) -> Vec<ConfigIssue> {
    let mut issues = Vec::new();
    let mut err = |field: &str, message: String| {
        issues.push(ConfigIssue {
            field: field.into(),
            message,
            severity: Severity::Error,
        })
    };

    let positive = [
        ("s", cfg.s),
        ("d", cfg.d),
        ("m", cfg.m),
        ("gamma1", cfg.gamma1),
        ("gamma2", cfg.gamma2),
        ("hbar", cfg.hbar),
        ("k", cfg.k),
        ("t_end", cfg.t_end),
    ];
    for (name, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            err(name, format!("must be positive and finite, got {v}"));
        }
    }
    for (name, v) in [("T1", cfg.temp1), ("T2", cfg.temp2), ("omega0", cfg.omega0)] {
        if !(v >= 0.0 && v.is_finite()) {
            err(name, format!("must be non-negative and finite, got {v}"));
        }
    }
    if cfg.n_points < 2 {
        err("n_points", format!("must be at least 2, got {}", cfg.n_points));
    }

    match (&cfg.sweep_param, &cfg.sweep_values) {
        (Some(param), Some(values)) => {
            if !SWEEPABLE.contains(&param.as_str()) {
                err(
                    "sweep_param",
                    format!("unknown parameter `{param}`; expected one of {SWEEPABLE:?}"),
                );
            }
            if values.is_empty() {
                err("sweep_values", "sweep value list is empty".into());
            }
            for v in values {
                let lower_ok = if param == "T1" || param == "T2" || param == "omega0" {
                    *v >= 0.0
                } else {
                    *v > 0.0
                };
                if !(v.is_finite() && lower_ok) {
                    err("sweep_values", format!("value {v} is out of range for `{param}`"));
                }
            }
        }
        (Some(_), None) => err("sweep_values", "sweep_param given without sweep_values".into()),
        (None, Some(_)) => err("sweep_param", "sweep_values given without sweep_param".into()),
        (None, None) => {}
    }

    // Mode-specific coupling constraints, checked against every swept value.
    let omega0_values = sweep_values_for(cfg, "omega0");
    if cfg.mode == Mode::Free && omega0_values.iter().any(|w| *w != 0.0) {
        err("omega0", "free mode requires omega0 = 0".into());
    }
    if cfg.mode == Mode::Harmonic && !cfg.allow_unequal_baths {
        let gamma1s = sweep_values_for(cfg, "gamma1");
        let gamma2s = sweep_values_for(cfg, "gamma2");
        let t1s = sweep_values_for(cfg, "T1");
        let t2s = sweep_values_for(cfg, "T2");
        let unequal = gamma1s.iter().any(|g1| gamma2s.iter().any(|g2| g1 != g2))
            || t1s.iter().any(|t1| t2s.iter().any(|t2| t1 != t2));
        if unequal && omega0_values.iter().any(|w| *w > 0.0) {
            issues.push(ConfigIssue {
                field: "allow_unequal_baths".into(),
                message: "unsupported configuration: omega0 > 0 with unequal baths; \
                          set allow_unequal_baths to opt in"
                    .into(),
                severity: Severity::Warning,
            });
        }
    }
    issues
}

fn sweep_values_for(cfg: &RunConfig, param: &str) -> Vec<f64> {
    if cfg.sweep_param.as_deref() == Some(param) {
        if let Some(values) = &cfg.sweep_values {
            if !values.is_empty() {
                return values.clone();
            }
        }
    }
    vec![match param {
        "s" => cfg.s,
        "d" => cfg.d,
        "m" => cfg.m,
        "gamma1" => cfg.gamma1,
        "gamma2" => cfg.gamma2,
        "T1" => cfg.temp1,
        "T2" => cfg.temp2,
        "omega0" => cfg.omega0,
        _ => unreachable!("unknown parameter {param}"),
    }]
}

fn with_param(cfg: &RunConfig, param: &str, value: f64) -> RunConfig {
    let mut point = cfg.clone();
    match param {
        "s" => point.s = value,
        "d" => point.d = value,
        "m" => point.m = value,
        "gamma1" => point.gamma1 = value,
        "gamma2" => point.gamma2 = value,
        "T1" => point.temp1 = value,
        "T2" => point.temp2 = value,
        "omega0" => point.omega0 = value,
        _ => unreachable!("unknown parameter {param}"),
    }
    point.sweep_param = None;
    point.sweep_values = None;
    point
}

/// Built-in figure-reproduction recipes.
///
/// All presets use `d = 1`, `T = 1`, `m = ħ = k = 1`:
/// - `fig1`: free evolution, sweep over `s ∈ {0.25, 1, 2}` — sudden death.
/// - `fig2`: strong damping `γ = 3` with and without the `ω₀ = 1` coupling
///   (`s = 1`) — the two curves coincide.
/// - `fig3`: weak damping `γ = 0.2` with and without the `ω₀ = 1` coupling
///   (`s = 0.25`) — repeated death and revival.
/// - `fig4`: `γ = 1` at `ω₀ ∈ {1.5, 1.8, 2.2}` over a long window
///   (`s = 0.25`) — a sharp dip, then persistent entanglement.
///
/// The initial widths for the coupled runs are chosen where the phenomena are
/// pronounced: revivals need the relative width squeezed well below the
/// oscillator ground width, which `s = 0.25` provides at these couplings.
pub fn preset(name: &str) -> Result<RunConfig> {
    let base = RunConfig {
        mode: Mode::Harmonic,
        s: 1.0,
        d: 1.0,
        m: 1.0,
        gamma1: 1.0,
        gamma2: 1.0,
        temp1: 1.0,
        temp2: 1.0,
        omega0: 0.0,
        hbar: 1.0,
        k: 1.0,
        t_end: 60.0,
        n_points: 2400,
        sweep_param: None,
        sweep_values: None,
        out: None,
        allow_unequal_baths: false,
    };
    let cfg = match name {
        "fig1" => RunConfig {
            mode: Mode::Free,
            sweep_param: Some("s".into()),
            sweep_values: Some(vec![0.25, 1.0, 2.0]),
            ..base
        },
        "fig2" => RunConfig {
            gamma1: 3.0,
            gamma2: 3.0,
            sweep_param: Some("omega0".into()),
            sweep_values: Some(vec![0.0, 1.0]),
            ..base
        },
        "fig3" => RunConfig {
            s: 0.25,
            gamma1: 0.2,
            gamma2: 0.2,
            sweep_param: Some("omega0".into()),
            sweep_values: Some(vec![0.0, 1.0]),
            ..base
        },
        "fig4" => RunConfig {
            s: 0.25,
            t_end: 100.0,
            n_points: 4000,
            sweep_param: Some("omega0".into()),
            sweep_values: Some(vec![1.5, 1.8, 2.2]),
            ..base
        },
        other => {
            return Err(Error::ConfigError {
                field: "preset".into(),
                message: format!("unknown preset `{other}`; expected fig1|fig2|fig3|fig4"),
            })
        }
    };
    Ok(cfg)
}

/// Execution options for [`run`].
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Worker threads for sweep points; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Death threshold for sudden-death and revival detection.
    pub eps: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: None,
            eps: DEATH_EPS,
        }
    }
}

/// Summary of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub param_value: Option<f64>,
    pub esd_time: Option<f64>,
    pub revival_count: usize,
    pub asymptote_mean: Option<f64>,
    pub asymptote_amplitude: Option<f64>,
    pub regime: RegimeClass,
    pub unphysical_samples: usize,
    pub trajectory_file: PathBuf,
}

/// Result of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
    pub summary_file: PathBuf,
}

fn model_from(cfg: &RunConfig) -> Result<Model> {
    let state = InitialState::new(cfg.s, cfg.d)?;
    let constants = PhysicalConstants::new(cfg.hbar, cfg.k)?;
    let params = SystemParams::new(
        cfg.m, cfg.gamma1, cfg.gamma2, cfg.temp1, cfg.temp2, cfg.omega0, constants,
    )?;
    Model::with_options(state, params, cfg.mode, cfg.allow_unequal_baths)
}

/// 17-significant-digit float formatting used in all CSV output.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = String::with_capacity(tr.len() * 64);
    out.push_str("t,log_negativity,physical,min_symplectic_margin\n");
    for i in 0..tr.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(tr.times()[i]),
            fmt_float(tr.values()[i]),
            tr.physical_flags()[i],
            fmt_float(tr.margins()[i]),
        );
    }
    out
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str("param_value,esd_time,revival_count,asymptote_mean,asymptote_amplitude,regime\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_opt(row.param_value),
            fmt_opt(row.esd_time),
            row.revival_count,
            fmt_opt(row.asymptote_mean),
            fmt_opt(row.asymptote_amplitude),
            row.regime,
        );
    }
    out
}

/// Sanitizes a float for use in a filename (shortest round-trip form).
fn value_tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

fn run_point(
    cfg: &RunConfig,
    value: Option<f64>,
    dir: &Path,
    eps: f64,
) -> Result<SummaryRow> {
    let model = model_from(cfg)?;
    let tr = model.trajectory(cfg.t_end, cfg.n_points)?;
    let en = model.en_evaluator();
    let esd = analysis::esd_time(&tr, &en, eps)?;
    let revivals = analysis::revivals(&tr, &en, eps)?;
    let (mean, amplitude) = match analysis::asymptote(&tr, TAIL_FRACTION) {
        Ok((m, a)) => (Some(m), Some(a)),
        Err(_) => (None, None),
    };
    let file = match (&cfg.sweep_param, value) {
        (Some(param), Some(v)) => dir.join(format!("trajectory_{param}_{}.csv", value_tag(v))),
        _ => dir.join("trajectory.csv"),
    };
    fs::write(&file, trajectory_csv(&tr))?;
    Ok(SummaryRow {
        param_value: value,
        esd_time: esd,
        revival_count: revivals.len(),
        asymptote_mean: mean,
        asymptote_amplitude: amplitude,
        regime: analysis::classify_regime(model.params()),
        unphysical_samples: tr.physical_flags().iter().filter(|b| !**b).count(),
        trajectory_file: file,
    })
}

/// Runs a configuration: one trajectory CSV per sweep point plus one ordered
/// summary CSV. Sweep points execute in parallel; output bytes do not depend
/// on scheduling.
pub fn run(cfg: &RunConfig, options: &RunOptions) -> Result<RunSummary> {
    let issues = validate(cfg);
    if let Some(first_error) = issues.iter().find(|i| i.severity == Severity::Error) {
        return Err(Error::ConfigError {
            field: first_error.field.clone(),
            message: first_error.message.clone(),
        });
    }

    let dir = cfg
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;

    let points: Vec<(Option<f64>, RunConfig)> = match (&cfg.sweep_param, &cfg.sweep_values) {
        (Some(param), Some(values)) => values
            .iter()
            .map(|v| (Some(*v), {
                let mut point = with_param(cfg, param, *v);
                point.sweep_param = cfg.sweep_param.clone();
                point
            }))
            .collect(),
        _ => vec![(None, cfg.clone())],
    };

    let eps = options.eps;
    let work = |(value, point): &(Option<f64>, RunConfig)| run_point(point, *value, &dir, eps);
    let rows: Result<Vec<SummaryRow>> = match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                points.par_iter().map(work).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            points.par_iter().map(work).collect()
        }
    };
    let rows = rows?;

    let summary_file = dir.join("summary.csv");
    fs::write(&summary_file, summary_csv(&rows))?;
    Ok(RunSummary { rows, summary_file })
}

/// Parses a configuration from a JSON document (strict keys).
pub fn parse_config(json: &str) -> Result<RunConfig> {
    serde_json::from_str(json).map_err(|e| Error::ConfigError {
        field: "<config>".into(),
        message: e.to_string(),
    })
}

/// Loads a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_gamma_is_an_error_naming_the_field() {
        let mut cfg = preset("fig1").unwrap();
        cfg.gamma1 = -1.0;
        let issues = validate(&cfg);
        assert!(issues
            .iter()
            .any(|i| i.field == "gamma1" && i.severity == Severity::Error));
    }

    #[test]
    fn unequal_baths_with_coupling_is_a_warning() {
        let mut cfg = preset("fig2").unwrap();
        cfg.gamma2 = 2.9;
        let issues = validate(&cfg);
        assert!(issues
            .iter()
            .any(|i| i.severity == Severity::Warning && i.field == "allow_unequal_baths"));
        cfg.allow_unequal_baths = true;
        assert!(validate(&cfg).is_empty());
    }

    #[test]
    fn valid_presets_produce_empty_reports() {
        for name in ["fig1", "fig2", "fig3", "fig4"] {
            assert!(validate(&preset(name).unwrap()).is_empty(), "{name}");
        }
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let json = r#"{
            "mode": "free", "s": 1.0, "d": 1.0, "m": 1.0,
            "gamma1": 1.0, "gamma2": 1.0, "T1": 1.0, "T2": 1.0,
            "omega0": 0.0, "hbar": 1.0, "k": 1.0,
            "t_end": 10.0, "n_points": 100,
            "typo_field": 3.0
        }"#;
        assert!(parse_config(json).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = preset("fig3").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back = parse_config(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn free_mode_with_omega0_sweep_is_an_error() {
        let mut cfg = preset("fig1").unwrap();
        cfg.sweep_param = Some("omega0".into());
        cfg.sweep_values = Some(vec![0.0, 1.0]);
        let issues = validate(&cfg);
        assert!(issues.iter().any(|i| i.field == "omega0"));
    }

    #[test]
    fn sweep_param_requires_values() {
        let mut cfg = preset("fig1").unwrap();
        cfg.sweep_values = None;
        let issues = validate(&cfg);
        assert!(issues.iter().any(|i| i.field == "sweep_values"));
    }
}
