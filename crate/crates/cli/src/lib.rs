//! Scenario runner behind the `hystwave` binary.
//!
//! Exit codes: 0 when the solver converged and `p` stayed in `[-R, R]`
//! with `G = G_R`, 2 when the solver failed or confinement was lost
//! (artifacts are still written when a solution exists), 1 for unusable
//! configurations.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hystwave::diagnostics::{estimate_suite, probe_csv, probe_rows, DiagnosticsReport};
use hystwave::galerkin::{continuation_solve, GalerkinProblem, SolveOutcome};
use hystwave::Exec;
use serde::Serialize;

pub use config::{ConfigError, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_REGIME: i32 = 2;

/// A configuration turned into a ready-to-solve problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub problem: GalerkinProblem,
}

impl Scenario {
    pub fn build(config: ScenarioConfig, exec: Exec) -> Result<Self, ConfigError> {
        config.validate_solver()?;
        let density = config.density()?;
        let evaluator = config.evaluator()?;
        let disc = config.discretization()?;
        for (i, &x) in config.output.probes.iter().enumerate() {
            if !(0.0..=disc.basis.length()).contains(&x) {
                return Err(ConfigError::Field {
                    field: format!("output.probes[{i}]"),
                    message: format!("{x} outside [0, {}]", disc.basis.length()),
                });
            }
        }
        let data = config.problem_data(&disc)?;
        let mut problem = GalerkinProblem::new(disc, data, density).map_err(|e| ConfigError::Field {
            field: "data".into(),
            message: e.to_string(),
        })?;
        problem.evaluator = evaluator;
        Ok(Self {
            config,
            problem: problem.with_exec(exec),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: SolveOutcome,
    pub report: DiagnosticsReport,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        if self.report.solver.converged && self.report.confinement.coincides {
            EXIT_OK
        } else {
            EXIT_REGIME
        }
    }
}

/// Solve and build the report. Errors here are numerical failures other
/// than stagnation, such as a memory that does not become periodic.
pub fn solve(scenario: &Scenario) -> hystwave::Result<RunResult> {
    let outcome = continuation_solve(&scenario.problem, &scenario.config.solver)?;
    let mut report = estimate_suite(&scenario.problem, &outcome)?;
    report.config = Some(scenario.config.to_json());
    Ok(RunResult { outcome, report })
}

/// Write the report (JSON, CSV), the effective configuration and the
/// probe series into `dir`.
pub fn write_artifacts(scenario: &Scenario, result: &RunResult, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let out = &scenario.config.output;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> anyhow::Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    if out.json {
        put(format!("{}.json", out.name), result.report.to_json()?)?;
    }
    if out.csv {
        put(format!("{}.csv", out.name), result.report.to_csv())?;
    }
    put(format!("{}.config.toml", out.name), scenario.config.to_toml())?;
    if !out.probes.is_empty() {
        let rows = probe_rows(&scenario.problem, &result.outcome.solution, &out.probes)?;
        put(format!("{}.probes.csv", out.name), probe_csv(&rows))?;
    }
    Ok(written)
}

pub fn default_exec() -> Exec {
    if cfg!(feature = "parallel") {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

/// The `run` verb.
pub fn run_command(config_path: &Path, out_dir: Option<&Path>, exec: Exec) -> i32 {
    let scenario = match ScenarioConfig::load(config_path).and_then(|c| Scenario::build(c, exec)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match solve(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solver error: {e}");
            return EXIT_REGIME;
        }
    };
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| scenario.config.output.dir.clone());
    if let Err(e) = write_artifacts(&scenario, &result, &dir) {
        eprintln!("error: {e:#}");
        return EXIT_CONFIG;
    }
    print!("{}", result.report.table());
    if let Some(err) = &result.outcome.failure {
        eprintln!("not converged: {err}");
    } else if !result.report.confinement.coincides {
        eprintln!(
            "confinement lost: max|p| = {} against R = {}",
            result.report.confinement.max_abs_p, result.report.confinement.radius
        );
    }
    result.exit_code()
}

/// The `validate` verb: density and basis checks only.
pub fn validate_command(config_path: &Path) -> i32 {
    let checked = ScenarioConfig::load(config_path).and_then(|c| {
        c.validate_solver()?;
        let d = c.density()?;
        c.evaluator()?;
        c.discretization()?;
        Ok(d)
    });
    match checked {
        Ok(d) => {
            let constants = d.constants.expect("validated density carries constants");
            println!("{}", serde_json::to_string_pretty(&constants).expect("constants serialise"));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Rescale the data so that the recomputed `δ` equals each value.
    Delta,
    /// Set `data.amplitude` to each value.
    Amplitude,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(Self::Delta),
            "amplitude" => Ok(Self::Amplitude),
            other => Err(format!("unknown sweep parameter {other:?} (expected delta or amplitude)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub delta: f64,
    pub converged: bool,
    pub confined: bool,
    pub solution_norm: f64,
    pub error: Option<String>,
    pub report: Option<DiagnosticsReport>,
}

impl SweepRow {
    pub fn admissible(&self) -> bool {
        self.converged && self.confined
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Largest swept `δ` with convergence and confinement.
    pub delta_star: Option<f64>,
}

/// Run one scenario per value. Failures are recorded per row.
pub fn sweep(base: &ScenarioConfig, param: SweepParam, values: &[f64], exec: Exec) -> Result<SweepResult, ConfigError> {
    // the base configuration must be usable before any row runs
    let base_scenario = Scenario::build(base.clone(), exec)?;
    let unit_delta = {
        let mut unit = base.clone();
        unit.data.amplitude = 1.0;
        unit.data.declared_delta = None;
        let disc = &base_scenario.problem.disc;
        unit.problem_data(disc)?.norms(disc).map_err(|e| ConfigError::Field {
            field: "data".into(),
            message: e.to_string(),
        })?
        .delta
    };
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = base.clone();
        cfg.data.declared_delta = None;
        let amplitude = match param {
            SweepParam::Amplitude => Some(value),
            SweepParam::Delta if value == 0.0 => Some(0.0),
            SweepParam::Delta if unit_delta > 0.0 => Some(value / unit_delta),
            SweepParam::Delta => None,
        };
        let mut row = SweepRow {
            value,
            delta: f64::NAN,
            converged: false,
            confined: false,
            solution_norm: f64::NAN,
            error: None,
            report: None,
        };
        let Some(amplitude) = amplitude else {
            row.error = Some("the data vanish, delta cannot be rescaled".into());
            rows.push(row);
            continue;
        };
        cfg.data.amplitude = amplitude;
        match Scenario::build(cfg, exec).map_err(|e| e.to_string()).and_then(|s| solve(&s).map_err(|e| e.to_string())) {
            Ok(result) => {
                row.delta = result.report.delta;
                row.converged = result.report.solver.converged;
                row.confined = result.report.confinement.coincides;
                row.solution_norm = result.outcome.solution.norm();
                row.error = result.outcome.failure.as_ref().map(|e| e.to_string());
                row.report = Some(result.report);
            }
            Err(e) => row.error = Some(e),
        }
        rows.push(row);
    }
    // pair each δ with δ/2 when both converged
    let norms: Vec<(f64, f64, bool)> = rows.iter().map(|r| (r.value, r.solution_norm, r.converged)).collect();
    for row in rows.iter_mut().filter(|r| r.converged) {
        let half = norms
            .iter()
            .find(|(v, _, ok)| *ok && (2.0 * v - row.value).abs() <= 1e-12 * row.value.abs());
        if let (Some(&(_, n_half, _)), Some(report)) = (half, row.report.as_mut()) {
            if n_half > 0.0 {
                report.linear_response_ratio = Some(row.solution_norm / n_half);
            }
        }
    }
    let delta_star = rows
        .iter()
        .filter(|r| r.admissible())
        .map(|r| r.delta)
        .fold(None, |a: Option<f64>, d| Some(a.map_or(d, |a| a.max(d))));
    Ok(SweepResult { rows, delta_star })
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SweepResult {
    /// One row per value, with the flattened report columns.
    pub fn to_csv(&self) -> String {
        let keys: Vec<String> = self
            .rows
            .iter()
            .find_map(|r| r.report.as_ref())
            .map(|r| r.flatten().into_iter().map(|(k, _)| k).collect())
            .unwrap_or_default();
        let mut header = vec![
            "value".to_string(),
            "delta".into(),
            "converged".into(),
            "confined".into(),
            "delta_star".into(),
            "error".into(),
        ];
        header.extend(keys.iter().cloned());
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![
                r.value.to_string(),
                r.delta.to_string(),
                r.converged.to_string(),
                r.confined.to_string(),
                (r.admissible() && Some(r.delta) == self.delta_star).to_string(),
                csv_cell(r.error.as_deref().unwrap_or("")),
            ];
            match &r.report {
                Some(rep) => {
                    let flat = rep.flatten();
                    cells.extend(keys.iter().map(|k| {
                        flat.iter()
                            .find(|(fk, _)| fk == k)
                            .map(|(_, v)| csv_cell(v))
                            .unwrap_or_default()
                    }));
                }
                None => cells.extend(keys.iter().map(|_| String::new())),
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// The `sweep` verb.
pub fn sweep_command(config_path: &Path, param: SweepParam, values: &[f64], out_dir: Option<&Path>, exec: Exec) -> i32 {
    let base = match ScenarioConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match sweep(&base, param, values, exec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| base.output.dir.clone());
    let path = dir.join(format!("{}.sweep.csv", base.output.name));
    let written = fs::create_dir_all(&dir).and_then(|_| fs::write(&path, result.to_csv()));
    if let Err(e) = written {
        eprintln!("error: writing {}: {e}", path.display());
        return EXIT_CONFIG;
    }
    for r in &result.rows {
        println!(
            "value {:<12} delta {:<24} converged {:<5} confined {:<5} {}",
            r.value,
            r.delta,
            r.converged,
            r.confined,
            r.error.as_deref().unwrap_or("")
        );
    }
    match result.delta_star {
        Some(d) => println!("empirical delta* = {d}"),
        None => println!("empirical delta*: no admissible value"),
    }
    EXIT_OK
}
