//! Run reports: norms of the solution, energy audits, confinement and
//! solver telemetry, serialised to JSON with stable keys or to a flat CSV.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::audit::{confinement, ene2_audit, ene3_audit, energy_balance, enerpr_residual, Confinement, EnergyBalance};
use super::norms::{periodic_integral, periodic_norm, Region};
use crate::error::Result;
use crate::galerkin::{periodic_g_r, DataNorms, FourierSolution, GalerkinProblem, SolveOutcome};
use crate::hysteresis::periodic_operator_response;
use crate::spectral::{synthesize, synthesize_at, synthesize_dx};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Es1Norms {
    pub u_t: f64,
    pub p_x: f64,
    pub p_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Es2Norms {
    /// `‖u_tt‖²`
    pub u_tt_sq: f64,
    /// `‖p_t‖₃³`
    pub p_t_cube: f64,
    /// `‖p_xt‖²`
    pub p_xt_sq: f64,
    /// `‖p_t‖²_γ`
    pub p_t_gamma_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Norms {
    pub es1: Es1Norms,
    pub es2: Es2Norms,
    /// `‖u_xt‖`
    pub es3: f64,
    /// `∫ (∫ |(G_R)_t|² dx)^{3/2} dt`
    pub es4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Ene2Summary {
    pub min_slack: f64,
    pub min_margin: f64,
    pub max_epsilon: f64,
    pub holds: bool,
    /// Annotation only: the audit runs on `G_R` either way.
    pub confined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Ene3Summary {
    /// `∫∫ (G_R)_t p dx dt`
    pub value: f64,
    pub min_slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyReport {
    pub ene2: Ene2Summary,
    pub ene3: Ene3Summary,
    /// Largest integrated residual of the Preisach energy identity.
    pub enerpr: f64,
    pub es1_balance: EnergyBalance,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverSummary {
    pub converged: bool,
    pub residual_final: f64,
    pub iterations: usize,
    pub tolerance: f64,
    pub alphas: Vec<f64>,
    pub residual_history: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub delta: f64,
    pub data_norms: DataNorms,
    pub norms: Norms,
    pub energy: EnergyReport,
    pub confinement: Confinement,
    pub solver: SolverSummary,
    /// `‖U(δ)‖ / ‖U(δ/2)‖` when a paired run exists.
    pub linear_response_ratio: Option<f64>,
    /// Effective configuration of the run.
    pub config: Option<Value>,
}

fn es4(g_r: &DMatrix<f64>, weights: &[f64], dt: f64) -> f64 {
    let n_t = g_r.nrows();
    let mut total = 0.0;
    for n in 0..n_t {
        let next = (n + 1) % n_t;
        let inner: f64 = weights
            .iter()
            .enumerate()
            .map(|(q, w)| w * ((g_r[(next, q)] - g_r[(n, q)]) / dt).powi(2))
            .sum();
        total += inner.powf(1.5);
    }
    total * dt
}

/// Norms of the estimates for a solution and the `G_R` samples at the
/// quadrature nodes.
pub fn solution_norms(problem: &GalerkinProblem, sol: &FourierSolution, g_r: &DMatrix<f64>) -> Result<Norms> {
    let (basis, modes) = (&problem.disc.basis, &problem.disc.modes);
    let dt = modes.dt();
    let bulk = Region::Bulk(basis.weights());
    let boundary = Region::Boundary(problem.data.gamma);
    let ends = [0.0, basis.length()];
    let u_t = sol.u.time_derivative();
    let p_t = sol.p.time_derivative();
    Ok(Norms {
        es1: Es1Norms {
            u_t: periodic_norm(&synthesize(&u_t, basis, modes)?, 2.0, bulk, dt)?,
            p_x: periodic_norm(&synthesize_dx(&sol.p, basis, modes)?, 2.0, bulk, dt)?,
            p_gamma: periodic_norm(&synthesize_at(&sol.p, basis, modes, &ends)?, 2.0, boundary, dt)?,
        },
        es2: Es2Norms {
            u_tt_sq: periodic_integral(&synthesize(&u_t.time_derivative(), basis, modes)?, 2.0, bulk, dt)?,
            p_t_cube: periodic_integral(&synthesize(&p_t, basis, modes)?, 3.0, bulk, dt)?,
            p_xt_sq: periodic_integral(&synthesize_dx(&p_t, basis, modes)?, 2.0, bulk, dt)?,
            p_t_gamma_sq: periodic_integral(&synthesize_at(&p_t, basis, modes, &ends)?, 2.0, boundary, dt)?,
        },
        es3: periodic_norm(&synthesize_dx(&u_t, basis, modes)?, 2.0, bulk, dt)?,
        es4: es4(g_r, basis.weights(), dt),
    })
}

/// Assemble the full report of a solver outcome.
pub fn estimate_suite(problem: &GalerkinProblem, outcome: &SolveOutcome) -> Result<DiagnosticsReport> {
    let exec = problem.exec;
    let (basis, modes) = (&problem.disc.basis, &problem.disc.modes);
    let sol = &outcome.solution;
    let p = synthesize(&sol.p, basis, modes)?;
    let g_r = match &outcome.hysteresis {
        Some(h) => h.g_r.clone(),
        None => periodic_g_r(&p, &problem.density, &problem.evaluator, exec)?.0,
    };
    let w = basis.weights();
    let ene2 = ene2_audit(&p, w, &problem.density, &problem.evaluator, exec)?;
    let ene3 = ene3_audit(&p, w, &problem.density, &problem.evaluator, exec)?;
    let tel = &outcome.telemetry;
    let data_norms = problem.data.norms(&problem.disc)?;
    Ok(DiagnosticsReport {
        delta: data_norms.delta,
        data_norms,
        norms: solution_norms(problem, sol, &g_r)?,
        energy: EnergyReport {
            ene2: Ene2Summary {
                min_slack: ene2.min_slack,
                min_margin: ene2.min_margin,
                max_epsilon: ene2.nodes.iter().map(|s| s.epsilon).fold(0.0, f64::max),
                holds: ene2.holds,
                confined: ene2.confined,
            },
            ene3: Ene3Summary {
                value: ene3.value,
                min_slack: ene3.min_slack,
                holds: ene3.holds,
            },
            enerpr: enerpr_residual(&p, &problem.density, &problem.evaluator, exec)?,
            es1_balance: energy_balance(problem, sol)?,
        },
        confinement: confinement(problem, sol, Some(&g_r), exec)?,
        solver: SolverSummary {
            converged: outcome.converged(),
            residual_final: tel.residual_final,
            iterations: tel.iterations,
            tolerance: tel.tolerance,
            alphas: tel.steps.iter().map(|s| s.alpha).collect(),
            residual_history: tel.steps.iter().map(|s| s.residuals.clone()).collect(),
        },
        linear_response_ratio: None,
        config: None,
    })
}

/// `‖U(δ)‖ / ‖U(δ/2)‖`, or `None` when the reference solution vanishes.
pub fn linear_response_ratio(full: &FourierSolution, half: &FourierSolution) -> Option<f64> {
    let d = half.norm();
    (d > 0.0).then(|| full.norm() / d)
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                if prefix.is_empty() && k == "config" {
                    continue;
                }
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&key, child, out);
            }
        }
        // histories do not fit a single row
        Value::Array(_) => {}
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

impl DiagnosticsReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Config(e.to_string()))
    }

    /// Scalar entries as `(dotted key, value)` pairs in a fixed order.
    pub fn flatten(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let v = serde_json::to_value(self).expect("report serialises");
        flatten_into("", &v, &mut out);
        out
    }

    /// Header and one data row.
    pub fn to_csv(&self) -> String {
        let flat = self.flatten();
        let header: Vec<&str> = flat.iter().map(|(k, _)| k.as_str()).collect();
        let row: Vec<&str> = flat.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn table(&self) -> String {
        let flat = self.flatten();
        let width = flat.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in flat {
            let _ = writeln!(s, "{k:<width$}  {v}");
        }
        s
    }
}

/// Time series `t, x, u, u_t, p, p_t, g_R` at each probe point.
pub fn probe_rows(problem: &GalerkinProblem, sol: &FourierSolution, xs: &[f64]) -> Result<Vec<[f64; 7]>> {
    let (basis, modes) = (&problem.disc.basis, &problem.disc.modes);
    let u = synthesize_at(&sol.u, basis, modes, xs)?;
    let u_t = synthesize_at(&sol.u.time_derivative(), basis, modes, xs)?;
    let p = synthesize_at(&sol.p, basis, modes, xs)?;
    let p_t = synthesize_at(&sol.p.time_derivative(), basis, modes, xs)?;
    let conv = problem.density.convexified()?;
    let mut rows = Vec::with_capacity(xs.len() * modes.samples());
    for (i, &x) in xs.iter().enumerate() {
        let series: Vec<f64> = p.column(i).iter().copied().collect();
        let (g, _) = periodic_operator_response(&conv, &series, &problem.evaluator)?;
        for n in 0..modes.samples() {
            rows.push([modes.time(n), x, u[(n, i)], u_t[(n, i)], p[(n, i)], p_t[(n, i)], g[n]]);
        }
    }
    Ok(rows)
}

pub fn probe_csv(rows: &[[f64; 7]]) -> String {
    let mut s = String::from("t,x,u,u_t,p,p_t,g_R\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
