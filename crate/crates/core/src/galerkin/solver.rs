//! α-continuation with a damped, lagged-hysteresis fixed-point iteration.
//!
//! For each `α` of the schedule the iteration is
//! `U ← (1 - θ) U + θ L_α⁻¹ (D_α - α H(U))`, with `θ` halved whenever the
//! residual grows. The memory of every spatial node restarts from the
//! virgin state at each evaluation of `H`.

use serde::{Deserialize, Serialize};

use super::problem::{FourierSolution, GalerkinProblem};
use super::projection::{hysteresis_projection, HysteresisProjection};
use super::residual::{combine, data_vector, LinearBlocks, ResidualVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Increasing continuation values ending at 1.
    pub alpha_schedule: Vec<f64>,
    /// Initial damping factor θ.
    pub damping: f64,
    /// Lower bound for θ after repeated halving.
    pub min_damping: f64,
    /// Converged when `‖T_α(U)‖ <= tol_res · δ`.
    pub tol_res: f64,
    /// Iteration cap per α step.
    pub max_iterations: usize,
    /// Stagnation window and required relative reduction over it.
    pub stagnation_window: usize,
    pub min_reduction: f64,
    /// How many times a failed α step may be bisected.
    pub max_refinements: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            alpha_schedule: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            damping: 0.5,
            min_damping: 1.0 / 64.0,
            tol_res: 1e-8,
            max_iterations: 400,
            stagnation_window: 50,
            min_reduction: 0.01,
            max_refinements: 3,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let s = &self.alpha_schedule;
        let bad = |msg: String| Err(Error::Config(msg));
        if s.is_empty() || s.last() != Some(&1.0) {
            return bad("alpha_schedule must end at 1".into());
        }
        if s.iter().any(|a| !(0.0..=1.0).contains(a)) || s.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("alpha_schedule {s:?} must increase within [0, 1]"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping {} must lie in (0, 1]", self.damping));
        }
        if !(self.min_damping > 0.0 && self.min_damping <= self.damping) {
            return bad(format!("min_damping {} must lie in (0, damping]", self.min_damping));
        }
        if !(self.tol_res > 0.0) {
            return bad(format!("tol_res {} must be positive", self.tol_res));
        }
        if self.max_iterations == 0 || self.stagnation_window == 0 {
            return bad("max_iterations and stagnation_window must be positive".into());
        }
        Ok(())
    }
}

/// Iteration record of one α step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaStep {
    pub alpha: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm before each update, and after the last one.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTelemetry {
    pub steps: Vec<AlphaStep>,
    /// Total iterations over all α steps.
    pub iterations: usize,
    pub residual_final: f64,
    /// Absolute tolerance `tol_res · δ` used for the stopping test.
    pub tolerance: f64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// The converged α = 1 solution, or the last iterate on failure.
    pub solution: FourierSolution,
    pub telemetry: SolverTelemetry,
    /// Hysteresis projection at the returned solution.
    pub hysteresis: Option<HysteresisProjection>,
    /// Set when the iteration stagnated.
    pub failure: Option<Error>,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match &self.failure {
            Some(e) => Err(e.clone()),
            None => Ok(self),
        }
    }
}

struct StepResult {
    solution: FourierSolution,
    hysteresis: Option<HysteresisProjection>,
    record: AlphaStep,
    failure: Option<Error>,
}

fn evaluate(
    problem: &GalerkinProblem,
    linear: &LinearBlocks,
    data: &ResidualVector,
    sol: &FourierSolution,
) -> Result<(ResidualVector, Option<HysteresisProjection>)> {
    if linear.alpha() == 0.0 {
        return Ok((combine(linear, data, None, sol)?, None));
    }
    let h = hysteresis_projection(&sol.p, &problem.disc, &problem.density, &problem.evaluator, problem.exec)?;
    Ok((combine(linear, data, Some(&h.coeffs), sol)?, Some(h)))
}

fn solve_step(
    problem: &GalerkinProblem,
    settings: &SolverSettings,
    alpha: f64,
    start: &FourierSolution,
    tolerance: f64,
) -> Result<StepResult> {
    let linear = LinearBlocks::new(problem, alpha);
    let data = data_vector(problem, alpha);
    let mut record = AlphaStep {
        alpha,
        iterations: 0,
        converged: false,
        residuals: Vec::new(),
    };
    let mut sol = start.clone();
    let mut theta = settings.damping;
    let mut best: Option<(f64, FourierSolution, Option<HysteresisProjection>)> = None;
    loop {
        let (res, hyst) = evaluate(problem, &linear, &data, &sol)?;
        let r = res.norm();
        record.residuals.push(r);
        if r <= tolerance {
            record.converged = true;
            return Ok(StepResult {
                solution: sol,
                hysteresis: hyst,
                record,
                failure: None,
            });
        }
        let n = record.residuals.len();
        let window = settings.stagnation_window;
        let stagnated = n > window && r > (1.0 - settings.min_reduction) * record.residuals[n - 1 - window];
        if stagnated || record.iterations >= settings.max_iterations || !r.is_finite() {
            let failure = Error::NonConvergence {
                alpha,
                iterations: record.iterations,
                residual: r,
                history: record.residuals.clone(),
            };
            let (_, sol, hyst) = best.unwrap_or((r, sol, hyst));
            return Ok(StepResult {
                solution: sol,
                hysteresis: hyst,
                record,
                failure: Some(failure),
            });
        }
        if n >= 2 && r > record.residuals[n - 2] {
            theta = (0.5 * theta).max(settings.min_damping);
        }
        // rhs = D_α - α H(U) = L_α U - T_α(U)
        let mut rhs = linear.apply(&sol);
        rhs.v = rhs.v.axpy(-1.0, &res.v)?;
        rhs.w = rhs.w.axpy(-1.0, &res.w)?;
        let target = linear.solve(&rhs, problem.exec)?;
        let next = sol.blend(theta, &target)?;
        if best.as_ref().is_none_or(|(b, _, _)| r < *b) {
            best = Some((r, sol, hyst));
        }
        sol = next;
        record.iterations += 1;
        if alpha == 0.0 {
            // the system is linear: one exact solve
            theta = 1.0;
        }
    }
}

/// Solve `T_1(U) = 0` by continuation in α from the linear problem.
///
/// Failures of an intermediate α step are retried after inserting the
/// midpoint between the last converged α and the failed one. When the
/// retries are exhausted the outcome carries the best iterate, the
/// telemetry and a [`Error::NonConvergence`].
pub fn continuation_solve(problem: &GalerkinProblem, settings: &SolverSettings) -> Result<SolveOutcome> {
    settings.validate()?;
    let delta = problem.data.norms(&problem.disc)?.delta;
    let tolerance = settings.tol_res * delta;
    let mut pending: Vec<f64> = settings.alpha_schedule.iter().rev().copied().collect();
    let mut current = FourierSolution::zeros(problem.m());
    let mut last_alpha: Option<f64> = None;
    let mut refinements = 0;
    let mut steps = Vec::new();
    let mut hysteresis = None;
    while let Some(alpha) = pending.pop() {
        let step = solve_step(problem, settings, alpha, &current, tolerance)?;
        steps.push(step.record.clone());
        match step.failure {
            None => {
                current = step.solution;
                hysteresis = step.hysteresis;
                last_alpha = Some(alpha);
            }
            Some(err) => {
                let lo = last_alpha.unwrap_or(0.0);
                if refinements < settings.max_refinements && last_alpha.is_some() && alpha - lo > 1e-3 {
                    refinements += 1;
                    pending.push(alpha);
                    pending.push(0.5 * (lo + alpha));
                    continue;
                }
                let residual_final = step.record.residuals.last().copied().unwrap_or(f64::NAN);
                return Ok(SolveOutcome {
                    solution: step.solution,
                    telemetry: SolverTelemetry {
                        iterations: steps.iter().map(|s| s.iterations).sum(),
                        steps,
                        residual_final,
                        tolerance,
                        delta,
                    },
                    hysteresis: step.hysteresis,
                    failure: Some(err),
                });
            }
        }
    }
    let residual_final = steps.last().and_then(|s| s.residuals.last().copied()).unwrap_or(0.0);
    Ok(SolveOutcome {
        solution: current,
        telemetry: SolverTelemetry {
            iterations: steps.iter().map(|s| s.iterations).sum(),
            steps,
            residual_final,
            tolerance,
            delta,
        },
        hysteresis,
        failure: None,
    })
}
