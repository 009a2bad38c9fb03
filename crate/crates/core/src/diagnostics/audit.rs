//! Energy audits of a periodic state: the second-order inequality and the
//! positivity of `∫ (G_R)_t p`, the energy balance of the Galerkin system,
//! the Preisach energy identity and the confinement of `p` to `[-R, R]`.
//!
//! Inequality audits calibrate their own tolerance: each quantity is
//! evaluated on the given grid of `N` samples and on the spectrally
//! refined grid of `2N` samples, and the difference is the grid error.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::diagnostics::norms::{periodic_integral, Region};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::galerkin::{FourierSolution, GalerkinProblem};
use crate::hysteresis::{
    periodic_operator_response, preisach_energy_residuals, preisach_trajectory, InnerMoments,
    MemoryState, PreisachDensity, PreisachEvaluator,
};
use crate::spectral::{
    spectral_derivative, spectral_resample, synthesize, synthesize_at, synthesize_dx, turning_points,
};

/// Relative round-off floor added to every measured grid error.
pub const ROUND_OFF: f64 = 1e-11;

/// One side-by-side evaluation of an inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InequalitySlack {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs` on the refined grid.
    pub slack: f64,
    /// Measured grid error of the slack.
    pub epsilon: f64,
}

impl InequalitySlack {
    pub fn holds(&self) -> bool {
        self.slack >= -self.epsilon
    }

    fn calibrated(coarse: (f64, f64), fine: (f64, f64)) -> Self {
        let (lhs, rhs) = fine;
        let slack = lhs - rhs;
        let scale = lhs.abs() + rhs.abs() + coarse.0.abs() + coarse.1.abs();
        Self {
            lhs,
            rhs,
            slack,
            epsilon: (slack - (coarse.0 - coarse.1)).abs() + ROUND_OFF * scale,
        }
    }
}

/// Periodic `G` at the samples of `p`, with the memory also fed the exact
/// turning points of the interpolant between samples.
fn resolved_response<D: InnerMoments + ?Sized>(density: &D, p: &[f64], evaluator: &PreisachEvaluator) -> Vec<f64> {
    let dt = std::f64::consts::TAU / p.len() as f64;
    let turns = turning_points(p);
    // (value, recorded) over one period
    let mut seq = Vec::with_capacity(p.len() + turns.len());
    let mut next = turns.iter().peekable();
    for (n, &v) in p.iter().enumerate() {
        seq.push((v, true));
        while let Some(&&(t, tv)) = next.peek() {
            if t >= (n + 1) as f64 * dt {
                break;
            }
            seq.push((tv, false));
            next.next();
        }
    }
    let mut memory = MemoryState::virgin();
    for &(v, _) in &seq {
        memory.update(v);
    }
    let mut g = Vec::with_capacity(p.len());
    for &(v, recorded) in &seq {
        memory.update(v);
        if recorded {
            g.push(evaluator.g(density, &memory));
        }
    }
    g
}

fn trapezoid(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() * std::f64::consts::TAU / n as f64
}

fn ene2_sides<D: InnerMoments + ?Sized>(
    density: &D,
    k_r: f64,
    p: &[f64],
    evaluator: &PreisachEvaluator,
) -> Result<(f64, f64)> {
    let g = resolved_response(density, p, evaluator);
    let p_t = spectral_derivative(p, 1);
    let p_ttt = spectral_derivative(p, 3);
    // -∫ (G_R)_t p_tt = ∫ G_R p_ttt over a period
    let lhs = trapezoid(g.iter().zip(&p_ttt).map(|(g, d)| g * d), p.len());
    let rhs = 0.5 * k_r * trapezoid(p_t.iter().map(|v| v.abs().powi(3)), p.len());
    Ok((lhs, rhs))
}

/// `-∫ (G_R[p])_t p_tt dt >= (K_R / 2) ∫ |p_t|³ dt` for one period of
/// samples of `p`.
pub fn ene2_series(density: &PreisachDensity, p: &[f64], evaluator: &PreisachEvaluator) -> Result<InequalitySlack> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k_r = density.constants()?.k_r;
    let conv = density.convexified()?;
    let coarse = ene2_sides(&conv, k_r, p, evaluator)?;
    let fine = ene2_sides(&conv, k_r, &spectral_resample(p, 2 * p.len()), evaluator)?;
    Ok(InequalitySlack::calibrated(coarse, fine))
}

fn ene3_sides<D: InnerMoments + ?Sized>(density: &D, p: &[f64], evaluator: &PreisachEvaluator) -> Result<f64> {
    let g = resolved_response(density, p, evaluator);
    let p_t = spectral_derivative(p, 1);
    Ok(-trapezoid(g.iter().zip(&p_t).map(|(g, d)| g * d), p.len()))
}

/// `∫ (G_R[p])_t p dt >= 0` for one period of samples of `p`.
pub fn ene3_series(density: &PreisachDensity, p: &[f64], evaluator: &PreisachEvaluator) -> Result<InequalitySlack> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    let conv = density.convexified()?;
    let coarse = ene3_sides(&conv, p, evaluator)?;
    let fine = ene3_sides(&conv, &spectral_resample(p, 2 * p.len()), evaluator)?;
    Ok(InequalitySlack::calibrated((coarse, 0.0), (fine, 0.0)))
}

/// Per-node audit of an inequality over a whole field.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldAudit {
    pub nodes: Vec<InequalitySlack>,
    pub min_slack: f64,
    /// Smallest `slack + epsilon`; nonnegative when the audit holds.
    pub min_margin: f64,
    /// Quadrature of the left-hand side over `Ω`.
    pub value: f64,
    pub holds: bool,
    /// `false` when `p` leaves `[-R, R]`; the audit still runs on `G_R`.
    pub confined: bool,
}

fn field_audit<F>(p: &DMatrix<f64>, weights: &[f64], radius: f64, exec: Exec, f: F) -> Result<FieldAudit>
where
    F: Fn(&[f64]) -> Result<InequalitySlack> + Sync + Send,
{
    let nodes = exec.try_map(p.ncols(), |q| {
        let series: Vec<f64> = p.column(q).iter().copied().collect();
        f(&series)
    })?;
    let min_slack = nodes.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min);
    let min_margin = nodes.iter().map(|s| s.slack + s.epsilon).fold(f64::INFINITY, f64::min);
    let value = nodes.iter().zip(weights).map(|(s, w)| w * s.lhs).sum();
    Ok(FieldAudit {
        holds: nodes.iter().all(InequalitySlack::holds),
        min_slack: if nodes.is_empty() { 0.0 } else { min_slack },
        min_margin: if nodes.is_empty() { 0.0 } else { min_margin },
        value,
        confined: p.amax() <= radius,
        nodes,
    })
}

/// Second-order inequality at every column of `p[(n, q)]`.
pub fn ene2_audit(
    p: &DMatrix<f64>,
    weights: &[f64],
    density: &PreisachDensity,
    evaluator: &PreisachEvaluator,
    exec: Exec,
) -> Result<FieldAudit> {
    density.constants()?;
    field_audit(p, weights, density.radius, exec, |s| ene2_series(density, s, evaluator))
}

/// Positivity of `∫ (G_R)_t p` at every column of `p[(n, q)]`.
pub fn ene3_audit(
    p: &DMatrix<f64>,
    weights: &[f64],
    density: &PreisachDensity,
    evaluator: &PreisachEvaluator,
    exec: Exec,
) -> Result<FieldAudit> {
    density.constants()?;
    field_audit(p, weights, density.radius, exec, |s| ene3_series(density, s, evaluator))
}

/// Energy pairing of the Galerkin system with `(u_t, p)`:
/// `‖u_t‖² + ‖p_x‖² + ‖p‖²_γ <= ∫∫ f u_t + ∫∫ h p + Σ_b γ_b ∫ p*_b p(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBalance {
    pub energy: f64,
    pub pairing: f64,
    /// `pairing - energy`.
    pub slack: f64,
}

fn pair(a: &DMatrix<f64>, b: &DMatrix<f64>, weights: &[f64], dt: f64) -> f64 {
    let mut s = 0.0;
    for n in 0..a.nrows() {
        for (q, w) in weights.iter().enumerate() {
            s += w * a[(n, q)] * b[(n, q)];
        }
    }
    s * dt
}

pub fn energy_balance(problem: &GalerkinProblem, sol: &FourierSolution) -> Result<EnergyBalance> {
    let (basis, modes) = (&problem.disc.basis, &problem.disc.modes);
    let dt = modes.dt();
    let w = basis.weights();
    let gamma = problem.data.gamma;
    let u_t = synthesize(&sol.u.time_derivative(), basis, modes)?;
    let p = synthesize(&sol.p, basis, modes)?;
    let p_x = synthesize_dx(&sol.p, basis, modes)?;
    let p_b = synthesize_at(&sol.p, basis, modes, &[0.0, basis.length()])?;
    let energy = periodic_integral(&u_t, 2.0, Region::Bulk(w), dt)?
        + periodic_integral(&p_x, 2.0, Region::Bulk(w), dt)?
        + periodic_integral(&p_b, 2.0, Region::Boundary(gamma), dt)?;
    let f = synthesize(&problem.data.f, basis, modes)?;
    let h = synthesize(&problem.data.h, basis, modes)?;
    let p_star = problem.data.p_star_samples(modes);
    let pairing = pair(&f, &u_t, w, dt) + pair(&h, &p, w, dt) + pair(&p_star, &p_b, &gamma, dt);
    Ok(EnergyBalance {
        energy,
        pairing,
        slack: pairing - energy,
    })
}

/// Largest integrated absolute residual of the Preisach energy identity
/// over the nodes, on the second of two periods run from the virgin state.
pub fn enerpr_residual(
    p: &DMatrix<f64>,
    density: &PreisachDensity,
    evaluator: &PreisachEvaluator,
    exec: Exec,
) -> Result<f64> {
    let n = p.nrows();
    let per_node = exec.try_map(p.ncols(), |q| {
        let mut series: Vec<f64> = p.column(q).iter().copied().collect();
        series.extend_from_within(..);
        let traj = preisach_trajectory(density, &series, evaluator)?;
        let res = preisach_energy_residuals(&series, &traj)?;
        Ok::<f64, Error>(res[n..].iter().map(|r| r.abs()).sum())
    })?;
    Ok(per_node.into_iter().fold(0.0, f64::max))
}

/// Whether `p` stays in `[-R, R]` and `G` agrees with `G_R` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confinement {
    pub max_abs_p: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    /// `max |G[p] - G_R[p]|` over the nodes.
    pub max_gap: f64,
    pub coincides: bool,
}

/// Confinement scan over the quadrature nodes and both endpoints.
pub fn confinement(
    problem: &GalerkinProblem,
    sol: &FourierSolution,
    g_r: Option<&DMatrix<f64>>,
    exec: Exec,
) -> Result<Confinement> {
    let (basis, modes) = (&problem.disc.basis, &problem.disc.modes);
    let p = synthesize(&sol.p, basis, modes)?;
    let p_b = synthesize_at(&sol.p, basis, modes, &[0.0, basis.length()])?;
    let max_abs_p = p.amax().max(p_b.amax());
    let density = &problem.density;
    let radius = density.radius;
    let g_r = match g_r {
        Some(g) => g.clone(),
        None => crate::galerkin::periodic_g_r(&p, density, &problem.evaluator, exec)?.0,
    };
    let gaps = exec.try_map(p.ncols(), |q| {
        let series: Vec<f64> = p.column(q).iter().copied().collect();
        let (g, _) = periodic_operator_response(density, &series, &problem.evaluator)?;
        Ok::<f64, Error>(g.iter().enumerate().fold(0.0, |a, (n, v)| a.max((v - g_r[(n, q)]).abs())))
    })?;
    let max_gap = gaps.into_iter().fold(0.0, f64::max);
    let scale = g_r.amax().max(f64::MIN_POSITIVE);
    Ok(Confinement {
        max_abs_p,
        radius,
        max_gap,
        coincides: max_abs_p <= radius && max_gap <= 1e-12 * scale.max(1.0),
    })
}
