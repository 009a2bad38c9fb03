//! Discrete residuals of the play energy balance, the monotonicity
//! identity and the Preisach energy identity.

use serde::{Deserialize, Serialize};

use super::play::check_threshold;
use super::preisach::PreisachTrajectory;
use crate::error::{Error, Result};

/// Per-step residuals of a single play trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlayResiduals {
    /// `Δξ p − ½ Δ(ξ²) − |r Δξ|`, with `p` at the end of the step.
    pub energy: Vec<f64>,
    /// `Δξ (Δp − Δξ)`.
    pub mono: Vec<f64>,
}

fn same_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

pub fn play_energy_residuals(r: f64, input: &[f64], xi: &[f64]) -> Result<PlayResiduals> {
    check_threshold(r)?;
    same_len(input.len(), xi.len())?;
    let mut out = PlayResiduals::default();
    for (p, x) in input.windows(2).zip(xi.windows(2)) {
        let dxi = x[1] - x[0];
        let dp = p[1] - p[0];
        out.energy
            .push(dxi * p[1] - 0.5 * (x[1] * x[1] - x[0] * x[0]) - (r * dxi).abs());
        out.mono.push(dxi * (dp - dxi));
    }
    Ok(out)
}

/// `ΔG p − ΔV − |ΔD|` per step, with `p` at the end of the step.
pub fn preisach_energy_residuals(input: &[f64], traj: &PreisachTrajectory) -> Result<Vec<f64>> {
    for len in [traj.g.len(), traj.v_pot.len(), traj.d_diss.len()] {
        same_len(input.len(), len)?;
    }
    Ok((1..input.len())
        .map(|n| {
            let dg = traj.g[n] - traj.g[n - 1];
            let dv = traj.v_pot[n] - traj.v_pot[n - 1];
            let dd = traj.d_diss[n] - traj.d_diss[n - 1];
            dg * input[n] - dv - dd.abs()
        })
        .collect())
}

/// Refine a sampled input at the instants where the play with threshold
/// `r` comes into contact with the edge of its dead band.
///
/// The input is taken linear between samples. Each returned step is then
/// either pure dead-band motion (`Δξ = 0`) or pure contact (`Δξ = Δp`),
/// and the returned `(input, output)` pair is the exact play trajectory
/// at the refined instants. `position[k]` locates refined sample `k`
/// as `segment index + fraction` in the original sampling and
/// `inserted[k]` marks the contact instants that were added.
pub fn resolve_contact_events(r: f64, samples: &[f64]) -> Result<ContactResolved> {
    check_threshold(r)?;
    let (&first, rest) = samples.split_first().ok_or(Error::EmptyInput)?;
    let mut xi = super::play::project(0.0, first, r);
    let mut out = ContactResolved {
        input: vec![first],
        output: vec![xi],
        position: vec![0.0],
        inserted: vec![false],
    };
    let mut prev = first;
    // direction of the last motion of ξ; an edge already in contact is
    // not a new event
    let mut moving = if xi > 0.0 { 1 } else if xi < 0.0 { -1 } else { 0 };
    for (k, &p) in rest.iter().enumerate() {
        let upper = xi + r;
        let lower = xi - r;
        let edge = if p > upper && prev < upper && moving != 1 {
            Some(upper)
        } else if p < lower && prev > lower && moving != -1 {
            Some(lower)
        } else {
            None
        };
        if let Some(e) = edge {
            let frac = (e - prev) / (p - prev);
            out.input.push(e);
            out.output.push(xi);
            out.position.push(k as f64 + frac);
            out.inserted.push(true);
        }
        let next = super::play::project(xi, p, r);
        moving = if next > xi {
            1
        } else if next < xi {
            -1
        } else {
            0
        };
        xi = next;
        out.input.push(p);
        out.output.push(xi);
        out.position.push((k + 1) as f64);
        out.inserted.push(false);
        prev = p;
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactResolved {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub position: Vec<f64>,
    pub inserted: Vec<bool>,
}
