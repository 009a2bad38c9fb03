//! The scalar play operator.
//!
//! The play with threshold `r` keeps its output `xi` within distance `r` of
//! the input and moves only when the input pushes against the edge of the
//! dead band. Sampled inputs are processed by the one-step projection
//! `xi_new = clamp(xi_old, p - r, p + r)`, which is the exact solution of the
//! variational inequality whenever the input is linear between samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayState {
    pub r: f64,
    pub xi: f64,
}

pub(crate) fn check_threshold(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(r))
    }
}

/// Projection of `xi` onto `[p - r, p + r]`. The contact case
/// `|p - xi| == r` leaves `xi` untouched.
#[inline]
pub fn project(xi: f64, p: f64, r: f64) -> f64 {
    let lo = p - r;
    let hi = p + r;
    if xi < lo {
        lo
    } else if xi > hi {
        hi
    } else {
        xi
    }
}

/// Initial state for input value `p0`: `xi = p0 - clamp(p0, -r, r)`.
pub fn play_init(r: f64, p0: f64) -> Result<PlayState> {
    check_threshold(r)?;
    Ok(PlayState {
        r,
        xi: project(0.0, p0, r),
    })
}

/// Advance the play by one input sample.
pub fn play_update(state: PlayState, p_new: f64) -> PlayState {
    PlayState {
        r: state.r,
        xi: project(state.xi, p_new, state.r),
    }
}

impl PlayState {
    pub fn update(&mut self, p_new: f64) -> f64 {
        self.xi = project(self.xi, p_new, self.r);
        self.xi
    }
}

/// Output of the play along a sampled input, starting from [`play_init`].
pub fn play_trajectory(r: f64, samples: &[f64]) -> Result<Vec<f64>> {
    let (&first, rest) = samples.split_first().ok_or(Error::EmptyInput)?;
    let mut state = play_init(r, first)?;
    let mut out = Vec::with_capacity(samples.len());
    out.push(state.xi);
    out.extend(rest.iter().map(|&p| state.update(p)));
    Ok(out)
}

/// Periodic response to one period of samples on `[0, 2π)`.
///
/// The play is run over two concatenated periods from its initial state and
/// the second period is returned. After one full period the output is
/// periodic, so any further period reproduces the returned samples exactly.
pub fn periodic_play_response(r: f64, one_period: &[f64]) -> Result<Vec<f64>> {
    let (&first, _) = one_period.split_first().ok_or(Error::EmptyInput)?;
    let mut state = play_init(r, first)?;
    for &p in &one_period[1..] {
        state.update(p);
    }
    Ok(one_period.iter().map(|&p| state.update(p)).collect())
}
