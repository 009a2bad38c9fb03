//! Preisach operator `G`, its convexification `G_R`, the Preisach
//! potential `V` and the dissipation operator `D`, evaluated on a
//! [`MemoryState`].

use serde::{Deserialize, Serialize};

use super::density::{ConvexifiedDensity, PreisachDensity};
use super::memory::{MemoryState, RGrid};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Gauss–Legendre order used on each linear piece of the memory curve.
pub const DEFAULT_R_ORDER: usize = 16;

/// A density seen through its inner `v`-integrals.
pub trait InnerMoments: Sync {
    /// `(∫_0^ξ ρ dv, ∫_0^ξ v ρ dv)` at threshold `r`.
    fn moments(&self, r: f64, xi: f64) -> (f64, f64);

    /// Push the values of `r` in `(r0, r1)` where `r ↦ moments(r, ξ(r))`
    /// has a kink along the memory segment from `(r0, x0)` to `(r1, x1)`.
    fn segment_breaks(&self, r0: f64, x0: f64, r1: f64, x1: f64, out: &mut Vec<f64>);
}

impl InnerMoments for PreisachDensity {
    fn moments(&self, r: f64, xi: f64) -> (f64, f64) {
        self.family.moments(r, xi)
    }

    fn segment_breaks(&self, r0: f64, _x0: f64, r1: f64, _x1: f64, out: &mut Vec<f64>) {
        out.extend(self.family.r_breaks().into_iter().filter(|&b| b > r0 && b < r1));
    }
}

impl InnerMoments for ConvexifiedDensity<'_> {
    fn moments(&self, r: f64, xi: f64) -> (f64, f64) {
        ConvexifiedDensity::moments(self, r, xi)
    }

    fn segment_breaks(&self, r0: f64, x0: f64, r1: f64, x1: f64, out: &mut Vec<f64>) {
        let radius = self.radius();
        // the clamped branches only see ρ on r <= R
        out.extend(
            self.density()
                .family
                .r_breaks()
                .into_iter()
                .filter(|&b| b > r0 && b < r1.min(radius)),
        );
        if radius > r0 && radius < r1 {
            out.push(radius);
        }
        // ξ(r) = x0 + s (r - r0) crossing ±(R - r)
        let s = (x1 - x0) / (r1 - r0);
        for edge in [1.0, -1.0] {
            let denom = s + edge;
            if denom != 0.0 {
                let r = (edge * radius - x0 + s * r0) / denom;
                if r > r0 && r < r1 && r < radius {
                    out.push(r);
                }
            }
        }
    }
}

/// Pointwise operator values at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorOutputs {
    /// `G[p](t)`.
    pub g: f64,
    /// `G_R[p](t)`, present when the convexified operator was requested.
    pub g_r: Option<f64>,
    /// `V[p](t)`.
    pub v_pot: f64,
    /// `D[p](t)`.
    pub d_diss: f64,
}

/// Integrals `(Σ w m0, Σ w m1, Σ w r m0)` of a density over a memory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MemoryIntegrals {
    pub g: f64,
    pub v: f64,
    pub d: f64,
}

/// Reusable evaluator holding the reference rule for the `r`-integration.
#[derive(Debug, Clone)]
pub struct PreisachEvaluator {
    order: usize,
    reference: GaussLegendre,
}

impl Default for PreisachEvaluator {
    fn default() -> Self {
        Self::new(DEFAULT_R_ORDER).expect("default order is positive")
    }
}

impl PreisachEvaluator {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Grid("r-quadrature order must be >= 1".into()));
        }
        Ok(Self {
            order,
            reference: GaussLegendre::reference(order)?,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The `r`-quadrature for `memory` adapted to the kinks of `density`.
    pub fn grid<D: InnerMoments + ?Sized>(&self, density: &D, memory: &MemoryState) -> RGrid {
        memory.quadrature(self.order, &self.reference, |r0, x0, r1, x1, out| {
            density.segment_breaks(r0, x0, r1, x1, out)
        })
    }

    pub fn integrals<D: InnerMoments + ?Sized>(
        &self,
        density: &D,
        memory: &MemoryState,
    ) -> MemoryIntegrals {
        let grid = self.grid(density, memory);
        let mut out = MemoryIntegrals::default();
        for ((&r, &w), &xi) in grid.r_nodes.iter().zip(&grid.r_weights).zip(&grid.plays) {
            let (m0, m1) = density.moments(r, xi);
            out.g += w * m0;
            out.v += w * m1;
            out.d += w * r * m0;
        }
        out
    }

    /// `∫ ∫_0^{ξ_r} ρ dv dr` only.
    pub fn g<D: InnerMoments + ?Sized>(&self, density: &D, memory: &MemoryState) -> f64 {
        let grid = self.grid(density, memory);
        grid.r_nodes
            .iter()
            .zip(&grid.r_weights)
            .zip(&grid.plays)
            .map(|((&r, &w), &xi)| w * density.moments(r, xi).0)
            .sum()
    }
}

/// Evaluate `G`, `V`, `D` (and `G_R` when `convexified`) on a memory state.
pub fn preisach_eval(
    density: &PreisachDensity,
    memory: &MemoryState,
    convexified: bool,
    evaluator: &PreisachEvaluator,
) -> Result<OperatorOutputs> {
    let raw = evaluator.integrals(density, memory);
    let g_r = if convexified {
        Some(evaluator.g(&density.convexified()?, memory))
    } else {
        None
    };
    Ok(OperatorOutputs {
        g: raw.g,
        g_r,
        v_pot: raw.v,
        d_diss: raw.d,
    })
}

/// Time series of the operator outputs along a sampled input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreisachTrajectory {
    pub g: Vec<f64>,
    pub g_r: Vec<f64>,
    pub v_pot: Vec<f64>,
    pub d_diss: Vec<f64>,
}

/// Run the memory from the virgin state along `samples` and record
/// `G`, `G_R`, `V`, `D` after every sample.
pub fn preisach_trajectory(
    density: &PreisachDensity,
    samples: &[f64],
    evaluator: &PreisachEvaluator,
) -> Result<PreisachTrajectory> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let conv = density.convexified()?;
    let mut memory = MemoryState::virgin();
    let mut out = PreisachTrajectory::default();
    for &p in samples {
        memory.update(p);
        let raw = evaluator.integrals(density, &memory);
        out.g.push(raw.g);
        out.v_pot.push(raw.v);
        out.d_diss.push(raw.d);
        out.g_r.push(evaluator.g(&conv, &memory));
    }
    Ok(out)
}

/// Periodic response of a Preisach-type operator to one period of samples.
///
/// The memory is warmed up over one period from the virgin state and the
/// next period is recorded. The second return value is the deviation
/// between the memory at the first recorded instant and one period later;
/// it vanishes once the memory is periodic.
pub fn periodic_operator_response<D: InnerMoments + ?Sized>(
    density: &D,
    one_period: &[f64],
    evaluator: &PreisachEvaluator,
) -> Result<(Vec<f64>, f64)> {
    let (&first, _) = one_period.split_first().ok_or(Error::EmptyInput)?;
    let mut memory = MemoryState::virgin();
    for &p in one_period {
        memory.update(p);
    }
    memory.update(first);
    let start = memory.clone();
    let mut g = Vec::with_capacity(one_period.len());
    g.push(evaluator.g(density, &memory));
    for &p in &one_period[1..] {
        memory.update(p);
        g.push(evaluator.g(density, &memory));
    }
    memory.update(first);
    Ok((g, memory.max_deviation(&start)))
}
