//! Quadratic growth bounds of `G_R` and coincidence of `G` with `G_R` on
//! inputs confined to `[-R, R]`.

use serde::{Deserialize, Serialize};

use super::density::PreisachDensity;
use super::preisach::{preisach_trajectory, PreisachEvaluator, PreisachTrajectory};
use crate::error::Result;

/// Relative slack granted to the bounds for quadrature round-off.
const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Largest `|G_R| / (H_ρ ‖p‖²)` seen, 0 when the bound is `0 <= 0`.
    pub max_value_ratio: f64,
    /// Largest `|ΔG_R| / (H_ρ ‖p‖ |Δp|)` over the steps.
    pub max_rate_ratio: f64,
    /// Sample indices where `|G_R| <= H_ρ ‖p‖²` fails.
    pub value_violations: Vec<usize>,
    /// Step indices (ending sample) where the rate bound fails.
    pub rate_violations: Vec<usize>,
    /// `max |p| <= R` over the samples.
    pub confined: bool,
    /// `max |G - G_R|` over the samples.
    pub max_gap: f64,
    /// `Some(true)` when confined and `G`, `G_R` agree to round-off.
    pub coincides: Option<bool>,
    pub trajectory: PreisachTrajectory,
}

impl GrowthReport {
    pub fn bounds_hold(&self) -> bool {
        self.value_violations.is_empty() && self.rate_violations.is_empty()
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Evaluate `G` and `G_R` along `samples` from the virgin state and check
/// the growth bounds at every sample.
pub fn growth_and_coincidence_check(
    density: &PreisachDensity,
    samples: &[f64],
    evaluator: &PreisachEvaluator,
) -> Result<GrowthReport> {
    let h = density.constants()?.h_rho;
    let traj = preisach_trajectory(density, samples, evaluator)?;
    let mut report = GrowthReport {
        max_value_ratio: 0.0,
        max_rate_ratio: 0.0,
        value_violations: Vec::new(),
        rate_violations: Vec::new(),
        confined: true,
        max_gap: 0.0,
        coincides: None,
        trajectory: PreisachTrajectory::default(),
    };
    let mut sup = 0.0_f64;
    for (n, &p) in samples.iter().enumerate() {
        sup = sup.max(p.abs());
        let g_r = traj.g_r[n];
        let bound = h * sup * sup;
        report.max_value_ratio = report.max_value_ratio.max(ratio(g_r.abs(), bound));
        if g_r.abs() > bound * (1.0 + BOUND_SLACK) + f64::EPSILON * bound.max(1e-300) {
            report.value_violations.push(n);
        }
        if n > 0 {
            let dg = (g_r - traj.g_r[n - 1]).abs();
            let bound = h * sup * (p - samples[n - 1]).abs();
            report.max_rate_ratio = report.max_rate_ratio.max(ratio(dg, bound));
            if dg > bound * (1.0 + BOUND_SLACK) + 1e-15 * sup * sup * h {
                report.rate_violations.push(n);
            }
        }
        report.max_gap = report.max_gap.max((traj.g[n] - g_r).abs());
    }
    report.confined = sup <= density.radius;
    if report.confined {
        let scale = h * sup * sup;
        report.coincides = Some(report.max_gap <= 1e-12 * scale.max(1e-300) || report.max_gap == 0.0);
    }
    report.trajectory = traj;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(amp: f64, n: usize) -> Vec<f64> {
        (0..=2 * n)
            .map(|i| amp * (2.0 * PI * i as f64 / n as f64).sin())
            .collect()
    }

    #[test]
    fn zero_input_meets_bounds_with_equality() {
        let d = PreisachDensity::gaussian(1.0, 0.5, 0.1).unwrap();
        let rep = growth_and_coincidence_check(&d, &[0.0; 20], &PreisachEvaluator::default())
            .unwrap();
        assert!(rep.bounds_hold());
        assert!(rep.trajectory.g_r.iter().all(|&g| g == 0.0));
        assert_eq!(rep.coincides, Some(true));
    }

    #[test]
    fn confined_input_coincides() {
        let d = PreisachDensity::gaussian(1.0, 0.5, 0.1).unwrap();
        let rep = growth_and_coincidence_check(&d, &sine(0.05, 200), &PreisachEvaluator::default())
            .unwrap();
        assert!(rep.bounds_hold());
        assert!(rep.max_gap <= 1e-14, "{}", rep.max_gap);
        assert_eq!(rep.coincides, Some(true));
    }

    #[test]
    fn large_input_differs_but_obeys_bounds() {
        let d = PreisachDensity::gaussian(1.0, 0.5, 0.1).unwrap();
        let rep = growth_and_coincidence_check(&d, &sine(0.3, 200), &PreisachEvaluator::default())
            .unwrap();
        assert!(rep.bounds_hold(), "{:?} {:?}", rep.value_violations, rep.rate_violations);
        assert!(!rep.confined && rep.coincides.is_none());
        assert!(rep.max_gap > 1e-4);
        assert!(rep.max_value_ratio <= 1.0 && rep.max_rate_ratio <= 1.0);
    }
}
