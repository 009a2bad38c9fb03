//! Hysteresis memory of a single material point.
//!
//! For a fixed input history the map `r ↦ ξ_r` (the outputs of the whole
//! play family) is a piecewise-linear, 1-Lipschitz curve with `ξ_0 = p`
//! and `ξ_r = 0` beyond the running maximum of `|p|`. One input sample acts
//! on it as `ξ_r ← clamp(ξ_r, p - r, p + r)`, which replaces an initial
//! stretch of the curve by a slope ∓1 segment through `(0, p)` and wipes
//! out the breakpoints it covers. Storing the breakpoints therefore
//! evolves every play at once, and integrals over `r` can be split at the
//! kinks of the curve.

use crate::quadrature::GaussLegendre;

/// Exact memory curve of the play family.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    /// Breakpoints `(r, ξ_r)`, increasing in `r`, starting at `(0, p)` and
    /// ending with `ξ = 0`; the curve vanishes to the right of the last one.
    points: Vec<(f64, f64)>,
    r_cap: f64,
}

impl Default for MemoryState {
    fn default() -> Self {
        Self::virgin()
    }
}

impl MemoryState {
    /// All plays at zero.
    pub fn virgin() -> Self {
        Self {
            points: vec![(0.0, 0.0)],
            r_cap: 0.0,
        }
    }

    /// Virgin state followed by the first input sample, i.e. every play
    /// initialised by `play_init`.
    pub fn from_initial(p0: f64) -> Self {
        let mut m = Self::virgin();
        m.update(p0);
        m
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Running maximum of `|p|`; every play with `r >= r_cap` is zero.
    pub fn r_cap(&self) -> f64 {
        self.r_cap
    }

    /// Most recent input value (`ξ_0`).
    pub fn input(&self) -> f64 {
        self.points[0].1
    }

    /// Output `ξ_r` of the play with threshold `r`.
    pub fn xi(&self, r: f64) -> f64 {
        let pts = &self.points;
        let last = pts[pts.len() - 1];
        if r >= last.0 {
            return 0.0;
        }
        let k = pts.partition_point(|&(rk, _)| rk <= r);
        let (r0, x0) = pts[k - 1];
        let (r1, x1) = pts[k];
        x0 + (x1 - x0) * (r - r0) / (r1 - r0)
    }

    /// Apply one input sample to every play.
    pub fn update(&mut self, p: f64) {
        self.r_cap = self.r_cap.max(p.abs());
        let y0 = self.points[0].1;
        if p == y0 {
            return;
        }
        // Distance of the old curve from the active edge of the new dead
        // band, `sigma * (ξ_old(r) - (p - sigma r))`, is non-decreasing in r.
        let sigma = if p > y0 { 1.0 } else { -1.0 };
        let gap = |(r, x): (f64, f64)| sigma * (x - p) + r;
        let mut prev = self.points[0];
        let mut hit = None;
        for (i, &pt) in self.points.iter().enumerate().skip(1) {
            let g = gap(pt);
            if g >= 0.0 {
                let g0 = gap(prev);
                let r_star = prev.0 + (-g0) / (g - g0) * (pt.0 - prev.0);
                hit = Some((i, r_star));
                break;
            }
            prev = pt;
        }
        let mut next = Vec::with_capacity(self.points.len() + 2);
        next.push((0.0, p));
        match hit {
            Some((i, r_star)) => {
                if r_star < self.points[i].0 {
                    next.push((r_star, p - sigma * r_star));
                }
                next.extend_from_slice(&self.points[i..]);
            }
            None => {
                // the edge meets the zero tail at r = |p|
                next.push((sigma * p, 0.0));
            }
        }
        self.points = next;
    }

    /// Linear pieces `(r0, ξ0, r1, ξ1)` of the curve on `(0, r_end]`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.points
            .windows(2)
            .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
    }

    /// Largest pointwise difference between two memory curves.
    pub fn max_deviation(&self, other: &MemoryState) -> f64 {
        self.points
            .iter()
            .chain(other.points.iter())
            .map(|&(r, _)| (self.xi(r) - other.xi(r)).abs())
            .fold(0.0, f64::max)
    }

    /// Quadrature rule in `r` adapted to the memory: Gauss–Legendre of the
    /// given order on every linear piece of the curve, further split at the
    /// points reported by `breaks`.
    pub fn quadrature<B>(&self, order: usize, reference: &GaussLegendre, breaks: B) -> RGrid
    where
        B: Fn(f64, f64, f64, f64, &mut Vec<f64>),
    {
        debug_assert_eq!(reference.len(), order);
        let mut grid = RGrid {
            r_cap: self.r_cap,
            ..RGrid::default()
        };
        let mut cuts = Vec::new();
        for (r0, x0, r1, x1) in self.segments() {
            cuts.clear();
            cuts.push(r0);
            breaks(r0, x0, r1, x1, &mut cuts);
            cuts.push(r1);
            cuts[1..].sort_by(f64::total_cmp);
            let slope = (x1 - x0) / (r1 - r0);
            for w in cuts.windows(2) {
                if w[1] <= w[0] {
                    continue;
                }
                let half = 0.5 * (w[1] - w[0]);
                let mid = 0.5 * (w[0] + w[1]);
                for (&t, &wt) in reference.nodes.iter().zip(&reference.weights) {
                    let r = mid + half * t;
                    grid.r_nodes.push(r);
                    grid.r_weights.push(half * wt);
                    grid.plays.push(x0 + slope * (r - r0));
                }
            }
        }
        grid
    }
}

/// Quadrature nodes in `r` together with the play outputs at the nodes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RGrid {
    pub r_nodes: Vec<f64>,
    pub r_weights: Vec<f64>,
    pub plays: Vec<f64>,
    pub r_cap: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hysteresis::play::project;
    use proptest::prelude::*;

    #[test]
    fn ramp_from_virgin() {
        let mut m = MemoryState::virgin();
        for k in 1..=100 {
            m.update(k as f64 * 0.01);
        }
        assert_eq!(m.breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(m.xi(0.25), 0.75);
        assert_eq!(m.xi(1.5), 0.0);
        assert_eq!(m.r_cap(), 1.0);
    }

    #[test]
    fn reversal_creates_one_breakpoint() {
        let mut m = MemoryState::from_initial(1.0);
        m.update(0.4);
        // descending edge p + r meets the old curve 1 - r at r = 0.3
        let pts = m.breakpoints();
        assert_eq!(pts.len(), 3);
        assert!((pts[1].0 - 0.3).abs() < 1e-15 && (pts[1].1 - 0.7).abs() < 1e-15);
        // a new maximum wipes the reversal
        m.update(1.2);
        assert_eq!(m.breakpoints(), &[(0.0, 1.2), (1.2, 0.0)]);
    }

    #[test]
    fn null_beyond_running_sup() {
        let mut m = MemoryState::virgin();
        for &p in &[0.3, -0.7, 0.5, -0.2, 0.1] {
            m.update(p);
        }
        assert_eq!(m.r_cap(), 0.7);
        assert_eq!(m.xi(0.7), 0.0);
        assert_eq!(m.xi(5.0), 0.0);
    }

    #[test]
    fn quadrature_integrates_curve() {
        let mut m = MemoryState::from_initial(1.0);
        m.update(-0.2);
        let q = GaussLegendre::reference(4).unwrap();
        let g = m.quadrature(4, &q, |_, _, _, _, _| {});
        // ∫ ξ_r dr over the exact curve: breakpoints (0,-0.2),(0.6,0.4),(1,0)
        let exact = 0.5 * 0.6 * (-0.2 + 0.4) + 0.5 * 0.4 * 0.4;
        let got: f64 = g.r_weights.iter().zip(&g.plays).map(|(w, x)| w * x).sum();
        assert!((got - exact).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn curve_matches_independent_plays(
            inputs in proptest::collection::vec(-3.0f64..3.0, 1..60)
        ) {
            let thresholds: Vec<f64> = (1..=80).map(|i| i as f64 * 0.05).collect();
            let mut plays: Vec<f64> = vec![0.0; thresholds.len()];
            let mut m = MemoryState::virgin();
            for &p in &inputs {
                m.update(p);
                for (xi, &r) in plays.iter_mut().zip(&thresholds) {
                    *xi = project(*xi, p, r);
                }
                for (xi, &r) in plays.iter().zip(&thresholds) {
                    prop_assert!((m.xi(r) - xi).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn curve_is_one_lipschitz_and_bounded(
            inputs in proptest::collection::vec(-3.0f64..3.0, 1..60)
        ) {
            let mut m = MemoryState::virgin();
            for &p in &inputs {
                m.update(p);
                let pts = m.breakpoints();
                prop_assert_eq!(pts[0], (0.0, p));
                prop_assert_eq!(pts[pts.len() - 1].1, 0.0);
                for w in pts.windows(2) {
                    prop_assert!(w[1].0 > w[0].0);
                    prop_assert!((w[1].1 - w[0].1).abs() <= (w[1].0 - w[0].0) * (1.0 + 1e-12) + 1e-15);
                }
                prop_assert!(pts[pts.len() - 1].0 <= m.r_cap() + 1e-12);
            }
        }
    }
}
