//! A smooth periodic `(u, p)` and the data that makes it an exact solution.
//!
//! `u = ε_u s(t) sin(kx) e^{cos kx}` and `p = ε_p c(t) e^{κ cos kx}` with
//! `k = π/L`, so `u` vanishes at both ends and `p_x` does too, hence
//! `p* = p` on the boundary. The data follow from the strong equations
//! `f = u_tt + u_t - a u_xx - p_x` and `h = G_R[p]_t - u_xt - p_xx`; the
//! hysteresis part of `h` is tested numerically on the grid in use.

use nalgebra::DMatrix;

use super::problem::{Discretization, FourierSolution, ProblemData};
use super::projection::{periodic_g_r, tested_time_derivative};
use crate::error::Result;
use crate::exec::Exec;
use crate::hysteresis::{PreisachDensity, PreisachEvaluator};
use crate::spectral::{mode_norm_sq, project_field, project_series, Family};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub eps_u: f64,
    pub eps_p: f64,
    pub kappa: f64,
}

fn s(t: f64) -> [f64; 3] {
    // value, first and second derivative of sin t + 0.3 cos 2t
    [
        t.sin() + 0.3 * (2.0 * t).cos(),
        t.cos() - 0.6 * (2.0 * t).sin(),
        -t.sin() - 1.2 * (2.0 * t).cos(),
    ]
}

fn c(t: f64) -> f64 {
    t.cos() + 0.2 * (2.0 * t).sin()
}

impl Manufactured {
    pub fn new(eps_u: f64, eps_p: f64) -> Self {
        Self {
            eps_u,
            eps_p,
            kappa: 1.0,
        }
    }

    /// `X, X', X''` for `X = sin(kx) e^{cos kx}`.
    fn x_profile(&self, k: f64, x: f64) -> [f64; 3] {
        let (sn, cs) = (k * x).sin_cos();
        let e = cs.exp();
        [sn * e, k * e * (cs - sn * sn), k * k * e * sn * (sn * sn - 3.0 * cs - 1.0)]
    }

    /// `P, P', P''` for `P = e^{κ cos kx}`.
    fn p_profile(&self, k: f64, x: f64) -> [f64; 3] {
        let (sn, cs) = (k * x).sin_cos();
        let kap = self.kappa;
        let e = (kap * cs).exp();
        [e, -kap * k * sn * e, kap * k * k * e * (kap * sn * sn - cs)]
    }

    fn samples<F: Fn(f64, f64) -> f64>(disc: &Discretization, f: F) -> DMatrix<f64> {
        let xs = disc.basis.nodes();
        DMatrix::from_fn(disc.modes.samples(), xs.len(), |n, q| f(disc.modes.time(n), xs[q]))
    }

    pub fn u(&self, disc: &Discretization) -> DMatrix<f64> {
        let k = std::f64::consts::PI / disc.basis.length();
        Self::samples(disc, |t, x| self.eps_u * s(t)[0] * self.x_profile(k, x)[0])
    }

    pub fn p(&self, disc: &Discretization) -> DMatrix<f64> {
        let k = std::f64::consts::PI / disc.basis.length();
        Self::samples(disc, |t, x| self.eps_p * c(t) * self.p_profile(k, x)[0])
    }

    /// Galerkin projection of the exact solution.
    pub fn projected(&self, disc: &Discretization) -> Result<FourierSolution> {
        let (basis, modes) = (&disc.basis, &disc.modes);
        Ok(FourierSolution {
            u: project_field(&self.u(disc), Family::Dirichlet, basis, modes)?,
            p: project_field(&self.p(disc), Family::Neumann, basis, modes)?,
        })
    }

    /// Data `(f, h, p*)` for which this pair solves the system.
    pub fn data(
        &self,
        disc: &Discretization,
        density: &PreisachDensity,
        evaluator: &PreisachEvaluator,
        gamma: [f64; 2],
        exec: Exec,
    ) -> Result<ProblemData> {
        let (basis, modes) = (&disc.basis, &disc.modes);
        let a = basis.elasticity();
        let k = std::f64::consts::PI / basis.length();
        let f = Self::samples(disc, |t, x| {
            let [s0, s1, s2] = s(t);
            let [x0, _, x2] = self.x_profile(k, x);
            self.eps_u * ((s2 + s1) * x0 - a * s0 * x2) - self.eps_p * c(t) * self.p_profile(k, x)[1]
        });
        let h_smooth = Self::samples(disc, |t, x| {
            -self.eps_u * s(t)[1] * self.x_profile(k, x)[1] - self.eps_p * c(t) * self.p_profile(k, x)[2]
        });
        let mut h = project_field(&h_smooth, Family::Neumann, basis, modes)?;
        let (g_r, _) = periodic_g_r(&self.p(disc), density, evaluator, exec)?;
        let tested = tested_time_derivative(&g_r, disc)?;
        let m = disc.m() as i64;
        for j in -m..=m {
            let tau = mode_norm_sq(j);
            for (hv, gv) in h.row_mut(j).iter_mut().zip(tested.row(j)) {
                *hv += gv / tau;
            }
        }
        let ends = basis.endpoints();
        let p_star = ends.map(|b| {
            let pb = self.eps_p * self.p_profile(k, b)[0];
            let series: Vec<f64> = (0..modes.samples()).map(|n| pb * c(modes.time(n))).collect();
            project_series(&series, modes)
        });
        let [p0, p1] = p_star;
        Ok(ProblemData {
            f: project_field(&f, Family::Dirichlet, basis, modes)?,
            h,
            p_star: [p0?, p1?],
            gamma,
        })
    }
}

/// `‖U - U_ref‖ / ‖U_ref‖` on the coefficients.
pub fn relative_error(sol: &FourierSolution, reference: &FourierSolution) -> f64 {
    let du = sol.u.axpy(-1.0, &reference.u).expect("same shape");
    let dp = sol.p.axpy(-1.0, &reference.p).expect("same shape");
    (du.norm().powi(2) + dp.norm().powi(2)).sqrt() / reference.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::{assemble_residual, GalerkinProblem};
    use crate::spectral::synthesize;

    #[test]
    fn profiles_match_finite_differences() {
        let ms = Manufactured::new(1.0, 1.0);
        let (k, x, h) = (std::f64::consts::PI / 1.3, 0.37, 1e-4);
        for prof in [Manufactured::x_profile, Manufactured::p_profile] {
            let v = |x| prof(&ms, k, x)[0];
            let d1 = (v(x + h) - v(x - h)) / (2.0 * h);
            let d2 = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
            let p = prof(&ms, k, x);
            assert!((p[1] - d1).abs() < 1e-6, "{} vs {d1}", p[1]);
            assert!((p[2] - d2).abs() < 1e-4, "{} vs {d2}", p[2]);
        }
    }

    #[test]
    fn projection_reproduces_samples() {
        let disc = Discretization::new(1.0, 1.0, 12, 64, 48).unwrap();
        let ms = Manufactured::new(0.01, 0.02);
        let sol = ms.projected(&disc).unwrap();
        let u = synthesize(&sol.u, &disc.basis, &disc.modes).unwrap();
        assert!((u - ms.u(&disc)).amax() < 1e-10);
    }

    #[test]
    fn residual_at_projection_shrinks() {
        let density = PreisachDensity::uniform(1.0, 1.0).unwrap();
        let ev = PreisachEvaluator::default();
        let ms = Manufactured::new(0.01, 0.02);
        let mut last = f64::INFINITY;
        for m in [3, 6, 12] {
            let disc = Discretization::new(1.0, 1.0, m, 64, 4 * m + 8).unwrap();
            let data = ms.data(&disc, &density, &ev, [1.0, 1.0], Exec::Parallel).unwrap();
            let exact = ms.projected(&disc).unwrap();
            let problem = GalerkinProblem::new(disc, data, density.clone()).unwrap();
            let r = assemble_residual(&problem, &exact, 1.0).unwrap().norm();
            assert!(r < last, "m = {m}: {r} vs {last}");
            last = r;
        }
        assert!(last < 1e-8, "{last}");
    }
}
