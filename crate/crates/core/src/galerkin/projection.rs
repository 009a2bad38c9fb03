//! The hysteresis term `∫∫ G_R[p]_t ψ_l e_j dx dt` of the mass balance.

use nalgebra::{DMatrix, DVector};

use super::problem::Discretization;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hysteresis::{periodic_operator_response, PreisachDensity, PreisachEvaluator};
use crate::spectral::{synthesize, Family, ModalCoeffs};

/// Relative tolerance on the memory mismatch between consecutive periods.
pub const MEMORY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HysteresisProjection {
    /// `H_{jl} = ∫∫ G_R[p]_t ψ_l e_j dx dt`.
    pub coeffs: ModalCoeffs,
    /// Periodic `G_R[p](x_q, t_n)` at the quadrature nodes.
    pub g_r: DMatrix<f64>,
    /// `p(x_q, t_n)`.
    pub p: DMatrix<f64>,
    /// Largest memory mismatch between the starts of consecutive periods.
    pub memory_mismatch: f64,
}

/// Periodic `G_R[p]` at every quadrature node, one column per node.
pub fn periodic_g_r(
    p: &DMatrix<f64>,
    density: &PreisachDensity,
    evaluator: &PreisachEvaluator,
    exec: Exec,
) -> Result<(DMatrix<f64>, f64)> {
    let conv = density.convexified()?;
    let n_t = p.nrows();
    let cols = exec.try_map(p.ncols(), |q| {
        let series: Vec<f64> = p.column(q).iter().copied().collect();
        let (g, mismatch) = periodic_operator_response(&conv, &series, evaluator)?;
        let scale = series.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        if mismatch > MEMORY_TOL * scale {
            return Err(Error::NonPeriodicMemory { mismatch });
        }
        Ok((g, mismatch))
    })?;
    let mut g = DMatrix::zeros(n_t, p.ncols());
    let mut worst = 0.0_f64;
    for (q, (col, mismatch)) in cols.into_iter().enumerate() {
        g.column_mut(q).copy_from(&DVector::from_vec(col));
        worst = worst.max(mismatch);
    }
    Ok((g, worst))
}

/// Tested integrals of `G_R[p]_t`, by parts in time:
/// `∫ G_t e_j dt = -j ∫ G e_{-j} dt` on the periodic grid.
pub fn tested_time_derivative(g: &DMatrix<f64>, disc: &Discretization) -> Result<ModalCoeffs> {
    let (basis, modes) = (&disc.basis, &disc.modes);
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(basis.weights()));
    // raw[(j + m, l)] = Σ_n Σ_q Δt w_q G(n, q) e_j(t_n) ψ_l(x_q)
    let raw = modes.table().transpose() * g * w * basis.at_nodes(Family::Neumann).transpose() * modes.dt();
    let m = disc.m() as i64;
    let mut out = ModalCoeffs::zeros(disc.m(), Family::Neumann);
    for j in -m..=m {
        let src = (m - j) as usize;
        for (l, v) in out.row_mut(j).iter_mut().enumerate() {
            *v = -(j as f64) * raw[(src, l)];
        }
    }
    Ok(out)
}

/// Synthesize `p` at the quadrature nodes, run the convexified Preisach
/// operator per node to its periodic regime and test its time derivative
/// against `ψ_l e_j`.
pub fn hysteresis_projection(
    p: &ModalCoeffs,
    disc: &Discretization,
    density: &PreisachDensity,
    evaluator: &PreisachEvaluator,
    exec: Exec,
) -> Result<HysteresisProjection> {
    if p.family != Family::Neumann {
        return Err(Error::IndexMismatch("pressure coefficients must use the Neumann family".into()));
    }
    let samples = synthesize(p, &disc.basis, &disc.modes)?;
    let (g_r, memory_mismatch) = periodic_g_r(&samples, density, evaluator, exec)?;
    Ok(HysteresisProjection {
        coeffs: tested_time_derivative(&g_r, disc)?,
        g_r,
        p: samples,
        memory_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hysteresis::DensityFamily;
    use crate::quadrature::GaussLegendre;
    use crate::spectral::mode;
    use std::f64::consts::PI;

    fn disc() -> Discretization {
        Discretization::new(1.0, 1.0, 3, 256, 32).unwrap()
    }

    #[test]
    fn zero_pressure_gives_zero() {
        let d = PreisachDensity::uniform(1.0, 1.0).unwrap();
        let h = hysteresis_projection(
            &ModalCoeffs::zeros(3, Family::Neumann),
            &disc(),
            &d,
            &PreisachEvaluator::default(),
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(h.coeffs.max_abs(), 0.0);
    }

    #[test]
    fn pressure_below_active_thresholds_gives_zero() {
        // a density supported on r >= 0.05 cannot satisfy A_R > 0, so the
        // constants of ρ ≡ 1 are borrowed; the projection only reads ρ_R
        let d = PreisachDensity {
            family: DensityFamily::Uniform { value: 1.0, r_min: 0.05, r_max: None },
            radius: 1.0,
            constants: PreisachDensity::uniform(1.0, 1.0).unwrap().constants,
        };
        let mut p = ModalCoeffs::zeros(3, Family::Neumann);
        p.set(1, 1, 0.03); // |p| <= 0.03 √2 < 0.05
        let h = hysteresis_projection(&p, &disc(), &d, &PreisachEvaluator::default(), Exec::Parallel)
            .unwrap();
        assert_eq!(h.coeffs.max_abs(), 0.0);
        p.set(1, 1, 0.1);
        let h = hysteresis_projection(&p, &disc(), &d, &PreisachEvaluator::default(), Exec::Parallel)
            .unwrap();
        assert!(h.coeffs.max_abs() > 0.0);
    }

    #[test]
    fn small_loop_oracle_for_uniform_density() {
        let d = PreisachDensity::uniform(1.0, 1.0).unwrap();
        let eps = 0.05;
        let mut p = ModalCoeffs::zeros(3, Family::Neumann);
        p.set(1, 1, eps);
        let dsc = disc();
        let h = hysteresis_projection(&p, &dsc, &d, &PreisachEvaluator::default(), Exec::Parallel)
            .unwrap();
        // ρ ≡ 1 on a periodic loop of amplitude A: dG/dp = (A ± p)/2 on the
        // ascending/descending branch. Dense midpoint rule in t, Gauss in x.
        let nt = 20_000;
        let gx = GaussLegendre::on_interval(48, 0.0, 1.0).unwrap();
        let psi = |l: usize, x: f64| dsc.basis.psi(l, x);
        for j in -3i64..=3 {
            for l in 0..=3 {
                let mut total = 0.0;
                for (&x, &wx) in gx.nodes.iter().zip(&gx.weights) {
                    let amp = eps * psi(1, x).abs();
                    let mut line = 0.0;
                    for n in 0..nt {
                        let t = 2.0 * PI * (n as f64 + 0.5) / nt as f64;
                        let pv = eps * psi(1, x) * t.sin();
                        let pt = eps * psi(1, x) * t.cos();
                        let slope = 0.5 * (amp + pt.signum() * pv);
                        line += slope * pt * mode(j, t);
                    }
                    total += wx * psi(l, x) * line * 2.0 * PI / nt as f64;
                }
                let got = h.coeffs.get(j, l);
                let scale = eps * eps;
                assert!((got - total).abs() <= 1e-4 * scale, "j={j} l={l}: {got} vs {total}");
            }
        }
    }
}
