//! Residual of the homotopy `T_α(U)` and its linear part.
//!
//! With `τ_j = ∫ e_j²`, `B_{kl} = ∫ ψ_l φ_k'` and
//! `Γ_{ll'} = Σ_b γ_b ψ_l(b) ψ_{l'}(b)`, the components are
//!
//! ```text
//! v_jk = τ_j [ (λ_k - j²) u_jk - j u_{-j,k} + Σ_l B_kl p_jl - α f_jk ]
//! w_jl = τ_j [ -(1-α) j p_{-j,l} + j Σ_k B_kl u_{-j,k} + μ_l p_jl + (Γ p_j)_l
//!              - α h_jl - α Σ_b γ_b ψ_l(b) p*_{b,j} ] + α H_jl
//! ```
//!
//! where `H_jl` is the tested hysteresis term. The linear part couples only
//! the frequencies `j` and `-j`, so it is stored and inverted blockwise.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::problem::{FourierSolution, GalerkinProblem};
use super::projection::hysteresis_projection;
use crate::error::{Error, Result};
use crate::spectral::{mode_norm_sq, Family, ModalCoeffs};

/// `T_α(U)`, with one entry per Galerkin test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualVector {
    pub v: ModalCoeffs,
    pub w: ModalCoeffs,
    pub alpha: f64,
}

impl ResidualVector {
    pub fn zeros(m: usize, alpha: f64) -> Self {
        Self {
            v: ModalCoeffs::zeros(m, Family::Dirichlet),
            w: ModalCoeffs::zeros(m, Family::Neumann),
            alpha,
        }
    }

    /// `(Σ v_jk² / τ_j + Σ w_jl² / τ_j)^{1/2}`, on the scale of the
    /// periodic `L²` norm of the data.
    pub fn norm(&self) -> f64 {
        let m = self.v.m as i64;
        let mut s = 0.0;
        for j in -m..=m {
            let tau = mode_norm_sq(j);
            s += self.v.row(j).iter().chain(self.w.row(j)).map(|x| x * x).sum::<f64>() / tau;
        }
        s.sqrt()
    }

    fn as_solution(&self) -> FourierSolution {
        FourierSolution {
            u: self.v.clone(),
            p: self.w.clone(),
        }
    }
}

/// Blocks of the linear part of `T_α` for frequency pairs `{j, -j}`.
#[derive(Debug, Clone)]
pub struct LinearBlocks {
    m: usize,
    alpha: f64,
    /// `blocks[j]` for `j = 0..=m`. Unknown order: `[u_0, p_0]` for
    /// `j = 0`, `[u_j, u_{-j}, p_j, p_{-j}]` otherwise.
    blocks: Vec<DMatrix<f64>>,
}

fn boundary_gram(problem: &GalerkinProblem) -> DMatrix<f64> {
    let basis = &problem.disc.basis;
    let ends = basis.values(Family::Neumann, &basis.endpoints());
    let g = DMatrix::from_diagonal(&DVector::from_column_slice(&problem.data.gamma));
    &ends * g * ends.transpose()
}

impl LinearBlocks {
    pub fn new(problem: &GalerkinProblem, alpha: f64) -> Self {
        let m = problem.m();
        let basis = &problem.disc.basis;
        let b = basis.coupling();
        let gamma = boundary_gram(problem);
        let mut stiff_p = gamma.clone();
        for l in 0..=m {
            stiff_p[(l, l)] += basis.mu(l);
        }
        let nu = m;
        let np = m + 1;
        let blocks = (0..=m)
            .map(|j| {
                let tau = mode_norm_sq(j as i64);
                let jf = j as f64;
                if j == 0 {
                    let mut a = DMatrix::zeros(nu + np, nu + np);
                    for k in 0..nu {
                        a[(k, k)] = basis.lambda(k + 1);
                        for l in 0..np {
                            a[(k, nu + l)] = b[(k, l)];
                        }
                    }
                    a.view_mut((nu, nu), (np, np)).copy_from(&stiff_p);
                    return a * tau;
                }
                // offsets of u_j, u_{-j}, p_j, p_{-j}
                let (uj, um, pj, pm) = (0, nu, 2 * nu, 2 * nu + np);
                let n = 2 * nu + 2 * np;
                let mut a = DMatrix::zeros(n, n);
                for k in 0..nu {
                    let diag = basis.lambda(k + 1) - jf * jf;
                    // v_j and v_{-j}
                    a[(uj + k, uj + k)] = diag;
                    a[(uj + k, um + k)] = -jf;
                    a[(um + k, um + k)] = diag;
                    a[(um + k, uj + k)] = jf;
                    for l in 0..np {
                        a[(uj + k, pj + l)] = b[(k, l)];
                        a[(um + k, pm + l)] = b[(k, l)];
                    }
                }
                for l in 0..np {
                    // w_j and w_{-j}
                    a[(pj + l, pm + l)] = -(1.0 - alpha) * jf;
                    a[(pm + l, pj + l)] = (1.0 - alpha) * jf;
                    for k in 0..nu {
                        a[(pj + l, um + k)] = jf * b[(k, l)];
                        a[(pm + l, uj + k)] = -jf * b[(k, l)];
                    }
                }
                a.view_mut((pj, pj), (np, np)).copy_from(&stiff_p);
                a.view_mut((pm, pm), (np, np)).copy_from(&stiff_p);
                a * tau
            })
            .collect();
        Self { m, alpha, blocks }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn gather(&self, j: usize, u: &ModalCoeffs, p: &ModalCoeffs) -> DVector<f64> {
        let ji = j as i64;
        let parts: Vec<&[f64]> = if j == 0 {
            vec![u.row(0), p.row(0)]
        } else {
            vec![u.row(ji), u.row(-ji), p.row(ji), p.row(-ji)]
        };
        DVector::from_iterator(
            parts.iter().map(|s| s.len()).sum(),
            parts.into_iter().flatten().copied(),
        )
    }

    fn scatter(&self, j: usize, x: &DVector<f64>, u: &mut ModalCoeffs, p: &mut ModalCoeffs) {
        let ji = j as i64;
        let (nu, np) = (self.m, self.m + 1);
        let s = x.as_slice();
        if j == 0 {
            u.row_mut(0).copy_from_slice(&s[..nu]);
            p.row_mut(0).copy_from_slice(&s[nu..]);
        } else {
            u.row_mut(ji).copy_from_slice(&s[..nu]);
            u.row_mut(-ji).copy_from_slice(&s[nu..2 * nu]);
            p.row_mut(ji).copy_from_slice(&s[2 * nu..2 * nu + np]);
            p.row_mut(-ji).copy_from_slice(&s[2 * nu + np..]);
        }
    }

    /// Linear part applied to `U`.
    pub fn apply(&self, sol: &FourierSolution) -> ResidualVector {
        let mut out = ResidualVector::zeros(self.m, self.alpha);
        for j in 0..=self.m {
            let y = &self.blocks[j] * self.gather(j, &sol.u, &sol.p);
            self.scatter(j, &y, &mut out.v, &mut out.w);
        }
        out
    }

    /// Solve `L_α U = rhs` block by block.
    pub fn solve(&self, rhs: &ResidualVector, exec: crate::exec::Exec) -> Result<FourierSolution> {
        let rhs = rhs.as_solution();
        let parts = exec.try_map(self.m + 1, |j| {
            let b = self.gather(j, &rhs.u, &rhs.p);
            self.blocks[j]
                .clone()
                .lu()
                .solve(&b)
                .ok_or(Error::SingularBlock(j as i64))
        })?;
        let mut sol = FourierSolution::zeros(self.m);
        for (j, x) in parts.iter().enumerate() {
            self.scatter(j, x, &mut sol.u, &mut sol.p);
        }
        Ok(sol)
    }
}

/// Data part `D_α` with `T_α(U) = L_α U - D_α + α H(U)`.
pub fn data_vector(problem: &GalerkinProblem, alpha: f64) -> ResidualVector {
    let m = problem.m();
    let data = &problem.data;
    let basis = &problem.disc.basis;
    let ends = basis.values(Family::Neumann, &basis.endpoints());
    let mut out = ResidualVector::zeros(m, alpha);
    for j in -(m as i64)..=(m as i64) {
        let tau = mode_norm_sq(j);
        let idx = (j + m as i64) as usize;
        for (v, f) in out.v.row_mut(j).iter_mut().zip(data.f.row(j)) {
            *v = alpha * tau * f;
        }
        for (l, (w, h)) in out.w.row_mut(j).iter_mut().zip(data.h.row(j)).enumerate() {
            let bc: f64 = (0..2).map(|b| data.gamma[b] * ends[(l, b)] * data.p_star[b][idx]).sum();
            *w = alpha * tau * (h + bc);
        }
    }
    out
}

/// `α H(U) + L_α U - D_α`, given the tested hysteresis term `H(U)`.
pub fn combine(
    linear: &LinearBlocks,
    data: &ResidualVector,
    hyst: Option<&ModalCoeffs>,
    sol: &FourierSolution,
) -> Result<ResidualVector> {
    let alpha = linear.alpha();
    let mut r = linear.apply(sol);
    r.v = r.v.axpy(-1.0, &data.v)?;
    r.w = r.w.axpy(-1.0, &data.w)?;
    if let Some(h) = hyst {
        r.w = r.w.axpy(alpha, h)?;
    }
    Ok(r)
}

/// The residual `T_α(U)`.
pub fn assemble_residual(problem: &GalerkinProblem, sol: &FourierSolution, alpha: f64) -> Result<ResidualVector> {
    if sol.m() != problem.m() {
        return Err(Error::IndexMismatch(format!(
            "solution with m = {} for a problem with m = {}",
            sol.m(),
            problem.m()
        )));
    }
    let linear = LinearBlocks::new(problem, alpha);
    let data = data_vector(problem, alpha);
    let hyst = if alpha > 0.0 {
        Some(
            hysteresis_projection(&sol.p, &problem.disc, &problem.density, &problem.evaluator, problem.exec)?
                .coeffs,
        )
    } else {
        None
    };
    combine(&linear, &data, hyst.as_ref(), sol)
}
