//! Discretisation, data and unknowns of the periodic Galerkin system.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::norms::{periodic_norm, Region};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hysteresis::{PreisachDensity, PreisachEvaluator};
use crate::spectral::{synthesize, Family, ModalCoeffs, SpatialBasis, TimeModes};

/// Spatial basis and time grid sharing one mode count `m`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub basis: SpatialBasis,
    pub modes: TimeModes,
}

impl Discretization {
    pub fn new(length: f64, a: f64, m: usize, n_t: usize, n_quad: usize) -> Result<Self> {
        Ok(Self {
            basis: SpatialBasis::new(length, a, m, n_quad)?,
            modes: TimeModes::new(m, n_t)?,
        })
    }

    pub fn m(&self) -> usize {
        self.basis.modes()
    }

    /// Same basis, different number of time samples.
    pub fn with_samples(&self, n_t: usize) -> Result<Self> {
        Ok(Self {
            basis: self.basis.clone(),
            modes: TimeModes::new(self.m(), n_t)?,
        })
    }
}

/// Time-Fourier coefficients of a scalar periodic series, indexed `-m..=m`.
pub type SeriesCoeffs = Vec<f64>;

/// Coefficients of the time derivative of a scalar series.
pub fn series_derivative(c: &[f64]) -> SeriesCoeffs {
    let m = (c.len() / 2) as i64;
    (-m..=m).map(|j| -(j as f64) * c[(m - j) as usize]).collect()
}

/// Samples of a scalar series on the time grid.
pub fn series_samples(c: &[f64], modes: &TimeModes) -> Vec<f64> {
    (modes.table() * DVector::from_column_slice(c)).as_slice().to_vec()
}

/// Forcing and boundary data, all given by their Galerkin coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemData {
    /// `f = Σ f_{jk} e_j φ_k`.
    pub f: ModalCoeffs,
    /// `h = Σ h_{jl} e_j ψ_l`.
    pub h: ModalCoeffs,
    /// Time coefficients of `p*` at `x = 0` and `x = L`.
    pub p_star: [SeriesCoeffs; 2],
    /// `γ(0), γ(L)`.
    pub gamma: [f64; 2],
}

/// The six norms entering the data amplitude and their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DataNorms {
    pub f: f64,
    pub f_t: f64,
    pub h: f64,
    pub h_t: f64,
    pub p_star: f64,
    pub p_star_t: f64,
    pub delta: f64,
}

impl ProblemData {
    pub fn zeros(m: usize, gamma: [f64; 2]) -> Self {
        Self {
            f: ModalCoeffs::zeros(m, Family::Dirichlet),
            h: ModalCoeffs::zeros(m, Family::Neumann),
            p_star: [vec![0.0; 2 * m + 1], vec![0.0; 2 * m + 1]],
            gamma,
        }
    }

    pub fn m(&self) -> usize {
        self.f.m
    }

    pub fn validate(&self, disc: &Discretization) -> Result<()> {
        let m = disc.m();
        if self.f.m != m || self.h.m != m || self.f.family != Family::Dirichlet || self.h.family != Family::Neumann {
            return Err(Error::IndexMismatch(format!(
                "data coefficients do not match the discretisation with m = {m}"
            )));
        }
        for (b, ps) in self.p_star.iter().enumerate() {
            if ps.len() != 2 * m + 1 {
                return Err(Error::IndexMismatch(format!(
                    "p* series at endpoint {b} has {} coefficients, expected {}",
                    ps.len(),
                    2 * m + 1
                )));
            }
        }
        if self.gamma.iter().any(|g| !(g.is_finite() && *g >= 0.0)) || self.gamma.iter().all(|&g| g == 0.0) {
            return Err(Error::Config(format!(
                "gamma = {:?}: both endpoint values must be >= 0 and at least one positive",
                self.gamma
            )));
        }
        let finite = |c: &[f64]| c.iter().all(|x| x.is_finite());
        if !(finite(&self.f.data) && finite(&self.h.data) && self.p_star.iter().all(|p| finite(p))) {
            return Err(Error::Config("data coefficients must be finite".into()));
        }
        Ok(())
    }

    /// Endpoint values of `p*` on the time grid, one column per endpoint.
    pub fn p_star_samples(&self, modes: &TimeModes) -> DMatrix<f64> {
        let cols: Vec<Vec<f64>> = self.p_star.iter().map(|c| series_samples(c, modes)).collect();
        DMatrix::from_fn(modes.samples(), 2, |n, b| cols[b][n])
    }

    /// Periodic norms of `f, f_t, h, h_t, p*, p*_t` and their maximum `δ`.
    pub fn norms(&self, disc: &Discretization) -> Result<DataNorms> {
        self.validate(disc)?;
        let (basis, modes) = (&disc.basis, &disc.modes);
        let dt = modes.dt();
        let bulk = |c: &ModalCoeffs| -> Result<f64> {
            periodic_norm(&synthesize(c, basis, modes)?, 2.0, Region::Bulk(basis.weights()), dt)
        };
        let boundary = |d: bool| -> Result<f64> {
            let mut data = self.clone();
            if d {
                data.p_star = [series_derivative(&self.p_star[0]), series_derivative(&self.p_star[1])];
            }
            periodic_norm(&data.p_star_samples(modes), 2.0, Region::Boundary(self.gamma), dt)
        };
        let mut n = DataNorms {
            f: bulk(&self.f)?,
            f_t: bulk(&self.f.time_derivative())?,
            h: bulk(&self.h)?,
            h_t: bulk(&self.h.time_derivative())?,
            p_star: boundary(false)?,
            p_star_t: boundary(true)?,
            delta: 0.0,
        };
        n.delta = [n.f, n.f_t, n.h, n.h_t, n.p_star, n.p_star_t]
            .into_iter()
            .fold(0.0, f64::max);
        Ok(n)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            f: self.f.scaled(s),
            h: self.h.scaled(s),
            p_star: [
                self.p_star[0].iter().map(|x| s * x).collect(),
                self.p_star[1].iter().map(|x| s * x).collect(),
            ],
            gamma: self.gamma,
        }
    }
}

/// The unknown vector `U = (u_{jk}, p_{jl})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSolution {
    pub u: ModalCoeffs,
    pub p: ModalCoeffs,
}

impl FourierSolution {
    pub fn zeros(m: usize) -> Self {
        Self {
            u: ModalCoeffs::zeros(m, Family::Dirichlet),
            p: ModalCoeffs::zeros(m, Family::Neumann),
        }
    }

    pub fn m(&self) -> usize {
        self.u.m
    }

    /// `(2m+1) m + (2m+1)(m+1)`.
    pub fn dim(&self) -> usize {
        self.u.data.len() + self.p.data.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.u.data.iter().chain(&self.p.data).copied().collect()
    }

    pub fn from_vec(m: usize, v: &[f64]) -> Result<Self> {
        let mut s = Self::zeros(m);
        if v.len() != s.dim() {
            return Err(Error::LengthMismatch {
                expected: s.dim(),
                got: v.len(),
            });
        }
        let nu = s.u.data.len();
        s.u.data.copy_from_slice(&v[..nu]);
        s.p.data.copy_from_slice(&v[nu..]);
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        (self.u.norm().powi(2) + self.p.norm().powi(2)).sqrt()
    }

    /// `(1 - θ) self + θ other`.
    pub fn blend(&self, theta: f64, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.scaled(1.0 - theta).axpy(theta, &other.u)?,
            p: self.p.scaled(1.0 - theta).axpy(theta, &other.p)?,
        })
    }

    pub fn resized(&self, m: usize) -> Self {
        Self {
            u: self.u.resized(m),
            p: self.p.resized(m),
        }
    }
}

/// Everything needed to evaluate the Galerkin residual.
#[derive(Debug, Clone)]
pub struct GalerkinProblem {
    pub disc: Discretization,
    pub data: ProblemData,
    pub density: PreisachDensity,
    pub evaluator: PreisachEvaluator,
    pub exec: Exec,
}

impl GalerkinProblem {
    pub fn new(disc: Discretization, data: ProblemData, density: PreisachDensity) -> Result<Self> {
        data.validate(&disc)?;
        density.constants()?;
        Ok(Self {
            disc,
            data,
            density,
            evaluator: PreisachEvaluator::default(),
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn m(&self) -> usize {
        self.disc.m()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coefficient_count() {
        for m in [1, 4, 8] {
            assert_eq!(FourierSolution::zeros(m).dim(), (2 * m + 1) * m + (2 * m + 1) * (m + 1));
        }
    }

    #[test]
    fn delta_of_single_mode_forcing() {
        let disc = Discretization::new(1.0, 1.0, 4, 64, 32).unwrap();
        let mut data = ProblemData::zeros(4, [1.0, 1.0]);
        data.f.set(1, 1, 0.01);
        let n = data.norms(&disc).unwrap();
        // ‖δ sin t φ_1‖ = δ √π, and the same for the time derivative
        assert!((n.f - 0.01 * PI.sqrt()).abs() < 1e-14);
        assert!((n.f_t - n.f).abs() < 1e-14);
        assert_eq!(n.delta, n.f);
        assert_eq!((n.h, n.p_star), (0.0, 0.0));
    }

    #[test]
    fn boundary_norm_uses_gamma() {
        let disc = Discretization::new(1.0, 1.0, 2, 32, 16).unwrap();
        let mut data = ProblemData::zeros(2, [4.0, 0.0]);
        data.p_star[0][2] = 1.0; // cos 0 = 1 at x = 0
        data.p_star[1][2] = 7.0; // ignored, γ(L) = 0
        let n = data.norms(&disc).unwrap();
        assert!((n.p_star - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
        assert_eq!(n.p_star_t, 0.0);
    }

    #[test]
    fn gamma_must_be_somewhere_positive() {
        let disc = Discretization::new(1.0, 1.0, 2, 32, 16).unwrap();
        assert!(ProblemData::zeros(2, [0.0, 0.0]).validate(&disc).is_err());
        assert!(ProblemData::zeros(2, [-1.0, 1.0]).validate(&disc).is_err());
        assert!(ProblemData::zeros(3, [1.0, 1.0]).validate(&disc).is_err());
    }

    #[test]
    fn vector_round_trip() {
        let mut s = FourierSolution::zeros(2);
        s.u.set(-1, 2, 3.0);
        s.p.set(2, 0, -1.0);
        assert_eq!(FourierSolution::from_vec(2, &s.to_vec()).unwrap(), s);
        assert!(FourierSolution::from_vec(2, &[0.0]).is_err());
    }
}
