//! Dirichlet and Neumann eigenbases of `-d²/dx²` on `(0, L)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Which eigenfamily a coefficient array refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `φ_k = √(2/L) sin(kπx/L)`, `k = 1..m`.
    Dirichlet,
    /// `ψ_0 = √(1/L)`, `ψ_l = √(2/L) cos(lπx/L)`, `l = 0..m`.
    Neumann,
}

impl Family {
    pub fn first(self) -> usize {
        match self {
            Family::Dirichlet => 1,
            Family::Neumann => 0,
        }
    }

    /// Number of retained modes for a mode count `m`.
    pub fn count(self, m: usize) -> usize {
        m + 1 - self.first()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialBasis {
    length: f64,
    a: f64,
    m: usize,
    quad: GaussLegendre,
    /// `phi[(k-1, q)] = φ_k(x_q)`.
    phi: DMatrix<f64>,
    dphi: DMatrix<f64>,
    /// `psi[(l, q)] = ψ_l(x_q)`.
    psi: DMatrix<f64>,
    dpsi: DMatrix<f64>,
}

impl SpatialBasis {
    pub fn new(length: f64, a: f64, m: usize, n_quad: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("domain length must be positive, got {length}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("elasticity coefficient must be positive, got {a}")));
        }
        if m == 0 {
            return Err(Error::Config("mode count m must be >= 1".into()));
        }
        if n_quad < 2 * m + 2 {
            return Err(Error::Aliasing(format!(
                "n_quad = {n_quad} spatial nodes cannot resolve m = {m} modes (need >= {})",
                2 * m + 2
            )));
        }
        let quad = GaussLegendre::on_interval(n_quad, 0.0, length)?;
        let mut basis = Self {
            length,
            a,
            m,
            quad,
            phi: DMatrix::zeros(0, 0),
            dphi: DMatrix::zeros(0, 0),
            psi: DMatrix::zeros(0, 0),
            dpsi: DMatrix::zeros(0, 0),
        };
        let nodes = basis.quad.nodes.clone();
        basis.phi = basis.values(Family::Dirichlet, &nodes);
        basis.dphi = basis.derivatives(Family::Dirichlet, &nodes);
        basis.psi = basis.values(Family::Neumann, &nodes);
        basis.dpsi = basis.derivatives(Family::Neumann, &nodes);
        Ok(basis)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn elasticity(&self) -> f64 {
        self.a
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[f64] {
        &self.quad.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.quad.weights
    }

    pub fn n_quad(&self) -> usize {
        self.quad.len()
    }

    fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.length
    }

    /// `λ_k = a (kπ/L)²`.
    pub fn lambda(&self, k: usize) -> f64 {
        self.a * self.wavenumber(k).powi(2)
    }

    /// `μ_l = (lπ/L)²`.
    pub fn mu(&self, l: usize) -> f64 {
        self.wavenumber(l).powi(2)
    }

    pub fn phi(&self, k: usize, x: f64) -> f64 {
        (2.0 / self.length).sqrt() * (self.wavenumber(k) * x).sin()
    }

    pub fn dphi(&self, k: usize, x: f64) -> f64 {
        let w = self.wavenumber(k);
        (2.0 / self.length).sqrt() * w * (w * x).cos()
    }

    pub fn psi(&self, l: usize, x: f64) -> f64 {
        if l == 0 {
            (1.0 / self.length).sqrt()
        } else {
            (2.0 / self.length).sqrt() * (self.wavenumber(l) * x).cos()
        }
    }

    pub fn dpsi(&self, l: usize, x: f64) -> f64 {
        let w = self.wavenumber(l);
        -(2.0 / self.length).sqrt() * w * (w * x).sin()
    }

    /// Mode values at arbitrary points: row = mode, column = point.
    pub fn values(&self, family: Family, xs: &[f64]) -> DMatrix<f64> {
        let first = family.first();
        DMatrix::from_fn(family.count(self.m), xs.len(), |i, q| match family {
            Family::Dirichlet => self.phi(i + first, xs[q]),
            Family::Neumann => self.psi(i + first, xs[q]),
        })
    }

    pub fn derivatives(&self, family: Family, xs: &[f64]) -> DMatrix<f64> {
        let first = family.first();
        DMatrix::from_fn(family.count(self.m), xs.len(), |i, q| match family {
            Family::Dirichlet => self.dphi(i + first, xs[q]),
            Family::Neumann => self.dpsi(i + first, xs[q]),
        })
    }

    /// Mode values at the quadrature nodes.
    pub fn at_nodes(&self, family: Family) -> &DMatrix<f64> {
        match family {
            Family::Dirichlet => &self.phi,
            Family::Neumann => &self.psi,
        }
    }

    pub fn derivatives_at_nodes(&self, family: Family) -> &DMatrix<f64> {
        match family {
            Family::Dirichlet => &self.dphi,
            Family::Neumann => &self.dpsi,
        }
    }

    /// Gram matrix of a family under the quadrature.
    pub fn gram(&self, family: Family) -> DMatrix<f64> {
        let v = self.at_nodes(family);
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(self.weights()));
        v * w * v.transpose()
    }

    /// `B[(k-1, l)] = ∫ ψ_l φ_k' dx` by quadrature.
    pub fn coupling(&self) -> DMatrix<f64> {
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(self.weights()));
        &self.dphi * w * self.psi.transpose()
    }

    /// Both endpoints of the domain.
    pub fn endpoints(&self) -> [f64; 2] {
        [0.0, self.length]
    }
}
