//! Coefficient arrays `c_{jk}` of space-time fields and their synthesis on,
//! and projection from, the space-time grid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{Family, SpatialBasis};
use super::modes::{mode_norm_sq, TimeModes};
use crate::error::{Error, Result};

/// Coefficients `c_{jk}` for `j = -m..m` and the modes of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalCoeffs {
    pub m: usize,
    pub family: Family,
    /// Row-major by frequency: `data[(j + m) * count + (k - first)]`.
    pub data: Vec<f64>,
}

impl ModalCoeffs {
    pub fn zeros(m: usize, family: Family) -> Self {
        Self {
            m,
            family,
            data: vec![0.0; (2 * m + 1) * family.count(m)],
        }
    }

    pub fn count(&self) -> usize {
        self.family.count(self.m)
    }

    fn offset(&self, j: i64, k: usize) -> usize {
        let m = self.m as i64;
        assert!(j.abs() <= m, "frequency {j} outside -{m}..{m}");
        let first = self.family.first();
        assert!(k >= first && k <= self.m, "mode {k} outside {first}..{}", self.m);
        (j + m) as usize * self.count() + (k - first)
    }

    pub fn get(&self, j: i64, k: usize) -> f64 {
        self.data[self.offset(j, k)]
    }

    pub fn set(&mut self, j: i64, k: usize, value: f64) {
        let i = self.offset(j, k);
        self.data[i] = value;
    }

    /// Row of the coefficients with frequency `j`.
    pub fn row(&self, j: i64) -> &[f64] {
        let c = self.count();
        let start = (j + self.m as i64) as usize * c;
        &self.data[start..start + c]
    }

    pub fn row_mut(&mut self, j: i64) -> &mut [f64] {
        let c = self.count();
        let start = (j + self.m as i64) as usize * c;
        &mut self.data[start..start + c]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.family != other.family {
            return Err(Error::IndexMismatch(format!(
                "coefficient arrays ({:?}, m = {}) and ({:?}, m = {})",
                self.family, self.m, other.family, other.m
            )));
        }
        Ok(())
    }

    /// Dense `(2m+1) × count` matrix view.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2 * self.m + 1, self.count(), &self.data)
    }

    pub fn from_matrix(m: usize, family: Family, mat: &DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != 2 * m + 1 || mat.ncols() != family.count(m) {
            return Err(Error::IndexMismatch(format!(
                "matrix {}x{} does not hold {family:?} coefficients for m = {m}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut out = Self::zeros(m, family);
        for r in 0..mat.nrows() {
            for c in 0..mat.ncols() {
                out.data[r * mat.ncols() + c] = mat[(r, c)];
            }
        }
        Ok(out)
    }

    /// Coefficients of the time derivative: `ĉ_{jk} = -j c_{-j,k}`.
    pub fn time_derivative(&self) -> Self {
        let mut out = Self::zeros(self.m, self.family);
        let m = self.m as i64;
        for j in -m..=m {
            let src = self.row(-j).to_vec();
            for (d, s) in out.row_mut(j).iter_mut().zip(src) {
                *d = -(j as f64) * s;
            }
        }
        out
    }

    /// Coefficients of the `order`-th time derivative.
    pub fn time_derivative_n(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |c, _| c.time_derivative())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= s);
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Copy into a different mode count, dropping or zero-padding modes.
    pub fn resized(&self, m: usize) -> Self {
        let mut out = Self::zeros(m, self.family);
        let mm = self.m.min(m) as i64;
        for j in -mm..=mm {
            for k in self.family.first()..=self.m.min(m) {
                out.set(j, k, self.get(j, k));
            }
        }
        out
    }
}

/// Values of a field on the grid: `values[(n, q)]` at `(t_n, x_q)`.
pub type FieldSamples = DMatrix<f64>;

fn check_modes(coeffs: &ModalCoeffs, basis: &SpatialBasis, modes: &TimeModes) -> Result<()> {
    if coeffs.m != basis.modes() || coeffs.m != modes.modes() {
        return Err(Error::IndexMismatch(format!(
            "coefficients for m = {} used with basis m = {} and time modes m = {}",
            coeffs.m,
            basis.modes(),
            modes.modes()
        )));
    }
    Ok(())
}

/// The double sum `Σ_j Σ_k c_{jk} e_j(t_n) χ_k(x_q)` at the quadrature nodes.
pub fn synthesize(coeffs: &ModalCoeffs, basis: &SpatialBasis, modes: &TimeModes) -> Result<FieldSamples> {
    check_modes(coeffs, basis, modes)?;
    Ok(modes.table() * (coeffs.matrix() * basis.at_nodes(coeffs.family)))
}

/// Synthesis at arbitrary points `xs`.
pub fn synthesize_at(
    coeffs: &ModalCoeffs,
    basis: &SpatialBasis,
    modes: &TimeModes,
    xs: &[f64],
) -> Result<FieldSamples> {
    check_modes(coeffs, basis, modes)?;
    Ok(modes.table() * (coeffs.matrix() * basis.values(coeffs.family, xs)))
}

/// Spatial derivative of the field at the quadrature nodes.
pub fn synthesize_dx(coeffs: &ModalCoeffs, basis: &SpatialBasis, modes: &TimeModes) -> Result<FieldSamples> {
    check_modes(coeffs, basis, modes)?;
    Ok(modes.table() * (coeffs.matrix() * basis.derivatives_at_nodes(coeffs.family)))
}

/// Discrete `L²(Ω × period)` projection onto the modes of `family`:
/// trapezoid in time, Gauss–Legendre in space.
pub fn project_field(
    samples: &FieldSamples,
    family: Family,
    basis: &SpatialBasis,
    modes: &TimeModes,
) -> Result<ModalCoeffs> {
    if samples.nrows() != modes.samples() || samples.ncols() != basis.n_quad() {
        return Err(Error::Grid(format!(
            "field of {}x{} samples on a {}x{} grid",
            samples.nrows(),
            samples.ncols(),
            modes.samples(),
            basis.n_quad()
        )));
    }
    let m = modes.modes();
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(basis.weights()));
    let mut c = modes.table().transpose() * samples * w * basis.at_nodes(family).transpose();
    for (row, j) in modes.frequencies().enumerate() {
        let s = modes.dt() / mode_norm_sq(j);
        c.row_mut(row).scale_mut(s);
    }
    ModalCoeffs::from_matrix(m, family, &c)
}

/// Fourier coefficients `(1/τ_j) Σ_n Δt s(t_n) e_j(t_n)` of a scalar series.
pub fn project_series(series: &[f64], modes: &TimeModes) -> Result<Vec<f64>> {
    if series.len() != modes.samples() {
        return Err(Error::LengthMismatch {
            expected: modes.samples(),
            got: series.len(),
        });
    }
    let s = DVector::from_column_slice(series);
    let c = modes.table().transpose() * s;
    Ok(modes
        .frequencies()
        .zip(c.iter())
        .map(|(j, &v)| v * modes.dt() / mode_norm_sq(j))
        .collect())
}
