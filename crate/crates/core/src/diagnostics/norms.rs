//! Periodic `L^q` norms over one period: trapezoid in time, a weighted sum
//! over spatial points (quadrature weights in the bulk, `γ` on the boundary).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Spatial weights of a periodic norm.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    /// Quadrature weights on `Ω`.
    Bulk(&'a [f64]),
    /// `γ(0), γ(L)`; the samples hold the endpoint values.
    Boundary([f64; 2]),
}

impl Region<'_> {
    fn weights(&self) -> &[f64] {
        match self {
            Region::Bulk(w) => w,
            Region::Boundary(g) => g,
        }
    }
}

/// `(∫_period Σ_x w_x |y(x,t)|^q dt)^{1/q}` for samples `y[(n, x)]` on a
/// uniform grid of step `dt`.
pub fn periodic_norm(samples: &DMatrix<f64>, q: f64, region: Region<'_>, dt: f64) -> Result<f64> {
    Ok(periodic_integral(samples, q, region, dt)?.powf(1.0 / q))
}

/// The `q`-th power of [`periodic_norm`].
pub fn periodic_integral(samples: &DMatrix<f64>, q: f64, region: Region<'_>, dt: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let w = region.weights();
    if samples.ncols() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: samples.ncols(),
        });
    }
    let mut total = 0.0;
    for n in 0..samples.nrows() {
        let row: f64 = w
            .iter()
            .enumerate()
            .map(|(x, wx)| wx * samples[(n, x)].abs().powf(q))
            .sum();
        total += row;
    }
    Ok(total * dt)
}
