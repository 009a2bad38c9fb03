//! Real Fourier modes in time, `e_j(t) = sin jt` for `j >= 1` and
//! `cos jt` for `j <= 0`, on a uniform grid over one period.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeModes {
    m: usize,
    n_t: usize,
    /// `table[(n, j + m)] = e_j(t_n)`.
    table: DMatrix<f64>,
}

/// `e_j(t)`.
pub fn mode(j: i64, t: f64) -> f64 {
    if j >= 1 {
        (j as f64 * t).sin()
    } else {
        (j as f64 * t).cos()
    }
}

/// `d/dt e_j = j e_{-j}`.
pub fn mode_derivative(j: i64, t: f64) -> f64 {
    j as f64 * mode(-j, t)
}

/// `∫_0^{2π} e_j² dt`.
pub fn mode_norm_sq(j: i64) -> f64 {
    if j == 0 {
        2.0 * PI
    } else {
        PI
    }
}

impl TimeModes {
    pub fn new(m: usize, n_t: usize) -> Result<Self> {
        if n_t <= 2 * m + 1 {
            return Err(Error::Aliasing(format!(
                "N_t = {n_t} time samples cannot resolve m = {m} harmonics (need > {})",
                2 * m + 1
            )));
        }
        let mut modes = Self {
            m,
            n_t,
            table: DMatrix::zeros(0, 0),
        };
        modes.table = DMatrix::from_fn(n_t, 2 * m + 1, |n, i| {
            mode(i as i64 - m as i64, modes.time(n))
        });
        Ok(modes)
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn samples(&self) -> usize {
        self.n_t
    }

    pub fn dt(&self) -> f64 {
        2.0 * PI / self.n_t as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.n_t as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|n| self.time(n)).collect()
    }

    /// Frequencies `-m..=m` in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let m = self.m as i64;
        -m..=m
    }

    pub fn index(&self, j: i64) -> usize {
        (j + self.m as i64) as usize
    }

    /// Mode values on the grid, one column per frequency.
    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    /// Trapezoid-rule Gram matrix of the modes over one period.
    pub fn gram(&self) -> DMatrix<f64> {
        self.table.transpose() * &self.table * self.dt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_orthogonality() {
        let modes = TimeModes::new(8, 18).unwrap();
        let g = modes.gram();
        for (a, j) in modes.frequencies().enumerate() {
            for (b, _) in modes.frequencies().enumerate() {
                let expect = if a == b { mode_norm_sq(j) } else { 0.0 };
                assert!((g[(a, b)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn refuses_aliasing() {
        assert!(matches!(TimeModes::new(8, 17), Err(Error::Aliasing(_))));
    }

    #[test]
    fn derivative_of_modes() {
        let h = 1e-6;
        for j in -3..=3 {
            for &t in &[0.1, 1.3, 4.0] {
                let fd = (mode(j, t + h) - mode(j, t - h)) / (2.0 * h);
                assert!((fd - mode_derivative(j, t)).abs() < 1e-8);
            }
        }
    }
}
