//! Preisach densities `ρ(r, v)` on the half plane `r > 0`, their derived
//! constants and the convexified density `ρ_R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

const SIMPSON_TOL: f64 = 1e-10;

/// Parametric families of Preisach densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DensityFamily {
    /// `ρ = value` for `r_min <= r <= r_max`, zero elsewhere.
    Uniform {
        value: f64,
        #[serde(default)]
        r_min: f64,
        #[serde(default)]
        r_max: Option<f64>,
    },
    /// `ρ = amplitude * exp(-(v / width)^2)` for `r_min <= r <= r_max`.
    GaussianInV {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        r_min: f64,
        #[serde(default)]
        r_max: Option<f64>,
    },
    /// `ρ = amplitude * exp(-r / r_scale) * exp(-|v| / v_scale)`.
    SeparableExponential {
        amplitude: f64,
        r_scale: f64,
        v_scale: f64,
    },
    /// Bilinear interpolation of `values[i][j] = ρ(r_grid[i], v_grid[j])`.
    /// Queries are clamped to the table in `v` and below `r_grid[0]`;
    /// the density vanishes for `r > r_grid.last()`.
    TabulatedGrid {
        r_grid: Vec<f64>,
        v_grid: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

/// Constants derived from a density and a convexity radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityConstants {
    /// `∫∫ ρ dv dr`; infinite for densities that do not decay in `v`.
    pub c_rho: f64,
    /// `∫ ρ*(r) dr`.
    pub c_rho_star: f64,
    /// `min ρ` over `{r + |v| <= R}`.
    pub a_r: f64,
    /// `max |∂ρ/∂v|` over `{r + |v| <= R}`.
    pub c_r: f64,
    /// `A_R / 2 - R C_R`, required to be positive.
    pub k_r: f64,
    /// Global upper bound of `ρ`.
    pub h_rho: f64,
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn in_support(r: f64, r_min: f64, r_max: Option<f64>) -> bool {
    r >= r_min && r_max.is_none_or(|m| r <= m)
}

fn support_len(r_min: f64, r_max: Option<f64>) -> f64 {
    r_max.map_or(f64::INFINITY, |m| m - r_min)
}

/// Index `i` with `grid[i] <= x <= grid[i+1]` and the local coordinate.
fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    if n == 1 || x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0);
    }
    let i = grid.partition_point(|&g| g <= x) - 1;
    let i = i.min(n - 2);
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]))
}

impl DensityFamily {
    pub fn name(&self) -> &'static str {
        match self {
            DensityFamily::Uniform { .. } => "uniform",
            DensityFamily::GaussianInV { .. } => "gaussian-in-v",
            DensityFamily::SeparableExponential { .. } => "separable-exponential",
            DensityFamily::TabulatedGrid { .. } => "tabulated-grid",
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match self {
            DensityFamily::Uniform { value, r_min, r_max }
            | DensityFamily::GaussianInV {
                amplitude: value,
                r_min,
                r_max,
                ..
            } => {
                if !finite_nonneg(*value) {
                    return bad(format!("{}: amplitude must be finite and >= 0", self.name()));
                }
                if !finite_nonneg(*r_min) {
                    return bad(format!("{}: r_min must be finite and >= 0", self.name()));
                }
                if let Some(m) = r_max {
                    if !(m.is_finite() && *m > *r_min) {
                        return bad(format!("{}: r_max must exceed r_min", self.name()));
                    }
                }
                if let DensityFamily::GaussianInV { width, .. } = self {
                    if !(width.is_finite() && *width > 0.0) {
                        return bad("gaussian-in-v: width must be positive".into());
                    }
                }
            }
            DensityFamily::SeparableExponential {
                amplitude,
                r_scale,
                v_scale,
            } => {
                if !finite_nonneg(*amplitude) {
                    return bad("separable-exponential: amplitude must be >= 0".into());
                }
                if !(r_scale.is_finite() && *r_scale > 0.0 && v_scale.is_finite() && *v_scale > 0.0)
                {
                    return bad("separable-exponential: scales must be positive".into());
                }
            }
            DensityFamily::TabulatedGrid {
                r_grid,
                v_grid,
                values,
            } => {
                if r_grid.len() < 2 || v_grid.len() < 2 {
                    return bad("tabulated-grid: need at least 2 nodes per axis".into());
                }
                let increasing = |g: &[f64]| g.windows(2).all(|w| w[0] < w[1]);
                if !increasing(r_grid) || !increasing(v_grid) {
                    return bad("tabulated-grid: grids must be strictly increasing".into());
                }
                if r_grid[0] < 0.0 {
                    return bad("tabulated-grid: r_grid must be >= 0".into());
                }
                if values.len() != r_grid.len() || values.iter().any(|row| row.len() != v_grid.len())
                {
                    return bad(format!(
                        "tabulated-grid: values must be {} rows of {} entries",
                        r_grid.len(),
                        v_grid.len()
                    ));
                }
                if values.iter().flatten().any(|&x| !finite_nonneg(x)) {
                    return bad("tabulated-grid: values must be finite and >= 0".into());
                }
            }
        }
        Ok(())
    }

    /// `ρ(r, v)`.
    pub fn rho(&self, r: f64, v: f64) -> f64 {
        match self {
            DensityFamily::Uniform { value, r_min, r_max } => {
                if in_support(r, *r_min, *r_max) {
                    *value
                } else {
                    0.0
                }
            }
            DensityFamily::GaussianInV {
                amplitude,
                width,
                r_min,
                r_max,
            } => {
                if in_support(r, *r_min, *r_max) {
                    let z = v / width;
                    amplitude * (-z * z).exp()
                } else {
                    0.0
                }
            }
            DensityFamily::SeparableExponential {
                amplitude,
                r_scale,
                v_scale,
            } => amplitude * (-r / r_scale - v.abs() / v_scale).exp(),
            DensityFamily::TabulatedGrid {
                r_grid,
                v_grid,
                values,
            } => {
                if r > *r_grid.last().unwrap() {
                    return 0.0;
                }
                let (i, s) = locate(r_grid, r);
                let (j, w) = locate(v_grid, v);
                let row = |k: usize| values[k][j] * (1.0 - w) + values[k][j + 1] * w;
                row(i) * (1.0 - s) + row(i + 1) * s
            }
        }
    }

    /// `∂ρ/∂v`; right derivative at the kink of the separable family,
    /// centred grid differences for tabulated densities.
    pub fn d_rho_dv(&self, r: f64, v: f64) -> f64 {
        match self {
            DensityFamily::Uniform { .. } => 0.0,
            DensityFamily::GaussianInV { width, .. } => {
                -2.0 * v / (width * width) * self.rho(r, v)
            }
            DensityFamily::SeparableExponential { v_scale, .. } => {
                -sign(v) / v_scale * self.rho(r, v)
            }
            DensityFamily::TabulatedGrid {
                r_grid,
                v_grid,
                values,
            } => {
                if r > *r_grid.last().unwrap() {
                    return 0.0;
                }
                let nv = v_grid.len();
                let node_derivative = |k: usize, j: usize| {
                    let (a, b) = if j == 0 {
                        (0, 1)
                    } else if j == nv - 1 {
                        (nv - 2, nv - 1)
                    } else {
                        (j - 1, j + 1)
                    };
                    (values[k][b] - values[k][a]) / (v_grid[b] - v_grid[a])
                };
                let (i, s) = locate(r_grid, r);
                let (j, w) = locate(v_grid, v);
                let row = |k: usize| node_derivative(k, j) * (1.0 - w) + node_derivative(k, j + 1) * w;
                row(i) * (1.0 - s) + row(i + 1) * s
            }
        }
    }

    /// Dominating function `ρ*(r) >= ρ(r, v)`.
    pub fn rho_star(&self, r: f64) -> f64 {
        match self {
            DensityFamily::Uniform { value, r_min, r_max }
            | DensityFamily::GaussianInV {
                amplitude: value,
                r_min,
                r_max,
                ..
            } => {
                if in_support(r, *r_min, *r_max) {
                    *value
                } else {
                    0.0
                }
            }
            DensityFamily::SeparableExponential {
                amplitude, r_scale, ..
            } => amplitude * (-r / r_scale).exp(),
            DensityFamily::TabulatedGrid { r_grid, values, .. } => {
                if r > *r_grid.last().unwrap() {
                    return 0.0;
                }
                let row_max = |k: usize| values[k].iter().cloned().fold(0.0, f64::max);
                let (i, s) = locate(r_grid, r);
                row_max(i) * (1.0 - s) + row_max(i + 1) * s
            }
        }
    }

    /// Global upper bound `H_ρ = sup ρ`.
    pub fn h_rho(&self) -> f64 {
        match self {
            DensityFamily::Uniform { value, .. } => *value,
            DensityFamily::GaussianInV { amplitude, .. }
            | DensityFamily::SeparableExponential { amplitude, .. } => *amplitude,
            DensityFamily::TabulatedGrid { values, .. } => {
                values.iter().flatten().cloned().fold(0.0, f64::max)
            }
        }
    }

    /// `C_ρ = ∫∫ ρ dv dr`.
    pub fn c_rho(&self) -> f64 {
        match self {
            DensityFamily::Uniform { value, .. } => {
                if *value == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            DensityFamily::GaussianInV {
                amplitude,
                width,
                r_min,
                r_max,
            } => {
                if *amplitude == 0.0 {
                    0.0
                } else {
                    amplitude * width * std::f64::consts::PI.sqrt() * support_len(*r_min, *r_max)
                }
            }
            DensityFamily::SeparableExponential {
                amplitude,
                r_scale,
                v_scale,
            } => 2.0 * amplitude * r_scale * v_scale,
            DensityFamily::TabulatedGrid {
                r_grid,
                v_grid,
                values,
            } => {
                let edge_mass = values
                    .iter()
                    .any(|row| row[0] > 0.0 || *row.last().unwrap() > 0.0);
                if edge_mass {
                    return f64::INFINITY;
                }
                // bilinear interpolant: trapezoid rule is exact
                let row_integral = |row: &Vec<f64>| trapezoid(v_grid, row);
                let rows: Vec<f64> = values.iter().map(row_integral).collect();
                trapezoid(r_grid, &rows) + r_grid[0] * rows[0]
            }
        }
    }

    /// `C_ρ* = ∫ ρ*(r) dr`.
    pub fn c_rho_star(&self) -> f64 {
        match self {
            DensityFamily::Uniform { value, r_min, r_max }
            | DensityFamily::GaussianInV {
                amplitude: value,
                r_min,
                r_max,
                ..
            } => {
                if *value == 0.0 {
                    0.0
                } else {
                    value * support_len(*r_min, *r_max)
                }
            }
            DensityFamily::SeparableExponential {
                amplitude, r_scale, ..
            } => amplitude * r_scale,
            DensityFamily::TabulatedGrid { r_grid, values, .. } => {
                let maxima: Vec<f64> = values
                    .iter()
                    .map(|row| row.iter().cloned().fold(0.0, f64::max))
                    .collect();
                trapezoid(r_grid, &maxima) + r_grid[0] * maxima[0]
            }
        }
    }

    /// `(∫_0^ξ ρ(r,v) dv, ∫_0^ξ v ρ(r,v) dv)`.
    pub fn moments(&self, r: f64, xi: f64) -> (f64, f64) {
        if xi == 0.0 {
            return (0.0, 0.0);
        }
        match self {
            DensityFamily::Uniform { value, r_min, r_max } => {
                if in_support(r, *r_min, *r_max) {
                    (value * xi, 0.5 * value * xi * xi)
                } else {
                    (0.0, 0.0)
                }
            }
            DensityFamily::GaussianInV {
                amplitude,
                width,
                r_min,
                r_max,
            } => {
                if !in_support(r, *r_min, *r_max) {
                    return (0.0, 0.0);
                }
                let z = xi / width;
                let m0 = amplitude * width * 0.5 * std::f64::consts::PI.sqrt() * libm::erf(z);
                let m1 = -0.5 * amplitude * width * width * (-z * z).exp_m1();
                (m0, m1)
            }
            DensityFamily::SeparableExponential {
                amplitude,
                r_scale,
                v_scale,
            } => {
                let scale = amplitude * (-r / r_scale).exp();
                let a = xi.abs() / v_scale;
                let m0 = -sign(xi) * v_scale * (-a).exp_m1();
                // 1 - e^{-a}(1 + a), with a series near zero
                let tail = if a < 1e-3 {
                    a * a * (0.5 - a / 3.0 + a * a / 8.0)
                } else {
                    -(-a).exp_m1() - a * (-a).exp()
                };
                (scale * m0, scale * v_scale * v_scale * tail)
            }
            DensityFamily::TabulatedGrid { r_grid, v_grid, .. } => {
                if r > *r_grid.last().unwrap() {
                    return (0.0, 0.0);
                }
                let (lo, hi, s) = if xi > 0.0 { (0.0, xi, 1.0) } else { (xi, 0.0, -1.0) };
                // split at table nodes, each piece is linear in v
                let mut cuts = vec![lo];
                cuts.extend(v_grid.iter().cloned().filter(|&v| v > lo && v < hi));
                cuts.push(hi);
                let mut m0 = 0.0;
                let mut m1 = 0.0;
                for w in cuts.windows(2) {
                    m0 += adaptive_simpson(&|v| self.rho(r, v), w[0], w[1], SIMPSON_TOL);
                    m1 += adaptive_simpson(&|v| v * self.rho(r, v), w[0], w[1], SIMPSON_TOL);
                }
                (s * m0, s * m1)
            }
        }
    }

    /// Values of `r` across which `ρ` is not smooth in `r`.
    pub fn r_breaks(&self) -> Vec<f64> {
        match self {
            DensityFamily::Uniform { r_min, r_max, .. }
            | DensityFamily::GaussianInV { r_min, r_max, .. } => {
                let mut b = Vec::new();
                if *r_min > 0.0 {
                    b.push(*r_min);
                }
                b.extend(r_max.iter().cloned());
                b
            }
            DensityFamily::SeparableExponential { .. } => Vec::new(),
            DensityFamily::TabulatedGrid { r_grid, .. } => r_grid.clone(),
        }
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// A density with its convexity radius `R` and, once validated, its derived
/// constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreisachDensity {
    pub family: DensityFamily,
    pub radius: f64,
    pub constants: Option<DensityConstants>,
}

/// Default resolution of the dense `(r, v)` grid used for the extremal
/// searches over `{r + |v| <= R}`.
pub const DEFAULT_GRID_RESOLUTION: usize = 200;

impl PreisachDensity {
    /// A density that has not been checked against the convexity hypotheses.
    pub fn unvalidated(family: DensityFamily, radius: f64) -> Self {
        Self {
            family,
            radius,
            constants: None,
        }
    }

    /// Build and validate; fails unless `A_R > 0` and `A_R/2 - R C_R > 0`.
    pub fn new(family: DensityFamily, radius: f64, resolution: usize) -> Result<Self> {
        let mut d = Self::unvalidated(family, radius);
        d.constants = Some(validate_density(&d, resolution)?);
        Ok(d)
    }

    pub fn uniform(value: f64, radius: f64) -> Result<Self> {
        Self::new(
            DensityFamily::Uniform {
                value,
                r_min: 0.0,
                r_max: None,
            },
            radius,
            DEFAULT_GRID_RESOLUTION,
        )
    }

    pub fn gaussian(amplitude: f64, width: f64, radius: f64) -> Result<Self> {
        Self::new(
            DensityFamily::GaussianInV {
                amplitude,
                width,
                r_min: 0.0,
                r_max: None,
            },
            radius,
            DEFAULT_GRID_RESOLUTION,
        )
    }

    pub fn constants(&self) -> Result<&DensityConstants> {
        self.constants.as_ref().ok_or(Error::UnvalidatedDensity)
    }

    pub fn rho(&self, r: f64, v: f64) -> f64 {
        self.family.rho(r, v)
    }

    /// The convexified density `ρ_R`.
    pub fn convexified(&self) -> Result<ConvexifiedDensity<'_>> {
        self.constants()?;
        Ok(ConvexifiedDensity { density: self })
    }
}

/// `(A_R, C_R)` by a dense-grid extremal search over `{r + |v| <= R}`.
fn extremal_search(family: &DensityFamily, radius: f64, n: usize) -> (f64, f64) {
    let mut a_r = f64::INFINITY;
    let mut c_r: f64 = 0.0;
    for i in 0..=n {
        let r = radius * i as f64 / n as f64;
        let half = radius - r;
        let nv = (2 * (n - i)).max(1);
        for k in 0..=nv {
            let v = -half + 2.0 * half * k as f64 / nv as f64;
            a_r = a_r.min(family.rho(r, v));
            c_r = c_r.max(family.d_rho_dv(r, v).abs());
        }
    }
    (a_r, c_r)
}

/// Compute the derived constants of `density` and check the convexity
/// hypotheses on the dense grid of the given resolution.
pub fn validate_density(density: &PreisachDensity, resolution: usize) -> Result<DensityConstants> {
    let family = &density.family;
    family.check()?;
    let radius = density.radius;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidDensity(format!(
            "convexity radius must be positive, got {radius}"
        )));
    }
    if resolution < 2 {
        return Err(Error::Grid("density grid resolution must be >= 2".into()));
    }
    check_domination(family, radius, resolution)?;

    let (a_r, c_r) = extremal_search(family, radius, resolution);
    if a_r <= 0.0 {
        return Err(Error::DegenerateDensity { radius, a_r });
    }
    let k_r = 0.5 * a_r - radius * c_r;
    if k_r <= 0.0 {
        return Err(Error::ConvexityRadiusTooLarge {
            radius,
            margin: k_r,
            suggested: suggest_radius(family, radius, c_r, resolution),
        });
    }
    Ok(DensityConstants {
        c_rho: family.c_rho(),
        c_rho_star: family.c_rho_star(),
        a_r,
        c_r,
        k_r,
        h_rho: family.h_rho(),
    })
}

/// `0 <= ρ <= ρ*` on a sample of the half plane.
fn check_domination(family: &DensityFamily, radius: f64, n: usize) -> Result<()> {
    let r_extent = match family {
        DensityFamily::TabulatedGrid { r_grid, .. } => *r_grid.last().unwrap() * 1.1,
        DensityFamily::Uniform { r_max: Some(m), .. }
        | DensityFamily::GaussianInV { r_max: Some(m), .. } => m * 1.1,
        _ => 4.0 * radius,
    };
    let v_extent = match family {
        DensityFamily::TabulatedGrid { v_grid, .. } => {
            v_grid[0].abs().max(v_grid.last().unwrap().abs()) * 1.1
        }
        _ => 4.0 * radius,
    };
    for i in 0..=n {
        let r = r_extent * i as f64 / n as f64;
        let bound = family.rho_star(r);
        for k in 0..=n {
            let v = -v_extent + 2.0 * v_extent * k as f64 / n as f64;
            let rho = family.rho(r, v);
            if rho < 0.0 || rho > bound * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidDensity(format!(
                    "rho({r}, {v}) = {rho} outside [0, rho*(r) = {bound}]"
                )));
            }
        }
    }
    Ok(())
}

/// Largest `R' <= R` (bisection) with `A_{R'}/2 - R' C > 0`, where `C` is
/// the Lipschitz bound found for the rejected radius. Since `C_{R'} <= C`,
/// the suggestion satisfies the condition with margin.
fn suggest_radius(family: &DensityFamily, radius: f64, c_r: f64, n: usize) -> f64 {
    let feasible = |s: f64| {
        let (a, _) = extremal_search(family, s, n);
        0.5 * a - s * c_r > 0.0
    };
    let mut lo = 0.0;
    let mut hi = radius;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * radius {
            break;
        }
    }
    lo
}

/// Evaluator of the convexified density
///
/// ```text
/// ρ_R(r, v) = ρ(r, v)          r + |v| <= R
///             ρ(r, -(R - r))   v < -(R - r), r <= R
///             ρ(r,   R - r )   v >   R - r , r <= R
///             ρ(R, 0)          r > R
/// ```
#[derive(Debug, Clone, Copy)]
pub struct ConvexifiedDensity<'a> {
    density: &'a PreisachDensity,
}

impl<'a> ConvexifiedDensity<'a> {
    pub fn density(&self) -> &'a PreisachDensity {
        self.density
    }

    pub fn radius(&self) -> f64 {
        self.density.radius
    }

    pub fn rho_r(&self, r: f64, v: f64) -> f64 {
        let radius = self.density.radius;
        let f = &self.density.family;
        if r > radius {
            return f.rho(radius, 0.0);
        }
        let band = radius - r;
        if v < -band {
            f.rho(r, -band)
        } else if v > band {
            f.rho(r, band)
        } else {
            f.rho(r, v)
        }
    }

    /// Inner moments of `ρ_R`, reusing the closed forms of `ρ` on the
    /// interior part of `[0, ξ]`.
    pub fn moments(&self, r: f64, xi: f64) -> (f64, f64) {
        if xi == 0.0 {
            return (0.0, 0.0);
        }
        let radius = self.density.radius;
        let f = &self.density.family;
        if r > radius {
            let c = f.rho(radius, 0.0);
            return (c * xi, 0.5 * c * xi * xi);
        }
        let band = radius - r;
        if xi.abs() <= band {
            return f.moments(r, xi);
        }
        let edge = sign(xi) * band;
        let (m0, m1) = f.moments(r, edge);
        let c = f.rho(r, edge);
        (m0 + c * (xi - edge), m1 + 0.5 * c * (xi * xi - band * band))
    }
}
