//! Scenario files: TOML with `density`, `basis`, `data`, `solver` and
//! `output` sections.

use std::path::{Path, PathBuf};

use hystwave::galerkin::{Discretization, ProblemData, SolverSettings};
use hystwave::hysteresis::{
    DensityFamily, PreisachDensity, PreisachEvaluator, DEFAULT_GRID_RESOLUTION, DEFAULT_R_ORDER,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    #[serde(flatten)]
    pub family: DensityFamily,
    /// Convexity radius `R`.
    pub radius: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Gauss–Legendre order per memory segment.
    #[serde(default = "default_r_order")]
    pub r_order: usize,
}

fn default_resolution() -> usize {
    DEFAULT_GRID_RESOLUTION
}

fn default_r_order() -> usize {
    DEFAULT_R_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default = "one")]
    pub elasticity: f64,
    pub m: usize,
    pub n_t: usize,
    pub n_quad: usize,
}

fn one() -> f64 {
    1.0
}

/// `amp · e_j(t) φ_k(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceComponent {
    pub j: i64,
    pub k: usize,
    pub amp: f64,
}

/// `amp · e_j(t) ψ_l(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceComponent {
    pub j: i64,
    pub l: usize,
    pub amp: f64,
}

/// `amp · e_j(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesComponent {
    pub j: i64,
    pub amp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Common factor applied to every component below.
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "default_gamma")]
    pub gamma: [f64; 2],
    /// Checked against the `δ` recomputed from the data when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_delta: Option<f64>,
    #[serde(default)]
    pub f: Vec<ForceComponent>,
    #[serde(default)]
    pub h: Vec<SourceComponent>,
    #[serde(default)]
    pub p_star_left: Vec<SeriesComponent>,
    #[serde(default)]
    pub p_star_right: Vec<SeriesComponent>,
}

fn default_gamma() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Stem of the report files.
    pub name: String,
    pub json: bool,
    pub csv: bool,
    /// Points `x` at which time series are written.
    pub probes: Vec<f64>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            name: "report".into(),
            json: true,
            csv: true,
            probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub density: DensityConfig,
    pub basis: BasisConfig,
    #[serde(default = "empty_data")]
    pub data: DataConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputConfig,
}

fn empty_data() -> DataConfig {
    toml::from_str("").expect("all data fields have defaults")
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })
    }

    /// Effective configuration after defaults.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }

    /// Validated density with its constants.
    pub fn density(&self) -> Result<PreisachDensity, ConfigError> {
        let d = &self.density;
        PreisachDensity::new(d.family.clone(), d.radius, d.resolution).map_err(|e| field_err("density", e))
    }

    pub fn evaluator(&self) -> Result<PreisachEvaluator, ConfigError> {
        PreisachEvaluator::new(self.density.r_order).map_err(|e| field_err("density.r_order", e))
    }

    pub fn discretization(&self) -> Result<Discretization, ConfigError> {
        let b = &self.basis;
        Discretization::new(b.length, b.elasticity, b.m, b.n_t, b.n_quad).map_err(|e| field_err("basis", e))
    }

    /// Assemble the data coefficients and cross-check any declared `δ`.
    pub fn problem_data(&self, disc: &Discretization) -> Result<ProblemData, ConfigError> {
        let m = disc.m();
        let mi = m as i64;
        let d = &self.data;
        if !d.amplitude.is_finite() {
            return Err(field_err("data.amplitude", "must be finite"));
        }
        let check_j = |field: String, j: i64| {
            if j.abs() > mi {
                Err(field_err(field, format!("frequency {j} outside -{m}..={m}")))
            } else {
                Ok(())
            }
        };
        let mut data = ProblemData::zeros(m, d.gamma);
        for (i, c) in d.f.iter().enumerate() {
            check_j(format!("data.f[{i}].j"), c.j)?;
            if c.k == 0 || c.k > m {
                return Err(field_err(format!("data.f[{i}].k"), format!("mode {} outside 1..={m}", c.k)));
            }
            data.f.set(c.j, c.k, data.f.get(c.j, c.k) + d.amplitude * c.amp);
        }
        for (i, c) in d.h.iter().enumerate() {
            check_j(format!("data.h[{i}].j"), c.j)?;
            if c.l > m {
                return Err(field_err(format!("data.h[{i}].l"), format!("mode {} outside 0..={m}", c.l)));
            }
            data.h.set(c.j, c.l, data.h.get(c.j, c.l) + d.amplitude * c.amp);
        }
        for (b, (name, list)) in [("p_star_left", &d.p_star_left), ("p_star_right", &d.p_star_right)]
            .into_iter()
            .enumerate()
        {
            for (i, c) in list.iter().enumerate() {
                check_j(format!("data.{name}[{i}].j"), c.j)?;
                data.p_star[b][(mi - c.j) as usize] += d.amplitude * c.amp;
            }
        }
        let norms = data.norms(disc).map_err(|e| field_err("data", e))?;
        if let Some(declared) = d.declared_delta {
            let tol = 1e-9 * declared.abs().max(norms.delta).max(1e-300);
            if (declared - norms.delta).abs() > tol {
                return Err(field_err(
                    "data.declared_delta",
                    format!("declared {declared} but the data give delta = {}", norms.delta),
                ));
            }
        }
        Ok(data)
    }

    pub fn validate_solver(&self) -> Result<(), ConfigError> {
        self.solver.validate().map_err(|e| field_err("solver", e))
    }
}
