//! Eigenbases in space and Fourier modes in time for the Galerkin ansatz.

pub mod basis;
pub mod field;
pub mod modes;
pub mod series;

pub use basis::{Family, SpatialBasis};
pub use field::{
    project_field, project_series, synthesize, synthesize_at, synthesize_dx, FieldSamples,
    ModalCoeffs,
};
pub use modes::{mode, mode_derivative, mode_norm_sq, TimeModes};
pub use series::{spectral_derivative, spectral_resample, turning_points};
