//! Periodic Galerkin system for `(u, p)` and its continuation solver.

pub mod manufactured;
pub mod problem;
pub mod projection;
pub mod residual;
pub mod solver;

pub use manufactured::{relative_error, Manufactured};
pub use problem::{
    series_derivative, series_samples, DataNorms, Discretization, FourierSolution, GalerkinProblem, ProblemData,
    SeriesCoeffs,
};
pub use projection::{hysteresis_projection, periodic_g_r, HysteresisProjection};
pub use residual::{assemble_residual, data_vector, LinearBlocks, ResidualVector};
pub use solver::{continuation_solve, AlphaStep, SolveOutcome, SolverSettings, SolverTelemetry};
