use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid play threshold r = {0} (must be positive and finite)")]
    InvalidThreshold(f64),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("non-degeneracy condition violated: A_R = {a_r} <= 0 for R = {radius}")]
    DegenerateDensity { radius: f64, a_r: f64 },

    #[error(
        "convexity radius R = {radius} too large: A_R/2 - R*C_R = {margin} <= 0; \
         largest feasible R on the bisection grid is {suggested}"
    )]
    ConvexityRadiusTooLarge {
        radius: f64,
        margin: f64,
        suggested: f64,
    },

    #[error("density constants not validated")]
    UnvalidatedDensity,

    #[error("degenerate quadrature grid: {0}")]
    Grid(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty input series")]
    EmptyInput,

    #[error("invalid exponent q = {0} (must be >= 1)")]
    InvalidExponent(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hysteresis memory did not reach a periodic regime (mismatch {mismatch:e})")]
    NonPeriodicMemory { mismatch: f64 },

    #[error(
        "solver did not converge at alpha = {alpha} after {iterations} iterations \
         (residual {residual:e})"
    )]
    NonConvergence {
        alpha: f64,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("singular linear block for frequency j = {0}")]
    SingularBlock(i64),
}
