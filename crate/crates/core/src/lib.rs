//! Rate-independent hysteresis operators (play, Preisach, convexified Preisach)
//! and a time-periodic spectral Galerkin solver for the one-dimensional
//! reduction of the unsaturated poroelastic wave system
//!
//! ```text
//! u_tt + u_t = a u_xx + p_x + f
//! G[p]_t     = u_xt + p_xx + h
//! u = 0 on {0, L},   ±p_x = γ (p* − p) on {0, L}
//! ```
//!
//! with 2π-periodic data. The crate is organised bottom-up:
//!
//! * [`hysteresis`]: play operator, Preisach densities, the exact memory
//!   curve, Preisach/convexified outputs and energy bookkeeping.
//! * [`spectral`]: Dirichlet/Neumann eigenbases on `(0, L)`, time-Fourier
//!   modes and field synthesis/projection.
//! * [`galerkin`]: residual assembly, hysteresis projection and the
//!   α-continuation solver.
//! * [`diagnostics`]: periodic norms, energy audits and the report record.
//!
//! Data-parallel loops (per spatial node, per frequency block) go through
//! [`exec::Exec`], which uses rayon when the `parallel` feature is enabled
//! and runs sequentially otherwise.

pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod galerkin;
pub mod hysteresis;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Exec;
