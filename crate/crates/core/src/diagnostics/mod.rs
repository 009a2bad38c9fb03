//! Periodic norms, energy audits and run reports.

pub mod audit;
pub mod norms;
pub mod report;

pub use audit::{
    confinement, ene2_audit, ene2_series, ene3_audit, ene3_series, energy_balance, enerpr_residual,
    Confinement, EnergyBalance, FieldAudit, InequalitySlack,
};
pub use norms::{periodic_integral, periodic_norm, Region};
pub use report::{
    estimate_suite, linear_response_ratio, probe_csv, probe_rows, solution_norms, DiagnosticsReport, Ene2Summary,
    Ene3Summary, EnergyReport, Es1Norms, Es2Norms, Norms, SolverSummary,
};
