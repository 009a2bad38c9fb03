//! Play operators, Preisach operators and their energy identities.

pub mod density;
pub mod energy;
pub mod growth;
pub mod memory;
pub mod play;
pub mod preisach;

pub use density::{
    validate_density, ConvexifiedDensity, DensityConstants, DensityFamily, PreisachDensity,
    DEFAULT_GRID_RESOLUTION,
};
pub use energy::{
    play_energy_residuals, preisach_energy_residuals, resolve_contact_events, ContactResolved,
    PlayResiduals,
};
pub use growth::{growth_and_coincidence_check, GrowthReport};
pub use memory::{MemoryState, RGrid};
pub use play::{periodic_play_response, play_init, play_trajectory, play_update, project, PlayState};
pub use preisach::{
    periodic_operator_response, preisach_eval, preisach_trajectory, InnerMoments, MemoryIntegrals,
    OperatorOutputs, PreisachEvaluator, PreisachTrajectory, DEFAULT_R_ORDER,
};
