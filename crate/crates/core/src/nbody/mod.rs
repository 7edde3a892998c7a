//! The magnetized Newton system for `N` Coulomb particles and its
//! unmagnetized counterpart.

mod ensemble;
mod force;
mod integrator;
mod sampling;
mod simulation;

pub use ensemble::{MagneticParams, Orientation, ParticleEnsemble};
pub use force::{mean_field_force, mean_field_force_with, min_separation, pair_potential_sum, ForceEval, ForceMethod};
pub use integrator::{
    rotation_update, rotation_update_oriented, step, step_rk4, step_strang, IntegratorConfig, Scheme,
};
pub use sampling::{
    retry_budget, sample_monokinetic, sample_monokinetic_with, sample_positions, sample_positions_stratified,
    sample_positions_with, sample_rotating_frame, SamplingScheme, STRATIFIED_RESOLUTION,
};
pub use simulation::{
    hamiltonian, interaction_energy, run_simulation, EnergyObserver, Observer, SeparationObserver, SimulationOutcome,
    Termination,
};
