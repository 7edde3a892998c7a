//! Modulated energy of empirical data against an Euler state, the Coulomb
//! functionals of `mu_N - mu`, and weak-convergence diagnostics.

mod breakdown;
mod coercivity;
mod functional;
mod marginal;
mod serfaty;

pub use breakdown::{classical_modulated_energy, classical_modulated_energy_with, EnergyBreakdown};
pub use coercivity::{
    coercivity_check, coercivity_sweep, derive_seed, log_log_slope, median, CoercivityReport, CoercivityRow,
    CoercivitySweep, TestFunction,
};
pub use functional::{f_n, f_prime_n, lower_bound_slack, slack_tolerance, CoulombFunctional};
pub use marginal::{marginal_identity_check, ConfigurationMixture};
pub use serfaty::{serfaty_rhs_report, SerfatyReport};
