//! Coherent states, Toeplitz quantization in a truncated Hermite basis,
//! Wigner/Husimi transforms, heat-polynomial smoothing and the initial
//! energy of the rotating-frame symbol.

mod coherent;
mod gaussian;
mod heatpoly;
mod hermite;
mod identities;
mod section5;
mod toeplitz;
mod wigner;

pub use coherent::{
    axis_coefficients, coherent_coefficients, coherent_state, overlap_sq, truncation_loss, PhasePoint,
};
pub use gaussian::GaussianKernel;
pub use heatpoly::{heat_poly_expansion, Polynomial, MAX_DEGREE};
pub use hermite::{HermiteTruncation, MIN_DEGREE};
pub use identities::{
    kinetic_closed_form, kinetic_trace_identity, quadratic_symbol_identities, KineticTrace,
    QuadraticIdentityReport,
};
pub use section5::{default_symbol_grid, section5_initial_energy, GyroSymbol, Section5Report};
pub use toeplitz::{
    axis_symbol_operator, hermitian_defect, hermitian_eigenvalues, toeplitz_matrix, trace, trace_product,
    Atom, PlaneQuadrature,
};
pub use wigner::{
    axis_wigner_table, husimi_at, husimi_axis, husimi_axis_grid, husimi_slice, wigner_at, wigner_axis,
    wigner_axis_grid, wigner_slice, PhaseSlice,
};
