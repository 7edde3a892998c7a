//! Numerical laboratory for the gyrokinetic mean-field limit of the 2D
//! Coulomb gas.
//!
//! The crate is organised by subsystem:
//!
//! * [`kernels`]: the logarithmic Coulomb potential, its gradient, the
//!   Biot-Savart kernel, free-space grid convolution and velocity bounds.
//! * [`euler`]: a Lagrangian vortex-blob solver for 2D incompressible Euler
//!   on the whole plane, plus the derived grid fields (stream function,
//!   velocity, velocity gradient, pressure source and pressure).
//! * [`nbody`]: the magnetized (and non-magnetized) Newton system with an
//!   exact-rotation Strang integrator and an RK4 reference.
//! * [`energy`]: the modulated energy for empirical data, the Coulomb
//!   functionals of the particle/density discrepancy and the coercivity
//!   diagnostics.
//! * [`quantize`]: coherent states, Toeplitz operators in a truncated
//!   Hermite basis, Wigner/Husimi transforms and the initial-energy
//!   evaluation for the rotating-frame symbol.

pub mod density;
pub mod energy;
pub mod error;
pub mod euler;
pub mod kernels;
pub mod nbody;
pub mod quantize;
pub mod reduce;

pub use error::{Error, Result};
pub use kernels::{GridSpec, ScalarGrid, Vec2, VectorGrid};
