//! Coulomb and Biot-Savart kernels, grid fields and free-space convolution.

mod convolve;
mod grid;
mod potential;
mod vec2;
mod velocity;

pub use convolve::{free_space_convolve, gaussian_density, Convolved, FreeSpaceConvolver, Kernel};
pub use grid::{GridSpec, ScalarGrid, TensorGrid, VectorGrid};
pub use potential::{
    biot_savart_kernel, coulomb_cell_average, coulomb_gradient, coulomb_potential, LOG_SQUARE_MEAN,
};
#[allow(unused_imports)]
pub(crate) use potential::{coulomb_gradient_unchecked, coulomb_potential_unchecked};
pub use vec2::Vec2;
pub use velocity::{velocity_from_vorticity, velocity_sup_bound, VorticitySource};
