use thiserror::Error;

use crate::kernels::Vec2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A singular kernel was evaluated at its pole.
    #[error("{what} is singular at the origin")]
    Singular { what: &'static str },

    #[error("grid too small: {cells} cells per axis (need an even count >= 16)")]
    GridTooSmall { cells: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grids do not share the same layout")]
    GridMismatch,

    #[error("point ({}, {}) lies outside the computational grid", .point.x, .point.y)]
    OffGrid { point: Vec2 },

    #[error("particles {i} and {j} collided (separation {distance:e} below guard {guard:e})")]
    Collision {
        i: usize,
        j: usize,
        distance: f64,
        guard: f64,
    },

    #[error("evaluation point coincides with point vortex {index}")]
    CoincidentPointVortex { index: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("density is negative at ({}, {})", .point.x, .point.y)]
    NegativeDensity { point: Vec2 },

    #[error("rejection sampling accepted nothing after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("truncation degree {degree} too small: {reason}")]
    Truncation { degree: usize, reason: String },

    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("weights sum to {sum} instead of 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("mixture is not permutation symmetric: {reason}")]
    AsymmetricMixture { reason: String },

    #[error("blob {index} at ({}, {}) escaped the grid", .position.x, .position.y)]
    SupportEscaped { index: usize, position: Vec2 },

    #[error("density does not vanish on the grid boundary near ({}, {})", .point.x, .point.y)]
    SupportOnBoundary { point: Vec2 },

    #[error("grid spacing {spacing:e} does not resolve the scale (need <= {required:e})")]
    UnderResolved { spacing: f64, required: f64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
