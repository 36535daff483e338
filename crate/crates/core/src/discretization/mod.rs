//! Polar grids over star-shaped planar domains, mapped finite differences,
//! midpoint quadrature and JSON field files.

mod diff;
mod domain;
mod field;
mod grid;
pub mod io;
mod quadrature;
mod spectral;
pub mod stencil;

pub use diff::{differentiate, differentiate_values, differentiate_with, gradient, Derivatives, RadialBoundary};
pub use domain::{ellipse_radius, BallDomain, Domain, StarDomain2D};
pub use field::ScalarField;
pub use grid::{build_grid, Grid, GridDescriptor};
pub use io::{read_field, write_field};
pub use quadrature::{integrate, integrate_values, CompensatedSum};
pub use spectral::PeriodicDerivative;

pub use field::boundary_trace;

#[derive(Debug, thiserror::Error)]
pub enum DiscretizationError {
    #[error("invalid domain: {0}")]
    DomainInvalid(String),
    #[error("invalid grid: {0}")]
    GridInvalid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
