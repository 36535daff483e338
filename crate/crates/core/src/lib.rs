//! Spacelike graphs `M = {(x, u(x))}` in Minkowski space `R^{n,1}`.
//!
//! The crate computes the full pointwise geometry of a graph sampled on a polar
//! grid (metric, timelike normal, shape operator, elementary symmetric functions
//! of the principal curvatures), checks the algebraic and integral identities that
//! govern hypersurfaces of constant `k`-th mean curvature, solves the Dirichlet
//! problem `H_k = const`, `u = c` on `∂Ω`, and measures how far the boundary
//! intersection angle is from constant. Hyperboloid caps are the reference
//! solutions throughout.
//!
//! Modules:
//! - [`discretization`]: domains, grids, derivatives, quadrature, field files
//! - [`symfunc`]: `σ_k`, its derivative tensor, Gårding cones, Newton–MacLaurin
//! - [`geometry`]: curvature bundles and covariant operators on graphs
//! - [`hyperboloid`]: exact umbilic caps
//! - [`verifier`]: named residual checks and convergence studies
//! - [`solver`]: radial and planar Dirichlet solvers, rigidity scans
//! - [`cli`]: the `spacelike` command-line front end

pub mod cli;
pub mod discretization;
pub mod geometry;
pub mod hyperboloid;
pub mod solver;
pub mod symfunc;
pub mod verifier;

pub use discretization::{build_grid, Domain, Grid, ScalarField, StarDomain2D};
pub use geometry::{curvature_bundle, CurvatureBundle};
pub use hyperboloid::HyperboloidCap;
