//! Hard-core point processes in Euclidean space and on the sphere.
//!
//! The crate samples the hard sphere model on bounded regions of `R^d` and
//! the hard cap model on `S^{d-1}`, estimates their partition functions and
//! expected densities by three independent routes, checks the geometric
//! inequalities those estimates rest on, and evaluates the asymptotic lower
//! and upper bounds for kissing numbers, spherical codes and sphere-packing
//! density.

pub mod bounds;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod montecarlo;
pub mod regions;
pub mod sampler;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use montecarlo::Estimate;
pub use regions::{EuclideanRegion, Point, Region, SphericalRegion};
pub use sampler::{Exclusion, Fugacity, Packing, SphericalCode};
