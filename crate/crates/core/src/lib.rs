//! Approximate centerpoints via iterated Radon points, with the verification
//! oracles (Tukey depth, urn and walk simulation) and three applications:
//! lower bounds for convex functions from a subgradient oracle, functional
//! nets queried through a separation oracle, and planar weak ε-nets and
//! center nets.

pub mod bodies;
pub mod centernet;
pub mod centerpoint;
pub mod convex_opt;
pub mod depth;
pub mod error;
pub mod funcnet;
pub mod gen;
pub mod geometry;
pub mod io;
pub mod rng;
pub mod urn;

pub use error::{Error, Result};
pub use geometry::{halfspace_count, radon_point, Halfspace, Point, PointSet, RadonPartition};
