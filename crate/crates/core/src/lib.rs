//! Discrepancy of translates of sums of two arithmetic progressions in [N].
//!
//! Edge enumeration, the certifying family, Fourier checks, and small exact/heuristic solvers.

pub mod certifier;
pub mod cli;
pub mod error;
pub mod family;
pub mod fourier;
pub mod hypergraph;
pub mod numtheory;
pub mod solver;

pub use error::{Error, Result};
