//! Polyhedral flat tori: a combinatorial prover for the 7-vertex hull
//! argument, and a search, refinement and certification pipeline for the
//! 8-vertex "pup tent" paper torus.

pub mod certifier;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod mat3;
pub mod numeric;
pub mod solver;
pub mod torus_file;

pub use error::{Error, Result};
