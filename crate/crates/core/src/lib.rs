//! Conley and Poincaré indices of isolated invariant sets of planar vector
//! fields, computed from cubical isolating blocks and relative homology.

pub mod analysis;
pub mod block;
pub mod cli;
pub mod complex;
pub mod field;
pub mod geometry;
pub mod homology;
pub mod orbits;
pub mod matrix;
