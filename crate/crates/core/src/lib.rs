//! Perturbative Wilson loop expectation values for 2D Yang-Mills in
//! generalized axial gauge.
//!
//! The crate computes the weak-coupling expansion of a Wilson loop around a
//! simple closed contour on the plane or the round sphere: Feynman diagrams
//! are enumerated as perfect matchings, each matching's contour integral is
//! estimated by Monte Carlo over ordered simplices, and group-theory factors
//! are contracted by brute force over an orthonormal Lie-algebra basis. The
//! resulting series is cross-checked against a Gaussian matrix model whose
//! moments give the same area-law coefficients.

pub mod cmat;
pub mod diagrams;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod lie;
pub mod propagators;
pub mod quad;
pub mod report;
pub mod wilson;

pub use error::{Error, Result};
