//! Numerical toolkit for Kähler metrics given by potentials on a coordinate
//! ball: exact Wirtinger jets, curvature tensors and holomorphic sectional
//! curvature, Hermitian forms on 1-jets, Chern-connection flatness tests,
//! gauge normalization, and developing maps onto the constant-curvature
//! model spaces.

pub mod error;
pub mod multi_index;
pub(crate) mod linalg;
pub(crate) mod taylor;
pub mod potential;
pub mod wirtinger;
pub mod kahler;
pub mod jet_hermitian;
pub mod chern;
pub mod gauge;
pub mod develop;

pub use error::{Error, Result};
pub use num_complex::Complex64;
