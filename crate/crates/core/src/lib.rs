//! Numerical building blocks for Gel'fand–Levitan uniqueness experiments on
//! 2x2 weakly coupled parabolic systems with Neumann boundary conditions.

pub mod error;
pub mod field;
pub mod potential;
pub mod spectral;
pub mod forward;
pub mod goursat;
pub mod kernel;
pub mod corpus;
pub mod inverse;

pub use error::{Error, Result};
