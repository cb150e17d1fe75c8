//! Boundary-integral solver for two-dimensional Lamé transmission problems
//! with a thin coating layer, together with the first-order asymptotic
//! expansion of the field in the coating thickness.

pub mod asymptotics;
pub mod boundary_ops;
pub mod config;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod spectral;
pub mod transmission;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
