//! Symbolic and numerical tools for heat-trace densities of Laplace-type
//! operators on noncommutative tori with functional metrics.

pub mod commands;
pub mod config;
pub mod contraction_ir;
pub mod curvature;
pub mod dd_calculus;
pub mod error;
pub mod jet;
pub mod metrics;
pub mod nctorus;
pub mod quadrature;
pub mod report;
pub mod tfunc;
pub mod verify;

pub use error::{Error, Result};
