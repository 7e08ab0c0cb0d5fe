//! Functional metrics, their Laplacians, and the associated matrix functions.

pub mod grid;
pub mod laplace;
pub mod matrix_function;
pub mod metric;

pub use grid::{classical_coefficients, classical_scalar_curvature, GridDerivatives, GridFunction, GridSpec};
pub use laplace::{laplacian_symbol, LaplaceTypeOperator};
pub use matrix_function::{Derived, DerivedEntry, MatrixFunction};
pub use metric::{FamilyKind, FunctionalMetric, MetricFamily};
