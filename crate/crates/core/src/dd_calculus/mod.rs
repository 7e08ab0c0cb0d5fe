//! Divided differences, partial divided differences and the functions they act on.

pub mod dd;
pub mod function;
pub mod multi;
pub mod parse;

pub use dd::{
    complete_homogeneous, dd, dd_explicit, dd_hermite_genocchi, dd_node_derivative, dd_recursive, dd_with,
    DdOptions, Univariate,
};
pub use function::{Expr, JetFunction, ScalarFunction};
pub use multi::{partial_dd, DdAtom, MultiScalarFunction, MultiTerm};
pub use parse::parse_function;
