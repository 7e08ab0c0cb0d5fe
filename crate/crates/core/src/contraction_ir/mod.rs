//! Term-rewriting IR for symbols written in contraction form.

pub mod display;
pub mod lower;
pub mod ops;
pub mod parametrix;
pub mod simplify;
pub mod term;

pub use lower::{lower_term, lower_to_tfunctions, Chain, CompiledTerm, Link, LoweredTerm, Pattern, TFunctionRef};
pub use ops::{concat_terms, delta_derivative, delta_symbol, symbol_multiply, term_multiply, xi_derivative};
pub use parametrix::{laplace_type_symbol, parametrix, LaplaceShape, MAX_ORDER};
pub use simplify::{canonical_form, simplify, simplify_terms};
pub use term::{ContractionTerm, Factor, IndexVar, NcEntry, OpFunction, SymbolExpr};
