//! Finite Fourier polynomials on the noncommutative torus and exact evaluation
//! of contraction forms in them.

pub mod contraction;
pub mod element;
pub mod identities;
pub mod poly;
pub mod realize;

pub use contraction::{chebyshev_coefficients, chebyshev_contraction, exp_element, poly_contraction, ChebyshevContraction};
pub use element::{NcElement, NcTorus};
pub use identities::{check_identities, IdentityReport, Instance};
pub use poly::PolyContraction;
pub use realize::IrRealization;
