//! Heat densities, curvature functions and total curvature of functional metrics.

pub mod commutative;
pub mod conformal;
pub mod density;
pub mod examples;
pub mod functions;
pub mod removable;
pub mod total;
pub mod twisted;

pub use commutative::{commutative_scalar_curvature, scaled_classical_curvature};
pub use conformal::reduced;
pub use density::{b2_engine, b2_hand, compare_densities, DensityB2, Provenance};
pub use functions::{homogeneity_check, kh_conformal, kh_twisted, CurvatureFunctions, CurvatureKind};
pub use total::{gauss_bonnet_check, total_curvature_kernel, GaussBonnetReport, KernelTValues, TotalCurvatureKernel};
