//! Functional metrics `G = (g_ij(h))` and their derived quantities.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dd_calculus::ScalarFunction;
use crate::error::{Error, Result};
use crate::metrics::matrix_function::{Derived, DerivedEntry, MatrixFunction};
use crate::quadrature::QuadratureSpec;
use crate::tfunc::{ConformalTSource, MatrixField, QuadratureTSource, TSource, TwistedTSource};

/// Family tag; closed-form T-functions exist for the structured families.
#[derive(Clone, Debug)]
pub enum MetricFamily {
    General,
    /// `f(t)^{-1} g`.
    Conformal { f: ScalarFunction, g: DMatrix<f64> },
    /// `f(t)^{-1} g (+) gt`.
    Twisted { f: ScalarFunction, g: DMatrix<f64>, gt: DMatrix<f64> },
    /// `f(t)^{-1} g (+) ft(t)^{-1} gt`.
    DoublyTwisted { f: ScalarFunction, ft: ScalarFunction, g: DMatrix<f64>, gt: DMatrix<f64> },
}

/// Short family name used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    General,
    Conformal,
    Twisted,
    DoublyTwisted,
}

#[derive(Clone, Debug)]
pub struct FunctionalMetric {
    pub family: MetricFamily,
    lower: Arc<MatrixFunction>,
    upper: Arc<MatrixFunction>,
    det: ScalarFunction,
}

fn check_spd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() || (m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) || m.clone().cholesky().is_none() {
        return Err(Error::InvalidArgument(format!("{what} must be a symmetric positive definite matrix")));
    }
    Ok(())
}

fn inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().cholesky().expect("checked positive definite").inverse()
}

impl FunctionalMetric {
    /// Metric given entry-wise (lower indices); inverse and determinant use jets.
    pub fn general(lower: MatrixFunction) -> Self {
        let lower = Arc::new(lower);
        let d = lower.dim;
        let entries = (0..d * d)
            .map(|k| DerivedEntry::function(lower.clone(), Derived::Inverse(k / d, k % d)))
            .collect();
        let upper = Arc::new(MatrixFunction { dim: d, entries });
        let det = DerivedEntry::function(lower.clone(), Derived::DetPower(1.0));
        FunctionalMetric { family: MetricFamily::General, lower, upper, det }
    }

    pub fn conformal(f: ScalarFunction, g: DMatrix<f64>) -> Result<Self> {
        check_spd(&g, "g")?;
        let d = g.nrows();
        let recip = ScalarFunction::constant(1.0).div(&f);
        let lower = Arc::new(MatrixFunction::scaled_constant(&g, &recip));
        let upper = Arc::new(MatrixFunction::scaled_constant(&inverse(&g), &f));
        let det = f.powf(-(d as f64)).scale(g.determinant());
        Ok(FunctionalMetric { family: MetricFamily::Conformal { f, g }, lower, upper, det })
    }

    pub fn twisted(f: ScalarFunction, g: DMatrix<f64>, gt: DMatrix<f64>) -> Result<Self> {
        check_spd(&g, "g")?;
        check_spd(&gt, "gt")?;
        let r = g.nrows();
        let one = ScalarFunction::constant(1.0);
        let recip = one.div(&f);
        let lower = Arc::new(MatrixFunction::direct_sum(
            &MatrixFunction::scaled_constant(&g, &recip),
            &MatrixFunction::scaled_constant(&gt, &one),
        ));
        let upper = Arc::new(MatrixFunction::direct_sum(
            &MatrixFunction::scaled_constant(&inverse(&g), &f),
            &MatrixFunction::scaled_constant(&inverse(&gt), &one),
        ));
        let det = f.powf(-(r as f64)).scale(g.determinant() * gt.determinant());
        Ok(FunctionalMetric { family: MetricFamily::Twisted { f, g, gt }, lower, upper, det })
    }

    pub fn doubly_twisted(
        f: ScalarFunction,
        ft: ScalarFunction,
        g: DMatrix<f64>,
        gt: DMatrix<f64>,
    ) -> Result<Self> {
        check_spd(&g, "g")?;
        check_spd(&gt, "gt")?;
        let (r, s) = (g.nrows(), gt.nrows());
        let one = ScalarFunction::constant(1.0);
        let lower = Arc::new(MatrixFunction::direct_sum(
            &MatrixFunction::scaled_constant(&g, &one.div(&f)),
            &MatrixFunction::scaled_constant(&gt, &one.div(&ft)),
        ));
        let upper = Arc::new(MatrixFunction::direct_sum(
            &MatrixFunction::scaled_constant(&inverse(&g), &f),
            &MatrixFunction::scaled_constant(&inverse(&gt), &ft),
        ));
        let det = f
            .powf(-(r as f64))
            .mul(&ft.powf(-(s as f64)))
            .scale(g.determinant() * gt.determinant());
        Ok(FunctionalMetric { family: MetricFamily::DoublyTwisted { f, ft, g, gt }, lower, upper, det })
    }

    pub fn dim(&self) -> usize {
        self.lower.dim
    }

    pub fn kind(&self) -> FamilyKind {
        match self.family {
            MetricFamily::General => FamilyKind::General,
            MetricFamily::Conformal { .. } => FamilyKind::Conformal,
            MetricFamily::Twisted { .. } => FamilyKind::Twisted,
            MetricFamily::DoublyTwisted { .. } => FamilyKind::DoublyTwisted,
        }
    }

    /// `g_ij(t)`.
    pub fn lower(&self) -> &MatrixFunction {
        &self.lower
    }

    /// `g^{ij}(t)`, which is also the principal symbol `P2^{ij}(t)`.
    pub fn upper(&self) -> &MatrixFunction {
        &self.upper
    }

    /// `|g|(t) = det g_ij(t)`.
    pub fn det(&self) -> &ScalarFunction {
        &self.det
    }

    pub fn det_pow(&self, p: f64) -> ScalarFunction {
        match self.family {
            MetricFamily::General => DerivedEntry::function(self.lower.clone(), Derived::DetPower(p)),
            _ => self.det.powf(p),
        }
    }

    pub fn check_positive_definite(&self, lo: f64, hi: f64) -> Result<()> {
        self.lower.check_positive_definite(lo, hi, 512)
    }

    pub fn p2_field(&self) -> MatrixField {
        let upper = self.upper.clone();
        Arc::new(move |t| {
            let m = upper.eval(t);
            if m.iter().all(|v| v.is_finite()) {
                Ok(m)
            } else {
                Err(Error::OutOfDomain { func: "metric".into(), point: t })
            }
        })
    }

    pub fn quadrature_source(&self, spec: QuadratureSpec) -> QuadratureTSource {
        QuadratureTSource { p2: self.p2_field(), dim: self.dim(), spec }
    }

    /// The most specific T-function source available for this family.
    pub fn t_source(&self, spec: QuadratureSpec) -> Box<dyn TSource> {
        match &self.family {
            MetricFamily::Conformal { f, g } => Box::new(ConformalTSource { f: f.clone(), g: g.clone() }),
            MetricFamily::Twisted { f, g, gt } => {
                Box::new(TwistedTSource { f: f.clone(), g: g.clone(), gt: gt.clone() })
            }
            _ => Box::new(self.quadrature_source(spec)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd_calculus::parse_function;

    #[test]
    fn structured_families_agree_with_general_construction() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let gt = DMatrix::from_row_slice(1, 1, &[1.5]);
        let f = parse_function("exp(-t) + 0.5").unwrap();
        let tw = FunctionalMetric::twisted(f, g, gt).unwrap();
        let gen = FunctionalMetric::general(tw.lower().clone());
        for t in [-0.7, 0.0, 1.3] {
            assert!((tw.upper().eval(t) - gen.upper().eval(t)).amax() < 1e-13);
            assert!((tw.det().eval(t) - gen.det().eval(t)).abs() < 1e-13);
            let a = tw.det_pow(-0.25).derivative(2).eval(t);
            let b = gen.det_pow(-0.25).derivative(2).eval(t);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn positivity_check_rejects_indefinite() {
        let m = MatrixFunction::new(vec![
            vec![parse_function("1").unwrap(), parse_function("t").unwrap()],
            vec![parse_function("t").unwrap(), parse_function("1").unwrap()],
        ])
        .unwrap();
        assert!(m.check_positive_definite(-0.5, 0.5, 64).is_ok());
        assert!(matches!(m.check_positive_definite(-2.0, 2.0, 64), Err(Error::NotPositiveDefinite { .. })));
    }
}
