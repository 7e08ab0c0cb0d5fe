//! T-functions `T_{n;alpha}(t_0, ..., t_m)`: simplex integrals of Wick sums of
//! the inverse of `P(s) = sum_j s_j P2(t_j)` weighted by `det P(s)^{-1/2}`.

pub mod dim2;
pub mod dt4;
pub mod rule;
pub mod scalar;
pub mod sources;
pub mod wick;

use serde::{Deserialize, Serialize};

pub use dim2::{dim2_by_quadrature, dim2_coefficients, dim2_t_values, Dim2Branch, Dim2TValues};
pub use dt4::{dt4_t11, dt4_t21, Dt4Point};
pub use rule::{normalize, MatrixField, TMethod, TNode, TRule, TSource};
pub use scalar::scalar_t_integral;
pub use sources::{ConformalTSource, QuadratureTSource, TwistedTSource};
pub use wick::{wick_pairings, wick_sum};

/// One T-function value request.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TFunctionQuery {
    /// Tensor indices, 0-based.
    pub n: Vec<usize>,
    pub alpha: Vec<u32>,
    pub t: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DMatrix;

    use super::*;
    use crate::dd_calculus::parse_function;
    use crate::quadrature::QuadratureSpec;

    fn spd(d: usize, seed: u64) -> DMatrix<f64> {
        let mut x = seed as f64 * 0.37 + 0.1;
        let a = DMatrix::from_fn(d, d, |_, _| {
            x = (x * 7.13 + 0.31).fract();
            x - 0.5
        });
        &a * a.transpose() + DMatrix::identity(d, d) * 0.6
    }

    #[test]
    fn conformal_closed_form_matches_quadrature() {
        let g = spd(3, 1);
        let f = parse_function("exp(-2*t)").unwrap();
        let ginv = g.clone().try_inverse().unwrap();
        let f2 = f.clone();
        let quad = QuadratureTSource {
            p2: Arc::new(move |t| Ok(&ginv * f2.eval(t))),
            dim: 3,
            spec: QuadratureSpec::default(),
        };
        let conf = ConformalTSource { f, g };
        let cases: &[(&[usize], &[u32], &[f64])] = &[
            (&[], &[1, 1], &[0.1, 0.6]),
            (&[0, 2], &[2, 1], &[0.1, 0.6]),
            (&[0, 1, 1, 2], &[1, 2, 1], &[0.1, 0.6, -0.3]),
            (&[0, 1, 2, 2, 1, 0], &[3, 1, 1], &[0.1, 0.6, -0.3]),
            (&[1, 1], &[1, 0, 2], &[0.1, 0.6, 0.2]),
        ];
        for &(n, alpha, t) in cases {
            let a = conf.value(n, alpha, t).unwrap();
            let b = quad.value(n, alpha, t).unwrap();
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{n:?} {alpha:?}: {a} vs {b}");
        }
    }

    #[test]
    fn twisted_closed_form_matches_quadrature() {
        let g = spd(2, 2);
        let gt = spd(2, 3);
        let f = parse_function("1 + t^2").unwrap();
        let (gi, gti) = (g.clone().try_inverse().unwrap(), gt.clone().try_inverse().unwrap());
        let f2 = f.clone();
        let quad = QuadratureTSource {
            p2: Arc::new(move |t| {
                let mut m = DMatrix::zeros(4, 4);
                m.view_mut((0, 0), (2, 2)).copy_from(&(&gi * f2.eval(t)));
                m.view_mut((2, 2), (2, 2)).copy_from(&gti);
                Ok(m)
            }),
            dim: 4,
            spec: QuadratureSpec::default(),
        };
        let tw = TwistedTSource { f, g, gt };
        let cases: &[(&[usize], &[u32], &[f64])] = &[
            (&[], &[1, 1], &[0.1, 0.6]),
            (&[0, 3], &[2, 1], &[0.1, 0.6]),
            (&[0, 1, 2, 3], &[1, 2, 1], &[0.1, 0.6, -0.3]),
            (&[0, 0, 2, 3, 1, 1], &[3, 1, 1], &[0.1, 0.6, -0.3]),
            (&[3, 3, 2, 2], &[2, 2], &[0.1, 0.9]),
        ];
        for &(n, alpha, t) in cases {
            let a = tw.value(n, alpha, t).unwrap();
            let b = quad.value(n, alpha, t).unwrap();
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{n:?} {alpha:?}: {a} vs {b}");
        }
    }

    #[test]
    fn dim2_branches_match_quadrature() {
        let p1 = spd(2, 4);
        let shifts = [spd(2, 5), spd(2, 6) * -0.3, spd(2, 7) * 0.2];
        for s in shifts.iter() {
            let p0 = &p1 + s;
            let closed = dim2_t_values(&p0, &p1).unwrap();
            let (t11, t21) = dim2_by_quadrature(&p0, &p1).unwrap();
            assert!((closed.t11 - t11).abs() < 1e-11, "{:?}", closed.branch);
            assert!((closed.t21 - t21).amax() < 1e-11, "{:?}", closed.branch);
        }
        let v = nalgebra::DVector::from_vec(vec![0.4, -0.9]);
        let p0 = &p1 + &v * v.transpose();
        let closed = dim2_t_values(&p0, &p1).unwrap();
        assert_eq!(closed.branch, Dim2Branch::Degenerate);
        let (t11, t21) = dim2_by_quadrature(&p0, &p1).unwrap();
        assert!((closed.t11 - t11).abs() < 1e-11);
        assert!((closed.t21 - t21).amax() < 1e-11);
    }

    #[test]
    fn dim2_perfect_squares_match_quadrature() {
        let p1 = spd(2, 8);
        for scale in [0.4, 0.9, 1.1, 3.0] {
            let p0 = &p1 * scale;
            let closed = dim2_t_values(&p0, &p1).unwrap();
            let (t11, t21) = dim2_by_quadrature(&p0, &p1).unwrap();
            assert!((closed.t11 - t11).abs() < 1e-11, "{scale}: {} vs {t11}", closed.t11);
            assert!((closed.t21 - t21).amax() < 1e-11, "{scale}");
        }
    }
}
