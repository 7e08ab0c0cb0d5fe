//! The Laplace-type operator attached to a functional metric.

use crate::contraction_ir::OpFunction;
use crate::dd_calculus::{MultiScalarFunction as M, ScalarFunction};
use crate::metrics::metric::FunctionalMetric;

/// Operator parts `P2, P1, P01, P02` of the symbol, indexed by `(j, k)`.
#[derive(Clone, Debug)]
pub struct LaplaceTypeOperator {
    pub dim: usize,
    pub p2: Vec<M>,
    pub p1: Vec<M>,
    pub p01: Vec<M>,
    pub p02: Vec<M>,
}

impl LaplaceTypeOperator {
    pub fn function(&self, base: OpFunction, j: usize, k: usize) -> &M {
        let idx = j * self.dim + k;
        match base {
            OpFunction::P2 => &self.p2[idx],
            OpFunction::P1 => &self.p1[idx],
            OpFunction::P01 => &self.p01[idx],
            OpFunction::P02 => &self.p02[idx],
        }
    }
}

/// Symbol of the Laplacian on functions of the noncommutative torus with metric `metric`.
pub fn laplacian_symbol(metric: &FunctionalMetric) -> LaplaceTypeOperator {
    let d = metric.dim();
    let q = metric.det_pow(0.25);
    let qi = metric.det_pow(-0.25);
    let half = metric.det_pow(0.5);
    let mut out = LaplaceTypeOperator { dim: d, p2: vec![], p1: vec![], p01: vec![], p02: vec![] };
    for j in 0..d {
        for k in 0..d {
            let gjk = metric.upper().entry(j, k).clone();
            if gjk.as_const() == Some(0.0) {
                out.p2.push(M::zero(1));
                out.p1.push(M::zero(2));
                out.p01.push(M::zero(2));
                out.p02.push(M::zero(3));
                continue;
            }
            let qg: ScalarFunction = q.mul(&gjk);
            out.p2.push(M::value_at(1, gjk.clone(), 0));
            let p1 = M::value_at(2, qi.clone(), 0)
                .mul(&M::atom(2, q.clone(), &[0, 1]))
                .mul(&M::value_at(2, gjk.clone(), 1))
                .add(&M::atom(2, gjk.clone(), &[0, 1]))
                .add(&M::value_at(2, qg.clone(), 0).mul(&M::atom(2, qi.clone(), &[0, 1])));
            out.p1.push(p1);
            out.p01.push(M::value_at(2, qg.clone(), 0).mul(&M::atom(2, qi.clone(), &[0, 1])));
            let p02 = M::value_at(3, qi.clone(), 0)
                .mul(&M::atom(3, gjk.mul(&half), &[0, 1]))
                .mul(&M::atom(3, qi.clone(), &[1, 2]))
                .add(&M::value_at(3, qg, 0).mul(&M::atom(3, qi.clone(), &[0, 1, 2])).scale(2.0));
            out.p02.push(p02);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::dd_calculus::{dd, parse_function};

    #[test]
    fn conformal_reduction() {
        // For f^{-1} g the parts reduce to g^{jk} times scalar functions of f.
        let d = 3;
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 1.5]);
        let f = parse_function("exp(-2*t)").unwrap();
        let m = FunctionalMetric::conformal(f.clone(), g.clone()).unwrap();
        let op = laplacian_symbol(&m);
        let ginv = g.try_inverse().unwrap();
        let (t0, t1, t2) = (0.3, -0.4, 0.9);
        let e = d as f64 / 4.0;
        let f4 = f.powf(e);
        let fm = f.powf(1.0 - d as f64 / 2.0);
        let p01 = f.eval(t0).powf(1.0 - e) * dd(&[t0, t1], &f4).unwrap();
        let p02 = f.eval(t0).powf(e) * dd(&[t0, t1], &fm).unwrap() * dd(&[t1, t2], &f4).unwrap()
            + 2.0 * f.eval(t0).powf(1.0 - e) * dd(&[t0, t1, t2], &f4).unwrap();
        for (j, k) in [(0, 0), (0, 1), (1, 2)] {
            let a = op.function(OpFunction::P01, j, k).eval(&[t0, t1]).unwrap();
            assert!((a - ginv[(j, k)] * p01).abs() < 1e-13);
            let b = op.function(OpFunction::P02, j, k).eval(&[t0, t1, t2]).unwrap();
            assert!((b - ginv[(j, k)] * p02).abs() < 1e-12);
        }
    }
}
