//! Matrix-valued functions of the metric parameter.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::dd_calculus::{JetFunction, ScalarFunction};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// A `d x d` matrix whose entries are scalar functions of `t`.
#[derive(Clone, Debug)]
pub struct MatrixFunction {
    pub dim: usize,
    pub entries: Vec<ScalarFunction>,
}

impl MatrixFunction {
    pub fn new(entries: Vec<Vec<ScalarFunction>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 || entries.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidArgument("matrix function must be square and non-empty".into()));
        }
        Ok(MatrixFunction { dim, entries: entries.into_iter().flatten().collect() })
    }

    /// Constant matrix times a scalar function.
    pub fn scaled_constant(m: &DMatrix<f64>, f: &ScalarFunction) -> Self {
        let dim = m.nrows();
        let entries = (0..dim * dim)
            .map(|k| {
                let c = m[(k / dim, k % dim)];
                if c == 0.0 {
                    ScalarFunction::constant(0.0)
                } else {
                    f.scale(c)
                }
            })
            .collect();
        MatrixFunction { dim, entries }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(a: &MatrixFunction, b: &MatrixFunction) -> Self {
        let dim = a.dim + b.dim;
        let mut entries = vec![ScalarFunction::constant(0.0); dim * dim];
        for i in 0..a.dim {
            for j in 0..a.dim {
                entries[i * dim + j] = a.entry(i, j).clone();
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                entries[(a.dim + i) * dim + a.dim + j] = b.entry(i, j).clone();
            }
        }
        MatrixFunction { dim, entries }
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarFunction {
        &self.entries[i * self.dim + j]
    }

    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j).eval(t))
    }

    /// Entry-wise `k`-th derivative at `t`.
    pub fn derivative(&self, t: f64, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j).jet(t, k).derivative(k))
    }

    /// Cholesky check at `samples` equispaced points of `[lo, hi]` (endpoints included).
    pub fn check_positive_definite(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        let n = samples.max(2);
        for k in 0..n {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let m = self.eval(t);
            let sym = (&m - m.transpose()).amax() <= 1e-12 * m.amax().max(1.0);
            if !sym || !m.iter().all(|v| v.is_finite()) || m.cholesky().is_none() {
                return Err(Error::NotPositiveDefinite { t });
            }
        }
        Ok(())
    }
}

/// Which derived quantity a [`DerivedEntry`] produces.
#[derive(Clone, Copy, Debug)]
pub enum Derived {
    Inverse(usize, usize),
    DetPower(f64),
}

/// Inverse entries and determinant powers of a matrix function, computed
/// with Taylor jets through Gauss-Jordan elimination.
#[derive(Debug)]
pub struct DerivedEntry {
    pub source: Arc<MatrixFunction>,
    pub kind: Derived,
}

impl DerivedEntry {
    pub fn function(source: Arc<MatrixFunction>, kind: Derived) -> ScalarFunction {
        ScalarFunction::from_jet_function(Arc::new(DerivedEntry { source, kind }))
    }
}

/// Jets of the inverse and the determinant of a jet-valued SPD matrix.
pub fn jet_inverse_det(mut a: Vec<Vec<Jet>>, order: usize) -> (Vec<Vec<Jet>>, Jet) {
    let d = a.len();
    let mut inv: Vec<Vec<Jet>> = (0..d)
        .map(|i| (0..d).map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, order)).collect())
        .collect();
    let mut det = Jet::constant(1.0, order);
    for p in 0..d {
        let pivot = a[p][p].clone();
        det = &det * &pivot;
        let rp = pivot.recip();
        for j in 0..d {
            a[p][j] = &a[p][j] * &rp;
            inv[p][j] = &inv[p][j] * &rp;
        }
        for r in 0..d {
            if r == p {
                continue;
            }
            let factor = a[r][p].clone();
            if factor.0.iter().all(|c| *c == 0.0) {
                continue;
            }
            for j in 0..d {
                let da = &factor * &a[p][j];
                a[r][j] = &a[r][j] - &da;
                let di = &factor * &inv[p][j];
                inv[r][j] = &inv[r][j] - &di;
            }
        }
    }
    (inv, det)
}

impl JetFunction for DerivedEntry {
    fn jet(&self, t: f64, order: usize) -> Jet {
        let d = self.source.dim;
        let a: Vec<Vec<Jet>> =
            (0..d).map(|i| (0..d).map(|j| self.source.entry(i, j).jet(t, order)).collect()).collect();
        let (inv, det) = jet_inverse_det(a, order);
        match self.kind {
            Derived::Inverse(i, j) => inv[i][j].clone(),
            Derived::DetPower(p) => det.powf(p),
        }
    }

    fn label(&self) -> String {
        match self.kind {
            Derived::Inverse(i, j) => format!("G^{{{i}{j}}}"),
            Derived::DetPower(p) => format!("|G|^({p})"),
        }
    }
}
