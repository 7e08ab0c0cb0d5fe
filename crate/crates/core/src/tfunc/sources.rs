//! T-function sources: adaptive quadrature and family closed forms.

use nalgebra::DMatrix;

use crate::dd_calculus::ScalarFunction;
use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::quadrature::{adaptive_rule, QuadratureSpec};
use crate::tfunc::rule::{normalize, MatrixField, TMethod, TNode, TRule, TSource};
use crate::tfunc::scalar::scalar_t_integral;

/// Symmetric positive definite inverse and determinant.
pub(crate) fn spd_inverse_det(p: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let chol = p.clone().cholesky().ok_or(Error::NotPositiveDefinite { t: f64::NAN })?;
    let det = chol.determinant();
    Ok((chol.inverse(), det))
}

fn normalization(alpha: &[u32]) -> f64 {
    let total: u32 = alpha.iter().sum();
    let beta: f64 = alpha.iter().map(|&a| factorial(a as usize - 1)).product();
    1.0 / (2f64.powi(total as i32 - 2) * beta)
}

/// Direct evaluation of the simplex integral for an arbitrary symbol `P2(t)`.
pub struct QuadratureTSource {
    pub p2: MatrixField,
    pub dim: usize,
    pub spec: QuadratureSpec,
}

impl TSource for QuadratureTSource {
    fn dim(&self) -> usize {
        self.dim
    }

    fn method(&self) -> TMethod {
        TMethod::Quadrature
    }

    fn rule(&self, alpha: &[u32], t: &[f64], max_pairs: usize) -> Result<TRule> {
        let (alpha, t) = normalize(alpha, t)?;
        let mats: Vec<DMatrix<f64>> = t.iter().map(|&tv| (self.p2)(tv)).collect::<Result<_>>()?;
        let norm = normalization(&alpha);
        let n = alpha.len() - 1;
        let d = self.dim;
        let assemble = |s: &[f64]| -> Result<(DMatrix<f64>, f64)> {
            let mut p = DMatrix::<f64>::zeros(d, d);
            for (sj, m) in s.iter().zip(&mats) {
                p += m * *sj;
            }
            let (inv, det) = spd_inverse_det(&p)?;
            let w: f64 = s.iter().zip(&alpha).map(|(sj, &a)| sj.powi(a as i32 - 1)).product();
            Ok((inv, norm * w / det.sqrt()))
        };
        let mut failure = None;
        let rule = adaptive_rule(n, &self.spec, |s| match assemble(s) {
            Ok((inv, w)) => {
                let mut probes = vec![w];
                let tr = inv.trace();
                let e00 = inv[(0, 0)];
                let off = if d > 1 { inv[(0, d - 1)] } else { 0.0 };
                let mut acc = (w, w, w);
                for _ in 0..max_pairs {
                    acc = (acc.0 * tr, acc.1 * e00, acc.2 * (e00 + off));
                    probes.extend([acc.0, acc.1, acc.2]);
                }
                probes
            }
            Err(e) => {
                failure = Some(e);
                vec![f64::NAN]
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let rule = rule?;
        let mut nodes = Vec::with_capacity(rule.len());
        for (s, qw) in rule.points.iter().zip(&rule.weights) {
            let (inv, w) = assemble(s)?;
            nodes.push(TNode { minv: inv, weights: vec![qw * w; max_pairs + 1] });
        }
        Ok(TRule { nodes, method: TMethod::Quadrature })
    }
}

/// Closed form for `P2(t) = f(t) g^{-1}` with a constant lower metric `g`.
pub struct ConformalTSource {
    pub f: ScalarFunction,
    pub g: DMatrix<f64>,
}

impl TSource for ConformalTSource {
    fn dim(&self) -> usize {
        self.g.nrows()
    }

    fn method(&self) -> TMethod {
        TMethod::Conformal
    }

    fn rule(&self, alpha: &[u32], t: &[f64], max_pairs: usize) -> Result<TRule> {
        let (alpha, t) = normalize(alpha, t)?;
        let x: Vec<f64> = t.iter().map(|&tv| self.f.eval(tv)).collect();
        let sq = self.g.determinant().sqrt();
        let half_d = self.dim() as f64 / 2.0;
        let weights = (0..=max_pairs)
            .map(|k| Ok(sq * scalar_t_integral(half_d + k as f64, &alpha, &x)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(TRule { nodes: vec![TNode { minv: self.g.clone(), weights }], method: TMethod::Conformal })
    }
}

/// Closed form for `P2(t) = f(t) g^{-1} (+) gt^{-1}`.
pub struct TwistedTSource {
    pub f: ScalarFunction,
    pub g: DMatrix<f64>,
    pub gt: DMatrix<f64>,
}

impl TwistedTSource {
    fn r(&self) -> usize {
        self.g.nrows()
    }
}

impl TSource for TwistedTSource {
    fn dim(&self) -> usize {
        self.g.nrows() + self.gt.nrows()
    }

    fn method(&self) -> TMethod {
        TMethod::Twisted
    }

    fn rule(&self, alpha: &[u32], t: &[f64], max_pairs: usize) -> Result<TRule> {
        let (alpha, t) = normalize(alpha, t)?;
        let x: Vec<f64> = t.iter().map(|&tv| self.f.eval(tv)).collect();
        let r = self.r();
        let d = self.dim();
        let sq = (self.g.determinant() * self.gt.determinant()).sqrt();
        // Moments tau_m for Wick sums with m pairs inside the first block.
        let count = max_pairs + 1;
        let tau = (0..count)
            .map(|m| Ok(sq * scalar_t_integral((r + 2 * m) as f64 / 2.0, &alpha, &x)?))
            .collect::<Result<Vec<f64>>>()?;
        // Nodes u_q = q; weights solve sum_q w_q u_q^m = tau_m.
        let vander = DMatrix::from_fn(count, count, |m, q| (q as f64).powi(m as i32));
        let w = vander
            .lu()
            .solve(&nalgebra::DVector::from_vec(tau))
            .ok_or_else(|| Error::InvalidArgument("singular interpolation system".into()))?;
        let nodes = (0..count)
            .map(|q| {
                let mut minv = DMatrix::zeros(d, d);
                minv.view_mut((0, 0), (r, r)).copy_from(&(&self.g * q as f64));
                minv.view_mut((r, r), (d - r, d - r)).copy_from(&self.gt);
                TNode { minv, weights: vec![w[q]; count] }
            })
            .collect();
        Ok(TRule { nodes, method: TMethod::Twisted })
    }
}
