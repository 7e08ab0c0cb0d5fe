//! Divided differences `[x_0, ..., x_n; f]` with repeated-node support.

use crate::dd_calculus::function::ScalarFunction;
use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::quadrature::{integrate_simplex_smooth, QuadratureSpec};

/// A univariate function exposing values and Taylor coefficients.
pub trait Univariate {
    fn eval(&self, x: f64) -> f64;
    /// `f^(k)(x) / k!` for `k = 0..=order`.
    fn taylor(&self, x: f64, order: usize) -> Vec<f64>;
    fn label(&self) -> String;
    fn polynomial(&self) -> Option<Vec<f64>> {
        None
    }
}

impl Univariate for ScalarFunction {
    fn eval(&self, x: f64) -> f64 {
        ScalarFunction::eval(self, x)
    }
    fn taylor(&self, x: f64, order: usize) -> Vec<f64> {
        self.jet(x, order).0
    }
    fn label(&self) -> String {
        self.to_string()
    }
    fn polynomial(&self) -> Option<Vec<f64>> {
        self.as_polynomial()
    }
}

/// Tuning for the tableau evaluation.
#[derive(Clone, Copy, Debug)]
pub struct DdOptions {
    /// Node groups whose spread is below `cluster_tol * max(1, |x|)` are
    /// evaluated from a Taylor expansion about their midpoint.
    pub cluster_tol: f64,
    /// Extra Taylor terms used for a cluster of nonzero spread.
    pub extra_terms: usize,
}

impl Default for DdOptions {
    fn default() -> Self {
        DdOptions { cluster_tol: 0.1, extra_terms: 40 }
    }
}

/// Complete homogeneous symmetric polynomials `h_0..=h_max` of `vars`.
pub fn complete_homogeneous(vars: &[f64], max: usize) -> Vec<f64> {
    let mut h = vec![0.0; max + 1];
    h[0] = 1.0;
    for &y in vars {
        for m in 1..=max {
            h[m] += y * h[m - 1];
        }
    }
    h
}

fn check_domain<F: Univariate + ?Sized>(nodes: &[f64], f: &F) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("divided difference needs at least one node".into()));
    }
    for &x in nodes {
        if !x.is_finite() || !f.eval(x).is_finite() {
            return Err(Error::OutOfDomain { func: f.label(), point: x });
        }
    }
    Ok(())
}

fn polynomial_dd(coeffs: &[f64], nodes: &[f64]) -> f64 {
    let n = nodes.len() - 1;
    if coeffs.len() <= n {
        return 0.0;
    }
    let h = complete_homogeneous(nodes, coeffs.len() - 1 - n);
    coeffs[n..].iter().zip(&h).map(|(c, hk)| c * hk).sum()
}

/// Taylor-expansion value of a divided difference over a tight cluster.
fn cluster_dd<F: Univariate + ?Sized>(nodes: &[f64], f: &F, extra: usize) -> Option<f64> {
    let k = nodes.len() - 1;
    let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c = 0.5 * (lo + hi);
    if hi == lo {
        let coeffs = f.taylor(c, k);
        return Some(coeffs[k]);
    }
    let shifted: Vec<f64> = nodes.iter().map(|x| x - c).collect();
    let extra = extra.max(2);
    let coeffs = f.taylor(c, k + extra);
    let h = complete_homogeneous(&shifted, extra);
    let terms: Vec<f64> = (0..=extra).map(|m| coeffs[k + m] * h[m]).collect();
    let sum: f64 = terms.iter().sum();
    let tail = terms[extra].abs() + terms[extra - 1].abs();
    if tail <= 1e-15 * sum.abs().max(coeffs[k].abs()) + f64::MIN_POSITIVE {
        Some(sum)
    } else {
        None
    }
}

/// `[x_0, ..., x_n; f]` for arbitrary (possibly repeated) nodes.
pub fn dd<F: Univariate + ?Sized>(nodes: &[f64], f: &F) -> Result<f64> {
    dd_with(nodes, f, &DdOptions::default())
}

pub fn dd_with<F: Univariate + ?Sized>(nodes: &[f64], f: &F, opts: &DdOptions) -> Result<f64> {
    check_domain(nodes, f)?;
    if let Some(p) = f.polynomial() {
        return Ok(polynomial_dd(&p, nodes));
    }
    let mut x = nodes.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len();
    // table[i] holds [x_i, ..., x_{i+len}] for the current length.
    let mut table: Vec<f64> = x.iter().map(|&v| f.eval(v)).collect();
    for len in 1..n {
        let mut next = Vec::with_capacity(n - len);
        for i in 0..n - len {
            let (a, b) = (x[i], x[i + len]);
            let scale = a.abs().max(b.abs()).max(1.0);
            let mut value = None;
            if b - a <= opts.cluster_tol * scale {
                value = cluster_dd(&x[i..=i + len], f, opts.extra_terms);
            }
            let v = match value {
                Some(v) => v,
                None if b > a => (table[i + 1] - table[i]) / (b - a),
                None => cluster_dd(&x[i..=i + len], f, 0).unwrap(),
            };
            next.push(v);
        }
        table = next;
    }
    Ok(table[0])
}

/// The defining recursion, with derivatives only for exactly repeated nodes.
pub fn dd_recursive<F: Univariate + ?Sized>(nodes: &[f64], f: &F) -> Result<f64> {
    check_domain(nodes, f)?;
    let mut x = nodes.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    fn rec<F: Univariate + ?Sized>(x: &[f64], f: &F) -> f64 {
        let k = x.len() - 1;
        let (a, b) = (x[0], x[k]);
        if a == b {
            return f.taylor(a, k)[k];
        }
        (rec(&x[1..], f) - rec(&x[..k], f)) / (b - a)
    }
    Ok(rec(&x, f))
}

/// Explicit sum `sum_i f(x_i) / prod_{j != i} (x_i - x_j)` for distinct nodes.
pub fn dd_explicit<F: Univariate + ?Sized>(nodes: &[f64], f: &F) -> Result<f64> {
    check_domain(nodes, f)?;
    let mut total = 0.0;
    for (i, &xi) in nodes.iter().enumerate() {
        let mut denom = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                if xi == xj {
                    return Err(Error::CoincidentNodes(xi, xj));
                }
                denom *= xi - xj;
            }
        }
        total += f.eval(xi) / denom;
    }
    Ok(total)
}

/// Simplex integral `int f^(n)(sum_j s_j x_j) ds` over the `n`-simplex.
pub fn dd_hermite_genocchi<F: Univariate + ?Sized>(
    nodes: &[f64],
    f: &F,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_domain(nodes, f)?;
    let n = nodes.len() - 1;
    let nf = factorial(n);
    integrate_simplex_smooth(n, spec, |s| {
        let y: f64 = s.iter().zip(nodes).map(|(a, b)| a * b).sum();
        f.taylor(y, n)[n] * nf
    })
}

/// `d^beta / dx^beta [x_0, ..., x_n; f]`, the multi-index derivative in the nodes.
pub fn dd_node_derivative<F: Univariate + ?Sized>(nodes: &[f64], f: &F, beta: &[usize]) -> Result<f64> {
    if beta.len() != nodes.len() {
        return Err(Error::InvalidArgument("beta must have one entry per node".into()));
    }
    let mut expanded = Vec::with_capacity(nodes.len() + beta.iter().sum::<usize>());
    let mut weight = 1.0;
    for (&x, &b) in nodes.iter().zip(beta) {
        expanded.extend(std::iter::repeat_n(x, b + 1));
        weight *= factorial(b);
    }
    Ok(weight * dd(&expanded, f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd_calculus::parse::parse_function;

    #[test]
    fn worked_examples() {
        let sq = ScalarFunction::power(2.0);
        assert!((dd(&[1.0, 3.0], &sq).unwrap() - 4.0).abs() < 1e-15);
        let e = ScalarFunction::exp_linear(1.0);
        let v = dd(&[0.5, 0.5, 0.5], &e).unwrap();
        assert!((v - 0.5f64.exp() / 2.0).abs() < 1e-15);
        let v = dd_node_derivative(&[0.3, 1.1], &sq, &[1, 0]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn near_coincident_nodes_are_stable() {
        let f = parse_function("log(t)").unwrap();
        let x = 0.8;
        let eps = 1e-9;
        let v = dd(&[x, x + eps, x + 2.0 * eps], &f).unwrap();
        let exact = -0.5 / (x * x) * (1.0 - 2.0 * eps / x);
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn domain_errors() {
        let f = ScalarFunction::log();
        assert!(matches!(dd(&[-1.0, 1.0], &f), Err(Error::OutOfDomain { .. })));
        assert!(matches!(dd_explicit(&[1.0, 1.0], &f), Err(Error::CoincidentNodes(..))));
    }
}
