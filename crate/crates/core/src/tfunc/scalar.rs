//! Scalar simplex integrals with closed forms in terms of divided differences.

use crate::dd_calculus::{dd, ScalarFunction};
use crate::error::{Error, Result};
use crate::jet::factorial;

/// `1/(2^{|a|-2} beta!) int_{simplex} prod s_j^{a_j - 1} (sum s_j x_j)^{-e} ds`.
///
/// Evaluated as `[x^(a); F] / 2^{|a|-2}` where node `x_j` is repeated `a_j`
/// times and `F^{(|a|-1)}(u) = u^{-e}`.
pub fn scalar_t_integral(e: f64, alpha: &[u32], x: &[f64]) -> Result<f64> {
    if alpha.len() != x.len() || alpha.contains(&0) {
        return Err(Error::InvalidArgument("alpha entries must be positive and match the nodes".into()));
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("closed-form T-functions need positive conformal factors".into()));
    }
    let total: u32 = alpha.iter().sum();
    let big_n = (total - 1) as usize;
    let mut nodes = Vec::with_capacity(big_n + 1);
    for (&a, &xv) in alpha.iter().zip(x) {
        nodes.extend(std::iter::repeat_n(xv, a as usize));
    }
    let antiderivative = antiderivative_of_power(e, big_n);
    let v = dd(&nodes, &antiderivative)?;
    Ok(v / 2f64.powi(total as i32 - 2))
}

/// A function whose `n`-th derivative is `u^{-e}`, modulo polynomials of degree `< n`.
pub fn antiderivative_of_power(e: f64, n: usize) -> ScalarFunction {
    let m = e.round();
    if (e - m).abs() < 1e-12 && m >= 1.0 && (m as usize) <= n {
        let m = m as usize;
        let c = if (m - 1).is_multiple_of(2) { 1.0 } else { -1.0 } / (factorial(n - m) * factorial(m - 1));
        let log = ScalarFunction::log();
        let body = if n == m { log } else { ScalarFunction::power((n - m) as f64).mul(&log) };
        body.scale(c)
    } else {
        let denom: f64 = (1..=n).map(|j| j as f64 - e).product();
        ScalarFunction::power(n as f64 - e).scale(1.0 / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_simplex, QuadratureSpec};

    fn by_quadrature(e: f64, alpha: &[u32], x: &[f64]) -> f64 {
        let total: u32 = alpha.iter().sum();
        let beta: f64 = alpha.iter().map(|&a| factorial(a as usize - 1)).product();
        let norm = 1.0 / (2f64.powi(total as i32 - 2) * beta);
        let spec = QuadratureSpec::default();
        norm * integrate_simplex(alpha.len() - 1, &spec, |s| {
            let xs: f64 = s.iter().zip(x).map(|(a, b)| a * b).sum();
            let w: f64 = s.iter().zip(alpha).map(|(sj, &a)| sj.powi(a as i32 - 1)).product();
            w * xs.powf(-e)
        })
        .unwrap()
    }

    #[test]
    fn matches_quadrature_for_power_and_log_cases() {
        let cases: &[(f64, &[u32], &[f64])] = &[
            (1.5, &[1, 1], &[0.7, 1.9]),
            (1.0, &[1, 1], &[0.7, 1.9]),
            (2.0, &[2, 1], &[0.7, 1.9]),
            (1.0, &[2, 1], &[0.7, 1.9]),
            (2.5, &[1, 2, 1], &[0.7, 1.9, 1.2]),
            (3.0, &[3, 1, 1], &[0.7, 1.9, 1.2]),
            (2.0, &[1, 1, 1], &[1.1, 1.1, 0.6]),
            (4.0, &[2, 2], &[0.9, 1.3]),
        ];
        for &(e, alpha, x) in cases {
            let closed = scalar_t_integral(e, alpha, x).unwrap();
            let quad = by_quadrature(e, alpha, x);
            assert!((closed - quad).abs() < 1e-11 * quad.abs().max(1.0), "{e} {alpha:?}: {closed} vs {quad}");
        }
    }

    #[test]
    fn single_node() {
        let v = scalar_t_integral(2.0, &[3], &[1.5]).unwrap();
        assert!((v - 1.5f64.powi(-2) / (2.0 * 2.0)).abs() < 1e-14);
    }
}
