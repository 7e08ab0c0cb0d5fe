//! Cubature on the standard simplex `{s_j >= 0, sum s_j = 1}`.
//!
//! Points are given in barycentric form `(s_0, ..., s_n)`; weights integrate
//! against Lebesgue measure on the projected simplex, whose volume is `1/n!`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Controls for adaptive simplex cubature.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per panel and coordinate.
    pub order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest number of panels per coordinate before giving up.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: 12, abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 16 }
    }
}

/// A fixed cubature rule on the `n`-simplex.
#[derive(Clone, Debug)]
pub struct SimplexRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

fn unit_interval_rule(order: usize, panels: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let a = p as f64 * h;
        for &(x, w) in gl.as_node_weight_pairs() {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

impl SimplexRule {
    /// Tensor Gauss-Legendre rule pulled back through the collapsed-cube map.
    pub fn gauss(dim: usize, order: usize, panels: usize) -> Self {
        if dim == 0 {
            return SimplexRule { dim, points: vec![vec![1.0]], weights: vec![1.0] };
        }
        let line = unit_interval_rule(order, panels);
        let m = line.len();
        let total = m.pow(dim as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut s = vec![0.0; dim + 1];
            let mut rem = 1.0;
            let mut w = 1.0;
            for k in 0..dim {
                let (u, wu) = line[idx[k]];
                w *= wu * rem;
                s[k + 1] = rem * u;
                rem *= 1.0 - u;
            }
            s[0] = rem;
            points.push(s);
            weights.push(w);
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
        SimplexRule { dim, points, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    fn integrate_many<F: FnMut(&[f64]) -> Vec<f64>>(&self, mut f: F) -> Vec<f64> {
        let mut acc: Vec<f64> = Vec::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(p);
            if acc.is_empty() {
                acc = vec![0.0; v.len()];
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += w * x;
            }
        }
        acc
    }
}

/// Refines panels until every probe functional has converged and returns the
/// finest rule.
pub fn adaptive_rule<F>(dim: usize, spec: &QuadratureSpec, mut probes: F) -> Result<SimplexRule>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    if dim == 0 {
        return Ok(SimplexRule::gauss(0, 1, 1));
    }
    let mut panels = 1;
    let mut prev = SimplexRule::gauss(dim, spec.order, panels).integrate_many(&mut probes);
    let mut worst = f64::INFINITY;
    loop {
        let next_panels = panels * 2;
        if next_panels > spec.max_panels {
            return Err(Error::Quadrature { tol: spec.abs_tol, change: worst });
        }
        let finer = SimplexRule::gauss(dim, spec.order, next_panels);
        let cur = finer.integrate_many(&mut probes);
        worst = 0.0;
        let mut ok = true;
        for (a, b) in prev.iter().zip(&cur) {
            let diff = (a - b).abs();
            worst = worst.max(diff);
            if !(diff <= spec.abs_tol + spec.rel_tol * b.abs()) {
                ok = false;
            }
        }
        if ok {
            return Ok(finer);
        }
        panels = next_panels;
        prev = cur;
    }
}

/// Adaptive integral of a scalar function over the `dim`-simplex.
pub fn integrate_simplex<F>(dim: usize, spec: &QuadratureSpec, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let rule = adaptive_rule(dim, spec, |s| vec![f(s)])?;
    Ok(rule.integrate(f))
}

/// Integral of a smooth function over the `dim`-simplex: raises the Gauss
/// order on a single panel up to `spec.order`, then falls back to
/// [`integrate_simplex`].
pub fn integrate_simplex_smooth<F>(dim: usize, spec: &QuadratureSpec, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut prev: Option<f64> = None;
    let mut order = 2;
    while order <= spec.order.max(2) {
        let cur = SimplexRule::gauss(dim, order, 1).integrate(&mut f);
        if let Some(p) = prev {
            if (cur - p).abs() <= spec.abs_tol + spec.rel_tol * cur.abs() {
                return Ok(cur);
            }
        }
        prev = Some(cur);
        order += 2;
    }
    integrate_simplex(dim, spec, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_volume_and_moments() {
        for dim in 1..=3 {
            let rule = SimplexRule::gauss(dim, 6, 1);
            let vol = rule.integrate(|_| 1.0);
            let fact: f64 = (1..=dim).map(|k| k as f64).product();
            assert!((vol - 1.0 / fact).abs() < 1e-14);
            // Dirichlet moment: int s_0 s_1^2 = 1! 2! / (n + 3)!
            let m = rule.integrate(|s| s[0] * s[1] * s[1]);
            let expect = 2.0 / (1..=dim + 3).map(|k| k as f64).product::<f64>();
            assert!((m - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_converges_on_near_singular_integrand() {
        let spec = QuadratureSpec::default();
        let v = integrate_simplex(1, &spec, |s| 1.0 / (s[1] + 0.05)).unwrap();
        assert!((v - (1.05f64 / 0.05).ln()).abs() < 1e-11);
    }

    #[test]
    fn order_refinement_on_a_smooth_integrand() {
        let spec = QuadratureSpec::default();
        let v = integrate_simplex_smooth(4, &spec, |s| (s[1] + 2.0 * s[3]).exp()).unwrap();
        let w = integrate_simplex(4, &spec, |s| (s[1] + 2.0 * s[3]).exp()).unwrap();
        assert!((v - w).abs() < 1e-13);
    }
}
