//! Curvature functions `K, H` of conformal and twisted product metrics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curvature::removable::eval_removable;
use crate::curvature::{conformal, twisted};
use crate::dd_calculus::{dd, ScalarFunction};
use crate::error::{Error, Result};

/// Which pair of functions a [`CurvatureFunctions`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureKind {
    /// `K_d, H_d`, multiplying `g^{ij}`.
    Conformal,
    /// `K~_r, H~_r`, multiplying the untwisted block `g~^{ij}`.
    TwistedTilde,
}

/// `K(t0, t1) = K^t(f(t0), f(t1)) [t0, t1; f]` and
/// `H(t0, t1, t2) = H^t(f0, f1, f2) [t0, t1; f] [t1, t2; f] + 2 K^t(f0, f2) [t0, t1, t2; f]`.
#[derive(Clone, Debug)]
pub struct CurvatureFunctions {
    pub kind: CurvatureKind,
    /// `d` for conformal metrics, `r` for twisted ones.
    pub dim: f64,
    pub f: ScalarFunction,
}

/// `K_d, H_d` of the metric `f(t)^{-1} g`.
pub fn kh_conformal(d: f64, f: ScalarFunction) -> Result<CurvatureFunctions> {
    if !(d >= 2.0) {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    Ok(CurvatureFunctions { kind: CurvatureKind::Conformal, dim: d, f })
}

/// `(K_r, H_r)` and `(K~_r, H~_r)` of the metric `f(t)^{-1} g (+) g~` with `g` of size `r`.
pub fn kh_twisted(r: f64, f: ScalarFunction) -> Result<(CurvatureFunctions, CurvatureFunctions)> {
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("twisted rank must be at least 1, got {r}")));
    }
    let main = CurvatureFunctions { kind: CurvatureKind::Conformal, dim: r, f: f.clone() };
    let tilde = CurvatureFunctions { kind: CurvatureKind::TwistedTilde, dim: r, f };
    Ok((main, tilde))
}

fn check_positive(v: &[f64]) -> Result<()> {
    match v.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        Some(&x) => Err(Error::OutOfDomain { func: "curvature function".into(), point: x }),
        None => Ok(()),
    }
}

impl CurvatureFunctions {
    /// `K^t(x, y)`, the function for `f(t) = t`.
    pub fn k_t(&self, x: f64, y: f64) -> Result<f64> {
        check_positive(&[x, y])?;
        let d = self.dim;
        let v = match self.kind {
            CurvatureKind::Conformal => eval_removable(&|a: &[Complex64]| conformal::k_t(d, a[0], a[1]), &[x, y]),
            CurvatureKind::TwistedTilde => eval_removable(&|a: &[Complex64]| twisted::kt_t(d, a[0], a[1]), &[x, y]),
        };
        Ok(v)
    }

    /// `H^t(x, y, z)`, the function for `f(t) = t`.
    pub fn h_t(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        check_positive(&[x, y, z])?;
        let d = self.dim;
        let v = match self.kind {
            CurvatureKind::Conformal => {
                eval_removable(&|a: &[Complex64]| conformal::h_t(d, a[0], a[1], a[2]), &[x, y, z])
            }
            CurvatureKind::TwistedTilde => {
                eval_removable(&|a: &[Complex64]| twisted::ht_t(d, a[0], a[1], a[2]), &[x, y, z])
            }
        };
        Ok(v)
    }

    pub fn k(&self, t0: f64, t1: f64) -> Result<f64> {
        let (f0, f1) = (self.f.eval(t0), self.f.eval(t1));
        Ok(self.k_t(f0, f1)? * dd(&[t0, t1], &self.f)?)
    }

    pub fn h(&self, t0: f64, t1: f64, t2: f64) -> Result<f64> {
        let (f0, f1, f2) = (self.f.eval(t0), self.f.eval(t1), self.f.eval(t2));
        let first = self.h_t(f0, f1, f2)? * dd(&[t0, t1], &self.f)? * dd(&[t1, t2], &self.f)?;
        let second = 2.0 * self.k_t(f0, f2)? * dd(&[t0, t1, t2], &self.f)?;
        Ok(first + second)
    }
}

/// Largest deviation from `K(s0, s0 + s1) = e^{(1 - d/2) s0} K(0, s1)` over the
/// samples `(s0, s1)`; the identity holds for `f(t) = e^t`.
pub fn homogeneity_check(k: &CurvatureFunctions, samples: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(s0, s1) in samples {
        let lhs = k.k(s0, s0 + s1)?;
        let rhs = ((1.0 - k.dim / 2.0) * s0).exp() * k.k(0.0, s1)?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd_calculus::parse_function;

    #[test]
    fn classical_limits_at_coincident_points() {
        let f = parse_function("exp(-2*t)").unwrap();
        for d in [3.0, 4.0, 6.0] {
            let kh = kh_conformal(d, f.clone()).unwrap();
            let t = 0.3;
            let (k_lim, h_lim) = conformal::classical_limits(d, t);
            assert!((kh.k(t, t).unwrap() - k_lim).abs() < 1e-10 * k_lim.abs());
            assert!((kh.h(t, t, t).unwrap() - h_lim).abs() < 1e-10 * h_lim.abs().max(1.0));
        }
    }

    #[test]
    fn near_coincident_points_are_continuous() {
        let f = parse_function("exp(t)").unwrap();
        let kh = kh_conformal(5.0, f).unwrap();
        let a = kh.h(0.2, 0.2 + 1e-7, 0.2 - 2e-7).unwrap();
        let b = kh.h(0.2, 0.2, 0.2).unwrap();
        assert!((a - b).abs() < 1e-6 * b.abs());
    }
}
