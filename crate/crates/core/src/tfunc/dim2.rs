//! Closed forms for `T_{;1,1}` and `T_{kl;2,1}` in dimension two.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_simplex, QuadratureSpec};
use crate::tfunc::sources::spd_inverse_det;

/// Sign class of `a = det(P2(t1) - P2(t0))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim2Branch {
    Positive,
    Negative,
    Degenerate,
    /// `a` is too close to zero for the closed forms to be well conditioned.
    NearDegenerate,
}

#[derive(Clone, Debug)]
pub struct Dim2TValues {
    pub t11: f64,
    /// `T_{kl;2,1}(t0, t1)` with lower indices.
    pub t21: DMatrix<f64>,
    pub branch: Dim2Branch,
}

/// Relative size of `|a|` below which the closed forms are replaced by quadrature.
pub const NEAR_DEGENERATE: f64 = 1e-3;
/// Relative size of `|a|` treated as exactly zero.
pub const DEGENERATE: f64 = 1e-14;

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Sign class and the coefficients `(a, b, c)` of `det(s P0 + (1-s) P1) = a s^2 + b s + c`.
pub fn dim2_coefficients(p0: &DMatrix<f64>, p1: &DMatrix<f64>) -> (f64, f64, f64, Dim2Branch) {
    let a = det2(&(p1 - p0));
    let c = det2(p1);
    let p1_inv = p1.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(2, 2, f64::NAN));
    let b = -c * (DMatrix::<f64>::identity(2, 2) - p0 * p1_inv).trace();
    let scale = c.abs().max(det2(p0).abs());
    let branch = if a.abs() <= DEGENERATE * scale {
        Dim2Branch::Degenerate
    } else if a.abs() <= NEAR_DEGENERATE * scale {
        Dim2Branch::NearDegenerate
    } else if a > 0.0 {
        Dim2Branch::Positive
    } else {
        Dim2Branch::Negative
    };
    (a, b, c, branch)
}

/// `T_{;1,1}` and `T_{kl;2,1}` from the symbol values `P0 = P2(t0)`, `P1 = P2(t1)`.
pub fn dim2_t_values(p0: &DMatrix<f64>, p1: &DMatrix<f64>) -> Result<Dim2TValues> {
    if p0.shape() != (2, 2) || p1.shape() != (2, 2) {
        return Err(Error::InvalidArgument("dimension-two closed forms need 2x2 symbols".into()));
    }
    let (a, b, c, branch) = dim2_coefficients(p0, p1);
    let (g0, det_p0) = spd_inverse_det(p0)?;
    let (g1, det_p1) = spd_inverse_det(p1)?;
    let big0 = 1.0 / det_p0;
    let big1 = 1.0 / det_p1;
    let (s0, s1) = (big0.sqrt(), big1.sqrt());
    let x = &g0 / big0 - &g1 / big1;
    match branch {
        Dim2Branch::Degenerate => {
            let t11 = 2.0 * (big0 * big1).sqrt() / (s0 + s1);
            let sum = s0 + s1;
            let t21 = &g1 * (big0.powf(1.5) / (sum * sum))
                + &x * (big0.powf(1.5) * big1 * (3.0 * s0 + s1) / (3.0 * sum.powi(3)));
            Ok(Dim2TValues { t11, t21, branch })
        }
        Dim2Branch::NearDegenerate => {
            let (t11, t21) = dim2_by_quadrature(p0, p1)?;
            Ok(Dim2TValues { t11, t21, branch })
        }
        _ => {
            let t11 = if branch == Dim2Branch::Positive {
                positive_branch_t11(a, b, c)
            } else {
                let disc = (b * b - 4.0 * a * c).sqrt();
                let clamp = |v: f64| v.clamp(-1.0, 1.0);
                (clamp(b / disc).asin() - clamp((2.0 * a + b) / disc).asin()) / (-a).sqrt()
            };
            let big_d = det2(&(&g0 - &g1));
            let sum2 = (s0 + s1) * (s0 + s1);
            let coef_x = big0 * big1 * t11 / (2.0 * big_d)
                + big0.powf(1.5) * big1 * (s0 * s1 + big1 - big_d) / (big_d * (big_d - sum2));
            let coef_g1 = big0.powf(1.5) / (sum2 - big_d);
            let t21 = &x * coef_x + &g1 * coef_g1;
            Ok(Dim2TValues { t11, t21, branch })
        }
    }
}

/// `int_0^1 (a s^2 + b s + c)^{-1/2} ds` for `a > 0`. The logarithm's argument
/// is `(2a + b + 2 sqrt(a Q(1))) / (b + 2 sqrt(a c))`; each factor is replaced by
/// its conjugate form when its two terms would cancel, e.g. for perfect squares.
fn positive_branch_t11(a: f64, b: f64, c: f64) -> f64 {
    let (rac, raq) = ((a * c).sqrt(), (a * (a + b + c)).sqrt());
    let disc = 4.0 * a * c - b * b;
    let ratio = match (2.0 * a + b >= 0.0, b >= 0.0) {
        (_, true) => (2.0 * a + b + 2.0 * raq) / (b + 2.0 * rac),
        (true, false) => (2.0 * a + b + 2.0 * raq) * (2.0 * rac - b) / disc,
        (false, false) => (2.0 * rac - b) / (2.0 * raq - 2.0 * a - b),
    };
    ratio.ln() / a.sqrt()
}

/// Reference values by adaptive quadrature on the unit interval.
pub fn dim2_by_quadrature(p0: &DMatrix<f64>, p1: &DMatrix<f64>) -> Result<(f64, DMatrix<f64>)> {
    let spec = QuadratureSpec::default();
    let eval = |s: &[f64]| -> (DMatrix<f64>, f64) {
        let p = p0 * s[0] + p1 * s[1];
        let d = det2(&p);
        let adj = DMatrix::from_row_slice(2, 2, &[p[(1, 1)], -p[(0, 1)], -p[(1, 0)], p[(0, 0)]]);
        (adj / d, d)
    };
    let t11 = integrate_simplex(1, &spec, |s| 1.0 / eval(s).1.sqrt())?;
    let mut t21 = DMatrix::zeros(2, 2);
    for (k, l) in [(0, 0), (0, 1), (1, 1)] {
        let v = 0.5 * integrate_simplex(1, &spec, |s| {
            let (inv, d) = eval(s);
            s[0] * inv[(k, l)] / d.sqrt()
        })?;
        t21[(k, l)] = v;
        t21[(l, k)] = v;
    }
    Ok((t11, t21))
}
