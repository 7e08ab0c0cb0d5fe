//! Closed forms of the total curvature kernel for twisted and doubly twisted metrics.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

use crate::curvature::removable::{circle_mean, eval_removable};
use crate::dd_calculus::ScalarFunction;
use crate::error::{Error, Result};

/// `F_S(x, y)` of the twisted product metric with `f(t) = t`, multiplying `g^{ij}`.
pub fn twisted_fs(r: f64, x: f64, y: f64) -> f64 {
    let f = |a: &[C]| {
        let (x, y) = (a[0], a[1]);
        let h = r / 2.0;
        (x * y).powf(-r) / ((x - y).powi(3) * (2.0 * r))
            * (y * x.powf(h) + x * y.powf(h))
            * ((x * y).powf(h) * (x - y) * (r - 1.0) - y * x.powf(r) + x * y.powf(r))
    };
    eval_removable(&f, &[x, y])
}

/// `F~_S(x, y)` of the twisted product metric with `f(t) = t`, multiplying `g~^{ij}`.
/// At `r = 2` the numerator and the factor `r - 2` both vanish and the value is
/// the limit, obtained from the derivative of the numerator in `r`.
pub fn twisted_fs_tilde(r: f64, x: f64, y: f64) -> f64 {
    if r == 2.0 {
        return eval_removable(&twisted_fs_tilde_two, &[x, y]);
    }
    let f = |a: &[C]| {
        let (x, y) = (a[0], a[1]);
        let h = r / 2.0;
        (x * y).powf(-r) / ((x - y).powi(3) * (2.0 * (r - 2.0)))
            * (x.powf(h) * y.powf(r) * (x * r + y * (1.0 - r)) - y * x.powf(3.0 * h)
                + x.powf(r) * y.powf(h) * (x * (r - 1.0) - y * r)
                + x * y.powf(3.0 * h))
    };
    eval_removable(&f, &[x, y])
}

fn twisted_fs_tilde_two(a: &[C]) -> C {
    let (x, y) = (a[0], a[1]);
    let (lx, ly) = (x.ln(), y.ln());
    let numerator_dr = x * y * y * ((lx * 0.5 + ly) * (x * 2.0 - y) + x - y) - y * x.powi(3) * lx * 1.5
        + x * x * y * ((lx + ly * 0.5) * (x - y * 2.0) + x - y)
        + x * y.powi(3) * ly * 1.5;
    numerator_dr / ((x * y).powi(2) * (x - y).powi(3) * 2.0)
}

/// Scalar factor of `F_S^{ij}` for the doubly twisted metric
/// `f^{-1} g (+) ft^{-1} gt` on the four torus, in the block of `g`.
/// The other block follows by exchanging `(f, g)` with `(ft, gt)`.
pub fn doubly_twisted_fs_factor(t0: f64, t1: f64, f0: f64, f1: f64, ft0: f64, ft1: f64) -> f64 {
    let r = |x: f64| C::new(x, 0.0);
    factor(r(t0), r(t1), r(f0), r(f1), r(ft0), r(ft1)).re
}

fn factor(t0: C, t1: C, f0: C, f1: C, ft0: C, ft1: C) -> C {
    let cross = f1 * ft0 - f0 * ft1;
    let bracket = f1 / ft1 * (f0 * ((f0 * ft1 / (f1 * ft0)).ln() + 1.0) + f1)
        - f0 / ft0 * (f1 * ((f1 * ft0 / (f0 * ft1)).ln() + 1.0) + f0);
    (ft0 * ft0 - ft1 * ft1) * bracket / ((t0 - t1).powi(2) * cross * cross * 4.0)
}

/// Separation of the arguments below which the factor is evaluated as a circle mean.
const NEAR: f64 = 0.05;
/// Radius of that circle, in the second argument.
const NEAR_RADIUS: f64 = 0.2;

fn factor_of(t0: f64, t1: f64, f: &ScalarFunction, ft: &ScalarFunction) -> Result<f64> {
    if (t0 - t1).abs() >= NEAR {
        return Ok(doubly_twisted_fs_factor(t0, t1, f.eval(t0), f.eval(t1), ft.eval(t0), ft.eval(t1)));
    }
    let z0 = C::new(t0, 0.0);
    let (f0, ft0) = (f.eval_complex(z0), ft.eval_complex(z0));
    let (Some(f0), Some(ft0)) = (f0, ft0) else {
        return Err(Error::InvalidArgument("coincident arguments need functions with a complex extension".into()));
    };
    let v = circle_mean(
        |z| match (f.eval_complex(z), ft.eval_complex(z)) {
            (Some(f1), Some(ft1)) => factor(z0, z, f0, f1, ft0, ft1),
            _ => C::new(f64::NAN, 0.0),
        },
        t1,
        NEAR_RADIUS,
    );
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::OutOfDomain { func: "doubly twisted F_S".into(), point: t1 })
    }
}

/// The full `F_S^{ij}` matrix of the doubly twisted example.
pub fn doubly_twisted_fs(
    t0: f64,
    t1: f64,
    f: &ScalarFunction,
    ft: &ScalarFunction,
    g: &DMatrix<f64>,
    gt: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let sq = (g.determinant() * gt.determinant()).sqrt();
    let first = factor_of(t0, t1, f, ft)?;
    let second = factor_of(t0, t1, ft, f)?;
    let (r, s) = (g.nrows(), gt.nrows());
    let mut out = DMatrix::zeros(r + s, r + s);
    let gi = g.clone().try_inverse().ok_or(Error::NotPositiveDefinite { t: t0 })?;
    let gti = gt.clone().try_inverse().ok_or(Error::NotPositiveDefinite { t: t0 })?;
    out.view_mut((0, 0), (r, r)).copy_from(&(gi * (sq * first)));
    out.view_mut((r, r), (s, s)).copy_from(&(gti * (sq * second)));
    Ok(out)
}
