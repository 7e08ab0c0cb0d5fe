//! Closed forms for the doubly twisted symbol `f(t) g^{-1} (+) ft(t) gt^{-1}` on four tori.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `ln(r) / (r - 1)`, continuous at `r = 1`.
fn log_ratio(r: f64) -> f64 {
    let e = r - 1.0;
    if e == 0.0 {
        1.0
    } else {
        e.ln_1p() / e
    }
}

/// `(1 - r + r ln r) / (1 - r)^2`, continuous at `r = 1`.
fn phi(r: f64) -> f64 {
    let e = r - 1.0;
    if e.abs() < 1e-3 {
        (0..8).map(|k| (-e).powi(k) / ((k + 1) * (k + 2)) as f64).sum()
    } else {
        (1.0 - r + r * r.ln()) / (e * e)
    }
}

/// Values of the twisting factors at the two arguments.
#[derive(Clone, Copy, Debug)]
pub struct Dt4Point {
    pub f0: f64,
    pub f1: f64,
    pub ft0: f64,
    pub ft1: f64,
}

fn check(g: &DMatrix<f64>, gt: &DMatrix<f64>) -> Result<f64> {
    if g.shape() != (2, 2) || gt.shape() != (2, 2) {
        return Err(Error::InvalidArgument("doubly twisted closed forms need two 2x2 blocks".into()));
    }
    Ok((g.determinant() * gt.determinant()).sqrt())
}

pub fn dt4_t11(p: Dt4Point, g: &DMatrix<f64>, gt: &DMatrix<f64>) -> Result<f64> {
    let sq = check(g, gt)?;
    let r = p.f0 * p.ft1 / (p.f1 * p.ft0);
    Ok(sq * log_ratio(r) / (p.f1 * p.ft0))
}

/// `T_{kl;2,1}(t0, t1)` as a block-diagonal 4x4 matrix with lower indices.
pub fn dt4_t21(p: Dt4Point, g: &DMatrix<f64>, gt: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sq = check(g, gt)?;
    let r = p.f0 * p.ft1 / (p.f1 * p.ft0);
    let first = sq * phi(r) / (2.0 * p.f0 * p.f1 * p.ft0);
    let second = sq * phi(1.0 / r) / (2.0 * p.ft0 * p.ft1 * p.f0);
    let mut out = DMatrix::zeros(4, 4);
    out.view_mut((0, 0), (2, 2)).copy_from(&(g * first));
    out.view_mut((2, 2), (2, 2)).copy_from(&(gt * second));
    Ok(out)
}
