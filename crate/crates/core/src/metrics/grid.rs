//! Periodic grid functions on the flat torus `[0, 2 pi)^d`, spectral
//! derivatives, and the classical scalar curvature of `g_ij(h(x)) dx^i dx^j`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::FunctionalMetric;

/// Uniform grid with `shape[a]` points along axis `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub shape: Vec<usize>,
    /// Largest allowed size of the upper third of the spectrum of `h`,
    /// relative to its largest coefficient.
    pub tail_tol: f64,
}

impl GridSpec {
    pub fn square(d: usize, n: usize) -> Self {
        GridSpec { shape: vec![n; d], tail_tol: 1e-10 }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the point with row-major index `idx`.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.shape[a];
            x[a] = 2.0 * PI * (idx % n) as f64 / n as f64;
            idx /= n;
        }
        x
    }
}

/// Samples of a periodic function in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

/// First and second spectral derivatives of a grid function.
#[derive(Clone, Debug)]
pub struct GridDerivatives {
    pub gradient: Vec<Vec<f64>>,
    /// `hessian[a * d + b]` holds `d_a d_b h`.
    pub hessian: Vec<Vec<f64>>,
}

impl GridDerivatives {
    pub fn gradient_at(&self, idx: usize) -> Vec<f64> {
        self.gradient.iter().map(|g| g[idx]).collect()
    }

    pub fn hessian_at(&self, idx: usize) -> DMatrix<f64> {
        let d = self.gradient.len();
        DMatrix::from_fn(d, d, |a, b| self.hessian[a * d + b][idx])
    }
}

fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Applies a Fourier multiplier `m(k)` along one axis; with `back = false`
/// the data is left in frequency space.
fn along_axis(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex64],
    shape: &[usize],
    axis: usize,
    back: bool,
    m: impl Fn(usize, usize) -> Complex64,
) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            fwd.process(&mut line);
            for (k, v) in line.iter_mut().enumerate() {
                *v *= m(k, n) / n as f64;
            }
            if back {
                inv.process(&mut line);
            }
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

impl GridFunction {
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(&spec.point(i))).collect();
        GridFunction { spec, values }
    }

    /// Average over the grid, the trace of the function at `theta = 0`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    fn complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    /// Errors when the upper third of the spectrum along any axis is not negligible.
    pub fn check_resolved(&self) -> Result<()> {
        let shape = &self.spec.shape;
        let mut planner = FftPlanner::new();
        let mut c = self.complex();
        for a in 0..shape.len() {
            along_axis(&mut planner, &mut c, shape, a, false, |_, n| Complex64::new(n as f64, 0.0));
        }
        let total = self.values.len() as f64;
        let mut peak: f64 = 0.0;
        let mut tail: f64 = 0.0;
        for (i, v) in c.iter().enumerate() {
            let mag = v.norm() / total;
            peak = peak.max(mag);
            let mut rest = i;
            let mut high = false;
            for a in (0..shape.len()).rev() {
                let n = shape[a];
                high |= wavenumber(rest % n, n).abs() > n as f64 / 3.0;
                rest /= n;
            }
            if high {
                tail = tail.max(mag);
            }
        }
        if tail > self.spec.tail_tol * peak.max(f64::MIN_POSITIVE) {
            return Err(Error::GridTooCoarse { tail: tail / peak });
        }
        Ok(())
    }

    /// Spectral gradient and Hessian; the Nyquist mode is dropped from first derivatives.
    pub fn derivatives(&self) -> Result<GridDerivatives> {
        self.check_resolved()?;
        let shape = &self.spec.shape;
        let d = shape.len();
        let mut planner = FftPlanner::new();
        let first = |k: usize, n: usize| {
            if 2 * k == n {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, wavenumber(k, n))
            }
        };
        let second = |k: usize, n: usize| Complex64::new(-wavenumber(k, n).powi(2), 0.0);
        let re = |c: Vec<Complex64>| c.into_iter().map(|v| v.re).collect::<Vec<_>>();
        let mut gradient = Vec::with_capacity(d);
        for a in 0..d {
            let mut c = self.complex();
            along_axis(&mut planner, &mut c, shape, a, true, first);
            gradient.push(re(c));
        }
        let mut hessian = vec![Vec::new(); d * d];
        for a in 0..d {
            for b in a..d {
                let mut c = self.complex();
                if a == b {
                    along_axis(&mut planner, &mut c, shape, a, true, second);
                } else {
                    along_axis(&mut planner, &mut c, shape, a, true, first);
                    along_axis(&mut planner, &mut c, shape, b, true, first);
                }
                let v = re(c);
                hessian[b * d + a] = v.clone();
                hessian[a * d + b] = v;
            }
        }
        Ok(GridDerivatives { gradient, hessian })
    }
}

/// Coefficient matrices `(M1, M2)` with `R = M1^{mu nu} d_mu h d_nu h + M2^{mu nu} d_mu d_nu h`
/// for the metric `g_ij(h)` at `h = t`.
pub fn classical_coefficients(m: &FunctionalMetric, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let g = m.lower().eval(t);
    let g1 = m.lower().derivative(t, 1);
    let g2 = m.lower().derivative(t, 2);
    let gi = g.cholesky().ok_or(Error::NotPositiveDefinite { t })?.inverse();
    let a1 = &gi * &g1;
    let tr1 = a1.trace();
    let tr2 = (&gi * &g2).trace();
    let m1 = &gi * (-tr2 - 0.25 * tr1 * tr1 + 0.75 * (&a1 * &a1).trace())
        + &a1 * &gi * tr1
        + &gi * &g2 * &gi
        - &a1 * &a1 * &gi * 1.5;
    let m2 = &a1 * &gi - &gi * tr1;
    Ok((m1, m2))
}

/// Scalar curvature of `g_ij(h(x)) dx^i dx^j` on the flat torus.
pub fn classical_scalar_curvature(m: &FunctionalMetric, h: &GridFunction) -> Result<GridFunction> {
    if h.spec.dim() != m.dim() {
        return Err(Error::InvalidArgument(format!(
            "grid of dimension {} for a metric of dimension {}",
            h.spec.dim(),
            m.dim()
        )));
    }
    let der = h.derivatives()?;
    let values = (0..h.values.len())
        .map(|i| {
            let (m1, m2) = classical_coefficients(m, h.values[i])?;
            let grad = nalgebra::DVector::from_vec(der.gradient_at(i));
            Ok((grad.transpose() * m1 * &grad)[0] + m2.component_mul(&der.hessian_at(i)).sum())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridFunction { spec: h.spec.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivatives_of_trigonometric_polynomials() {
        let h = GridFunction::from_fn(GridSpec::square(2, 16), |x| (x[0] + 2.0 * x[1]).sin() + x[0].cos());
        let der = h.derivatives().unwrap();
        for i in [0, 7, 100, 255] {
            let x = h.spec.point(i);
            let s = (x[0] + 2.0 * x[1]).sin();
            let c = (x[0] + 2.0 * x[1]).cos();
            assert!((der.gradient[0][i] - (c - x[0].sin())).abs() < 1e-12);
            assert!((der.gradient[1][i] - 2.0 * c).abs() < 1e-12);
            assert!((der.hessian[0][i] - (-s - x[0].cos())).abs() < 1e-12);
            assert!((der.hessian[1][i] + 2.0 * s).abs() < 1e-12);
            assert!((der.hessian[3][i] + 4.0 * s).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let h = GridFunction::from_fn(GridSpec::square(1, 8), |x| (3.0 * x[0]).sin());
        assert!(matches!(h.derivatives(), Err(Error::GridTooCoarse { .. })));
    }
}
