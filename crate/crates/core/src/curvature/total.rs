//! Total scalar curvature kernel `F_S^{ij}` with
//! `phi(R) = phi(F_S^{ij}(h0, h1)(delta_i h) delta_j h)`, and the dimension-two
//! Gauss-Bonnet check.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{FunctionalMetric, MetricFamily};
use crate::quadrature::QuadratureSpec;
use crate::tfunc::{dim2_coefficients, dim2_t_values, dt4_t11, dt4_t21, Dim2Branch, Dt4Point, TMethod, TSource};

/// Relative separation of `t0, t1` below which `F_S` is obtained by interpolation.
pub const DEFAULT_COINCIDENCE_GAP: f64 = 0.1;

/// `T_{;1,1}`, `T_{kl;1,2}` and `T_{kl;2,1}` at `(t0, t1)`.
#[derive(Clone, Debug)]
pub struct KernelTValues {
    pub t11: f64,
    pub t12: DMatrix<f64>,
    pub t21: DMatrix<f64>,
    pub method: TMethod,
}

/// `F_S^{ij}(t0, t1)` for one functional metric.
pub struct TotalCurvatureKernel {
    metric: FunctionalMetric,
    source: Box<dyn TSource>,
    pub coincidence_gap: f64,
}

pub fn total_curvature_kernel(metric: &FunctionalMetric, spec: QuadratureSpec) -> TotalCurvatureKernel {
    TotalCurvatureKernel {
        metric: metric.clone(),
        source: metric.t_source(spec),
        coincidence_gap: DEFAULT_COINCIDENCE_GAP,
    }
}

impl TotalCurvatureKernel {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `A^{ij} = |g|^{1/4}(t0) |g|^{-1/4}(t1) g^{ij}(t0) + (t0 <-> t1)`.
    pub fn a(&self, t0: f64, t1: f64) -> DMatrix<f64> {
        let (g0, g1) = (self.metric.det().eval(t0), self.metric.det().eval(t1));
        let r = (g0 / g1).powf(0.25);
        self.metric.upper().eval(t0) * r + self.metric.upper().eval(t1) / r
    }

    /// The T-functions entering `F_S`, from the most specific source available.
    pub fn t_values(&self, t0: f64, t1: f64) -> Result<KernelTValues> {
        let d = self.dim();
        if d == 2 {
            let p0 = self.metric.upper().eval(t0);
            let p1 = self.metric.upper().eval(t1);
            let fwd = dim2_t_values(&p0, &p1)?;
            let bwd = dim2_t_values(&p1, &p0)?;
            return Ok(KernelTValues { t11: fwd.t11, t12: bwd.t21, t21: fwd.t21, method: TMethod::Dim2Closed });
        }
        if let MetricFamily::DoublyTwisted { f, ft, g, gt } = &self.metric.family {
            if g.nrows() == 2 && gt.nrows() == 2 {
                let p = Dt4Point { f0: f.eval(t0), f1: f.eval(t1), ft0: ft.eval(t0), ft1: ft.eval(t1) };
                let q = Dt4Point { f0: p.f1, f1: p.f0, ft0: p.ft1, ft1: p.ft0 };
                return Ok(KernelTValues {
                    t11: dt4_t11(p, g, gt)?,
                    t12: dt4_t21(q, g, gt)?,
                    t21: dt4_t21(p, g, gt)?,
                    method: TMethod::DoublyTwisted,
                });
            }
        }
        let t = [t0, t1];
        let t11 = self.source.rule(&[1, 1], &t, 0)?.eval(&[]);
        let r12 = self.source.rule(&[1, 2], &t, 1)?;
        let r21 = self.source.rule(&[2, 1], &t, 1)?;
        Ok(KernelTValues {
            t11,
            t12: DMatrix::from_fn(d, d, |k, l| r12.eval(&[k, l])),
            t21: DMatrix::from_fn(d, d, |k, l| r21.eval(&[k, l])),
            method: self.source.method(),
        })
    }

    /// The formula itself; ill conditioned when `t0` and `t1` are close.
    pub fn direct(&self, t0: f64, t1: f64) -> Result<DMatrix<f64>> {
        if t0 == t1 {
            return Err(Error::CoincidentNodes(t0, t1));
        }
        let tv = self.t_values(t0, t1)?;
        let a = self.a(t0, t1);
        let g0 = self.metric.upper().eval(t0);
        let g1 = self.metric.upper().eval(t1);
        let q = (self.metric.det().eval(t0) * self.metric.det().eval(t1)).powf(0.25);
        let mut f = &a * (q - 2.0 * tv.t11);
        for (t, g) in [(&tv.t12, &g1), (&tv.t21, &g0)] {
            let at = &a * t;
            f += &at * g * 2.0 + g * t.transpose() * &a * 2.0 - &at * &a;
        }
        Ok(f / (2.0 * (t0 - t1).powi(2)))
    }

    /// `F_S^{ij}(t0, t1)`; near the diagonal the value is interpolated from
    /// well separated points along `t1 - t0`.
    pub fn f_s(&self, t0: f64, t1: f64) -> Result<DMatrix<f64>> {
        let c = 0.5 * (t0 + t1);
        let h = self.coincidence_gap * c.abs().max(1.0);
        let s0 = t1 - t0;
        if s0.abs() >= h {
            return self.direct(t0, t1);
        }
        let nodes: Vec<f64> = (0..6).flat_map(|k| {
            let s = h * (1.0 + 0.5 * k as f64);
            [-s, s]
        }).collect();
        let values = nodes
            .iter()
            .map(|&s| self.direct(c - 0.5 * s, c + 0.5 * s))
            .collect::<Result<Vec<_>>>()?;
        Ok(lagrange(&nodes, &values, s0))
    }
}

fn lagrange(nodes: &[f64], values: &[DMatrix<f64>], x: f64) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(values[0].nrows(), values[0].ncols());
    for (k, (&xk, vk)) in nodes.iter().zip(values).enumerate() {
        let w: f64 = nodes
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, &xm)| (x - xm) / (xk - xm))
            .product();
        out += vk * w;
    }
    out
}

/// Outcome of a Gauss-Bonnet check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussBonnetReport {
    pub max_abs: f64,
    pub samples: usize,
    pub positive: usize,
    pub negative: usize,
    pub degenerate: usize,
}

/// Largest `|F_S^{ij}(t0, t1)|` over `samples` random points of `[lo, hi]^2`
/// for a two-dimensional metric.
pub fn gauss_bonnet_check<R: Rng>(
    metric: &FunctionalMetric,
    lo: f64,
    hi: f64,
    samples: usize,
    rng: &mut R,
) -> Result<GaussBonnetReport> {
    if metric.dim() != 2 {
        return Err(Error::InvalidArgument("the Gauss-Bonnet check needs a two-dimensional metric".into()));
    }
    let kernel = total_curvature_kernel(metric, QuadratureSpec::default());
    let mut report = GaussBonnetReport { max_abs: 0.0, samples, positive: 0, negative: 0, degenerate: 0 };
    for _ in 0..samples {
        let t0 = rng.gen_range(lo..hi);
        let t1 = rng.gen_range(lo..hi);
        let (_, _, _, branch) = dim2_coefficients(&metric.upper().eval(t0), &metric.upper().eval(t1));
        match branch {
            Dim2Branch::Positive => report.positive += 1,
            Dim2Branch::Negative => report.negative += 1,
            Dim2Branch::Degenerate | Dim2Branch::NearDegenerate => report.degenerate += 1,
        }
        let f = kernel.f_s(t0, t1)?;
        report.max_abs = report.max_abs.max(f.amax());
    }
    Ok(report)
}
