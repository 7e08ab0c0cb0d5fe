//! The batch commands behind the command-line driver. Each returns a report
//! whose rows are deterministic given the configuration and seed.

use nalgebra::DMatrix;

use crate::config::RunConfig;
use crate::curvature::{b2_engine, kh_conformal, kh_twisted, CurvatureFunctions, DensityB2};
use crate::error::{Error, Result};
use crate::metrics::{FunctionalMetric, MetricFamily};
use crate::report::{join, CheckRow, CurvatureRow, Report, TFuncRow};
use crate::tfunc::{dim2_coefficients, dim2_t_values, dt4_t11, dt4_t21, normalize, Dim2Branch, Dt4Point, TFunctionQuery, TSource};
use crate::verify;

fn branch_name(b: Dim2Branch) -> String {
    match b {
        Dim2Branch::Positive => "positive",
        Dim2Branch::Negative => "negative",
        Dim2Branch::Degenerate => "degenerate",
        Dim2Branch::NearDegenerate => "near_degenerate",
    }
    .to_string()
}

/// Sign class of `det(P2(t1) - P2(t0))` for two-dimensional metrics.
fn branch(m: &FunctionalMetric, t0: f64, t1: f64) -> Option<String> {
    (m.dim() == 2).then(|| branch_name(dim2_coefficients(&m.upper().eval(t0), &m.upper().eval(t1)).3))
}

fn row(quantity: &str, t: &[f64], ij: Option<(usize, usize)>, value: f64, method: &str) -> CurvatureRow {
    CurvatureRow {
        quantity: quantity.to_string(),
        t0: t[0],
        t1: t[1],
        t2: t.get(2).copied(),
        i: ij.map(|p| p.0),
        j: ij.map(|p| p.1),
        value,
        branch: None,
        method: method.to_string(),
        delta: None,
    }
}

/// A block of the density that is a scalar multiple of `sq * inverse`.
struct Block<'a> {
    k: &'a str,
    h: &'a str,
    funcs: CurvatureFunctions,
    offset: usize,
    inverse: DMatrix<f64>,
}

impl Block<'_> {
    /// Entry of the block where the inverse metric is largest, used to read off the scalar.
    fn pivot(&self) -> (usize, usize) {
        let n = self.inverse.nrows();
        let mut best = (0, 0);
        for i in 0..n {
            for j in i..n {
                if self.inverse[(i, j)].abs() > self.inverse[best].abs() {
                    best = (i, j);
                }
            }
        }
        best
    }
}

fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.inverse()).ok_or(Error::NotPositiveDefinite { t: f64::NAN })
}

/// Tabulates `K`, `H` (and `K~`, `H~` for twisted metrics) on the configured grid.
/// Metrics without closed forms are tabulated entrywise as `B21`, `B22` from the engine.
pub fn curvature(cfg: &RunConfig) -> Result<Report<CurvatureRow>> {
    let m = cfg.metric()?;
    let grid = cfg.curvature.grid.points();
    if let Some(&t) = grid.iter().find(|&&t| t < cfg.spectrum.lo || t > cfg.spectrum.hi) {
        return Err(Error::Config(format!("grid point {t} lies outside the spectrum interval")));
    }
    let (blocks, sq) = match &m.family {
        MetricFamily::Conformal { f, g } => (
            vec![Block { k: "K", h: "H", funcs: kh_conformal(m.dim() as f64, f.clone())?, offset: 0, inverse: spd_inverse(g)? }],
            g.determinant().sqrt(),
        ),
        MetricFamily::Twisted { f, g, gt } => {
            let (main, tilde) = kh_twisted(g.nrows() as f64, f.clone())?;
            (
                vec![
                    Block { k: "K", h: "H", funcs: main, offset: 0, inverse: spd_inverse(g)? },
                    Block { k: "K~", h: "H~", funcs: tilde, offset: g.nrows(), inverse: spd_inverse(gt)? },
                ],
                (g.determinant() * gt.determinant()).sqrt(),
            )
        }
        _ => (Vec::new(), 1.0),
    };
    let engine = (blocks.is_empty() || cfg.curvature.engine).then(|| b2_engine(&m, cfg.quadrature));
    let pairs: Vec<[f64; 2]> = grid.iter().flat_map(|&a| grid.iter().map(move |&b| [a, b])).collect();
    let triples: Vec<[f64; 3]> = pairs.iter().flat_map(|p| grid.iter().map(move |&c| [p[0], p[1], c])).collect();
    let mut rows = Vec::new();
    for b in &blocks {
        let (pi, pj) = b.pivot();
        let scale = sq * b.inverse[(pi, pj)];
        let at = (b.offset + pi, b.offset + pj);
        for p in &pairs {
            let value = b.funcs.k(p[0], p[1])?;
            let br = branch(&m, p[0], p[1]);
            rows.push(CurvatureRow { branch: br.clone(), ..row(b.k, p, None, value, "closed_form") });
            if let Some(den) = &engine {
                let e = den.b21(p[0], p[1])?[at] / scale;
                rows.push(CurvatureRow { branch: br, delta: Some(e - value), ..row(b.k, p, Some(at), e, "engine") });
            }
        }
        for p in &triples {
            let value = b.funcs.h(p[0], p[1], p[2])?;
            rows.push(row(b.h, p, None, value, "closed_form"));
            if let Some(den) = &engine {
                let e = den.b22(p[0], p[1], p[2])?[at] / scale;
                rows.push(CurvatureRow { delta: Some(e - value), ..row(b.h, p, Some(at), e, "engine") });
            }
        }
    }
    if blocks.is_empty() {
        let den: &DensityB2 = engine.as_ref().expect("engine density is built when there are no closed forms");
        let d = m.dim();
        for p in &pairs {
            let b21 = den.b21(p[0], p[1])?;
            let br = branch(&m, p[0], p[1]);
            for i in 0..d {
                for j in i..d {
                    rows.push(CurvatureRow { branch: br.clone(), ..row("B21", p, Some((i, j)), b21[(i, j)], "engine") });
                }
            }
        }
        for p in &triples {
            let b22 = den.b22(p[0], p[1], p[2])?;
            for i in 0..d {
                for j in i..d {
                    rows.push(row("B22", p, Some((i, j)), b22[(i, j)], "engine"));
                }
            }
        }
    }
    Ok(Report::new(cfg.seed, rows))
}

fn trow(q: &TFunctionQuery, n: &[usize], method: &str, branch: Option<String>, value: f64) -> TFuncRow {
    TFuncRow { n: join(n), alpha: join(&q.alpha), t: join(&q.t), method: method.to_string(), branch, value }
}

/// Closed forms that apply only to particular shapes of query.
fn special_values(m: &FunctionalMetric, q: &TFunctionQuery) -> Result<Option<(&'static str, Option<String>, f64)>> {
    let (alpha, t) = normalize(&q.alpha, &q.t)?;
    let shape = match (q.n.len(), alpha.as_slice()) {
        (0, [1, 1]) => 0,
        (2, [2, 1]) => 2,
        _ => return Ok(None),
    };
    if m.dim() == 2 {
        let (p0, p1) = (m.upper().eval(t[0]), m.upper().eval(t[1]));
        let v = dim2_t_values(&p0, &p1)?;
        let value = if shape == 0 { v.t11 } else { v.t21[(q.n[0], q.n[1])] };
        return Ok(Some(("dim2_closed", Some(branch_name(v.branch)), value)));
    }
    if let MetricFamily::DoublyTwisted { f, ft, g, gt } = &m.family {
        if g.nrows() == 2 && gt.nrows() == 2 {
            let p = Dt4Point { f0: f.eval(t[0]), f1: f.eval(t[1]), ft0: ft.eval(t[0]), ft1: ft.eval(t[1]) };
            let value = if shape == 0 { dt4_t11(p, g, gt)? } else { dt4_t21(p, g, gt)?[(q.n[0], q.n[1])] };
            return Ok(Some(("doubly_twisted", None, value)));
        }
    }
    Ok(None)
}

/// Evaluates every configured query by each applicable method, followed by a
/// quadrature row with the tensor indices reversed.
pub fn tfunc(cfg: &RunConfig) -> Result<Report<TFuncRow>> {
    let m = cfg.metric()?;
    let quad = m.quadrature_source(cfg.quadrature);
    let closed = m.t_source(cfg.quadrature);
    let mut rows = Vec::new();
    for q in &cfg.tfunc.queries {
        let qv = quad.value(&q.n, &q.alpha, &q.t)?;
        rows.push(trow(q, &q.n, "quadrature", None, qv));
        if closed.method() != quad.method() {
            rows.push(trow(q, &q.n, &closed.method().to_string(), None, closed.value(&q.n, &q.alpha, &q.t)?));
        }
        if let Some((method, branch, value)) = special_values(&m, q)? {
            rows.push(trow(q, &q.n, method, branch, value));
        }
        if q.n.len() > 1 {
            let reversed: Vec<usize> = q.n.iter().rev().copied().collect();
            rows.push(trow(q, &reversed, "quadrature_reversed_indices", None, quad.value(&reversed, &q.alpha, &q.t)?));
        }
    }
    Ok(Report::new(cfg.seed, rows))
}

/// Runs the verification suite.
pub fn verify(cfg: &RunConfig) -> Report<CheckRow> {
    Report::new(cfg.seed, verify::run(&cfg.verify, cfg.seed))
}
