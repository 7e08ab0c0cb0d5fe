//! The verification suite: one group of randomized checks per acceptance
//! criterion, each reproducible from the run seed.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::conformal::classical_limits;
use crate::curvature::examples::{doubly_twisted_fs, twisted_fs, twisted_fs_tilde};
use crate::curvature::{
    b2_engine, commutative_scalar_curvature, gauss_bonnet_check, kh_conformal, reduced, scaled_classical_curvature,
    total_curvature_kernel,
};
use crate::dd_calculus::{dd, dd_explicit, dd_hermite_genocchi, dd_recursive, parse_function, ScalarFunction};
use crate::error::{Error, Result};
use crate::metrics::{FunctionalMetric, GridFunction, GridSpec, MatrixFunction};
use crate::nctorus::check_identities;
use crate::quadrature::QuadratureSpec;
use crate::report::CheckRow;
use crate::tfunc::{
    dim2_by_quadrature, dim2_coefficients, dim2_t_values, dt4_t11, dt4_t21, wick_sum, ConformalTSource, Dim2Branch,
    Dt4Point, QuadratureTSource, TSource, TwistedTSource,
};

/// Deliberate corruptions used as negative controls of the suite itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Flip the sign of the engine's `B21` before it is compared.
    FlipB21Sign,
}

/// Tolerances of the suite, one per compared quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub dd_triad: f64,
    pub dd_polynomial: f64,
    pub algebra: f64,
    pub engine_conformal: f64,
    pub special_values: f64,
    pub classical_limits: f64,
    pub tfunc_values: f64,
    pub tfunc_derivatives: f64,
    pub closed_vs_quadrature: f64,
    pub gauss_bonnet: f64,
    pub examples: f64,
    pub commutative_pointwise: f64,
    pub commutative_integral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            dd_triad: 1e-9,
            dd_polynomial: 1e-12,
            algebra: 1e-12,
            engine_conformal: 1e-7,
            special_values: 1e-10,
            classical_limits: 1e-8,
            tfunc_values: 1e-9,
            tfunc_derivatives: 1e-6,
            closed_vs_quadrature: 1e-8,
            gauss_bonnet: 1e-9,
            examples: 1e-9,
            commutative_pointwise: 1e-4,
            commutative_integral: 1e-5,
        }
    }
}

/// Sample sizes of the suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub dd_cases: usize,
    pub algebra_instances: usize,
    pub engine_points: usize,
    pub special_points: usize,
    pub closed_form_inputs: usize,
    pub gauss_bonnet_points: usize,
    pub grid: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            dd_cases: 200,
            algebra_instances: 100,
            engine_points: 50,
            special_points: 20,
            closed_form_inputs: 30,
            gauss_bonnet_points: 500,
            grid: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct VerifyConfig {
    /// Criteria to run; all of them when empty.
    pub criteria: Vec<u32>,
    pub tolerances: Tolerances,
    pub samples: Samples,
    pub fault: Option<Fault>,
}


pub const CRITERIA: [(u32, &str); 10] = [
    (1, "divided difference triad"),
    (2, "exact algebra identities"),
    (3, "engine reproduces conformal b2"),
    (4, "special values"),
    (5, "classical limits"),
    (6, "T-function identities"),
    (7, "closed forms vs quadrature"),
    (8, "Gauss-Bonnet in dimension two"),
    (9, "total curvature examples"),
    (10, "commutative cross-check"),
];

/// Runs the configured criteria; rows come in criterion order.
pub fn run(cfg: &VerifyConfig, seed: u64) -> Vec<CheckRow> {
    CRITERIA
        .iter()
        .filter(|(id, _)| cfg.criteria.is_empty() || cfg.criteria.contains(id))
        .flat_map(|&(id, _)| run_criterion(id, cfg, seed))
        .collect()
}

/// Rows of a single criterion.
pub fn run_criterion(id: u32, cfg: &VerifyConfig, seed: u64) -> Vec<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(id) << 40));
    let (t, s) = (&cfg.tolerances, &cfg.samples);
    let outcome = match id {
        1 => dd_triad(t, s, &mut rng),
        2 => algebra(t, s, &mut rng),
        3 => engine_conformal(t, s, cfg.fault, &mut rng),
        4 => special_values(t, s, &mut rng),
        5 => classical(t),
        6 => tfunc_identities(t, &mut rng),
        7 => closed_forms(t, s, &mut rng),
        8 => gauss_bonnet(t, s, &mut rng),
        9 => examples(t, &mut rng),
        10 => commutative(t, s, &mut rng),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    outcome.unwrap_or_else(|e| {
        vec![CheckRow {
            id,
            name: name.into(),
            tolerance: 0.0,
            observed: f64::INFINITY,
            passed: false,
            detail: format!("error: {e}"),
        }]
    })
}

fn check(id: u32, name: &str, tolerance: f64, observed: f64, detail: String) -> CheckRow {
    CheckRow { id, name: name.into(), tolerance, observed, passed: observed <= tolerance, detail }
}

/// `|a - b| / max(1, |b|)`.
fn rel(a: f64, b: f64) -> f64 {
    let e = (a - b).abs() / b.abs().max(1.0);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn rel_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let e = (a - b).amax() / b.amax().max(1.0);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn spd<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.7
}

fn parse(s: &str) -> ScalarFunction {
    parse_function(s).expect("built-in function text")
}

/// Positive functions on `[-1, 1]` used for random metrics.
const POSITIVE: [&str; 6] = ["exp(-2*t)", "exp(t)", "1 + t^2", "2 + sin(t)", "exp(-t) + 0.3", "1.5 + 0.5*cos(2*t)"];

fn positive<R: Rng>(rng: &mut R) -> ScalarFunction {
    parse(POSITIVE.choose(rng).unwrap())
}

fn dd_triad<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    const FUNCS: [&str; 10] =
        ["exp(t)", "exp(-2*t)", "log(t)", "sqrt(t)", "t^2.5", "1/t", "sin(t)", "cos(3*t)", "t^(-1.5)", "exp(sin(t))"];
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..s.dd_cases {
        let f = parse(FUNCS.choose(rng).unwrap());
        let n = rng.gen_range(1..=6);
        let lo = rng.gen_range(0.8..2.5);
        let nodes = separated_nodes(n, lo, lo + 0.6, 0.08, rng);
        let a = dd_recursive(&nodes, &f)?;
        let b = dd_explicit(&nodes, &f)?;
        let c = dd_hermite_genocchi(&nodes, &f, &spec)?;
        worst = worst.max((a - b).abs()).max((a - c).abs()).max((b - c).abs());
    }
    let mut poly_worst: f64 = 0.0;
    for _ in 0..s.dd_cases {
        let degree = rng.gen_range(0..=6);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = ScalarFunction::identity();
        let mut p = ScalarFunction::constant(coeffs[0]);
        let mut power = ScalarFunction::constant(1.0);
        for &c in &coeffs[1..] {
            power = power.mul(&t);
            p = p.add(&power.scale(c));
        }
        let n = rng.gen_range(degree + 1..=degree + 3);
        let nodes: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let want = if n == degree + 1 { coeffs[degree] } else { 0.0 };
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>() * 2f64.powi(degree as i32);
        poly_worst = poly_worst.max((dd(&nodes, &p)? - want).abs() / scale.max(1.0));
    }
    Ok(vec![
        check(1, "divided difference triad", tol.dd_triad, worst, format!("{} cases, max pairwise difference", s.dd_cases)),
        check(
            1,
            "divided difference polynomial truncation",
            tol.dd_polynomial,
            poly_worst,
            format!("{} cases, error relative to coefficient scale", s.dd_cases),
        ),
    ])
}

fn separated_nodes<R: Rng>(n: usize, lo: f64, hi: f64, gap: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        let ok = v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a - b).abs() >= gap));
        if ok {
            return v;
        }
    }
}

fn algebra<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    let reports = check_identities(&[2, 3], s.algebra_instances, rng)?;
    let worst = reports.iter().fold(0.0f64, |m, r| m.max(r.max_deviation));
    let detail = reports.iter().map(|r| format!("{}={:.1e}", r.name, r.max_deviation)).collect::<Vec<_>>().join(", ");
    Ok(vec![check(2, "exact algebra identities", tol.algebra, worst, detail)])
}

fn engine_conformal<R: Rng>(tol: &Tolerances, s: &Samples, fault: Option<Fault>, rng: &mut R) -> Result<Vec<CheckRow>> {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        let f = positive(rng);
        let g = spd(d, rng);
        let ginv = g.clone().try_inverse().ok_or(Error::NotPositiveDefinite { t: 0.0 })?;
        let sq = g.determinant().sqrt();
        let m = FunctionalMetric::conformal(f.clone(), g)?;
        let den = b2_engine(&m, spec);
        let kh = kh_conformal(d as f64, f)?;
        for _ in 0..s.engine_points {
            let p: [f64; 3] = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
            let mut b21 = den.b21(p[0], p[1])?;
            if fault == Some(Fault::FlipB21Sign) {
                b21 = -b21;
            }
            let b22 = den.b22(p[0], p[1], p[2])?;
            let want21 = &ginv * (sq * kh.k(p[0], p[1])?);
            let want22 = &ginv * (sq * kh.h(p[0], p[1], p[2])?);
            worst = worst.max((&b21 - &want21).amax() / want21.amax()).max((&b22 - &want22).amax() / want22.amax());
        }
    }
    Ok(vec![check(
        3,
        "engine reproduces conformal b2",
        tol.engine_conformal,
        worst,
        format!("d = 2..6, {} points each, relative error", s.engine_points),
    )])
}

fn separated_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let s1: f64 = rng.gen_range(-2.0..2.0);
        let s2: f64 = rng.gen_range(-2.0..2.0);
        if s1.abs().min(s2.abs()).min((s1 + s2).abs()) > 0.1 {
            return (s1, s2);
        }
    }
}

fn special_values<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    let exp_t = parse("exp(t)");
    let mut worst: f64 = 0.0;
    for d in [2usize, 4] {
        let kh = kh_conformal(d as f64, exp_t.clone())?;
        for _ in 0..s.special_points {
            let s0: f64 = rng.gen_range(-1.0..1.0);
            let (s1, s2) = separated_pair(rng);
            let scale = ((1.0 - d as f64 / 2.0) * s0).exp();
            let k = kh.k(s0, s0 + s1)? / scale;
            let h = kh.h(s0, s0 + s1, s0 + s1 + s2)? / scale;
            let (kw, hw) = if d == 2 { (reduced::k2(s1), reduced::h2(s1, s2)) } else { (reduced::k4(s1), reduced::h4(s1, s2)) };
            worst = worst.max(rel(k, kw)).max(rel(h, hw));
            if d == 4 {
                worst = worst.max(rel(k, (1.0 - s1.exp()) / (2.0 * s1.exp() * s1)));
            }
        }
    }
    let kh3 = kh_conformal(3.0, parse("exp(2*t)"))?;
    for _ in 0..s.special_points {
        let (s1, s2) = separated_pair(rng);
        worst = worst.max(rel(kh3.k(0.0, s1 / 3.0)?, reduced::k3(s1)));
        worst = worst.max(rel(kh3.h(0.0, s1 / 3.0, (s1 + s2) / 3.0)?, reduced::h3(s1, s2)));
    }
    Ok(vec![check(
        4,
        "special values",
        tol.special_values,
        worst,
        format!("K2, H2, K3, H3, K4, H4 at {} points each", s.special_points),
    )])
}

fn classical(tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let f = parse("exp(-2*t)");
    let mut worst: f64 = 0.0;
    for d in 3..=8 {
        let kh = kh_conformal(d as f64, f.clone())?;
        for t in [-0.7, -0.2, 0.0, 0.45, 0.9] {
            let (k, h) = classical_limits(d as f64, t);
            worst = worst.max(rel(kh.k(t, t)?, k)).max(rel(kh.h(t, t, t)?, h));
        }
    }
    Ok(vec![check(5, "classical limits", tol.classical_limits, worst, "d = 3..8, five points each".into())])
}

/// One random metric of every builder family.
fn family_metrics<R: Rng>(rng: &mut R) -> Result<Vec<FunctionalMetric>> {
    let general = MatrixFunction::new(vec![
        vec![parse("2 + sin(t)"), parse("0.3*t"), parse("0.1")],
        vec![parse("0.3*t"), parse("exp(t/2)"), parse("0.2*cos(t)")],
        vec![parse("0.1"), parse("0.2*cos(t)"), parse("1 + t^2")],
    ])?;
    Ok(vec![
        FunctionalMetric::conformal(positive(rng), spd(3, rng))?,
        FunctionalMetric::twisted(positive(rng), spd(2, rng), spd(1, rng))?,
        FunctionalMetric::doubly_twisted(positive(rng), positive(rng), spd(2, rng), spd(2, rng))?,
        FunctionalMetric::general(general),
    ])
}

fn tfunc_identities<R: Rng>(tol: &Tolerances, rng: &mut R) -> Result<Vec<CheckRow>> {
    let spec = QuadratureSpec::default();
    let (mut values, mut derivs, mut recursions): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for m in family_metrics(rng)? {
        let d = m.dim();
        let src = m.quadrature_source(spec);
        let t: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let n: Vec<usize> = (0..4).map(|_| rng.gen_range(0..d)).collect();
        let mut shuffled = n.clone();
        shuffled.shuffle(rng);
        // (i) symmetry in the tensor indices
        let a = src.value(&n, &[2, 1, 1], &t)?;
        values = values.max(rel(src.value(&shuffled, &[2, 1, 1], &t)?, a));
        // (ii) joint permutation of multiplicities and arguments
        let b = src.value(&n, &[1, 2, 1], &[t[1], t[0], t[2]])?;
        values = values.max(rel(b, a));
        // (iii) coalescing the last argument into the first
        let eps = 1e-7;
        let merged = src.value(&n[..2], &[3, 1], &t[..2])?;
        derivs = derivs.max(rel(src.value(&n[..2], &[2, 1, 1], &[t[0], t[1], t[0] + eps])?, merged));
        // (iv) a zero multiplicity drops its argument
        let dropped = src.value(&n[..2], &[1, 2], &[t[0], t[2]])?;
        values = values.max(rel(src.value(&n[..2], &[1, 0, 2], &t)?, dropped));
        // (v) derivative in an argument
        for j in 0..2 {
            let alpha = [2u32, 1];
            let tt = [t[0], t[1]];
            let h = 1e-4;
            let at = |x: f64| {
                let mut u = tt;
                u[j] = x;
                src.value(&n[..2], &alpha, &u)
            };
            let fd = (at(tt[j] - 2.0 * h)? - 8.0 * at(tt[j] - h)? + 8.0 * at(tt[j] + h)? - at(tt[j] + 2.0 * h)?) / (12.0 * h);
            let mut raised = alpha;
            raised[j] += 1;
            let rule = src.rule(&raised, &tt, 2)?;
            let dp = m.upper().derivative(tt[j], 1);
            let mut sum = 0.0;
            for k in 0..d {
                for l in 0..d {
                    sum += dp[(k, l)] * rule.eval(&[n[0], n[1], k, l]);
                }
            }
            derivs = derivs.max(rel(fd, -(alpha[j] as f64) * sum));
        }
        recursions = recursions.max(jacobi_recursions(&m, &src, &n[..2], &t)?);
    }
    Ok(vec![
        check(6, "T-function identities (values)", tol.tfunc_values, values.max(recursions), "properties i, ii, iv and both recursions on four families".into()),
        check(6, "T-function identities (limits and derivatives)", tol.tfunc_derivatives, derivs, "properties iii and v by finite differences".into()),
    ])
}

/// Largest deviation in both recursion identities for `alpha` up to 3.
fn jacobi_recursions(m: &FunctionalMetric, src: &QuadratureTSource, n: &[usize], t: &[f64]) -> Result<f64> {
    let d = m.dim();
    let p = |x: f64| m.upper().eval(x);
    let wick_over_det = |x: f64| -> Result<f64> {
        let lower = p(x).try_inverse().ok_or(Error::NotPositiveDefinite { t: x })?;
        Ok(wick_sum(&lower, n) / p(x).determinant().sqrt())
    };
    let contract = |rule: &crate::tfunc::TRule, diff: &DMatrix<f64>| {
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut idx = n.to_vec();
                idx.extend([a, b]);
                s += rule.eval(&idx) * diff[(a, b)];
            }
        }
        s
    };
    let pairs = n.len() / 2 + 1;
    let mut worst: f64 = 0.0;
    let diff01 = p(t[0]) - p(t[1]);
    for alpha in 1..=3u32 {
        let lhs = contract(&src.rule(&[alpha, 1], &t[..2], pairs)?, &diff01);
        let rhs = if alpha == 1 {
            2.0 * wick_over_det(t[1])? - 2.0 * wick_over_det(t[0])?
        } else {
            let gamma: f64 = (1..alpha).map(f64::from).product();
            src.value(n, &[alpha - 1, 1], &t[..2])? - wick_over_det(t[0])? / (2f64.powi(alpha as i32 - 2) * gamma)
        };
        worst = worst.max(rel(lhs, rhs));
    }
    let diff12 = p(t[1]) - p(t[2]);
    for a0 in 1..=2u32 {
        for a1 in 1..=2u32 {
            let lhs = contract(&src.rule(&[a0, a1, 1], t, pairs)?, &diff12);
            let rhs = if a1 == 1 {
                src.value(n, &[a0, 1], &[t[0], t[2]])? - src.value(n, &[a0, 1], &[t[0], t[1]])?
            } else {
                src.value(n, &[a0, a1 - 1, 1], t)? - src.value(n, &[a0, a1], &t[..2])?
            };
            worst = worst.max(rel(lhs, rhs));
        }
    }
    Ok(worst)
}

fn random_query<R: Rng>(d: usize, rng: &mut R) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
    const ALPHAS: [&[u32]; 6] = [&[1, 1], &[2, 1], &[1, 1, 1], &[2, 1, 1], &[1, 2, 1], &[3, 1]];
    let alpha = ALPHAS.choose(rng).unwrap().to_vec();
    let pairs = rng.gen_range(0..=2);
    let n = (0..2 * pairs).map(|_| rng.gen_range(0..d)).collect();
    let t = alpha.iter().map(|_| rng.gen_range(-0.8..0.8)).collect();
    (n, alpha, t)
}

fn closed_forms<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    let spec = QuadratureSpec::default();
    let mut rows = Vec::new();
    let mut conf: f64 = 0.0;
    let mut twist: f64 = 0.0;
    for _ in 0..s.closed_form_inputs {
        let d = rng.gen_range(2..=5);
        let m = FunctionalMetric::conformal(positive(rng), spd(d, rng))?;
        let (n, alpha, t) = random_query(d, rng);
        let (f, g) = match &m.family {
            crate::metrics::MetricFamily::Conformal { f, g } => (f.clone(), g.clone()),
            _ => unreachable!(),
        };
        let closed = ConformalTSource { f, g };
        conf = conf.max(rel(closed.value(&n, &alpha, &t)?, m.quadrature_source(spec).value(&n, &alpha, &t)?));

        let (r, sd) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let (f, g, gt) = (positive(rng), spd(r, rng), spd(sd, rng));
        let m = FunctionalMetric::twisted(f.clone(), g.clone(), gt.clone())?;
        let (n, alpha, t) = random_query(r + sd, rng);
        let closed = TwistedTSource { f, g, gt };
        twist = twist.max(rel(closed.value(&n, &alpha, &t)?, m.quadrature_source(spec).value(&n, &alpha, &t)?));
    }
    rows.push(check(7, "conformal T-functions vs quadrature", tol.closed_vs_quadrature, conf, format!("{} inputs", s.closed_form_inputs)));
    rows.push(check(7, "twisted T-functions vs quadrature", tol.closed_vs_quadrature, twist, format!("{} inputs", s.closed_form_inputs)));

    let mut dim2: f64 = 0.0;
    let mut counts = [0usize; 3];
    for k in 0..s.closed_form_inputs {
        let p1 = spd(2, rng);
        let p0 = match k % 3 {
            0 => &p1 + spd(2, rng),
            1 => {
                let v = nalgebra::DVector::from_fn(2, |_, _| rng.gen_range(-0.6..0.6));
                let w = nalgebra::DVector::from_fn(2, |_, _| rng.gen_range(-0.6..0.6));
                &p1 + &v * v.transpose() - &w * w.transpose()
            }
            _ => {
                let v = nalgebra::DVector::from_fn(2, |_, _| rng.gen_range(-0.8..0.8));
                &p1 + &v * v.transpose()
            }
        };
        if p0.clone().cholesky().is_none() {
            continue;
        }
        let closed = dim2_t_values(&p0, &p1)?;
        match dim2_coefficients(&p0, &p1).3 {
            Dim2Branch::Positive => counts[0] += 1,
            Dim2Branch::Negative => counts[1] += 1,
            _ => counts[2] += 1,
        }
        let (t11, t21) = dim2_by_quadrature(&p0, &p1)?;
        dim2 = dim2.max(rel(closed.t11, t11)).max(rel_matrix(&closed.t21, &t21));
    }
    if counts.contains(&0) {
        dim2 = f64::INFINITY;
    }
    rows.push(check(
        7,
        "dimension-two T-functions vs quadrature",
        tol.closed_vs_quadrature,
        dim2,
        format!("branches positive={} negative={} degenerate={}", counts[0], counts[1], counts[2]),
    ));

    let mut dt4: f64 = 0.0;
    for _ in 0..s.closed_form_inputs {
        let pt = Dt4Point {
            f0: rng.gen_range(0.3..2.0),
            f1: rng.gen_range(0.3..2.0),
            ft0: rng.gen_range(0.3..2.0),
            ft1: rng.gen_range(0.3..2.0),
        };
        let (g, gt) = (spd(2, rng), spd(2, rng));
        let (gi, gti) = (g.clone().try_inverse().unwrap(), gt.clone().try_inverse().unwrap());
        let src = QuadratureTSource {
            p2: Arc::new(move |t| {
                let (f, ft) = if t == 0.0 { (pt.f0, pt.ft0) } else { (pt.f1, pt.ft1) };
                let mut m = DMatrix::zeros(4, 4);
                m.view_mut((0, 0), (2, 2)).copy_from(&(&gi * f));
                m.view_mut((2, 2), (2, 2)).copy_from(&(&gti * ft));
                Ok(m)
            }),
            dim: 4,
            spec,
        };
        dt4 = dt4.max(rel(dt4_t11(pt, &g, &gt)?, src.value(&[], &[1, 1], &[0.0, 1.0])?));
        let rule = src.rule(&[2, 1], &[0.0, 1.0], 1)?;
        let quad = DMatrix::from_fn(4, 4, |k, l| rule.eval(&[k, l]));
        dt4 = dt4.max(rel_matrix(&dt4_t21(pt, &g, &gt)?, &quad));
    }
    rows.push(check(7, "doubly twisted T-functions vs quadrature", tol.closed_vs_quadrature, dt4, format!("{} inputs", s.closed_form_inputs)));
    Ok(rows)
}

/// Ten two-dimensional metrics covering every sign branch of `det(P2(t1) - P2(t0))`.
pub fn dim_two_metrics<R: Rng>(rng: &mut R) -> Result<Vec<FunctionalMetric>> {
    let general = |a: &str, b: &str, c: &str| -> Result<FunctionalMetric> {
        Ok(FunctionalMetric::general(MatrixFunction::new(vec![vec![parse(a), parse(b)], vec![parse(b), parse(c)]])?))
    };
    Ok(vec![
        FunctionalMetric::conformal(parse("exp(-t)"), spd(2, rng))?,
        FunctionalMetric::conformal(parse("2 + sin(t)"), spd(2, rng))?,
        FunctionalMetric::doubly_twisted(parse("exp(t)"), parse("exp(-t)"), spd(1, rng), spd(1, rng))?,
        FunctionalMetric::doubly_twisted(parse("1 + t^2"), parse("2 + cos(t)"), spd(1, rng), spd(1, rng))?,
        FunctionalMetric::twisted(parse("exp(t)"), spd(1, rng), spd(1, rng))?,
        general("2 + sin(t)", "0.3*t", "exp(t/2)")?,
        general("exp(t)", "0.5", "1")?,
        general("1.5 + 0.5*cos(2*t)", "0.2*sin(t)", "1 + t^2")?,
        general("exp(t)", "0.4*exp(t)", "exp(t) + 1")?,
        general("3 + t", "sin(t)", "2 - t")?,
    ])
}

fn gauss_bonnet<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 3];
    for m in dim_two_metrics(rng)? {
        let r = gauss_bonnet_check(&m, -0.9, 0.9, s.gauss_bonnet_points, rng)?;
        worst = worst.max(r.max_abs);
        counts[0] += r.positive;
        counts[1] += r.negative;
        counts[2] += r.degenerate;
    }
    if counts.contains(&0) {
        worst = f64::INFINITY;
    }
    Ok(vec![check(
        8,
        "Gauss-Bonnet in dimension two",
        tol.gauss_bonnet,
        worst,
        format!(
            "10 metrics x {} points; branches positive={} negative={} degenerate={}",
            s.gauss_bonnet_points, counts[0], counts[1], counts[2]
        ),
    )])
}

fn examples<R: Rng>(tol: &Tolerances, rng: &mut R) -> Result<Vec<CheckRow>> {
    let spec = QuadratureSpec::default();
    let mut twisted: f64 = 0.0;
    for (r, s) in [(1usize, 1usize), (2, 2), (3, 1), (5, 2)] {
        let (g, gt) = (spd(r, rng), spd(s, rng));
        let sq = (g.determinant() * gt.determinant()).sqrt();
        let (gi, gti) = (g.clone().try_inverse().unwrap(), gt.clone().try_inverse().unwrap());
        let kernel = total_curvature_kernel(&FunctionalMetric::twisted(parse("t"), g, gt)?, spec);
        for _ in 0..3 {
            let (x, y): (f64, f64) = (rng.gen_range(0.4..2.5), rng.gen_range(0.4..2.5));
            let got = kernel.f_s(x, y)?;
            let top = &gi * (sq * twisted_fs(r as f64, x, y));
            let bottom = &gti * (sq * twisted_fs_tilde(r as f64, x, y));
            let scale = got.amax().max(1e-3);
            twisted = twisted
                .max((got.view((0, 0), (r, r)) - top).amax() / scale)
                .max((got.view((r, r), (s, s)) - bottom).amax() / scale);
        }
    }
    let (f, ft) = (parse("exp(-t) + 0.3"), parse("1 + t^2"));
    let (g, gt) = (spd(2, rng), spd(2, rng));
    let kernel = total_curvature_kernel(&FunctionalMetric::doubly_twisted(f.clone(), ft.clone(), g.clone(), gt.clone())?, spec);
    let mut doubly: f64 = 0.0;
    for _ in 0..10 {
        let (t0, t1): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let got = kernel.f_s(t0, t1)?;
        let want = doubly_twisted_fs(t0, t1, &f, &ft, &g, &gt)?;
        doubly = doubly.max((&got - &want).amax() / want.amax().max(1e-3));
    }
    Ok(vec![
        check(9, "twisted example F_S and F~_S", tol.examples, twisted, "(r, s) in (1,1), (2,2), (3,1), (5,2)".into()),
        check(9, "doubly twisted example F_S", tol.examples, doubly, "10 points".into()),
    ])
}

/// A random smooth 2x2 metric built from whitelist functions.
pub fn random_general_metric<R: Rng>(d: usize, rng: &mut R) -> Result<FunctionalMetric> {
    let mut entries = vec![vec![ScalarFunction::constant(0.0); d]; d];
    for i in 0..d {
        for j in i..d {
            let (a, b) = (rng.gen_range(-0.3..0.3), rng.gen_range(0.5..1.5));
            let text = if i == j {
                format!("{} + {a}*sin({b}*t) + 0.2*t^2", 1.5 + rng.gen_range(0.0..0.5))
            } else {
                format!("{}*cos({b}*t + {a})", rng.gen_range(-0.2..0.2))
            };
            entries[i][j] = parse_function(&text)?;
            entries[j][i] = entries[i][j].clone();
        }
    }
    Ok(FunctionalMetric::general(MatrixFunction::new(entries)?))
}

/// A random trigonometric polynomial with four low modes.
pub fn random_trig<R: Rng>(d: usize, rng: &mut R) -> impl Fn(&[f64]) -> f64 {
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..4)
        .map(|_| {
            let k = (0..d).map(|_| rng.gen_range(-2i32..=2) as f64).collect();
            (k, rng.gen_range(-0.25..0.25), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let c: f64 = rng.gen_range(-0.3..0.3);
    move |x: &[f64]| c + modes.iter().map(|(k, a, p)| a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + p).sin()).sum::<f64>()
}

fn commutative<R: Rng>(tol: &Tolerances, s: &Samples, rng: &mut R) -> Result<Vec<CheckRow>> {
    let m = random_general_metric(2, rng)?;
    let h = GridFunction::from_fn(GridSpec::square(2, s.grid), random_trig(2, rng));
    let density = b2_engine(&m, QuadratureSpec::default());
    let engine = commutative_scalar_curvature(&density, &h)?;
    let classical = scaled_classical_curvature(&density, &h)?;
    let scale = classical.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let dev = engine.values.iter().zip(&classical.values).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    Ok(vec![
        check(10, "commutative pointwise curvature", tol.commutative_pointwise, dev / scale, format!("{0}x{0} grid, relative to max |R|", s.grid)),
        check(10, "commutative total curvature", tol.commutative_integral, engine.mean().abs(), "grid mean of the engine curvature".into()),
    ])
}

/// Every row passed.
pub fn all_passed(rows: &[CheckRow]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.passed)
}
