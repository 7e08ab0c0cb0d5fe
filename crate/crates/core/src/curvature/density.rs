//! The second heat density `b2` of the metric Laplacian in contraction form,
//! `(4 pi)^{-d/2} (B21^{ij}(h0, h1)(delta_i delta_j h) + B22^{ij}(h0, h1, h2)(delta_i h . delta_j h))`.
//!
//! Two independent evaluators are provided: one runs the parametrix engine and
//! evaluates its lowered output, the other is a direct transcription of the
//! eighteen term families.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::contraction_ir::{
    laplace_type_symbol, lower_to_tfunctions, parametrix, CompiledTerm, LaplaceShape, OpFunction,
};
use crate::dd_calculus::{dd, partial_dd, MultiScalarFunction};
use crate::error::{Error, Result};
use crate::metrics::{laplacian_symbol, FunctionalMetric, LaplaceTypeOperator};
use crate::quadrature::QuadratureSpec;
use crate::tfunc::{TRule, TSource};

/// How the density was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Engine,
    Hand,
}

/// Evaluators for `B21^{ij}` and `B22^{ij}` of one metric.
///
/// `B21` is returned symmetrized in `(i, j)`, since it only enters through
/// `delta_i delta_j h`.
pub struct DensityB2 {
    pub provenance: Provenance,
    metric: FunctionalMetric,
    op: LaplaceTypeOperator,
    source: Box<dyn TSource>,
    wrapped: Mutex<HashMap<(OpFunction, Vec<u8>), Arc<Vec<MultiScalarFunction>>>>,
}

struct EngineTerms {
    b21: Vec<CompiledTerm>,
    b22: Vec<CompiledTerm>,
}

fn engine_terms() -> &'static EngineTerms {
    static TERMS: OnceLock<EngineTerms> = OnceLock::new();
    TERMS.get_or_init(|| {
        let p = laplace_type_symbol(LaplaceShape::default());
        let b = parametrix(&p, 2).expect("parametrix of the generic Laplace type symbol");
        let lowered = lower_to_tfunctions(&b[2]).expect("b2 terms have matching degrees");
        let mut out = EngineTerms { b21: Vec::new(), b22: Vec::new() };
        for t in &lowered {
            let c = CompiledTerm::compile(t).expect("b2 terms are closed");
            match t.word.len() {
                1 => out.b21.push(c),
                2 => out.b22.push(c),
                n => panic!("b2 term with a word of length {n}"),
            }
        }
        out
    })
}

/// `B21, B22` from the parametrix engine.
pub fn b2_engine(metric: &FunctionalMetric, spec: QuadratureSpec) -> DensityB2 {
    DensityB2::new(metric, spec, Provenance::Engine)
}

/// `B21, B22` from the transcribed term families.
pub fn b2_hand(metric: &FunctionalMetric, spec: QuadratureSpec) -> DensityB2 {
    DensityB2::new(metric, spec, Provenance::Hand)
}

impl DensityB2 {
    pub fn new(metric: &FunctionalMetric, spec: QuadratureSpec, provenance: Provenance) -> Self {
        DensityB2 {
            provenance,
            metric: metric.clone(),
            op: laplacian_symbol(metric),
            source: metric.t_source(spec),
            wrapped: Mutex::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &FunctionalMetric {
        &self.metric
    }

    pub fn t_source(&self) -> &dyn TSource {
        self.source.as_ref()
    }

    /// Symmetrized `B21^{ij}(t0, t1)`.
    pub fn b21(&self, t0: f64, t1: f64) -> Result<DMatrix<f64>> {
        let m = match self.provenance {
            Provenance::Engine => self.engine_eval(&engine_terms().b21, &[t0, t1])?,
            Provenance::Hand => self.hand_b21(t0, t1)?,
        };
        Ok((&m + m.transpose()) * 0.5)
    }

    /// `B22^{ij}(t0, t1, t2)`.
    pub fn b22(&self, t0: f64, t1: f64, t2: f64) -> Result<DMatrix<f64>> {
        match self.provenance {
            Provenance::Engine => self.engine_eval(&engine_terms().b22, &[t0, t1, t2]),
            Provenance::Hand => self.hand_b22(t0, t1, t2),
        }
    }

    /// Entries of the operator part `func` wrapped in divided differences of sizes `blocks`.
    fn wrapped(&self, func: OpFunction, blocks: &[u8]) -> Result<Arc<Vec<MultiScalarFunction>>> {
        let key = (func, blocks.to_vec());
        if let Some(v) = self.wrapped.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut m = self.op.function(func, a, b).clone();
                let mut start = 0;
                for &size in blocks {
                    for _ in 1..size {
                        m = m.pdd(start)?;
                    }
                    start += size as usize;
                }
                out.push(m);
            }
        }
        let out = Arc::new(out);
        self.wrapped.lock().expect("cache lock").insert(key, out.clone());
        Ok(out)
    }

    fn engine_eval(&self, terms: &[CompiledTerm], t: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut factor_cache: HashMap<(OpFunction, Vec<u8>, Vec<usize>), DMatrix<f64>> = HashMap::new();
        let mut rule_cache: HashMap<Vec<u32>, TRule> = HashMap::new();
        let mut out = DMatrix::zeros(d, d);
        for term in terms {
            let mut mats = Vec::with_capacity(term.factors.len());
            for f in &term.factors {
                let key = (f.func, f.blocks.clone(), f.slots.clone());
                if !factor_cache.contains_key(&key) {
                    let funcs = self.wrapped(f.func, &f.blocks)?;
                    let args: Vec<f64> = f.slots.iter().map(|&s| t[s]).collect();
                    let mut m = DMatrix::zeros(d, d);
                    for a in 0..d {
                        for b in 0..d {
                            let g = &funcs[a * d + b];
                            if !g.is_zero() {
                                m[(a, b)] = g.eval(&args)?;
                            }
                        }
                    }
                    factor_cache.insert(key.clone(), m);
                }
                mats.push(factor_cache[&key].clone());
            }
            if !rule_cache.contains_key(&term.alpha) {
                let rule = self.source.rule(&term.alpha, &t[..term.alpha.len()], 3)?;
                rule_cache.insert(term.alpha.clone(), rule);
            }
            let rule = &rule_cache[&term.alpha];
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += term.evaluate(&mats, rule, &[i, j]);
                }
            }
        }
        Ok(out)
    }

    fn tensors(&self, alpha: &[u32], t: &[f64], pairs: usize) -> Result<TTensors> {
        let rule = self.source.rule(alpha, t, pairs)?;
        Ok(TTensors::new(&rule, self.dim(), pairs))
    }

    fn p2(&self, t: f64) -> DMatrix<f64> {
        self.metric.upper().eval(t)
    }

    fn dd_p2(&self, nodes: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] = dd(nodes, self.metric.upper().entry(a, b))?;
            }
        }
        Ok(m)
    }

    fn op_matrix(&self, func: OpFunction, t: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] = self.op.function(func, a, b).eval(t)?;
            }
        }
        Ok(m)
    }

    fn p1_pdd(&self, slot: usize, t: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] = partial_dd(self.op.function(OpFunction::P1, a, b), slot, t)?;
            }
        }
        Ok(m)
    }

    fn hand_b21(&self, t0: f64, t1: f64) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let tt = [t0, t1];
        let t11 = self.tensors(&[1, 1], &tt, 0)?;
        let t21 = self.tensors(&[2, 1], &tt, 1)?;
        let t31 = self.tensors(&[3, 1], &tt, 2)?;
        let p2 = self.p2(t0);
        let p1 = self.op_matrix(OpFunction::P1, &tt)?;
        let p01 = self.op_matrix(OpFunction::P01, &tt)?;
        let dp2 = self.dd_p2(&tt)?;
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = -t11.s * p01[(i, j)];
                for k in 0..d {
                    for l in 0..d {
                        s += 2.0 * t21.m[(k, l)] * p2[(i, k)] * p1[(j, l)];
                        s += t21.m[(k, l)] * p2[(i, j)] * dp2[(k, l)];
                        for m in 0..d {
                            for n in 0..d {
                                s -= 4.0 * t31.t4(k, l, m, n) * p2[(i, k)] * p2[(j, l)] * dp2[(m, n)];
                            }
                        }
                    }
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }

    fn hand_b22(&self, t0: f64, t1: f64, t2: f64) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let t02 = [t0, t2];
        let t012 = [t0, t1, t2];
        let a11_02 = self.tensors(&[1, 1], &t02, 0)?;
        let a111 = self.tensors(&[1, 1, 1], &t012, 1)?;
        let a211 = self.tensors(&[2, 1, 1], &t012, 2)?;
        let a21_02 = self.tensors(&[2, 1], &t02, 1)?;
        let a121 = self.tensors(&[1, 2, 1], &t012, 2)?;
        let a311 = self.tensors(&[3, 1, 1], &t012, 3)?;
        let a221 = self.tensors(&[2, 2, 1], &t012, 3)?;
        let a31_02 = self.tensors(&[3, 1], &t02, 2)?;

        let p2_0 = self.p2(t0);
        let p2_1 = self.p2(t1);
        let p02 = self.op_matrix(OpFunction::P02, &t012)?;
        let p1_01 = self.op_matrix(OpFunction::P1, &[t0, t1])?;
        let p1_12 = self.op_matrix(OpFunction::P1, &[t1, t2])?;
        let q01 = self.dd_p2(&[t0, t1])?;
        let q12 = self.dd_p2(&[t1, t2])?;
        let q012 = self.dd_p2(&t012)?;
        // [t0, t1; P1(., t2)] and [t1, t2; P1(t0, .)].
        let p1_first = self.p1_pdd(0, &t012)?;
        let p1_second = self.p1_pdd(1, &t012)?;

        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = -a11_02.s * p02[(i, j)];
                for k in 0..d {
                    for l in 0..d {
                        s += a111.m[(k, l)] * p1_01[(i, k)] * p1_12[(j, l)];
                        s += 2.0 * a21_02.m[(k, l)] * p2_0[(i, k)] * p1_first[(j, l)];
                        s += 2.0 * a21_02.m[(k, l)] * p2_0[(j, k)] * p1_second[(i, l)];
                        s += a111.m[(k, l)] * p1_01[(i, j)] * q12[(k, l)];
                        s += 2.0 * a21_02.m[(k, l)] * p2_0[(i, j)] * q012[(k, l)];
                        for m in 0..d {
                            for n in 0..d {
                                s -= 2.0 * a211.t4(k, l, m, n) * p2_0[(i, m)] * q01[(k, l)] * p1_12[(j, n)];
                                s -= 2.0 * a211.t4(k, l, m, n) * p2_0[(j, l)] * p1_01[(i, k)] * q12[(m, n)];
                                s -= 2.0 * a121.t4(k, l, m, n) * p1_01[(i, k)] * p2_1[(j, l)] * q12[(m, n)];
                                s -= 2.0 * a211.t4(k, l, m, n) * p2_0[(i, j)] * q01[(l, m)] * q12[(k, n)];
                                s -= 4.0 * a211.t4(k, l, m, n) * p2_0[(i, k)] * q01[(j, l)] * q12[(m, n)];
                                s -= 8.0 * a31_02.t4(k, l, m, n) * p2_0[(i, k)] * p2_0[(j, l)] * q012[(m, n)];
                                for p in 0..d {
                                    for q in 0..d {
                                        let pq12 = q12[(p, q)];
                                        s += 8.0
                                            * a311.t6(k, l, m, n, p, q)
                                            * p2_0[(i, k)]
                                            * p2_0[(j, n)]
                                            * q01[(l, m)]
                                            * pq12;
                                        s += 4.0
                                            * a221.t6(k, l, m, n, p, q)
                                            * p2_0[(i, k)]
                                            * q01[(l, m)]
                                            * p2_1[(j, n)]
                                            * pq12;
                                    }
                                }
                            }
                        }
                    }
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }
}

/// Dense T-function tensors with 0, 2, 4 and 6 lower indices.
struct TTensors {
    d: usize,
    s: f64,
    m: DMatrix<f64>,
    four: Vec<f64>,
    six: Vec<f64>,
}

impl TTensors {
    fn new(rule: &TRule, d: usize, pairs: usize) -> Self {
        let s = rule.eval(&[]);
        let mut m = DMatrix::zeros(d, d);
        let mut four = Vec::new();
        let mut six = Vec::new();
        if pairs >= 1 {
            m = DMatrix::from_fn(d, d, |k, l| rule.eval(&[k, l]));
        }
        if pairs >= 2 {
            four = vec![0.0; d.pow(4)];
            for (idx, v) in four.iter_mut().enumerate() {
                let n = digits(idx, d, 4);
                *v = rule.eval(&n);
            }
        }
        if pairs >= 3 {
            six = vec![0.0; d.pow(6)];
            for (idx, v) in six.iter_mut().enumerate() {
                let n = digits(idx, d, 6);
                *v = rule.eval(&n);
            }
        }
        TTensors { d, s, m, four, six }
    }

    fn t4(&self, k: usize, l: usize, m: usize, n: usize) -> f64 {
        let d = self.d;
        self.four[((k * d + l) * d + m) * d + n]
    }

    #[allow(clippy::too_many_arguments)]
    fn t6(&self, k: usize, l: usize, m: usize, n: usize, p: usize, q: usize) -> f64 {
        let d = self.d;
        self.six[((((k * d + l) * d + m) * d + n) * d + p) * d + q]
    }
}

fn digits(mut idx: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

/// Largest relative difference between two densities over sample points.
pub fn compare_densities(a: &DensityB2, b: &DensityB2, points: &[[f64; 3]]) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument("densities of different dimensions".into()));
    }
    let mut worst: f64 = 0.0;
    for p in points {
        let (x, y) = (a.b21(p[0], p[1])?, b.b21(p[0], p[1])?);
        worst = worst.max((&x - &y).amax() / y.amax().max(1e-300));
        let (x, y) = (a.b22(p[0], p[1], p[2])?, b.b22(p[0], p[1], p[2])?);
        worst = worst.max((&x - &y).amax() / y.amax().max(1e-300));
    }
    Ok(worst)
}
