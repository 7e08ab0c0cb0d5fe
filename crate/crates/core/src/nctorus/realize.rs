//! Evaluation of contraction-IR terms in the algebra, with polynomial operator
//! parts, a polynomial stand-in for `B0` and a numeric `xi`.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use rand::Rng;

use crate::contraction_ir::{ContractionTerm, Factor, IndexVar, OpFunction, SymbolExpr};
use crate::dd_calculus::{MultiScalarFunction, ScalarFunction};
use crate::error::Result;
use crate::nctorus::{poly_contraction, NcElement, PolyContraction};

const FUNCS: [OpFunction; 4] = [OpFunction::P2, OpFunction::P1, OpFunction::P01, OpFunction::P02];

/// Concrete data substituted into IR terms.
pub struct IrRealization {
    pub h: NcElement,
    pub xi: Vec<f64>,
    /// Univariate polynomial standing in for `B0(t)`.
    pub b0: Vec<f64>,
    parts: HashMap<(OpFunction, usize, usize), MultiScalarFunction>,
}

fn random_poly_fn<R: Rng>(degree: u32, rng: &mut R) -> ScalarFunction {
    let t = ScalarFunction::identity();
    let mut f = ScalarFunction::constant(rng.gen_range(-1.0..1.0));
    let mut power = ScalarFunction::constant(1.0);
    for _ in 0..degree {
        power = power.mul(&t);
        f = f.add(&power.scale(rng.gen_range(-1.0..1.0)));
    }
    f
}

impl IrRealization {
    /// Random operator parts that are polynomials of degree `degree` in each
    /// argument; `P2` is symmetric.
    pub fn random<R: Rng>(h: NcElement, degree: u32, rng: &mut R) -> Self {
        let d = h.torus().dim();
        let mut parts: HashMap<(OpFunction, usize, usize), MultiScalarFunction> = HashMap::new();
        for func in FUNCS {
            for i in 0..d {
                for j in 0..d {
                    if func.symmetric() && j < i {
                        let m = parts[&(func, j, i)].clone();
                        parts.insert((func, i, j), m);
                        continue;
                    }
                    let n = func.arity();
                    let mut f = MultiScalarFunction::zero(n);
                    for _ in 0..2 {
                        let mut term = MultiScalarFunction::constant(n, 1.0);
                        for s in 0..n {
                            term = term.mul(&MultiScalarFunction::value_at(n, random_poly_fn(degree, rng), s));
                        }
                        f = f.add(&term);
                    }
                    parts.insert((func, i, j), f);
                }
            }
        }
        let xi = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b0 = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        IrRealization { h, xi, b0, parts }
    }

    pub fn dim(&self) -> usize {
        self.h.torus().dim()
    }

    fn factor_poly(&self, f: &Factor, idx: &HashMap<IndexVar, usize>, arity: usize) -> Result<PolyContraction> {
        let base = &self.parts[&(f.func, idx[&f.indices[0]], idx[&f.indices[1]])];
        if f.constant {
            let zeros = vec![0.0; base.arity];
            return Ok(PolyContraction::constant(arity, Complex64::new(base.eval(&zeros)?, 0.0)));
        }
        let mut m = base.clone();
        let mut start = 0;
        for &size in &f.blocks {
            for _ in 1..size {
                m = m.pdd(start)?;
            }
            start += size as usize;
        }
        Ok(PolyContraction::from_multi(&m)?.embed(arity, &f.slots))
    }

    /// The term with the indices in `fixed` held at the given values and all
    /// other indices summed over `0..d`.
    pub fn realize_term(&self, t: &ContractionTerm, fixed: &HashMap<IndexVar, usize>) -> Result<NcElement> {
        let d = self.dim();
        let free: Vec<IndexVar> = t
            .index_occurrences()
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter(|v| !fixed.contains_key(v))
            .collect();
        let coeff = *t.coeff.numer() as f64 / *t.coeff.denom() as f64;
        let n = t.slot_count();
        let mut b0 = PolyContraction::constant(n, Complex64::new(1.0, 0.0));
        for (s, &a) in t.b0.iter().enumerate() {
            let p = PolyContraction::univariate(n, s, &self.b0);
            for _ in 0..a {
                b0 = b0.mul(&p);
            }
        }
        let mut out = NcElement::zero(self.h.torus());
        let mut idx: HashMap<IndexVar, usize> = fixed.clone();
        for code in 0..d.pow(free.len() as u32) {
            let mut r = code;
            for v in &free {
                idx.insert(*v, r % d);
                r /= d;
            }
            let xi: f64 = t.xi.iter().map(|v| self.xi[idx[v]]).product();
            let mut f = b0.scale(Complex64::new(coeff * xi, 0.0));
            for factor in &t.factors {
                f = f.mul(&self.factor_poly(factor, &idx, n)?);
            }
            let word: Vec<NcElement> = t
                .word
                .iter()
                .map(|e| e.dirs.iter().fold(self.h.clone(), |acc, v| acc.derivation(idx[v])))
                .collect();
            out = &out + &poly_contraction(&f, &self.h, &word)?;
        }
        Ok(out)
    }

    pub fn realize(&self, e: &SymbolExpr, fixed: &HashMap<IndexVar, usize>) -> Result<NcElement> {
        let mut out = NcElement::zero(self.h.torus());
        for t in e.terms() {
            out = &out + &self.realize_term(t, fixed)?;
        }
        Ok(out)
    }
}
