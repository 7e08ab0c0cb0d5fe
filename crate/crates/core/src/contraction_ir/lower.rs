//! Lowering of integrated parametrix terms to T-function references, and
//! compilation of the resulting index contractions.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_rational::Rational64;

use crate::contraction_ir::term::{ContractionTerm, Factor, IndexVar, NcEntry, SymbolExpr};
use crate::error::{Error, Result};
use crate::tfunc::{wick_pairings, TRule};

/// `T_{xi; alpha}` on the slots of a term; zero multiplicities mark unused slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TFunctionRef {
    pub xi: Vec<IndexVar>,
    pub alpha: Vec<u32>,
}

impl TFunctionRef {
    /// Slots with positive multiplicity.
    pub fn support(&self) -> Vec<usize> {
        (0..self.alpha.len()).filter(|&s| self.alpha[s] > 0).collect()
    }
}

/// `coeff * T * prod factors (word)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LoweredTerm {
    pub coeff: Rational64,
    pub tfunc: TFunctionRef,
    pub factors: Vec<Factor>,
    pub word: Vec<NcEntry>,
}

/// Replaces `(xi monomial, B0 powers)` by the matching T-function. The density
/// assembled from the result carries the overall factor `(4 pi)^{-d/2}`.
pub fn lower_to_tfunctions(b: &SymbolExpr) -> Result<Vec<LoweredTerm>> {
    b.terms().map(lower_term).collect()
}

pub fn lower_term(t: &ContractionTerm) -> Result<LoweredTerm> {
    let total = t.b0_total() as usize;
    if t.xi.len() + 4 != 2 * total {
        return Err(Error::InvalidArgument(format!(
            "term has {} xi factors but B0 multiplicity {total}; T-functions need 2|alpha|-4",
            t.xi.len()
        )));
    }
    Ok(LoweredTerm {
        coeff: t.coeff,
        tfunc: TFunctionRef { xi: t.xi.clone(), alpha: t.b0.clone() },
        factors: t.factors.clone(),
        word: t.word.clone(),
    })
}

/// One matrix in a contraction chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Factor { index: usize, transposed: bool },
    /// The symmetric matrix of a Wick pair.
    Metric,
}

/// Open chain between two word directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub from: usize,
    pub to: usize,
    pub links: Vec<Link>,
}

/// Contraction pattern of one Wick pairing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    pub chains: Vec<Chain>,
    pub cycles: Vec<Vec<Link>>,
    /// Word directions contracted directly with each other.
    pub deltas: Vec<(usize, usize)>,
}

/// A lowered term prepared for numeric evaluation.
#[derive(Clone, Debug)]
pub struct CompiledTerm {
    pub coeff: f64,
    pub alpha: Vec<u32>,
    pub pairs: usize,
    pub factors: Vec<Factor>,
    /// Number of word directions; these are pinned at evaluation.
    pub pins: usize,
    pub patterns: Vec<Pattern>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Occ {
    Word(usize),
    Elem(usize, usize),
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl CompiledTerm {
    pub fn compile(t: &LoweredTerm) -> Result<Self> {
        let word_dirs: Vec<IndexVar> = t.word.iter().flat_map(|e| e.dirs.iter().copied()).collect();
        let xi = &t.tfunc.xi;
        if xi.len() % 2 == 1 {
            return Err(Error::InvalidArgument("odd number of xi factors".into()));
        }
        let pairs = xi.len() / 2;
        let nf = t.factors.len();
        let mut patterns = Vec::new();
        for pairing in wick_pairings(pairs) {
            // Elements: factors first, then one metric link per pair.
            let mut ports: Vec<[IndexVar; 2]> = t.factors.iter().map(|f| f.indices).collect();
            ports.extend(pairing.iter().map(|&(x, y)| [xi[x], xi[y]]));
            let mut occ: HashMap<IndexVar, Vec<Occ>> = HashMap::new();
            for (w, &i) in word_dirs.iter().enumerate() {
                occ.entry(i).or_default().push(Occ::Word(w));
            }
            for (e, p) in ports.iter().enumerate() {
                occ.entry(p[0]).or_default().push(Occ::Elem(e, 0));
                occ.entry(p[1]).or_default().push(Occ::Elem(e, 1));
            }
            if let Some((i, v)) = occ.iter().find(|(_, v)| v.len() != 2) {
                return Err(Error::InvalidArgument(format!("index {} occurs {} times", i.0, v.len())));
            }
            let other = |i: IndexVar, me: Occ| -> Occ {
                let v = &occ[&i];
                if v[0] == me {
                    v[1]
                } else {
                    v[0]
                }
            };
            let link = |e: usize, entered_at: usize| -> Link {
                if e < nf {
                    Link::Factor { index: e, transposed: entered_at == 1 }
                } else {
                    Link::Metric
                }
            };
            let mut visited = vec![false; ports.len()];
            let mut seen_word = vec![false; word_dirs.len()];
            let mut pat = Pattern::default();
            for w in 0..word_dirs.len() {
                if seen_word[w] {
                    continue;
                }
                seen_word[w] = true;
                let mut cur = other(word_dirs[w], Occ::Word(w));
                let mut links = Vec::new();
                loop {
                    match cur {
                        Occ::Word(w2) => {
                            seen_word[w2] = true;
                            if links.is_empty() {
                                pat.deltas.push((w, w2));
                            } else {
                                pat.chains.push(Chain { from: w, to: w2, links });
                            }
                            break;
                        }
                        Occ::Elem(e, port) => {
                            visited[e] = true;
                            links.push(link(e, port));
                            let out_port = 1 - port;
                            cur = other(ports[e][out_port], Occ::Elem(e, out_port));
                        }
                    }
                }
            }
            for start in 0..ports.len() {
                if visited[start] {
                    continue;
                }
                let mut links = Vec::new();
                let mut cur = Occ::Elem(start, 0);
                loop {
                    let Occ::Elem(e, port) = cur else { unreachable!("cycles contain no word directions") };
                    if visited[e] {
                        break;
                    }
                    visited[e] = true;
                    links.push(link(e, port));
                    let out_port = 1 - port;
                    cur = other(ports[e][out_port], Occ::Elem(e, out_port));
                }
                pat.cycles.push(links);
            }
            patterns.push(pat);
        }
        Ok(CompiledTerm {
            coeff: rational_to_f64(t.coeff),
            alpha: t.tfunc.alpha.clone(),
            pairs,
            factors: t.factors.clone(),
            pins: word_dirs.len(),
            patterns,
        })
    }

    /// Value for pinned word directions `pins`, factor matrices and a T-rule
    /// built for `alpha` at the term's slots.
    pub fn evaluate(&self, factors: &[DMatrix<f64>], rule: &TRule, pins: &[usize]) -> f64 {
        assert_eq!(pins.len(), self.pins);
        let mut total = 0.0;
        for node in &rule.nodes {
            let w = node.weights[self.pairs];
            if w == 0.0 {
                continue;
            }
            let s: f64 = self.patterns.iter().map(|p| pattern_value(p, factors, &node.minv, pins)).sum();
            total += w * s;
        }
        self.coeff * total
    }
}

fn link_matrix<'a>(l: Link, factors: &'a [DMatrix<f64>], metric: &'a DMatrix<f64>) -> (&'a DMatrix<f64>, bool) {
    match l {
        Link::Factor { index, transposed } => (&factors[index], transposed),
        Link::Metric => (metric, false),
    }
}

fn pattern_value(p: &Pattern, factors: &[DMatrix<f64>], metric: &DMatrix<f64>, pins: &[usize]) -> f64 {
    let mut v = 1.0;
    for &(a, b) in &p.deltas {
        if pins[a] != pins[b] {
            return 0.0;
        }
    }
    for c in &p.chains {
        let d = metric.nrows();
        let mut row = nalgebra::DVector::<f64>::zeros(d);
        row[pins[c.from]] = 1.0;
        for &l in &c.links {
            let (m, tr) = link_matrix(l, factors, metric);
            row = if tr { m * row } else { m.transpose() * row };
        }
        v *= row[pins[c.to]];
        if v == 0.0 {
            return 0.0;
        }
    }
    for c in &p.cycles {
        let mut acc: Option<DMatrix<f64>> = None;
        for &l in c {
            let (m, tr) = link_matrix(l, factors, metric);
            let m = if tr { m.transpose() } else { m.clone() };
            acc = Some(match acc {
                None => m,
                Some(a) => a * m,
            });
        }
        v *= acc.map(|a| a.trace()).unwrap_or(1.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction_ir::term::OpFunction;
    use crate::tfunc::TNode;

    fn iv(i: u16) -> IndexVar {
        IndexVar(i)
    }

    #[test]
    fn chain_matches_explicit_sum() {
        // xi_k xi_l P2^{ik} A^{jl} (delta_i delta_j), explicit index sum as oracle.
        let t = LoweredTerm {
            coeff: Rational64::from_integer(2),
            tfunc: TFunctionRef { xi: vec![iv(2), iv(3)], alpha: vec![2, 1] },
            factors: vec![
                Factor::new(OpFunction::P2, iv(0), iv(2), vec![0]),
                Factor::new(OpFunction::P1, iv(1), iv(3), vec![0, 1]),
            ],
            word: vec![NcEntry::new(vec![iv(0), iv(1)])],
        };
        let c = CompiledTerm::compile(&t).unwrap();
        let f0 = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.3, 0.2, 2.0, 0.1, 0.3, 0.1, 1.5]);
        let f1 = DMatrix::from_row_slice(3, 3, &[0.5, -0.4, 0.0, 0.7, 1.1, 0.2, -0.3, 0.6, 0.9]);
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.3, 0.1, 0.3, 1.2]);
        let rule = TRule { nodes: vec![TNode { minv: m.clone(), weights: vec![0.0, 0.7] }], method: crate::tfunc::TMethod::Conformal };
        for (i, j) in [(0, 0), (0, 2), (2, 1)] {
            let mut want = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    want += 2.0 * 0.7 * m[(k, l)] * f0[(i, k)] * f1[(j, l)];
                }
            }
            let got = c.evaluate(&[f0.clone(), f1.clone()], &rule, &[i, j]);
            assert!((got - want).abs() < 1e-13, "{got} {want}");
        }
    }
}
