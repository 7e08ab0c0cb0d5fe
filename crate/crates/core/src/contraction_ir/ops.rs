//! Rewriting operations: symbol product, xi-derivative and delta-derivative.

use std::collections::HashMap;

use num_rational::Rational64;

use crate::contraction_ir::term::{ContractionTerm, Factor, IndexVar, NcEntry, OpFunction, SymbolExpr};
use crate::error::{Error, Result};

/// Concatenates two terms, identifying the last slot of `a` with the first of `b`.
/// Indices are used as given.
pub fn concat_terms(a: &ContractionTerm, b: &ContractionTerm) -> ContractionTerm {
    let m = a.word.len();
    let mut b0 = a.b0.clone();
    b0[m] += b.b0[0];
    b0.extend_from_slice(&b.b0[1..]);
    let mut factors = a.factors.clone();
    factors.extend(b.factors.iter().map(|f| {
        let mut f = f.clone();
        f.slots.iter_mut().for_each(|s| *s += m);
        f
    }));
    let mut xi = a.xi.clone();
    xi.extend_from_slice(&b.xi);
    let mut word = a.word.clone();
    word.extend_from_slice(&b.word);
    ContractionTerm { coeff: a.coeff * b.coeff, b0, xi, factors, word }
}

/// Product of two terms; the indices of `b` are renamed above those of `a`.
pub fn term_multiply(a: &ContractionTerm, b: &ContractionTerm) -> ContractionTerm {
    let mut b = b.clone();
    if let Some(ma) = a.max_index() {
        b.shift_indices(ma.0 + 1);
    }
    concat_terms(a, &b)
}

pub fn symbol_multiply(a: &SymbolExpr, b: &SymbolExpr) -> SymbolExpr {
    let mut out = SymbolExpr::new();
    for x in a.terms() {
        for y in b.terms() {
            out.push(term_multiply(x, y));
        }
    }
    out
}

/// `partial / partial xi_k` of a term.
pub fn xi_derivative(term: &ContractionTerm, k: IndexVar) -> Vec<ContractionTerm> {
    xi_derivative_reserving(term, k, &[])
}

/// As [`xi_derivative`], with fresh indices chosen above every index in `reserved`.
pub fn xi_derivative_reserving(term: &ContractionTerm, k: IndexVar, reserved: &[IndexVar]) -> Vec<ContractionTerm> {
    let mut out = Vec::new();
    for p in 0..term.xi.len() {
        let a = term.xi[p];
        let mut t = term.clone();
        t.xi.remove(p);
        if a != k {
            t.rename(&HashMap::from([(a, k)]));
        }
        out.push(t);
    }
    let fresh = term
        .index_occurrences()
        .into_iter()
        .chain(reserved.iter().copied())
        .chain(std::iter::once(k))
        .max()
        .map(|m| IndexVar(m.0 + 1))
        .unwrap();
    for s in 0..term.b0.len() {
        let alpha = term.b0[s];
        if alpha == 0 {
            continue;
        }
        let mut t = term.clone();
        t.coeff *= Rational64::from_integer(-2 * alpha as i64);
        t.b0[s] += 1;
        t.xi.push(fresh);
        t.factors.push(Factor::new(OpFunction::P2, k, fresh, vec![s]));
        out.push(t);
    }
    out
}

/// `delta_dir` of a term without `B0` powers.
pub fn delta_derivative(term: &ContractionTerm, dir: IndexVar) -> Result<Vec<ContractionTerm>> {
    if term.b0_total() != 0 {
        return Err(Error::InvalidArgument("delta derivative applied to a term with B0 factors".into()));
    }
    let mut out = Vec::new();
    for w in 0..term.word.len() {
        let mut t = term.clone();
        let mut dirs = t.word[w].dirs.clone();
        dirs.push(dir);
        t.word[w] = NcEntry::new(dirs);
        out.push(t);
    }
    let shift = |s: usize, j: usize, to_right: bool| -> usize {
        if s > j || (s == j && to_right) {
            s + 1
        } else {
            s
        }
    };
    for j in 0..term.slot_count() {
        for m in 0..term.factors.len() {
            let f = &term.factors[m];
            if f.constant || !f.depends_on(j) {
                continue;
            }
            let mut t = term.clone();
            t.word.insert(j, NcEntry::new(vec![dir]));
            t.b0.insert(j, 0);
            for (q, g) in t.factors.iter_mut().enumerate() {
                if q == m {
                    let pos = g.slots.iter().position(|&s| s == j).unwrap();
                    let r = g.block_of(pos);
                    g.blocks[r] += 1;
                    for s in g.slots.iter_mut() {
                        *s = shift(*s, j, false);
                    }
                    g.slots.insert(pos + 1, j + 1);
                } else {
                    let right = q > m;
                    for s in g.slots.iter_mut() {
                        *s = shift(*s, j, right);
                    }
                }
            }
            out.push(t);
        }
    }
    Ok(out)
}

/// Applies [`delta_derivative`] to every term of a symbol.
pub fn delta_symbol(e: &SymbolExpr, dir: IndexVar) -> Result<SymbolExpr> {
    let mut out = SymbolExpr::new();
    for t in e.terms() {
        for d in delta_derivative(t, dir)? {
            out.push(d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn multiply_shifts_slots() {
        let mut f = ContractionTerm::scalar(r(1));
        f.word.push(NcEntry::new(vec![IndexVar(0)]));
        f.b0.push(0);
        f.factors.push(Factor::new(OpFunction::P1, IndexVar(0), IndexVar(1), vec![0, 1]));
        f.xi.push(IndexVar(1));
        let mut g = ContractionTerm::scalar(r(3));
        g.factors.push(Factor::new(OpFunction::P2, IndexVar(0), IndexVar(1), vec![0]));
        g.xi = vec![IndexVar(0), IndexVar(1)];
        let p = term_multiply(&f, &g);
        assert_eq!(p.coeff, r(3));
        assert_eq!(p.factors[1].slots, vec![1]);
        assert_eq!(p.factors[1].indices, [IndexVar(2), IndexVar(3)]);
        assert!(p.is_closed());
    }

    #[test]
    fn xi_derivative_of_b0() {
        let d = xi_derivative(&ContractionTerm::b0(), IndexVar(0));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].coeff, r(-2));
        assert_eq!(d[0].b0, vec![2]);
        assert_eq!(d[0].factors[0].indices, [IndexVar(0), IndexVar(1)]);
        assert_eq!(d[0].xi, vec![IndexVar(1)]);
    }

    #[test]
    fn delta_of_function_of_h() {
        let mut t = ContractionTerm::scalar(r(1));
        t.factors.push(Factor::new(OpFunction::P2, IndexVar(1), IndexVar(2), vec![0]));
        let d = delta_derivative(&t, IndexVar(0)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].factors[0].blocks, vec![2]);
        assert_eq!(d[0].factors[0].slots, vec![0, 1]);
        assert_eq!(d[0].word, vec![NcEntry::new(vec![IndexVar(0)])]);
        let dd = delta_derivative(&d[0], IndexVar(3)).unwrap();
        assert_eq!(dd.len(), 3);
        assert_eq!(dd[0].word[0].dirs, vec![IndexVar(0), IndexVar(3)]);
        assert_eq!(dd[1].word, vec![NcEntry::new(vec![IndexVar(3)]), NcEntry::new(vec![IndexVar(0)])]);
        assert_eq!(dd[2].word, vec![NcEntry::new(vec![IndexVar(0)]), NcEntry::new(vec![IndexVar(3)])]);
        for t in &dd[1..] {
            assert_eq!(t.factors[0].blocks, vec![3]);
            assert_eq!(t.factors[0].slots, vec![0, 1, 2]);
        }
    }

    #[test]
    fn delta_leibniz_moves_neighbours() {
        // f(t0) g(t0, t1) (b): differentiating g at slot 0 leaves f at t0,
        // differentiating f at slot 0 pushes g to (t1, t2).
        let mut t = ContractionTerm::scalar(r(1));
        t.word.push(NcEntry::new(vec![IndexVar(0)]));
        t.b0.push(0);
        t.factors.push(Factor::new(OpFunction::P2, IndexVar(1), IndexVar(2), vec![0]));
        t.factors.push(Factor::new(OpFunction::P1, IndexVar(0), IndexVar(3), vec![0, 1]));
        let d = delta_derivative(&t, IndexVar(5)).unwrap();
        // one word term, slot 0: two factors, slot 1: one factor
        assert_eq!(d.len(), 4);
        assert_eq!(d[1].factors[0].slots, vec![0, 1]);
        assert_eq!(d[1].factors[1].slots, vec![1, 2]);
        assert_eq!(d[2].factors[0].slots, vec![0]);
        assert_eq!(d[2].factors[1].slots, vec![0, 1, 2]);
        assert_eq!(d[2].factors[1].blocks, vec![2, 1]);
        assert_eq!(d[3].factors[1].blocks, vec![1, 2]);
        assert_eq!(d[3].word[1].dirs, vec![IndexVar(5)]);
        assert!(d.iter().all(|t| t.check_shape()));
    }
}
