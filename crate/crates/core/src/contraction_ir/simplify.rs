//! Canonical index relabelling and merging of like terms.

use std::collections::HashMap;

use num_rational::Rational64;

use crate::contraction_ir::term::{ContractionTerm, Factor, IndexVar, NcEntry, SymbolExpr};

/// Upper bound on relabelling candidates examined per term.
const MAX_CANDIDATES: usize = 1 << 16;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Mixed-radix counter over independent finite choices.
struct Odometer {
    radix: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radix: Vec<usize>) -> Self {
        let done = radix.contains(&0);
        Odometer { digits: vec![0; radix.len()], radix, done }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let cur = self.digits.clone();
        let mut i = 0;
        loop {
            if i == self.radix.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.radix[i] {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(cur)
    }
}

/// Relabels bound indices canonically and orders factors; the coefficient is kept.
pub fn canonical_form(t: &ContractionTerm) -> ContractionTerm {
    let mut factors = t.factors.clone();
    factors.sort_by(|a, b| a.shape().cmp(&b.shape()));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match groups.last_mut() {
            Some((s, len)) if factors[*s].shape() == f.shape() => *len += 1,
            _ => groups.push((i, 1)),
        }
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|&(_, len)| permutations(len)).collect();
    let word_perms: Vec<Vec<Vec<usize>>> = t.word.iter().map(|e| permutations(e.dirs.len())).collect();
    let mut radix: Vec<usize> = group_perms.iter().map(|p| p.len()).collect();
    radix.extend(word_perms.iter().map(|p| p.len()));
    radix.extend(factors.iter().map(|f| if f.func.symmetric() { 2 } else { 1 }));

    let mut best: Option<ContractionTerm> = None;
    let mut odo = Odometer::new(radix);
    let mut examined = 0;
    while let Some(digits) = odo.next() {
        examined += 1;
        if examined > MAX_CANDIDATES {
            break;
        }
        let (gd, rest) = digits.split_at(groups.len());
        let (wd, fd) = rest.split_at(t.word.len());
        let mut order: Vec<usize> = Vec::with_capacity(factors.len());
        for (g, &(start, _)) in groups.iter().enumerate() {
            order.extend(group_perms[g][gd[g]].iter().map(|&k| start + k));
        }
        let mut labels: HashMap<IndexVar, IndexVar> = HashMap::new();
        let mut next = 0u16;
        let mut label = |i: IndexVar, labels: &mut HashMap<IndexVar, IndexVar>| {
            labels.entry(i).or_insert_with(|| {
                let l = IndexVar(next);
                next += 1;
                l
            });
        };
        for (w, e) in t.word.iter().enumerate() {
            for &k in &word_perms[w][wd[w]] {
                label(e.dirs[k], &mut labels);
            }
        }
        let mut new_factors: Vec<Factor> = Vec::with_capacity(factors.len());
        for &fi in &order {
            let mut f = factors[fi].clone();
            if fd[fi] == 1 {
                f.indices.swap(0, 1);
            }
            label(f.indices[0], &mut labels);
            label(f.indices[1], &mut labels);
            new_factors.push(f);
        }
        let mut xi_rest: Vec<IndexVar> = t.xi.iter().copied().filter(|i| !labels.contains_key(i)).collect();
        xi_rest.sort();
        for i in xi_rest {
            label(i, &mut labels);
        }
        let mut cand = ContractionTerm {
            coeff: t.coeff,
            b0: t.b0.clone(),
            xi: t.xi.clone(),
            factors: new_factors,
            word: t.word.clone(),
        };
        cand.rename(&labels);
        cand.xi.sort();
        for f in cand.factors.iter_mut() {
            if f.func.symmetric() {
                f.indices.sort();
            }
        }
        let better = match &best {
            None => true,
            Some(b) => key(&cand) < key(b),
        };
        if better {
            best = Some(cand);
        }
    }
    best.unwrap_or_else(|| t.clone())
}

type Key<'a> = (&'a [NcEntry], &'a [Factor], &'a [IndexVar]);

fn key(t: &ContractionTerm) -> Key<'_> {
    (&t.word, &t.factors, &t.xi)
}

/// Canonicalizes every term, merges like terms and drops zeros.
pub fn simplify(e: &SymbolExpr) -> SymbolExpr {
    SymbolExpr::from_terms(simplify_terms(e.terms()))
}

/// As [`simplify`], on a plain list of terms; first-appearance order is kept.
pub fn simplify_terms<'a>(terms: impl IntoIterator<Item = &'a ContractionTerm>) -> Vec<ContractionTerm> {
    let mut out: Vec<ContractionTerm> = Vec::new();
    let mut index: HashMap<ContractionTerm, usize> = HashMap::new();
    for t in terms {
        let c = canonical_form(t);
        let mut k = c.clone();
        k.coeff = Rational64::from_integer(1);
        match index.get(&k) {
            Some(&p) => out[p].coeff += c.coeff,
            None => {
                index.insert(k, out.len());
                out.push(c);
            }
        }
    }
    out.retain(|t| *t.coeff.numer() != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction_ir::term::OpFunction;

    fn iv(i: u16) -> IndexVar {
        IndexVar(i)
    }

    #[test]
    fn cancels_opposite_terms() {
        let mut a = ContractionTerm::scalar(Rational64::from_integer(1));
        a.factors.push(Factor::new(OpFunction::P1, iv(3), iv(4), vec![0, 1]));
        a.word.push(NcEntry::new(vec![iv(3)]));
        a.b0.push(0);
        a.xi.push(iv(4));
        let mut b = a.clone();
        b.coeff = Rational64::from_integer(-1);
        b.rename(&HashMap::from([(iv(3), iv(7)), (iv(4), iv(1))]));
        let s = simplify(&SymbolExpr::from_terms([a, b]));
        assert!(s.is_empty());
    }

    #[test]
    fn symmetric_factor_merges_transposes() {
        let mut a = ContractionTerm::scalar(Rational64::from_integer(1));
        a.xi = vec![iv(0), iv(1)];
        a.factors.push(Factor::new(OpFunction::P2, iv(0), iv(1), vec![0]));
        let mut b = a.clone();
        b.factors[0].indices = [iv(1), iv(0)];
        let s = simplify(&SymbolExpr::from_terms([a, b]));
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms().next().unwrap().coeff, Rational64::from_integer(2));
    }

    #[test]
    fn idempotent() {
        let mut a = ContractionTerm::scalar(Rational64::new(3, 2));
        a.b0 = vec![2, 1];
        a.word.push(NcEntry::new(vec![iv(9), iv(2)]));
        a.xi = vec![iv(5), iv(4)];
        a.factors.push(Factor::new(OpFunction::P2, iv(9), iv(5), vec![0]));
        a.factors.push(Factor::new(OpFunction::P1, iv(2), iv(4), vec![0, 1]));
        let s1 = simplify(&SymbolExpr::from_terms([a]));
        let s2 = simplify(&s1);
        assert_eq!(s1, s2);
    }
}
