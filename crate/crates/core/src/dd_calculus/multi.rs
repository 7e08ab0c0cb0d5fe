//! Multivariate functions built from divided differences of univariate ones.
//!
//! A [`MultiScalarFunction`] of arity `n` is a sum of products of atoms
//! `[t_{s_1}, ..., t_{s_m}; phi]`. This class is closed under partial
//! divided differences, which are computed symbolically.

use std::fmt;

use crate::dd_calculus::dd::{dd, Univariate};
use crate::dd_calculus::function::ScalarFunction;
use crate::error::{Error, Result};

/// `[t_{slots[0]}, ..., t_{slots[m]}; func]`; `slots` is sorted and may repeat.
#[derive(Clone, Debug)]
pub struct DdAtom {
    pub func: ScalarFunction,
    pub slots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MultiTerm {
    pub coeff: f64,
    pub atoms: Vec<DdAtom>,
}

#[derive(Clone, Debug)]
pub struct MultiScalarFunction {
    pub arity: usize,
    pub terms: Vec<MultiTerm>,
}

impl MultiScalarFunction {
    pub fn zero(arity: usize) -> Self {
        MultiScalarFunction { arity, terms: Vec::new() }
    }

    pub fn constant(arity: usize, c: f64) -> Self {
        MultiScalarFunction { arity, terms: vec![MultiTerm { coeff: c, atoms: Vec::new() }] }
    }

    /// The atom `[t_{slots}; func]`.
    pub fn atom(arity: usize, func: ScalarFunction, slots: &[usize]) -> Self {
        let mut slots = slots.to_vec();
        slots.sort_unstable();
        debug_assert!(slots.iter().all(|&s| s < arity));
        MultiScalarFunction { arity, terms: vec![MultiTerm { coeff: 1.0, atoms: vec![DdAtom { func, slots }] }] }
    }

    /// `func(t_slot)`.
    pub fn value_at(arity: usize, func: ScalarFunction, slot: usize) -> Self {
        Self::atom(arity, func, &[slot])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        MultiScalarFunction { arity: self.arity, terms }
    }

    pub fn scale(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| MultiTerm { coeff: t.coeff * c, atoms: t.atoms.clone() })
            .collect();
        MultiScalarFunction { arity: self.arity, terms }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                let mut atoms = a.atoms.clone();
                atoms.extend(b.atoms.iter().cloned());
                terms.push(MultiTerm { coeff: a.coeff * b.coeff, atoms });
            }
        }
        MultiScalarFunction { arity: self.arity, terms }
    }

    pub fn depends_on(&self, slot: usize) -> bool {
        self.terms.iter().any(|t| t.atoms.iter().any(|a| a.slots.contains(&slot)))
    }

    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.arity {
            return Err(Error::InvalidArgument(format!(
                "expected {} arguments, got {}",
                self.arity,
                t.len()
            )));
        }
        let mut total = 0.0;
        let mut nodes = Vec::new();
        for term in &self.terms {
            let mut prod = term.coeff;
            for atom in &term.atoms {
                nodes.clear();
                nodes.extend(atom.slots.iter().map(|&s| t[s]));
                prod *= dd(&nodes, &atom.func)?;
            }
            total += prod;
        }
        Ok(total)
    }

    /// `d^order / dt_slot^order`.
    pub fn partial(&self, slot: usize, order: usize) -> Self {
        let mut cur = self.clone();
        for _ in 0..order {
            let mut terms = Vec::new();
            for term in &cur.terms {
                for (i, atom) in term.atoms.iter().enumerate() {
                    let m = atom.slots.iter().filter(|&&s| s == slot).count();
                    if m == 0 {
                        continue;
                    }
                    let mut atoms = term.atoms.clone();
                    let pos = atoms[i].slots.iter().position(|&s| s == slot).unwrap();
                    atoms[i].slots.insert(pos, slot);
                    terms.push(MultiTerm { coeff: term.coeff * m as f64, atoms });
                }
            }
            cur = MultiScalarFunction { arity: cur.arity, terms };
        }
        cur
    }

    /// Symbolic partial divided difference at `slot`; the result has arity `n + 1`.
    pub fn pdd(&self, slot: usize) -> Result<Self> {
        if slot >= self.arity {
            return Err(Error::InvalidArgument(format!("slot {slot} out of range")));
        }
        let remap = |s: usize, left: bool| -> usize {
            if s < slot || (s == slot && left) {
                s
            } else {
                s + 1
            }
        };
        let mut terms = Vec::new();
        for term in &self.terms {
            for (i, atom) in term.atoms.iter().enumerate() {
                let m = atom.slots.iter().filter(|&&s| s == slot).count();
                if m == 0 {
                    continue;
                }
                if m > 1 {
                    return Err(Error::Unsupported(
                        "partial divided difference at a repeated slot".into(),
                    ));
                }
                let atoms = term
                    .atoms
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let mut slots: Vec<usize> = Vec::with_capacity(a.slots.len() + 1);
                        for &s in &a.slots {
                            if k == i && s == slot {
                                slots.push(slot);
                                slots.push(slot + 1);
                            } else {
                                slots.push(remap(s, k < i));
                            }
                        }
                        slots.sort_unstable();
                        DdAtom { func: a.func.clone(), slots }
                    })
                    .collect();
                terms.push(MultiTerm { coeff: term.coeff, atoms });
            }
        }
        Ok(MultiScalarFunction { arity: self.arity + 1, terms })
    }
}

struct SlotRestriction<'a> {
    f: &'a MultiScalarFunction,
    slot: usize,
    base: Vec<f64>,
}

impl Univariate for SlotRestriction<'_> {
    fn eval(&self, x: f64) -> f64 {
        let mut t = self.base.clone();
        t[self.slot] = x;
        self.f.eval(&t).unwrap_or(f64::NAN)
    }
    fn taylor(&self, x: f64, order: usize) -> Vec<f64> {
        let mut t = self.base.clone();
        t[self.slot] = x;
        let mut out = Vec::with_capacity(order + 1);
        let mut d = self.f.clone();
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                d = d.partial(self.slot, 1);
                fact *= k as f64;
            }
            out.push(d.eval(&t).unwrap_or(f64::NAN) / fact);
        }
        out
    }
    fn label(&self) -> String {
        format!("slot {} of {}", self.slot, self.f)
    }
}

/// `f_j(t_0, ..., t_{n+1}) = [t_j, t_{j+1}; t -> f(.., t_{j-1}, t, t_{j+2}, ..)]`.
pub fn partial_dd(f: &MultiScalarFunction, slot: usize, t: &[f64]) -> Result<f64> {
    if t.len() != f.arity + 1 || slot >= f.arity {
        return Err(Error::InvalidArgument("partial_dd needs arity + 1 points and a valid slot".into()));
    }
    match f.pdd(slot) {
        Ok(g) => g.eval(t),
        Err(Error::Unsupported(_)) => {
            let mut base: Vec<f64> = t[..=slot].to_vec();
            base.extend_from_slice(&t[slot + 2..]);
            let r = SlotRestriction { f, slot, base };
            dd(&[t[slot], t[slot + 1]], &r)
        }
        Err(e) => Err(e),
    }
}

impl fmt::Display for MultiScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, term) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", term.coeff)?;
            for a in &term.atoms {
                let nodes: Vec<String> = a.slots.iter().map(|s| format!("t{s}")).collect();
                if a.slots.len() == 1 {
                    write!(f, " ({})({})", a.func, nodes[0])?;
                } else {
                    write!(f, " [{};{}]", nodes.join(","), a.func)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd_calculus::parse::parse_function;

    fn sample() -> MultiScalarFunction {
        // f(t0, t1) = exp(t0) [t0, t1; log] + t1^2
        let e = MultiScalarFunction::value_at(2, parse_function("exp(t)").unwrap(), 0);
        let l = MultiScalarFunction::atom(2, ScalarFunction::log(), &[0, 1]);
        let q = MultiScalarFunction::value_at(2, ScalarFunction::power(2.0), 1);
        e.mul(&l).add(&q)
    }

    #[test]
    fn symbolic_pdd_matches_difference_quotient() {
        let f = sample();
        let t = [0.7, 1.3, 2.1];
        for slot in 0..2 {
            let sym = partial_dd(&f, slot, &t).unwrap();
            let (a, b) = (t[slot], t[slot + 1]);
            let mut ta: Vec<f64> = t.to_vec();
            ta.remove(slot + 1);
            let mut tb = ta.clone();
            ta[slot] = a;
            tb[slot] = b;
            let quotient = (f.eval(&tb).unwrap() - f.eval(&ta).unwrap()) / (b - a);
            assert!((sym - quotient).abs() < 1e-13, "slot {slot}: {sym} vs {quotient}");
        }
    }

    #[test]
    fn partial_derivative_matches_finite_difference() {
        let f = sample();
        let t = [0.7, 1.3];
        let d = f.partial(1, 1).eval(&t).unwrap();
        let h = 1e-5;
        let fd = (f.eval(&[0.7, 1.3 + h]).unwrap() - f.eval(&[0.7, 1.3 - h]).unwrap()) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn repeated_slot_falls_back_to_numeric_pdd() {
        let f = sample().partial(0, 1);
        let t = [0.7, 0.9, 1.3];
        let v = partial_dd(&f, 0, &t).unwrap();
        let fa = f.eval(&[0.7, 1.3]).unwrap();
        let fb = f.eval(&[0.9, 1.3]).unwrap();
        assert!((v - (fb - fa) / 0.2).abs() < 1e-12);
    }
}
