//! Multivariate polynomials `F(t_0, ..., t_n)` used as exact contraction functions.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dd_calculus::MultiScalarFunction;
use crate::error::{Error, Result};

/// `sum_beta c_beta t_0^{beta_0} ... t_n^{beta_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyContraction {
    pub arity: usize,
    pub coeffs: BTreeMap<Vec<u32>, Complex64>,
}

/// Exponent vectors of length `len` with entries summing to `total`.
fn compositions(total: u32, len: usize) -> Vec<Vec<u32>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, len - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl PolyContraction {
    pub fn zero(arity: usize) -> Self {
        PolyContraction { arity, coeffs: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Complex64) -> Self {
        Self::monomial(&vec![0; arity], c)
    }

    pub fn monomial(beta: &[u32], c: Complex64) -> Self {
        let mut p = Self::zero(beta.len());
        p.coeffs.insert(beta.to_vec(), c);
        p
    }

    /// `sum_k c_k t_slot^k` as a function of `arity` variables.
    pub fn univariate(arity: usize, slot: usize, c: &[f64]) -> Self {
        let mut p = Self::zero(arity);
        for (k, &v) in c.iter().enumerate() {
            let mut beta = vec![0; arity];
            beta[slot] = k as u32;
            p.add_term(beta, Complex64::new(v, 0.0));
        }
        p
    }

    fn add_term(&mut self, beta: Vec<u32>, c: Complex64) {
        *self.coeffs.entry(beta).or_default() += c;
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|b| b.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn max_exponent(&self) -> u32 {
        self.coeffs.keys().flat_map(|b| b.iter().copied()).max().unwrap_or(0)
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(b, c)| c * b.iter().zip(t).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut out = self.clone();
        for (b, c) in &o.coeffs {
            out.add_term(b.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PolyContraction { arity: self.arity, coeffs: self.coeffs.iter().map(|(b, c)| (b.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut out = Self::zero(self.arity);
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                out.add_term(a.iter().zip(b).map(|(p, q)| p + q).collect(), x * y);
            }
        }
        out
    }

    /// Renames variable `k` to `map[k]` in a polynomial of `arity` variables.
    pub fn embed(&self, arity: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.arity);
        let mut out = Self::zero(arity);
        for (b, c) in &self.coeffs {
            let mut beta = vec![0; arity];
            for (k, &e) in b.iter().enumerate() {
                beta[map[k]] += e;
            }
            out.add_term(beta, *c);
        }
        out
    }

    /// Partial divided difference `[t_j, t_{j+1}; t -> F(.., t_{j-1}, t, t_{j+2}, ..)]`,
    /// a polynomial of `arity + 1` variables.
    pub fn partial_dd(&self, j: usize) -> Self {
        assert!(j < self.arity);
        let mut out = Self::zero(self.arity + 1);
        for (b, c) in &self.coeffs {
            let k = b[j];
            for a in 0..k {
                let mut beta: Vec<u32> = b[..j].to_vec();
                beta.push(a);
                beta.push(k - 1 - a);
                beta.extend_from_slice(&b[j + 1..]);
                out.add_term(beta, *c);
            }
        }
        out
    }

    /// `[t_{slots[0]}, ..., t_{slots[m]}; p]` for a univariate polynomial `p`
    /// (coefficients lowest degree first), as a polynomial of `arity` variables.
    pub fn divided_difference(arity: usize, slots: &[usize], p: &[f64]) -> Self {
        let m = slots.len() - 1;
        let mut out = Self::zero(arity);
        for (k, &c) in p.iter().enumerate() {
            if k < m || c == 0.0 {
                continue;
            }
            for comp in compositions((k - m) as u32, slots.len()) {
                let mut beta = vec![0; arity];
                for (s, e) in slots.iter().zip(comp) {
                    beta[*s] += e;
                }
                out.add_term(beta, Complex64::new(c, 0.0));
            }
        }
        out
    }

    /// Exact conversion of a function built from divided differences of polynomials.
    pub fn from_multi(f: &MultiScalarFunction) -> Result<Self> {
        let mut out = Self::zero(f.arity);
        for term in &f.terms {
            let mut prod = Self::constant(f.arity, Complex64::new(term.coeff, 0.0));
            for atom in &term.atoms {
                let p = atom.func.as_polynomial().ok_or_else(|| {
                    Error::Unsupported(format!("`{}` is not a polynomial", atom.func))
                })?;
                prod = prod.mul(&Self::divided_difference(f.arity, &atom.slots, &p));
            }
            out = out.add(&prod);
        }
        Ok(out)
    }

    /// Largest coefficient difference.
    pub fn distance(&self, o: &Self) -> f64 {
        let diff = self.add(&o.scale(Complex64::new(-1.0, 0.0)));
        diff.coeffs.values().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd_calculus::{dd, parse_function};

    #[test]
    fn divided_difference_of_polynomial_matches_numeric() {
        let p = [0.5, -1.0, 0.0, 2.0, 0.25];
        let f = parse_function("0.5 - t + 2*t^3 + 0.25*t^4").unwrap();
        let nodes = [0.3, -0.7, 1.1];
        let q = PolyContraction::divided_difference(3, &[0, 1, 2], &p);
        assert!((q.eval(&nodes).re - dd(&nodes, &f).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn partial_divided_difference_of_t0_squared_t1() {
        let f = PolyContraction::monomial(&[2, 1], Complex64::new(1.0, 0.0));
        let g = f.partial_dd(0);
        let t = [0.4, 0.9, -0.6];
        let want = (t[0] + t[1]) * t[2];
        assert!((g.eval(&t).re - want).abs() < 1e-15);
        let h = f.partial_dd(1);
        assert!((h.eval(&t).re - t[0] * t[0]).abs() < 1e-15);
    }

    #[test]
    fn from_multi_matches_evaluation() {
        let f = MultiScalarFunction::atom(3, parse_function("t^3 - 2*t").unwrap(), &[0, 2])
            .mul(&MultiScalarFunction::value_at(3, parse_function("1 + t^2").unwrap(), 1))
            .pdd(1)
            .unwrap();
        let p = PolyContraction::from_multi(&f).unwrap();
        let t = [0.2, -0.5, 0.7, 1.3];
        assert!((p.eval(&t).re - f.eval(&t).unwrap()).abs() < 1e-13);
    }
}
