//! Contraction forms `F(h_(0), ..., h_(n))(b_1 ... b_n)` in the algebra.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dd_calculus::MultiScalarFunction;
use crate::error::{Error, Result};
use crate::nctorus::{NcElement, PolyContraction};

/// Relative tolerance of the selfadjointness check on `h`.
const SELFADJOINT_TOL: f64 = 1e-12;

fn check_inputs(arity: usize, h: &NcElement, word: &[NcElement]) -> Result<()> {
    if word.len() + 1 != arity {
        return Err(Error::InvalidArgument(format!(
            "a function of {arity} variables needs a word of length {}, got {}",
            arity.saturating_sub(1),
            word.len()
        )));
    }
    if !h.is_selfadjoint(SELFADJOINT_TOL) {
        return Err(Error::InvalidArgument("h must be selfadjoint".into()));
    }
    Ok(())
}

/// `sum_beta c_beta h^{beta_0} b_1 h^{beta_1} ... b_n h^{beta_n}`.
pub fn poly_contraction(f: &PolyContraction, h: &NcElement, word: &[NcElement]) -> Result<NcElement> {
    check_inputs(f.arity, h, word)?;
    let mut powers = vec![NcElement::one(h.torus())];
    for k in 1..=f.max_exponent() as usize {
        powers.push(&powers[k - 1] * h);
    }
    let mut out = NcElement::zero(h.torus());
    for (beta, c) in &f.coeffs {
        let mut prod = powers[beta[0] as usize].clone();
        for (b, &e) in word.iter().zip(&beta[1..]) {
            prod = &(&prod * b) * &powers[e as usize];
        }
        out = &out + &prod.scale(*c);
    }
    Ok(out)
}

/// Result of [`chebyshev_contraction`].
#[derive(Clone, Debug)]
pub struct ChebyshevContraction {
    pub value: NcElement,
    /// Estimate of `sup |F - F_N|` on the box from the last two coefficient layers.
    pub remainder: f64,
    /// `remainder * prod ||b_j||_1`, bounding the error of `value`.
    pub element_bound: f64,
}

/// Tensor Chebyshev coefficients of `f` on `[lo, hi]^{arity}` at `degree`.
pub fn chebyshev_coefficients(f: &MultiScalarFunction, degree: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let n = degree + 1;
    let arity = f.arity;
    let nodes: Vec<f64> = (0..n).map(|i| (PI * (i as f64 + 0.5) / n as f64).cos()).collect();
    let to_box = |x: f64| 0.5 * (hi + lo) + 0.5 * (hi - lo) * x;
    let total = n.pow(arity as u32);
    let mut vals = Vec::with_capacity(total);
    let mut t = vec![0.0; arity];
    for idx in 0..total {
        let mut r = idx;
        for a in (0..arity).rev() {
            t[a] = to_box(nodes[r % n]);
            r /= n;
        }
        vals.push(f.eval(&t)?);
    }
    for axis in 0..arity {
        let stride = n.pow((arity - 1 - axis) as u32);
        let mut out = vec![0.0; total];
        for (idx, o) in out.iter_mut().enumerate() {
            let k = (idx / stride) % n;
            let base = idx - k * stride;
            let mut s = 0.0;
            for i in 0..n {
                s += vals[base + i * stride] * (PI * k as f64 * (i as f64 + 0.5) / n as f64).cos();
            }
            *o = s * if k == 0 { 1.0 } else { 2.0 } / n as f64;
        }
        vals = out;
    }
    Ok(vals)
}

/// Approximates `F(h_(0), ..., h_(n))(b_1 ... b_n)` by a tensor Chebyshev
/// expansion of `F` on `[lo, hi]`, contracting every basis polynomial exactly.
pub fn chebyshev_contraction(
    f: &MultiScalarFunction,
    degree: usize,
    (lo, hi): (f64, f64),
    h: &NcElement,
    word: &[NcElement],
    tol: f64,
) -> Result<ChebyshevContraction> {
    check_inputs(f.arity, h, word)?;
    let r = h.norm1();
    if lo > -r || hi < r || lo >= hi {
        return Err(Error::InvalidArgument(format!("box [{lo}, {hi}] does not contain [-{r}, {r}]")));
    }
    let n = degree + 1;
    let coeffs = chebyshev_coefficients(f, degree, lo, hi)?;
    let tail: f64 = coeffs
        .iter()
        .enumerate()
        .filter(|&(idx, _)| {
            let mut r = idx;
            (0..f.arity).any(|_| {
                let k = r % n;
                r /= n;
                k + 2 > degree
            })
        })
        .map(|(_, c)| c.abs())
        .sum();
    let remainder = 2.0 * tail;
    let element_bound = remainder * word.iter().map(NcElement::norm1).product::<f64>();
    if element_bound > tol {
        return Err(Error::Uncertified { bound: element_bound, tol });
    }
    let torus = h.torus();
    let scaled = (&h.scale(Complex64::new(2.0 / (hi - lo), 0.0))
        - &NcElement::scalar(torus, Complex64::new((hi + lo) / (hi - lo), 0.0)))
        .pruned(0.0);
    let mut basis = vec![NcElement::one(torus)];
    if degree > 0 {
        basis.push(scaled.clone());
    }
    for k in 2..n {
        let next = &(&scaled * &basis[k - 1]).scale(Complex64::new(2.0, 0.0)) - &basis[k - 2];
        basis.push(next);
    }
    let value = contract_level(&coeffs, &basis, word, 0, 0, n, f.arity);
    Ok(ChebyshevContraction { value, remainder, element_bound })
}

fn contract_level(
    coeffs: &[f64],
    basis: &[NcElement],
    word: &[NcElement],
    level: usize,
    prefix: usize,
    n: usize,
    arity: usize,
) -> NcElement {
    let torus = basis[0].torus();
    let mut out = NcElement::zero(torus);
    for (k, tk) in basis.iter().enumerate() {
        let idx = prefix * n + k;
        if level + 1 == arity {
            if coeffs[idx] != 0.0 {
                out = &out + &tk.scale(Complex64::new(coeffs[idx], 0.0));
            }
        } else {
            let inner = contract_level(coeffs, basis, word, level + 1, idx, n, arity);
            out = &out + &(&(tk * &word[level]) * &inner);
        }
    }
    out
}

/// `e^a` by scaling and squaring of a truncated Taylor series, pruning
/// coefficients below `prune`.
pub fn exp_element(a: &NcElement, prune: f64) -> NcElement {
    let s = a.norm1().log2().ceil().max(0.0) as i32 + 1;
    let x = a.scale(Complex64::new(0.5f64.powi(s), 0.0));
    let torus = a.torus();
    let mut term = NcElement::one(torus);
    let mut sum = NcElement::one(torus);
    for k in 1..=30 {
        term = (&term * &x).scale(Complex64::new(1.0 / k as f64, 0.0)).pruned(prune);
        if term.norm1() < 1e-20 {
            break;
        }
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = (&sum * &sum).pruned(prune);
    }
    sum
}
