//! The parametrix recursion for Laplace type h-differential operators.

use num_rational::Rational64;

use crate::contraction_ir::ops::{concat_terms, delta_derivative, xi_derivative_reserving};
use crate::contraction_ir::simplify::simplify_terms;
use crate::contraction_ir::term::{ContractionTerm, Factor, IndexVar, NcEntry, OpFunction, SymbolExpr};
use crate::error::{Error, Result};

/// Largest parametrix order supported.
pub const MAX_ORDER: usize = 4;

/// Which parts of the operator symbol are present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaplaceShape {
    pub p1: bool,
    pub p0: bool,
    /// `P2` does not depend on `h`.
    pub p2_constant: bool,
}

impl Default for LaplaceShape {
    fn default() -> Self {
        LaplaceShape { p1: true, p0: true, p2_constant: false }
    }
}

/// `p2 + p1 + p0` in contraction form.
pub fn laplace_type_symbol(shape: LaplaceShape) -> SymbolExpr {
    let (a, b) = (IndexVar(0), IndexVar(1));
    let one = Rational64::from_integer(1);
    let mut out = SymbolExpr::new();
    let mut p2 = ContractionTerm::scalar(one);
    p2.xi = vec![a, b];
    let mut f = Factor::new(OpFunction::P2, a, b, vec![0]);
    f.constant = shape.p2_constant;
    p2.factors.push(f);
    out.push(p2);
    if shape.p1 {
        out.push(ContractionTerm {
            coeff: one,
            b0: vec![0, 0],
            xi: vec![b],
            factors: vec![Factor::new(OpFunction::P1, a, b, vec![0, 1])],
            word: vec![NcEntry::new(vec![a])],
        });
    }
    if shape.p0 {
        out.push(ContractionTerm {
            coeff: one,
            b0: vec![0, 0],
            xi: vec![],
            factors: vec![Factor::new(OpFunction::P01, a, b, vec![0, 1])],
            word: vec![NcEntry::new(vec![a, b])],
        });
        out.push(ContractionTerm {
            coeff: one,
            b0: vec![0, 0, 0],
            xi: vec![],
            factors: vec![Factor::new(OpFunction::P02, a, b, vec![0, 1, 2])],
            word: vec![NcEntry::new(vec![a]), NcEntry::new(vec![b])],
        });
    }
    out
}

/// Indices of the operator side are moved to this offset before multiplication.
const OP_OFFSET: u16 = 500;
/// Derivative indices shared between the two sides start here.
const DERIV_OFFSET: u16 = 1000;

fn factorial(m: usize) -> i64 {
    (1..=m as i64).product()
}

/// `b_0, ..., b_n` for the operator symbol `p` (parts of degree 2, 1, 0).
pub fn parametrix(p: &SymbolExpr, n: usize) -> Result<Vec<SymbolExpr>> {
    if n > MAX_ORDER {
        return Err(Error::Unsupported(format!("parametrix order {n} exceeds {MAX_ORDER}")));
    }
    if p.parts.keys().any(|&d| !(0..=2).contains(&d)) || p.degree(2).is_empty() {
        return Err(Error::InvalidArgument("operator symbol must have parts of degree 2, 1, 0".into()));
    }
    let mut bs: Vec<Vec<ContractionTerm>> = vec![vec![ContractionTerm::b0()]];
    let b0 = ContractionTerm::b0();
    for order in 1..=n {
        let mut raw: Vec<ContractionTerm> = Vec::new();
        for (j, bj) in bs.iter().enumerate() {
            for k in 0..=2usize {
                let m = order as i64 - j as i64 + k as i64 - 2;
                if m < 0 || p.degree(k as i32).is_empty() {
                    continue;
                }
                let m = m as usize;
                let dirs: Vec<IndexVar> = (0..m as u16).map(|r| IndexVar(DERIV_OFFSET + r)).collect();
                let reserved = [IndexVar(DERIV_OFFSET + m as u16)];
                let mut left: Vec<ContractionTerm> = bj.clone();
                if left.iter().any(|t| t.max_index().is_some_and(|i| i.0 >= OP_OFFSET)) {
                    return Err(Error::Unsupported("too many indices in parametrix term".into()));
                }
                for &d in &dirs {
                    left = left.iter().flat_map(|t| xi_derivative_reserving(t, d, &reserved)).collect();
                }
                let mut right: Vec<ContractionTerm> = p
                    .degree(k as i32)
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        t.shift_indices(OP_OFFSET);
                        t
                    })
                    .collect();
                for &d in &dirs {
                    let mut next = Vec::new();
                    for t in &right {
                        next.extend(delta_derivative(t, d)?);
                    }
                    right = next;
                }
                let scale = Rational64::new(-1, factorial(m));
                for l in &left {
                    for r in &right {
                        let mut t = concat_terms(&concat_terms(l, r), &b0);
                        t.coeff *= scale;
                        raw.push(t);
                    }
                }
            }
        }
        let terms = simplify_terms(raw.iter());
        debug_assert!(terms.iter().all(|t| t.degree() == -2 - order as i32 && t.is_closed() && t.check_shape()));
        bs.push(terms);
    }
    Ok(bs.into_iter().map(SymbolExpr::from_terms).collect())
}
