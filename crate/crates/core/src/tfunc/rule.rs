//! Evaluation rules for T-functions.
//!
//! Every source reduces `T_{n;alpha}(t)` to a finite sum
//! `sum_q w_q[K] * W_n(M_q)` where `K = |n|/2` is the number of index pairs,
//! `W_n` is the Wick sum and `M_q` a symmetric matrix. After Wick expansion
//! every T-function is therefore a weighted sum of products of matrix entries.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tfunc::wick::wick_sum;

/// How a T-function value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TMethod {
    Quadrature,
    Conformal,
    Twisted,
    Dim2Closed,
    DoublyTwisted,
}

impl fmt::Display for TMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TMethod::Quadrature => "quadrature",
            TMethod::Conformal => "conformal",
            TMethod::Twisted => "twisted",
            TMethod::Dim2Closed => "dim2_closed",
            TMethod::DoublyTwisted => "doubly_twisted",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct TNode {
    pub minv: DMatrix<f64>,
    /// `weights[K]` multiplies Wick sums with `K` index pairs.
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TRule {
    pub nodes: Vec<TNode>,
    pub method: TMethod,
}

impl TRule {
    pub fn max_pairs(&self) -> usize {
        self.nodes.iter().map(|n| n.weights.len()).min().unwrap_or(1) - 1
    }

    /// `T_{n;alpha}` for the index tuple `n` (0-based indices).
    pub fn eval(&self, n: &[usize]) -> f64 {
        if n.len() % 2 == 1 {
            return 0.0;
        }
        let k = n.len() / 2;
        self.nodes.iter().map(|node| node.weights[k] * wick_sum(&node.minv, n)).sum()
    }
}

/// A matrix-valued function of the metric parameter.
pub type MatrixField = Arc<dyn Fn(f64) -> Result<DMatrix<f64>> + Send + Sync>;

/// Anything that can produce T-function rules.
pub trait TSource: Send + Sync {
    fn dim(&self) -> usize;
    fn method(&self) -> TMethod;
    /// Rule for `T_{n;alpha}(t)` valid for every `n` with at most `max_pairs` pairs.
    /// `alpha` may contain zeros; those slots are dropped.
    fn rule(&self, alpha: &[u32], t: &[f64], max_pairs: usize) -> Result<TRule>;

    fn value(&self, n: &[usize], alpha: &[u32], t: &[f64]) -> Result<f64> {
        if n.iter().any(|&i| i >= self.dim()) {
            return Err(Error::InvalidArgument("tensor index out of range".into()));
        }
        Ok(self.rule(alpha, t, n.len() / 2)?.eval(n))
    }
}

/// Drops zero multiplicities and merges slots with identical arguments.
pub fn normalize(alpha: &[u32], t: &[f64]) -> Result<(Vec<u32>, Vec<f64>)> {
    if alpha.len() != t.len() {
        return Err(Error::InvalidArgument(format!(
            "alpha has {} entries but {} arguments were given",
            alpha.len(),
            t.len()
        )));
    }
    let mut a_out: Vec<u32> = Vec::new();
    let mut t_out: Vec<f64> = Vec::new();
    for (&a, &tv) in alpha.iter().zip(t) {
        if a == 0 {
            continue;
        }
        match t_out.iter().position(|&u| u == tv) {
            Some(p) => a_out[p] += a,
            None => {
                a_out.push(a);
                t_out.push(tv);
            }
        }
    }
    if a_out.is_empty() {
        return Err(Error::InvalidArgument("alpha must have a positive entry".into()));
    }
    Ok((a_out, t_out))
}
