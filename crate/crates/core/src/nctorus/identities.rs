//! Randomized exact checks of the derivation and trace identities for
//! contraction forms with polynomial functions.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nctorus::{poly_contraction, NcElement, NcTorus, PolyContraction};

/// Worst coefficient deviation of one identity over a batch of instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub instances: usize,
    pub max_deviation: f64,
}

/// A random polynomial of total degree at most `degree` with `terms` monomials.
pub fn random_poly<R: Rng>(arity: usize, degree: u32, terms: usize, rng: &mut R) -> PolyContraction {
    let mut p = PolyContraction::zero(arity);
    for _ in 0..terms {
        let mut beta = vec![0u32; arity];
        for _ in 0..rng.gen_range(0..=degree) {
            beta[rng.gen_range(0..arity)] += 1;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        p = p.add(&PolyContraction::monomial(&beta, c));
    }
    p
}

/// Random data for one instance.
pub struct Instance {
    pub torus: Arc<NcTorus>,
    pub h: NcElement,
    pub word: Vec<NcElement>,
    pub f: PolyContraction,
}

impl Instance {
    pub fn random<R: Rng>(d: usize, word_len: usize, rng: &mut R) -> Self {
        let torus = NcTorus::random(d, rng);
        let h = NcElement::random_selfadjoint(&torus, 3, 1, rng).scale(Complex64::new(0.5, 0.0));
        let word = (0..word_len).map(|_| NcElement::random(&torus, 2, 1, rng)).collect();
        let f = random_poly(word_len + 1, 3, 3, rng);
        Instance { torus, h, word, f }
    }
}

/// `delta_j(f(h)) = [h_(0), h_(1); f](delta_j h)`.
pub fn delta_of_function(f: &[f64], h: &NcElement, j: usize) -> Result<f64> {
    let lhs = poly_contraction(&PolyContraction::univariate(1, 0, f), h, &[])?.derivation(j);
    let dd = PolyContraction::divided_difference(2, &[0, 1], f);
    let rhs = poly_contraction(&dd, h, &[h.derivation(j)])?;
    Ok(lhs.distance(&rhs))
}

/// Right-hand side of the derivation rule for `delta_j(F(h_(0), ..)(b_1 ... b_n))`.
pub fn delta_of_contraction_rhs(f: &PolyContraction, h: &NcElement, word: &[NcElement], j: usize) -> Result<NcElement> {
    let mut out = NcElement::zero(h.torus());
    for k in 0..word.len() {
        let mut w = word.to_vec();
        w[k] = w[k].derivation(j);
        out = &out + &poly_contraction(f, h, &w)?;
    }
    let dh = h.derivation(j);
    for k in 0..=word.len() {
        let mut w = word.to_vec();
        w.insert(k, dh.clone());
        out = &out + &poly_contraction(&f.partial_dd(k), h, &w)?;
    }
    Ok(out)
}

pub fn delta_of_contraction(f: &PolyContraction, h: &NcElement, word: &[NcElement], j: usize) -> Result<f64> {
    let lhs = poly_contraction(f, h, word)?.derivation(j);
    Ok(lhs.distance(&delta_of_contraction_rhs(f, h, word, j)?))
}

/// `delta_1 delta_2 f(h) = [h_(0), h_(1), h_(2); f](delta_2 h . delta_1 h + delta_1 h . delta_2 h)
/// + [h_(0), h_(1); f](delta_1 delta_2 h)`.
pub fn second_derivation(f: &[f64], h: &NcElement, j1: usize, j2: usize) -> Result<f64> {
    let lhs = poly_contraction(&PolyContraction::univariate(1, 0, f), h, &[])?.derivation(j2).derivation(j1);
    let (d1, d2) = (h.derivation(j1), h.derivation(j2));
    let dd2 = PolyContraction::divided_difference(3, &[0, 1, 2], f);
    let dd1 = PolyContraction::divided_difference(2, &[0, 1], f);
    let rhs = &(&poly_contraction(&dd2, h, &[d2.clone(), d1.clone()])? + &poly_contraction(&dd2, h, &[d1, d2])?)
        + &poly_contraction(&dd1, h, &[h.derivation(j1).derivation(j2)])?;
    Ok(lhs.distance(&rhs))
}

/// `phi(F(h_(0), .., h_(n))(b_1 .. b_n)) = phi(F(h_(0), .., h_(n-1), h_(0))(b_1 .. b_{n-1}) b_n)`.
pub fn trace_cyclicity_i(f: &PolyContraction, h: &NcElement, word: &[NcElement]) -> Result<f64> {
    let n = word.len();
    let lhs = poly_contraction(f, h, word)?.trace();
    let mut map: Vec<usize> = (0..=n).collect();
    map[n] = 0;
    let g = f.embed(n, &map);
    let rhs = (&poly_contraction(&g, h, &word[..n - 1])? * &word[n - 1]).trace();
    Ok((lhs - rhs).norm())
}

/// `phi(F(h_(0), .., h_(n))(b_1 .. b_n) b_{n+1}) = phi(b_1 G(h_(0), .., h_(n))(b_2 .. b_{n+1}))`
/// with `G(t_0, .., t_n) = F(t_n, t_0, .., t_{n-1})`.
pub fn trace_cyclicity_ii(f: &PolyContraction, h: &NcElement, word: &[NcElement], last: &NcElement) -> Result<f64> {
    let n = word.len();
    let lhs = (&poly_contraction(f, h, word)? * last).trace();
    let map: Vec<usize> = (0..=n).map(|k| if k == 0 { n } else { k - 1 }).collect();
    let g = f.embed(n + 1, &map);
    let mut rest = word[1..].to_vec();
    rest.push(last.clone());
    let rhs = (&word[0] * &poly_contraction(&g, h, &rest)?).trace();
    Ok((lhs - rhs).norm())
}

/// `phi(a delta_j b) = -phi(delta_j(a) b)`.
pub fn integration_by_parts(a: &NcElement, b: &NcElement, j: usize) -> f64 {
    ((a * &b.derivation(j)).trace() + (&a.derivation(j) * b).trace()).norm()
}

/// Runs every identity on `instances` random instances per dimension in `dims`.
pub fn check_identities<R: Rng>(dims: &[usize], instances: usize, rng: &mut R) -> Result<Vec<IdentityReport>> {
    let names = ["delta_function", "delta_contraction", "second_derivation", "trace_cyclicity_i", "trace_cyclicity_ii", "integration_by_parts"];
    let mut worst = [0.0f64; 6];
    let mut count = 0;
    for &d in dims {
        for _ in 0..instances {
            count += 1;
            let word_len = rng.gen_range(1..=2);
            let inst = Instance::random(d, word_len, rng);
            let j = rng.gen_range(0..d);
            let j2 = rng.gen_range(0..d);
            let f1: Vec<f64> = (0..rng.gen_range(2..=5)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let last = NcElement::random(&inst.torus, 2, 1, rng);
            let devs = [
                delta_of_function(&f1, &inst.h, j)?,
                delta_of_contraction(&inst.f, &inst.h, &inst.word, j)?,
                second_derivation(&f1, &inst.h, j, j2)?,
                trace_cyclicity_i(&inst.f, &inst.h, &inst.word)?,
                trace_cyclicity_ii(&inst.f, &inst.h, &inst.word, &last)?,
                integration_by_parts(&inst.word[0], &last, j),
            ];
            for (w, v) in worst.iter_mut().zip(devs) {
                *w = w.max(v);
            }
        }
    }
    Ok(names
        .iter()
        .zip(worst)
        .map(|(n, w)| IdentityReport { name: n.to_string(), instances: count, max_deviation: w })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = NcTorus::random(2, &mut rng);
        let h = NcElement::random_selfadjoint(&t, 3, 1, &mut rng);
        assert!(delta_of_function(&[0.0, 0.0, 1.0], &h, 0).unwrap() < 1e-13);
    }

    #[test]
    fn t0_squared_t1_on_one_letter() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = NcTorus::random(3, &mut rng);
        let h = NcElement::random_selfadjoint(&t, 3, 1, &mut rng);
        let b = NcElement::random(&t, 3, 1, &mut rng);
        let f = PolyContraction::monomial(&[2, 1], Complex64::new(1.0, 0.0));
        for j in 0..3 {
            assert!(delta_of_contraction(&f, &h, std::slice::from_ref(&b), j).unwrap() < 1e-12);
        }
    }

    #[test]
    fn all_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for r in check_identities(&[2, 3], 10, &mut rng).unwrap() {
            assert!(r.max_deviation < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn a_wrong_rule_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut inst = Instance::random(2, 1, &mut rng);
        inst.word = vec![&NcElement::generator(&inst.torus, 0) + &NcElement::generator(&inst.torus, 1)];
        let lhs = poly_contraction(&inst.f, &inst.h, &inst.word).unwrap().derivation(0);
        let rhs = delta_of_contraction_rhs(&inst.f, &inst.h, &inst.word, 0).unwrap();
        let wrong = &rhs - &poly_contraction(&inst.f, &inst.h, &[inst.word[0].derivation(0)]).unwrap();
        assert!(lhs.distance(&wrong) > 1e-3);
    }
}
