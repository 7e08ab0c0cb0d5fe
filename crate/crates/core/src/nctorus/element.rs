//! Finitely supported Fourier polynomials `sum a_n U_1^{n_1} ... U_d^{n_d}` on the
//! noncommutative torus with `U_k U_j = e^{2 pi i theta_jk} U_j U_k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// The deformation parameter of the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct NcTorus {
    theta: DMatrix<f64>,
}

impl NcTorus {
    pub fn new(theta: DMatrix<f64>) -> Result<Arc<Self>> {
        if !theta.is_square() || (&theta + theta.transpose()).amax() > 1e-14 {
            return Err(Error::InvalidArgument("theta must be an antisymmetric square matrix".into()));
        }
        Ok(Arc::new(NcTorus { theta }))
    }

    /// The commutative torus.
    pub fn commutative(d: usize) -> Arc<Self> {
        Arc::new(NcTorus { theta: DMatrix::zeros(d, d) })
    }

    /// A random antisymmetric `theta` with entries in `(-1, 1)`.
    pub fn random<R: Rng>(d: usize, rng: &mut R) -> Arc<Self> {
        let mut theta = DMatrix::zeros(d, d);
        for j in 0..d {
            for k in j + 1..d {
                let v = rng.gen_range(-1.0..1.0);
                theta[(j, k)] = v;
                theta[(k, j)] = -v;
            }
        }
        Arc::new(NcTorus { theta })
    }

    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn theta(&self) -> &DMatrix<f64> {
        &self.theta
    }

    /// `U^n U^m = phase(n, m) U^{n+m}` in ascending normal order:
    /// `phase = exp(2 pi i sum_{j<k} theta_jk n_k m_j)`.
    pub fn phase(&self, n: &[i32], m: &[i32]) -> Complex64 {
        let d = self.dim();
        let mut s = 0.0;
        for j in 0..d {
            for k in j + 1..d {
                s += self.theta[(j, k)] * n[k] as f64 * m[j] as f64;
            }
        }
        Complex64::from_polar(1.0, 2.0 * PI * s)
    }
}

/// An element of the smooth noncommutative torus with finite support.
#[derive(Clone, PartialEq)]
pub struct NcElement {
    torus: Arc<NcTorus>,
    coeffs: BTreeMap<Vec<i32>, Complex64>,
}

impl fmt::Debug for NcElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl NcElement {
    pub fn zero(torus: &Arc<NcTorus>) -> Self {
        NcElement { torus: torus.clone(), coeffs: BTreeMap::new() }
    }

    pub fn scalar(torus: &Arc<NcTorus>, c: Complex64) -> Self {
        Self::monomial(torus, &vec![0; torus.dim()], c)
    }

    pub fn one(torus: &Arc<NcTorus>) -> Self {
        Self::scalar(torus, Complex64::new(1.0, 0.0))
    }

    /// `c U_1^{n_1} ... U_d^{n_d}`.
    pub fn monomial(torus: &Arc<NcTorus>, n: &[i32], c: Complex64) -> Self {
        assert_eq!(n.len(), torus.dim(), "exponent vector of the wrong length");
        let mut e = Self::zero(torus);
        e.coeffs.insert(n.to_vec(), c);
        e
    }

    /// The generator `U_k` (zero based).
    pub fn generator(torus: &Arc<NcTorus>, k: usize) -> Self {
        let mut n = vec![0; torus.dim()];
        n[k] = 1;
        Self::monomial(torus, &n, Complex64::new(1.0, 0.0))
    }

    pub fn from_coefficients(torus: &Arc<NcTorus>, coeffs: impl IntoIterator<Item = (Vec<i32>, Complex64)>) -> Self {
        let mut e = Self::zero(torus);
        for (n, c) in coeffs {
            assert_eq!(n.len(), torus.dim(), "exponent vector of the wrong length");
            *e.coeffs.entry(n).or_default() += c;
        }
        e
    }

    /// A random element with `terms` modes of size at most `max_mode`.
    pub fn random<R: Rng>(torus: &Arc<NcTorus>, terms: usize, max_mode: i32, rng: &mut R) -> Self {
        let d = torus.dim();
        let coeffs = (0..terms).map(|_| {
            let n = (0..d).map(|_| rng.gen_range(-max_mode..=max_mode)).collect();
            (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        });
        Self::from_coefficients(torus, coeffs.collect::<Vec<_>>())
    }

    /// A random selfadjoint element.
    pub fn random_selfadjoint<R: Rng>(torus: &Arc<NcTorus>, terms: usize, max_mode: i32, rng: &mut R) -> Self {
        let a = Self::random(torus, terms, max_mode, rng);
        (&a + &a.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn torus(&self) -> &Arc<NcTorus> {
        &self.torus
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<i32>, Complex64> {
        &self.coeffs
    }

    pub fn coefficient(&self, n: &[i32]) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.torus != o.torus {
            return Err(Error::InvalidArgument("elements of different noncommutative tori".into()));
        }
        Ok(())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = Self::zero(&self.torus);
        for (n, a) in &self.coeffs {
            for (m, b) in &o.coeffs {
                let nm: Vec<i32> = n.iter().zip(m).map(|(x, y)| x + y).collect();
                *out.coeffs.entry(nm).or_default() += a * b * self.torus.phase(n, m);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (n, c) in &o.coeffs {
            *out.coeffs.entry(n.clone()).or_default() += c;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        NcElement { torus: self.torus.clone(), coeffs: self.coeffs.iter().map(|(n, v)| (n.clone(), v * c)).collect() }
    }

    /// `a^*`, using `(U^n)^* = exp(2 pi i sum_{j<k} theta_jk n_j n_k) U^{-n}`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(n, c)| {
            let minus: Vec<i32> = n.iter().map(|v| -v).collect();
            let p = self.torus.phase(n, &minus).conj();
            (minus, c.conj() * p)
        });
        NcElement { torus: self.torus.clone(), coeffs: coeffs.collect() }
    }

    /// `delta_j`, with `delta_j(U_k) = delta_jk U_k`.
    pub fn derivation(&self, j: usize) -> Self {
        let coeffs = self.coeffs.iter().map(|(n, c)| (n.clone(), c * n[j] as f64));
        NcElement { torus: self.torus.clone(), coeffs: coeffs.collect() }
    }

    /// `phi(a) = a_0`.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(&vec![0; self.torus.dim()])
    }

    /// `sum |a_n|`, an upper bound for the operator norm.
    pub fn norm1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficient difference.
    pub fn distance(&self, o: &Self) -> f64 {
        let diff = self - o;
        diff.coeffs.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.distance(&self.adjoint()) <= tol * self.norm1().max(1.0)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.torus);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Drops coefficients of modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let coeffs = self.coeffs.iter().filter(|(_, c)| c.norm() > tol).map(|(n, c)| (n.clone(), *c));
        NcElement { torus: self.torus.clone(), coeffs: coeffs.collect() }
    }
}

impl Mul for &NcElement {
    type Output = NcElement;
    fn mul(self, o: &NcElement) -> NcElement {
        self.try_mul(o).expect("elements of the same torus")
    }
}

impl Add for &NcElement {
    type Output = NcElement;
    fn add(self, o: &NcElement) -> NcElement {
        self.try_add(o).expect("elements of the same torus")
    }
}

impl Sub for &NcElement {
    type Output = NcElement;
    fn sub(self, o: &NcElement) -> NcElement {
        self + &(-o)
    }
}

impl Neg for &NcElement {
    type Output = NcElement;
    fn neg(self) -> NcElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
