//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] of order `n` stores `c_k = f^(k)(t) / k!` for `k = 0..=n`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The identity function expanded at `t`.
    pub fn variable(t: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = t;
        if order > 0 {
            v[1] = 1.0;
        }
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k] * factorial(k)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, b: &Jet) -> Jet {
        let n = self.order();
        let mut q = vec![0.0; n + 1];
        for k in 0..=n {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= b.0[j] * q[k - j];
            }
            q[k] = s / b.0[0];
        }
        Jet(q)
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = self.0[0].exp();
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.0[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    pub fn ln(&self) -> Jet {
        let n = self.order();
        let a0 = self.0[0];
        let mut l = vec![0.0; n + 1];
        l[0] = if a0 > 0.0 { a0.ln() } else { f64::NAN };
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * self.0[k - j];
            }
            l[k] = (self.0[k] - s / k as f64) / a0;
        }
        Jet(l)
    }

    /// Integer power by repeated squaring; valid for any sign of the base.
    pub fn powi(&self, p: i64) -> Jet {
        if p < 0 {
            return self.powi(-p).recip();
        }
        let mut result = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = p as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Real power; non-integer exponents need a positive base.
    pub fn powf(&self, p: f64) -> Jet {
        if p.fract() == 0.0 && p.abs() < 64.0 {
            return self.powi(p as i64);
        }
        let n = self.order();
        let a0 = self.0[0];
        let mut b = vec![0.0; n + 1];
        b[0] = if a0 > 0.0 || (a0 == 0.0 && p > 0.0 && n == 0) { a0.powf(p) } else { f64::NAN };
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((p + 1.0) * j as f64 - k as f64) * self.0[j] * b[k - j];
            }
            b[k] = s / (k as f64 * a0);
        }
        Jet(b)
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for k in 1..=n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * self.0[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// Composes an outer series (coefficients at `inner.value()`) with `inner`.
    pub fn compose(outer: &[f64], inner: &Jet) -> Jet {
        let n = inner.order();
        let mut shifted = inner.clone();
        shifted.0[0] = 0.0;
        let mut acc = Jet::constant(*outer.get(n).unwrap_or(&0.0), n);
        for k in (0..n).rev() {
            acc = &acc * &shifted;
            acc.0[0] += outer.get(k).copied().unwrap_or(0.0);
        }
        acc
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, b: &Jet) -> Jet {
        Jet(self.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, b: &Jet) -> Jet {
        Jet(self.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, b: &Jet) -> Jet {
        let n = self.order();
        let mut c = vec![0.0; n + 1];
        for (i, ai) in self.0.iter().enumerate() {
            if *ai == 0.0 {
                continue;
            }
            for j in 0..=n - i {
                c[i + j] += ai * b.0[j];
            }
        }
        Jet(c)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
