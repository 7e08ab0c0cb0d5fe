//! Closed forms `K_d^t` and `H_d^t` of the conformally flat curvature functions.
//!
//! These are the functions for the conformal factor `f(t) = t`; general `f`
//! enters through divided differences, see [`super::CurvatureFunctions`].

use num_complex::Complex64 as C;

/// `K_d^t(x, y)` for `d != 2`.
pub fn k_t_generic(d: f64, x: C, y: C) -> C {
    let pre = x.powf(2.0 - 0.75 * d) * y.powf(2.0 - 0.75 * d) * 4.0 / (d * (d - 2.0) * (x - y).powi(3));
    let h = d / 2.0;
    pre * (x.powf(h) * y.powf(h - 1.0) * (d - 1.0) - x.powf(h - 1.0) * y.powf(h) * (d - 1.0) - x.powf(d - 1.0)
        + y.powf(d - 1.0))
}

/// `K_2^t(x, y)`.
pub fn k_t_two(x: C, y: C) -> C {
    -(x * y).sqrt() / (x - y).powi(3) * ((x + y) * (x / y).ln() + (y - x) * 2.0)
}

/// `H_d^t(x, y, z)` for `d != 2`.
pub fn h_t_generic(d: f64, x: C, y: C, z: C) -> C {
    let h = d / 2.0;
    let p = |u: C, e: f64| u.powf(e);
    let pre = p(x, -0.75 * d) * p(y, -d) * p(z, -0.75 * d) * 2.0
        / ((x - y).powi(2) * (x - z).powi(3) * (y - z).powi(2) * ((d - 2.0) * d));
    let s = p(x, d) * p(y, d) * z * z * (x - y)
        * (x * x * y * 3.0 - x * x * z * 2.0 - x * y * y * 4.0 + x * y * z * 4.0 - x * z * z * 2.0 + y * z * z)
        + p(x, d) * p(y, h + 1.0) * p(z, h + 1.0) * (x - z).powi(2) * (z - y) * (x * d + y * (1.0 - d))
        + p(x, d) * y.powi(3) * p(z, d) * (z - x).powi(3)
        + p(x, h + 1.0) * p(y, 3.0 * h) * z * z * (x - y) * (x - z).powi(2)
        + p(x, h + 1.0) * p(y, d) * p(z, h + 1.0) * (x - y) * (x - z) * (z - y) * (x - y * 2.0 + z) * (2.0 * (d - 1.0))
        - p(x, h + 1.0) * p(y, h + 1.0) * p(z, d) * (x - y) * (x - z).powi(2) * (y * (1.0 - d) + z * d)
        - x * x * p(y, 3.0 * h) * p(z, h + 1.0) * (x - z).powi(2) * (z - y)
        + x * x * p(y, d) * p(z, d) * (y - z)
            * (x * x * y - x * x * z * 2.0 + x * y * z * 4.0 - x * z * z * 2.0 - y * y * z * 4.0 + y * z * z * 3.0);
    pre * s
}

/// `H_2^t(x, y, z)`.
pub fn h_t_two(x: C, y: C, z: C) -> C {
    let pre = (x * z).sqrt() * 2.0 / ((x - y).powi(2) * (x - z).powi(3) * (y - z).powi(2));
    let s = -(x - y) * (x - z) * (y - z) * (x - y * 2.0 + z) + y * (x - z).powi(3) * y.ln()
        + (y - z).powi(2) * (-x * x * 2.0 + x * y + y * z) * x.ln()
        - (x - y).powi(2) * (x * y + z * y - z * z * 2.0) * z.ln();
    pre * s
}

/// `K_d^t`, choosing the logarithmic form at `d = 2`.
pub fn k_t(d: f64, x: C, y: C) -> C {
    if d == 2.0 {
        k_t_two(x, y)
    } else {
        k_t_generic(d, x, y)
    }
}

/// `H_d^t`, choosing the logarithmic form at `d = 2`.
pub fn h_t(d: f64, x: C, y: C, z: C) -> C {
    if d == 2.0 {
        h_t_two(x, y, z)
    } else {
        h_t_generic(d, x, y, z)
    }
}

/// Classical coincidence limits of `K_d` and `H_d` for `f(t) = e^{-2t}`.
pub fn classical_limits(d: f64, t: f64) -> (f64, f64) {
    let e = ((d - 2.0) * t).exp();
    ((d - 1.0) / 3.0 * e, (d - 2.0) * (d - 1.0) / 6.0 * e)
}

/// Functions of the reduced variables `s_j`, obtained from `K_d, H_d` with
/// `f(t) = e^t` and `t_j = s_0 + ... + s_j` after removing the factor
/// `e^{(1 - d/2) s_0}` (with `f(t) = e^{2t}` and `t_j = s_0 + (s_1 + ... + s_j)/3`
/// in dimension three).
pub mod reduced {
    /// Reduced `K_2`.
    pub fn k2(s1: f64) -> f64 {
        let e = s1.exp();
        -(s1 / 2.0).exp() * (e * (s1 - 2.0) + s1 + 2.0) / ((e - 1.0).powi(2) * s1)
    }

    /// Reduced `H_2`.
    pub fn h2(s1: f64, s2: f64) -> f64 {
        let s12 = s1 + s2;
        let csch = |v: f64| 1.0 / v.sinh();
        (s1 * s12 * s2.cosh() - (s1 - s2) * (s12 + s1.sinh() + s2.sinh() - s12.sinh()) - s2 * s12 * s1.cosh())
            * csch(s1 / 2.0)
            * csch(s2 / 2.0)
            * csch(s12 / 2.0).powi(2)
            / (4.0 * s1 * s2 * s12)
    }

    /// Reduced `K_4`.
    pub fn k4(s1: f64) -> f64 {
        (1.0 - s1.exp()) / (2.0 * s1.exp() * s1)
    }

    /// Reduced `H_4`.
    pub fn h4(s1: f64, s2: f64) -> f64 {
        let (e1, e2) = (s1.exp(), s2.exp());
        ((e1 - 1.0) * (3.0 * e2 + 1.0) * s2 - (e1 + 3.0) * (e2 - 1.0) * s1) / (4.0 * (s1 + s2).exp() * s1 * s2 * (s1 + s2))
    }

    /// Reduced `K_3`.
    pub fn k3(s1: f64) -> f64 {
        let e = (s1 / 3.0).exp();
        (4.0 - 4.0 * e) / ((s1 / 6.0).exp() * s1 * (e + 1.0))
    }

    /// Reduced `H_3`.
    pub fn h3(s1: f64, s2: f64) -> f64 {
        let (e1, e2) = ((s1 / 3.0).exp(), (s2 / 3.0).exp());
        let s12 = s1 + s2;
        (6.0 * (e1 - 1.0) * (3.0 * e2 + 1.0) * s2 - 6.0 * (e1 + 3.0) * (e2 - 1.0) * s1)
            / ((s12 / 6.0).exp() * ((s12 / 3.0).exp() + 1.0) * s1 * s2 * s12)
    }

    /// Reduced `K_d` for `d != 2`.
    pub fn kd(d: f64, s1: f64) -> f64 {
        8.0 * ((6.0 - d) / 4.0 * s1).exp() * ((d - 1.0) * (s1 / 2.0).sinh() + ((1.0 - d) * s1 / 2.0).sinh())
            / (d * (d - 2.0) * (s1.exp() - 1.0).powi(2) * s1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> C {
        C::new(v, 0.0)
    }

    #[test]
    fn dimension_two_is_the_limit() {
        let (x, y, z) = (c(0.7), c(1.9), c(1.3));
        for eps in [1e-5, -1e-5] {
            let k = k_t_generic(2.0 + eps, x, y);
            assert!((k - k_t_two(x, y)).norm() < 1e-4);
            let h = h_t_generic(2.0 + eps, x, y, z);
            assert!((h - h_t_two(x, y, z)).norm() < 1e-4);
        }
    }

    #[test]
    fn homogeneous_of_the_stated_orders() {
        let (x, y, z) = (c(0.7), c(1.9), c(1.3));
        for d in [2.0, 3.0, 5.5] {
            let l: f64 = 1.7;
            let k = k_t(d, x * l, y * l) / k_t(d, x, y);
            assert!((k.re - l.powf(-d / 2.0)).abs() < 1e-12);
            let h = h_t(d, x * l, y * l, z * l) / h_t(d, x, y, z);
            assert!((h.re - l.powf(-d / 2.0 - 1.0)).abs() < 1e-11);
        }
    }
}
