//! Closed forms `K~_r^t` and `H~_r^t` of the twisted product curvature functions.

use num_complex::Complex64 as C;

/// `K~_r^t(x, y)` for `r != 2, 4`.
pub fn kt_t_generic(r: f64, x: C, y: C) -> C {
    let h = r / 2.0;
    let num = (x * x - y * y) * x.powf(h) * y.powf(h) * (2.0 * r - 4.0) + x * x * y.powf(r) * 4.0
        - x.powf(r) * y * y * 4.0;
    num / (x.powf(0.75 * r) * y.powf(0.75 * r) * (x - y).powi(3) * ((r - 4.0) * (r - 2.0)))
}

/// `K~_2^t(x, y)`.
pub fn kt_t_two(x: C, y: C) -> C {
    (-x * x + y * y + x * y * (x / y).ln() * 2.0) / ((x * y).sqrt() * (x - y).powi(3))
}

/// `K~_4^t(x, y)`.
pub fn kt_t_four(x: C, y: C) -> C {
    (x * x - y * y - (x * x + y * y) * (x / y).ln()) / (x * y * (x - y).powi(3))
}

/// `H~_r^t(x, y, z)` for `r != 2, 4`.
pub fn ht_t_generic(r: f64, x: C, y: C, z: C) -> C {
    let h = r / 2.0;
    let p = |u: C, e: f64| u.powf(e);
    let pre = p(x, -0.75 * r) * p(y, -r) * p(z, -0.75 * r) * 2.0
        / ((x - y).powi(2) * (x - z).powi(3) * (y - z).powi(2) * ((r - 4.0) * (r - 2.0)));
    let r3 = r - 3.0;
    let s = p(x, r) * p(y, r) * z * z * (x - y)
        * (x * x + x * (y - z * 2.0) * 2.0 - y * y * 4.0 + y * z * 6.0 - z * z)
        + p(x, r) * p(y, h) * p(z, h) * (x - z).powi(2) * (y - z) * (y * z * r3 - x * (z * r3 + y))
        - p(x, r) * y * y * p(z, r) * (x - z).powi(3)
        + p(x, h) * p(y, 3.0 * h) * z * z * (x - y) * (x - z).powi(2)
        - p(x, h) * p(y, r) * p(z, h) * (x - y) * (x - z) * (y - z)
            * (x * x * r3 - x * (y * (r - 2.0) + z * (1.0 - r)) * 2.0 + z * (z * r3 - y * (2.0 * (r - 2.0))))
        + p(x, h) * p(y, h) * p(z, r) * (y - x) * (x - z).powi(2) * (y * z - x * (y - z) * r3)
        + x * x * p(y, 3.0 * h) * p(z, h) * (x - z).powi(2) * (y - z)
        - x * x * p(y, r) * p(z, r) * (y - z) * (x * x - x * y * 6.0 + x * z * 4.0 + y * y * 4.0 - y * z * 2.0 - z * z);
    pre * s
}

/// `H~_2^t(x, y, z)`.
pub fn ht_t_two(x: C, y: C, z: C) -> C {
    let pre = C::new(1.0, 0.0) / (y * (x * z).sqrt() * (x - y).powi(2) * (x - z).powi(3) * (y - z).powi(2) * 2.0);
    let s = -y * (x + y) * (x - z).powi(3) * (y + z) * y.ln()
        - z * (x - y).powi(2)
            * (-x * x * y * 3.0 + x * x * z - x * y * y * 8.0 + x * y * z * 10.0 - x * z * z * 2.0 + y * z * z + z.powi(3))
            * z.ln()
        + x * (y - z).powi(2)
            * (x.powi(3) + x * x * y - x * x * z * 2.0 + x * y * z * 10.0 + x * z * z - y * y * z * 8.0 - y * z * z * 3.0)
            * x.ln()
        + y * (y - x) * (x - z) * (x + z) * (z - y) * (x - y * 2.0 + z) * 2.0;
    pre * s
}

/// `H~_4^t(x, y, z)`.
pub fn ht_t_four(x: C, y: C, z: C) -> C {
    let pre = C::new(1.0, 0.0) / (x * (x - y).powi(2) * y * y * (x - z).powi(3) * (y - z).powi(2) * z * 2.0);
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let (x3, y3, z3) = (x2 * x, y2 * y, z2 * z);
    let (x4, z4) = (x2 * x2, z2 * z2);
    let s = (x2 + y2) * (x - z).powi(3) * (y2 + z2) * y.ln()
        + x.ln()
            * (y - z).powi(2)
            * (x4 * y + x4 * z - x3 * y2 * 6.0 - x3 * y * z * 2.0 - x3 * z2 * 2.0 + x2 * y3 * 3.0 + x2 * y2 * z + x2 * y * z2
                + x2 * z3
                + x * y3 * z * 2.0
                - x * y2 * z2 * 4.0
                + y3 * z2 * 3.0
                + y2 * z3)
        - z.ln()
            * (x - y).powi(2)
            * (x3 * y2 + x3 * z2 + x2 * y3 * 3.0 - x2 * y2 * z * 4.0 + x2 * y * z2 - x2 * z3 * 2.0 + x * y3 * z * 2.0
                + x * y2 * z2
                - x * y * z3 * 2.0
                + x * z4
                + y3 * z2 * 3.0
                - y2 * z3 * 6.0
                + y * z4)
        - (x - y) * (x - z) * (y - z)
            * (x3 * z + x2 * y2 - x2 * z2 * 2.0 - x * y3 * 2.0 + x * y2 * z * 2.0 + x * z3 - y3 * z * 2.0 + y2 * z2)
            * 2.0;
    pre * s
}

/// `K~_r^t`, choosing the logarithmic forms at `r = 2, 4`.
pub fn kt_t(r: f64, x: C, y: C) -> C {
    if r == 2.0 {
        kt_t_two(x, y)
    } else if r == 4.0 {
        kt_t_four(x, y)
    } else {
        kt_t_generic(r, x, y)
    }
}

/// `H~_r^t`, choosing the logarithmic forms at `r = 2, 4`.
pub fn ht_t(r: f64, x: C, y: C, z: C) -> C {
    if r == 2.0 {
        ht_t_two(x, y, z)
    } else if r == 4.0 {
        ht_t_four(x, y, z)
    } else {
        ht_t_generic(r, x, y, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logarithmic_forms_are_limits() {
        let (x, y, z) = (C::new(0.7, 0.0), C::new(1.9, 0.0), C::new(1.3, 0.0));
        for r in [2.0, 4.0] {
            for eps in [1e-5, -1e-5] {
                let k = kt_t_generic(r + eps, x, y);
                assert!((k - kt_t(r, x, y)).norm() < 1e-4, "K r={r}: {k} vs {}", kt_t(r, x, y));
                let h = ht_t_generic(r + eps, x, y, z);
                assert!((h - ht_t(r, x, y, z)).norm() < 1e-4, "H r={r}: {h} vs {}", ht_t(r, x, y, z));
            }
        }
    }
}
