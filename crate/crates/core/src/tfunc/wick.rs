//! Perfect matchings and Wick sums.

use nalgebra::DMatrix;

/// All perfect matchings of `0..2k`; there are `(2k - 1)!!` of them.
pub fn wick_pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = rest[0];
        for k in 1..rest.len() {
            acc.push((first, rest[k]));
            let remaining: Vec<usize> =
                rest[1..].iter().enumerate().filter(|(i, _)| *i + 1 != k).map(|(_, &v)| v).collect();
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let all: Vec<usize> = (0..2 * k).collect();
    rec(&all, &mut Vec::new(), &mut out);
    out
}

/// `sum over matchings sigma of prod m[n_a, n_sigma(a)]`.
pub fn wick_sum(m: &DMatrix<f64>, n: &[usize]) -> f64 {
    if n.is_empty() {
        return 1.0;
    }
    if n.len() % 2 == 1 {
        return 0.0;
    }
    let first = n[0];
    let mut total = 0.0;
    for k in 1..n.len() {
        let entry = m[(first, n[k])];
        if entry == 0.0 {
            continue;
        }
        let rest: Vec<usize> = n[1..].iter().enumerate().filter(|(i, _)| *i + 1 != k).map(|(_, &v)| v).collect();
        total += entry * wick_sum(m, &rest);
    }
    total
}

/// `(m - 1)!!` for even `m`.
pub fn double_factorial_odd(m: usize) -> u64 {
    (1..m as u64).step_by(2).product::<u64>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for k in 0..5 {
            assert_eq!(wick_pairings(k).len() as u64, double_factorial_odd(2 * k));
        }
        assert_eq!(wick_pairings(1), vec![vec![(0, 1)]]);
        assert_eq!(wick_pairings(2).len(), 3);
        assert_eq!(wick_pairings(3).len(), 15);
    }

    #[test]
    fn identity_wick_sum() {
        let id = DMatrix::<f64>::identity(3, 3);
        // delta_{kl} delta_{mn} + delta_{km} delta_{ln} + delta_{kn} delta_{lm}
        assert_eq!(wick_sum(&id, &[0, 0, 1, 1]), 1.0);
        assert_eq!(wick_sum(&id, &[2, 2, 2, 2]), 3.0);
        assert_eq!(wick_sum(&id, &[0, 1, 0, 1]), 1.0);
    }
}
