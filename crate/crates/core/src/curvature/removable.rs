//! Evaluation of closed forms with removable singularities on coincident arguments.
//!
//! A rational closed form such as `K(x, y)` with a denominator `(x - y)^3` is
//! analytic in each argument. Near a coincidence it is evaluated as the mean
//! of its values on a circle around the offending argument, where the
//! arguments are well separated and the direct formula is well conditioned.

use num_complex::Complex64;

/// Relative gap below which two arguments count as coincident.
pub const GAP: f64 = 0.25;
/// Points on each averaging circle.
pub const CIRCLE_POINTS: usize = 96;

const RADII: [f64; 5] = [0.3, 0.4, 0.45, 0.5, 0.6];

fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().min(b.norm())
}

/// Evaluates `f` at the real point `p`, averaging over circles where arguments
/// coincide. The arguments must lie in the right half plane, where `f` is analytic
/// apart from removable singularities on the diagonals.
pub fn eval_removable<F>(f: &F, p: &[f64]) -> f64
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let z: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let moved = vec![false; p.len()];
    eval_at(f, z, moved).re
}

fn eval_at<F>(f: &F, z: Vec<Complex64>, moved: Vec<bool>) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let n = z.len();
    let mut bad = None;
    'outer: for a in 0..n {
        for b in a + 1..n {
            if (!moved[a] || !moved[b]) && rel_gap(z[a], z[b]) < GAP {
                bad = Some(if !moved[a] { a } else { b });
                break 'outer;
            }
        }
    }
    let Some(v) = bad else {
        return f(&z);
    };
    let center = z[v];
    let scale = center.norm();
    // Radius whose circle stays farthest from the other arguments.
    let radius = RADII
        .iter()
        .map(|&r| {
            let clearance = (0..n)
                .filter(|&j| j != v)
                .map(|j| ((z[j] - center).norm() - r * scale).abs())
                .fold(f64::INFINITY, f64::min);
            (r * scale, clearance)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, _)| r)
        .unwrap_or(0.5 * scale);
    let mut moved = moved;
    moved[v] = true;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CIRCLE_POINTS {
        let phase = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
        let mut zk = z.clone();
        zk[v] = center + Complex64::from_polar(radius, phase);
        acc += eval_at(f, zk, moved.clone());
    }
    acc / CIRCLE_POINTS as f64
}

/// Value at the real point `center` of a function analytic in the disc of the
/// given radius, as the mean over the boundary circle. Removable singularities
/// inside the disc do not affect the result.
pub fn circle_mean<F>(f: F, center: f64, radius: f64) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CIRCLE_POINTS {
        let phase = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
        acc += f(center + Complex64::from_polar(radius, phase));
    }
    acc.re / CIRCLE_POINTS as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_divided_differences_at_coincidence() {
        // [x, y, z; u^3] = x + y + z.
        let f = |a: &[Complex64]| {
            let g = |u: Complex64| u * u * u;
            let d01 = (g(a[0]) - g(a[1])) / (a[0] - a[1]);
            let d12 = (g(a[1]) - g(a[2])) / (a[1] - a[2]);
            (d01 - d12) / (a[0] - a[2])
        };
        for p in [[1.0, 1.0, 1.0], [1.0, 1.0 + 1e-9, 2.5], [0.7, 2.0, 0.7000001]] {
            let v = eval_removable(&f, &p);
            assert!((v - p.iter().sum::<f64>()).abs() < 1e-12, "{p:?}: {v}");
        }
    }

    #[test]
    fn circle_mean_sees_through_a_removable_singularity() {
        let f = |z: Complex64| (z.exp() - 1.0) / z;
        let v = circle_mean(f, 0.0, 0.2);
        assert!((v - 1.0).abs() < 1e-14, "{v}");
        assert!((circle_mean(f, 0.01, 0.2) - 0.01f64.exp_m1() / 0.01).abs() < 1e-14);
    }

    #[test]
    fn leaves_separated_points_alone() {
        let f = |a: &[Complex64]| a[0].ln() / (a[0] - a[1]);
        let v = eval_removable(&f, &[2.0, 0.5]);
        assert!((v - 2f64.ln() / 1.5).abs() < 1e-15);
    }
}
