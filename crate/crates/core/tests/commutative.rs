use nalgebra::{DMatrix, DVector};
use nctori_core::curvature::{b2_engine, commutative_scalar_curvature, scaled_classical_curvature};
use nctori_core::dd_calculus::parse_function;
use nctori_core::metrics::{classical_scalar_curvature, FunctionalMetric, GridFunction, GridSpec, MatrixFunction};
use nctori_core::quadrature::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random trigonometric polynomial with a handful of low modes.
fn random_h(d: usize, rng: &mut ChaCha8Rng) -> impl Fn(&[f64]) -> f64 {
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..4)
        .map(|_| {
            let k = (0..d).map(|_| rng.gen_range(-2i32..=2) as f64).collect();
            (k, rng.gen_range(-0.25..0.25), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let c: f64 = rng.gen_range(-0.3..0.3);
    move |x: &[f64]| c + modes.iter().map(|(k, a, p)| a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + p).sin()).sum::<f64>()
}

fn random_metric(d: usize, rng: &mut ChaCha8Rng) -> FunctionalMetric {
    let mut entries = vec![vec![parse_function("0").unwrap(); d]; d];
    for i in 0..d {
        for j in i..d {
            let (a, b) = (rng.gen_range(-0.3..0.3), rng.gen_range(0.5..1.5));
            let text = if i == j {
                format!("{} + {a}*sin({b}*t) + 0.2*t^2", 1.5 + rng.gen_range(0.0..0.5))
            } else {
                format!("{}*cos({b}*t + {a})", rng.gen_range(-0.2..0.2))
            };
            entries[i][j] = parse_function(&text).unwrap();
            entries[j][i] = entries[i][j].clone();
        }
    }
    FunctionalMetric::general(MatrixFunction::new(entries).unwrap())
}

/// Scalar curvature of `x -> g(x)` from Christoffel symbols, with fourth-order
/// central differences for the first and second derivatives of the metric.
fn christoffel_curvature(g: &dyn Fn(&[f64]) -> DMatrix<f64>, x: &[f64]) -> f64 {
    let d = x.len();
    let e = 1e-3;
    let at = |shifts: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(a, s) in shifts {
            y[a] += s;
        }
        g(&y)
    };
    let dg: Vec<DMatrix<f64>> = (0..d)
        .map(|a| (at(&[(a, -2.0 * e)]) - at(&[(a, 2.0 * e)]) + (at(&[(a, e)]) - at(&[(a, -e)])) * 8.0) / (12.0 * e))
        .collect();
    let d1 = |a: usize, s: f64| {
        move |b: usize| {
            (at(&[(a, s), (b, -2.0 * e)]) - at(&[(a, s), (b, 2.0 * e)])
                + (at(&[(a, s), (b, e)]) - at(&[(a, s), (b, -e)])) * 8.0)
                / (12.0 * e)
        }
    };
    let ddg: Vec<DMatrix<f64>> = (0..d * d)
        .map(|ab| {
            let (a, b) = (ab / d, ab % d);
            if a == b {
                (-at(&[(a, 2.0 * e)]) - at(&[(a, -2.0 * e)]) + (at(&[(a, e)]) + at(&[(a, -e)])) * 16.0 - g(x) * 30.0)
                    / (12.0 * e * e)
            } else {
                (d1(a, -2.0 * e)(b) - d1(a, 2.0 * e)(b) + (d1(a, e)(b) - d1(a, -e)(b)) * 8.0) / (12.0 * e)
            }
        })
        .collect();
    let gi = g(x).try_inverse().unwrap();
    let dgi: Vec<DMatrix<f64>> = dg.iter().map(|m| -&gi * m * &gi).collect();
    // gamma[k][i][j] and its derivatives
    let gamma = |k: usize, i: usize, j: usize| {
        (0..d).map(|l| 0.5 * gi[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)])).sum::<f64>()
    };
    let dgamma = |m: usize, k: usize, i: usize, j: usize| {
        (0..d)
            .map(|l| {
                0.5 * dgi[m][(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)])
                    + 0.5 * gi[(k, l)] * (ddg[m * d + i][(l, j)] + ddg[m * d + j][(l, i)] - ddg[m * d + l][(i, j)])
            })
            .sum::<f64>()
    };
    let mut r = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut ric = 0.0;
            for k in 0..d {
                ric += dgamma(k, k, i, j) - dgamma(j, k, i, k);
                for l in 0..d {
                    ric += gamma(k, k, l) * gamma(l, i, j) - gamma(k, j, l) * gamma(l, i, k);
                }
            }
            r += gi[(i, j)] * ric;
        }
    }
    r
}

#[test]
fn classical_formula_matches_christoffel_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (d, n) in [(2usize, 24usize), (3, 12)] {
        for _ in 0..2 {
            let m = random_metric(d, &mut rng);
            let hf = random_h(d, &mut rng);
            let h = GridFunction::from_fn(GridSpec::square(d, n), &hf);
            let r = classical_scalar_curvature(&m, &h).unwrap();
            let g = |x: &[f64]| m.lower().eval(hf(x));
            for _ in 0..5 {
                let i = rng.gen_range(0..h.values.len());
                let want = christoffel_curvature(&g, &h.spec.point(i));
                assert!((r.values[i] - want).abs() <= 1e-6 * want.abs().max(1.0), "d={d}: {} vs {want}", r.values[i]);
            }
        }
    }
}

#[test]
fn conformal_metric_has_the_textbook_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let g0 = DMatrix::from_row_slice(2, 2, &[1.2, 0.3, 0.3, 0.8]);
    let g0i = g0.clone().try_inverse().unwrap();
    let m = FunctionalMetric::conformal(parse_function("exp(-2*t)").unwrap(), g0).unwrap();
    let h = GridFunction::from_fn(GridSpec::square(2, 32), random_h(2, &mut rng));
    let r = classical_scalar_curvature(&m, &h).unwrap();
    let der = h.derivatives().unwrap();
    for i in (0..h.values.len()).step_by(37) {
        let want = -2.0 * (-2.0 * h.values[i]).exp() * g0i.component_mul(&der.hessian_at(i)).sum();
        assert!((r.values[i] - want).abs() < 1e-12 * want.abs().max(1.0));
    }
}

#[test]
fn constant_h_has_zero_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let m = random_metric(2, &mut rng);
    let h = GridFunction::from_fn(GridSpec::square(2, 8), |_| 0.4);
    assert!(classical_scalar_curvature(&m, &h).unwrap().values.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn engine_recovers_the_classical_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..2 {
        let m = random_metric(2, &mut rng);
        let h = GridFunction::from_fn(GridSpec::square(2, 64), random_h(2, &mut rng));
        let density = b2_engine(&m, QuadratureSpec::default());
        let engine = commutative_scalar_curvature(&density, &h).unwrap();
        let classical = scaled_classical_curvature(&density, &h).unwrap();
        let scale = classical.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dev = engine.values.iter().zip(&classical.values).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(dev <= 1e-4 * scale, "{dev} vs {scale}");
        assert!(engine.mean().abs() <= 1e-5, "{}", engine.mean());
    }
}

#[test]
fn engine_matches_in_dimension_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let m = random_metric(3, &mut rng);
    let h = GridFunction::from_fn(GridSpec::square(3, 8), random_h(3, &mut rng));
    let density = b2_engine(&m, QuadratureSpec::default());
    let engine = commutative_scalar_curvature(&density, &h).unwrap();
    let classical = scaled_classical_curvature(&density, &h).unwrap();
    let dev = DVector::from_vec(engine.values.clone()) - DVector::from_vec(classical.values.clone());
    let scale = DVector::from_vec(classical.values).amax();
    assert!(dev.amax() <= 1e-6 * scale, "{} vs {scale}", dev.amax());
}
