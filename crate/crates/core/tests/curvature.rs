use nalgebra::DMatrix;
use nctori_core::curvature::{b2_engine, b2_hand, compare_densities, kh_conformal, kh_twisted};
use nctori_core::dd_calculus::parse_function;
use nctori_core::metrics::{FunctionalMetric, MatrixFunction};
use nctori_core::quadrature::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.7
}

fn points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n).map(|_| [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)]).collect()
}

#[test]
fn engine_matches_hand_on_structured_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = QuadratureSpec::default();
    let f = parse_function("exp(-t) + 0.3").unwrap();
    let ft = parse_function("1 + t^2").unwrap();
    let metrics = vec![
        FunctionalMetric::conformal(f.clone(), spd(3, &mut rng)).unwrap(),
        FunctionalMetric::twisted(f.clone(), spd(2, &mut rng), spd(1, &mut rng)).unwrap(),
        FunctionalMetric::doubly_twisted(f, ft, spd(1, &mut rng), spd(2, &mut rng)).unwrap(),
    ];
    for m in &metrics {
        let pts = points(&mut rng, 3);
        let dev = compare_densities(&b2_engine(m, spec), &b2_hand(m, spec), &pts).unwrap();
        assert!(dev < 1e-8, "{:?}: {dev}", m.kind());
    }
}

#[test]
fn engine_matches_hand_on_general_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = MatrixFunction::new(vec![
        vec![parse_function("2 + sin(t)").unwrap(), parse_function("0.3*t").unwrap()],
        vec![parse_function("0.3*t").unwrap(), parse_function("exp(t/2)").unwrap()],
    ])
    .unwrap();
    let metric = FunctionalMetric::general(m);
    let spec = QuadratureSpec::default();
    let pts = points(&mut rng, 3);
    let dev = compare_densities(&b2_engine(&metric, spec), &b2_hand(&metric, spec), &pts).unwrap();
    assert!(dev < 1e-8, "{dev}");
}

#[test]
fn constant_metric_has_zero_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = FunctionalMetric::conformal(parse_function("1").unwrap(), spd(3, &mut rng)).unwrap();
    for den in [b2_engine(&m, QuadratureSpec::default()), b2_hand(&m, QuadratureSpec::default())] {
        assert!(den.b21(0.1, 0.4).unwrap().amax() < 1e-14);
        assert!(den.b22(0.1, 0.4, -0.2).unwrap().amax() < 1e-14);
    }
}

#[test]
fn conformal_density_factors_through_k_and_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f = parse_function("exp(-2*t)").unwrap();
    for d in 2..=6 {
        let g = spd(d, &mut rng);
        let ginv = g.clone().try_inverse().unwrap();
        let sq = g.determinant().sqrt();
        let m = FunctionalMetric::conformal(f.clone(), g).unwrap();
        let den = b2_engine(&m, QuadratureSpec::default());
        let kh = kh_conformal(d as f64, f.clone()).unwrap();
        for p in points(&mut rng, 4) {
            let want21 = &ginv * (sq * kh.k(p[0], p[1]).unwrap());
            let want22 = &ginv * (sq * kh.h(p[0], p[1], p[2]).unwrap());
            let got21 = den.b21(p[0], p[1]).unwrap();
            let got22 = den.b22(p[0], p[1], p[2]).unwrap();
            assert!((&got21 - &want21).amax() < 1e-7 * want21.amax(), "d={d} B21 {got21} {want21}");
            assert!((&got22 - &want22).amax() < 1e-7 * want22.amax(), "d={d} B22 {got22} {want22}");
        }
    }
}

#[test]
fn twisted_density_splits_into_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = parse_function("1 + t^2").unwrap();
    for (r, s) in [(1usize, 2usize), (2, 1), (3, 1), (4, 1), (5, 1)] {
        let g = spd(r, &mut rng);
        let gt = spd(s, &mut rng);
        let sq = (g.determinant() * gt.determinant()).sqrt();
        let gi = g.clone().try_inverse().unwrap();
        let gti = gt.clone().try_inverse().unwrap();
        let m = FunctionalMetric::twisted(f.clone(), g, gt).unwrap();
        let den = b2_engine(&m, QuadratureSpec::default());
        let (main, tilde) = kh_twisted(r as f64, f.clone()).unwrap();
        let p = points(&mut rng, 1)[0];
        let b21 = den.b21(p[0], p[1]).unwrap();
        let b22 = den.b22(p[0], p[1], p[2]).unwrap();
        let k = main.k(p[0], p[1]).unwrap() * sq;
        let kt = tilde.k(p[0], p[1]).unwrap() * sq;
        let h = main.h(p[0], p[1], p[2]).unwrap() * sq;
        let ht = tilde.h(p[0], p[1], p[2]).unwrap() * sq;
        let top = |m: &DMatrix<f64>| m.view((0, 0), (r, r)).into_owned();
        let bottom = |m: &DMatrix<f64>| m.view((r, r), (s, s)).into_owned();
        let rel = |a: DMatrix<f64>, b: DMatrix<f64>| (&a - &b).amax() / b.amax().max(1e-3);
        assert!(rel(top(&b21), &gi * k) < 1e-7, "r={r} K {} {}", top(&b21), &gi * k);
        assert!(rel(bottom(&b21), &gti * kt) < 1e-7, "r={r} K~ {} {}", bottom(&b21), &gti * kt);
        assert!(rel(top(&b22), &gi * h) < 1e-7, "r={r} H");
        assert!(rel(bottom(&b22), &gti * ht) < 1e-7, "r={r} H~ {} {}", bottom(&b22), &gti * ht);
    }
}
