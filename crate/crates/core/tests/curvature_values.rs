use nalgebra::DMatrix;
use nctori_core::curvature::conformal::classical_limits;
use nctori_core::curvature::examples::{doubly_twisted_fs, twisted_fs, twisted_fs_tilde};
use nctori_core::curvature::{gauss_bonnet_check, homogeneity_check, kh_conformal, reduced, total_curvature_kernel};
use nctori_core::dd_calculus::parse_function;
use nctori_core::metrics::{FunctionalMetric, MatrixFunction};
use nctori_core::quadrature::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.7
}

/// Reduced arguments kept away from the removable singularities of the
/// displayed formulas, where their floating point evaluation cancels.
fn separated_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let s1: f64 = rng.gen_range(-2.0..2.0);
        let s2: f64 = rng.gen_range(-2.0..2.0);
        if s1.abs().min(s2.abs()).min((s1 + s2).abs()) > 0.1 {
            return (s1, s2);
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn reduced_values_in_dimensions_two_and_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let f = parse_function("exp(t)").unwrap();
    for d in [2usize, 4] {
        let kh = kh_conformal(d as f64, f.clone()).unwrap();
        for _ in 0..20 {
            let s0: f64 = rng.gen_range(-1.0..1.0);
            let (s1, s2) = separated_pair(&mut rng);
            let scale = ((1.0 - d as f64 / 2.0) * s0).exp();
            let k = kh.k(s0, s0 + s1).unwrap() / scale;
            let h = kh.h(s0, s0 + s1, s0 + s1 + s2).unwrap() / scale;
            let (k_want, h_want) = if d == 2 {
                (reduced::k2(s1), reduced::h2(s1, s2))
            } else {
                (reduced::k4(s1), reduced::h4(s1, s2))
            };
            assert!(close(k, k_want, 1e-10), "d={d} K({s1}) {k} {k_want}");
            assert!(close(h, h_want, 1e-10), "d={d} H({s1},{s2}) {h} {h_want}");
        }
    }
}

#[test]
fn reduced_values_in_dimension_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let kh = kh_conformal(3.0, parse_function("exp(2*t)").unwrap()).unwrap();
    for _ in 0..20 {
        let (s1, s2) = separated_pair(&mut rng);
        let k = kh.k(0.0, s1 / 3.0).unwrap();
        let h = kh.h(0.0, s1 / 3.0, (s1 + s2) / 3.0).unwrap();
        assert!(close(k, reduced::k3(s1), 1e-10), "K3({s1}) {k} {}", reduced::k3(s1));
        assert!(close(h, reduced::h3(s1, s2), 1e-10), "H3({s1},{s2}) {h} {}", reduced::h3(s1, s2));
    }
}

#[test]
fn reduced_k_in_general_dimension() {
    let f = parse_function("exp(t)").unwrap();
    for d in [3.0, 5.0, 6.0, 7.5] {
        let kh = kh_conformal(d, f.clone()).unwrap();
        for s1 in [-1.7, -0.4, 0.3, 1.1, 2.5] {
            let k = kh.k(0.0, s1).unwrap();
            assert!(close(k, reduced::kd(d, s1), 1e-10), "d={d} {k} {}", reduced::kd(d, s1));
        }
    }
}

#[test]
fn coincidence_limits_are_classical() {
    let f = parse_function("exp(-2*t)").unwrap();
    for d in 3..=8 {
        let kh = kh_conformal(d as f64, f.clone()).unwrap();
        for t in [-0.7, 0.0, 0.45] {
            let (k, h) = classical_limits(d as f64, t);
            assert!(close(kh.k(t, t).unwrap(), k, 1e-8), "d={d} K");
            assert!(close(kh.h(t, t, t).unwrap(), h, 1e-8), "d={d} H");
        }
    }
}

#[test]
fn k_is_homogeneous_in_the_conformal_factor() {
    let kh = kh_conformal(3.0, parse_function("exp(t)").unwrap()).unwrap();
    let dev = homogeneity_check(&kh, &[(0.5, 1.3), (2.0, 0.7), (1.1, 1.1)]).unwrap();
    assert!(dev < 1e-10, "{dev}");
}

fn dim_two_metrics() -> Vec<FunctionalMetric> {
    let entry = |s: &str| parse_function(s).unwrap();
    let general = |a: &str, b: &str, c: &str| {
        FunctionalMetric::general(
            MatrixFunction::new(vec![vec![entry(a), entry(b)], vec![entry(b), entry(c)]]).unwrap(),
        )
    };
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    vec![
        FunctionalMetric::conformal(entry("exp(-t)"), spd(2, &mut rng)).unwrap(),
        FunctionalMetric::conformal(entry("2 + sin(t)"), spd(2, &mut rng)).unwrap(),
        FunctionalMetric::doubly_twisted(entry("exp(t)"), entry("exp(-t)"), spd(1, &mut rng), spd(1, &mut rng))
            .unwrap(),
        FunctionalMetric::doubly_twisted(entry("1 + t^2"), entry("2 + cos(t)"), spd(1, &mut rng), spd(1, &mut rng))
            .unwrap(),
        FunctionalMetric::twisted(entry("exp(t)"), spd(1, &mut rng), spd(1, &mut rng)).unwrap(),
        general("2 + sin(t)", "0.3*t", "exp(t/2)"),
        general("exp(t)", "0.5", "1"),
        general("1.5 + 0.5*cos(2*t)", "0.2*sin(t)", "1 + t^2"),
        general("exp(t)", "0.4*exp(t)", "exp(t) + 1"),
        general("3 + t", "sin(t)", "2 - t"),
    ]
}

#[test]
fn gauss_bonnet_holds_on_every_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let (mut pos, mut neg, mut deg) = (0, 0, 0);
    for m in dim_two_metrics() {
        let report = gauss_bonnet_check(&m, -0.9, 0.9, 500, &mut rng).unwrap();
        assert!(report.max_abs <= 1e-9, "{:?} {:?}", m.kind(), report);
        pos += report.positive;
        neg += report.negative;
        deg += report.degenerate;
    }
    assert!(pos > 0 && neg > 0 && deg > 0, "{pos} {neg} {deg}");
}

#[test]
fn gauss_bonnet_fails_in_dimension_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let m = FunctionalMetric::conformal(parse_function("exp(-t)").unwrap(), spd(3, &mut rng)).unwrap();
    let kernel = total_curvature_kernel(&m, QuadratureSpec::default());
    assert!(kernel.f_s(0.1, 0.6).unwrap().amax() > 1e-3);
}

#[test]
fn twisted_example_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for (r, s) in [(1usize, 1usize), (2, 2), (3, 1), (5, 2)] {
        let g = spd(r, &mut rng);
        let gt = spd(s, &mut rng);
        let sq = (g.determinant() * gt.determinant()).sqrt();
        let gi = g.clone().try_inverse().unwrap();
        let gti = gt.clone().try_inverse().unwrap();
        let m = FunctionalMetric::twisted(parse_function("t").unwrap(), g, gt).unwrap();
        let kernel = total_curvature_kernel(&m, QuadratureSpec::default());
        for _ in 0..3 {
            let x: f64 = rng.gen_range(0.4..2.5);
            let y: f64 = rng.gen_range(0.4..2.5);
            let got = kernel.f_s(x, y).unwrap();
            let top = &gi * (sq * twisted_fs(r as f64, x, y));
            let bottom = &gti * (sq * twisted_fs_tilde(r as f64, x, y));
            let scale = got.amax().max(1e-3);
            assert!((got.view((0, 0), (r, r)) - top).amax() <= 1e-9 * scale, "r={r} F_S");
            assert!((got.view((r, r), (s, s)) - bottom).amax() <= 1e-9 * scale, "r={r} F~_S");
        }
    }
}

#[test]
fn doubly_twisted_example_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let (fs, fts) = ("exp(-t) + 0.3", "1 + t^2");
    let (f, ft) = (parse_function(fs).unwrap(), parse_function(fts).unwrap());
    let g = spd(2, &mut rng);
    let gt = spd(2, &mut rng);
    let m = FunctionalMetric::doubly_twisted(f.clone(), ft.clone(), g.clone(), gt.clone()).unwrap();
    let kernel = total_curvature_kernel(&m, QuadratureSpec::default());
    for _ in 0..10 {
        let t0: f64 = rng.gen_range(-1.0..1.0);
        let t1: f64 = rng.gen_range(-1.0..1.0);
        let got = kernel.f_s(t0, t1).unwrap();
        let want = doubly_twisted_fs(t0, t1, &f, &ft, &g, &gt).unwrap();
        assert!((&got - &want).amax() <= 1e-9 * want.amax().max(1e-3), "{got} {want}");
    }
}

#[test]
fn kernel_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let m = FunctionalMetric::general(
        MatrixFunction::new(vec![
            vec![parse_function("2 + sin(t)").unwrap(), parse_function("0.2*t").unwrap(), parse_function("0").unwrap()],
            vec![parse_function("0.2*t").unwrap(), parse_function("exp(t/2)").unwrap(), parse_function("0.1").unwrap()],
            vec![parse_function("0").unwrap(), parse_function("0.1").unwrap(), parse_function("1 + t^2").unwrap()],
        ])
        .unwrap(),
    );
    let kernel = total_curvature_kernel(&m, QuadratureSpec::default());
    for _ in 0..3 {
        let t0: f64 = rng.gen_range(-0.8..0.8);
        let t1: f64 = rng.gen_range(-0.8..0.8);
        let a = kernel.f_s(t0, t1).unwrap();
        let b = kernel.f_s(t1, t0).unwrap().transpose();
        assert!((&a - &b).amax() <= 1e-8 * a.amax(), "{a} {b}");
    }
}
