use std::collections::HashMap;

use nctori_core::contraction_ir::{delta_symbol, laplace_type_symbol, symbol_multiply, IndexVar, LaplaceShape, SymbolExpr};
use nctori_core::nctorus::{check_identities, IrRealization, NcElement, NcTorus};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn realization(d: usize, seed: u64) -> IrRealization {
    realization_of_degree(d, 2, seed)
}

fn realization_of_degree(d: usize, degree: u32, seed: u64) -> IrRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let torus = NcTorus::random(d, &mut rng);
    let h = NcElement::random_selfadjoint(&torus, 3, 1, &mut rng).scale(Complex64::new(0.5, 0.0));
    IrRealization::random(h, degree, &mut rng)
}

fn no_fixed() -> HashMap<IndexVar, usize> {
    HashMap::new()
}

#[test]
fn identities_hold_on_one_hundred_instances_per_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let reports = check_identities(&[2, 3], 100, &mut rng).unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert_eq!(r.instances, 200);
        assert!(r.max_deviation <= 1e-12, "{r:?}");
    }
}

#[test]
fn ir_delta_matches_algebra_derivation() {
    let shapes = [
        LaplaceShape::default(),
        LaplaceShape { p1: false, p0: false, p2_constant: false },
        LaplaceShape { p1: true, p0: true, p2_constant: true },
    ];
    let dir = IndexVar(60);
    for (k, shape) in shapes.into_iter().enumerate() {
        for d in [2, 3] {
            let real = realization(d, 100 + k as u64 * 10 + d as u64);
            let p = laplace_type_symbol(shape);
            let dp = delta_symbol(&p, dir).unwrap();
            let base = real.realize(&p, &no_fixed()).unwrap();
            for j in 0..d {
                let got = real.realize(&dp, &HashMap::from([(dir, j)])).unwrap();
                let want = base.derivation(j);
                assert!(got.distance(&want) < 1e-12, "shape {k}, d {d}, j {j}: {}", got.distance(&want));
            }
        }
    }
}

#[test]
fn ir_second_delta_matches_algebra() {
    let real = realization(2, 7);
    let p = laplace_type_symbol(LaplaceShape::default());
    let (x, y) = (IndexVar(60), IndexVar(61));
    let dp = delta_symbol(&delta_symbol(&p, x).unwrap(), y).unwrap();
    let base = real.realize(&p, &no_fixed()).unwrap();
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let got = real.realize(&dp, &HashMap::from([(x, i), (y, j)])).unwrap();
        assert!(got.distance(&base.derivation(i).derivation(j)) < 1e-11);
    }
}

#[test]
fn ir_product_matches_algebra_product() {
    let cases = [(2, LaplaceShape::default()), (3, LaplaceShape { p1: false, p0: false, p2_constant: false })];
    for (d, shape) in cases {
        let real = realization_of_degree(d, 1, 40 + d as u64);
        let p = laplace_type_symbol(shape);
        let dp = delta_symbol(&p, IndexVar(60)).unwrap();
        let fixed = HashMap::from([(IndexVar(60), d - 1)]);
        let a = real.realize(&p, &no_fixed()).unwrap();
        let b = real.realize(&dp, &fixed).unwrap();
        let ab: SymbolExpr = symbol_multiply(&p, &p);
        let got = real.realize(&ab, &no_fixed()).unwrap();
        assert!(got.distance(&(&a * &a)) < 1e-11, "d {d}");
        let got = real.realize(&symbol_multiply(&dp, &p), &fixed).unwrap();
        assert!(got.distance(&(&b * &a)) < 1e-11, "d {d}");
    }
}

#[test]
fn a_dropped_term_breaks_the_delta_check() {
    let real = realization(2, 5);
    let p = laplace_type_symbol(LaplaceShape::default());
    let dir = IndexVar(60);
    let dp = delta_symbol(&p, dir).unwrap();
    let mut terms: Vec<_> = dp.terms().cloned().collect();
    terms.remove(0);
    let broken = SymbolExpr::from_terms(terms);
    let got = real.realize(&broken, &HashMap::from([(dir, 0)])).unwrap();
    let want = real.realize(&p, &no_fixed()).unwrap().derivation(0);
    assert!(got.distance(&want) > 1e-3);
}
