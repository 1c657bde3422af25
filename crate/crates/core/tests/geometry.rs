use canvar::catalog::{berger_sphere, product, round_sphere};
use canvar::geometry::{ChartManifold, ManifoldRep};
use proptest::prelude::*;

fn wavy() -> ChartManifold<f64> {
    ChartManifold::from_strings(
        "wavy",
        &["x", "y", "z"],
        vec![-1.0; 3],
        vec![1.0; 3],
        &["2 + sin(x*y)", "0.3*cos(z)", "0.1*x", "1 + y^2", "0.2*sin(x+z)", "exp(0.3*y)"],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riemann_symmetries(x in -0.9f64..0.9, y in -0.9f64..0.9, z in -0.9f64..0.9) {
        let k = wavy().curvature(&[x, y, z]).unwrap();
        let scale = (0..81).map(|i| k.r(i / 27, i / 9 % 3, i / 3 % 3, i % 3).abs()).fold(1.0, f64::max);
        prop_assert!(k.symmetry_residual() <= 1e-11 * scale);
        prop_assert!(k.bianchi_residual() <= 1e-11 * scale);
        let ric = &k.ricci;
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((ric.get(i, j) - ric.get(j, i)).abs() <= 1e-11 * scale);
            }
        }
    }

    #[test]
    fn sectional_is_scale_invariant(s in 0.2f64..3.0, t in -2.0f64..2.0) {
        let k = wavy().curvature(&[0.1, -0.2, 0.3]).unwrap();
        let (x, y) = ([1.0, 0.5, -0.2], [0.0, 1.0, 0.7]);
        let a = k.sectional(&x, &y).unwrap();
        let y2: Vec<f64> = y.iter().zip(x).map(|(b, a)| s * b + t * a).collect();
        let x2: Vec<f64> = x.iter().map(|v| s * v).collect();
        prop_assert!((k.sectional(&x2, &y2).unwrap() - a).abs() <= 1e-10 * a.abs().max(1.0));
    }
}

#[test]
fn product_curvature_splits() {
    let s2 = round_sphere::<f64>(2, 1.0).unwrap();
    let m: ManifoldRep<f64> = product(&s2, &s2).unwrap().into();
    let k = m.curvature(&[1.0, 0.4, 1.2, 2.7]).unwrap();
    for i in 0..2 {
        for j in 2..4 {
            assert!(k.ricci.get(i, j).abs() <= 1e-12);
            assert!(k.r(i, j, j, i).abs() <= 1e-12);
        }
    }
}

#[test]
fn berger_scalar_curvature() {
    // scal = 2ε + 2(4 − 2ε) for the frame normalized so ε = 1 is round
    for eps in [0.5, 1.0, 2.0] {
        let m: ManifoldRep<f64> = berger_sphere(eps).unwrap().into();
        let k = m.curvature(&[]).unwrap();
        let scal: f64 = (0..3).map(|i| k.ricci.get(i, i) / k.g.get(i, i)).sum();
        assert!((scal - (8.0 - 2.0 * eps)).abs() <= 1e-10, "{eps}: {scal}");
    }
}
