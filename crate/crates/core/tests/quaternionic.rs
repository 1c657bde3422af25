use canvar::catalog::{
    bullet_action, freeness_check, h, h_tilde, project_to_sp2, random_sp2, random_unit_quat, star_action, wilhelm_action,
    Sp2Element, Sp2mElement,
};
use canvar::numerics::{seeded_rng, Quaternion};
use proptest::prelude::*;

type Q = Quaternion<f64>;

fn quat(seed: u64) -> Q {
    random_unit_quat(&mut seeded_rng(seed))
}

#[test]
fn actions_commute_on_1000_samples() {
    let mut rng = seeded_rng(9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m: Sp2Element<f64> = canvar::catalog::random_sp2_from(&mut rng);
        let (q, r) = (random_unit_quat(&mut rng), random_unit_quat(&mut rng));
        let ab = bullet_action(q, &star_action(r, &m).unwrap()).unwrap();
        let ba = star_action(r, &bullet_action(q, &m).unwrap()).unwrap();
        worst = worst.max(ab.dist(&ba));
    }
    assert!(worst <= 1e-13, "{worst}");
}

#[test]
fn freeness_on_many_samples() {
    let r = freeness_check(100_000, 17).unwrap();
    assert!(r.bullet_min_ratio > 0.1, "{r:?}");
    assert!(r.star_min_ratio > 0.1, "{r:?}");
    assert!(r.wilhelm_min_ratio > 0.1, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn actions_preserve_constraints(s in 0u64..1_000_000, t in 0u64..1_000_000) {
        let m: Sp2Element<f64> = random_sp2(s);
        let q = quat(t);
        prop_assert!(bullet_action(q, &m).unwrap().constraint_residual() <= 1e-13);
        prop_assert!(star_action(q, &m).unwrap().constraint_residual() <= 1e-13);
        let w: Sp2mElement<f64> = Sp2mElement::random(3, s).unwrap();
        let qs = [q, quat(t + 1), quat(t + 2)];
        prop_assert!(wilhelm_action(&qs, &w).unwrap().constraint_residual().unwrap() <= 1e-12);
    }

    #[test]
    fn hopf_maps_land_on_the_sphere(s in 0u64..1_000_000) {
        let (r1, r2) = random_sp2::<f64>(s).rows();
        for u in [r1, r2] {
            prop_assert!((h(&u).unwrap().norm_sqr() - 1.0).abs() <= 1e-13);
            prop_assert!((h_tilde(&u).unwrap().norm_sqr() - 1.0).abs() <= 1e-13);
        }
    }

    #[test]
    fn projection_is_stable(s in 0u64..1_000_000, t in 0u64..1_000_000) {
        let m: Sp2Element<f64> = random_sp2(s);
        let d = quat(t).scale(1e-8);
        let pert = Sp2Element { a: m.a + d, b: m.b - d, c: m.c + d.conj(), d: m.d };
        let p = project_to_sp2(&pert).unwrap();
        prop_assert!(p.constraint_residual() <= 1e-13);
        prop_assert!(p.dist(&m) <= 1e-7);
    }
}
