use geoweb::dual::cone::{cone_fit, tangency_pair, wall_points};
use geoweb::dual::poncelet::sym_covector;
use geoweb::dual::{
    conic_value, dual_point, dual_point_special, incidence_plane, max_abs_normalize, project_to_quadric,
    quadric_residual, DualError, EpsSurface, GeodesicConic, Orientation, PlaneConic, PonceletSystem, Vec4,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

#[test]
fn thousand_random_dual_points_lie_on_the_quadric() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let eps = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let k = rng.gen_range(0.05f64..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let l = rng.gen_range(-5.0..5.0);
        let x = dual_point(k, l, eps).unwrap();
        assert!(quadric_residual(&max_abs_normalize(&x), eps).abs() <= 1e-14);
    }
}

#[test]
fn example_geodesic_and_its_dual_point() {
    let s = EpsSurface::new(1.0, 0.1).unwrap();
    let g = s.geodesic_through(1.0, 0.0, 2.0).unwrap();
    let GeodesicConic::Regular { k, l } = g else { panic!("{g:?}") };
    assert!((k + 0.75).abs() < 1e-15 && (l - 2.0 / 3.0).abs() < 1e-15);
    let x = s.dual_point(g).unwrap();
    let want = Vec4::new(3.0, -2.0, -4.0, 4.0);
    assert!((x / x[3] - want / 4.0).norm() < 1e-15);
    assert!((incidence_plane(1.0, 0.0) - Vec4::new(0.0, 0.0, 1.0, 1.0)).norm() == 0.0);
    assert!(incidence_plane(1.0, 0.0).dot(&want).abs() < 1e-15);
    assert!(matches!(s.geodesic_through(1.0, 0.0, 1.0), Err(DualError::DegenerateK)));
    assert_eq!(dual_point_special(0.0), Vec4::new(1.0, 0.0, 0.0, 0.0));
}

proptest! {
    #[test]
    fn incidence_is_dual_to_the_conic_equation(
        z in 0.3f64..3.0, y in -2.0f64..2.0, slope in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0], e in prop::bool::ANY,
    ) {
        let eps = if e { 1.0 } else { -1.0 };
        let s = EpsSurface::new(eps, 0.0).unwrap();
        let Ok(g) = s.geodesic_through(z, y, slope) else { return Ok(()) };
        let l = max_abs_normalize(&s.dual_point(g).unwrap());
        let pi = incidence_plane(z, y);
        prop_assert!(pi.dot(&l).abs() <= 1e-10 * pi.norm());
        prop_assert!(conic_value(&l, z, y).abs() <= 1e-10 * pi.norm());
        // Off the geodesic the pairing is the conic equation itself.
        let (z1, y1) = (z + 0.5, y - 0.25);
        prop_assert!((incidence_plane(z1, y1).dot(&l) - conic_value(&l, z1, y1)).abs() <= 1e-12);
        prop_assert!(conic_value(&l, z1, y1).abs() > 1e-6);
    }

    #[test]
    fn projection_removes_drift_off_the_quadric(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0) {
        for eps in [1.0, -1.0] {
            // Drift of the size accumulated by round-off; one Newton step leaves O(drift²).
            let x = dual_point(0.7, 0.2, eps).unwrap() + Vec4::new(a, b, c, d) * 1e-8;
            prop_assert!(quadric_residual(&max_abs_normalize(&project_to_quadric(&x, eps)), eps).abs() <= 1e-12);
        }
    }

    #[test]
    fn incidence_planes_touch_c0(z in 0.1f64..5.0, y in -5.0f64..5.0) {
        let c0 = PlaneConic::c0(1.0);
        let (r, q) = c0.tangency(&incidence_plane(z, y)).unwrap();
        prop_assert!(r.abs() <= 1e-12);
        prop_assert!(incidence_plane(z, y).dot(&q).abs() <= 1e-10 * q.norm());
        prop_assert!(quadric_residual(&max_abs_normalize(&q), 1.0).abs() <= 1e-10);
    }

    #[test]
    fn poncelet_steps_keep_the_invariants(theta in 0.0f64..TAU) {
        let cw = sym_covector(0.5, -0.2, 0.0, 1.0);
        let sys = PonceletSystem::new(-1.0, sym_covector(0.2, 0.0, 0.0, 1.0), cw, 1).unwrap();
        let mut s = sys.start(theta, Orientation::Positive).unwrap();
        for _ in 0..20 {
            let next = sys.step(&s).unwrap().state;
            let back = sys.step_back(&next).unwrap().state;
            let d = (back.l / back.l.norm() - s.l / s.l.norm()).norm().min((back.l / back.l.norm() + s.l / s.l.norm()).norm());
            prop_assert!(d <= 1e-9);
            prop_assert!(sys.plane_residual(&next.pi).unwrap() <= 1e-8);
            prop_assert!(quadric_residual(&next.l, -1.0).abs() <= 1e-10);
            prop_assert!(sys.caustic().plane.dot(&next.l).abs() <= 1e-10 * sys.caustic().plane.norm());
            prop_assert!(next.pi.dot(&next.l).abs() <= 1e-10 * next.pi.norm());
            s = next;
        }
    }
}

#[test]
fn random_planes_are_not_tangent_to_c0() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c0 = PlaneConic::c0(1.0);
    for _ in 0..100 {
        let pi = Vec4::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0);
        assert!(c0.tangency(&pi).unwrap().0.abs() > 1e-8);
    }
}

#[test]
fn cone_needs_three_samples() {
    let c0 = PlaneConic::c0(1.0);
    let cw = PlaneConic::new(sym_covector(0.5, -0.2, 0.1, 1.0), 1.0).unwrap();
    let ys: Vec<f64> = (0..121).map(|i| -3.0 + 6.0 * i as f64 / 120.0).collect();
    let pts = wall_points(&cw, &ys, 1);
    let pairs: Vec<_> = pts.iter().take(2).map(|&(z, y)| tangency_pair(&c0, &cw, z, y).unwrap()).collect();
    assert!(matches!(cone_fit(&pairs), Err(DualError::InsufficientSamples(2))));
}

#[test]
fn eps_geodesics_follow_their_conics() {
    let s = EpsSurface::new(1.0, 0.1).unwrap();
    let g = s.geodesic_through(1.0, 0.0, 2.0).unwrap();
    let curve = s.integrate_curve(1.0, 0.0, 2.0f64.atan(), 1.5).unwrap();
    for p in &curve {
        assert!(s.conic_residual(g, p[0], p[1]).abs() <= 1e-8);
    }
    let flat = s.integrate_geodesic(1.0, 0.3, 0.0, 0.5).unwrap();
    assert!(flat.iter().all(|p| p[1] == 0.3));
}
