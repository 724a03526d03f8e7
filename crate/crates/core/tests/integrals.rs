use geoweb::integrals::QuadraticIntegral;
use geoweb::surface::{Chart, IntegratorConfig, LiouvilleMetric, StopCondition};
use geoweb::webs::liouville_web;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn elliptic() -> LiouvilleMetric {
    LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.2, 3.0), (-4.0, 4.0))).unwrap()
}

proptest! {
    #[test]
    fn mu_is_invariant_under_velocity_scaling(
        u in 0.3f64..2.5, v in -3.0f64..3.0, th in 0.0f64..TAU, k in prop_oneof![-50.0f64..-1e-3, 1e-3f64..50.0],
    ) {
        let m = elliptic();
        let qi = QuadraticIntegral::new(&m);
        let a = qi.mu_at(u, v, th.cos(), th.sin()).unwrap();
        let b = qi.mu_at(u, v, k * th.cos(), k * th.sin()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn pencil_is_linear_in_mu(
        u in 0.3f64..2.5, v in -3.0f64..3.0, du in -2.0f64..2.0, dv in 0.1f64..2.0, mu in -5.0f64..5.0, nu in -5.0f64..5.0,
    ) {
        let m = elliptic();
        let qi = QuadraticIntegral::new(&m);
        let s = m.phase_point(u, v, du, dv).unwrap();
        let g = m.norm2(&s).unwrap();
        let (im, inu) = (qi.pencil(mu).eval(&s).unwrap(), qi.pencil(nu).eval(&s).unwrap());
        let scale = 1.0 + g * (mu.abs() + nu.abs()) + qi.i0(&s).unwrap().abs();
        prop_assert!((im - (mu * g + qi.i0(&s).unwrap())).abs() <= 1e-14 * scale);
        prop_assert!((im - inu - (mu - nu) * g).abs() <= 1e-13 * scale);
    }

    #[test]
    fn the_extracted_mu_annihilates_the_pencil(u in 0.3f64..2.5, v in -3.0f64..3.0, th in 0.0f64..TAU) {
        let m = elliptic();
        let qi = QuadraticIntegral::new(&m);
        let s = m.phase_point(u, v, th.cos(), th.sin()).unwrap();
        let mu = qi.mu_of_direction(&s).unwrap();
        let scale = 1.0 + qi.i0(&s).unwrap().abs();
        prop_assert!(qi.pencil(mu).eval(&s).unwrap().abs() <= 1e-13 * scale);
    }

    #[test]
    fn net_directions_round_trip(u in 0.3f64..2.5, v in -3.0f64..3.0, t in 0.0f64..1.0) {
        let m = elliptic();
        let qi = QuadraticIntegral::new(&m);
        let c = m.coeffs(u, v).unwrap();
        // Any μ in [−b², a²] has real net directions.
        let mu = -c.b2() + t * (c.a2() + c.b2());
        let d = qi.net_directions(u, v, mu).unwrap();
        for (du, dv) in [d.minus, d.plus] {
            prop_assert!((qi.mu_at(u, v, du, dv).unwrap() - mu).abs() <= 1e-12 * (1.0 + mu.abs()));
        }
    }

    #[test]
    fn real_directions_exist_iff_both_radicands_are_nonnegative(u in 0.3f64..2.5, v in -3.0f64..3.0, mu in -12.0f64..12.0) {
        let m = elliptic();
        let c = m.coeffs(u, v).unwrap();
        let real = QuadraticIntegral::new(&m).net_directions(u, v, mu).is_ok();
        prop_assert_eq!(real, c.a2() - mu >= 0.0 && c.b2() + mu >= 0.0);
    }
}

#[test]
fn mu_at_mu_zero_follows_the_net_fields() {
    // At μ = 0 the net directions are the leaves of the web's P = b/a.
    let m = elliptic();
    let w = liouville_web(&m);
    let qi = QuadraticIntegral::new(&m);
    for (u, v) in [(0.5, 0.3), (1.0, 1.2), (2.0, -2.0)] {
        let d = qi.net_directions(u, v, 0.0).unwrap();
        let p = w.jets(u, v).unwrap().p.v;
        assert!((d.plus.1 / d.plus.0 - p.abs()).abs() < 1e-12);
        assert!((d.minus.1 / d.minus.0 + p.abs()).abs() < 1e-12);
    }
}

#[test]
fn mu_is_constant_along_geodesics() {
    let m = elliptic();
    let qi = QuadraticIntegral::new(&m);
    let cfg = IntegratorConfig::default();
    for th in [0.2, 1.0, 2.2, 4.0] {
        let s = m.normalize(&m.phase_point(1.3, 0.4, f64::cos(th), f64::sin(th)).unwrap()).unwrap();
        let seg = m.integrate(&s, StopCondition::ArcLength(2.0), &cfg).unwrap();
        let mu0 = qi.mu_of_direction(&s).unwrap();
        for y in seg.states() {
            let mu = qi.mu_at(y[0], y[1], y[2], y[3]).unwrap();
            assert!((mu - mu0).abs() / mu0.abs() <= 1e-8);
        }
    }
}
