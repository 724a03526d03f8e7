use geoweb::integrals::{clairaut_eval, QuadraticIntegral};
use geoweb::numeric::ode::Direction;
use geoweb::surface::{Chart, ClairautMetric, Coord, IntegratorConfig, LiouvilleMetric, StopCondition, SurfaceError};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn torus() -> LiouvilleMetric {
    let chart = Chart::rect((0.0, 1.0), (0.0, 1.0)).with_u_period(TAU).with_v_period(TAU);
    LiouvilleMetric::parse("2 + sin(u)", "1.5 + cos(v)", chart).unwrap()
}

fn elliptic() -> LiouvilleMetric {
    LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.2, 3.0), (-4.0, 4.0))).unwrap()
}

fn flat() -> LiouvilleMetric {
    LiouvilleMetric::parse("1", "1", Chart::rect((-10.0, 10.0), (-10.0, 10.0))).unwrap()
}

#[test]
fn hamiltonian_examples() {
    let s = flat().phase_point(0.0, 0.0, 1.0, 0.0).unwrap();
    assert_eq!(flat().hamiltonian(&s).unwrap(), 1.0);
    let m = elliptic();
    let s = m.phase_point(1.0, PI / 2.0, 0.0, 1.0).unwrap();
    let want = 0.5 * (1.0f64.sinh().powi(2) + 1.0);
    assert!((m.hamiltonian(&s).unwrap() - want).abs() < 1e-15);
    assert!((want - 1.19054).abs() < 1e-5);
    assert!(matches!(m.phase_point(1.0, 0.0, 0.0, 0.0), Err(SurfaceError::ZeroVelocity)));
}

/// Christoffel symbols of `Λ(du² + dv²)` from central differences of `Λ`.
fn christoffel_acceleration(m: &LiouvilleMetric, u: f64, v: f64, du: f64, dv: f64) -> (f64, f64) {
    let h = 1e-5;
    let l = m.lambda(u, v).unwrap();
    let lu = (m.lambda(u + h, v).unwrap() - m.lambda(u - h, v).unwrap()) / (2.0 * h);
    let lv = (m.lambda(u, v + h).unwrap() - m.lambda(u, v - h).unwrap()) / (2.0 * h);
    let (fu, fv) = (lu / (2.0 * l), lv / (2.0 * l));
    (-fu * du * du - 2.0 * fv * du * dv + fu * dv * dv, fv * du * du - 2.0 * fu * du * dv - fv * dv * dv)
}

#[test]
fn acceleration_matches_christoffel_oracle() {
    let m = elliptic();
    for (u, v, du, dv) in [(1.0, 1.0, 1.0, 0.0), (1.0, 1.0, 0.0, 1.0), (0.7, -2.0, 0.3, -0.8)] {
        let r = m.geodesic_rhs(&m.phase_point(u, v, du, dv).unwrap()).unwrap();
        let (au, av) = christoffel_acceleration(&m, u, v, du, dv);
        assert!((r[2] - au).abs() < 1e-8 && (r[3] - av).abs() < 1e-8, "{r:?} vs {au} {av}");
    }
    let r = flat().geodesic_rhs(&flat().phase_point(0.3, 0.2, 0.4, 0.5).unwrap()).unwrap();
    assert_eq!((r[2], r[3]), (0.0, 0.0));
}

#[test]
fn energy_drift_over_length_100() {
    let m = torus();
    let cfg = IntegratorConfig::default();
    for (u, v, th) in [(0.1, 0.2, 0.3), (2.0, 4.0, 1.9), (5.0, 1.0, -2.5)] {
        let s = m.normalize(&m.phase_point(u, v, f64::cos(th), f64::sin(th)).unwrap()).unwrap();
        let seg = m.integrate(&s, StopCondition::ArcLength(100.0), &cfg).unwrap();
        let h0 = m.hamiltonian(&s).unwrap();
        for y in seg.states() {
            let h = m.hamiltonian(&m.phase_of_state(y).unwrap()).unwrap();
            assert!((h - h0).abs() / h0 <= 1e-9, "drift {}", (h - h0).abs() / h0);
        }
        assert!(seg.times().windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn flat_geodesics_are_straight() {
    let m = flat();
    let s = m.phase_point(0.0, 0.0, 1.0, 0.4).unwrap();
    let seg = m.integrate(&s, StopCondition::ArcLength(8.0), &IntegratorConfig::default()).unwrap();
    let d = (s.du.hypot(s.dv), s.du, s.dv);
    for y in seg.states() {
        let cross = (y[0] * d.2 - y[1] * d.1) / d.0;
        assert!(cross.abs() <= 1e-10);
    }
}

#[test]
fn flat_level_event_lands_on_the_locus() {
    let m = flat();
    let s = m.phase_point(0.0, 0.0, 1.0, 1.0).unwrap();
    let stop = StopCondition::Level { coord: Coord::V, value: 1.0, direction: Direction::Rising };
    let end = m.integrate(&s, stop, &IntegratorConfig::default()).unwrap().end_state();
    assert!((end[0] - 1.0).abs() <= 1e-12 && (end[1] - 1.0).abs() <= 1e-12);
    let stop = StopCondition::Level { coord: Coord::U, value: 20.0, direction: Direction::Either };
    assert!(matches!(m.integrate(&s, stop, &IntegratorConfig::default()), Err(SurfaceError::EventNotFound { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversal_returns_to_start(u in 0.8f64..1.6, v in -1.0f64..1.0, th in 0.0f64..TAU, len in 0.5f64..3.0) {
        let m = elliptic();
        let cfg = IntegratorConfig::default();
        let s = m.normalize(&m.phase_point(u, v, th.cos(), th.sin()).unwrap()).unwrap();
        let Ok(seg) = m.integrate(&s, StopCondition::ArcLength(len), &cfg) else { return Ok(()) };
        let e = seg.end_state();
        let back = m.phase_point(e[0], e[1], -e[2], -e[3]).unwrap();
        let r = m.integrate(&back, StopCondition::ArcLength(len), &cfg).unwrap().end_state();
        prop_assert!((r[0] - u).hypot(r[1] - v) <= 1e-7);
    }

    #[test]
    fn quadratic_integral_and_mu_are_conserved(u in 0.8f64..1.6, v in -1.0f64..1.0, th in 0.0f64..TAU) {
        let m = elliptic();
        let qi = QuadraticIntegral::new(&m);
        let s = m.normalize(&m.phase_point(u, v, th.cos(), th.sin()).unwrap()).unwrap();
        let Ok(seg) = m.integrate(&s, StopCondition::ArcLength(3.0), &IntegratorConfig::default()) else { return Ok(()) };
        let (i0, mu0) = (qi.i0(&s).unwrap(), qi.mu_of_direction(&s).unwrap());
        let scale = i0.abs().max(1e-3);
        for y in seg.states() {
            let p = m.phase_of_state(y).unwrap();
            prop_assert!((qi.i0(&p).unwrap() - i0).abs() / scale <= 1e-8);
            prop_assert!((qi.mu_of_direction(&p).unwrap() - mu0).abs() / mu0.abs().max(1e-3) <= 1e-8);
        }
    }
}

#[test]
fn clairaut_integral_is_conserved() {
    let m = ClairautMetric::parse("cosh(v)^2", Chart::rect((-50.0, 50.0), (-4.0, 4.0))).unwrap();
    let cfg = IntegratorConfig::default();
    for th in [0.3, 1.2, 2.0, 2.9] {
        let (du, dv) = (f64::cos(th), f64::sin(th));
        let traj = m.integrate(0.0, 0.2, du, dv, 3.0, &cfg).unwrap();
        let y0 = traj.y[0];
        let p0 = clairaut_eval(&m, y0[0], y0[1], y0[2], y0[3]).unwrap();
        for y in &traj.y {
            let p = clairaut_eval(&m, y[0], y[1], y[2], y[3]).unwrap();
            assert!((p - p0).abs() / p0.abs() <= 1e-8);
        }
    }
}

#[test]
fn meridians_keep_zero_clairaut_integral() {
    let m = ClairautMetric::parse("cosh(v)^2", Chart::rect((-50.0, 50.0), (-4.0, 4.0))).unwrap();
    let traj = m.integrate(1.0, -1.0, 0.0, 1.0, 2.0, &IntegratorConfig::default()).unwrap();
    for y in &traj.y {
        assert_eq!(clairaut_eval(&m, y[0], y[1], y[2], y[3]).unwrap(), 0.0);
        assert_eq!(y[0], 1.0);
    }
    let flat = ClairautMetric::parse("1", Chart::rect((-5.0, 5.0), (-5.0, 5.0))).unwrap();
    assert_eq!(clairaut_eval(&flat, 0.0, 0.0, 0.6, 0.8).unwrap(), 0.6);
}
