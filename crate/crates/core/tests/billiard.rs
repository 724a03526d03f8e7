use geoweb::billiard::{max_relative_mu_drift, BilliardTable};
use geoweb::integrals::QuadraticIntegral;
use geoweb::surface::StopCondition;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn table() -> BilliardTable {
    BilliardTable::elliptic(1.0).unwrap()
}

#[test]
fn confocal_caustics_are_monotone_in_mu() {
    let t = table();
    let sh2 = 1.0f64.sinh().powi(2);
    // μ > 0: confocal ellipses u = asinh √μ.
    let us: Vec<f64> = (1..=50)
        .map(|j| {
            let mu = sh2 * j as f64 / 51.0;
            let c = t.caustic_of(mu).unwrap();
            let r = c.roots.iter().copied().fold(f64::MIN, f64::max);
            assert!((r.sinh().powi(2) - mu).abs() <= 1e-12);
            r
        })
        .collect();
    assert!(us.windows(2).all(|w| w[1] > w[0]));
    // μ < 0: confocal hyperbolae sin² v = −μ; the first root grows with |μ|.
    let vs: Vec<f64> = (1..=50)
        .map(|j| {
            let mu = -(j as f64) / 51.0;
            let c = t.caustic_of(mu).unwrap();
            let r = c.roots.iter().copied().filter(|r| *r > 0.0).fold(f64::MAX, f64::min);
            assert!((r.sin().powi(2) + mu).abs() <= 1e-12);
            r
        })
        .collect();
    assert!(vs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn time_reversal_retraces_the_bounces() {
    let t = table();
    let start = t.launch(1.0, 0.9, 0.7).unwrap();
    let n = 12;
    let fwd = t.run(&start, n).unwrap();
    let last = fwd.last().unwrap();
    let m = t.metric();
    let back = m.phase_point(last.u, last.v, -last.du_in, -last.dv_in).unwrap();
    let rev = t.run(&back, n).unwrap();
    let wrap = |d: f64| (d + PI).rem_euclid(TAU) - PI;
    for j in 0..n - 1 {
        let (a, b) = (&rev[j], &fwd[n - 2 - j]);
        assert!((a.u - b.u).abs() <= 1e-5 && wrap(a.v - b.v).abs() <= 1e-5, "bounce {j}");
    }
    let end = &rev[n - 1];
    assert!((end.u - start.u).abs() <= 1e-5 && wrap(end.v - start.v).abs() <= 1e-5);
}

#[test]
fn segments_miss_the_caustics_of_other_mu() {
    let t = table();
    let qi = QuadraticIntegral::new(t.metric());
    let s = t.launch(1.0, 0.4, 0.9).unwrap();
    let mu = qi.mu_of_direction(&s).unwrap();
    let rec = &t.run(&s, 1).unwrap()[0];
    let seg = t.metric().integrate(&s, StopCondition::ArcLength(rec.arc_len), &t.cfg).unwrap();
    let own = t.caustic_of(mu).unwrap();
    assert!(t.tangency_residual(&seg, &own).unwrap().unwrap() <= 1e-6);
    for other in [0.5 * mu, 0.8 * mu, 1.3 * mu] {
        let c = t.caustic_of(other).unwrap();
        let gap = (own.nearest(1.0).unwrap() - c.nearest(1.0).unwrap()).abs();
        assert!(t.tangency_residual(&seg, &c).unwrap().unwrap() >= gap / 2.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reflection_preserves_mu(along in 0.0f64..TAU, angle in 0.1f64..3.0) {
        let t = table();
        let s = t.launch(1.0, along, angle).unwrap();
        let qi = QuadraticIntegral::new(t.metric());
        let recs = t.run(&s, 10).unwrap();
        for r in &recs {
            prop_assert!((r.mu_in - r.mu_out).abs() <= 1e-10 * (1.0 + r.mu_in.abs()));
        }
        prop_assert!(max_relative_mu_drift(qi.mu_of_direction(&s).unwrap(), &recs) <= 1e-6);
    }
}
