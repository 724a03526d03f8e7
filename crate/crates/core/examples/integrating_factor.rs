//! The factored quadratic integral `(q − Pp)(q + Pp)/(1 + P²)` along
//! geodesics of a doubly periodic Liouville metric, and the real-root shift
//! of an integral whose null directions are complex.

use geoweb::integrals::{i0_form, real_root_normalize, QuadraticIntegral, StencilConfig};
use geoweb::surface::{Chart, IntegratorConfig, LiouvilleMetric, StopCondition};
use std::f64::consts::TAU;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = Chart::rect((0.0, 1.0), (0.0, 1.0)).with_u_period(TAU).with_v_period(TAU);
    let m = LiouvilleMetric::parse("2 + sin(u)", "1.5 + cos(v)", chart)?;
    let qi = QuadraticIntegral::new(&m);
    for th in [0.3, 1.1, 2.4] {
        let s = m.normalize(&m.phase_point(1.0, 2.0, f64::cos(th), f64::sin(th))?)?;
        let seg = m.integrate(&s, StopCondition::ArcLength(20.0), &IntegratorConfig::default())?;
        let f0 = qi.factored(&s)?;
        let drift = seg
            .states()
            .iter()
            .map(|y| Ok((qi.factored(&m.phase_of_state(y)?)? - f0).abs()))
            .collect::<Result<Vec<f64>, Box<dyn std::error::Error>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("theta {th}: integral {f0:+.9}, max drift {drift:.2e} over length 20");
    }

    // A negative square has no pair of real null directions until shifted by the metric.
    let neg_square = |_u: f64, _v: f64| Ok([-1.0, 0.0, 0.0]);
    let shift = real_root_normalize(&m, &neg_square, 1.0, 2.0, StencilConfig::default())?;
    println!("-(du)^2 needs shift mu* = {} (min discriminant {:.3e})", shift.mu, shift.min_discriminant);
    let i0 = i0_form(&m);
    println!("I0 needs shift mu* = {}", real_root_normalize(&m, &i0, 1.0, 2.0, StencilConfig::default())?.mu);
    Ok(())
}
