//! The linear integral `E(v) du` on the surface of revolution
//! `cosh²v du² + dv²`.

use geoweb::integrals::clairaut_eval;
use geoweb::surface::{Chart, ClairautMetric, IntegratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ClairautMetric::parse("cosh(v)^2", Chart::rect((-50.0, 50.0), (-4.0, 4.0)))?;
    for th in [0.0f64, 0.4, 1.0, std::f64::consts::FRAC_PI_2] {
        let traj = m.integrate(0.0, 0.1, th.cos(), th.sin(), 3.0, &IntegratorConfig::default())?;
        let p: Vec<f64> = traj.y.iter().map(|y| clairaut_eval(&m, y[0], y[1], y[2], y[3])).collect::<Result<_, _>>()?;
        let drift = p.iter().map(|x| (x - p[0]).abs()).fold(0.0, f64::max);
        let (_, end) = traj.last();
        println!("theta {th:.4}: p = {:+.10}, drift {drift:.1e}, end (u, v) = ({:.5}, {:.5})", p[0], end[0], end[1]);
    }
    Ok(())
}
