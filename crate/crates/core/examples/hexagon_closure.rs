//! Closure defect of the curvilinear hexagon around a point as its size
//! halves: the Liouville web closes faster than cubically, the control web
//! only cubically.

use geoweb::surface::{Chart, LiouvilleMetric};
use geoweb::webs::hexagon::{hexagon_defect, FlowScheme};
use geoweb::webs::{control_web, liouville_web};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.3, 2.0), (0.3, 2.0)))?;
    let s = FlowScheme::default();
    let webs = [("Liouville", liouville_web(&m)), ("control", control_web(&m, 0.1))];
    println!("{:>8} {:>12} {:>12} {:>8} {:>8}", "eps", "Liouville", "control", "ratio L", "ratio C");
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..5 {
        let e = 0.1 / 2f64.powi(k);
        let d0 = hexagon_defect(&webs[0].1, [1.0, 1.0], e, s)?;
        let d1 = hexagon_defect(&webs[1].1, [1.0, 1.0], e, s)?;
        let (r0, r1) = prev.map_or((f64::NAN, f64::NAN), |(a, b)| (a / d0, b / d1));
        println!("{e:>8.5} {d0:>12.3e} {d1:>12.3e} {r0:>8.1} {r1:>8.1}");
        prev = Some((d0, d1));
    }
    Ok(())
}
