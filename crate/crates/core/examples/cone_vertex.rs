//! Lines joining the tangency points of incidence planes with `c₀` and with
//! a wall conic all pass through one point of dual space.

use geoweb::dual::cone::{cone_fit, tangency_pair, wall_points};
use geoweb::dual::poncelet::sym_covector;
use geoweb::dual::PlaneConic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 1.0;
    let c0 = PlaneConic::c0(eps);
    let cw = PlaneConic::new(sym_covector(0.5, -0.2, 0.1, 1.0), eps)?;
    let ys: Vec<f64> = (0..121).map(|i| -3.0 + 0.05 * i as f64).collect();
    for branch in 0..2 {
        let pts = wall_points(&cw, &ys, branch);
        if pts.len() < 3 {
            println!("branch {branch}: {} wall points", pts.len());
            continue;
        }
        let pairs: Vec<_> = pts.iter().map(|&(z, y)| tangency_pair(&c0, &cw, z, y)).collect::<Result<_, _>>()?;
        let fit = cone_fit(&pairs)?;
        println!(
            "branch {branch}: {} wall points, vertex {:.6?}, spread {:.2e}",
            pts.len(),
            fit.vertex.as_slice(),
            fit.spread
        );
    }
    Ok(())
}
