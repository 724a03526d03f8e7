//! Billiard in the ellipse `u = 1` of elliptic coordinates: the conserved
//! parameter, the caustic it selects, and the tangency of every chord.

use geoweb::billiard::{max_relative_mu_drift, BilliardTable};
use geoweb::integrals::QuadraticIntegral;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = BilliardTable::elliptic(1.0)?;
    let qi = QuadraticIntegral::new(table.metric());
    for angle_deg in [15.0f64, 40.0, 70.0, 110.0] {
        let start = table.launch(1.0, 0.7, angle_deg.to_radians())?;
        let mu = qi.mu_of_direction(&start)?;
        let caustic = table.caustic_of(mu)?;
        let recs = table.run(&start, 100)?;
        let worst = recs.iter().filter_map(|r| r.tangency_residual).fold(0.0f64, f64::max);
        println!(
            "angle {angle_deg:>5.1} deg  mu {mu:+.6}  caustic {:?} = {:.6?}  mu drift {:.1e}  tangency {:.1e}",
            caustic.coord,
            caustic.roots,
            max_relative_mu_drift(mu, &recs),
            worst
        );
    }
    Ok(())
}
