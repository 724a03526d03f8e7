//! Geodesics of the surface `z³y″ = ε(y′)³`: integrated curves against the
//! closed-form conics `k²(y − l)² − kz² = ε`, through a vertical tangent.

use geoweb::dual::{EpsSurface, GeodesicConic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for eps in [1.0, -1.0] {
        let s = EpsSurface::new(eps, 0.1)?;
        for (z, y, slope) in [(1.0, 0.0, 2.0), (1.5, 0.3, -0.7), (1.2, -0.5, 0.4)] {
            let g = match s.geodesic_through(z, y, slope) {
                Ok(g) => g,
                Err(e) => {
                    println!("eps {eps:+}  ({z}, {y}, {slope}): {e}");
                    continue;
                }
            };
            let curve = s.integrate_curve(z, y, slope.atan(), 1.5)?;
            let worst = curve.iter().map(|p| s.conic_residual(g, p[0], p[1]).abs()).fold(0.0, f64::max);
            let turns = curve.windows(2).filter(|w| (w[1][0] - w[0][0]) * (w[0][0] - curve[0][0]) < 0.0).count();
            let label = match g {
                GeodesicConic::Regular { k, l } => format!("k = {k:+.6}, l = {l:+.6}"),
                GeodesicConic::Special { l0 } => format!("y = {l0}"),
            };
            let end = curve.last().expect("nonempty");
            println!(
                "eps {eps:+}  ({z}, {y}, {slope}): {label}; end ({:.5}, {:.5}); max conic residual {worst:.1e}{}",
                end[0],
                end[1],
                if turns > 0 { "; passes a vertical tangent" } else { "" }
            );
        }
    }
    Ok(())
}
