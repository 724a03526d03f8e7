//! Geodesic-equation, conformal-flatness and Blaschke-curvature residuals
//! of the four-web of three Liouville metrics, next to two control webs.

use geoweb::surface::{Chart, LiouvilleMetric};
use geoweb::webs::{control_web, liouville_web, perturbed_net, residual_grid, GridMaxima, GridSpec, WebFields};

fn report(name: &str, w: &WebFields, grid: &GridSpec) -> Result<(), Box<dyn std::error::Error>> {
    let m = GridMaxima::of(&residual_grid(w, grid)?);
    println!("{name:<22} |r_Px| {:.2e}  |r_Py| {:.2e}  |r_flat| {:.2e}  |K_B| {:.2e}", m.r_px, m.r_py, m.r_flat, m.k_b);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = Chart::rect((0.2, 2.0), (0.2, 2.0));
    let grid = GridSpec { x: (0.5, 1.5), y: (0.5, 1.5), nx: 50, ny: 50 };
    for (name, a, b) in [("flat", "1", "1"), ("elliptic", "sinh(u)", "sin(v)"), ("exp", "exp(u)", "1")] {
        report(name, &liouville_web(&LiouvilleMetric::parse(a, b, chart)?), &grid)?;
    }
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", chart)?;
    report("perturbed net P + 0.1uv", &perturbed_net(&m, 0.1), &grid)?;
    report("control web", &control_web(&m, 0.1), &grid)?;
    Ok(())
}
