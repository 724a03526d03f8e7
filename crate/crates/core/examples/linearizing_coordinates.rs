//! The coordinates `U = ∫du/a`, `V = ∫dv/b` in which all four foliations of
//! the web become straight lines with slopes ∞, 0, 1 and −1.

use geoweb::surface::{Chart, LiouvilleMetric};
use geoweb::webs::linearize::{cross_ratio, net_leaf, web_directions_uv, Linearization};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.3, 2.0), (0.3, 2.0)))?;
    let lin = Linearization::new(&m, (1.0, 1.0));
    for plus in [true, false] {
        println!("net leaf {} through (0.9, 1.1):", if plus { "a du + b dv" } else { "a du - b dv" });
        for (u, v) in net_leaf(&m, (0.9, 1.1), plus, 0.6, 5)? {
            let (x, y) = lin.coords(u, v)?;
            println!(
                "  (u, v) = ({u:.5}, {v:.5})  ->  (U, V) = ({x:+.6}, {y:+.6})  U {} V = {:+.6}",
                if plus { "-" } else { "+" },
                if plus { x - y } else { x + y }
            );
        }
    }
    let d = web_directions_uv(&m, 1.2, 0.8)?;
    println!("directions in (U, V): {d:?}, cross ratio {}", cross_ratio(d));
    Ok(())
}
