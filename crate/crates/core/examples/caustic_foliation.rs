//! The caustic leaves of the elliptic table as the conserved parameter
//! sweeps through both signs: confocal ellipses for `μ > 0`, confocal
//! hyperbolae for `μ < 0`.

use geoweb::billiard::BilliardTable;
use geoweb::experiments::caustic_rows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = BilliardTable::elliptic(1.0)?;
    let sh2 = 1.0f64.sinh().powi(2);
    let mus: Vec<f64> = (-4..=6).map(|j| if j < 0 { j as f64 / 5.0 } else { sh2 * (j as f64 + 0.5) / 7.0 }).collect();
    for row in caustic_rows(&table, &mus)? {
        match row.root {
            Some(r) => println!("mu {:+.5}  {} = {r:+.6}", row.mu, row.coord),
            None => println!("mu {:+.5}  no caustic in the chart", row.mu),
        }
    }
    Ok(())
}
