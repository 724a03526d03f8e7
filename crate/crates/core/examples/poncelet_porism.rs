//! Rotation numbers of dual-space billiard orbits and closure after tuning
//! the caustic to rotation number 1/5.

use geoweb::dual::poncelet::{closure_defect, sym_covector, tune_rotation};
use geoweb::dual::{Orientation, PonceletSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = -1.0;
    let cw = sym_covector(0.5, -0.2, 0.0, 1.0);
    let ci = |d: f64| sym_covector(d, 0.0, 0.0, 1.0);

    for d in [0.02, 0.04, 0.05, 0.1, 0.2, 0.3] {
        for fam in [-1, 1] {
            let sys = PonceletSystem::new(eps, ci(d), cw, fam)?;
            let r: Vec<String> = [Orientation::Positive, Orientation::Negative]
                .iter()
                .map(|&o| match sys.start(0.0, o).and_then(|s| sys.rotation_number(&s, 300)) {
                    Ok(r) => format!("{r:.9}"),
                    Err(e) => e.to_string(),
                })
                .collect();
            println!("d = {d:<5} family {fam:+}: rotation {r:?}");
        }
    }

    let tuned = tune_rotation(ci, cw, eps, 1, Orientation::Positive, (0.04, 0.05), (1, 5))?;
    println!("tuned parameter d = {:.15}", tuned.parameter);
    for s in tuned.system.tracked_starts(10, Orientation::Positive)? {
        println!("closure defect after 5 steps: {:.3e}", closure_defect(&tuned.system, &s, 5)?);
    }
    Ok(())
}
