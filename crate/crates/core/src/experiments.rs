//! Experiment drivers shared by the command line and the examples.

use crate::billiard::{BilliardError, BilliardTable};
use crate::config::{vec4, PonceletSpec, StartSpec};
use crate::dual::poncelet::{closure_defect, tune_rotation};
use crate::dual::{incidence_point, DualError, PonceletSystem};
use crate::surface::{Coord, PhasePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Launch state from the config, or a seeded random one: a wall point and
/// an inward angle in `(5°, 85°)`.
pub fn billiard_start(table: &BilliardTable, start: Option<StartSpec>, seed: u64) -> Result<PhasePoint, BilliardError> {
    let s = match start {
        Some(s) => s,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = table.wall();
            let leaf = w.upper.or(w.lower).unwrap_or_default();
            let (lo, hi) = table.metric().chart().bounds(w.coord().other());
            StartSpec { leaf, along: rng.gen_range(lo..hi), angle_deg: rng.gen_range(5.0..85.0) }
        }
    };
    table.launch(s.leaf, s.along, s.angle_deg.to_radians())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticRow {
    pub mu: f64,
    pub coord: String,
    pub root: Option<f64>,
}

/// Caustic leaves of each `μ`; a `μ` without caustic in the chart gives a
/// row with an empty root.
pub fn caustic_rows(table: &BilliardTable, mus: &[f64]) -> Result<Vec<CausticRow>, BilliardError> {
    let mut rows = Vec::new();
    for &mu in mus {
        match table.caustic_of(mu) {
            Ok(c) => {
                let coord = match Coord::from(c.coord) {
                    Coord::U => "u",
                    Coord::V => "v",
                };
                for r in &c.roots {
                    rows.push(CausticRow { mu, coord: coord.into(), root: Some(*r) });
                }
            }
            Err(BilliardError::NoCausticInChart { .. }) => {
                rows.push(CausticRow { mu, coord: String::new(), root: None })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub l: [f64; 4],
    pub pi: [f64; 4],
    /// Wall point `(z, y)` whose incidence plane is `pi`.
    pub z: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PonceletReport {
    pub epsilon: f64,
    pub family: i32,
    pub caustic: [f64; 4],
    pub wall: [f64; 4],
    /// Tuned caustic parameter, when tuning was requested.
    pub parameter: Option<f64>,
    pub rotation_numbers: Vec<f64>,
    pub spreads: f64,
    pub closure_defects: Vec<f64>,
    pub ambiguous_steps: usize,
    pub orbit: Vec<OrbitPoint>,
}

fn arr(v: &crate::dual::Vec4) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// Rotation numbers from tracked starts, and the closure defects after
/// `q` steps when the caustic is tuned to `p/q`.
pub fn poncelet_experiment(eps: f64, spec: &PonceletSpec) -> Result<PonceletReport, DualError> {
    let cw = vec4(spec.wall);
    let base = vec4(spec.caustic);
    let (sys, parameter, caustic) = match &spec.tune {
        Some(t) => {
            let dir = vec4(t.direction);
            let tuned = tune_rotation(
                |d| base + dir * d,
                cw,
                eps,
                spec.family,
                spec.orientation,
                (t.bracket[0], t.bracket[1]),
                (t.p, t.q),
            )?;
            let c = base + dir * tuned.parameter;
            (tuned.system, Some(tuned.parameter), c)
        }
        None => (PonceletSystem::new(eps, base, cw, spec.family)?, None, base),
    };
    let starts = sys.tracked_starts(spec.starts, spec.orientation)?;
    let mut rotation_numbers = Vec::with_capacity(starts.len());
    let mut ambiguous_steps = 0;
    for s in &starts {
        rotation_numbers.push(sys.rotation_number(s, spec.steps)?);
        ambiguous_steps += sys.orbit(s, spec.steps)?.1;
    }
    let hi = rotation_numbers.iter().cloned().fold(f64::MIN, f64::max);
    let lo = rotation_numbers.iter().cloned().fold(f64::MAX, f64::min);
    let closure_defects = match &spec.tune {
        Some(t) => starts.iter().map(|s| closure_defect(&sys, s, t.q as usize)).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let shown = spec.tune.as_ref().map_or(20, |t| t.q as usize).min(spec.steps);
    let orbit = sys
        .orbit(&starts[0], shown)?
        .0
        .iter()
        .map(|s| {
            let m = incidence_point(&s.pi);
            OrbitPoint { l: arr(&s.l), pi: arr(&s.pi), z: m.map(|m| m.0), y: m.map(|m| m.1) }
        })
        .collect();
    Ok(PonceletReport {
        epsilon: eps,
        family: spec.family,
        caustic: arr(&caustic),
        wall: spec.wall,
        parameter,
        rotation_numbers,
        spreads: hi - lo,
        closure_defects,
        ambiguous_steps,
        orbit,
    })
}
