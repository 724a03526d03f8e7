//! The acceptance suite: eleven numerical checks, each with its tolerance
//! and time budget. `geoweb selftest` and the `acceptance` test target both
//! run it.

pub mod oracles;

use crate::billiard::{max_relative_mu_drift, BilliardTable};
use crate::dual::cone::{cone_fit, tangency_pair, wall_points, CONCURRENCY_THRESHOLD};
use crate::dual::poncelet::{closure_defect, sym_covector, tune_rotation};
use crate::dual::{EpsSurface, GeodesicConic, Orientation, PlaneConic, PonceletSystem, Vec4};
use crate::integrals::{clairaut_eval, QuadraticIntegral};
use crate::numeric::roots::brent;
use crate::surface::{Chart, ClairautMetric, IntegratorConfig, LiouvilleMetric, StopCondition};
use crate::webs::hexagon::{hexagon_defect, FlowScheme};
use crate::webs::linearize::{cross_ratio, net_leaf_collinearity, web_directions_uv};
use crate::webs::{control_web, liouville_web, perturbed_net, residual_grid, GridMaxima, GridSpec};
use oracles::{elliptic_to_euclid, EllipseBilliard};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: Option<f64>,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} [{}] {}: {} ({:.2} s",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )?;
        match self.budget {
            Some(b) => write!(f, ", budget {b} s)"),
            None => write!(f, ")"),
        }
    }
}

type Check = fn() -> Result<(bool, String), String>;

pub const CRITERIA: [(u8, &str, Check, Option<f64>); 11] = [
    (1, "mu conservation", mu_conservation, Some(30.0)),
    (2, "caustic foliation and tangency", caustic_tangency, Some(30.0)),
    (3, "Euclidean ellipse equivalence", ellipse_equivalence, Some(10.0)),
    (4, "web residuals", web_residuals, Some(60.0)),
    (5, "hexagon closure", hexagon_closure, Some(60.0)),
    (6, "integrating factor product", integrating_factor, Some(10.0)),
    (7, "linearizing coordinates", linearization, None),
    (8, "epsilon-surface closed form", eps_closed_form, Some(10.0)),
    (9, "cone concurrency", cone_concurrency, Some(30.0)),
    (10, "Poncelet porism", porism, Some(120.0)),
    (11, "Clairaut integral", clairaut, Some(10.0)),
];

pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let &(id, name, check, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let t = Instant::now();
    let r = check();
    let seconds = t.elapsed().as_secs_f64();
    let (ok, detail) = match r {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = budget.is_none_or(|b| seconds <= b);
    let detail = if ok && !in_time { format!("{detail}; over time budget") } else { detail };
    Some(CriterionResult { id, name, passed: ok && in_time, detail, seconds, budget })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const U_WALL: f64 = 1.0;

/// Seeded inward launches on the `u = 1` ellipse wall.
fn launches(table: &BilliardTable, n: usize, seed: u64) -> Result<Vec<crate::surface::PhasePoint>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v = rng.gen_range(0.0..TAU);
            let ang = rng.gen_range(5.0f64..85.0).to_radians();
            table.launch(U_WALL, v, ang).map_err(err)
        })
        .collect()
}

fn mu_conservation() -> Result<(bool, String), String> {
    let table = BilliardTable::elliptic(U_WALL).map_err(err)?;
    let qi = QuadraticIntegral::new(table.metric());
    let mut worst = 0.0f64;
    for s in launches(&table, 20, 1)? {
        let mu0 = qi.mu_of_direction(&s).map_err(err)?;
        let recs = table.run(&s, 100).map_err(err)?;
        worst = worst.max(max_relative_mu_drift(mu0, &recs));
    }
    Ok((worst <= 1e-6, format!("max relative mu drift {worst:.2e} over 20 x 100 bounces (tol 1e-6)")))
}

/// Angle in `(0, π/2)` of an inward launch from `(leaf, along)` with the
/// given `μ`.
fn launch_with_mu(table: &BilliardTable, leaf: f64, along: f64, mu: f64) -> Result<crate::surface::PhasePoint, String> {
    let qi = QuadraticIntegral::new(table.metric());
    let f = |th: f64| -> f64 {
        table.launch(leaf, along, th).ok().and_then(|s| qi.mu_of_direction(&s).ok()).map_or(f64::NAN, |m| m - mu)
    };
    let (a, b) = (1e-6, PI / 2.0 - 1e-6);
    let th = brent(f, a, b, f(a), f(b), 1e-15, 200).ok_or_else(|| format!("no launch angle for mu = {mu}"))?;
    table.launch(leaf, along, th).map_err(err)
}

fn caustic_tangency() -> Result<(bool, String), String> {
    let sh2 = U_WALL.sinh().powi(2);
    let mut worst = 0.0f64;
    let mut closed = 0.0f64;
    let mut missing = 0usize;
    let mut monotone = true;
    for (table, sign) in [
        (BilliardTable::elliptic(U_WALL).map_err(err)?, 1.0),
        (BilliardTable::elliptic_transposed(U_WALL).map_err(err)?, -1.0),
    ] {
        let mut prev: Option<f64> = None;
        for j in 0..10 {
            let mu = sign * sh2 * 0.9 * (j as f64 + 0.5) / 10.0;
            let caustic = table.caustic_of(mu).map_err(err)?;
            let leaf = caustic.roots.iter().copied().filter(|r| *r > 0.0).fold(f64::NAN, f64::max);
            closed = closed.max((leaf - mu.abs().sqrt().asinh()).abs());
            if let Some(p) = prev {
                // |mu| grows with j on both tables, so the leaf moves away from zero.
                monotone &= leaf > p;
            }
            prev = Some(leaf);
            let s = launch_with_mu(&table, U_WALL, 0.8, mu)?;
            for r in table.run(&s, 20).map_err(err)? {
                match r.tangency_residual {
                    Some(t) => worst = worst.max(t),
                    None => missing += 1,
                }
            }
        }
    }
    let ok = worst <= 1e-6 && missing == 0 && monotone && closed <= 1e-12;
    Ok((
        ok,
        format!(
            "max extremal-coordinate offset {worst:.2e} (tol 1e-6), segments without turning point {missing}, \
             leaves monotone in mu: {monotone}, leaf vs asinh(sqrt|mu|) {closed:.1e}"
        ),
    ))
}

fn ellipse_equivalence() -> Result<(bool, String), String> {
    let table = BilliardTable::elliptic(U_WALL).map_err(err)?;
    let oracle = EllipseBilliard::confocal(U_WALL);
    let mut worst = 0.0f64;
    for s in launches(&table, 20, 1)? {
        let recs = table.run(&s, 50).map_err(err)?;
        let (mut p, mut d) = elliptic_to_euclid(s.u, s.v, s.du, s.dv);
        for r in &recs {
            let (x, y, dx, dy) = oracle.bounce(p, d);
            let (q, _) = elliptic_to_euclid(r.u, r.v, 0.0, 0.0);
            worst = worst.max((q.0 - x).hypot(q.1 - y));
            p = (x, y);
            d = (dx, dy);
        }
    }
    Ok((worst <= 1e-6, format!("max bounce-point distance {worst:.2e} over 20 x 50 bounces (tol 1e-6)")))
}

fn web_residuals() -> Result<(bool, String), String> {
    let chart = Chart::rect((0.2, 2.0), (0.2, 2.0));
    let grid = GridSpec { x: (0.5, 1.5), y: (0.5, 1.5), nx: 50, ny: 50 };
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, a, b) in [("flat", "1", "1"), ("elliptic", "sinh(u)", "sin(v)"), ("exp", "exp(u)", "1")] {
        let m = LiouvilleMetric::parse(a, b, chart).map_err(err)?;
        let g = GridMaxima::of(&residual_grid(&liouville_web(&m), &grid).map_err(err)?);
        worst = worst.max(g.max());
        parts.push(format!("{name} {:.1e}", g.max()));
    }
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", chart).map_err(err)?;
    let kb = GridMaxima::of(&residual_grid(&perturbed_net(&m, 0.1), &grid).map_err(err)?).k_b;
    let flat = GridMaxima::of(&residual_grid(&control_web(&m, 0.1), &grid).map_err(err)?).r_flat;
    let ok = worst <= 1e-6 && kb >= 1e-2 && flat >= 1e-3;
    Ok((
        ok,
        format!(
            "Liouville max residual {} (tol 1e-6); perturbed max |K_B| {kb:.3e} (>= 1e-2); \
             control max |r_flat| {flat:.3e} (>= 1e-3)",
            parts.join(", ")
        ),
    ))
}

fn hexagon_closure() -> Result<(bool, String), String> {
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.3, 2.0), (0.3, 2.0))).map_err(err)?;
    let centre = [1.0, 1.0];
    let scheme = FlowScheme::default();
    let ratios = |w: &crate::webs::WebFields| -> Result<Vec<f64>, String> {
        [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| {
                let d1 = hexagon_defect(w, centre, e, scheme).map_err(err)?;
                let d2 = hexagon_defect(w, centre, e / 2.0, scheme).map_err(err)?;
                Ok(d1 / d2)
            })
            .collect()
    };
    let lw = ratios(&liouville_web(&m))?;
    let cw = ratios(&control_web(&m, 0.1))?;
    let ok = lw.iter().all(|r| *r >= 12.0) && cw.iter().all(|r| *r <= 10.0);
    let f = |v: &[f64]| v.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join("/");
    Ok((ok, format!("defect ratios Liouville {} (>= 12), control {} (<= 10)", f(&lw), f(&cw))))
}

fn integrating_factor() -> Result<(bool, String), String> {
    let chart = Chart::rect((0.0, 1.0), (0.0, 1.0)).with_u_period(TAU).with_v_period(TAU);
    let m = LiouvilleMetric::parse("2 + sin(u)", "1.5 + cos(v)", chart).map_err(err)?;
    let qi = QuadraticIntegral::new(&m);
    let cfg = IntegratorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (u, v, th) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let s0 = m.normalize(&m.phase_point(u, v, th.cos(), th.sin()).map_err(err)?).map_err(err)?;
        let seg = m.integrate(&s0, StopCondition::ArcLength(20.0), &cfg).map_err(err)?;
        let i0 = qi.factored(&s0).map_err(err)?;
        let scale = s0.p * s0.p + s0.q * s0.q;
        for y in seg.states() {
            let s = m.phase_of_state(y).map_err(err)?;
            worst = worst.max((qi.factored(&s).map_err(err)? - i0).abs() / scale);
        }
    }
    Ok((worst <= 1e-7, format!("max drift of (q-Pp)(q+Pp)/(1+P^2) relative to p^2+q^2: {worst:.2e} (tol 1e-7)")))
}

fn linearization() -> Result<(bool, String), String> {
    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.3, 2.0), (0.3, 2.0))).map_err(err)?;
    let anchor = (1.0, 1.0);
    let mut worst = 0.0f64;
    for start in [(0.8, 0.9), (1.0, 1.0), (1.2, 1.3)] {
        for plus in [true, false] {
            worst = worst.max(net_leaf_collinearity(&m, anchor, start, plus, 0.5, 25).map_err(err)?);
        }
    }
    let mut exact = true;
    for (u, v) in [(0.5, 0.5), (1.0, 1.7), (1.9, 0.4), (1.3, 1.3)] {
        exact &= cross_ratio(web_directions_uv(&m, u, v).map_err(err)?) == -1.0;
    }
    Ok((
        worst <= 1e-6 && exact,
        format!("max collinearity residual {worst:.2e} (tol 1e-6); cross ratio exactly -1: {exact}"),
    ))
}

fn eps_closed_form() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for eps in [1.0, -1.0] {
        let s = EpsSurface::new(eps, 0.1).map_err(err)?;
        let mut count = 0;
        while count < 100 {
            let z = rng.gen_range(1.0..2.0);
            let y = rng.gen_range(-1.0..1.0);
            let slope: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let g = match s.geodesic_through(z, y, slope) {
                Ok(g @ GeodesicConic::Regular { .. }) => g,
                Ok(_) => continue,
                Err(crate::dual::DualError::DegenerateK) => continue,
                Err(e) => return Err(err(e)),
            };
            let path = s.integrate_geodesic(z, y, slope, 0.5).map_err(err)?;
            let end = path.last().expect("nonempty");
            worst = worst.max(s.conic_residual(g, end[0], end[1]).abs());
            count += 1;
        }
    }
    Ok((worst <= 1e-8, format!("max endpoint conic residual {worst:.2e} over 100 + 100 geodesics (tol 1e-8)")))
}

/// Ten wall points spread over the real part of one cone family of a
/// random wall conic, or `None` if the conic does not qualify.
fn random_wall(rng: &mut ChaCha8Rng, eps: f64) -> Option<(PlaneConic, Vec<(f64, f64)>)> {
    let c = Vec4::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let cw = PlaneConic::new(c, eps).ok()?;
    if !cw.is_smooth() || cw.parametrization().is_err() {
        return None;
    }
    let ys: Vec<f64> = (0..121).map(|i| -3.0 + 0.05 * i as f64).collect();
    let pts = wall_points(&cw, &ys, 1);
    if pts.len() < 20 {
        return None;
    }
    let picked = (0..10).map(|i| pts[i * (pts.len() - 1) / 9]).collect();
    Some((cw, picked))
}

fn cone_concurrency() -> Result<(bool, String), String> {
    let eps = 1.0;
    let c0 = PlaneConic::c0(eps);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst, mut control) = (0.0f64, f64::INFINITY);
    let mut found = 0;
    while found < 5 {
        let Some((cw, pts)) = random_wall(&mut rng, eps) else { continue };
        let mut pairs: Vec<_> =
            pts.iter().map(|&(z, y)| tangency_pair(&c0, &cw, z, y)).collect::<Result<_, _>>().map_err(err)?;
        worst = worst.max(cone_fit(&pairs).map_err(err)?.spread);
        let n = pairs[4].1.norm();
        pairs[4].1 += Vec4::new(0.0, 1e-2 * n, 0.0, 0.0);
        control = control.min(cone_fit(&pairs).map_err(err)?.spread);
        found += 1;
    }
    Ok((
        worst <= CONCURRENCY_THRESHOLD && control >= 1e-3,
        format!("max spread {worst:.2e} over 5 random walls (tol 1e-6); perturbed control min spread {control:.2e} (>= 1e-3)"),
    ))
}

fn porism() -> Result<(bool, String), String> {
    let eps = -1.0;
    let cw = sym_covector(0.5, -0.2, 0.0, 1.0);
    let ci = |d: f64| sym_covector(d, 0.0, 0.0, 1.0);
    let sys = PonceletSystem::new(eps, ci(0.2), cw, 1).map_err(err)?;
    let rot = sys
        .tracked_starts(10, Orientation::Positive)
        .map_err(err)?
        .iter()
        .map(|s| sys.rotation_number(s, 500))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let spread = rot.iter().cloned().fold(f64::MIN, f64::max) - rot.iter().cloned().fold(f64::MAX, f64::min);
    let tuned = tune_rotation(ci, cw, eps, 1, Orientation::Positive, (0.04, 0.05), (1, 5)).map_err(err)?;
    let mut closure = 0.0f64;
    for s in tuned.system.tracked_starts(10, Orientation::Positive).map_err(err)? {
        closure = closure.max(closure_defect(&tuned.system, &s, 5).map_err(err)?);
    }
    Ok((
        spread <= 1e-8 && closure <= 1e-6,
        format!(
            "rotation number {:.10} with spread {spread:.2e} over 10 starts (tol 1e-8); tuned to 1/5 at d = {:.12}, \
             max 5-step closure defect {closure:.2e} (tol 1e-6)",
            rot[0], tuned.parameter
        ),
    ))
}

fn clairaut() -> Result<(bool, String), String> {
    let m = ClairautMetric::parse("cosh(v)^2", Chart::rect((-50.0, 50.0), (-4.0, 4.0))).map_err(err)?;
    let cfg = IntegratorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (u, v) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let th = rng.gen_range(0.2..PI / 2.0 - 0.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let traj = m.integrate(u, v, th.cos(), th.sin(), 3.0, &cfg).map_err(err)?;
        let y0 = traj.y[0];
        let p0 = clairaut_eval(&m, y0[0], y0[1], y0[2], y0[3]).map_err(err)?;
        for y in &traj.y {
            let p = clairaut_eval(&m, y[0], y[1], y[2], y[3]).map_err(err)?;
            worst = worst.max((p - p0).abs() / p0.abs());
        }
    }
    Ok((worst <= 1e-8, format!("max relative drift of E(v) du {worst:.2e} over 20 geodesics (tol 1e-8)")))
}
