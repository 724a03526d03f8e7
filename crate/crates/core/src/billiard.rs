//! Billiards in a Liouville chart whose wall is a coordinate leaf.
//!
//! Reflection is done in chart coordinates: the metric is conformal, so the
//! Euclidean reflection in the chart is the metric reflection. It swaps the
//! two null directions of `I_μ`, so `μ` is preserved at every bounce, and the
//! segments stay tangent to the coordinate leaf labelled by `μ`.
//!
//! The wall may be bounded on both sides (`lower < coord < upper`). This
//! covers double-cover charts such as elliptic coordinates with `u ∈ [−1, 1]`,
//! where `u = ±1` is the same ellipse and chords may cross the focal segment.

use crate::integrals::{IntegralError, QuadraticIntegral};
use crate::numeric::ode::{Direction, Stop};
use crate::numeric::roots::brent;
use crate::surface::{Chart, Coord, GeodesicSegment, IntegratorConfig, LiouvilleMetric, PhasePoint, SurfaceError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BilliardError {
    #[error(transparent)]
    Surface(SurfaceError),
    #[error(transparent)]
    Integral(IntegralError),
    #[error("ray is tangent to the wall at bounce {bounce}")]
    TangentRay { bounce: usize },
    #[error("point ({u}, {v}) is not on the wall")]
    NotOnWall { u: f64, v: f64 },
    #[error("start direction does not point into the table")]
    NotInward,
    #[error("trajectory escaped the chart at ({u}, {v})")]
    EscapedChart { u: f64, v: f64 },
    #[error("no wall hit within arc length {length}")]
    EventNotFound { length: f64 },
    #[error("no caustic with mu = {mu} in the chart")]
    NoCausticInChart { mu: f64 },
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

impl From<SurfaceError> for BilliardError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::LeftChart { u, v } => BilliardError::EscapedChart { u, v },
            SurfaceError::EventNotFound { length } => BilliardError::EventNotFound { length },
            other => BilliardError::Surface(other),
        }
    }
}

impl From<IntegralError> for BilliardError {
    fn from(e: IntegralError) -> Self {
        match e {
            IntegralError::Surface(s) => s.into(),
            other => BilliardError::Integral(other),
        }
    }
}

/// Wall made of coordinate leaves `coord = lower` and/or `coord = upper`;
/// the table is the region between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub coord: WallCoord,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallCoord {
    U,
    V,
}

impl From<WallCoord> for Coord {
    fn from(w: WallCoord) -> Coord {
        match w {
            WallCoord::U => Coord::U,
            WallCoord::V => Coord::V,
        }
    }
}

impl Wall {
    pub fn coord(&self) -> Coord {
        self.coord.into()
    }

    /// Signed inward normal at a wall point, if `x` is on one of the leaves.
    fn inward_sign(&self, x: f64, tol: f64) -> Option<f64> {
        if let Some(lo) = self.lower {
            if (x - lo).abs() <= tol {
                return Some(1.0);
            }
        }
        if let Some(hi) = self.upper {
            if (x - hi).abs() <= tol {
                return Some(-1.0);
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilliardTable {
    metric: LiouvilleMetric,
    wall: Wall,
    pub cfg: IntegratorConfig,
}

/// Distance from the wall within which a point counts as on it.
pub const WALL_TOL: f64 = 1e-9;
/// Grazing threshold on the chart-normalized normal velocity component.
pub const GRAZING_TOL: f64 = 1e-10;

/// Wall hit of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceRecord {
    pub i: usize,
    pub u: f64,
    pub v: f64,
    pub du_in: f64,
    pub dv_in: f64,
    pub du_out: f64,
    pub dv_out: f64,
    pub mu_in: f64,
    pub mu_out: f64,
    /// Arc length of the segment ending at this bounce.
    pub arc_len: f64,
    /// Distance between the segment's extremal caustic-family coordinate and
    /// the caustic; absent when the segment has no interior turning point in
    /// that coordinate.
    pub tangency_residual: Option<f64>,
}

/// Coordinate leaves `u = u_c` with `a²(u_c) = μ`, or `v = v_c` with `b²(v_c) = −μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caustic {
    pub mu: f64,
    pub coord: WallCoord,
    pub roots: Vec<f64>,
}

impl Caustic {
    pub fn nearest(&self, x: f64) -> Option<f64> {
        self.roots.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
    }
}

const ROOT_SCAN: usize = 4000;

fn scan_roots(f: impl Fn(f64) -> Option<f64>, lo: f64, hi: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(lo);
    for i in 1..=ROOT_SCAN {
        let x1 = lo + (hi - lo) * i as f64 / ROOT_SCAN as f64;
        let f1 = f(x1);
        if let (Some(a), Some(b)) = (f0, f1) {
            if a == 0.0 {
                roots.push(x0);
            } else if a * b < 0.0 {
                if let Some(r) = brent(|x| f(x).unwrap_or(f64::NAN), x0, x1, a, b, 1e-15, 200) {
                    roots.push(r);
                }
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if let Some(b) = f0 {
        if b == 0.0 {
            roots.push(hi);
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    roots
}

impl BilliardTable {
    /// Builds the table and checks it with a probe fan: from three wall
    /// points, rays at five angles must come back to the wall.
    pub fn new(metric: LiouvilleMetric, wall: Wall, cfg: IntegratorConfig) -> Result<Self, BilliardError> {
        let c = wall.coord();
        let chart = *metric.chart();
        if wall.lower.is_none() && wall.upper.is_none() {
            return Err(BilliardError::InvalidTable("wall needs at least one leaf".into()));
        }
        if chart.period(c).is_some() {
            return Err(BilliardError::InvalidTable("wall coordinate must not be periodic".into()));
        }
        let (lo, hi) = chart.bounds(c);
        for x in [wall.lower, wall.upper].into_iter().flatten() {
            if !(x > lo && x < hi) {
                return Err(BilliardError::InvalidTable(format!("wall leaf {x} is not inside the chart")));
            }
        }
        if let (Some(a), Some(b)) = (wall.lower, wall.upper) {
            if a >= b {
                return Err(BilliardError::InvalidTable("lower wall must be below upper wall".into()));
            }
        }
        let table = Self { metric, wall, cfg };
        table.probe()?;
        Ok(table)
    }

    /// Elliptic-coordinate table `a = sinh u`, `b = sin v` bounded by the
    /// ellipse `u = u_wall`, in the double cover `u ∈ [−u_wall, u_wall]`.
    pub fn elliptic(u_wall: f64) -> Result<Self, BilliardError> {
        let r = u_wall + 0.5;
        let chart = Chart::rect((-r, r), (0.0, 1.0)).with_v_period(2.0 * std::f64::consts::PI);
        let metric = LiouvilleMetric::parse("sinh(u)", "sin(v)", chart)?;
        let wall = Wall { coord: WallCoord::U, lower: Some(-u_wall), upper: Some(u_wall) };
        Self::new(metric, wall, IntegratorConfig::default())
    }

    /// The same ellipse with the roles of the coordinates exchanged:
    /// `a = sin u`, `b = sinh v`, wall `v = ±v_wall`.
    pub fn elliptic_transposed(v_wall: f64) -> Result<Self, BilliardError> {
        let r = v_wall + 0.5;
        let chart = Chart::rect((0.0, 1.0), (-r, r)).with_u_period(2.0 * std::f64::consts::PI);
        let metric = LiouvilleMetric::parse("sin(u)", "sinh(v)", chart)?;
        let wall = Wall { coord: WallCoord::V, lower: Some(-v_wall), upper: Some(v_wall) };
        Self::new(metric, wall, IntegratorConfig::default())
    }

    pub fn metric(&self) -> &LiouvilleMetric {
        &self.metric
    }

    pub fn wall(&self) -> &Wall {
        &self.wall
    }

    fn probe(&self) -> Result<(), BilliardError> {
        let c = self.wall.coord();
        let leaf = self.wall.upper.or(self.wall.lower).unwrap_or_default();
        let (olo, ohi) = self.metric.chart().bounds(c.other());
        for k in 0..3 {
            let along = olo + (ohi - olo) * (k as f64 + 0.37) / 3.0;
            for angle in [15.0f64, 40.0, 90.0, 130.0, 165.0] {
                let s = match self.launch(leaf, along, angle.to_radians()) {
                    Ok(s) => s,
                    Err(BilliardError::Surface(SurfaceError::Degenerate { .. })) => continue,
                    Err(e) => return Err(e),
                };
                self.next_hit(&s).map_err(|e| {
                    BilliardError::InvalidTable(format!("probe ray from the wall does not return: {e}"))
                })?;
            }
        }
        Ok(())
    }

    /// Phase point on the leaf `wall coord = leaf`, at the other coordinate
    /// `along`, making angle `angle` (radians, in `(0, π)`) with the wall
    /// tangent and pointing inward.
    pub fn launch(&self, leaf: f64, along: f64, angle: f64) -> Result<PhasePoint, BilliardError> {
        let sign = self.wall.inward_sign(leaf, WALL_TOL).ok_or(BilliardError::NotOnWall { u: leaf, v: along })?;
        let (t, n) = (angle.cos(), sign * angle.sin());
        let s = match self.wall.coord() {
            Coord::U => self.metric.phase_point(leaf, along, n, t)?,
            Coord::V => self.metric.phase_point(along, leaf, t, n)?,
        };
        Ok(self.metric.normalize(&s)?)
    }

    fn split(&self, du: f64, dv: f64) -> (f64, f64) {
        match self.wall.coord() {
            Coord::U => (du, dv),
            Coord::V => (dv, du),
        }
    }

    /// Reflects a phase point on the wall: the normal chart component flips.
    pub fn reflect(&self, s: &PhasePoint) -> Result<PhasePoint, BilliardError> {
        self.reflect_at(s, 0)
    }

    fn reflect_at(&self, s: &PhasePoint, bounce: usize) -> Result<PhasePoint, BilliardError> {
        let c = self.wall.coord();
        let x = match c {
            Coord::U => s.u,
            Coord::V => s.v,
        };
        if self.wall.inward_sign(x, WALL_TOL).is_none() {
            return Err(BilliardError::NotOnWall { u: s.u, v: s.v });
        }
        let (n, _) = self.split(s.du, s.dv);
        if n.abs() < GRAZING_TOL * s.du.hypot(s.dv) {
            return Err(BilliardError::TangentRay { bounce });
        }
        let (du, dv) = match c {
            Coord::U => (-s.du, s.dv),
            Coord::V => (s.du, -s.dv),
        };
        Ok(self.metric.phase_point(s.u, s.v, du, dv)?)
    }

    fn next_hit(&self, s: &PhasePoint) -> Result<GeodesicSegment, BilliardError> {
        let c = self.wall.coord();
        let mut events = Vec::new();
        if let Some(lo) = self.wall.lower {
            events.push(self.metric.level_event(c, lo, Direction::Falling));
        }
        if let Some(hi) = self.wall.upper {
            events.push(self.metric.level_event(c, hi, Direction::Rising));
        }
        let (seg, stop) = self.metric.integrate_with(s, &events, self.cfg.max_length, &self.cfg)?;
        match stop {
            Stop::Event { .. } => Ok(seg),
            Stop::End => Err(BilliardError::EventNotFound { length: self.cfg.max_length }),
        }
    }

    /// Caustic leaves for `μ`. Roots of `a² − μ` over the `u` range and of
    /// `b² + μ` over the `v` range are collected; when both exist the sign
    /// of `μ` decides (`μ > 0`: `u`-leaves).
    pub fn caustic_of(&self, mu: f64) -> Result<Caustic, BilliardError> {
        let chart = self.metric.chart();
        let (ulo, uhi) = chart.bounds(Coord::U);
        let (vlo, vhi) = chart.bounds(Coord::V);
        let a = self.metric.a();
        let b = self.metric.b();
        let ur = scan_roots(|u| a.eval(u).ok().map(|x| x * x - mu), ulo, uhi);
        let vr = scan_roots(|v| b.eval(v).ok().map(|x| x * x + mu), vlo, vhi);
        let pick_u = match (ur.is_empty(), vr.is_empty()) {
            (true, true) => return Err(BilliardError::NoCausticInChart { mu }),
            (false, true) => true,
            (true, false) => false,
            (false, false) => mu >= 0.0,
        };
        let mut roots = if pick_u { ur } else { vr };
        if pick_u && chart.u_period.is_some() || !pick_u && chart.v_period.is_some() {
            let c = if pick_u { Coord::U } else { Coord::V };
            roots.iter_mut().for_each(|r| *r = chart.wrap(c, *r));
            roots.sort_by(f64::total_cmp);
            roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        }
        Ok(Caustic { mu, coord: if pick_u { WallCoord::U } else { WallCoord::V }, roots })
    }

    /// `|extremal coordinate − nearest caustic leaf|` over the interior
    /// turning points of the segment, or `None` if there are none.
    pub fn tangency_residual(&self, seg: &GeodesicSegment, c: &Caustic) -> Result<Option<f64>, BilliardError> {
        let coord: Coord = c.coord.into();
        let chart = self.metric.chart();
        let tps = self.metric.turning_points(seg, coord, &self.cfg)?;
        let mut worst: Option<f64> = None;
        for (_, y) in tps {
            let x = chart.wrap(coord, y[coord.index()]);
            if let Some(r) = c.nearest(x) {
                let mut d = (x - r).abs();
                if let Some(p) = chart.period(coord) {
                    d = d.min(p - d);
                }
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
        Ok(worst)
    }

    /// Runs `n` bounces from a wall point aimed inward.
    pub fn run(&self, start: &PhasePoint, n: usize) -> Result<Vec<BounceRecord>, BilliardError> {
        let c = self.wall.coord();
        let x = match c {
            Coord::U => start.u,
            Coord::V => start.v,
        };
        let sign = self.wall.inward_sign(x, WALL_TOL).ok_or(BilliardError::NotOnWall { u: start.u, v: start.v })?;
        let (nrm, _) = self.split(start.du, start.dv);
        if nrm.abs() < GRAZING_TOL * start.du.hypot(start.dv) {
            return Err(BilliardError::TangentRay { bounce: 0 });
        }
        if nrm * sign < 0.0 {
            return Err(BilliardError::NotInward);
        }
        let qi = QuadraticIntegral::new(&self.metric);
        let mu0 = qi.mu_of_direction(start)?;
        let caustic = self.caustic_of(mu0).ok();
        let mut s = self.metric.normalize(start)?;
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let seg = self.next_hit(&s)?;
            let y = seg.end_state();
            let hit = self.metric.phase_of_state(&y)?;
            let refl = self.reflect_at(&hit, i)?;
            let tangency_residual = match &caustic {
                Some(cst) => self.tangency_residual(&seg, cst)?,
                None => None,
            };
            out.push(BounceRecord {
                i,
                u: hit.u,
                v: hit.v,
                du_in: hit.du,
                dv_in: hit.dv,
                du_out: refl.du,
                dv_out: refl.dv,
                mu_in: qi.mu_of_direction(&hit)?,
                mu_out: qi.mu_of_direction(&refl)?,
                arc_len: seg.length(),
                tangency_residual,
            });
            s = refl;
        }
        Ok(out)
    }
}

/// Largest `|μ_k − μ₀| / |μ₀|` over the records, with `μ₀` from the launch.
pub fn max_relative_mu_drift(mu0: f64, records: &[BounceRecord]) -> f64 {
    let scale = mu0.abs().max(f64::MIN_POSITIVE);
    records.iter().flat_map(|r| [r.mu_in, r.mu_out]).map(|m| (m - mu0).abs() / scale).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_reflection() {
        let t = BilliardTable::elliptic_transposed(1.0).unwrap();
        let s = t.metric().phase_point(0.4, 1.0, 1.0, 1.0).unwrap();
        let r = t.reflect(&s).unwrap();
        assert_eq!((r.du, r.dv), (1.0, -1.0));
        let s = t.metric().phase_point(0.4, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(t.reflect(&s), Err(BilliardError::TangentRay { .. })));
        let s = t.metric().phase_point(0.4, 0.3, 1.0, 1.0).unwrap();
        assert!(matches!(t.reflect(&s), Err(BilliardError::NotOnWall { .. })));
    }

    #[test]
    fn reflection_preserves_mu() {
        let t = BilliardTable::elliptic(1.0).unwrap();
        let q = QuadraticIntegral::new(t.metric());
        for k in 1..10 {
            let ang = 0.3 * k as f64;
            let s = t.metric().phase_point(1.0, 0.7, ang.cos(), ang.sin()).unwrap();
            let r = t.reflect(&s).unwrap();
            let (a, b) = (q.mu_of_direction(&s).unwrap(), q.mu_of_direction(&r).unwrap());
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn caustic_examples() {
        let t = BilliardTable::elliptic(1.0).unwrap();
        let mu = -(1f64.sin().powi(2));
        let c = t.caustic_of(mu).unwrap();
        assert_eq!(c.coord, WallCoord::V);
        assert!(c.roots.iter().any(|r| (r - 1.0).abs() < 1e-12));
        assert!(c.roots.iter().any(|r| (r - (std::f64::consts::PI - 1.0)).abs() < 1e-12));
        let c = t.caustic_of(0.5f64.sinh().powi(2)).unwrap();
        assert_eq!(c.coord, WallCoord::U);
        assert!(c.roots.iter().any(|r| (r - 0.5).abs() < 1e-12));
        assert!(matches!(t.caustic_of(-2.0), Err(BilliardError::NoCausticInChart { .. })));
        assert!(matches!(t.caustic_of(10.0), Err(BilliardError::NoCausticInChart { .. })));
    }

    #[test]
    fn tangent_start_rejected() {
        let t = BilliardTable::elliptic(1.0).unwrap();
        let s = t.metric().phase_point(1.0, 0.7, 0.0, 1.0).unwrap();
        assert_eq!(t.run(&s, 3), Err(BilliardError::TangentRay { bounce: 0 }));
    }

    #[test]
    fn short_run_conserves_mu_and_touches_caustic() {
        let t = BilliardTable::elliptic(1.0).unwrap();
        let s = t.launch(1.0, 0.7, 30f64.to_radians()).unwrap();
        let q = QuadraticIntegral::new(t.metric());
        let mu0 = q.mu_of_direction(&s).unwrap();
        let recs = t.run(&s, 10).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(max_relative_mu_drift(mu0, &recs) < 1e-8);
        for r in &recs {
            assert!(r.tangency_residual.unwrap() < 1e-6);
        }
    }
}
