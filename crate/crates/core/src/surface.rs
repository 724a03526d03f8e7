//! Liouville metrics `(a(u)^2 + b(v)^2)(du^2 + dv^2)` on a coordinate chart and
//! their unit-speed geodesics.

use crate::expr::{ExprError, Expression, Jet3};
use crate::numeric::ode::{Direction, Event, OdeSystem, Solver, StepFailure, Stop, Tolerances, Trajectory};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("point ({u}, {v}) is outside the chart")]
    OutOfChart { u: f64, v: f64 },
    #[error("zero velocity")]
    ZeroVelocity,
    #[error("metric degenerates at ({u}, {v})")]
    Degenerate { u: f64, v: f64 },
    #[error("no event before arc length {length}")]
    EventNotFound { length: f64 },
    #[error("geodesic left the chart at ({u}, {v})")]
    LeftChart { u: f64, v: f64 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error(transparent)]
    Step(#[from] StepFailure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    U,
    V,
}

impl Coord {
    pub fn index(self) -> usize {
        match self {
            Coord::U => 0,
            Coord::V => 1,
        }
    }

    pub fn other(self) -> Coord {
        match self {
            Coord::U => Coord::V,
            Coord::V => Coord::U,
        }
    }
}

/// Coordinate rectangle; either coordinate may instead be periodic, in
/// which case its bounds only fix the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub u_period: Option<f64>,
    pub v_period: Option<f64>,
}

impl Chart {
    pub fn rect(u: (f64, f64), v: (f64, f64)) -> Self {
        Self { u_min: u.0, u_max: u.1, v_min: v.0, v_max: v.1, u_period: None, v_period: None }
    }

    pub fn with_u_period(mut self, p: f64) -> Self {
        self.u_period = Some(p);
        self.u_max = self.u_min + p;
        self
    }

    pub fn with_v_period(mut self, p: f64) -> Self {
        self.v_period = Some(p);
        self.v_max = self.v_min + p;
        self
    }

    pub fn period(&self, c: Coord) -> Option<f64> {
        match c {
            Coord::U => self.u_period,
            Coord::V => self.v_period,
        }
    }

    pub fn bounds(&self, c: Coord) -> (f64, f64) {
        match c {
            Coord::U => (self.u_min, self.u_max),
            Coord::V => (self.v_min, self.v_max),
        }
    }

    fn validate(&self) -> Result<(), SurfaceError> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(self.u_min, self.u_max) || !ok(self.v_min, self.v_max) {
            return Err(SurfaceError::InvalidChart("bounds must be finite with min < max".into()));
        }
        for p in [self.u_period, self.v_period].into_iter().flatten() {
            if !(p.is_finite() && p > 0.0) {
                return Err(SurfaceError::InvalidChart("period must be positive".into()));
            }
        }
        Ok(())
    }

    /// Maps a coordinate into the fundamental domain when periodic.
    pub fn wrap(&self, c: Coord, x: f64) -> f64 {
        match self.period(c) {
            Some(p) => {
                let lo = self.bounds(c).0;
                lo + (x - lo).rem_euclid(p)
            }
            None => x,
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let inside = |c: Coord, x: f64| {
            if !x.is_finite() {
                return false;
            }
            if self.period(c).is_some() {
                return true;
            }
            let (lo, hi) = self.bounds(c);
            (lo..=hi).contains(&x)
        };
        inside(Coord::U, u) && inside(Coord::V, v)
    }
}

/// Position, velocity and momenta `p = Λ du`, `q = Λ dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub p: f64,
    pub q: f64,
}

impl PhasePoint {
    pub fn state(&self) -> [f64; 4] {
        [self.u, self.v, self.du, self.dv]
    }
}

/// `a`, `b` and their derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs {
    pub a: Jet3,
    pub b: Jet3,
}

impl Coeffs {
    pub fn a2(&self) -> f64 {
        self.a.value * self.a.value
    }

    pub fn b2(&self) -> f64 {
        self.b.value * self.b.value
    }

    pub fn lambda(&self) -> f64 {
        self.a2() + self.b2()
    }

    pub fn lambda_u(&self) -> f64 {
        2.0 * self.a.value * self.a.d1
    }

    pub fn lambda_v(&self) -> f64 {
        2.0 * self.b.value * self.b.d1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleMetric {
    a: Expression,
    b: Expression,
    chart: Chart,
}

const SAMPLE_GRID: usize = 16;

impl LiouvilleMetric {
    /// Builds the metric, checking `a^2 + b^2 > 0` at the cell midpoints of
    /// a sampling grid over the chart.
    pub fn new(a: Expression, b: Expression, chart: Chart) -> Result<Self, SurfaceError> {
        chart.validate()?;
        let m = Self { a, b, chart };
        for i in 0..SAMPLE_GRID {
            for j in 0..SAMPLE_GRID {
                let u = chart.u_min + (i as f64 + 0.5) / SAMPLE_GRID as f64 * (chart.u_max - chart.u_min);
                let v = chart.v_min + (j as f64 + 0.5) / SAMPLE_GRID as f64 * (chart.v_max - chart.v_min);
                let c = m.coeffs_unchecked(u, v)?;
                if !(c.lambda() > 0.0) {
                    return Err(SurfaceError::Degenerate { u, v });
                }
            }
        }
        Ok(m)
    }

    /// Parses `a` in the variable `u` and `b` in `v`.
    pub fn parse(a: &str, b: &str, chart: Chart) -> Result<Self, SurfaceError> {
        Self::new(Expression::parse(a, "u")?, Expression::parse(b, "v")?, chart)
    }

    pub fn a(&self) -> &Expression {
        &self.a
    }

    pub fn b(&self) -> &Expression {
        &self.b
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    fn coeffs_unchecked(&self, u: f64, v: f64) -> Result<Coeffs, SurfaceError> {
        Ok(Coeffs { a: self.a.eval_jet3(u)?, b: self.b.eval_jet3(v)? })
    }

    pub fn coeffs(&self, u: f64, v: f64) -> Result<Coeffs, SurfaceError> {
        if !self.chart.contains(u, v) {
            return Err(SurfaceError::OutOfChart { u, v });
        }
        self.coeffs_unchecked(u, v)
    }

    pub fn lambda(&self, u: f64, v: f64) -> Result<f64, SurfaceError> {
        Ok(self.coeffs(u, v)?.lambda())
    }

    pub fn phase_point(&self, u: f64, v: f64, du: f64, dv: f64) -> Result<PhasePoint, SurfaceError> {
        if du == 0.0 && dv == 0.0 {
            return Err(SurfaceError::ZeroVelocity);
        }
        let l = self.lambda(u, v)?;
        Ok(PhasePoint { u, v, du, dv, p: l * du, q: l * dv })
    }

    fn check(&self, s: &PhasePoint) -> Result<Coeffs, SurfaceError> {
        if s.du == 0.0 && s.dv == 0.0 {
            return Err(SurfaceError::ZeroVelocity);
        }
        self.coeffs(s.u, s.v)
    }

    /// `H = ½ Λ (du² + dv²)`.
    pub fn hamiltonian(&self, s: &PhasePoint) -> Result<f64, SurfaceError> {
        let c = self.check(s)?;
        Ok(0.5 * c.lambda() * (s.du * s.du + s.dv * s.dv))
    }

    /// `g(ξ, ξ) = 2H`.
    pub fn norm2(&self, s: &PhasePoint) -> Result<f64, SurfaceError> {
        Ok(2.0 * self.hamiltonian(s)?)
    }

    /// Rescales the velocity to unit speed and recomputes the momenta.
    pub fn normalize(&self, s: &PhasePoint) -> Result<PhasePoint, SurfaceError> {
        let c = self.check(s)?;
        let l = c.lambda();
        let k = 1.0 / (l * (s.du * s.du + s.dv * s.dv)).sqrt();
        let (du, dv) = (k * s.du, k * s.dv);
        Ok(PhasePoint { u: s.u, v: s.v, du, dv, p: l * du, q: l * dv })
    }

    /// Time derivative of `(u, v, du, dv)` along the geodesic flow.
    pub fn geodesic_rhs(&self, s: &PhasePoint) -> Result<[f64; 4], SurfaceError> {
        self.check(s)?;
        self.rhs_state(&s.state())
    }

    fn rhs_state(&self, y: &[f64; 4]) -> Result<[f64; 4], SurfaceError> {
        let [u, v, du, dv] = *y;
        let c = self.coeffs(u, v)?;
        let l = c.lambda();
        if !(l > 0.0) {
            return Err(SurfaceError::Degenerate { u, v });
        }
        let fu = c.lambda_u() / (2.0 * l);
        let fv = c.lambda_v() / (2.0 * l);
        let ddu = -fu * (du * du - dv * dv) - 2.0 * fv * du * dv;
        let ddv = -fv * (dv * dv - du * du) - 2.0 * fu * du * dv;
        Ok([du, dv, ddu, ddv])
    }

    fn solver(&self, cfg: &IntegratorConfig) -> Solver<'_, Self, 4> {
        Solver::new(self, cfg.tol)
    }

    /// Level function for `c = value`; periodic coordinates use the wrapped
    /// signed distance.
    pub fn level_event(&self, c: Coord, value: f64, direction: Direction) -> Event<'static, 4> {
        let i = c.index();
        match self.chart.period(c) {
            Some(p) => Event {
                g: Box::new(move |y: &[f64; 4]| {
                    let d = (y[i] - value).rem_euclid(p);
                    if d > 0.5 * p {
                        d - p
                    } else {
                        d
                    }
                }),
                direction,
                max_jump: Some(0.5 * p),
            },
            None => Event::new(move |y: &[f64; 4]| y[i] - value, direction),
        }
    }

    /// Integrates the unit-speed geodesic through `s0` until one of `events`
    /// fires or the arc length reaches `max_length`.
    pub fn integrate_with(
        &self,
        s0: &PhasePoint,
        events: &[Event<'_, 4>],
        max_length: f64,
        cfg: &IntegratorConfig,
    ) -> Result<(GeodesicSegment, Stop), SurfaceError> {
        let s = self.normalize(s0)?;
        let chart = self.chart;
        let (traj, stop) = self.solver(cfg).run(0.0, s.state(), max_length, events, |y| {
            if chart.contains(y[0], y[1]) {
                Ok(())
            } else {
                Err(SurfaceError::LeftChart { u: y[0], v: y[1] })
            }
        })?;
        let end = match stop {
            Stop::Event { .. } => EndTag::Event,
            Stop::End => EndTag::ArcLength,
        };
        Ok((GeodesicSegment { traj, end }, stop))
    }

    pub fn integrate(
        &self,
        s0: &PhasePoint,
        stop: StopCondition,
        cfg: &IntegratorConfig,
    ) -> Result<GeodesicSegment, SurfaceError> {
        match stop {
            StopCondition::ArcLength(len) => Ok(self.integrate_with(s0, &[], len, cfg)?.0),
            StopCondition::Level { coord, value, direction } => {
                if !self.chart.contains(s0.u, s0.v) {
                    return Err(SurfaceError::OutOfChart { u: s0.u, v: s0.v });
                }
                let (lo, hi) = self.chart.bounds(coord);
                if self.chart.period(coord).is_none() && !(lo..=hi).contains(&value) {
                    return Err(SurfaceError::EventNotFound { length: 0.0 });
                }
                let ev = [self.level_event(coord, value, direction)];
                let (seg, stop) = self.integrate_with(s0, &ev, cfg.max_length, cfg)?;
                match stop {
                    Stop::Event { .. } => Ok(seg),
                    Stop::End => Err(SurfaceError::EventNotFound { length: cfg.max_length }),
                }
            }
        }
    }

    /// Interior extrema of coordinate `c` along a segment, as (arc length,
    /// state) pairs, located where the corresponding velocity changes sign.
    pub fn turning_points(
        &self,
        seg: &GeodesicSegment,
        c: Coord,
        cfg: &IntegratorConfig,
    ) -> Result<Vec<(f64, [f64; 4])>, SurfaceError> {
        let i = c.index() + 2;
        self.solver(cfg).zeros(&seg.traj, |y| y[i])
    }

    /// State at arc length `t` within the segment.
    pub fn state_at(&self, seg: &GeodesicSegment, t: f64, cfg: &IntegratorConfig) -> Result<[f64; 4], SurfaceError> {
        self.solver(cfg).state_at(&seg.traj, t)
    }

    pub fn phase_of_state(&self, y: &[f64; 4]) -> Result<PhasePoint, SurfaceError> {
        let l = self.coeffs_unchecked(y[0], y[1])?.lambda();
        Ok(PhasePoint { u: y[0], v: y[1], du: y[2], dv: y[3], p: l * y[2], q: l * y[3] })
    }
}

impl OdeSystem<4> for LiouvilleMetric {
    type Error = SurfaceError;
    fn rhs(&self, _t: f64, y: &[f64; 4]) -> Result<[f64; 4], SurfaceError> {
        self.rhs_state(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub tol: Tolerances,
    /// Arc-length budget when searching for a level crossing.
    pub max_length: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { tol: Tolerances::default(), max_length: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    Level { coord: Coord, value: f64, direction: Direction },
    ArcLength(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndTag {
    Event,
    ArcLength,
}

/// Accepted steps of one unit-speed integration run; time is arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub traj: Trajectory<4>,
    pub end: EndTag,
}

impl GeodesicSegment {
    pub fn times(&self) -> &[f64] {
        &self.traj.t
    }

    pub fn states(&self) -> &[[f64; 4]] {
        &self.traj.y
    }

    pub fn start(&self) -> [f64; 4] {
        self.traj.y[0]
    }

    pub fn end_state(&self) -> [f64; 4] {
        self.traj.last().1
    }

    pub fn length(&self) -> f64 {
        self.traj.last().0
    }
}

/// Clairaut metric `E(v) du² + dv²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClairautMetric {
    e: Expression,
    chart: Chart,
}

impl ClairautMetric {
    pub fn new(e: Expression, chart: Chart) -> Result<Self, SurfaceError> {
        chart.validate()?;
        let m = Self { e, chart };
        for j in 0..SAMPLE_GRID {
            let v = chart.v_min + (j as f64 + 0.5) / SAMPLE_GRID as f64 * (chart.v_max - chart.v_min);
            if !(m.e.eval(v)? > 0.0) {
                return Err(SurfaceError::Degenerate { u: chart.u_min, v });
            }
        }
        Ok(m)
    }

    pub fn parse(e: &str, chart: Chart) -> Result<Self, SurfaceError> {
        Self::new(Expression::parse(e, "v")?, chart)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `E(v)` and `E'(v)`, with the chart checked.
    pub fn e_at(&self, u: f64, v: f64) -> Result<(f64, f64), SurfaceError> {
        if !self.chart.contains(u, v) {
            return Err(SurfaceError::OutOfChart { u, v });
        }
        let j = self.e.eval_jet3(v)?;
        Ok((j.value, j.d1))
    }

    /// Unit-speed geodesic over arc length `length`.
    pub fn integrate(
        &self,
        u: f64,
        v: f64,
        du: f64,
        dv: f64,
        length: f64,
        cfg: &IntegratorConfig,
    ) -> Result<Trajectory<4>, SurfaceError> {
        if du == 0.0 && dv == 0.0 {
            return Err(SurfaceError::ZeroVelocity);
        }
        let (e, _) = self.e_at(u, v)?;
        let k = 1.0 / (e * du * du + dv * dv).sqrt();
        let chart = self.chart;
        let (traj, _) = Solver::new(self, cfg.tol).run(0.0, [u, v, k * du, k * dv], length, &[], |y| {
            if chart.contains(y[0], y[1]) {
                Ok(())
            } else {
                Err(SurfaceError::LeftChart { u: y[0], v: y[1] })
            }
        })?;
        Ok(traj)
    }
}

impl OdeSystem<4> for ClairautMetric {
    type Error = SurfaceError;
    fn rhs(&self, _t: f64, y: &[f64; 4]) -> Result<[f64; 4], SurfaceError> {
        let [u, v, du, dv] = *y;
        let (e, ep) = self.e_at(u, v)?;
        if !(e > 0.0) {
            return Err(SurfaceError::Degenerate { u, v });
        }
        Ok([du, dv, -ep / e * du * dv, 0.5 * ep * du * du])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn elliptic() -> LiouvilleMetric {
        LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.1, 3.0), (0.0, 1.0)).with_v_period(2.0 * PI))
            .unwrap()
    }

    fn flat() -> LiouvilleMetric {
        LiouvilleMetric::parse("1", "1", Chart::rect((-10.0, 10.0), (-10.0, 10.0))).unwrap()
    }

    #[test]
    fn hamiltonian_values() {
        let f = flat();
        assert_eq!(f.hamiltonian(&f.phase_point(0.0, 0.0, 1.0, 0.0).unwrap()).unwrap(), 1.0);
        let m = elliptic();
        let h = m.hamiltonian(&m.phase_point(1.0, FRAC_PI_2, 0.0, 1.0).unwrap()).unwrap();
        let expected = 0.5 * (1f64.sinh().powi(2) + 1.0);
        assert!((h - expected).abs() < 1e-14);
        assert!((h - 1.19054).abs() < 1e-5);
        assert_eq!(m.phase_point(1.0, 0.5, 0.0, 0.0), Err(SurfaceError::ZeroVelocity));
        let bad = PhasePoint { u: 1.0, v: 0.5, du: 0.0, dv: 0.0, p: 0.0, q: 0.0 };
        assert_eq!(m.hamiltonian(&bad), Err(SurfaceError::ZeroVelocity));
    }

    #[test]
    fn out_of_chart_rejected() {
        let m = elliptic();
        let s = PhasePoint { u: 5.0, v: 0.5, du: 1.0, dv: 0.0, p: 0.0, q: 0.0 };
        assert!(matches!(m.hamiltonian(&s), Err(SurfaceError::OutOfChart { .. })));
    }

    #[test]
    fn degenerate_metric_rejected() {
        let r = LiouvilleMetric::parse("0", "0", Chart::rect((0.0, 1.0), (0.0, 1.0)));
        assert!(matches!(r, Err(SurfaceError::Degenerate { .. })));
    }

    #[test]
    fn flat_rhs_is_zero() {
        let f = flat();
        let r = f.geodesic_rhs(&f.phase_point(0.3, -0.2, 0.6, 0.8).unwrap()).unwrap();
        assert_eq!(&r[2..], &[0.0, 0.0]);
    }

    #[test]
    fn normalize_gives_unit_speed_and_consistent_momenta() {
        let m = elliptic();
        let s = m.normalize(&m.phase_point(1.2, 0.4, 3.0, -2.0).unwrap()).unwrap();
        assert!((m.norm2(&s).unwrap() - 1.0).abs() < 1e-14);
        let l = m.lambda(s.u, s.v).unwrap();
        assert!((s.p - l * s.du).abs() < 1e-12 && (s.q - l * s.dv).abs() < 1e-12);
    }

    #[test]
    fn flat_event_endpoint() {
        let f = flat();
        let s0 = f.phase_point(0.0, 0.0, 1.0, 1.0).unwrap();
        let stop = StopCondition::Level { coord: Coord::V, value: 1.0, direction: Direction::Rising };
        let seg = f.integrate(&s0, stop, &IntegratorConfig::default()).unwrap();
        let y = seg.end_state();
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
        assert_eq!(seg.end, EndTag::Event);
    }

    #[test]
    fn level_outside_chart_not_found() {
        let f = flat();
        let s0 = f.phase_point(0.0, 0.0, 1.0, 1.0).unwrap();
        let stop = StopCondition::Level { coord: Coord::U, value: 50.0, direction: Direction::Either };
        assert!(matches!(
            f.integrate(&s0, stop, &IntegratorConfig::default()),
            Err(SurfaceError::EventNotFound { .. })
        ));
    }

    #[test]
    fn periodic_level_event_wraps() {
        let m = elliptic();
        // start at v = 6 heading towards larger v; v = 0.1 is reached after wrapping
        let s0 = m.phase_point(1.0, 6.0, 0.0, 1.0).unwrap();
        let stop = StopCondition::Level { coord: Coord::V, value: 0.1, direction: Direction::Rising };
        let seg = m.integrate(&s0, stop, &IntegratorConfig::default()).unwrap();
        let v = m.chart().wrap(Coord::V, seg.end_state()[1]);
        assert!((v - 0.1).abs() < 1e-12);
    }

    #[test]
    fn clairaut_rhs_meridian() {
        let c = ClairautMetric::parse("cosh(v)^2", Chart::rect((-5.0, 5.0), (-2.0, 2.0))).unwrap();
        let r = c.rhs(0.0, &[0.0, 0.5, 0.0, 1.0]).unwrap();
        assert_eq!(r, [0.0, 1.0, 0.0, 0.0]);
    }
}
