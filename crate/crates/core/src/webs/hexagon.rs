//! Hexagon closure test for the 3-web formed by the bisector foliation and
//! the two net foliations.
//!
//! Starting at `p₀`, the point at distance `ε` from the centre `m` along the
//! bisector leaf, the path moves along foliation `X` until it meets the leaf
//! of foliation `Y` through `m`, for the pairs
//! `(net−, net+), (bisector, net−), (net+, bisector)` repeated twice. On a
//! hexagonal web the sixth point is `p₀` again; the distance between them is
//! the closure defect.

use super::{WebError, WebFields};
use crate::numeric::ode::{OdeSystem, Solver, StepFailure, Tolerances};
use crate::numeric::roots::secant;

/// How leaves are traced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowScheme {
    /// Kutta's third-order method with a fixed number of substeps per flow,
    /// so the tracing error scales with the hexagon size.
    FixedRk3 { substeps: usize },
    /// Adaptive Dormand–Prince integration.
    Adaptive(Tolerances),
}

impl Default for FlowScheme {
    fn default() -> Self {
        FlowScheme::FixedRk3 { substeps: 4 }
    }
}

pub const BISECTOR: usize = 0;
pub const NET_PLUS: usize = 1;
pub const NET_MINUS: usize = 2;

/// Foliation pairs `(move along, stop at leaf through m)`.
pub const SEQUENCE: [(usize, usize); 6] = [
    (NET_MINUS, NET_PLUS),
    (BISECTOR, NET_MINUS),
    (NET_PLUS, BISECTOR),
    (NET_MINUS, NET_PLUS),
    (BISECTOR, NET_MINUS),
    (NET_PLUS, BISECTOR),
];

struct Leaf<'w> {
    web: &'w WebFields,
    k: usize,
    sign: f64,
}

impl From<StepFailure> for WebError {
    fn from(e: StepFailure) -> Self {
        WebError::Hexagon(e.to_string())
    }
}

impl OdeSystem<2> for Leaf<'_> {
    type Error = WebError;
    fn rhs(&self, _t: f64, p: &[f64; 2]) -> Result<[f64; 2], WebError> {
        let d = self.web.directions(p[0], p[1])?[self.k];
        Ok([self.sign * d[0], self.sign * d[1]])
    }
}

pub struct Tracer<'w> {
    web: &'w WebFields,
    scheme: FlowScheme,
}

impl<'w> Tracer<'w> {
    pub fn new(web: &'w WebFields, scheme: FlowScheme) -> Self {
        Self { web, scheme }
    }

    fn dir(&self, k: usize, p: [f64; 2]) -> Result<[f64; 2], WebError> {
        if !self.web.chart().contains(p[0], p[1]) {
            return Err(WebError::LeftChart { x: p[0], y: p[1] });
        }
        Ok(self.web.directions(p[0], p[1])?[k])
    }

    /// Moves arc length `s` (signed) along the leaf of foliation `k` through `p`.
    pub fn flow(&self, k: usize, p: [f64; 2], s: f64) -> Result<[f64; 2], WebError> {
        match self.scheme {
            FlowScheme::FixedRk3 { substeps } => {
                let n = substeps.max(1);
                let h = s / n as f64;
                let mut x = p;
                for _ in 0..n {
                    let k1 = self.dir(k, x)?;
                    let k2 = self.dir(k, [x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]])?;
                    let k3 = self.dir(k, [x[0] + h * (2.0 * k2[0] - k1[0]), x[1] + h * (2.0 * k2[1] - k1[1])])?;
                    for i in 0..2 {
                        x[i] += h / 6.0 * (k1[i] + 4.0 * k2[i] + k3[i]);
                    }
                }
                self.dir(k, x)?;
                Ok(x)
            }
            FlowScheme::Adaptive(tol) => {
                let sys = Leaf { web: self.web, k, sign: s.signum() };
                let chart = *self.web.chart();
                let (traj, _) = Solver::new(&sys, tol).run(0.0, p, s.abs(), &[], |y| {
                    if chart.contains(y[0], y[1]) {
                        Ok(())
                    } else {
                        Err(WebError::LeftChart { x: y[0], y: y[1] })
                    }
                })?;
                Ok(traj.last().1)
            }
        }
    }

    /// Signed offset, along the normal of foliation `k` at `m`, of the point
    /// where the leaf through `q` crosses the normal line through `m`. Zero
    /// exactly when `q` lies on the leaf through `m`.
    pub fn leaf_offset(&self, k: usize, m: [f64; 2], q: [f64; 2]) -> Result<f64, WebError> {
        let e = self.dir(k, m)?;
        let n = [-e[1], e[0]];
        let along = |x: [f64; 2]| (x[0] - m[0]) * e[0] + (x[1] - m[1]) * e[1];
        let s1 = -along(q);
        let s = if s1 == 0.0 {
            0.0
        } else {
            secant(|s| Ok::<_, WebError>(along(self.flow(k, q, s)?)), 0.0, s1, 1e-15, 60)?
                .ok_or_else(|| WebError::Hexagon("leaf does not reach the transversal".into()))?
        };
        let x = self.flow(k, q, s)?;
        Ok((x[0] - m[0]) * n[0] + (x[1] - m[1]) * n[1])
    }

    /// Follows foliation `kx` from `p` to the leaf of foliation `ky` through `m`.
    pub fn move_to_leaf(&self, kx: usize, ky: usize, p: [f64; 2], m: [f64; 2]) -> Result<[f64; 2], WebError> {
        let ex = self.dir(kx, p)?;
        let ey = self.dir(ky, m)?;
        let det = -ex[0] * ey[1] + ey[0] * ex[1];
        if det.abs() < 1e-14 {
            return Err(WebError::Hexagon("foliations are not transverse".into()));
        }
        let (rx, ry) = (m[0] - p[0], m[1] - p[1]);
        let t = (-rx * ey[1] + ey[0] * ry) / det;
        if t == 0.0 {
            return Ok(p);
        }
        let t = secant(|t| self.leaf_offset(ky, m, self.flow(kx, p, t)?), 0.9 * t, t, 1e-15, 60)?
            .ok_or_else(|| WebError::Hexagon("no intersection with the target leaf".into()))?;
        self.flow(kx, p, t)
    }
}

/// Distance between the first and sixth vertex of the closure hexagon of
/// size `eps` around `center`.
pub fn hexagon_defect(w: &WebFields, center: [f64; 2], eps: f64, scheme: FlowScheme) -> Result<f64, WebError> {
    let tr = Tracer::new(w, scheme);
    let p0 = tr.flow(BISECTOR, center, eps)?;
    let mut p = p0;
    for &(kx, ky) in &SEQUENCE {
        p = tr.move_to_leaf(kx, ky, p, center)?;
    }
    Ok((p[0] - p0[0]).hypot(p[1] - p0[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Chart, LiouvilleMetric};
    use crate::webs::{control_web, liouville_web};

    fn metric() -> LiouvilleMetric {
        LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.3, 2.0), (0.3, 2.0))).unwrap()
    }

    #[test]
    fn flat_web_closes_exactly() {
        let m = LiouvilleMetric::parse("1", "1", Chart::rect((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        let d = hexagon_defect(&liouville_web(&m), [0.0, 0.0], 0.1, FlowScheme::default()).unwrap();
        assert!(d < 1e-14, "{d}");
    }

    #[test]
    fn adaptive_liouville_defect_is_tiny() {
        let w = liouville_web(&metric());
        let d = hexagon_defect(&w, [1.0, 1.0], 0.05, FlowScheme::Adaptive(Tolerances::default())).unwrap();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn control_defect_is_cubic() {
        let w = control_web(&metric(), 0.1);
        let d1 = hexagon_defect(&w, [1.0, 1.0], 0.05, FlowScheme::default()).unwrap();
        let d2 = hexagon_defect(&w, [1.0, 1.0], 0.025, FlowScheme::default()).unwrap();
        let r = d1 / d2;
        assert!(r > 6.0 && r < 10.0, "{r}");
    }

    #[test]
    fn leaf_offset_vanishes_on_leaf() {
        let w = liouville_web(&metric());
        let tr = Tracer::new(&w, FlowScheme::Adaptive(Tolerances::default()));
        let m = [1.0, 1.0];
        let q = tr.flow(NET_PLUS, m, 0.07).unwrap();
        assert!(tr.leaf_offset(NET_PLUS, m, q).unwrap().abs() < 1e-10);
    }
}
