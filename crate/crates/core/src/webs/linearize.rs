//! Linearizing coordinates `U = ∫ du/a`, `V = ∫ dv/b` of the Liouville 4-web.
//!
//! In `(U, V)` the bisector leaves are the lines `U = const` and
//! `V = const` and the net leaves are `U ± V = const`.

use super::WebError;
use crate::numeric::ode::{OdeSystem, Solver, Tolerances};
use crate::numeric::quad;
use crate::surface::LiouvilleMetric;

const PATH_SAMPLES: usize = 64;

/// Anchored primitive of `1/a` and `1/b`.
#[derive(Debug, Clone)]
pub struct Linearization<'m> {
    metric: &'m LiouvilleMetric,
    anchor: (f64, f64),
    tol: f64,
}

impl<'m> Linearization<'m> {
    pub fn new(metric: &'m LiouvilleMetric, anchor: (f64, f64)) -> Self {
        Self { metric, anchor, tol: 1e-13 }
    }

    fn primitive(
        &self,
        f: &crate::expr::Expression,
        from: f64,
        to: f64,
        singular: fn(f64) -> WebError,
    ) -> Result<f64, WebError> {
        let sign0 = f.eval(from)?.signum();
        for i in 0..=PATH_SAMPLES {
            let s = from + (to - from) * i as f64 / PATH_SAMPLES as f64;
            let fs = f.eval(s)?;
            if fs == 0.0 || fs.signum() != sign0 {
                return Err(singular(s));
            }
        }
        quad::integrate(|s| f.eval(s).ok().map(|x| 1.0 / x), from, to, self.tol).ok_or_else(|| singular(to))
    }

    /// `(U, V)` at `(u, v)`.
    pub fn coords(&self, u: f64, v: f64) -> Result<(f64, f64), WebError> {
        let uu = self.primitive(self.metric.a(), self.anchor.0, u, WebError::SingularA)?;
        let vv = self.primitive(self.metric.b(), self.anchor.1, v, WebError::SingularB)?;
        Ok((uu, vv))
    }
}

pub fn linearize(m: &LiouvilleMetric, anchor: (f64, f64), u: f64, v: f64) -> Result<(f64, f64), WebError> {
    Linearization::new(m, anchor).coords(u, v)
}

/// Images in `(U, V)` of the directions of the four foliations at `(u, v)`:
/// `∂_v`, `∂_u`, `a∂_u + b∂_v`, `a∂_u − b∂_v`.
pub fn web_directions_uv(m: &LiouvilleMetric, u: f64, v: f64) -> Result<[[f64; 2]; 4], WebError> {
    let c = m.coeffs(u, v)?;
    let (a, b) = (c.a.value, c.b.value);
    if a == 0.0 {
        return Err(WebError::SingularA(u));
    }
    if b == 0.0 {
        return Err(WebError::SingularB(v));
    }
    let push = |du: f64, dv: f64| [du / a, dv / b];
    Ok([push(0.0, 1.0), push(1.0, 0.0), push(a, b), push(a, -b)])
}

/// Cross ratio `(d₁, d₂; d₃, d₄)` of four directions as points of the
/// projective line.
pub fn cross_ratio(d: [[f64; 2]; 4]) -> f64 {
    let det = |p: [f64; 2], q: [f64; 2]| p[0] * q[1] - p[1] * q[0];
    (det(d[2], d[0]) * det(d[3], d[1])) / (det(d[2], d[1]) * det(d[3], d[0]))
}

struct NetLeaf<'m> {
    metric: &'m LiouvilleMetric,
    sign: f64,
}

impl OdeSystem<2> for NetLeaf<'_> {
    type Error = WebError;
    fn rhs(&self, _t: f64, p: &[f64; 2]) -> Result<[f64; 2], WebError> {
        let c = self.metric.coeffs(p[0], p[1])?;
        let (a, b) = (c.a.value, self.sign * c.b.value);
        let n = a.hypot(b);
        Ok([a / n, b / n])
    }
}

/// Samples `samples` points, evenly spaced in arc length, of the net leaf
/// through `start` with direction `a∂_u ± b∂_v`.
pub fn net_leaf(
    m: &LiouvilleMetric,
    start: (f64, f64),
    plus: bool,
    length: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>, WebError> {
    let sys = NetLeaf { metric: m, sign: if plus { 1.0 } else { -1.0 } };
    let chart = *m.chart();
    let solver = Solver::new(&sys, Tolerances { rtol: 1e-12, atol: 1e-14, ..Tolerances::default() });
    let (traj, _) = solver.run(0.0, [start.0, start.1], length, &[], |y| {
        if chart.contains(y[0], y[1]) {
            Ok(())
        } else {
            Err(WebError::LeftChart { x: y[0], y: y[1] })
        }
    })?;
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let y = solver.state_at(&traj, length * i as f64 / (n - 1) as f64)?;
            Ok((y[0], y[1]))
        })
        .collect()
}

/// Traces the net leaf through `start`, maps `samples` points to `(U, V)`
/// and returns the largest distance from the chord between the first and
/// last image, relative to the chord length.
pub fn net_leaf_collinearity(
    m: &LiouvilleMetric,
    anchor: (f64, f64),
    start: (f64, f64),
    plus: bool,
    length: f64,
    samples: usize,
) -> Result<f64, WebError> {
    let lin = Linearization::new(m, anchor);
    let pts = net_leaf(m, start, plus, length, samples.max(3))?
        .into_iter()
        .map(|(u, v)| lin.coords(u, v))
        .collect::<Result<Vec<_>, _>>()?;
    let (p, q) = (pts[0], pts[pts.len() - 1]);
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let len = dx.hypot(dy);
    Ok(pts.iter().map(|r| ((r.0 - p.0) * dy - (r.1 - p.1) * dx).abs() / len).fold(0.0, f64::max) / len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Chart;

    #[test]
    fn flat_is_identity() {
        let m = LiouvilleMetric::parse("1", "1", Chart::rect((-2.0, 2.0), (-2.0, 2.0))).unwrap();
        let (uu, vv) = linearize(&m, (0.0, 0.0), 0.7, -1.3).unwrap();
        assert!((uu - 0.7).abs() < 1e-14 && (vv + 1.3).abs() < 1e-14);
    }

    #[test]
    fn sinh_primitive_closed_form() {
        let m = LiouvilleMetric::parse("sinh(u)", "1", Chart::rect((0.1, 3.0), (-1.0, 1.0))).unwrap();
        let (uu, _) = linearize(&m, (1.0, 0.0), 2.2, 0.0).unwrap();
        let exact = (1.1f64).tanh().ln() - (0.5f64).tanh().ln();
        assert!((uu - exact).abs() < 1e-9);
    }

    #[test]
    fn singular_path_rejected() {
        let m = LiouvilleMetric::parse("sinh(u)", "1", Chart::rect((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        assert!(matches!(linearize(&m, (0.5, 0.0), -0.5, 0.0), Err(WebError::SingularA(_))));
    }

    #[test]
    fn harmonic_cross_ratio() {
        let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.1, 3.0), (0.1, 3.0))).unwrap();
        assert_eq!(cross_ratio(web_directions_uv(&m, 1.3, 0.4).unwrap()), -1.0);
    }
}
