//! Geodesic nets, their bisector nets and the 4-web they form.
//!
//! In isothermal coordinates `(x, y)` with metric `e^{2λ}(dx² + dy²)` the
//! bisector net is annihilated by `ω₁ = T dx + dy`, `ω₂ = −dx + T dy` and
//! the geodesic net by `ω₁ ± P ω₂`. This module evaluates the geodesic
//! condition on `P`, the conformal-flatness condition on `T`, the connection
//! form `γ = α dx + β dy` of the 3-subwebs and its curvature `K_B = β_x − α_y`.
//!
//! The bisector foliation labelled `T` is the one whose leaves are the
//! lines `v = const` of the Liouville chart.

mod bijet;
pub mod hexagon;
pub mod linearize;

pub use bijet::{Dual2, Jet2, Scalar};

use crate::expr::ExprError;
use crate::surface::{Chart, LiouvilleMetric, SurfaceError};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WebError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("a(u) vanishes at ({x}, {y})")]
    ZeroDenominator { x: f64, y: f64 },
    #[error("P vanishes at ({x}, {y})")]
    ZeroP { x: f64, y: f64 },
    #[error("non-finite field value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("web leaf left the chart at ({x}, {y})")]
    LeftChart { x: f64, y: f64 },
    #[error("hexagon construction failed: {0}")]
    Hexagon(String),
    #[error("a(u) vanishes on the integration path near u = {0}")]
    SingularA(f64),
    #[error("b(v) vanishes on the integration path near v = {0}")]
    SingularB(f64),
}

impl From<ExprError> for WebError {
    fn from(e: ExprError) -> Self {
        WebError::Surface(SurfaceError::Expr(e))
    }
}

/// Jets of `T`, `P` and `λ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJets {
    pub t: Jet2,
    pub p: Jet2,
    pub lambda: Jet2,
}

/// Closed-form evaluator of the web fields.
pub trait FieldSource: Send + Sync {
    fn jets(&self, x: f64, y: f64) -> Result<FieldJets, WebError>;
}

/// A web given by its fields over a chart.
#[derive(Clone)]
pub struct WebFields {
    chart: Chart,
    source: Arc<dyn FieldSource>,
}

impl std::fmt::Debug for WebFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WebFields").field("chart", &self.chart).finish_non_exhaustive()
    }
}

/// Unit tangent directions of the bisector leaves (`ω₁ = 0`) and of the two
/// net foliations, in that order.
pub type Directions = [[f64; 2]; 3];

impl WebFields {
    pub fn new(chart: Chart, source: impl FieldSource + 'static) -> Self {
        Self { chart, source: Arc::new(source) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn jets(&self, x: f64, y: f64) -> Result<FieldJets, WebError> {
        let j = self.source.jets(x, y)?;
        if !(j.t.is_finite() && j.p.is_finite() && j.lambda.is_finite()) {
            return Err(WebError::NonFinite { x, y });
        }
        Ok(j)
    }

    /// The bisector leaf has angle `φ = atan(−T)` and the net leaves have
    /// angles `φ ± atan(P)`.
    pub fn directions(&self, x: f64, y: f64) -> Result<Directions, WebError> {
        let j = self.jets(x, y)?;
        let phi = (-j.t.v).atan();
        let psi = j.p.v.atan();
        let dir = |a: f64| [a.cos(), a.sin()];
        Ok([dir(phi), dir(phi + psi), dir(phi - psi)])
    }
}

struct LiouvilleSource {
    metric: LiouvilleMetric,
}

fn ab_jets(m: &LiouvilleMetric, x: f64, y: f64) -> Result<(Jet2, Jet2, Jet2), WebError> {
    let c = m.coeffs(x, y)?;
    if c.a.value == 0.0 {
        return Err(WebError::ZeroDenominator { x, y });
    }
    let a = Jet2::of_x(c.a);
    let b = Jet2::of_y(c.b);
    let lambda = (a * a + b * b).ln().scale(0.5);
    Ok((a, b, lambda))
}

impl FieldSource for LiouvilleSource {
    fn jets(&self, x: f64, y: f64) -> Result<FieldJets, WebError> {
        let (a, b, lambda) = ab_jets(&self.metric, x, y)?;
        Ok(FieldJets { t: Jet2::constant(0.0), p: b / a, lambda })
    }
}

/// The web of a Liouville metric: `T ≡ 0`, `P = b/a`, `λ = ½ log(a² + b²)`.
pub fn liouville_web(m: &LiouvilleMetric) -> WebFields {
    WebFields::new(*m.chart(), LiouvilleSource { metric: m.clone() })
}

struct PerturbedNetSource {
    metric: LiouvilleMetric,
    amplitude: f64,
}

impl FieldSource for PerturbedNetSource {
    fn jets(&self, x: f64, y: f64) -> Result<FieldJets, WebError> {
        let (a, b, lambda) = ab_jets(&self.metric, x, y)?;
        let bump = (Jet2::var_x(x) * Jet2::var_y(y)).scale(self.amplitude);
        Ok(FieldJets { t: Jet2::constant(0.0), p: b / a + bump, lambda })
    }
}

/// Symmetric perturbation `P̃ = b/a + k·u·v` with the bisector kept at `T ≡ 0`.
pub fn perturbed_net(m: &LiouvilleMetric, amplitude: f64) -> WebFields {
    WebFields::new(*m.chart(), PerturbedNetSource { metric: m.clone(), amplitude })
}

struct ControlSource {
    metric: LiouvilleMetric,
    amplitude: f64,
}

impl FieldSource for ControlSource {
    fn jets(&self, x: f64, y: f64) -> Result<FieldJets, WebError> {
        let (a, b, lambda) = ab_jets(&self.metric, x, y)?;
        let bump = (Jet2::var_x(x) * Jet2::var_y(y)).scale(self.amplitude);
        let plus = (b / a + bump).atan();
        let minus = (-(b / a)).atan();
        let phi = (plus + minus).scale(0.5);
        let psi = (plus - minus).scale(0.5);
        Ok(FieldJets { t: -phi.tan(), p: psi.tan(), lambda })
    }
}

/// Control web: one net foliation has slope `b/a + k·u·v`, the other keeps
/// slope `−b/a`, and the bisector net is the one induced by these two.
pub fn control_web(m: &LiouvilleMetric, amplitude: f64) -> WebFields {
    WebFields::new(*m.chart(), ControlSource { metric: m.clone(), amplitude })
}

/// Right-hand side of the geodesic condition, `(P_x, P_y)`.
pub fn p_gradient_rhs<S: Scalar>(t: S, tx: S, ty: S, p: S, lx: S, ly: S) -> (S, S) {
    let one = S::c(1.0);
    let (t2, p2) = (t * t, p * p);
    let d = one + t2;
    let pre = (one + p2) / (p * d);
    let px = pre * ((one + p2) / d * t * tx + (p2 - t2) / d * ty + (t2 - p2) * lx + t * (one + p2) * ly);
    let py = pre * ((one - t2 * p2) / d * tx - (one + p2) / d * t * ty + t * (one + p2) * lx + (one - t2 * p2) * ly);
    (px, py)
}

/// Connection coefficients `(α, β)`.
pub fn connection_coefficients<S: Scalar>(t: S, tx: S, ty: S, p: S, lx: S, ly: S) -> (S, S) {
    let one = S::c(1.0);
    let two = S::c(2.0);
    let (t2, p2) = (t * t, p * p);
    let d = one + t2;
    let pre = one / (d * p2);
    let k = (t2 * p2 + two * p2 + one) / d;
    let alpha = pre * (-(k * t * tx) + (two * t2 * p2 + t2 + p2) / d * ty - t * (one + p2) * (t * lx + ly));
    let beta = pre * (-(k * tx) + (one - t2 * p2) / d * t * ty - (one + p2) * (t * lx + ly));
    (alpha, beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub r_px: f64,
    pub r_py: f64,
    pub r_flat: f64,
}

impl Residuals {
    pub fn max_abs(&self) -> f64 {
        self.r_px.abs().max(self.r_py.abs()).max(self.r_flat.abs())
    }
}

/// Residuals of the geodesic condition on `P` and of the conformal-flatness
/// condition `T_xx + T_yy = 2T(T_x² + T_y²)/(1 + T²)`.
pub fn pde_residuals(w: &WebFields, x: f64, y: f64) -> Result<Residuals, WebError> {
    let j = w.jets(x, y)?;
    if j.p.v == 0.0 {
        return Err(WebError::ZeroP { x, y });
    }
    let (t, p, l) = (j.t, j.p, j.lambda);
    let (px, py) = p_gradient_rhs(t.v, t.x, t.y, p.v, l.x, l.y);
    let r_flat = t.xx + t.yy - 2.0 * t.v * (t.x * t.x + t.y * t.y) / (1.0 + t.v * t.v);
    Ok(Residuals { r_px: p.x - px, r_py: p.y - py, r_flat })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample {
    pub alpha: f64,
    pub beta: f64,
    /// `β_x − α_y` from differentiating the formulas with jets.
    pub k_b: f64,
}

fn connection_dual(w: &WebFields, x: f64, y: f64) -> Result<(Dual2, Dual2), WebError> {
    let j = w.jets(x, y)?;
    if j.p.v == 0.0 {
        return Err(WebError::ZeroP { x, y });
    }
    let (t, p, l) = (j.t, j.p, j.lambda);
    Ok(connection_coefficients(t.grad(), t.d_x(), t.d_y(), p.grad(), l.d_x(), l.d_y()))
}

pub fn connection_and_curvature(w: &WebFields, x: f64, y: f64) -> Result<ConnectionSample, WebError> {
    let (a, b) = connection_dual(w, x, y)?;
    Ok(ConnectionSample { alpha: a.v, beta: b.v, k_b: b.x - a.y })
}

/// `β_x − α_y` by central differences of `α`, `β` with step `h`.
pub fn curvature_by_differences(w: &WebFields, x: f64, y: f64, h: f64) -> Result<f64, WebError> {
    let beta = |x: f64, y: f64| connection_dual(w, x, y).map(|(_, b)| b.v);
    let alpha = |x: f64, y: f64| connection_dual(w, x, y).map(|(a, _)| a.v);
    let bx = (beta(x + h, y)? - beta(x - h, y)?) / (2.0 * h);
    let ay = (alpha(x, y + h)? - alpha(x, y - h)?) / (2.0 * h);
    Ok(bx - ay)
}

/// One row of a residual grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "r_Px")]
    pub r_px: f64,
    #[serde(rename = "r_Py")]
    pub r_py: f64,
    pub r_flat: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
}

/// Rectangle sampled by a residual grid (node-inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let at = |r: (f64, f64), n: usize, i: usize| {
            if n <= 1 {
                0.5 * (r.0 + r.1)
            } else {
                r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (at(self.x, self.nx, i), at(self.y, self.ny, j))))
    }
}

pub fn residual_grid(w: &WebFields, grid: &GridSpec) -> Result<Vec<GridRow>, WebError> {
    grid.nodes()
        .map(|(x, y)| {
            let r = pde_residuals(w, x, y)?;
            let c = connection_and_curvature(w, x, y)?;
            Ok(GridRow { x, y, r_px: r.r_px, r_py: r.r_py, r_flat: r.r_flat, alpha: c.alpha, beta: c.beta, k_b: c.k_b })
        })
        .collect()
}

/// Maxima of the absolute residuals over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridMaxima {
    pub r_px: f64,
    pub r_py: f64,
    pub r_flat: f64,
    pub k_b: f64,
}

impl GridMaxima {
    pub fn of(rows: &[GridRow]) -> Self {
        rows.iter().fold(Self::default(), |m, r| Self {
            r_px: m.r_px.max(r.r_px.abs()),
            r_py: m.r_py.max(r.r_py.abs()),
            r_flat: m.r_flat.max(r.r_flat.abs()),
            k_b: m.k_b.max(r.k_b.abs()),
        })
    }

    pub fn max(&self) -> f64 {
        self.r_px.max(self.r_py).max(self.r_flat).max(self.k_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn elliptic() -> LiouvilleMetric {
        LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.2, 3.0), (0.0, 1.0)).with_v_period(2.0 * PI))
            .unwrap()
    }

    #[test]
    fn flat_web_is_trivial() {
        let m = LiouvilleMetric::parse("1", "1", Chart::rect((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        let w = liouville_web(&m);
        let j = w.jets(0.3, 0.4).unwrap();
        assert_eq!((j.t.v, j.p.v), (0.0, 1.0));
        let c = connection_and_curvature(&w, 0.3, 0.4).unwrap();
        assert_eq!((c.alpha, c.beta), (0.0, 0.0));
    }

    #[test]
    fn elliptic_p_value() {
        let w = liouville_web(&elliptic());
        let p = w.jets(1.0, PI / 2.0).unwrap().p.v;
        assert!((p - 1.0 / 1f64.sinh()).abs() < 1e-15);
        assert!((p - 0.85092).abs() < 1e-5);
    }

    #[test]
    fn reduced_equations_hold() {
        let m = elliptic();
        let w = liouville_web(&m);
        for &(u, v) in &[(0.5, 0.3), (1.0, 1.0), (2.0, 2.5)] {
            let j = w.jets(u, v).unwrap();
            let c = m.coeffs(u, v).unwrap();
            let (l, lu, lv) = (c.lambda(), c.lambda_u(), c.lambda_v());
            let p = j.p.v;
            assert!((j.p.x + p * (1.0 + p * p) / 2.0 * lu / l).abs() < 1e-13);
            assert!((j.p.y - (1.0 + p * p) / (2.0 * p) * lv / l).abs() < 1e-13);
        }
    }

    #[test]
    fn liouville_residuals_vanish() {
        let w = liouville_web(&elliptic());
        let r = pde_residuals(&w, 1.1, 0.8).unwrap();
        assert!(r.max_abs() < 1e-13);
        assert_eq!(r.r_flat, 0.0);
        let c = connection_and_curvature(&w, 1.1, 0.8).unwrap();
        assert!(c.k_b.abs() < 1e-12);
    }

    #[test]
    fn two_curvature_evaluations_agree() {
        let m = elliptic();
        for w in [liouville_web(&m), control_web(&m, 0.1), perturbed_net(&m, 0.1)] {
            let c = connection_and_curvature(&w, 1.0, 1.0).unwrap();
            let fd = curvature_by_differences(&w, 1.0, 1.0, 1e-4).unwrap();
            assert!((c.k_b - fd).abs() < 1e-6, "{} vs {}", c.k_b, fd);
        }
    }

    #[test]
    fn control_web_directions_follow_slopes() {
        let m = elliptic();
        let w = control_web(&m, 0.1);
        let d = w.directions(1.0, 1.0).unwrap();
        let slope = 1f64.sin() / 1f64.sinh() + 0.1;
        assert!((d[1][1] / d[1][0] - slope).abs() < 1e-14);
        assert!((d[2][1] / d[2][0] + 1f64.sin() / 1f64.sinh()).abs() < 1e-14);
    }

    #[test]
    fn zero_denominator() {
        let m = LiouvilleMetric::parse("u", "1", Chart::rect((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        assert!(matches!(liouville_web(&m).jets(0.0, 0.0), Err(WebError::ZeroDenominator { .. })));
    }
}
