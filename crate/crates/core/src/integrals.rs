//! Quadratic and linear first integrals of geodesic flows.
//!
//! For a Liouville metric `Λ(du² + dv²)` with `Λ = a(u)² + b(v)²` the form
//! `I₀ = Λ (b² du² − a² dv²)` is conserved, and so is every member
//! `I_μ = μ g + I₀` of the pencil it spans with the metric. The value of `μ`
//! for which a direction is null labels the caustic it touches.

use crate::surface::{ClairautMetric, Coeffs, LiouvilleMetric, PhasePoint, SurfaceError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegralError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("zero velocity")]
    ZeroVelocity,
    #[error("net directions are complex: a²−μ = {ra}, b²+μ = {rb}")]
    ComplexDirections { ra: f64, rb: f64 },
    #[error("quadratic form is proportional to the metric at ({u}, {v})")]
    ProportionalToMetric { u: f64, v: f64 },
    #[error("no shift of the metric gives real distinct roots near ({u}, {v})")]
    NoRealShift { u: f64, v: f64 },
}

/// Radicands in `(-RADICAND_CLAMP, 0)` are treated as exact tangency.
pub const RADICAND_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct QuadraticIntegral<'m> {
    metric: &'m LiouvilleMetric,
}

/// `I_μ = μ g + I₀`.
#[derive(Debug, Clone, Copy)]
pub struct PencilMember<'m> {
    pub mu: f64,
    pub integral: QuadraticIntegral<'m>,
}

impl PencilMember<'_> {
    pub fn eval(&self, s: &PhasePoint) -> Result<f64, IntegralError> {
        let g = self.integral.metric.norm2(s)?;
        Ok(self.mu * g + self.integral.i0(s)?)
    }
}

/// The two null directions of `I_μ` at a point.
///
/// `minus` is `(√(a²−μ), −√(b²+μ))` and `plus` is `(√(a²−μ), +√(b²+μ))`.
/// They coincide exactly when one radicand vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetDirections {
    pub minus: (f64, f64),
    pub plus: (f64, f64),
}

impl NetDirections {
    pub fn coincide(&self) -> bool {
        let (a, b) = (self.minus, self.plus);
        (a.0 * b.1 - a.1 * b.0).abs() <= 1e-15 * (a.0.hypot(a.1) * b.0.hypot(b.1))
    }
}

impl<'m> QuadraticIntegral<'m> {
    pub fn new(metric: &'m LiouvilleMetric) -> Self {
        Self { metric }
    }

    pub fn metric(&self) -> &'m LiouvilleMetric {
        self.metric
    }

    pub fn pencil(&self, mu: f64) -> PencilMember<'m> {
        PencilMember { mu, integral: *self }
    }

    pub fn i0(&self, s: &PhasePoint) -> Result<f64, IntegralError> {
        let c = self.metric.coeffs(s.u, s.v)?;
        Ok(c.lambda() * (c.b2() * s.du * s.du - c.a2() * s.dv * s.dv))
    }

    fn mu_from(c: &Coeffs, du: f64, dv: f64) -> f64 {
        -(c.b2() * du * du - c.a2() * dv * dv) / (du * du + dv * dv)
    }

    /// The unique `μ` with `I_μ(s) = 0`.
    pub fn mu_of_direction(&self, s: &PhasePoint) -> Result<f64, IntegralError> {
        if s.du == 0.0 && s.dv == 0.0 {
            return Err(IntegralError::ZeroVelocity);
        }
        let c = self.metric.coeffs(s.u, s.v)?;
        Ok(Self::mu_from(&c, s.du, s.dv))
    }

    pub fn mu_at(&self, u: f64, v: f64, du: f64, dv: f64) -> Result<f64, IntegralError> {
        if du == 0.0 && dv == 0.0 {
            return Err(IntegralError::ZeroVelocity);
        }
        let c = self.metric.coeffs(u, v)?;
        Ok(Self::mu_from(&c, du, dv))
    }

    pub fn net_directions(&self, u: f64, v: f64, mu: f64) -> Result<NetDirections, IntegralError> {
        let c = self.metric.coeffs(u, v)?;
        let (ra, rb) = (c.a2() - mu, c.b2() + mu);
        if ra < -RADICAND_CLAMP || rb < -RADICAND_CLAMP {
            return Err(IntegralError::ComplexDirections { ra, rb });
        }
        let (x, y) = (ra.max(0.0).sqrt(), rb.max(0.0).sqrt());
        Ok(NetDirections { minus: (x, -y), plus: (x, y) })
    }

    /// The product form `(q − P p)(q + P p) / (1 + P²)` with `P = b/a`,
    /// written in momenta. It equals `−I₀`.
    pub fn factored(&self, s: &PhasePoint) -> Result<f64, IntegralError> {
        let c = self.metric.coeffs(s.u, s.v)?;
        let pp = c.b.value / c.a.value;
        Ok((s.q - pp * s.p) * (s.q + pp * s.p) / (1.0 + pp * pp))
    }
}

/// A quadratic form field `A du² + 2B du dv + C dv²`, returned as `[A, B, C]`.
pub trait QuadraticForm {
    fn coefficients(&self, u: f64, v: f64) -> Result<[f64; 3], IntegralError>;
}

impl<F> QuadraticForm for F
where
    F: Fn(f64, f64) -> Result<[f64; 3], IntegralError>,
{
    fn coefficients(&self, u: f64, v: f64) -> Result<[f64; 3], IntegralError> {
        self(u, v)
    }
}

/// Result of shifting a quadratic integral by a multiple of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealShift {
    /// Multiple of `H = ½ Λ (du² + dv²)` added to the form.
    pub mu: f64,
    /// Smallest discriminant `B² − (A+s)(C+s)` over the stencil, `s = μΛ/2`.
    pub min_discriminant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConfig {
    pub h: f64,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self { h: 1e-2 }
    }
}

fn discriminant(abc: [f64; 3], lambda: f64, mu: f64) -> f64 {
    let s = 0.5 * mu * lambda;
    let [a, b, c] = abc;
    b * b - (a + s) * (c + s)
}

/// Finds `μ*` such that `μ* H + I2` has two distinct real null directions at
/// every point of a 3×3 stencil around `(u, v)`.
///
/// Candidates are tried in order: `0`, the pointwise optimum `−(A+C)/Λ`, then
/// `±2^k` for `k = −30..=30`.
pub fn real_root_normalize<Q: QuadraticForm + ?Sized>(
    m: &LiouvilleMetric,
    i2: &Q,
    u: f64,
    v: f64,
    cfg: StencilConfig,
) -> Result<RealShift, IntegralError> {
    let here = i2.coefficients(u, v)?;
    let lambda = m.lambda(u, v)?;
    let [a, b, c] = here;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(f64::MIN_POSITIVE);
    if (a - c).abs() <= 1e-12 * scale && b.abs() <= 1e-12 * scale {
        return Err(IntegralError::ProportionalToMetric { u, v });
    }
    let mut stencil = Vec::with_capacity(9);
    for i in -1..=1 {
        for j in -1..=1 {
            let (x, y) = (u + i as f64 * cfg.h, v + j as f64 * cfg.h);
            if !m.chart().contains(x, y) {
                continue;
            }
            stencil.push((i2.coefficients(x, y)?, m.lambda(x, y)?));
        }
    }
    let mut candidates = vec![0.0, -(a + c) / lambda];
    for k in -30..=30 {
        let p = 2f64.powi(k);
        candidates.push(p);
        candidates.push(-p);
    }
    for mu in candidates {
        let min = stencil.iter().map(|&(abc, l)| discriminant(abc, l, mu)).fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            return Ok(RealShift { mu, min_discriminant: min });
        }
    }
    Err(IntegralError::NoRealShift { u, v })
}

/// Coefficients of `I₀` as a quadratic form.
pub fn i0_form(m: &LiouvilleMetric) -> impl Fn(f64, f64) -> Result<[f64; 3], IntegralError> + '_ {
    move |u, v| {
        let c = m.coeffs(u, v)?;
        let l = c.lambda();
        Ok([l * c.b2(), 0.0, -l * c.a2()])
    }
}

/// Coefficients of the metric `g = Λ(du² + dv²)`.
pub fn metric_form(m: &LiouvilleMetric) -> impl Fn(f64, f64) -> Result<[f64; 3], IntegralError> + '_ {
    move |u, v| {
        let l = m.lambda(u, v)?;
        Ok([l, 0.0, l])
    }
}

/// The Clairaut integral `p = E(v) du` of `E(v) du² + dv²`.
pub fn clairaut_eval(m: &ClairautMetric, u: f64, v: f64, du: f64, _dv: f64) -> Result<f64, IntegralError> {
    let (e, _) = m.e_at(u, v)?;
    Ok(e * du)
}
