//! The ε-surface `z³y″ = ε(y′)³` and the projective picture of its
//! geodesics.
//!
//! Non-special geodesics are the conics `k²(y−l)² − kz² = ε`; writing them as
//! `Ay² + 2By + C + Dz² = 0` identifies each one with a point `[A:B:C:D]` of
//! the quadric `AC − B² + εD² = 0`. The geodesics through a surface point
//! `(z, y)` form the section of the quadric by the incidence plane
//! `(y², 2y, 1, z²)`. Special geodesics `y = l₀` are the points of the conic
//! `c₀ = {D = 0}`.

pub mod cone;
pub mod poncelet;
pub mod quadric;

pub use cone::{cone_vertex, ConeFit};
pub use poncelet::{rotation_number, DualBilliardState, Orientation, PonceletSystem};
pub use quadric::{max_abs_normalize, project_to_quadric, quadric_residual, PlaneConic, Vec4};

use crate::numeric::ode::{OdeSystem, Solver, StepFailure, Tolerances};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DualError {
    #[error("epsilon must be +1 or -1, got {0}")]
    InvalidEpsilon(f64),
    #[error("point (z={z}, y={y}) is outside the chart z > {z_min}")]
    OutOfChart { z: f64, y: f64, z_min: f64 },
    #[error("no geodesic of the family has this slope at this point (k = 0)")]
    DegenerateK,
    #[error("k must be nonzero")]
    ZeroK,
    #[error("degenerate conic section")]
    DegenerateConic,
    #[error("plane section has no real points")]
    NoRealConic,
    #[error("need at least 3 wall samples, got {0}")]
    InsufficientSamples(usize),
    #[error("tangent lines are not concurrent: spread {spread:.3e}")]
    NoConcurrency { spread: f64 },
    #[error("no real continuation: {found} planes of the wall family through the current geodesic")]
    NoRealContinuation { found: usize },
    #[error("tangency lost: residual {residual:.3e}")]
    LostTangency { residual: f64 },
    #[error("caustic and wall conics coincide")]
    DegenerateConfig,
    #[error("geodesic left the chart at z = {z}")]
    LeftChart { z: f64 },
    #[error("bisection did not bracket the target rotation number")]
    NoBracket,
    #[error("integrator failure: {0}")]
    Step(String),
}

impl From<StepFailure> for DualError {
    fn from(e: StepFailure) -> Self {
        DualError::Step(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSurface {
    eps: f64,
    z_min: f64,
}

/// A geodesic through a point, in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicConic {
    /// `k²(y−l)² − kz² = ε`.
    Regular { k: f64, l: f64 },
    /// `y = l₀`.
    Special { l0: f64 },
}

impl EpsSurface {
    pub fn new(eps: f64, z_min: f64) -> Result<Self, DualError> {
        if eps != 1.0 && eps != -1.0 {
            return Err(DualError::InvalidEpsilon(eps));
        }
        Ok(Self { eps, z_min: z_min.max(0.0) })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    fn check(&self, z: f64, y: f64) -> Result<(), DualError> {
        if z > self.z_min && z.is_finite() && y.is_finite() {
            Ok(())
        } else {
            Err(DualError::OutOfChart { z, y, z_min: self.z_min })
        }
    }

    pub fn geodesic_through(&self, z: f64, y: f64, slope: f64) -> Result<GeodesicConic, DualError> {
        self.check(z, y)?;
        if slope == 0.0 {
            return Ok(GeodesicConic::Special { l0: y });
        }
        let r = z / slope;
        let k = (r * r - self.eps) / (z * z);
        if k.abs() <= 1e-14 * (r * r).max(1.0) / (z * z) {
            return Err(DualError::DegenerateK);
        }
        Ok(GeodesicConic::Regular { k, l: y - z / (k * slope) })
    }

    /// `k²(y−l)² − kz² − ε`, zero on the geodesic.
    pub fn conic_residual(&self, g: GeodesicConic, z: f64, y: f64) -> f64 {
        match g {
            GeodesicConic::Regular { k, l } => k * k * (y - l) * (y - l) - k * z * z - self.eps,
            GeodesicConic::Special { l0 } => y - l0,
        }
    }

    pub fn dual_point(&self, g: GeodesicConic) -> Result<Vec4, DualError> {
        match g {
            GeodesicConic::Regular { k, l } => dual_point(k, l, self.eps),
            GeodesicConic::Special { l0 } => Ok(dual_point_special(l0)),
        }
    }

    /// Traces the geodesic through `(z₀, y₀)` leaving with slope `dy/dz`
    /// towards increasing `z`, for Euclidean arc length `length` in the
    /// `(z, y)` half-plane. See [`integrate_curve`](Self::integrate_curve).
    pub fn integrate_geodesic(&self, z0: f64, y0: f64, slope: f64, length: f64) -> Result<Vec<[f64; 3]>, DualError> {
        self.integrate_curve(z0, y0, slope.atan(), length)
    }

    /// Integrates `z³y″ = ε(y′)³` as a curve: with unit tangent
    /// `(cos θ, sin θ)` the equation reads `θ′ = ε sin³θ / z³`, which stays
    /// regular through vertical tangents. Returns samples `(z, y, θ)`.
    pub fn integrate_curve(&self, z0: f64, y0: f64, theta0: f64, length: f64) -> Result<Vec<[f64; 3]>, DualError> {
        self.check(z0, y0)?;
        let sys = EpsGeodesic { eps: self.eps, z_min: self.z_min };
        let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Tolerances::default() };
        let (traj, _) = Solver::new(&sys, tol).run(0.0, [z0, y0, theta0], length, &[], |s| {
            if s[0] > self.z_min {
                Ok(())
            } else {
                Err(DualError::LeftChart { z: s[0] })
            }
        })?;
        Ok(traj.y)
    }
}

struct EpsGeodesic {
    eps: f64,
    z_min: f64,
}

impl OdeSystem<3> for EpsGeodesic {
    type Error = DualError;
    fn rhs(&self, _t: f64, s: &[f64; 3]) -> Result<[f64; 3], DualError> {
        let z = s[0];
        if z <= self.z_min {
            return Err(DualError::LeftChart { z });
        }
        let (sn, cs) = s[2].sin_cos();
        Ok([cs, sn, self.eps * sn * sn * sn / (z * z * z)])
    }
}

/// `[k² : −k²l : k²l²−ε : −k]`, max-abs normalized.
pub fn dual_point(k: f64, l: f64, eps: f64) -> Result<Vec4, DualError> {
    if k == 0.0 || !k.is_finite() {
        return Err(DualError::ZeroK);
    }
    let k2 = k * k;
    Ok(max_abs_normalize(&Vec4::new(k2, -k2 * l, k2 * l * l - eps, -k)))
}

/// The double line `(y − l₀)² = 0`.
pub fn dual_point_special(l0: f64) -> Vec4 {
    max_abs_normalize(&Vec4::new(1.0, -l0, l0 * l0, 0.0))
}

/// Plane of geodesics through `(z, y)`.
pub fn incidence_plane(z: f64, y: f64) -> Vec4 {
    Vec4::new(y * y, 2.0 * y, 1.0, z * z)
}

/// Surface point `(z, y)` whose incidence plane is `π`, if `π` is one.
pub fn incidence_point(pi: &Vec4) -> Option<(f64, f64)> {
    if pi[2] == 0.0 {
        return None;
    }
    let p = pi / pi[2];
    let y = 0.5 * p[1];
    if (p[0] - y * y).abs() > 1e-8 * (1.0 + y * y) || p[3] <= 0.0 {
        return None;
    }
    Some((p[3].sqrt(), y))
}

/// Evaluates the geodesic `[A:B:C:D]` at `(z, y)`.
pub fn conic_value(l: &Vec4, z: f64, y: f64) -> f64 {
    incidence_plane(z, y).dot(l)
}
