//! Billiard dynamics in dual space.
//!
//! A trajectory inside a wall whose geodesics are tangent to the caustic
//! `c_I` is a sequence of points `l_i ∈ c_I`. Consecutive geodesics meet on
//! the wall at `m_i`, whose incidence plane `π_i` contains both and is
//! tangent to `c₀` and `c_w`. Those planes envelop two cones; the wall is
//! one of them, picked by a family label.

use super::quadric::{
    adjugate3, complement4, line_conic_points, projective_distance, real_cubic_roots, ConicChart, PlaneConic, Vec4,
};
use super::DualError;
use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use std::f64::consts::TAU;

/// Bound on the tangency residual of every visited plane.
pub const TANGENCY_TOL: f64 = 1e-8;

/// Convention for the first step from a start on `c_I`: the wall tangency
/// parameter advances by less than half a turn (`Positive`) or by more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBilliardState {
    /// Current geodesic, a point of `c_I`.
    pub l: Vec4,
    /// Incidence plane of the wall point the geodesic arrived from.
    pub pi: Vec4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: DualBilliardState,
    /// More than two planes of the wall family passed through `l_i`.
    pub ambiguous: bool,
}

#[derive(Debug, Clone)]
pub struct PonceletSystem {
    eps: f64,
    family: f64,
    c0: PlaneConic,
    ci: PlaneConic,
    cw: PlaneConic,
    ci_chart: ConicChart,
    cw_chart: ConicChart,
    q0_dual: nalgebra::Matrix4<f64>,
    qw_dual: nalgebra::Matrix4<f64>,
}

fn canonical_plane(pi: &Vec4) -> Vec4 {
    let p = pi.normalize();
    if p[2] < 0.0 {
        -p
    } else {
        p
    }
}

fn wrap_turn(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

impl PonceletSystem {
    /// `family` is `+1` or `−1` and selects one of the two cones.
    pub fn new(eps: f64, ci: Vec4, cw: Vec4, family: i32) -> Result<Self, DualError> {
        if eps != 1.0 && eps != -1.0 {
            return Err(DualError::InvalidEpsilon(eps));
        }
        if projective_distance(&ci, &cw) < 1e-12 {
            return Err(DualError::DegenerateConfig);
        }
        let c0 = PlaneConic::c0(eps);
        let ci = PlaneConic::new(ci, eps)?;
        let cw = PlaneConic::new(cw, eps)?;
        if !ci.is_smooth() || !cw.is_smooth() {
            return Err(DualError::DegenerateConic);
        }
        let ci_chart = ci.parametrization()?;
        let cw_chart = cw.parametrization()?;
        let q0_dual = c0.dual_form();
        let qw_dual = cw.dual_form();
        Ok(Self { eps, family: if family >= 0 { 1.0 } else { -1.0 }, c0, ci, cw, ci_chart, cw_chart, q0_dual, qw_dual })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn caustic(&self) -> &PlaneConic {
        &self.ci
    }

    pub fn wall(&self) -> &PlaneConic {
        &self.cw
    }

    pub fn c0(&self) -> &PlaneConic {
        &self.c0
    }

    /// Point of `c_I` at chart angle `theta`.
    pub fn caustic_point(&self, theta: f64) -> Vec4 {
        super::max_abs_normalize(&self.ci_chart.point(&self.ci, theta))
    }

    /// All real planes through `l` tangent to both `c₀` and `c_w`.
    pub fn planes_through(&self, l: &Vec4) -> Result<Vec<Vec4>, DualError> {
        let w = complement4(l)?;
        let c1: Matrix3<f64> = w.transpose() * self.q0_dual * w;
        let c2: Matrix3<f64> = w.transpose() * self.qw_dual * w;
        let n1 = c1.abs().max();
        let n2 = c2.abs().max();
        if n1 == 0.0 || n2 == 0.0 {
            return Err(DualError::DegenerateConic);
        }
        let (c1, c2) = (c1 / n1, c2 / n2);
        // det(c1 + t c2) as a cubic in t
        let coeffs = [c1.determinant(), (adjugate3(&c1) * c2).trace(), (c1 * adjugate3(&c2)).trace(), c2.determinant()];
        let mut roots = real_cubic_roots(coeffs);
        if coeffs[3].abs() < 1e-12 {
            roots.push(f64::INFINITY);
        }
        for t in roots {
            let d = if t.is_infinite() { c2 } else { c1 + c2 * t };
            let eig = SymmetricEigen::new(d);
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
            let (w1, w2) = (eig.eigenvalues[idx[1]], eig.eigenvalues[idx[2]]);
            if w1 * w2 >= 0.0 {
                continue;
            }
            let (ep, wp, en, wn) = if w1 > 0.0 {
                (eig.eigenvectors.column(idx[1]), w1, eig.eigenvectors.column(idx[2]), w2)
            } else {
                (eig.eigenvectors.column(idx[2]), w2, eig.eigenvectors.column(idx[1]), w1)
            };
            let mut out = Vec::new();
            for sgn in [1.0, -1.0] {
                let line: Vector3<f64> = ep * wp.sqrt() + en * (sgn * (-wn).sqrt());
                for x in line_conic_points(&line, &c1)? {
                    let x = polish(&c1, &c2, x);
                    out.push(canonical_plane(&(w * x)));
                }
            }
            return Ok(out);
        }
        Ok(Vec::new())
    }

    fn label(&self, pi: &Vec4) -> f64 {
        (self.qw_dual * canonical_plane(pi))[3].signum()
    }

    /// Family label (`±1`) of a plane tangent to `c₀` and `c_w`.
    pub fn family_of(&self, pi: &Vec4) -> i32 {
        self.label(pi) as i32
    }

    pub fn family(&self) -> i32 {
        self.family as i32
    }

    /// Planes of the wall family through `l`, and the number of real
    /// bitangent planes of both families.
    pub fn family_planes(&self, l: &Vec4) -> Result<(Vec<Vec4>, usize), DualError> {
        let all = self.planes_through(l)?;
        let n = all.len();
        Ok((all.into_iter().filter(|p| self.label(p) == self.family).collect(), n))
    }

    fn tangency_residual(&self, pi: &Vec4) -> Result<f64, DualError> {
        Ok(self.c0.tangency(pi)?.0.abs().max(self.cw.tangency(pi)?.0.abs()))
    }

    /// Largest tangency residual of `π` against `c₀` and `c_w`.
    pub fn plane_residual(&self, pi: &Vec4) -> Result<f64, DualError> {
        self.tangency_residual(pi)
    }

    /// Second point of `c_I` on the plane `π` through `l`.
    pub fn other_geodesic(&self, l: &Vec4, pi: &Vec4) -> Vec4 {
        let c = &self.ci.form;
        let lam = self.ci.coords(pi);
        let xl = self.ci.coords(l);
        let d = lam.cross(&xl);
        let q = |a: &Vector3<f64>, b: &Vector3<f64>| (a.transpose() * c * b)[0];
        let s = -2.0 * q(&xl, &d) / q(&d, &d);
        let mut y = xl + d * s;
        // project back onto the conic inside the plane
        for _ in 0..2 {
            let g = 2.0 * c * y;
            let n2 = g.norm_squared();
            if n2 > 0.0 {
                y -= g * (q(&y, &y) / n2);
            }
        }
        super::max_abs_normalize(&self.ci.lift(&y))
    }

    fn choose_next(&self, state: &DualBilliardState) -> Result<(Vec4, bool), DualError> {
        let (mut ps, _) = self.family_planes(&state.l)?;
        if ps.len() < 2 {
            return Err(DualError::NoRealContinuation { found: ps.len() });
        }
        ps.sort_by(|a, b| projective_distance(a, &state.pi).total_cmp(&projective_distance(b, &state.pi)));
        Ok((ps[1], ps.len() > 2))
    }

    pub fn step(&self, state: &DualBilliardState) -> Result<StepOutcome, DualError> {
        let (pi, ambiguous) = self.choose_next(state)?;
        let residual = self.tangency_residual(&pi)?;
        if residual > TANGENCY_TOL {
            return Err(DualError::LostTangency { residual });
        }
        let l = self.other_geodesic(&state.l, &pi);
        Ok(StepOutcome { state: DualBilliardState { l, pi }, ambiguous })
    }

    /// Inverse of [`step`](Self::step): returns through the plane the
    /// geodesic arrived from.
    pub fn step_back(&self, state: &DualBilliardState) -> Result<StepOutcome, DualError> {
        let l = self.other_geodesic(&state.l, &state.pi);
        let (pi, ambiguous) = self.choose_next(&DualBilliardState { l, pi: state.pi })?;
        Ok(StepOutcome { state: DualBilliardState { l, pi }, ambiguous })
    }

    /// Chart angle on `c_w` of the point where `π` touches it.
    pub fn wall_angle(&self, pi: &Vec4) -> Result<f64, DualError> {
        let (_, q) = self.cw.tangency(pi)?;
        Ok(self.cw_chart.angle(&self.cw, &q))
    }

    fn oriented_pair(&self, l: &Vec4, orientation: Orientation) -> Result<DualBilliardState, DualError> {
        let (ps, _) = self.family_planes(l)?;
        if ps.len() < 2 {
            return Err(DualError::NoRealContinuation { found: ps.len() });
        }
        let (a, b) = (ps[0], ps[1]);
        let adv = wrap_turn(self.wall_angle(&a)? - self.wall_angle(&b)?);
        let forward_is_a = (adv < std::f64::consts::PI) == (orientation == Orientation::Positive);
        Ok(DualBilliardState { l: *l, pi: if forward_is_a { b } else { a } })
    }

    /// Start at chart angle `theta` of `c_I`, oriented by the first-step rule.
    pub fn start(&self, theta: f64, orientation: Orientation) -> Result<DualBilliardState, DualError> {
        self.oriented_pair(&self.caustic_point(theta), orientation)
    }

    /// `n` starts evenly spaced around `c_I`. The orientation rule is applied
    /// at the first one only; the others follow by continuity.
    pub fn tracked_starts(&self, n: usize, orientation: Orientation) -> Result<Vec<DualBilliardState>, DualError> {
        const SUBSTEPS: usize = 40;
        let mut cur = self.start(0.0, orientation)?;
        let mut out = vec![cur];
        for j in 1..n {
            for s in 1..=SUBSTEPS {
                let th = TAU * ((j - 1) as f64 + s as f64 / SUBSTEPS as f64) / n as f64;
                let l = self.caustic_point(th);
                let (ps, _) = self.family_planes(&l)?;
                let pi = ps
                    .into_iter()
                    .min_by(|a, b| projective_distance(a, &cur.pi).total_cmp(&projective_distance(b, &cur.pi)))
                    .ok_or(DualError::NoRealContinuation { found: 0 })?;
                cur = DualBilliardState { l, pi };
            }
            out.push(cur);
        }
        Ok(out)
    }

    /// States `s₀, …, s_n` of the orbit and the number of ambiguous steps.
    pub fn orbit(&self, start: &DualBilliardState, n: usize) -> Result<(Vec<DualBilliardState>, usize), DualError> {
        let mut states = Vec::with_capacity(n + 1);
        states.push(*start);
        let mut ambiguous = 0;
        for _ in 0..n {
            let o = self.step(states.last().expect("nonempty"))?;
            ambiguous += o.ambiguous as usize;
            states.push(o.state);
        }
        Ok((states, ambiguous))
    }

    /// Per-step advances of the wall tangency parameter, in `[0, 2π)`.
    pub fn advances(&self, start: &DualBilliardState, n: usize) -> Result<Vec<f64>, DualError> {
        let (states, _) = self.orbit(start, n)?;
        let mut prev = self.wall_angle(&states[0].pi)?;
        let mut out = Vec::with_capacity(n);
        for s in &states[1..] {
            let th = self.wall_angle(&s.pi)?;
            out.push(wrap_turn(th - prev));
            prev = th;
        }
        Ok(out)
    }

    /// Rotation number as the Birkhoff average of the advances with the
    /// smooth weight `exp(−1/(t(1−t)))`, in turns.
    pub fn rotation_number(&self, start: &DualBilliardState, n_steps: usize) -> Result<f64, DualError> {
        let d = self.advances(start, n_steps)?;
        Ok(weighted_average(&d) / TAU)
    }
}

fn weighted_average(d: &[f64]) -> f64 {
    let n = d.len() as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, x) in d.iter().enumerate() {
        let t = (i as f64 + 0.5) / n;
        let w = (-1.0 / (t * (1.0 - t))).exp();
        num += w * x;
        den += w;
    }
    num / den
}

/// Newton refinement of a common zero of two ternary quadratic forms,
/// normalized against the seed.
fn polish(c1: &Matrix3<f64>, c2: &Matrix3<f64>, x: Vector3<f64>) -> Vector3<f64> {
    let x0 = x.normalize();
    let mut x = x0;
    for _ in 0..3 {
        let g1 = 2.0 * c1 * x;
        let g2 = 2.0 * c2 * x;
        let f = Vector3::new((x.transpose() * c1 * x)[0], (x.transpose() * c2 * x)[0], x.dot(&x0) - 1.0);
        let j = Matrix3::from_rows(&[g1.transpose(), g2.transpose(), x0.transpose()]);
        match j.lu().solve(&f) {
            Some(dx) if dx.iter().all(|v| v.is_finite()) => x -= dx,
            _ => break,
        }
    }
    x
}

/// Rotation number of the orbit starting at chart angle `theta` of `c_I`.
pub fn rotation_number(
    ci: Vec4,
    cw: Vec4,
    eps: f64,
    family: i32,
    theta: f64,
    orientation: Orientation,
    n_steps: usize,
) -> Result<f64, DualError> {
    let sys = PonceletSystem::new(eps, ci, cw, family)?;
    let s = sys.start(theta, orientation)?;
    sys.rotation_number(&s, n_steps)
}

/// Result of tuning the caustic to a rational rotation number.
#[derive(Debug, Clone)]
pub struct Tuned {
    pub parameter: f64,
    pub system: PonceletSystem,
}

/// Bisects `param ∈ [lo, hi]` so that the `q`-step winding of the wall
/// tangency parameter from the oriented start at angle 0 equals `p` turns.
pub fn tune_rotation(
    make_ci: impl Fn(f64) -> Vec4,
    cw: Vec4,
    eps: f64,
    family: i32,
    orientation: Orientation,
    (lo, hi): (f64, f64),
    (p, q): (u32, u32),
) -> Result<Tuned, DualError> {
    let f = |d: f64| -> Result<(f64, PonceletSystem), DualError> {
        let sys = PonceletSystem::new(eps, make_ci(d), cw, family)?;
        let s = sys.start(0.0, orientation)?;
        let w: f64 = sys.advances(&s, q as usize)?.iter().sum();
        Ok((w / TAU - p as f64, sys))
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, _) = f(a)?;
    let (fb, _) = f(b)?;
    if fa * fb > 0.0 {
        return Err(DualError::NoBracket);
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (fm, _) = f(m)?;
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let m = 0.5 * (a + b);
    Ok(Tuned { parameter: m, system: f(m)?.1 })
}

/// Distance between `l_0` and `l_q` along the orbit from `start`.
pub fn closure_defect(sys: &PonceletSystem, start: &DualBilliardState, q: usize) -> Result<f64, DualError> {
    let (states, _) = sys.orbit(start, q)?;
    Ok(projective_distance(&states[0].l, &states[q].l))
}

/// Covector of `αA + βC + γB + δD` written in the symmetric coordinates
/// `(a, b) ↦ ((a+b)/2, (a−b)/2)` on the `A`, `C` slots.
pub fn sym_covector(a: f64, b: f64, c: f64, d: f64) -> Vec4 {
    Vec4::new(0.5 * (a + b), c, 0.5 * (a - b), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::quadric::quadric_residual;

    fn system(d: f64, family: i32) -> PonceletSystem {
        PonceletSystem::new(-1.0, sym_covector(d, 0.0, 0.0, 1.0), sym_covector(0.5, -0.2, 0.0, 1.0), family).unwrap()
    }

    #[test]
    fn four_bitangent_planes() {
        let sys = system(0.2, -1);
        let l = sys.caustic_point(0.7);
        let all = sys.planes_through(&l).unwrap();
        assert_eq!(all.len(), 4);
        for p in &all {
            assert!(p.dot(&l).abs() < 1e-12);
            assert!(sys.plane_residual(p).unwrap() < 1e-10);
        }
        assert_eq!(sys.family_planes(&l).unwrap().0.len(), 2);
    }

    #[test]
    fn orbit_stays_on_caustic() {
        let sys = system(0.2, -1);
        let s = sys.start(0.3, Orientation::Positive).unwrap();
        let (states, amb) = sys.orbit(&s, 50).unwrap();
        assert_eq!(amb, 0);
        for st in &states {
            assert!(quadric_residual(&st.l, -1.0).abs() < 1e-10);
            assert!(sys.caustic().plane.normalize().dot(&st.l).abs() < 1e-10);
            assert!(st.pi.dot(&st.l).abs() < 1e-10);
        }
    }

    #[test]
    fn step_back_inverts_step() {
        let sys = system(0.2, -1);
        let s = sys.start(1.1, Orientation::Positive).unwrap();
        let f = sys.step(&s).unwrap().state;
        let b = sys.step_back(&f).unwrap().state;
        assert!(projective_distance(&b.l, &s.l) < 1e-9);
        assert!(projective_distance(&b.pi, &s.pi) < 1e-9);
    }

    #[test]
    fn rotation_number_independent_of_start() {
        let sys = system(0.2, -1);
        let starts = sys.tracked_starts(4, Orientation::Positive).unwrap();
        let r: Vec<f64> = starts.iter().map(|s| sys.rotation_number(s, 500).unwrap()).collect();
        let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8, "{r:?}");
    }

    #[test]
    fn coincident_conics_rejected() {
        let c = sym_covector(0.5, -0.2, 0.0, 1.0);
        assert!(matches!(PonceletSystem::new(-1.0, c, c * 2.0, 1), Err(DualError::DegenerateConfig)));
    }
}
