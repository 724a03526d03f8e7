//! Concurrency of the lines `q₀(m) q_w(m)` joining the two points of
//! tangency of a wall point's incidence plane with `c₀` and `c_w`.

use super::quadric::{PlaneConic, Vec4};
use super::{incidence_plane, DualError};
use nalgebra::{Matrix4, SymmetricEigen};

pub const CONCURRENCY_THRESHOLD: f64 = 1e-6;

/// Incidence planes `(y², 2y, 1, z²)` at height `y` that are tangent to
/// `c_w`, as `z²` values in increasing order. Each root belongs to one of
/// the two cones circumscribed to `c₀` and `c_w`.
pub fn wall_planes_at(cw: &PlaneConic, y: f64) -> Option<[f64; 2]> {
    let q = cw.dual_form();
    let p0 = incidence_plane(0.0, y);
    let e = Vec4::new(0.0, 0.0, 0.0, 1.0);
    let a = e.dot(&(q * e));
    let b = 2.0 * e.dot(&(q * p0));
    let c = p0.dot(&(q * p0));
    let disc = b * b - 4.0 * a * c;
    if a == 0.0 || disc < 0.0 {
        return None;
    }
    let r = -0.5 * (b + disc.sqrt().copysign(b));
    let (s1, s2) = (r / a, if r != 0.0 { c / r } else { -b / a });
    Some(if s1 <= s2 { [s1, s2] } else { [s2, s1] })
}

/// Wall points `(z, y)` of family `branch ∈ {0, 1}` at the given heights,
/// skipping heights where that branch has no real `z`.
pub fn wall_points(cw: &PlaneConic, ys: &[f64], branch: usize) -> Vec<(f64, f64)> {
    ys.iter()
        .filter_map(|&y| {
            let s = wall_planes_at(cw, y)?[branch.min(1)];
            (s > 0.0).then(|| (s.sqrt(), y))
        })
        .collect()
}

/// Tangency points `(q₀, q_w)` of the incidence plane of `(z, y)`.
pub fn tangency_pair(c0: &PlaneConic, cw: &PlaneConic, z: f64, y: f64) -> Result<(Vec4, Vec4), DualError> {
    let pi = incidence_plane(z, y);
    let (_, q0) = c0.tangency(&pi)?;
    let (_, qw) = cw.tangency(&pi)?;
    Ok((q0, qw))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeFit {
    /// Unit representative of the fitted common point.
    pub vertex: Vec4,
    /// Largest distance from the vertex to a line, both taken as subspaces
    /// of ℝ⁴ with the vertex normalized.
    pub spread: f64,
}

/// Least-squares common point of the projective lines through each pair:
/// the vector minimizing the summed squared distances to the 2-planes.
pub fn cone_fit(pairs: &[(Vec4, Vec4)]) -> Result<ConeFit, DualError> {
    if pairs.len() < 3 {
        return Err(DualError::InsufficientSamples(pairs.len()));
    }
    let mut projectors = Vec::with_capacity(pairs.len());
    let mut acc = Matrix4::zeros();
    for (p, q) in pairs {
        let e1 = p.normalize();
        let w = q - e1 * e1.dot(q);
        if w.norm() < 1e-12 * q.norm() {
            return Err(DualError::DegenerateConic);
        }
        let e2 = w.normalize();
        let pr = e1 * e1.transpose() + e2 * e2.transpose();
        acc += Matrix4::identity() - pr;
        projectors.push(pr);
    }
    let eig = SymmetricEigen::new(acc);
    let k = eig.eigenvalues.imin();
    let vertex: Vec4 = eig.eigenvectors.column(k).into_owned();
    let spread = projectors.iter().map(|pr| (vertex - pr * vertex).norm()).fold(0.0, f64::max);
    Ok(ConeFit { vertex, spread })
}

/// [`cone_fit`], failing with `NoConcurrency` above the threshold.
pub fn cone_vertex(pairs: &[(Vec4, Vec4)], threshold: f64) -> Result<ConeFit, DualError> {
    let fit = cone_fit(pairs)?;
    if fit.spread > threshold {
        return Err(DualError::NoConcurrency { spread: fit.spread });
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (PlaneConic, PlaneConic, Vec<(Vec4, Vec4)>) {
        let eps = 1.0;
        let c0 = PlaneConic::c0(eps);
        let cw = PlaneConic::new(Vec4::new(0.3, -0.2, 0.5, 1.0), eps).unwrap();
        let ys: Vec<f64> = (0..40).map(|i| -3.0 + 0.15 * i as f64).collect();
        let pts = wall_points(&cw, &ys, 1);
        let pairs = pts.iter().map(|&(z, y)| tangency_pair(&c0, &cw, z, y).unwrap()).collect();
        (c0, cw, pairs)
    }

    #[test]
    fn wall_planes_are_bitangent() {
        let (c0, cw, _) = setup();
        for (z, y) in wall_points(&cw, &[-1.0, 0.0, 0.5, 2.0], 1) {
            let pi = incidence_plane(z, y);
            assert!(c0.tangency(&pi).unwrap().0.abs() < 1e-14);
            assert!(cw.tangency(&pi).unwrap().0.abs() < 1e-12);
        }
    }

    #[test]
    fn lines_are_concurrent() {
        let (_, _, pairs) = setup();
        assert!(pairs.len() >= 10);
        let fit = cone_vertex(&pairs, CONCURRENCY_THRESHOLD).unwrap();
        assert!(fit.spread < 1e-10, "{}", fit.spread);
    }

    #[test]
    fn perturbation_breaks_concurrency() {
        let (_, _, mut pairs) = setup();
        let n = pairs[3].1.norm();
        pairs[3].1 += Vec4::new(1e-2, 0.0, 0.0, 0.0) * n;
        assert!(matches!(cone_vertex(&pairs, CONCURRENCY_THRESHOLD), Err(DualError::NoConcurrency { .. })));
        assert_eq!(cone_fit(&pairs[..2]), Err(DualError::InsufficientSamples(2)));
    }
}
