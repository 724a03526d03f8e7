//! The quadric `AC − B² + εD² = 0` of geodesics and its plane sections.

use super::DualError;
use nalgebra::{Matrix2, Matrix3, Matrix3x2, Matrix4, Matrix4x3, SymmetricEigen, Vector2, Vector3, Vector4};

pub type Vec4 = Vector4<f64>;

/// Gram matrix of `AC − B² + εD²`.
pub fn quadric_matrix(eps: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 2)] = 0.5;
    m[(2, 0)] = 0.5;
    m[(1, 1)] = -1.0;
    m[(3, 3)] = eps;
    m
}

pub fn quadric_residual(x: &Vec4, eps: f64) -> f64 {
    x[0] * x[2] - x[1] * x[1] + eps * x[3] * x[3]
}

/// Scales so that the largest-magnitude component is `+1`.
pub fn max_abs_normalize(x: &Vec4) -> Vec4 {
    let k = x.iamax();
    x / x[k]
}

/// One Newton step towards the quadric along the gradient.
pub fn project_to_quadric(x: &Vec4, eps: f64) -> Vec4 {
    let m = quadric_matrix(eps);
    let g = 2.0 * m * x;
    let n2 = g.norm_squared();
    if n2 == 0.0 {
        return *x;
    }
    x - g * (quadric_residual(x, eps) / n2)
}

/// Distance between projective points as unit vectors, up to sign.
pub fn projective_distance(p: &Vec4, q: &Vec4) -> f64 {
    let (p, q) = (p.normalize(), q.normalize());
    (p - q).norm().min((p + q).norm())
}

/// Orthonormal basis of the orthogonal complement of `s`, from the
/// Householder reflection that maps `s` to a coordinate axis.
pub fn complement4(s: &Vec4) -> Result<Matrix4x3<f64>, DualError> {
    let n = s.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(DualError::DegenerateConic);
    }
    let s = s / n;
    let k = s.iamax();
    let mut w = s;
    w[k] += s[k].signum();
    let w = w.normalize();
    let h = Matrix4::identity() - 2.0 * w * w.transpose();
    let mut b = Matrix4x3::zeros();
    let mut j = 0;
    for i in 0..4 {
        if i != k {
            b.set_column(j, &h.column(i));
            j += 1;
        }
    }
    Ok(b)
}

pub fn complement3(s: &Vector3<f64>) -> Result<Matrix3x2<f64>, DualError> {
    let n = s.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(DualError::DegenerateConic);
    }
    let s = s / n;
    let k = s.iamax();
    let mut w = s;
    w[k] += s[k].signum();
    let w = w.normalize();
    let h = Matrix3::identity() - 2.0 * w * w.transpose();
    let mut b = Matrix3x2::zeros();
    let mut j = 0;
    for i in 0..3 {
        if i != k {
            b.set_column(j, &h.column(i));
            j += 1;
        }
    }
    Ok(b)
}

pub fn adjugate3(c: &Matrix3<f64>) -> Matrix3<f64> {
    let m = |i: usize, j: usize| c[(i, j)];
    let mut a = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            a[(i, j)] = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
        }
    }
    a
}

/// Section of the quadric by the plane `{x : plane · x = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneConic {
    pub plane: Vec4,
    pub eps: f64,
    /// Orthonormal basis of the plane (as a 3-space of vectors).
    pub basis: Matrix4x3<f64>,
    /// Restriction of the quadric to the basis.
    pub form: Matrix3<f64>,
}

impl PlaneConic {
    pub fn new(plane: Vec4, eps: f64) -> Result<Self, DualError> {
        let basis = complement4(&plane)?;
        let form = basis.transpose() * quadric_matrix(eps) * basis;
        Ok(Self { plane, eps, basis, form })
    }

    /// The conic `c₀`, cut out by `D = 0`.
    pub fn c0(eps: f64) -> Self {
        Self::new(Vec4::new(0.0, 0.0, 0.0, 1.0), eps).expect("nonzero covector")
    }

    pub fn is_smooth(&self) -> bool {
        let scale = self.form.abs().max().powi(3).max(f64::MIN_POSITIVE);
        self.form.determinant().abs() > 1e-12 * scale
    }

    /// Quadratic form on covectors whose zeros are the planes tangent to
    /// the conic (planes through its tangent lines).
    pub fn dual_form(&self) -> Matrix4<f64> {
        self.basis * adjugate3(&self.form) * self.basis.transpose()
    }

    /// Dual quadratic form evaluated on the unit covector `π`: zero iff the
    /// section by `π` is tangent to this conic. Also returns the point of
    /// contact.
    pub fn tangency(&self, pi: &Vec4) -> Result<(f64, Vec4), DualError> {
        if !self.is_smooth() {
            return Err(DualError::DegenerateConic);
        }
        let pi = pi.normalize();
        let lam = self.basis.transpose() * pi;
        let adj = adjugate3(&self.form);
        let scale = adj.abs().max().max(f64::MIN_POSITIVE);
        let residual = (lam.transpose() * adj * lam)[0] / scale;
        let point = self.basis * (adj * lam);
        Ok((residual, point))
    }

    /// Conic coordinates of a vector in the plane.
    pub fn coords(&self, x: &Vec4) -> Vector3<f64> {
        self.basis.transpose() * x
    }

    pub fn lift(&self, y: &Vector3<f64>) -> Vec4 {
        self.basis * y
    }

    /// Angular parametrization of a real conic: diagonalize the restricted
    /// form to signature `(+, +, −)` and use `θ ↦ (cos θ/√w₀, sin θ/√w₁, 1/√−w₂)`.
    pub fn parametrization(&self) -> Result<ConicChart, DualError> {
        let eig = SymmetricEigen::new(self.form);
        let mut w = eig.eigenvalues;
        let pos = w.iter().filter(|&&x| x > 0.0).count();
        let neg = w.iter().filter(|&&x| x < 0.0).count();
        let flip = match (pos, neg) {
            (2, 1) => 1.0,
            (1, 2) => -1.0,
            _ => return Err(DualError::NoRealConic),
        };
        w *= flip;
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| w[j].total_cmp(&w[i]));
        let v = eig.eigenvectors;
        let cols: Vec<Vector3<f64>> = order.iter().map(|&i| v.column(i).into_owned()).collect();
        let frame = Matrix3::from_columns(&cols);
        Ok(ConicChart { w: Vector3::new(w[order[0]], w[order[1]], w[order[2]]), frame })
    }
}

/// Angle chart of a real conic; see [`PlaneConic::parametrization`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConicChart {
    w: Vector3<f64>,
    frame: Matrix3<f64>,
}

impl ConicChart {
    pub fn point(&self, conic: &PlaneConic, theta: f64) -> Vec4 {
        let y = Vector3::new(theta.cos() / self.w[0].sqrt(), theta.sin() / self.w[1].sqrt(), 1.0 / (-self.w[2]).sqrt());
        conic.lift(&(self.frame * y))
    }

    pub fn angle(&self, conic: &PlaneConic, x: &Vec4) -> f64 {
        let mut y = self.frame.transpose() * conic.coords(x);
        if y[2] < 0.0 {
            y = -y;
        }
        (y[1] * self.w[1].sqrt()).atan2(y[0] * self.w[0].sqrt())
    }
}

/// Real roots of `c₀ + c₁ t + c₂ t² + c₃ t³`, Newton-polished.
pub fn real_cubic_roots(c: [f64; 4]) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let c = c.map(|x| x / scale);
    let p = |t: f64| ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
    let dp = |t: f64| (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1];
    let mut roots = Vec::new();
    if c[3].abs() < 1e-13 {
        if c[2].abs() < 1e-13 {
            if c[1].abs() > 1e-13 {
                roots.push(-c[0] / c[1]);
            }
        } else {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            if disc >= 0.0 {
                let q = -0.5 * (c[1] + disc.sqrt().copysign(c[1]));
                roots.push(q / c[2]);
                if q != 0.0 {
                    roots.push(c[0] / q);
                }
            }
        }
    } else {
        let comp = Matrix3::new(0.0, 0.0, -c[0] / c[3], 1.0, 0.0, -c[1] / c[3], 0.0, 1.0, -c[2] / c[3]);
        for z in comp.complex_eigenvalues().iter() {
            if z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) {
                roots.push(z.re);
            }
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = dp(*r);
            if d == 0.0 {
                break;
            }
            *r -= p(*r) / d;
        }
    }
    roots
}

/// Real points of `{x : xᵀ Q x = 0}` on the line `{x : line · x = 0}` of P².
pub fn line_conic_points(line: &Vector3<f64>, q: &Matrix3<f64>) -> Result<Vec<Vector3<f64>>, DualError> {
    let n = complement3(line)?;
    let cq: Matrix2<f64> = n.transpose() * q * n;
    let (a, b, c) = (cq[(1, 1)], 2.0 * cq[(0, 1)], cq[(0, 0)]);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 * scale * scale {
        return Ok(Vec::new());
    }
    let sd = disc.max(0.0).sqrt();
    let mut out = Vec::new();
    if a.abs() <= 1e-14 * scale {
        out.push(n * Vector2::new(0.0, 1.0));
        if b != 0.0 {
            out.push(n * Vector2::new(1.0, -c / b));
        }
    } else {
        for r in [(-b + sd) / (2.0 * a), (-b - sd) / (2.0 * a)] {
            out.push(n * Vector2::new(1.0, r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        for s in [Vec4::new(0.0, 0.0, 0.0, 1.0), Vec4::new(0.3, -2.0, 0.1, 0.5), Vec4::new(-1.0, 0.0, 0.0, 0.0)] {
            let b = complement4(&s).unwrap();
            assert!((b.transpose() * b - Matrix3::identity()).norm() < 1e-14);
            assert!((b.transpose() * s).norm() < 1e-14);
        }
    }

    #[test]
    fn adjugate_matches_inverse() {
        let c = Matrix3::new(2.0, 0.3, -1.0, 0.3, 1.0, 0.2, -1.0, 0.2, -0.5);
        let a = adjugate3(&c);
        assert!((a - c.try_inverse().unwrap() * c.determinant()).norm() < 1e-13);
    }

    #[test]
    fn cubic_roots() {
        // (t - 1)(t + 2)(t - 0.5)
        let mut r = real_cubic_roots([1.0, -2.5, 0.5, 1.0]);
        r.sort_by(f64::total_cmp);
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((x - e).abs() < 1e-13);
        }
        assert_eq!(real_cubic_roots([1.0, 0.0, 1.0, 0.0]).len(), 0);
    }

    #[test]
    fn conic_chart_round_trip() {
        let c = PlaneConic::new(Vec4::new(0.15, 0.0, 0.35, 1.0), -1.0).unwrap();
        let ch = c.parametrization().unwrap();
        for th in [-2.0, 0.0, 0.4, 3.0] {
            let x = ch.point(&c, th);
            assert!(quadric_residual(&x, -1.0).abs() < 1e-13);
            assert!(c.plane.dot(&x).abs() < 1e-13);
            assert!((ch.angle(&c, &x) - th).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_reduces_residual() {
        let x = Vec4::new(3.0, -2.0, -4.0, 4.0) + Vec4::new(1e-6, 0.0, 0.0, 0.0);
        let p = project_to_quadric(&x, 1.0);
        assert!(quadric_residual(&p, 1.0).abs() < 1e-12);
    }
}
