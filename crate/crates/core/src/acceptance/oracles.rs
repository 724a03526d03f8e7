//! Independent reference computations used by the acceptance checks.

/// Billiard in the Euclidean ellipse `x²/A² + y²/B² = 1`, by straight
/// chords and specular reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseBilliard {
    pub a: f64,
    pub b: f64,
}

impl EllipseBilliard {
    /// The ellipse `u = u_wall` of elliptic coordinates
    /// `x = cosh u cos v`, `y = sinh u sin v`.
    pub fn confocal(u_wall: f64) -> Self {
        Self { a: u_wall.cosh(), b: u_wall.sinh() }
    }

    /// Next wall point and reflected direction from a wall point `p`
    /// moving along `d`.
    pub fn bounce(&self, p: (f64, f64), d: (f64, f64)) -> (f64, f64, f64, f64) {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let qa = d.0 * d.0 / a2 + d.1 * d.1 / b2;
        let qb = 2.0 * (p.0 * d.0 / a2 + p.1 * d.1 / b2);
        let qc = p.0 * p.0 / a2 + p.1 * p.1 / b2 - 1.0;
        let s = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        let t = ((-qb + s) / (2.0 * qa)).max((-qb - s) / (2.0 * qa));
        let (x, y) = (p.0 + t * d.0, p.1 + t * d.1);
        let (nx, ny) = (x / a2, y / b2);
        let nn = nx.hypot(ny);
        let (nx, ny) = (nx / nn, ny / nn);
        let dn = d.0 * nx + d.1 * ny;
        (x, y, d.0 - 2.0 * dn * nx, d.1 - 2.0 * dn * ny)
    }
}

/// Euclidean position and velocity of a chart point of elliptic
/// coordinates.
pub fn elliptic_to_euclid(u: f64, v: f64, du: f64, dv: f64) -> ((f64, f64), (f64, f64)) {
    let (ch, sh) = (u.cosh(), u.sinh());
    let (c, s) = (v.cos(), v.sin());
    let p = (ch * c, sh * s);
    let d = (sh * c * du - ch * s * dv, ch * s * du + sh * c * dv);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounce_stays_on_ellipse_and_reflects() {
        let e = EllipseBilliard::confocal(1.0);
        let (x, y, dx, dy) = e.bounce((e.a, 0.0), (-1.0, 0.3));
        assert!((x * x / (e.a * e.a) + y * y / (e.b * e.b) - 1.0).abs() < 1e-14);
        assert!((dx.hypot(dy) - (1.0f64).hypot(0.3)).abs() < 1e-14);
    }

    #[test]
    fn major_axis_orbit_is_two_periodic() {
        let e = EllipseBilliard::confocal(0.7);
        let (x, y, dx, dy) = e.bounce((e.a, 0.0), (-1.0, 0.0));
        assert!((x + e.a).abs() < 1e-14 && y.abs() < 1e-14 && (dx - 1.0).abs() < 1e-14 && dy.abs() < 1e-14);
    }
}
