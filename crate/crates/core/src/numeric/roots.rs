//! Bracketed scalar root finding.

/// Brent's method on a bracket `[a, b]` with `fa`, `fb` of opposite sign.
///
/// Returns the abscissa with the smallest residual seen once the bracket
/// has shrunk below `xtol` or an exact zero was hit.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return None;
        }
    }
    Some(b)
}

/// Secant iteration from two starting guesses, stopped when the step falls
/// below `xtol * (1 + |x|)`. `Ok(None)` means no convergence.
pub fn secant<E, F>(mut f: F, mut x0: f64, mut x1: f64, xtol: f64, max_iter: usize) -> Result<Option<f64>, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for _ in 0..max_iter {
        if f1 == 0.0 || f1 == f0 {
            return Ok(Some(x1));
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() {
            return Ok(None);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1)?;
        if (x1 - x0).abs() <= xtol * (1.0 + x1.abs()) {
            return Ok(Some(x1));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_cubic() {
        let f = |x: f64| x * x * x - 2.0 * x - 5.0;
        let r = brent(f, 2.0, 3.0, f(2.0), f(3.0), 1e-15, 100).unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 2.0, 2.0, 1e-12, 50).is_none());
    }

    #[test]
    fn secant_sqrt2() {
        let r = secant(|x| Ok::<_, ()>(x * x - 2.0), 1.0, 2.0, 1e-15, 50).unwrap().unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }
}
