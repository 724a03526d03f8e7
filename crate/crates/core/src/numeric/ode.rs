//! Dormand–Prince 5(4) integration with event location.
//!
//! The solver keeps every accepted step (start state, first stage and step
//! length) so that any intermediate time can be reproduced by re-running a
//! shortened step from the nearest node. Event and extremum refinement use
//! this map, which makes refined states genuine integrator states rather than
//! interpolants.

use super::roots::brent;
use thiserror::Error;

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    type Error: From<StepFailure>;
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N], Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StepFailure {
    #[error("step size underflow at t = {t}")]
    Underflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

impl Direction {
    fn admits(self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Either => rising || falling,
        }
    }
}

/// Terminal event `g(y) = 0`.
///
/// `max_jump` rejects sign changes across which `g` jumps by more than the
/// given amount, which is how wrapped (sawtooth) level functions on periodic
/// coordinates avoid spurious crossings at their discontinuity.
/// Scalar level function of the state.
pub type LevelFn<'a, const N: usize> = Box<dyn Fn(&[f64; N]) -> f64 + 'a>;

pub struct Event<'a, const N: usize> {
    pub g: LevelFn<'a, N>,
    pub direction: Direction,
    pub max_jump: Option<f64>,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn new(g: impl Fn(&[f64; N]) -> f64 + 'a, direction: Direction) -> Self {
        Self { g: Box::new(g), direction, max_jump: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    Event { index: usize },
    End,
}

/// Accepted steps. Node `i` is `(t[i], y[i])`; step `i` joins nodes `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    k1: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        let n = self.t.len() - 1;
        (self.t[n], self.y[n])
    }

    pub fn steps(&self) -> usize {
        self.t.len() - 1
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub struct Solver<'s, S, const N: usize> {
    sys: &'s S,
    pub tol: Tolerances,
}

struct StepOut<const N: usize> {
    y: [f64; N],
    k7: [f64; N],
    err: f64,
}

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

impl<'s, S: OdeSystem<N>, const N: usize> Solver<'s, S, N> {
    pub fn new(sys: &'s S, tol: Tolerances) -> Self {
        Self { sys, tol }
    }

    fn step(&self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Result<StepOut<N>, S::Error> {
        let f = |tt: f64, yy: &[f64; N]| self.sys.rhs(tt, yy);
        let k2 = f(t + C2 * h, &comb(y, h, &[(A21, k1)]))?;
        let k3 = f(t + C3 * h, &comb(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * h, &comb(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * h, &comb(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(t + h, &comb(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = comb(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new)?;
        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc) * (e / sc);
        }
        Ok(StepOut { y: y_new, k7, err: (acc / N as f64).sqrt() })
    }

    fn norm(&self, y: &[f64; N], v: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.tol.atol + self.tol.rtol * y[i].abs();
            acc += (v[i] / sc) * (v[i] / sc);
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step(&self, t0: f64, y0: &[f64; N], f0: &[f64; N]) -> Result<f64, S::Error> {
        let d0 = self.norm(y0, y0);
        let d1 = self.norm(y0, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = comb(y0, h0, &[(1.0, f0)]);
        let f1 = self.sys.rhs(t0 + h0, &y1)?;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = self.norm(y0, &diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        Ok((100.0 * h0).min(h1).min(self.tol.h_max))
    }

    /// Integrates from `t0` until `t_end` or the first admitted event.
    ///
    /// `check` runs on every accepted state and may abort the integration.
    pub fn run(
        &self,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        events: &[Event<'_, N>],
        mut check: impl FnMut(&[f64; N]) -> Result<(), S::Error>,
    ) -> Result<(Trajectory<N>, Stop), S::Error> {
        let mut k1 = self.sys.rhs(t0, &y0)?;
        let mut traj = Trajectory { t: vec![t0], y: vec![y0], k1: vec![k1] };
        if t_end <= t0 {
            return Ok((traj, Stop::End));
        }
        let mut t = t0;
        let mut y = y0;
        let mut h = self.initial_step(t0, &y0, &k1)?;
        let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(&y0)).collect();
        let mut steps = 0usize;
        loop {
            if steps >= self.tol.max_steps {
                return Err(StepFailure::TooManySteps { t }.into());
            }
            steps += 1;
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let out = self.step(t, &y, &k1, h)?;
            if !(out.err <= 1.0) {
                let fac = if out.err.is_finite() { (0.9 * out.err.powf(-0.2)).max(0.2) } else { 0.2 };
                h *= fac;
                if h.abs() <= 1e-14 * t.abs().max(1.0) {
                    return Err(StepFailure::Underflow { t }.into());
                }
                continue;
            }
            let g_new: Vec<f64> = events.iter().map(|e| (e.g)(&out.y)).collect();
            let mut hit: Option<(usize, f64, [f64; N])> = None;
            for (i, ev) in events.iter().enumerate() {
                let (g0, g1) = (g_prev[i], g_new[i]);
                if !ev.direction.admits(g0, g1) {
                    continue;
                }
                if let Some(j) = ev.max_jump {
                    if (g1 - g0).abs() > j {
                        continue;
                    }
                }
                let (theta, ys) = self.refine(t, &y, &k1, h, g0, g1, |s| (ev.g)(s))?;
                if hit.as_ref().is_none_or(|(_, th, _)| theta < *th) {
                    hit = Some((i, theta, ys));
                }
            }
            if let Some((index, theta, ys)) = hit {
                let te = t + theta * h;
                check(&ys)?;
                traj.t.push(te);
                traj.y.push(ys);
                traj.k1.push(self.sys.rhs(te, &ys)?);
                return Ok((traj, Stop::Event { index }));
            }
            check(&out.y)?;
            t += h;
            y = out.y;
            k1 = out.k7;
            traj.t.push(t);
            traj.y.push(y);
            traj.k1.push(k1);
            g_prev = g_new;
            if last {
                return Ok((traj, Stop::End));
            }
            let fac = (0.9 * out.err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h * fac).min(self.tol.h_max);
        }
    }

    /// Root of `g` along the partial-step map `theta -> step(y, theta h)`.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
        g0: f64,
        g1: f64,
        g: impl Fn(&[f64; N]) -> f64,
    ) -> Result<(f64, [f64; N]), S::Error> {
        let mut failure: Option<S::Error> = None;
        let mut phi = |theta: f64| -> f64 {
            if theta == 0.0 {
                return g0;
            }
            match self.step(t, y, k1, theta * h) {
                Ok(o) => g(&o.y),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let root = brent(&mut phi, 0.0, 1.0, g0, g1, 1e-16, 200);
        if let Some(e) = failure {
            return Err(e);
        }
        let theta = root.unwrap_or(1.0);
        let ys = if theta == 0.0 { *y } else { self.step(t, y, k1, theta * h)?.y };
        Ok((theta, ys))
    }

    /// State at time `s` inside the trajectory, reproduced by a partial step.
    pub fn state_at(&self, traj: &Trajectory<N>, s: f64) -> Result<[f64; N], S::Error> {
        let n = traj.t.len();
        let i = match traj.t.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => return Ok(traj.y[i]),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        Ok(self.step(traj.t[i], &traj.y[i], &traj.k1[i], s - traj.t[i])?.y)
    }

    /// Interior zeros of `f` along the trajectory (sign changes between
    /// nodes), refined with the partial-step map.
    pub fn zeros(&self, traj: &Trajectory<N>, f: impl Fn(&[f64; N]) -> f64) -> Result<Vec<(f64, [f64; N])>, S::Error> {
        let mut out = Vec::new();
        for i in 0..traj.steps() {
            let (g0, g1) = (f(&traj.y[i]), f(&traj.y[i + 1]));
            if g0 == 0.0 && i > 0 {
                out.push((traj.t[i], traj.y[i]));
                continue;
            }
            if g0 * g1 < 0.0 {
                let h = traj.t[i + 1] - traj.t[i];
                let (theta, ys) = self.refine(traj.t[i], &traj.y[i], &traj.k1[i], h, g0, g1, &f)?;
                out.push((traj.t[i] + theta * h, ys));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq)]
    enum E {
        Step,
    }
    impl From<StepFailure> for E {
        fn from(_: StepFailure) -> Self {
            E::Step
        }
    }

    struct Osc;
    impl OdeSystem<2> for Osc {
        type Error = E;
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> Result<[f64; 2], E> {
            Ok([y[1], -y[0]])
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let s = Solver::new(&Osc, Tolerances::default());
        let (traj, stop) = s.run(0.0, [1.0, 0.0], 10.0, &[], |_| Ok(())).unwrap();
        assert_eq!(stop, Stop::End);
        let (t, y) = traj.last();
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn event_located_on_the_locus() {
        let s = Solver::new(&Osc, Tolerances::default());
        let ev = [Event::new(|y: &[f64; 2]| y[0], Direction::Falling)];
        let (traj, stop) = s.run(0.0, [1.0, 0.0], 10.0, &ev, |_| Ok(())).unwrap();
        assert_eq!(stop, Stop::Event { index: 0 });
        let (t, y) = traj.last();
        assert!(y[0].abs() <= 1e-12);
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn direction_filter_skips_wrong_crossing() {
        let s = Solver::new(&Osc, Tolerances::default());
        let ev = [Event::new(|y: &[f64; 2]| y[0], Direction::Rising)];
        let (traj, _) = s.run(0.0, [1.0, 0.0], 10.0, &ev, |_| Ok(())).unwrap();
        let (t, _) = traj.last();
        assert!((t - 1.5 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn state_at_matches_exact() {
        let s = Solver::new(&Osc, Tolerances::default());
        let (traj, _) = s.run(0.0, [1.0, 0.0], 5.0, &[], |_| Ok(())).unwrap();
        for &tt in &[0.3, 1.7, 4.99] {
            let y = s.state_at(&traj, tt).unwrap();
            assert!((y[0] - tt.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn zeros_of_velocity() {
        let s = Solver::new(&Osc, Tolerances::default());
        let (traj, _) = s.run(0.0, [0.0, 1.0], 5.0, &[], |_| Ok(())).unwrap();
        let z = s.zeros(&traj, |y| y[1]).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0].1[0] - 1.0).abs() < 1e-10);
        assert!((z[1].1[0] + 1.0).abs() < 1e-10);
    }
}
