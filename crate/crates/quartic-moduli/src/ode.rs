//! Adaptive Dormand–Prince 5(4) integration with zero-crossing events.
//!
//! The state dimension is a const generic so that trajectories in the moduli
//! plane stay on the stack. Events are located by re-stepping from the start of
//! the step that bracketed the sign change, bisecting on the step length.

use crate::{Error, Result};

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// The event function changed sign; the last sample is the refined crossing.
    Event,
    /// The requested final time was reached.
    End,
    /// The stop predicate asked to halt (e.g. the state left a region).
    Halted,
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stop: Stop,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }
}

/// Integrator settings. The defaults match the accuracy needed for event-located
/// canonical points: relative tolerance `1e-10` and crossing location to `1e-12`.
#[derive(Debug, Clone, Copy)]
pub struct Dopri {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub event_tol: f64,
}

impl Default for Dopri {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: 0.05, max_steps: 200_000, event_tol: 1e-12 }
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

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step: the fifth-order solution and the embedded error estimate.
fn step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(t + h, &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(t + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

impl Dopri {
    /// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
    ///
    /// Stops early at the first sign change of `event` (if given) or when `halt`
    /// returns true for an accepted state.
    pub fn integrate<const N: usize, F, G, H>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        event: Option<G>,
        halt: H,
    ) -> Result<Trajectory<N>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: Fn(&[f64; N]) -> f64,
        H: Fn(&[f64; N]) -> bool,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut h = (1e-3 * span).clamp(1e-6, self.h_max);
        let mut times = vec![t];
        let mut states = vec![y];
        let mut g_prev = event.as_ref().map(|g| g(&y));

        for _ in 0..self.max_steps {
            let remaining = (t_end - t) * dir;
            if remaining <= 1e-15 * (1.0 + t.abs()) {
                return Ok(Trajectory { times, states, stop: Stop::End });
            }
            h = h.min(remaining).min(self.h_max);
            let (y_new, err) = step(&f, t, &y, dir * h);
            let mut norm = 0.0_f64;
            for i in 0..N {
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                norm = norm.max((err[i] / sc).abs());
            }
            if !norm.is_finite() {
                h *= 0.25;
                if h < 1e-14 {
                    return Err(Error::ConvergenceFailure("non-finite state in ODE step".into()));
                }
                continue;
            }
            if norm > 1.0 {
                h *= (0.9 * norm.powf(-0.2)).max(0.2);
                if h < 1e-14 {
                    return Err(Error::ConvergenceFailure("ODE step size underflow".into()));
                }
                continue;
            }

            if let (Some(g), Some(gp)) = (event.as_ref(), g_prev) {
                let gn = g(&y_new);
                if gp != 0.0 && gp.signum() != gn.signum() {
                    let (tc, yc) = self.locate(&f, g, t, &y, dir * h, gp);
                    times.push(tc);
                    states.push(yc);
                    return Ok(Trajectory { times, states, stop: Stop::Event });
                }
                g_prev = Some(gn);
            }

            t += dir * h;
            y = y_new;
            times.push(t);
            states.push(y);
            if halt(&y) {
                return Ok(Trajectory { times, states, stop: Stop::Halted });
            }
            let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).min(5.0) };
            h *= grow;
        }
        Err(Error::ConvergenceFailure(format!("ODE exceeded {} steps", self.max_steps)))
    }

    /// Bisection on the step length of a single step from `(t, y)`.
    fn locate<const N: usize, F, G>(&self, f: &F, g: &G, t: f64, y: &[f64; N], h: f64, g0: f64) -> (f64, [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: Fn(&[f64; N]) -> f64,
    {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut best = step(f, t, y, h).0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (ym, _) = step(f, t, y, mid * h);
            let gm = g(&ym);
            best = ym;
            if gm == 0.0 || (hi - lo) * h.abs() < self.event_tol {
                return (t + mid * h, ym);
            }
            if gm.signum() == g0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (t + 0.5 * (lo + hi) * h, best)
    }
}
