//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)).
//!
//! The integrator is generic over fixed-size states. A step observer is
//! called after every accepted step and decides whether to continue.

use std::ops::ControlFlow;

// Dormand–Prince tableau.
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

// Fifth-order weights (also the last stage row, FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Difference between fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince {
    pub tol: Tolerances,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Budget of accepted steps.
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self {
            tol: Tolerances { rtol: 1e-10, atol: 1e-14 },
            initial_step: 1e-3,
            max_step: 1.0,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The observer asked to stop.
    Stopped,
    /// Reached the end of the requested interval.
    Finished,
    BudgetExhausted,
    StepSizeUnderflow,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub termination: Termination,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (coef, k) in terms {
            acc += coef * k[i];
        }
        *o += h * acc;
    }
    out
}

impl DormandPrince {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            tol: Tolerances { rtol, atol },
            ..Self::default()
        }
    }

    /// Integrates `dy/dt = f(t, y)` from `t0` towards `t_end`.
    ///
    /// `observe(t, y)` runs after each accepted step (not at `t0`).
    pub fn integrate<const N: usize, F, O>(&self, f: F, t0: f64, y0: [f64; N], t_end: f64, mut observe: O) -> Outcome<N>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]) -> ControlFlow<()>,
    {
        let direction = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut h = self.initial_step.min(self.max_step) * direction;
        let mut k1 = f(t, &y);
        let mut accepted = 0;
        let mut rejected = 0;
        let mut factor_cap = 5.0;

        let finish = |t, y, accepted, rejected, termination| Outcome {
            t,
            y,
            accepted,
            rejected,
            termination,
        };

        loop {
            if (t_end - t) * direction <= 0.0 {
                return finish(t, y, accepted, rejected, Termination::Finished);
            }
            if accepted >= self.max_steps {
                return finish(t, y, accepted, rejected, Termination::BudgetExhausted);
            }
            if (t + h - t_end) * direction > 0.0 {
                h = t_end - t;
            }

            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(t + h, &y_new);

            let mut err2 = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
                err2 += (e / sc) * (e / sc);
            }
            let err = (err2 / N as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if h.abs() <= self.min_step {
                    return finish(t, y, accepted, rejected, Termination::NonFinite);
                }
                h *= 0.25;
                rejected += 1;
                continue;
            }

            if err <= 1.0 {
                t += h;
                y = y_new;
                k1 = k7;
                accepted += 1;
                let grow = if err == 0.0 { factor_cap } else { (0.9 * err.powf(-0.2)).min(factor_cap) };
                h = (h * grow.max(0.2)).clamp(-self.max_step, self.max_step);
                factor_cap = 5.0;
                if observe(t, &y).is_break() {
                    return finish(t, y, accepted, rejected, Termination::Stopped);
                }
            } else {
                rejected += 1;
                factor_cap = 1.0;
                h *= (0.9 * err.powf(-0.2)).max(0.2);
                if h.abs() < self.min_step {
                    return finish(t, y, accepted, rejected, Termination::StepSizeUnderflow);
                }
            }
        }
    }
}
