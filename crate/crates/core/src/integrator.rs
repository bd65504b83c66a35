//! Embedded Dormand–Prince 5(4) integrator for complex linear systems.
//!
//! Fifth-order propagation with fourth-order error estimate, PI step-size
//! control and the standard continuous extension for output between steps.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Real;

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    pub rel: T,
    pub abs: T,
    pub max_steps: usize,
}

impl<T: Real> Tolerances<T> {
    pub fn new(rel: T, abs: T) -> Self {
        Self {
            rel,
            abs,
            max_steps: 20_000_000,
        }
    }
}

/// Step statistics of one integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

// Butcher tableau.
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State<T, const N: usize> = [Complex<T>; N];

fn combine<T: Real, const N: usize>(
    y: &State<T, N>,
    h: T,
    terms: &[(f64, &State<T, N>)],
) -> State<T, N> {
    let mut out = *y;
    for (coef, k) in terms {
        let c = h * T::of(*coef);
        for i in 0..N {
            out[i] = out[i] + k[i] * c;
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, returning the state at each
/// requested output time (ascending, inside `[t0, t_end]`).
///
/// `guard` is called after every accepted step and may abort the run.
pub fn integrate<T, const N: usize, F, G>(
    mut f: F,
    t0: T,
    y0: State<T, N>,
    t_end: T,
    outputs: &[T],
    tol: &Tolerances<T>,
    mut guard: G,
) -> Result<(Vec<State<T, N>>, Stats)>
where
    T: Real,
    F: FnMut(T, &State<T, N>) -> State<T, N>,
    G: FnMut(T, &State<T, N>) -> Result<()>,
{
    let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
    if t_end.is_nan() || t0.is_nan() || t_end <= t0 {
        return Err(crate::error::invalid(
            "integration interval must have t_end > t0",
        ));
    }
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.iter().any(|&t| t < t0 || t > t_end) {
        return Err(crate::error::invalid(
            "output times must be ascending and within [t0, t_end]",
        ));
    }

    let mut stats = Stats::default();
    let mut results = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] == t0 {
        results.push(y0);
        next_out += 1;
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, t_end - t0, tol);
    stats.evaluations += 1;

    let safety = T::of(0.9);
    let (fac_min, fac_max) = (T::of(0.2), T::of(10.0));
    let beta = T::of(0.04);
    let expo = T::of(0.2) - beta * T::of(0.75);
    let mut err_old = T::of(1e-4);
    let mut rejected_last = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::TooManySteps {
                t: to_f64(t),
                max_steps: tol.max_steps,
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= T::of(16.0) * T::epsilon() * t.abs().max(T::one()) {
            return Err(Error::StepUnderflow { t: to_f64(t) });
        }

        let k2 = f(t + h * T::of(C2), &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(
            t + h * T::of(C3),
            &combine(&y, h, &[(A31, &k1), (A32, &k2)]),
        );
        let k4 = f(
            t + h * T::of(C4),
            &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + h * T::of(C5),
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let t_new = if last { t_end } else { t + h };
        let k6 = f(
            t_new,
            &combine(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = combine(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let err_vec = combine(
            &[Complex::new(T::zero(), T::zero()); N],
            h,
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
        );
        let mut acc = T::zero();
        for i in 0..N {
            let sc = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
            let r = err_vec[i].norm() / sc;
            acc = acc + r * r;
        }
        let err = (acc / T::of(N as f64)).sqrt();
        if !err.is_finite() {
            h = h * fac_min;
            stats.rejected += 1;
            rejected_last = true;
            continue;
        }

        if err <= T::one() {
            let err_c = err.max(T::of(1e-10));
            let mut fac = safety * err_c.powf(-expo) * err_old.powf(beta);
            fac = fac.max(fac_min).min(fac_max);
            if rejected_last {
                fac = fac.min(T::one());
            }
            // Dense output between t and t_new.
            let dense = Dense::new(&y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7, h);
            while next_out < outputs.len() && outputs[next_out] <= t_new {
                let to = outputs[next_out];
                results.push(if to == t_new {
                    y_new
                } else {
                    dense.eval((to - t) / h)
                });
                next_out += 1;
            }
            guard(t_new, &y_new)?;
            t = t_new;
            y = y_new;
            k1 = k7;
            err_old = err_c;
            h = h * fac;
            stats.accepted += 1;
            rejected_last = false;
        } else {
            let fac = (safety * err.powf(-T::of(0.2))).max(fac_min);
            h = h * fac;
            stats.rejected += 1;
            rejected_last = true;
        }
    }
    Ok((results, stats))
}

struct Dense<T, const N: usize> {
    r1: State<T, N>,
    r2: State<T, N>,
    r3: State<T, N>,
    r4: State<T, N>,
    r5: State<T, N>,
}

impl<T: Real, const N: usize> Dense<T, N> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        y: &State<T, N>,
        y_new: &State<T, N>,
        k1: &State<T, N>,
        k3: &State<T, N>,
        k4: &State<T, N>,
        k5: &State<T, N>,
        k6: &State<T, N>,
        k7: &State<T, N>,
        h: T,
    ) -> Self {
        let zero = [Complex::new(T::zero(), T::zero()); N];
        let mut r2 = zero;
        let mut r3 = zero;
        let mut r4 = zero;
        for i in 0..N {
            r2[i] = y_new[i] - y[i];
            r3[i] = k1[i] * h - r2[i];
            r4[i] = r2[i] - k7[i] * h - r3[i];
        }
        let r5 = combine(
            &zero,
            h,
            &[(D1, k1), (D3, k3), (D4, k4), (D5, k5), (D6, k6), (D7, k7)],
        );
        Self {
            r1: *y,
            r2,
            r3,
            r4,
            r5,
        }
    }

    /// State at fraction `s ∈ [0, 1]` of the step.
    fn eval(&self, s: T) -> State<T, N> {
        let s1 = T::one() - s;
        let mut out = self.r1;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.r1[i]
                + (self.r2[i] + (self.r3[i] + (self.r4[i] + self.r5[i] * s1) * s) * s1) * s;
        }
        out
    }
}

fn initial_step<T, const N: usize, F>(
    f: &mut F,
    t: T,
    y: &State<T, N>,
    f0: &State<T, N>,
    span: T,
    tol: &Tolerances<T>,
) -> T
where
    T: Real,
    F: FnMut(T, &State<T, N>) -> State<T, N>,
{
    let norm = |v: &State<T, N>| {
        let mut acc = T::zero();
        for i in 0..N {
            let sc = tol.abs + tol.rel * y[i].norm();
            acc = acc + (v[i].norm() / sc).powi(2);
        }
        (acc / T::of(N as f64)).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f0));
    let tiny = T::of(1e-5);
    let mut h0 = if d0 < tiny || d1 < tiny {
        T::of(1e-6)
    } else {
        T::of(0.01) * d0 / d1
    };
    h0 = h0.min(span);
    let y1 = combine(y, h0, &[(1.0, f0)]);
    let f1 = f(t + h0, &y1);
    let mut diff = *f0;
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= T::of(1e-15) {
        (h0 * T::of(1e-3)).max(T::of(1e-6))
    } else {
        (T::of(0.01) / d1.max(d2)).powf(T::of(0.2))
    };
    (T::of(100.0) * h0).min(h1).min(span)
}
