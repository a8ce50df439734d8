//! Small fixed-dimension ODE integration and 1-D quadrature.
//!
//! The integrator is an embedded Dormand-Prince 5(4) pair with proportional
//! step control and the first-same-as-last optimization. State dimension is a
//! const generic, so the right-hand side works on plain arrays with no
//! allocation per step.

use crate::error::{Error, Result};

/// Adaptive step-size control for [`integrate`] / [`integrate_sampled`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Relative error tolerance per step.
    pub rtol: f64,
    /// Absolute error tolerance per step.
    pub atol: f64,
    /// Initial step size; chosen from the interval length when `None`.
    pub initial_step: Option<f64>,
    /// Smallest step before the integration is declared stalled.
    pub min_step: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: None,
            min_step: 1e-13,
            max_steps: 10_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Dopri5<'a, const N: usize, F> {
    f: F,
    ctl: &'a StepControl,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    steps: usize,
}

impl<'a, const N: usize, F> Dopri5<'a, N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    fn new(mut f: F, t0: f64, y0: [f64; N], span: f64, ctl: &'a StepControl) -> Self {
        let k1 = f(t0, &y0);
        let h = ctl
            .initial_step
            .unwrap_or_else(|| (span * 1e-3).clamp(1e-8, 0.1).max(ctl.min_step));
        Self {
            f,
            ctl,
            t: t0,
            y: y0,
            k1,
            h,
            steps: 0,
        }
    }

    /// Advances to exactly `target`, leaving state and FSAL slope in place.
    fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.t < target {
            let clamped = self.h >= target - self.t;
            let h = if clamped { target - self.t } else { self.h };
            self.steps += 1;
            if self.steps > self.ctl.max_steps {
                return Err(Error::StepControlFailed { t: self.t, step: h });
            }

            let (t, y) = (self.t, self.y);
            let mut stage = |c: f64, coeffs: &[f64], ks: &[&[f64; N]]| {
                let mut ya = y;
                for (a, k) in coeffs.iter().zip(ks) {
                    for i in 0..N {
                        ya[i] += h * a * k[i];
                    }
                }
                (self.f)(t + c * h, &ya)
            };

            let k1 = self.k1;
            let k2 = stage(C[1], &A2, &[&k1]);
            let k3 = stage(C[2], &A3, &[&k1, &k2]);
            let k4 = stage(C[3], &A4, &[&k1, &k2, &k3]);
            let k5 = stage(C[4], &A5, &[&k1, &k2, &k3, &k4]);
            let k6 = stage(C[5], &A6, &[&k1, &k2, &k3, &k4, &k5]);
            let ks = [&k1, &k2, &k3, &k4, &k5, &k6];

            let mut y5 = y;
            for (b, k) in B5[..6].iter().zip(ks) {
                for i in 0..N {
                    y5[i] += h * b * k[i];
                }
            }
            let k7 = (self.f)(t + h, &y5);

            let mut err_sq = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for (j, k) in ks.iter().enumerate() {
                    e += (B5[j] - B4[j]) * k[i];
                }
                e -= B4[6] * k7[i];
                e *= h;
                let scale = self.ctl.atol + self.ctl.rtol * y[i].abs().max(y5[i].abs());
                err_sq += (e / scale) * (e / scale);
            }
            let err = (err_sq / N as f64).sqrt();

            if err <= 1.0 {
                self.t = if clamped { target } else { t + h };
                self.y = y5;
                self.k1 = k7;
                let grow = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                self.h = (h * grow).max(self.ctl.min_step);
            } else {
                let shrink = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                self.h = h * shrink;
                if self.h < self.ctl.min_step {
                    return Err(Error::StepControlFailed {
                        t: self.t,
                        step: self.h,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Integrates y' = f(t, y) from `t0` to `t1` (requires `t1 >= t0`).
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "integration interval reversed: [{t0}, {t1}]"
        )));
    }
    if t1 == t0 {
        return Ok(y0);
    }
    let mut solver = Dopri5::new(f, t0, y0, t1 - t0, ctl);
    solver.advance_to(t1)?;
    Ok(solver.y)
}

/// Integrates from `t0`, landing exactly on each of the ascending `samples`
/// (all must be `>= t0`); returns the state at each sample.
pub fn integrate_sampled<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    samples: &[f64],
    ctl: &StepControl,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    for w in samples.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "sample times must be strictly increasing".into(),
            ));
        }
    }
    if let Some(&first) = samples.first() {
        if first < t0 {
            return Err(Error::InvalidParameter(format!(
                "sample time {first} precedes start {t0}"
            )));
        }
    }
    let span = samples.last().map(|&l| l - t0).unwrap_or(0.0).max(1e-6);
    let mut solver = Dopri5::new(f, t0, y0, span, ctl);
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        solver.advance_to(target)?;
        out.push(solver.y);
    }
    Ok(out)
}

/// Adaptive Simpson quadrature with an absolute error target.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureTolerance {
            estimate: delta.abs() / 15.0,
            tol,
        });
    }
    let half = 0.5 * tol;
    Ok(simpson_step(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}
