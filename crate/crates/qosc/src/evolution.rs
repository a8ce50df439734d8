//! Decomposition coefficients of the time-ordered evolution, moment
//! propagation through them, and the return map to the Schrodinger picture.
//!
//! Writing the combined evolution as an ordered product of one damping factor
//! and three diffusion factors yields four scalar coefficient functions
//! (h, g0, g1, g2) obeying
//!
//! ```text
//! dh/dt = -gamma,          h(0) = 0
//! dg_i/dt = -eta_i(t) - gamma*g_i,   g_i(0) = 0
//! ```
//!
//! with `eta_i(t)` the interaction-picture coefficients from [`crate::algebra`].
//! Equivalently, by the integrating factor,
//! `g_i(t) = -int_0^t eta_i(s) exp(-gamma*(t-s)) ds`.

use serde::{Deserialize, Serialize};

use crate::algebra::{eta_bar, DissipativeCoefficients, UnitaryCoefficients};
use crate::error::{Error, Result};
use crate::integrate::{adaptive_simpson, integrate_sampled, StepControl};
use crate::moments::{apply_linear_map, GaussianMoments};

/// Decomposition coefficients of the evolution operator at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GCoefficients {
    /// Damping exponent, always -gamma*t.
    pub h: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub t: f64,
}

impl GCoefficients {
    pub fn zero() -> Self {
        Self {
            h: 0.0,
            g0: 0.0,
            g1: 0.0,
            g2: 0.0,
            t: 0.0,
        }
    }
}

/// Quadrature control for [`compute_g_quadrature`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_depth: 48,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(&first) = times.first() {
        check_time(first)?;
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "times must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// Integrates the coefficient rate equations up to each of the ascending
/// `times` with an adaptive embedded Runge-Kutta pair.
pub fn compute_g_ode_sampled(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    times: &[f64],
    ctl: &StepControl,
) -> Result<Vec<GCoefficients>> {
    check_times(times)?;
    let gamma = d.gamma;
    let rhs = |t: f64, g: &[f64; 3]| {
        let e = eta_bar(u, d, t);
        [
            -e[0] - gamma * g[0],
            -e[1] - gamma * g[1],
            -e[2] - gamma * g[2],
        ]
    };
    let states = integrate_sampled(rhs, 0.0, [0.0; 3], times, ctl)?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, g)| GCoefficients {
            h: -gamma * t,
            g0: g[0],
            g1: g[1],
            g2: g[2],
            t,
        })
        .collect())
}

/// Integrates the coefficient rate equations from 0 to `t`.
pub fn compute_g_ode(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    t: f64,
    ctl: &StepControl,
) -> Result<GCoefficients> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(GCoefficients::zero());
    }
    Ok(compute_g_ode_sampled(u, d, &[t], ctl)?.pop().unwrap())
}

/// Evaluates the coefficients by quadrature of the integrating-factor form.
///
/// The damping factor is folded into the integrand,
/// `g_i(t) = -int_0^t eta_i(s) exp(-gamma*(t-s)) ds`, so the integrand stays
/// bounded for any gamma*t and the absolute tolerance is meaningful.
pub fn compute_g_quadrature(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    t: f64,
    ctl: &QuadratureControl,
) -> Result<GCoefficients> {
    check_time(t)?;
    let gamma = d.gamma;
    let mut g = [0.0; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        let f = |s: f64| -eta_bar(u, d, s)[i] * (-gamma * (t - s)).exp();
        *gi = adaptive_simpson(&f, 0.0, t, ctl.abs_tol, ctl.max_depth)?;
    }
    Ok(GCoefficients {
        h: -gamma * t,
        g0: g[0],
        g1: g[1],
        g2: g[2],
        t,
    })
}

/// The 2x2 mean-flow matrix of the combined unitary part after time `t`:
/// means map as S v, covariances as S Sigma S^T, det S = 1.
///
/// The generator is A = [[psi, phi - theta], [phi + theta, -psi]] / 2 with
/// A^2 = -(omega^2/4) I, so the exponential closes in three branches.
pub fn symplectic_map(u: &UnitaryCoefficients, t: f64) -> [[f64; 2]; 2] {
    let a = [
        [0.5 * u.psi, 0.5 * (u.phi - u.theta)],
        [0.5 * (u.phi + u.theta), -0.5 * u.psi],
    ];
    let omega_squared = u.theta * u.theta - u.phi * u.phi - u.psi * u.psi;
    let (c, s_over) = if omega_squared > 0.0 {
        // exp(tA) = cos(wt/2) I + (2/w) sin(wt/2) A
        let w = omega_squared.sqrt();
        ((0.5 * w * t).cos(), (0.5 * w * t).sin() * 2.0 / w)
    } else if omega_squared < 0.0 {
        let k = (-omega_squared).sqrt();
        ((0.5 * k * t).cosh(), (0.5 * k * t).sinh() * 2.0 / k)
    } else {
        (1.0, t)
    };
    [
        [c + s_over * a[0][0], s_over * a[0][1]],
        [s_over * a[1][0], c + s_over * a[1][1]],
    ]
}

/// Applies the decomposition coefficients to interaction-picture moments:
/// means shrink by e^{h/2}, covariances by e^{h} plus the diffusion shifts
/// (g0 -/+ g1)/2 on the variances and g2/2 on the covariance.
///
/// Fails if `g.h` is inconsistent with `-gamma * g.t`.
pub fn propagate_interaction(
    m0: &GaussianMoments,
    gamma: f64,
    g: &GCoefficients,
) -> Result<GaussianMoments> {
    let expected = -gamma * g.t;
    if (g.h - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return Err(Error::InconsistentDamping { h: g.h, expected });
    }
    let e = g.h.exp();
    let e_half = (0.5 * g.h).exp();
    Ok(GaussianMoments {
        mean_x: e_half * m0.mean_x,
        mean_p: e_half * m0.mean_p,
        sigma_xx: e * m0.sigma_xx + 0.5 * (g.g0 - g.g1),
        sigma_pp: e * m0.sigma_pp + 0.5 * (g.g0 + g.g1),
        sigma_xp: e * m0.sigma_xp + 0.5 * g.g2,
    })
}

/// Closed-form generalized uncertainty after [`propagate_interaction`],
/// quadratic in the coefficients and the initial covariances.
pub fn interaction_delta(m0: &GaussianMoments, g: &GCoefficients) -> f64 {
    let e = g.h.exp();
    e * e * m0.delta()
        + 0.5
            * e
            * ((g.g0 + g.g1) * m0.sigma_xx + (g.g0 - g.g1) * m0.sigma_pp
                - 2.0 * g.g2 * m0.sigma_xp)
        + 0.25 * (g.g0 * g.g0 - g.g1 * g.g1 - g.g2 * g.g2)
}

/// Long-time generalized uncertainty from the limiting coefficients.
pub fn asymptotic_delta(g0: f64, g1: f64, g2: f64) -> f64 {
    0.25 * (g0 * g0 - g1 * g1 - g2 * g2)
}

/// Undoes the co-rotating frame: applies the inverse unitary flow to
/// interaction-picture moments, recovering the Schrodinger picture.
/// Leaves the generalized uncertainty unchanged.
pub fn to_schrodinger(
    m_bar: &GaussianMoments,
    u: &UnitaryCoefficients,
    t: f64,
) -> GaussianMoments {
    apply_linear_map(m_bar, &symplectic_map(u, -t))
}

/// One sample of an evolution: Schrodinger-picture moments, the coefficients
/// that produced them, and the generalized uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub moments: GaussianMoments,
    pub g: GCoefficients,
    pub delta: f64,
}

/// Ordered samples of an evolution at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn final_point(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn min_delta(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.delta)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Runs the moment pipeline (propagate in the co-rotating frame, then return
/// to the Schrodinger picture) at each time, with the coefficients supplied
/// by `g_of_t`.
pub fn trajectory_with<F>(
    m0: &GaussianMoments,
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    times: &[f64],
    mut g_of_t: F,
) -> Result<Trajectory>
where
    F: FnMut(f64) -> Result<GCoefficients>,
{
    check_times(times)?;
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let g = g_of_t(t)?;
        let bar = propagate_interaction(m0, d.gamma, &g)?;
        let moments = to_schrodinger(&bar, u, t);
        points.push(TrajectoryPoint {
            t,
            moments,
            g,
            delta: moments.delta(),
        });
    }
    Ok(Trajectory { points })
}

/// Trajectory with coefficients from the rate-equation integrator; works for
/// arbitrary coefficient sets, not just the named presets.
pub fn trajectory_ode(
    m0: &GaussianMoments,
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    times: &[f64],
    ctl: &StepControl,
) -> Result<Trajectory> {
    check_times(times)?;
    let gs = compute_g_ode_sampled(u, d, times, ctl)?;
    let mut iter = gs.into_iter();
    trajectory_with(m0, u, d, times, |_| {
        Ok(iter.next().expect("one coefficient set per sample"))
    })
}
