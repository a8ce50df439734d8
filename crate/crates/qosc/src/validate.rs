//! Executable validation suites: every analytic claim of the library is
//! cross-checked against an independent path (brute-force Fock evolution,
//! generic matrix exponentials, ODE integration, finite differences), with
//! tolerances pinned here in code.
//!
//! Each criterion returns a [`Check`] with the measured worst deviation, the
//! pinned tolerance, the case count, and wall-clock seconds; suites bundle
//! related criteria.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    build_coupling_matrix, eigensystem, eta_bar, eta_bar_exp, DissipativeCoefficients,
    UnitaryCoefficients,
};
use crate::error::{Error, Result};
use crate::evolution::interaction_delta;
use crate::evolution::compute_g_ode_sampled;
use crate::fock::{
    commutator_table_check, gaussian_state, moments_from_rho, oracle_trajectory,
    LiouvilleAction, TruncationConfig,
};
use crate::integrate::{adaptive_simpson, StepControl};
use crate::master::{EquationKind, MasterEquationSpec};
use crate::moments::{
    apply_dissipative, apply_unitary, infinitesimal_rates, GaussianMoments, Generator,
    MomentRates,
};

/// Outcome of one validation criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured deviation, in the units the criterion checks.
    pub max_deviation: f64,
    /// Pinned acceptance threshold for `max_deviation`.
    pub tolerance: f64,
    pub cases: usize,
    pub seconds: f64,
    pub detail: String,
}

impl Check {
    /// One-line human-readable verdict.
    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} (deviation {:.3e} vs tolerance {:.1e}, {} cases, {:.2} s){}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.max_deviation,
            self.tolerance,
            self.cases,
            self.seconds,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" [{}]", self.detail)
            }
        )
    }
}

/// A bundle of checks run together.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The named validation suites exposed by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    /// Single-generator moment maps, uncertainty invariance, rate checks.
    Tables,
    /// The 49-entry bracket table on the truncated Fock space.
    Commutators,
    /// End-to-end closed-form vs density-matrix trajectories, plus cutoff
    /// adequacy by dimension doubling.
    Oracle,
    /// Eigensystem identities, coefficient flow, closed g vs ODE.
    ClosedForms,
    /// Long-time limits, period averages, and the positivity sentinel.
    Limits,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::Tables,
        SuiteKind::Commutators,
        SuiteKind::Oracle,
        SuiteKind::ClosedForms,
        SuiteKind::Limits,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Tables => "tables",
            SuiteKind::Commutators => "commutators",
            SuiteKind::Oracle => "oracle",
            SuiteKind::ClosedForms => "closed_forms",
            SuiteKind::Limits => "limits",
        }
    }
}

impl std::str::FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tables" => Ok(SuiteKind::Tables),
            "commutators" => Ok(SuiteKind::Commutators),
            "oracle" => Ok(SuiteKind::Oracle),
            "closed_forms" | "closed-forms" => Ok(SuiteKind::ClosedForms),
            "limits" => Ok(SuiteKind::Limits),
            other => Err(Error::InvalidParameter(format!(
                "unknown suite {other:?} (expected tables, commutators, oracle, closed_forms, or limits)"
            ))),
        }
    }
}

/// Runs one suite.
pub fn run_suite(kind: SuiteKind) -> SuiteReport {
    let checks = match kind {
        SuiteKind::Tables => vec![
            criterion_table_maps(),
            criterion_unitary_invariance(),
            criterion_rates_finite_difference(),
        ],
        SuiteKind::Commutators => vec![criterion_commutator_table()],
        SuiteKind::Oracle => vec![criterion_oracle_equivalence(), check_cutoff_drift()],
        SuiteKind::ClosedForms => vec![
            criterion_eigensystem_flow(),
            criterion_closed_g_vs_ode(),
        ],
        SuiteKind::Limits => vec![criterion_longtime_limits(), criterion_positivity_sentinel()],
    };
    SuiteReport { checks }
}

/// Runs the nine acceptance criteria in order, plus the cutoff-drift check.
pub fn run_all() -> SuiteReport {
    SuiteReport {
        checks: vec![
            criterion_table_maps(),
            criterion_unitary_invariance(),
            criterion_commutator_table(),
            criterion_eigensystem_flow(),
            criterion_closed_g_vs_ode(),
            criterion_longtime_limits(),
            criterion_oracle_equivalence(),
            criterion_positivity_sentinel(),
            criterion_rates_finite_difference(),
            check_cutoff_drift(),
        ],
    }
}

fn finish(
    name: &'static str,
    tolerance: f64,
    start: Instant,
    outcome: Result<(f64, usize, String)>,
) -> Check {
    match outcome {
        Ok((max_deviation, cases, detail)) => Check {
            name,
            passed: max_deviation < tolerance,
            max_deviation,
            tolerance,
            cases,
            seconds: start.elapsed().as_secs_f64(),
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            max_deviation: f64::INFINITY,
            tolerance,
            cases: 0,
            seconds: start.elapsed().as_secs_f64(),
            detail: format!("aborted: {e}"),
        },
    }
}

/// Parameter range per generator inside which the dim=40 oracle reproduces
/// moments to better than 1e-8 on states passing
/// [`representable_at_default_cutoff`], measured as the worst case over 100
/// filtered draws at each endpoint. Backward-heat directions are the binding
/// constraint: they amplify the truncation edge at roughly e^60 per unit of
/// parameter. Isotropic anti-diffusion (negative) leaks trace outright;
/// anisotropic and cross anti-diffusion (either sign squeezes one direction)
/// preserve trace exactly but pollute second moments; heating relaxation
/// amplifies the state's own edge occupancy, which the size filter bounds.
fn safe_param_range(which: Generator) -> (f64, f64) {
    match which {
        Generator::Rotation => (-PI, PI),
        Generator::HyperbolicRotation => (-0.6, 0.6),
        Generator::Scaling => (-0.6, 0.6),
        Generator::Relaxation => (-0.7, 0.3),
        Generator::IsotropicDiffusion => (-0.05, 0.6),
        Generator::AnisotropicDiffusion => (-0.15, 0.15),
        Generator::CrossDiffusion => (-0.1, 0.1),
    }
}

/// Random state comfortably inside the truncation parameter box.
fn random_box_state(rng: &mut ChaCha8Rng) -> GaussianMoments {
    GaussianMoments::from_principal_axes(
        rng.random_range(-1.2..1.2),
        rng.random_range(-1.2..1.2),
        rng.random_range(0.5..1.0),
        rng.random_range(-0.4..0.4),
        rng.random_range(-FRAC_PI_2..FRAC_PI_2),
    )
}

/// Whether moments describe an operator whose number-basis tail at the
/// default cutoff stays far below the 1e-10 trace gate: covariance
/// eigenvalues bounded away from singular (strong squeezing gives a
/// geometric tail ratio near one) and the total occupation scale bounded
/// (thermal and displacement tails). Both limits were calibrated
/// empirically at dim = 40.
fn representable_at_default_cutoff(m: &GaussianMoments) -> bool {
    let tr = m.sigma_xx + m.sigma_pp;
    let disc = (0.25 * tr * tr - m.delta()).max(0.0).sqrt();
    let lambda_min = 0.5 * tr - disc;
    let size = 0.5 * tr + disc + 0.5 * (m.mean_x * m.mean_x + m.mean_p * m.mean_p);
    lambda_min >= 0.2 && size <= 2.0
}

/// Criterion 1: each single-generator moment map reproduces the moments of
/// the exponentiated Fock superoperator.
pub fn criterion_table_maps() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let cfg = TruncationConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut max_dev = 0.0f64;
        let mut worst = String::from("none");
        let mut cases = 0;
        for which in Generator::ALL {
            let action = LiouvilleAction::from_generator(which, &cfg);
            let (lo, hi) = safe_param_range(which);
            for _ in 0..20 {
                // resample until both endpoints of the flow fit the cutoff;
                // heating a corner-of-box state (or anti-diffusing one to a
                // near-singular covariance) leaks trace through the edge
                let (param, m0, want) = loop {
                    let param = rng.random_range(lo..hi);
                    let m0 = random_box_state(&mut rng);
                    let want = if which.is_unitary() {
                        apply_unitary(&m0, which, param)?
                    } else {
                        apply_dissipative(&m0, which, param)?
                    };
                    if representable_at_default_cutoff(&m0)
                        && representable_at_default_cutoff(&want)
                    {
                        break (param, m0, want);
                    }
                };
                let rho = gaussian_state(&cfg, &m0)?;
                let got = moments_from_rho(&action.expm_apply(&rho, param))?;
                let dev = got.max_abs_diff(&want);
                if dev > max_dev {
                    max_dev = dev;
                    worst = format!("{which} at parameter {param:.4}");
                }
                cases += 1;
            }
        }
        Ok((max_dev, cases, format!("worst case: {worst}")))
    };
    finish("table-maps-vs-oracle", 1e-7, start, body())
}

/// Criterion 2: the generalized uncertainty is invariant under random
/// compositions of the three unitary maps.
pub fn criterion_unitary_invariance() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut max_dev = 0.0f64;
        let trials = 10_000;
        for _ in 0..trials {
            let m0 = GaussianMoments::from_principal_axes(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.5..2.0),
                rng.random_range(-0.7..0.7),
                rng.random_range(-FRAC_PI_2..FRAC_PI_2),
            );
            let mut m = m0;
            // hyperbolic and scaling steps stay small so covariances do not
            // grow into the range where delta loses absolute precision
            for _ in 0..rng.random_range(1..=5) {
                let which = Generator::UNITARY[rng.random_range(0..3)];
                let param = if which == Generator::Rotation {
                    rng.random_range(-PI..PI)
                } else {
                    rng.random_range(-0.3..0.3)
                };
                m = apply_unitary(&m, which, param)?;
            }
            max_dev = max_dev.max((m.delta() - m0.delta()).abs());
        }
        Ok((max_dev, trials, String::new()))
    };
    finish("uncertainty-unitary-invariance", 1e-12, start, body())
}

/// Criterion 3: all 49 generator brackets match the expected table on the
/// interior block at dim = 12.
pub fn criterion_commutator_table() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let report = commutator_table_check(&TruncationConfig {
            dim: 12,
            tail_tol: 1e-8,
        })?;
        Ok((
            report.max_deviation,
            report.pairs,
            format!("worst pair [{}, {}]", report.worst.0, report.worst.1),
        ))
    };
    finish("commutator-table", 1e-10, start, body())
}

/// Criterion 4: biorthonormality and diagonalization of the closed-form
/// eigensystem, and the closed coefficient flow against the matrix
/// exponential, for 100 random oscillatory coefficient triples.
pub fn criterion_eigensystem_flow() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut max_dev = 0.0f64;
        let mut cases = 0;
        for _ in 0..100 {
            let phi: f64 = rng.random_range(-1.0..1.0);
            let psi: f64 = rng.random_range(-1.0..1.0);
            let margin: f64 = rng.random_range(0.3..2.0);
            let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
            let theta = sign * (phi.hypot(psi) + margin);
            let u = UnitaryCoefficients::new(theta, phi, psi);
            let k = build_coupling_matrix(&u);
            let es = eigensystem(&k)?;

            // left/right pairing is the identity
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    max_dev = max_dev.max((es.pairing(i, j) - want).norm());
                }
            }
            // V^dagger K U = diag(0, +i w, -i w) on the raw matrix
            let raw = [
                [0.0, -psi, phi],
                [-psi, 0.0, theta],
                [phi, -theta, 0.0],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    let mut val = num_complex::Complex64::ZERO;
                    for r in 0..3 {
                        let mut ku = num_complex::Complex64::ZERO;
                        for c in 0..3 {
                            ku += num_complex::Complex64::new(raw[r][c], 0.0) * es.right[j][c];
                        }
                        val += es.left[i][r].conj() * ku;
                    }
                    let want = if i == j {
                        es.lambda[i]
                    } else {
                        num_complex::Complex64::ZERO
                    };
                    max_dev = max_dev.max((val - want).norm());
                }
            }
            // closed flow vs matrix exponential at 10 random times
            let d = DissipativeCoefficients::new(
                0.0,
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            for _ in 0..10 {
                let t = rng.random_range(0.0..5.0);
                let a = eta_bar(&u, &d, t);
                let b = eta_bar_exp(&u, &d, t);
                for j in 0..3 {
                    max_dev = max_dev.max((a[j] - b[j]).abs());
                }
            }
            cases += 1;
        }
        Ok((max_dev, cases, String::new()))
    };
    finish("eigensystem-and-coefficient-flow", 1e-12, start, body())
}

/// Criterion 5: the closed-form coefficient functions match the
/// rate-equation integration across the preset parameter grid.
pub fn criterion_closed_g_vs_ode() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let times: Vec<f64> = (1..=100).map(|k| 0.5 * k as f64).collect();
        let ctl = StepControl::default();
        let mut max_dev = 0.0f64;
        let mut cases = 0;
        let mut worst = String::from("none");
        for kind in [
            EquationKind::KossakowskiLindblad,
            EquationKind::CaldeiraLeggett,
            EquationKind::HuPazZhang,
        ] {
            let d_values: &[f64] = if kind == EquationKind::HuPazZhang {
                &[0.0, 0.2, -0.2]
            } else {
                &[0.0]
            };
            for &gamma in &[0.05, 0.1, 0.5] {
                for &b in &[0.5, 1.0] {
                    for &d in d_values {
                        let spec = MasterEquationSpec::new(kind, 1.0, gamma, b, d)?;
                        let (u, dc) = spec.coefficients();
                        let ode = compute_g_ode_sampled(&u, &dc, &times, &ctl)?;
                        for (t, g_ode) in times.iter().zip(&ode) {
                            let g_cl = spec.g_closed(*t)?;
                            let dev = (g_cl.g0 - g_ode.g0)
                                .abs()
                                .max((g_cl.g1 - g_ode.g1).abs())
                                .max((g_cl.g2 - g_ode.g2).abs());
                            if dev > max_dev {
                                max_dev = dev;
                                worst = format!("{kind} gamma={gamma} b={b} d={d} t={t}");
                            }
                            cases += 1;
                        }
                    }
                }
            }
        }
        Ok((max_dev, cases, format!("worst case: {worst}")))
    };
    finish("closed-g-vs-ode", 1e-8, start, body())
}

/// Criterion 6: long-time limits. Exactness for the first two presets,
/// leading-order agreement within 3*gamma_hat^2 for the third, and the
/// one-period time average of delta near t = 30/gamma within 1 percent.
/// Deviations are normalized by their individual thresholds, so the
/// reported tolerance is 1.
pub fn criterion_longtime_limits() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let mut worst_ratio = 0.0f64;
        let mut cases = 0;
        let mut worst = String::from("none");
        let push = |ratio: f64, label: String, worst_ratio: &mut f64, worst: &mut String| {
            if ratio > *worst_ratio {
                *worst_ratio = ratio;
                *worst = label;
            }
        };

        // exactness of the stripped limits for the first two presets
        for &gamma in &[0.1, 0.5] {
            for &b in &[0.5, 1.0, 1.3] {
                let l = MasterEquationSpec::kl(1.0, gamma, b)?.delta_longtime()?;
                let ratio = (l.exact - l.leading_order).abs() / (1e-12 * l.leading_order);
                push(
                    ratio,
                    format!("kl exactness gamma={gamma} b={b}"),
                    &mut worst_ratio,
                    &mut worst,
                );
                let l = MasterEquationSpec::cl(1.0, gamma, b)?.delta_longtime()?;
                let ratio = (l.exact - l.leading_order).abs() / (1e-12 * l.leading_order);
                push(
                    ratio,
                    format!("cl exactness gamma={gamma} b={b}"),
                    &mut worst_ratio,
                    &mut worst,
                );
                cases += 2;
            }
        }

        // leading-order agreement for the third preset
        for &gamma in &[0.05, 0.1, 0.4] {
            for &(b, d) in &[(0.6, 0.2), (0.6, -0.2), (1.0, 0.3)] {
                let spec = MasterEquationSpec::hpz(1.0, gamma, b, d)?;
                let gh = gamma / spec.omega()?;
                let l = spec.delta_longtime()?;
                let rel = (l.exact - l.leading_order).abs() / l.leading_order;
                push(
                    rel / (3.0 * gh * gh),
                    format!("hpz leading-order gamma={gamma} b={b} d={d}"),
                    &mut worst_ratio,
                    &mut worst,
                );
                cases += 1;
            }
        }

        // one-period time average at t = 30/gamma within 1 percent
        let m0 = GaussianMoments::coherent(1.0, 0.5);
        for &gamma in &[0.05, 0.08] {
            for spec in [
                MasterEquationSpec::cl(1.0, gamma, 1.0)?,
                MasterEquationSpec::hpz(1.0, gamma, 1.0, 0.2)?,
            ] {
                let omega = spec.omega()?;
                let period = 2.0 * PI / omega;
                let t0 = 30.0 / gamma;
                let f = |t: f64| {
                    interaction_delta(&m0, &spec.g_closed(t).expect("oscillatory preset"))
                };
                let avg = adaptive_simpson(&f, t0, t0 + period, 1e-10, 40)? / period;
                let exact = spec.delta_longtime()?.exact;
                let rel = (avg - exact).abs() / exact;
                push(
                    rel / 0.01,
                    format!("{} period-average gamma={gamma}", spec.kind),
                    &mut worst_ratio,
                    &mut worst,
                );
                cases += 1;
            }
        }
        Ok((worst_ratio, cases, format!("worst case: {worst}")))
    };
    finish("long-time-limits", 1.0, start, body())
}

fn oracle_presets() -> Result<[MasterEquationSpec; 3]> {
    Ok([
        MasterEquationSpec::kl(1.0, 0.5, 0.5)?,
        MasterEquationSpec::cl(1.0, 0.2, 0.8)?,
        MasterEquationSpec::hpz(1.0, 0.1, 0.6, 0.05)?,
    ])
}

fn oracle_states() -> [GaussianMoments; 5] {
    [
        GaussianMoments::vacuum(),
        GaussianMoments::coherent(1.2, -0.8),
        GaussianMoments::thermal(1.0),
        GaussianMoments::from_principal_axes(0.5, 0.3, 0.6, 0.45, 0.7),
        GaussianMoments::from_principal_axes(-1.0, 0.5, 1.0, -0.5, 0.0),
    ]
}

/// Criterion 7: full moment trajectories from the closed-form pipeline match
/// the density-matrix oracle for every preset and initial state.
pub fn criterion_oracle_equivalence() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let cfg = TruncationConfig::default();
        let times: Vec<f64> = (1..=50).map(|k| 0.4 * k as f64).collect();
        let mut max_dev = 0.0f64;
        let mut cases = 0;
        let mut worst = String::from("none");
        for (pi, preset) in oracle_presets()?.iter().enumerate() {
            let (u, dc) = preset.coefficients();
            for (si, m0) in oracle_states().iter().enumerate() {
                let rho = gaussian_state(&cfg, m0)?;
                let oracle = oracle_trajectory(&u, &dc, &rho, &times, &cfg)?;
                let closed = preset.trajectory_closed(m0, &times)?;
                for (point, oracle_m) in closed.points.iter().zip(&oracle) {
                    let dev = point.moments.max_abs_diff(oracle_m);
                    if dev > max_dev {
                        max_dev = dev;
                        worst = format!("preset {} state {} t={}", pi + 1, si + 1, point.t);
                    }
                    cases += 1;
                }
            }
        }
        Ok((max_dev, cases, format!("worst case: {worst}")))
    };
    finish("oracle-equivalence", 1e-6, start, body())
}

/// Criterion 8: the generalized uncertainty stays at or above 1/4 along
/// every physical trajectory of criterion 7, and the known violating preset
/// is flagged and actually dips below 1/4.
pub fn criterion_positivity_sentinel() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let times: Vec<f64> = (1..=50).map(|k| 0.4 * k as f64).collect();
        let mut shortfall = 0.0f64;
        let mut min_delta = f64::INFINITY;
        let mut cases = 0;
        for preset in oracle_presets()? {
            for m0 in oracle_states() {
                let traj = preset.trajectory_closed(&m0, &times)?;
                let d = traj.min_delta();
                min_delta = min_delta.min(d);
                shortfall = shortfall.max(0.25 - d);
                cases += 1;
            }
        }

        // sentinel: anomalous diffusion strong and negative
        let sentinel = MasterEquationSpec::hpz(1.0, 0.05, 0.5, -1.2)?;
        let report = sentinel.positivity_check()?;
        let long_times: Vec<f64> = (1..=40).map(|k| 5.0 * k as f64).collect();
        let dip = sentinel
            .trajectory_closed(&GaussianMoments::vacuum(), &long_times)?
            .min_delta();
        let flagged = !report.physical
            && (report.limit_leading_order - 0.04).abs() < 1e-12
            && dip < 0.25 - 1e-3;
        if !flagged {
            return Err(Error::InvalidParameter(format!(
                "sentinel not flagged: physical={} leading={} dip={}",
                report.physical, report.limit_leading_order, dip
            )));
        }
        cases += 1;
        Ok((
            shortfall,
            cases,
            format!(
                "min delta {min_delta:.12}; sentinel limit {:.6} flagged, trajectory dips to {dip:.4}",
                report.limit_exact
            ),
        ))
    };
    finish("positivity-sentinel", 1e-6, start, body())
}

/// Criterion 9: the analytic moment rates equal centered finite differences
/// of the single-generator maps.
pub fn criterion_rates_finite_difference() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let eps = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut max_dev = 0.0f64;
        let mut cases = 0;
        for which in Generator::ALL {
            for _ in 0..5 {
                let m = random_box_state(&mut rng);
                let map = |p: f64| -> Result<GaussianMoments> {
                    if which.is_unitary() {
                        apply_unitary(&m, which, p)
                    } else {
                        apply_dissipative(&m, which, p)
                    }
                };
                let plus = map(eps)?;
                let minus = map(-eps)?;
                let fd = MomentRates {
                    mean_x: (plus.mean_x - minus.mean_x) / (2.0 * eps),
                    mean_p: (plus.mean_p - minus.mean_p) / (2.0 * eps),
                    sigma_xx: (plus.sigma_xx - minus.sigma_xx) / (2.0 * eps),
                    sigma_pp: (plus.sigma_pp - minus.sigma_pp) / (2.0 * eps),
                    sigma_xp: (plus.sigma_xp - minus.sigma_xp) / (2.0 * eps),
                };
                let rates = infinitesimal_rates(which, &m);
                max_dev = max_dev.max(fd.max_abs_diff(&rates));
                cases += 1;
            }
        }
        Ok((max_dev, cases, String::new()))
    };
    finish("rates-vs-finite-difference", 1e-9, start, body())
}

/// Cutoff adequacy: doubling the Fock dimension moves oracle moments by less
/// than 1e-8 on a representative preset trajectory.
pub fn check_cutoff_drift() -> Check {
    let start = Instant::now();
    let body = || -> Result<(f64, usize, String)> {
        let spec = MasterEquationSpec::cl(1.0, 0.2, 0.8)?;
        let (u, dc) = spec.coefficients();
        let m0 = GaussianMoments::coherent(1.0, 0.5);
        let times = [2.0, 5.0];
        let mut max_dev = 0.0f64;
        let mut samples = Vec::new();
        for dim in [20, 40] {
            let cfg = TruncationConfig { dim, tail_tol: 1e-8 };
            let rho = gaussian_state(&cfg, &m0)?;
            samples.push(oracle_trajectory(&u, &dc, &rho, &times, &cfg)?);
        }
        for (a, b) in samples[0].iter().zip(&samples[1]) {
            max_dev = max_dev.max(a.max_abs_diff(b));
        }
        Ok((max_dev, times.len(), String::from("dim 20 vs dim 40")))
    };
    finish("cutoff-drift", 1e-8, start, body())
}

#[cfg(test)]
mod tests {
    use super::*;

    // The slow criteria run from the acceptance suite; here only the quick
    // ones are exercised as ordinary unit tests.

    #[test]
    fn quick_criteria_pass() {
        for check in [
            criterion_unitary_invariance(),
            criterion_eigensystem_flow(),
            criterion_rates_finite_difference(),
        ] {
            assert!(check.passed, "{}", check.summary_line());
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for kind in SuiteKind::ALL {
            let parsed: SuiteKind = kind.name().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("nope".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn failed_body_reports_failure() {
        let check = finish(
            "synthetic",
            1e-9,
            Instant::now(),
            Err(Error::InvalidParameter("boom".into())),
        );
        assert!(!check.passed);
        assert!(check.detail.contains("boom"));
    }
}
