//! The three named dissipative presets, their closed-form coefficient
//! functions, and their long-time uncertainty limits.
//!
//! Each preset fixes the seven generator weights in terms of an oscillator
//! frequency `omega0`, a relaxation constant `gamma`, a temperature
//! parameter `b`, and (for the third preset) an anomalous-diffusion
//! coefficient `d`. All three stay inside the oscillatory regime for
//! `gamma < 2*omega0`, where every coefficient function closes in
//! elementary terms.

use serde::{Deserialize, Serialize};

use crate::algebra::{DissipativeCoefficients, UnitaryCoefficients};
use crate::error::{Error, Result};
use crate::evolution::{asymptotic_delta, trajectory_with, GCoefficients, Trajectory};
use crate::moments::GaussianMoments;

/// The supported master-equation presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationKind {
    #[serde(rename = "kl")]
    KossakowskiLindblad,
    #[serde(rename = "cl")]
    CaldeiraLeggett,
    #[serde(rename = "hpz")]
    HuPazZhang,
}

impl EquationKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::KossakowskiLindblad => "kl",
            Self::CaldeiraLeggett => "cl",
            Self::HuPazZhang => "hpz",
        }
    }
}

impl std::fmt::Display for EquationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kl" | "kossakowski-lindblad" => Ok(Self::KossakowskiLindblad),
            "cl" | "caldeira-leggett" => Ok(Self::CaldeiraLeggett),
            "hpz" | "hu-paz-zhang" => Ok(Self::HuPazZhang),
            other => Err(Error::InvalidParameter(format!(
                "unknown equation kind {other:?} (expected kl, cl, or hpz)"
            ))),
        }
    }
}

/// A validated preset instance.
///
/// `d` is meaningful only for [`EquationKind::HuPazZhang`] and is normalized
/// to zero for the other kinds at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterEquationSpec {
    pub kind: EquationKind,
    pub omega0: f64,
    pub gamma: f64,
    pub b: f64,
    pub d: f64,
}

/// Long-time generalized uncertainty of a preset.
///
/// `leading_order` keeps only terms linear in the damping ratio and is exact
/// for the first two presets; `exact` evaluates the limiting coefficients
/// without expansion. Positivity decisions use `exact`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongTimeDelta {
    pub leading_order: f64,
    pub exact: f64,
}

/// Outcome of the long-time positivity test of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    /// True iff the exact long-time uncertainty stays at or above 1/4.
    pub physical: bool,
    pub limit_exact: f64,
    pub limit_leading_order: f64,
    /// `limit_exact - 1/4`; negative means the preset violates positivity.
    pub margin: f64,
}

/// Derived frequency data of the oscillatory regime.
struct Hatted {
    omega: f64,
    gamma_hat: f64,
    /// sqrt(1 + gamma_hat^2) = 2*omega0/omega.
    theta_hat: f64,
    d_hat: f64,
}

impl MasterEquationSpec {
    /// Builds a validated preset; `b` must stay in the thermal range
    /// (>= 1/2). Use [`MasterEquationSpec::exploratory`] to lift that bound.
    pub fn new(kind: EquationKind, omega0: f64, gamma: f64, b: f64, d: f64) -> Result<Self> {
        if !(b >= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "temperature parameter b must be >= 1/2, got {b}"
            )));
        }
        Self::exploratory(kind, omega0, gamma, b, d)
    }

    /// Like [`MasterEquationSpec::new`] but allows any finite `b`, for
    /// probing the unphysical region deliberately.
    pub fn exploratory(
        kind: EquationKind,
        omega0: f64,
        gamma: f64,
        b: f64,
        d: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "oscillator frequency must be positive and finite, got {omega0}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "relaxation constant must be >= 0 and finite, got {gamma}"
            )));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperature parameter must be finite, got {b}"
            )));
        }
        if !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "anomalous-diffusion coefficient must be finite, got {d}"
            )));
        }
        let d = if kind == EquationKind::HuPazZhang {
            d
        } else {
            0.0
        };
        Ok(Self {
            kind,
            omega0,
            gamma,
            b,
            d,
        })
    }

    pub fn kl(omega0: f64, gamma: f64, b: f64) -> Result<Self> {
        Self::new(EquationKind::KossakowskiLindblad, omega0, gamma, b, 0.0)
    }

    pub fn cl(omega0: f64, gamma: f64, b: f64) -> Result<Self> {
        Self::new(EquationKind::CaldeiraLeggett, omega0, gamma, b, 0.0)
    }

    pub fn hpz(omega0: f64, gamma: f64, b: f64, d: f64) -> Result<Self> {
        Self::new(EquationKind::HuPazZhang, omega0, gamma, b, d)
    }

    /// The seven generator weights of this preset. The first preset drives
    /// only the rotation; the others add a scaling `psi = -gamma` and
    /// anisotropic diffusion; the third adds cross diffusion `eta2 = -d`.
    pub fn coefficients(&self) -> (UnitaryCoefficients, DissipativeCoefficients) {
        let two_gb = -2.0 * self.gamma * self.b;
        match self.kind {
            EquationKind::KossakowskiLindblad => (
                UnitaryCoefficients::new(2.0 * self.omega0, 0.0, 0.0),
                DissipativeCoefficients::new(self.gamma, two_gb, 0.0, 0.0),
            ),
            EquationKind::CaldeiraLeggett => (
                UnitaryCoefficients::new(2.0 * self.omega0, 0.0, -self.gamma),
                DissipativeCoefficients::new(self.gamma, two_gb, two_gb, 0.0),
            ),
            EquationKind::HuPazZhang => (
                UnitaryCoefficients::new(2.0 * self.omega0, 0.0, -self.gamma),
                DissipativeCoefficients::new(self.gamma, two_gb, two_gb, -self.d),
            ),
        }
    }

    /// Interaction-picture frequency of the preset. The first preset is
    /// oscillatory for any `gamma`; the others require `gamma < 2*omega0`.
    pub fn omega(&self) -> Result<f64> {
        match self.kind {
            EquationKind::KossakowskiLindblad => Ok(2.0 * self.omega0),
            _ => {
                let w2 = 4.0 * self.omega0 * self.omega0 - self.gamma * self.gamma;
                if w2 > 0.0 {
                    Ok(w2.sqrt())
                } else {
                    Err(Error::Overdamped {
                        kind: self.kind.name(),
                        gamma: self.gamma,
                        omega0: self.omega0,
                    })
                }
            }
        }
    }

    fn hatted(&self) -> Result<Hatted> {
        let omega = self.omega()?;
        let gamma_hat = self.gamma / omega;
        Ok(Hatted {
            omega,
            gamma_hat,
            theta_hat: 2.0 * self.omega0 / omega,
            d_hat: self.d / omega,
        })
    }

    /// Closed-form interaction-picture diffusion coefficients at time `t`.
    /// Agrees with [`crate::algebra::eta_bar`] on [`Self::coefficients`].
    pub fn eta_bar_closed(&self, t: f64) -> Result<[f64; 3]> {
        let (g, b) = (self.gamma, self.b);
        if self.kind == EquationKind::KossakowskiLindblad {
            return Ok([-2.0 * b * g, 0.0, 0.0]);
        }
        let h = self.hatted()?;
        let (gh, th) = (h.gamma_hat, h.theta_hat);
        let (c, s) = ((h.omega * t).cos(), (h.omega * t).sin());
        // grouped as constants plus (1 - cos) so that t = 0 is exact
        let mut e = [
            -2.0 * b * g * (1.0 + gh * gh * (1.0 - c) + gh * s),
            -2.0 * b * g * (c + gh * s),
            2.0 * b * g * th * (gh * (1.0 - c) + s),
        ];
        if self.kind == EquationKind::HuPazZhang {
            e[0] += th * gh * self.d * (c - 1.0);
            e[1] -= th * self.d * s;
            e[2] += self.d * (gh * gh - th * th * c);
        }
        Ok(e)
    }

    /// Closed-form decomposition coefficients at time `t`, with `h` set to
    /// `-gamma*t`. Agrees with [`crate::evolution::compute_g_ode`] on
    /// [`Self::coefficients`].
    pub fn g_closed(&self, t: f64) -> Result<GCoefficients> {
        let (g, b) = (self.gamma, self.b);
        let decay = (-g * t).exp();
        let (g0, g1, g2) = match self.kind {
            EquationKind::KossakowskiLindblad => (2.0 * b * (1.0 - decay), 0.0, 0.0),
            _ => {
                let h = self.hatted()?;
                let (gh, th) = (h.gamma_hat, h.theta_hat);
                let (c, s) = ((h.omega * t).cos(), (h.omega * t).sin());
                // grouped as (1 - decay) and (1 - cos) so that t = 0 is exact
                let mut g0 = 2.0 * b * ((1.0 - decay) + gh * gh * (1.0 - c));
                let mut g1 = 2.0 * b * gh * s;
                let mut g2 = 2.0 * b * gh * th * (c - 1.0);
                if self.kind == EquationKind::HuPazZhang {
                    let r = h.d_hat / th;
                    g0 += r * ((1.0 - decay) + gh * gh * (1.0 - c) - gh * s);
                    g1 += r * (decay - c + gh * s);
                    g2 += h.d_hat * (gh * (c - 1.0) + s);
                }
                (g0, g1, g2)
            }
        };
        Ok(GCoefficients {
            h: -g * t,
            g0,
            g1,
            g2,
            t,
        })
    }

    /// Limiting decomposition coefficients: every decaying and every
    /// oscillating term of the closed forms dropped, constants kept.
    pub fn g_longtime(&self) -> Result<[f64; 3]> {
        let b = self.b;
        match self.kind {
            EquationKind::KossakowskiLindblad => Ok([2.0 * b, 0.0, 0.0]),
            _ => {
                let h = self.hatted()?;
                let (gh, th) = (h.gamma_hat, h.theta_hat);
                // both remaining presets share the structure
                // g0 -> th*(2b*th + r), g2 -> -gh*(2b*th + r), r = d_hat
                let r = if self.kind == EquationKind::HuPazZhang {
                    h.d_hat
                } else {
                    0.0
                };
                let core = 2.0 * b * th + r;
                Ok([th * core, 0.0, -gh * core])
            }
        }
    }

    /// Long-time generalized uncertainty, in both conventions.
    pub fn delta_longtime(&self) -> Result<LongTimeDelta> {
        let [g0, g1, g2] = self.g_longtime()?;
        let exact = asymptotic_delta(g0, g1, g2);
        let leading_order = match self.kind {
            EquationKind::KossakowskiLindblad => self.b * self.b,
            EquationKind::CaldeiraLeggett => {
                let gh = self.hatted()?.gamma_hat;
                self.b * self.b * (1.0 + gh * gh)
            }
            EquationKind::HuPazZhang => {
                let v = self.b + self.d / (4.0 * self.omega0);
                v * v
            }
        };
        Ok(LongTimeDelta {
            leading_order,
            exact,
        })
    }

    /// Tests whether the preset keeps the generalized uncertainty at or
    /// above 1/4 in the long-time limit.
    pub fn positivity_check(&self) -> Result<PositivityReport> {
        let limits = self.delta_longtime()?;
        Ok(PositivityReport {
            physical: limits.exact >= 0.25,
            limit_exact: limits.exact,
            limit_leading_order: limits.leading_order,
            margin: limits.exact - 0.25,
        })
    }

    /// Full moment trajectory from `m0` using the closed-form coefficients.
    pub fn trajectory_closed(&self, m0: &GaussianMoments, times: &[f64]) -> Result<Trajectory> {
        let (u, d) = self.coefficients();
        trajectory_with(m0, &u, &d, times, |t| self.g_closed(t))
    }
}
