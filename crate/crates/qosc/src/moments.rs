//! Phase-space moment representation of oscillator states and the closed-form
//! moment maps of the seven elementary generators.
//!
//! A Gaussian state is fully described by the means of position and momentum
//! and the three second central moments. Each generator exponentiated alone
//! moves those five numbers along a simple closed-form flow; those flows and
//! their derivatives at zero parameter live here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slack used when deciding physicality, covering float rounding in
/// long products of maps.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// First and second moments of a state in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_xx: f64,
    pub sigma_pp: f64,
    pub sigma_xp: f64,
}

impl GaussianMoments {
    pub fn new(mean_x: f64, mean_p: f64, sigma_xx: f64, sigma_pp: f64, sigma_xp: f64) -> Self {
        Self {
            mean_x,
            mean_p,
            sigma_xx,
            sigma_pp,
            sigma_xp,
        }
    }

    /// Minimum-uncertainty state centered at the origin.
    pub fn vacuum() -> Self {
        Self::new(0.0, 0.0, 0.5, 0.5, 0.0)
    }

    /// Minimum-uncertainty state displaced to (`mean_x`, `mean_p`).
    pub fn coherent(mean_x: f64, mean_p: f64) -> Self {
        Self::new(mean_x, mean_p, 0.5, 0.5, 0.0)
    }

    /// Isotropic mixed state with variance `b` in both quadratures
    /// (physical for b >= 1/2).
    pub fn thermal(b: f64) -> Self {
        Self::new(0.0, 0.0, b, b, 0.0)
    }

    /// State specified by its covariance principal axes: purity parameter
    /// `nu` (sqrt of the generalized uncertainty, >= 1/2 for physical
    /// states), squeeze exponent `zeta` (principal variances nu*e^{+-zeta}),
    /// and the angle `chi` from the x axis to the larger principal axis.
    pub fn from_principal_axes(mean_x: f64, mean_p: f64, nu: f64, zeta: f64, chi: f64) -> Self {
        let big = nu * zeta.exp();
        let small = nu * (-zeta).exp();
        let (s, c) = chi.sin_cos();
        Self::new(
            mean_x,
            mean_p,
            big * c * c + small * s * s,
            big * s * s + small * c * c,
            (big - small) * s * c,
        )
    }

    /// Generalized uncertainty sigma_xx*sigma_pp - sigma_xp^2. Physical states
    /// satisfy delta() >= 1/4.
    pub fn delta(&self) -> f64 {
        self.sigma_xx * self.sigma_pp - self.sigma_xp * self.sigma_xp
    }

    /// True iff delta() >= 1/4 - tol.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.delta() >= 0.25 - tol
    }

    /// Componentwise maximum absolute difference; handy for comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.mean_x - other.mean_x)
            .abs()
            .max((self.mean_p - other.mean_p).abs())
            .max((self.sigma_xx - other.sigma_xx).abs())
            .max((self.sigma_pp - other.sigma_pp).abs())
            .max((self.sigma_xp - other.sigma_xp).abs())
    }
}

/// The seven elementary generators, named by their action on moments.
///
/// The first three exponentiate to symplectic (uncertainty-preserving) maps;
/// the remaining four damp or diffuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// Rotates phase space by half the parameter.
    Rotation,
    /// Hyperbolically mixes position and momentum.
    HyperbolicRotation,
    /// Scales position up and momentum down reciprocally.
    Scaling,
    /// Uniform exponential damping of means and covariances.
    Relaxation,
    /// Shifts both variances equally.
    IsotropicDiffusion,
    /// Shifts the two variances oppositely.
    AnisotropicDiffusion,
    /// Shifts only the position-momentum covariance.
    CrossDiffusion,
}

impl Generator {
    pub const ALL: [Generator; 7] = [
        Generator::Rotation,
        Generator::HyperbolicRotation,
        Generator::Scaling,
        Generator::Relaxation,
        Generator::IsotropicDiffusion,
        Generator::AnisotropicDiffusion,
        Generator::CrossDiffusion,
    ];
    pub const UNITARY: [Generator; 3] = [
        Generator::Rotation,
        Generator::HyperbolicRotation,
        Generator::Scaling,
    ];
    pub const DISSIPATIVE: [Generator; 4] = [
        Generator::Relaxation,
        Generator::IsotropicDiffusion,
        Generator::AnisotropicDiffusion,
        Generator::CrossDiffusion,
    ];

    pub fn is_unitary(self) -> bool {
        matches!(
            self,
            Generator::Rotation | Generator::HyperbolicRotation | Generator::Scaling
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Rotation => "rotation",
            Generator::HyperbolicRotation => "hyperbolic-rotation",
            Generator::Scaling => "scaling",
            Generator::Relaxation => "relaxation",
            Generator::IsotropicDiffusion => "isotropic-diffusion",
            Generator::AnisotropicDiffusion => "anisotropic-diffusion",
            Generator::CrossDiffusion => "cross-diffusion",
        }
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rotation" => Ok(Generator::Rotation),
            "hyperbolic-rotation" | "hyperbolic" => Ok(Generator::HyperbolicRotation),
            "scaling" => Ok(Generator::Scaling),
            "relaxation" => Ok(Generator::Relaxation),
            "isotropic-diffusion" | "isotropic" => Ok(Generator::IsotropicDiffusion),
            "anisotropic-diffusion" | "anisotropic" => Ok(Generator::AnisotropicDiffusion),
            "cross-diffusion" | "cross" => Ok(Generator::CrossDiffusion),
            other => Err(Error::InvalidParameter(format!(
                "unknown generator `{other}`"
            ))),
        }
    }
}

/// Applies a 2x2 linear map to means (S v) and covariances (S Sigma S^T).
pub fn apply_linear_map(m: &GaussianMoments, s: &[[f64; 2]; 2]) -> GaussianMoments {
    let [[s00, s01], [s10, s11]] = *s;
    GaussianMoments {
        mean_x: s00 * m.mean_x + s01 * m.mean_p,
        mean_p: s10 * m.mean_x + s11 * m.mean_p,
        sigma_xx: s00 * s00 * m.sigma_xx + 2.0 * s00 * s01 * m.sigma_xp + s01 * s01 * m.sigma_pp,
        sigma_pp: s10 * s10 * m.sigma_xx + 2.0 * s10 * s11 * m.sigma_xp + s11 * s11 * m.sigma_pp,
        sigma_xp: s00 * s10 * m.sigma_xx
            + (s00 * s11 + s01 * s10) * m.sigma_xp
            + s01 * s11 * m.sigma_pp,
    }
}

fn wrong_kind(operation: &'static str, expected: &'static str, got: Generator) -> Error {
    Error::WrongGeneratorKind {
        operation,
        expected,
        got: got.name(),
    }
}

/// Exponentiated action of a single unitary generator on moments.
///
/// Rejects dissipative generators. The generalized uncertainty is preserved
/// exactly (up to rounding) by all three maps.
pub fn apply_unitary(m: &GaussianMoments, which: Generator, param: f64) -> Result<GaussianMoments> {
    let half = 0.5 * param;
    let s = match which {
        Generator::Rotation => {
            let (sin, cos) = half.sin_cos();
            [[cos, -sin], [sin, cos]]
        }
        Generator::HyperbolicRotation => {
            let (sinh, cosh) = (half.sinh(), half.cosh());
            [[cosh, sinh], [sinh, cosh]]
        }
        Generator::Scaling => [[half.exp(), 0.0], [0.0, (-half).exp()]],
        other => return Err(wrong_kind("apply_unitary", "unitary", other)),
    };
    Ok(apply_linear_map(m, &s))
}

/// Exponentiated action of a single dissipative generator on moments.
///
/// Rejects unitary generators. Relaxation scales means by e^{param/2} and
/// covariances by e^{param}; the three diffusion generators shift covariances
/// affinely and leave means alone.
pub fn apply_dissipative(
    m: &GaussianMoments,
    which: Generator,
    param: f64,
) -> Result<GaussianMoments> {
    let mut out = *m;
    match which {
        Generator::Relaxation => {
            let e = param.exp();
            let e_half = (0.5 * param).exp();
            out.mean_x *= e_half;
            out.mean_p *= e_half;
            out.sigma_xx *= e;
            out.sigma_pp *= e;
            out.sigma_xp *= e;
        }
        Generator::IsotropicDiffusion => {
            out.sigma_xx += 0.5 * param;
            out.sigma_pp += 0.5 * param;
        }
        Generator::AnisotropicDiffusion => {
            out.sigma_xx -= 0.5 * param;
            out.sigma_pp += 0.5 * param;
        }
        Generator::CrossDiffusion => {
            out.sigma_xp += 0.5 * param;
        }
        other => return Err(wrong_kind("apply_dissipative", "dissipative", other)),
    }
    Ok(out)
}

/// Closed-form generalized uncertainty after a dissipative map, written as a
/// quadratic in the parameter and the *initial* moments. Agrees with
/// `apply_dissipative(..).delta()` up to rounding.
pub fn dissipative_delta(m: &GaussianMoments, which: Generator, param: f64) -> Result<f64> {
    let d = m.delta();
    Ok(match which {
        Generator::Relaxation => (2.0 * param).exp() * d,
        Generator::IsotropicDiffusion => {
            d + 0.5 * param * (m.sigma_xx + m.sigma_pp) + 0.25 * param * param
        }
        Generator::AnisotropicDiffusion => {
            d + 0.5 * param * (m.sigma_xx - m.sigma_pp) - 0.25 * param * param
        }
        Generator::CrossDiffusion => d - param * m.sigma_xp - 0.25 * param * param,
        other => return Err(wrong_kind("dissipative_delta", "dissipative", other)),
    })
}

/// Derivative of each moment with respect to the generator parameter at
/// parameter zero.
///
/// These rates have two independent derivations: differentiating the closed
/// maps, and integrating the generators' phase-space differential operators
/// against a Gaussian by parts. Both give the forms below.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentRates {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_xx: f64,
    pub sigma_pp: f64,
    pub sigma_xp: f64,
}

pub fn infinitesimal_rates(which: Generator, m: &GaussianMoments) -> MomentRates {
    match which {
        Generator::Rotation => MomentRates {
            mean_x: -0.5 * m.mean_p,
            mean_p: 0.5 * m.mean_x,
            sigma_xx: -m.sigma_xp,
            sigma_pp: m.sigma_xp,
            sigma_xp: 0.5 * (m.sigma_xx - m.sigma_pp),
        },
        Generator::HyperbolicRotation => MomentRates {
            mean_x: 0.5 * m.mean_p,
            mean_p: 0.5 * m.mean_x,
            sigma_xx: m.sigma_xp,
            sigma_pp: m.sigma_xp,
            sigma_xp: 0.5 * (m.sigma_xx + m.sigma_pp),
        },
        Generator::Scaling => MomentRates {
            mean_x: 0.5 * m.mean_x,
            mean_p: -0.5 * m.mean_p,
            sigma_xx: m.sigma_xx,
            sigma_pp: -m.sigma_pp,
            sigma_xp: 0.0,
        },
        Generator::Relaxation => MomentRates {
            mean_x: 0.5 * m.mean_x,
            mean_p: 0.5 * m.mean_p,
            sigma_xx: m.sigma_xx,
            sigma_pp: m.sigma_pp,
            sigma_xp: m.sigma_xp,
        },
        Generator::IsotropicDiffusion => MomentRates {
            sigma_xx: 0.5,
            sigma_pp: 0.5,
            ..Default::default()
        },
        Generator::AnisotropicDiffusion => MomentRates {
            sigma_xx: -0.5,
            sigma_pp: 0.5,
            ..Default::default()
        },
        Generator::CrossDiffusion => MomentRates {
            sigma_xp: 0.5,
            ..Default::default()
        },
    }
}

impl MomentRates {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.mean_x - other.mean_x)
            .abs()
            .max((self.mean_p - other.mean_p).abs())
            .max((self.sigma_xx - other.sigma_xx).abs())
            .max((self.sigma_pp - other.sigma_pp).abs())
            .max((self.sigma_xp - other.sigma_xp).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_of_reference_states() {
        assert_eq!(GaussianMoments::vacuum().delta(), 0.25);
        assert_eq!(GaussianMoments::new(0.0, 0.0, 1.0, 1.0, 0.5).delta(), 0.75);
        // squeezed minimum-uncertainty state
        assert_eq!(GaussianMoments::new(0.0, 0.0, 2.0, 0.125, 0.0).delta(), 0.25);
    }

    #[test]
    fn physicality_threshold() {
        assert!(GaussianMoments::vacuum().is_physical(0.0));
        assert!(!GaussianMoments::new(0.0, 0.0, 0.5, 0.5, 0.3).is_physical(0.0)); // delta 0.16
        assert!(GaussianMoments::new(0.0, 0.0, 0.6, 0.6, 0.0).is_physical(0.0)); // delta 0.36
    }

    #[test]
    fn principal_axes_construction() {
        // zero angle: variances are the principal values directly
        let m = GaussianMoments::from_principal_axes(0.1, -0.2, 0.7, 0.5f64.ln(), 0.0);
        assert!((m.sigma_xx - 0.35).abs() < 1e-15);
        assert!((m.sigma_pp - 1.4).abs() < 1e-15);
        assert_eq!(m.sigma_xp, 0.0);
        // delta equals nu^2 regardless of angle and squeeze
        for (nu, zeta, chi) in [(0.6, 0.45, 0.7), (1.0, -0.5, 0.0), (0.8, 0.3, -1.1)] {
            let m = GaussianMoments::from_principal_axes(0.5, 0.3, nu, zeta, chi);
            assert!((m.delta() - nu * nu).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_by_pi_swaps_quadratures() {
        let m = GaussianMoments::coherent(1.0, 0.0);
        let r = apply_unitary(&m, Generator::Rotation, std::f64::consts::PI).unwrap();
        assert!(r.mean_x.abs() < 1e-15);
        assert!((r.mean_p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_by_ln2_doubles_position_variance() {
        let m = GaussianMoments::new(0.0, 0.0, 0.5, 0.5, 0.1);
        let r = apply_unitary(&m, Generator::Scaling, 2.0f64.ln()).unwrap();
        assert!((r.sigma_xx - 1.0).abs() < 1e-15);
        assert!((r.sigma_pp - 0.25).abs() < 1e-15);
        assert_eq!(r.sigma_xp, 0.1);
    }

    #[test]
    fn zero_parameter_is_identity_for_every_generator() {
        let m = GaussianMoments::new(0.3, -1.2, 0.8, 0.7, 0.05);
        for g in Generator::UNITARY {
            assert_eq!(apply_unitary(&m, g, 0.0).unwrap(), m);
        }
        for g in Generator::DISSIPATIVE {
            assert_eq!(apply_dissipative(&m, g, 0.0).unwrap(), m);
        }
    }

    #[test]
    fn relaxation_scales_means_and_covariances() {
        let m = GaussianMoments::new(1.0, 0.0, 1.0, 0.5, 0.0);
        let r = apply_dissipative(&m, Generator::Relaxation, -2.0).unwrap();
        assert!((r.mean_x - (-1.0f64).exp()).abs() < 1e-15);
        assert!((r.sigma_xx - (-2.0f64).exp()).abs() < 1e-15);
        let d = dissipative_delta(&m, Generator::Relaxation, -2.0).unwrap();
        assert!((d - (-4.0f64).exp() * m.delta()).abs() < 1e-16);
    }

    #[test]
    fn isotropic_diffusion_lifts_both_variances() {
        let m = GaussianMoments::vacuum();
        let r = apply_dissipative(&m, Generator::IsotropicDiffusion, 1.0).unwrap();
        assert_eq!(r.sigma_xx, 1.0);
        assert_eq!(r.sigma_pp, 1.0);
        assert_eq!(r.delta(), 1.0);
        assert_eq!(
            dissipative_delta(&m, Generator::IsotropicDiffusion, 1.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn cross_diffusion_shifts_covariance_only() {
        let m = GaussianMoments::new(0.0, 0.0, 1.0, 1.0, 0.0);
        let r = apply_dissipative(&m, Generator::CrossDiffusion, 1.0).unwrap();
        assert_eq!(r.sigma_xp, 0.5);
        assert_eq!(r.sigma_xx, 1.0);
        assert_eq!(r.delta(), 0.75);
    }

    #[test]
    fn maps_reject_generators_of_the_wrong_class() {
        let m = GaussianMoments::vacuum();
        assert!(apply_unitary(&m, Generator::Relaxation, 0.1).is_err());
        assert!(apply_dissipative(&m, Generator::Rotation, 0.1).is_err());
        assert!(dissipative_delta(&m, Generator::Scaling, 0.1).is_err());
    }

    #[test]
    fn unitary_maps_preserve_delta() {
        let m = GaussianMoments::new(0.4, -0.2, 0.9, 0.6, 0.15);
        for g in Generator::UNITARY {
            let r = apply_unitary(&m, g, 0.77).unwrap();
            assert!((r.delta() - m.delta()).abs() < 1e-14, "{g}");
        }
    }

    #[test]
    fn rates_match_quoted_special_cases() {
        let m = GaussianMoments::coherent(1.0, 0.0);
        let r = infinitesimal_rates(Generator::Rotation, &m);
        assert_eq!(r.mean_x, 0.0);
        assert_eq!(r.mean_p, 0.5);

        let any = GaussianMoments::new(0.1, 0.2, 0.6, 0.7, 0.3);
        let r = infinitesimal_rates(Generator::IsotropicDiffusion, &any);
        assert_eq!((r.sigma_xx, r.sigma_pp), (0.5, 0.5));
        assert_eq!((r.mean_x, r.mean_p, r.sigma_xp), (0.0, 0.0, 0.0));

        let m = GaussianMoments::new(0.0, 0.0, 0.5, 0.5, 0.3);
        let r = infinitesimal_rates(Generator::Relaxation, &m);
        assert_eq!(r.sigma_xp, 0.3);
    }

    #[test]
    fn rates_match_centered_finite_differences() {
        let m = GaussianMoments::new(0.7, -1.1, 0.8, 0.9, -0.2);
        let h = 1e-5;
        for g in Generator::ALL {
            let plus = if g.is_unitary() {
                apply_unitary(&m, g, h).unwrap()
            } else {
                apply_dissipative(&m, g, h).unwrap()
            };
            let minus = if g.is_unitary() {
                apply_unitary(&m, g, -h).unwrap()
            } else {
                apply_dissipative(&m, g, -h).unwrap()
            };
            let fd = MomentRates {
                mean_x: (plus.mean_x - minus.mean_x) / (2.0 * h),
                mean_p: (plus.mean_p - minus.mean_p) / (2.0 * h),
                sigma_xx: (plus.sigma_xx - minus.sigma_xx) / (2.0 * h),
                sigma_pp: (plus.sigma_pp - minus.sigma_pp) / (2.0 * h),
                sigma_xp: (plus.sigma_xp - minus.sigma_xp) / (2.0 * h),
            };
            let dev = infinitesimal_rates(g, &m).max_abs_diff(&fd);
            assert!(dev < 1e-9, "{g}: dev {dev}");
        }
    }

    #[test]
    fn generator_names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), g);
        }
        assert!("nonsense".parse::<Generator>().is_err());
    }
}
