//! Damped quantum harmonic oscillator toolkit built around Gaussian
//! phase-space moments.
//!
//! The library models open-system dynamics generated by a seven-element
//! operator algebra: three unitary generators (rotation, hyperbolic
//! rotation, scaling) and four dissipative ones (relaxation plus isotropic,
//! anisotropic, and cross diffusion). Everything a Gaussian state does under
//! these generators is captured by five numbers (two means, three
//! covariances), so evolution reduces to closed-form flows:
//!
//! - [`moments`]: the five-moment state, the per-generator closed maps, and
//!   the generalized uncertainty delta = sigma_xx*sigma_pp - sigma_xp^2.
//! - [`algebra`]: how the diffusion coefficients rotate in the frame
//!   co-moving with the unitary part, with a closed-form eigensystem.
//! - [`evolution`]: the four scalar coefficient functions (h, g0, g1, g2)
//!   of the factorized evolution operator, moment propagation through them,
//!   and the return map to the stationary frame.
//! - [`master`]: the three named dissipative presets, their closed-form
//!   coefficients, long-time uncertainty limits, and positivity checks.
//! - [`fock`]: a brute-force density-matrix oracle on a truncated number
//!   basis for validating every closed form end to end.
//! - [`validate`]: executable cross-check suites with pinned tolerances.
//! - [`linalg`] and [`integrate`]: the small dense-complex and ODE/quadrature
//!   kernels the rest is built on.
//!
//! ```
//! use qosc::{GaussianMoments, MasterEquationSpec};
//!
//! let spec = MasterEquationSpec::kl(1.0, 0.5, 0.5)?;
//! let trajectory = spec.trajectory_closed(&GaussianMoments::coherent(1.0, 0.0), &[20.0])?;
//! let end = trajectory.final_point().unwrap();
//! assert!((end.delta - 0.25).abs() < 1e-6);
//! # Ok::<(), qosc::Error>(())
//! ```

pub mod algebra;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod integrate;
pub mod linalg;
pub mod master;
pub mod moments;
pub mod validate;

pub use algebra::{DissipativeCoefficients, Regime, UnitaryCoefficients};
pub use error::{Error, Result};
pub use evolution::{GCoefficients, Trajectory, TrajectoryPoint};
pub use master::{EquationKind, LongTimeDelta, MasterEquationSpec, PositivityReport};
pub use fock::TruncationConfig;
pub use moments::{GaussianMoments, Generator};

// The guide chapters double as executable documentation: every Rust snippet
// in them is compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/moments.md")]
    pub mod moments {}
    #[doc = include_str!("../../../book/src/generators.md")]
    pub mod generators {}
    #[doc = include_str!("../../../book/src/interaction-picture.md")]
    pub mod interaction_picture {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    pub mod evolution {}
    #[doc = include_str!("../../../book/src/master-equations.md")]
    pub mod master_equations {}
    #[doc = include_str!("../../../book/src/fock-oracle.md")]
    pub mod fock_oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
