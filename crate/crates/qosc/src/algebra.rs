//! Generic generator coefficients, the 3x3 coupling matrix that governs how
//! the dissipative coefficient vector rotates in the interaction picture, its
//! closed-form eigensystem, and the coefficient flow itself.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Coefficients (theta, phi, psi) of the three unitary generators
/// (rotation, hyperbolic rotation, scaling) in a combined evolution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UnitaryCoefficients {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl UnitaryCoefficients {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Self {
        Self { theta, phi, psi }
    }
}

/// Relaxation constant gamma and the three diffusion coefficients
/// (eta0, eta1, eta2) of a combined dissipative part.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DissipativeCoefficients {
    pub gamma: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl DissipativeCoefficients {
    pub fn new(gamma: f64, eta0: f64, eta1: f64, eta2: f64) -> Self {
        Self {
            gamma,
            eta0,
            eta1,
            eta2,
        }
    }

    pub fn eta(&self) -> [f64; 3] {
        [self.eta0, self.eta1, self.eta2]
    }
}

/// Sign classification of omega^2 = theta^2 - phi^2 - psi^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Oscillatory,
    Degenerate,
    Hyperbolic,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Oscillatory => "oscillatory",
            Regime::Degenerate => "degenerate",
            Regime::Hyperbolic => "hyperbolic",
        }
    }
}

/// Returns omega^2 and its regime.
pub fn classify_omega(u: &UnitaryCoefficients) -> (f64, Regime) {
    let omega_squared = u.theta * u.theta - u.phi * u.phi - u.psi * u.psi;
    let regime = if omega_squared > 0.0 {
        Regime::Oscillatory
    } else if omega_squared == 0.0 {
        Regime::Degenerate
    } else {
        Regime::Hyperbolic
    };
    (omega_squared, regime)
}

/// The antisymmetric-patterned 3x3 matrix coupling the dissipative
/// coefficients under the unitary flow.
///
/// In the oscillatory regime the entries are normalized by omega (hatted) and
/// the matrix cubes to its own negative; otherwise the raw (theta, phi, psi)
/// entries are kept and `normalized` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub matrix: [[f64; 3]; 3],
    pub omega_squared: f64,
    pub regime: Regime,
    pub normalized: bool,
}

impl CouplingMatrix {
    /// Real frequency, defined only in the oscillatory regime.
    pub fn omega(&self) -> Option<f64> {
        (self.regime == Regime::Oscillatory).then(|| self.omega_squared.sqrt())
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Hatted components (theta, phi, psi)/omega read back off the matrix
    /// entries. Only meaningful when `normalized`.
    fn hatted(&self) -> [f64; 3] {
        [self.matrix[1][2], self.matrix[0][2], -self.matrix[0][1]]
    }
}

fn coupling_pattern(theta: f64, phi: f64, psi: f64) -> [[f64; 3]; 3] {
    [
        [0.0, -psi, phi],
        [-psi, 0.0, theta],
        [phi, -theta, 0.0],
    ]
}

/// Builds the coupling matrix, normalizing entries by omega in the
/// oscillatory regime.
pub fn build_coupling_matrix(u: &UnitaryCoefficients) -> CouplingMatrix {
    let (omega_squared, regime) = classify_omega(u);
    if regime == Regime::Oscillatory {
        let w = omega_squared.sqrt();
        CouplingMatrix {
            matrix: coupling_pattern(u.theta / w, u.phi / w, u.psi / w),
            omega_squared,
            regime,
            normalized: true,
        }
    } else {
        CouplingMatrix {
            matrix: coupling_pattern(u.theta, u.phi, u.psi),
            omega_squared,
            regime,
            normalized: false,
        }
    }
}

/// Closed-form eigensystem of the normalized coupling matrix: eigenvalues
/// {0, +i*omega, -i*omega} with biorthogonal left/right eigenvector triples.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues ordered (0, +i*omega, -i*omega).
    pub lambda: [C64; 3],
    /// Right eigenvectors, same order; `right[k]` pairs with `lambda[k]`.
    pub right: [[C64; 3]; 3],
    /// Left eigenvectors; `left[i]` is dual to `right[i]` under the
    /// conjugated dot product.
    pub left: [[C64; 3]; 3],
    /// Normalization sqrt(2*(1 + phi_hat^2)) shared by the +/- pairs.
    pub normalization: f64,
}

fn cdot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

impl EigenSystem {
    /// Conjugated dot product left[i]^dagger . right[j]; the identity matrix
    /// for an exact eigensystem.
    pub fn pairing(&self, i: usize, j: usize) -> C64 {
        cdot(&self.left[i], &self.right[j])
    }
}

/// Returns the closed-form eigensystem; fails outside the oscillatory regime,
/// where the eigenvalues stop being purely imaginary and the closed forms do
/// not apply.
pub fn eigensystem(k: &CouplingMatrix) -> Result<EigenSystem> {
    if k.regime != Regime::Oscillatory || !k.normalized {
        return Err(Error::NotOscillatory {
            regime: k.regime.name(),
            omega_squared: k.omega_squared,
        });
    }
    let [th, ph, ps] = k.hatted();
    let w = k.omega_squared.sqrt();
    let n = (2.0 * (1.0 + ph * ph)).sqrt();
    let i = C64::I;
    let re = |x: f64| C64::new(x, 0.0);

    let u0 = [-i * th, -i * ph, -i * ps];
    let v0 = [i * -th, i * ph, i * ps];
    let u_plus = [
        (re(th * ph) + i * ps) / n,
        re(1.0 + ph * ph) / n,
        (re(ph * ps) + i * th) / n,
    ];
    let v_plus = [
        (re(-th * ph) - i * ps) / n,
        re(1.0 + ph * ph) / n,
        (re(ph * ps) + i * th) / n,
    ];
    let neg_conj = |v: &[C64; 3]| [-v[0].conj(), -v[1].conj(), -v[2].conj()];
    Ok(EigenSystem {
        lambda: [C64::ZERO, i * w, -i * w],
        right: [u0, u_plus, neg_conj(&u_plus)],
        left: [v0, v_plus, neg_conj(&v_plus)],
        normalization: n,
    })
}

fn raw_coupling_cmat(u: &UnitaryCoefficients, t: f64) -> CMat {
    let p = coupling_pattern(u.theta, u.phi, u.psi);
    let mut m = CMat::zeros((3, 3));
    for r in 0..3 {
        for c in 0..3 {
            m[[r, c]] = C64::new(p[r][c] * t, 0.0);
        }
    }
    m
}

/// Interaction-picture dissipative coefficients at time `t`, evaluated by
/// exponentiating the raw coupling matrix. Valid in every regime; used as the
/// cross-check path for [`eta_bar`].
pub fn eta_bar_exp(u: &UnitaryCoefficients, d: &DissipativeCoefficients, t: f64) -> [f64; 3] {
    let e = linalg::expm(&raw_coupling_cmat(u, t)).expect("3x3 exponential cannot fail");
    let eta = d.eta();
    let mut out = [0.0; 3];
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|c| e[[r, c]].re * eta[c]).sum();
    }
    out
}

/// Interaction-picture dissipative coefficients at time `t`.
///
/// Oscillatory regime: evaluated in closed form from the rank-one zero-mode
/// projector and the sine/cosine pair,
/// `eta(t) = P0 eta + (I - P0) eta cos(wt) + K eta sin(wt)`.
/// Degenerate/hyperbolic regimes: falls back to the matrix exponential. The
/// fallback also covers a thin shell around the degenerate cone where the
/// projector entries (which scale as 1/omega^2) would cancel destructively.
pub fn eta_bar(u: &UnitaryCoefficients, d: &DissipativeCoefficients, t: f64) -> [f64; 3] {
    let k = build_coupling_matrix(u);
    let scale = u.theta * u.theta + u.phi * u.phi + u.psi * u.psi;
    if k.regime != Regime::Oscillatory || k.omega_squared < 1e-6 * scale {
        return eta_bar_exp(u, d, t);
    }
    let w = k.omega_squared.sqrt();
    let [th, ph, ps] = k.hatted();
    let eta = d.eta();

    // P0 = -h (k . v) with h = (th, ph, ps), k = (-th, ph, ps).
    let h = [th, ph, ps];
    let kv = [-th, ph, ps];
    let k_dot_eta: f64 = (0..3).map(|j| kv[j] * eta[j]).sum();
    let p0_eta = [-h[0] * k_dot_eta, -h[1] * k_dot_eta, -h[2] * k_dot_eta];
    let k_eta = k.mul_vec(eta);
    let (sin, cos) = (w * t).sin_cos();
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[j] = p0_eta[j] + (eta[j] - p0_eta[j]) * cos + k_eta[j] * sin;
    }
    out
}
