//! Brute-force ground truth on a truncated number basis: the seven
//! generators as explicit superoperators, exact density-matrix evolution,
//! moment extraction, state synthesis, and the commutation-table check.
//!
//! Vectorization is column-stacking throughout: `vec(A rho B) =
//! kron(B^T, A) vec(rho)`, with `vec` index `j*dim + i` for element `(i, j)`.
//! The convention is pinned by the transposition-identity test below, which
//! fails under the opposite stacking.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::algebra::{DissipativeCoefficients, UnitaryCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{dagger, expm, identity, inf_norm, max_abs, one_norm, trace, CMat};
use crate::moments::{GaussianMoments, Generator, PHYSICAL_TOL};

/// Number-basis cutoff and the acceptable occupation beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    pub dim: usize,
    pub tail_tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            dim: 40,
            tail_tol: 1e-8,
        }
    }
}

impl TruncationConfig {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        let cfg = Self { dim, tail_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock cutoff must be >= 2, got {}",
                self.dim
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must be > 0, got {}",
                self.tail_tol
            )));
        }
        Ok(())
    }
}

/// Truncated annihilation and creation matrices.
pub fn build_ladder(cfg: &TruncationConfig) -> (CMat, CMat) {
    let dim = cfg.dim;
    let mut a = CMat::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = dagger(&a);
    (a, adag)
}

/// Position and momentum quadratures: x = (a + a†)/√2, p = i(a† − a)/√2.
pub fn quadrature_ops(cfg: &TruncationConfig) -> (CMat, CMat) {
    let (a, adag) = build_ladder(cfg);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = C64::new(0.0, 1.0);
    let x = (&a + &adag) * s;
    let p = (&adag - &a) * (i * s);
    (x, p)
}

/// One `coef * L rho R` term of a superoperator; `None` means identity.
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub coef: C64,
    pub left: Option<CMat>,
    pub right: Option<CMat>,
}

impl ProductTerm {
    fn new(coef: C64, left: Option<CMat>, right: Option<CMat>) -> Self {
        Self { coef, left, right }
    }
}

/// The product-term expansion of one generator's action on rho.
pub fn generator_terms(which: Generator, cfg: &TruncationConfig) -> Vec<ProductTerm> {
    let (a, adag) = build_ladder(cfg);
    let n_op = adag.dot(&a);
    let aa = a.dot(&a);
    let adad = adag.dot(&adag);
    let i = C64::new(0.0, 1.0);
    let re = |x: f64| C64::new(x, 0.0);

    match which {
        // (i/2)(n rho - rho n)
        Generator::Rotation => vec![
            ProductTerm::new(i * 0.5, Some(n_op.clone()), None),
            ProductTerm::new(-i * 0.5, None, Some(n_op)),
        ],
        // (i/4)((a†² + a²) rho - rho (a†² + a²))
        Generator::HyperbolicRotation => {
            let q = &adad + &aa;
            vec![
                ProductTerm::new(i * 0.25, Some(q.clone()), None),
                ProductTerm::new(-i * 0.25, None, Some(q)),
            ]
        }
        // (1/4)((a†² - a²) rho - rho (a†² - a²))
        Generator::Scaling => {
            let q = &adad - &aa;
            vec![
                ProductTerm::new(re(0.25), Some(q.clone()), None),
                ProductTerm::new(re(-0.25), None, Some(q)),
            ]
        }
        // (1/2)(a† rho a - a rho a† - rho)
        Generator::Relaxation => vec![
            ProductTerm::new(re(0.5), Some(adag.clone()), Some(a.clone())),
            ProductTerm::new(re(-0.5), Some(a), Some(adag)),
            ProductTerm::new(re(-0.5), None, None),
        ],
        // (1/2)(a† rho a + a rho a† - n rho - rho n - rho)
        Generator::IsotropicDiffusion => vec![
            ProductTerm::new(re(0.5), Some(adag.clone()), Some(a.clone())),
            ProductTerm::new(re(0.5), Some(a), Some(adag)),
            ProductTerm::new(re(-0.5), Some(n_op.clone()), None),
            ProductTerm::new(re(-0.5), None, Some(n_op)),
            ProductTerm::new(re(-0.5), None, None),
        ],
        // (1/2)(a† rho a† + a rho a) - (1/4)((a†² + a²) rho + rho (a†² + a²))
        Generator::AnisotropicDiffusion => {
            let q = &adad + &aa;
            vec![
                ProductTerm::new(re(0.5), Some(adag.clone()), Some(adag.clone())),
                ProductTerm::new(re(0.5), Some(a.clone()), Some(a.clone())),
                ProductTerm::new(re(-0.25), Some(q.clone()), None),
                ProductTerm::new(re(-0.25), None, Some(q)),
            ]
        }
        // -(i/2)(a† rho a† - a rho a) + (i/4)((a†² - a²) rho + rho (a†² - a²))
        Generator::CrossDiffusion => {
            let q = &adad - &aa;
            vec![
                ProductTerm::new(-i * 0.5, Some(adag.clone()), Some(adag.clone())),
                ProductTerm::new(i * 0.5, Some(a.clone()), Some(a.clone())),
                ProductTerm::new(i * 0.25, Some(q.clone()), None),
                ProductTerm::new(i * 0.25, None, Some(q)),
            ]
        }
    }
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization.
fn vec_rho(rho: &CMat) -> Array1<C64> {
    let dim = rho.nrows();
    Array1::from_shape_fn(dim * dim, |k| rho[[k % dim, k / dim]])
}

fn unvec_rho(v: &Array1<C64>, dim: usize) -> CMat {
    Array2::from_shape_fn((dim, dim), |(i, j)| v[j * dim + i])
}

/// A generator (or combination) as a dense dim² × dim² matrix on
/// column-stacked states.
#[derive(Debug, Clone)]
pub struct FockSuperoperator {
    pub matrix: CMat,
    pub dim: usize,
}

impl FockSuperoperator {
    pub fn from_terms(dim: usize, terms: &[ProductTerm]) -> Self {
        let id = identity(dim);
        let mut matrix = CMat::zeros((dim * dim, dim * dim));
        for term in terms {
            let left = term.left.as_ref().unwrap_or(&id);
            let right = term.right.as_ref().unwrap_or(&id);
            matrix = matrix + kron(&right.t().to_owned(), left) * term.coef;
        }
        Self { matrix, dim }
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        let v = self.matrix.dot(&vec_rho(rho));
        unvec_rho(&v, self.dim)
    }

    /// Dense matrix product with another superoperator on the same space.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "superoperator dimension mismatch");
        Self {
            matrix: self.matrix.dot(&other.matrix),
            dim: self.dim,
        }
    }

    /// exp(t * this) as a dense superoperator. Only sensible at small dim.
    pub fn expm(&self, t: f64) -> Result<Self> {
        Ok(Self {
            matrix: expm(&(&self.matrix * C64::new(t, 0.0)))?,
            dim: self.dim,
        })
    }
}

/// Assembles one generator as a dense superoperator matrix.
pub fn build_generator_super(which: Generator, cfg: &TruncationConfig) -> FockSuperoperator {
    FockSuperoperator::from_terms(cfg.dim, &generator_terms(which, cfg))
}

/// Assembles the full evolution generator −(K₀ + K_d) as a dense matrix.
pub fn build_evolution_super(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    cfg: &TruncationConfig,
) -> FockSuperoperator {
    FockSuperoperator::from_terms(cfg.dim, &evolution_terms(u, d, cfg))
}

fn evolution_terms(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    cfg: &TruncationConfig,
) -> Vec<ProductTerm> {
    let weights = [
        (Generator::Rotation, u.theta),
        (Generator::HyperbolicRotation, u.phi),
        (Generator::Scaling, u.psi),
        (Generator::Relaxation, d.gamma),
        (Generator::IsotropicDiffusion, d.eta0),
        (Generator::AnisotropicDiffusion, d.eta1),
        (Generator::CrossDiffusion, d.eta2),
    ];
    let mut terms = Vec::new();
    for (which, w) in weights {
        if w == 0.0 {
            continue;
        }
        for mut term in generator_terms(which, cfg) {
            term.coef *= C64::new(-w, 0.0);
            terms.push(term);
        }
    }
    terms
}

/// The same linear action kept in dim × dim matrix form:
/// `S rho = left·rho + rho·right + Σ c·A·rho·B`, applied without ever
/// materializing the dim² × dim² matrix. `mu` is the trace shift split off
/// so the Taylor segments act on a traceless operator.
#[derive(Debug, Clone)]
pub struct LiouvilleAction {
    left: CMat,
    right: CMat,
    sandwich: Vec<(C64, CMat, CMat)>,
    /// Basis dimension the matrices were built for.
    pub dim: usize,
    mu: C64,
    /// Upper bound on the induced 1-norm of the shifted superoperator.
    norm_bound: f64,
}

impl LiouvilleAction {
    pub fn from_terms(dim: usize, terms: &[ProductTerm]) -> Self {
        let mut left = CMat::zeros((dim, dim));
        let mut right = CMat::zeros((dim, dim));
        let mut sandwich = Vec::new();
        let mut tr = C64::new(0.0, 0.0);
        let dim_c = C64::new(dim as f64, 0.0);
        for term in terms {
            match (&term.left, &term.right) {
                (Some(a), Some(b)) => {
                    tr += term.coef * trace(a) * trace(b);
                    sandwich.push((term.coef, a.clone(), b.clone()));
                }
                (Some(a), None) => {
                    tr += term.coef * trace(a) * dim_c;
                    left = left + a * term.coef;
                }
                (None, Some(b)) => {
                    tr += term.coef * trace(b) * dim_c;
                    right = right + b * term.coef;
                }
                (None, None) => {
                    tr += term.coef * dim_c * dim_c;
                    left = left + identity(dim) * term.coef;
                }
            }
        }
        let mu = tr / C64::new((dim * dim) as f64, 0.0);
        left = left - identity(dim) * mu;
        // ||kron(B^T, A)||_1 = ||B||_inf * ||A||_1
        let norm_bound = one_norm(&left)
            + inf_norm(&right)
            + sandwich
                .iter()
                .map(|(c, a, b)| c.norm() * one_norm(a) * inf_norm(b))
                .sum::<f64>();
        Self {
            left,
            right,
            sandwich,
            dim,
            mu,
            norm_bound,
        }
    }

    pub fn from_generator(which: Generator, cfg: &TruncationConfig) -> Self {
        Self::from_terms(cfg.dim, &generator_terms(which, cfg))
    }

    /// Matrix form of −(K₀ + K_d) for direct use by the evolution oracle.
    pub fn from_coefficients(
        u: &UnitaryCoefficients,
        d: &DissipativeCoefficients,
        cfg: &TruncationConfig,
    ) -> Self {
        Self::from_terms(cfg.dim, &evolution_terms(u, d, cfg))
    }

    /// Applies the shifted action (full action minus mu times identity).
    fn apply_shifted(&self, rho: &CMat) -> CMat {
        let mut out = self.left.dot(rho) + rho.dot(&self.right);
        for (c, a, b) in &self.sandwich {
            out = out + a.dot(rho).dot(b) * *c;
        }
        out
    }

    /// Applies the full action once.
    pub fn apply(&self, rho: &CMat) -> CMat {
        self.apply_shifted(rho) + rho * self.mu
    }

    /// exp(t * action) applied to rho by scaled Taylor summation. Segments
    /// are sized so the shifted norm stays below a fixed theta; the trace
    /// shift re-enters as a scalar factor per segment.
    ///
    /// Theta trades segment count against roundoff: intermediate Taylor
    /// terms grow to ~e^theta before cancelling, and trace preservation to
    /// 1e-10 absolute needs that amplification kept small.
    pub fn expm_apply(&self, rho: &CMat, t: f64) -> CMat {
        const THETA: f64 = 4.0;
        const MAX_TERMS: usize = 48;
        if t == 0.0 {
            return rho.clone();
        }
        let segments = ((self.norm_bound * t.abs()) / THETA).ceil().max(1.0);
        let dt = t / segments;
        let phase = (self.mu * C64::new(dt, 0.0)).exp();
        let mut acc = rho.clone();
        for _ in 0..segments as usize {
            let mut sum = acc.clone();
            let mut term = acc;
            let mut quiet = 0;
            for k in 1..=MAX_TERMS {
                term = self.apply_shifted(&term) * C64::new(dt / k as f64, 0.0);
                sum = sum + &term;
                if max_abs(&term) <= 1e-16 * max_abs(&sum) {
                    quiet += 1;
                    if quiet >= 2 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            acc = sum * phase;
        }
        acc
    }
}

/// Expected value of `[first, second]` as (sign, generator), or `None` for a
/// vanishing bracket.
fn expected_bracket(first: Generator, second: Generator) -> Option<(f64, Generator)> {
    use Generator::*;
    let fwd = |a: Generator, b: Generator| -> Option<(f64, Generator)> {
        match (a, b) {
            (Rotation, HyperbolicRotation) => Some((-1.0, Scaling)),
            (Rotation, Scaling) => Some((1.0, HyperbolicRotation)),
            (HyperbolicRotation, Scaling) => Some((1.0, Rotation)),
            (Rotation, AnisotropicDiffusion) => Some((-1.0, CrossDiffusion)),
            (Rotation, CrossDiffusion) => Some((1.0, AnisotropicDiffusion)),
            (HyperbolicRotation, IsotropicDiffusion) => Some((1.0, CrossDiffusion)),
            (HyperbolicRotation, CrossDiffusion) => Some((1.0, IsotropicDiffusion)),
            (Scaling, IsotropicDiffusion) => Some((-1.0, AnisotropicDiffusion)),
            (Scaling, AnisotropicDiffusion) => Some((-1.0, IsotropicDiffusion)),
            (Relaxation, IsotropicDiffusion) => Some((1.0, IsotropicDiffusion)),
            (Relaxation, AnisotropicDiffusion) => Some((1.0, AnisotropicDiffusion)),
            (Relaxation, CrossDiffusion) => Some((1.0, CrossDiffusion)),
            _ => None,
        }
    };
    fwd(first, second).or_else(|| fwd(second, first).map(|(s, g)| (-s, g)))
}

/// Result of checking all 49 ordered generator pairs against the expected
/// bracket table on the truncation-safe interior block.
#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub pairs: usize,
    pub max_deviation: f64,
    pub worst: (Generator, Generator),
    pub dim: usize,
}

/// Computes every `[G_i, G_j]` as a dense superoperator and compares it to
/// the bracket table, ignoring matrix elements touching the top two Fock
/// levels where the truncated ladder algebra is corrupted.
pub fn commutator_table_check(cfg: &TruncationConfig) -> Result<CommutatorReport> {
    cfg.validate()?;
    if cfg.dim < 8 {
        return Err(Error::InvalidParameter(format!(
            "commutator check needs dim >= 8 for a meaningful interior, got {}",
            cfg.dim
        )));
    }
    let dim = cfg.dim;
    let supers: Vec<FockSuperoperator> = Generator::ALL
        .iter()
        .map(|&g| build_generator_super(g, cfg))
        .collect();
    let interior: Vec<bool> = (0..dim * dim)
        .map(|k| k % dim < dim - 2 && k / dim < dim - 2)
        .collect();

    let mut max_deviation = 0.0;
    let mut worst = (Generator::Rotation, Generator::Rotation);
    for (i, gi) in Generator::ALL.iter().enumerate() {
        for (j, gj) in Generator::ALL.iter().enumerate() {
            let bracket =
                &supers[i].matrix.dot(&supers[j].matrix) - &supers[j].matrix.dot(&supers[i].matrix);
            let expected = expected_bracket(*gi, *gj);
            let mut dev = 0.0f64;
            for r in 0..dim * dim {
                if !interior[r] {
                    continue;
                }
                for c in 0..dim * dim {
                    if !interior[c] {
                        continue;
                    }
                    let want = match &expected {
                        Some((sign, g)) => {
                            supers[Generator::ALL.iter().position(|x| x == g).unwrap()].matrix
                                [[r, c]]
                                * C64::new(*sign, 0.0)
                        }
                        None => C64::new(0.0, 0.0),
                    };
                    dev = dev.max((bracket[[r, c]] - want).norm());
                }
            }
            if dev > max_deviation {
                max_deviation = dev;
                worst = (*gi, *gj);
            }
        }
    }
    Ok(CommutatorReport {
        pairs: 49,
        max_deviation,
        worst,
        dim,
    })
}

/// Occupation of the top two number levels; the truncation-leak gauge.
pub fn tail_occupation(rho: &CMat) -> f64 {
    let dim = rho.nrows();
    rho[[dim - 1, dim - 1]].re.abs() + rho[[dim - 2, dim - 2]].re.abs()
}

/// Synthesizes a density matrix with the requested Gaussian moments as a
/// displaced, rotated, squeezed thermal state.
pub fn gaussian_state(cfg: &TruncationConfig, m: &GaussianMoments) -> Result<CMat> {
    cfg.validate()?;
    let delta = m.delta();
    if !m.is_physical(PHYSICAL_TOL) {
        return Err(Error::Unphysical {
            delta,
            tol: PHYSICAL_TOL,
        });
    }
    let dim = cfg.dim;
    let (a, adag) = build_ladder(cfg);

    // principal axes of the covariance matrix
    let nu = delta.sqrt().max(0.5);
    let mid = 0.5 * (m.sigma_xx + m.sigma_pp);
    let rad = (0.25 * (m.sigma_xx - m.sigma_pp).powi(2) + m.sigma_xp * m.sigma_xp).sqrt();
    let chi = 0.5 * (2.0 * m.sigma_xp).atan2(m.sigma_xx - m.sigma_pp);
    let zeta = ((mid + rad) / nu).max(1.0).ln();

    // thermal core: geometric number distribution with mean nu - 1/2,
    // renormalized over the truncated basis
    let q = (nu - 0.5) / (nu + 0.5);
    let mut rho = CMat::zeros((dim, dim));
    let mut weights = Vec::with_capacity(dim);
    let mut total = 0.0;
    let mut w = 1.0;
    for _ in 0..dim {
        weights.push(w);
        total += w;
        w *= q;
    }
    for (n, w) in weights.iter().enumerate() {
        rho[[n, n]] = C64::new(w / total, 0.0);
    }

    // unitary chain: squeeze along x, rotate to the principal angle, displace
    let adad = adag.dot(&adag);
    let aa = a.dot(&a);
    let squeeze = expm(&((&adad - &aa) * C64::new(0.25 * zeta, 0.0)))?;
    let n_op = adag.dot(&a);
    let rotate = expm(&(&n_op * C64::new(0.0, chi)))?;
    let alpha = C64::new(m.mean_x, m.mean_p) * std::f64::consts::FRAC_1_SQRT_2;
    let displace = expm(&(&adag * alpha - &a * alpha.conj()))?;
    let chain = displace.dot(&rotate).dot(&squeeze);
    rho = chain.dot(&rho).dot(&dagger(&chain));

    let tail = tail_occupation(&rho);
    if tail > cfg.tail_tol {
        return Err(Error::TruncationLeak {
            tail,
            tol: cfg.tail_tol,
            dim,
        });
    }
    Ok(rho)
}

/// Extracts the five Gaussian moments by tracing against the quadratures.
pub fn moments_from_rho(rho: &CMat) -> Result<GaussianMoments> {
    let dim = rho.nrows();
    assert_eq!(rho.ncols(), dim, "density matrix must be square");
    let trace_dev = (trace(rho) - C64::new(1.0, 0.0)).norm();
    if trace_dev > 1e-10 {
        return Err(Error::TraceLoss {
            deviation: trace_dev,
            tol: 1e-10,
        });
    }
    let cfg = TruncationConfig {
        dim,
        tail_tol: 1.0,
    };
    let (x, p) = quadrature_ops(&cfg);
    let expect = |op: &CMat| trace(&op.dot(rho)).re;
    let mean_x = expect(&x);
    let mean_p = expect(&p);
    let xx = expect(&x.dot(&x));
    let pp = expect(&p.dot(&p));
    let xp_sym = 0.5 * (expect(&x.dot(&p)) + expect(&p.dot(&x)));
    Ok(GaussianMoments {
        mean_x,
        mean_p,
        sigma_xx: xx - mean_x * mean_x,
        sigma_pp: pp - mean_p * mean_p,
        sigma_xp: xp_sym - mean_x * mean_p,
    })
}

fn check_evolved(rho: &CMat, cfg: &TruncationConfig) -> Result<()> {
    let trace_dev = (trace(rho) - C64::new(1.0, 0.0)).norm();
    if trace_dev > 1e-8 {
        return Err(Error::TraceLoss {
            deviation: trace_dev,
            tol: 1e-8,
        });
    }
    let herm_dev = max_abs(&(rho - &dagger(rho)));
    if herm_dev > 1e-10 {
        return Err(Error::HermiticityLoss {
            deviation: herm_dev,
            tol: 1e-10,
        });
    }
    let tail = tail_occupation(rho);
    if tail > cfg.tail_tol {
        return Err(Error::TruncationLeak {
            tail,
            tol: cfg.tail_tol,
            dim: cfg.dim,
        });
    }
    Ok(())
}

/// Evolves a density matrix for time `t` under the full generator and
/// verifies trace, hermiticity, and truncation health of the result.
pub fn evolve_oracle(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    rho0: &CMat,
    t: f64,
    cfg: &TruncationConfig,
) -> Result<CMat> {
    cfg.validate()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "oracle evolution time must be >= 0, got {t}"
        )));
    }
    assert_eq!(rho0.nrows(), cfg.dim, "state dimension mismatch");
    let action = LiouvilleAction::from_coefficients(u, d, cfg);
    let rho = action.expm_apply(rho0, t);
    check_evolved(&rho, cfg)?;
    Ok(rho)
}

/// Moment samples along an oracle evolution, stepping incrementally from
/// sample to sample and re-checking state health at each one.
pub fn oracle_trajectory(
    u: &UnitaryCoefficients,
    d: &DissipativeCoefficients,
    rho0: &CMat,
    times: &[f64],
    cfg: &TruncationConfig,
) -> Result<Vec<GaussianMoments>> {
    cfg.validate()?;
    assert_eq!(rho0.nrows(), cfg.dim, "state dimension mismatch");
    if let Some(&t0) = times.first() {
        if !(t0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "oracle sample times must be >= 0, got {t0}"
            )));
        }
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "oracle sample times must be strictly increasing".into(),
            ));
        }
    }
    let action = LiouvilleAction::from_coefficients(u, d, cfg);
    let mut rho = rho0.clone();
    let mut prev = 0.0;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        rho = action.expm_apply(&rho, t - prev);
        prev = t;
        check_evolved(&rho, cfg)?;
        samples.push(moments_from_rho(&rho)?);
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::apply_dissipative;

    fn small_cfg(dim: usize) -> TruncationConfig {
        TruncationConfig { dim, tail_tol: 1.0 }
    }

    fn fock_projector(dim: usize, n: usize) -> CMat {
        let mut rho = CMat::zeros((dim, dim));
        rho[[n, n]] = C64::new(1.0, 0.0);
        rho
    }

    #[test]
    fn ladder_matrix_elements() {
        let (a, _) = build_ladder(&small_cfg(2));
        assert_eq!(a[[0, 1]], C64::new(1.0, 0.0));
        assert_eq!(a[[0, 0]], C64::new(0.0, 0.0));
        assert_eq!(a[[1, 0]], C64::new(0.0, 0.0));

        let (a, _) = build_ladder(&small_cfg(3));
        assert!((a[[1, 2]] - C64::new(2.0f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn truncated_canonical_commutator() {
        let dim = 6;
        let (a, adag) = build_ladder(&small_cfg(dim));
        let comm = &a.dot(&adag) - &adag.dot(&a);
        for n in 0..dim - 1 {
            assert!((comm[[n, n]] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((comm[[dim - 1, dim - 1]] - C64::new(-((dim - 1) as f64), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_eigenoperator() {
        // |1><0| is an eigenoperator of the rotation generator: value i/2
        let dim = 4;
        let sup = build_generator_super(Generator::Rotation, &small_cfg(dim));
        let mut op = CMat::zeros((dim, dim));
        op[[1, 0]] = C64::new(1.0, 0.0);
        let out = sup.apply(&op);
        let expected = &op * C64::new(0.0, 0.5);
        assert!(max_abs(&(&out - &expected)) < 1e-15);
    }

    #[test]
    fn number_state_moments() {
        let dim = 8;
        let m0 = moments_from_rho(&fock_projector(dim, 0)).unwrap();
        assert!(m0.max_abs_diff(&GaussianMoments::vacuum()) < 1e-14);
        let m1 = moments_from_rho(&fock_projector(dim, 1)).unwrap();
        assert!(m1.max_abs_diff(&GaussianMoments::new(0.0, 0.0, 1.5, 1.5, 0.0)) < 1e-14);
    }

    #[test]
    fn moments_require_unit_trace() {
        let rho = &fock_projector(6, 0) * C64::new(0.9, 0.0);
        assert!(matches!(
            moments_from_rho(&rho),
            Err(Error::TraceLoss { .. })
        ));
    }

    #[test]
    fn superoperator_and_action_forms_agree() {
        let cfg = small_cfg(9);
        let rho = {
            // arbitrary hermitian unit-trace matrix
            let mut r = CMat::zeros((9, 9));
            for i in 0..9 {
                for j in 0..9 {
                    r[[i, j]] = C64::new(0.02 * (i * j) as f64, 0.01 * (i as f64 - j as f64));
                }
                r[[i, i]] = C64::new(1.0 / 9.0 + 0.001 * i as f64, 0.0);
            }
            let r = (&r + &dagger(&r)) * C64::new(0.5, 0.0);
            let tr = trace(&r);
            r / tr
        };
        for which in Generator::ALL {
            let sup = build_generator_super(which, &cfg);
            let act = LiouvilleAction::from_generator(which, &cfg);
            let d1 = sup.apply(&rho);
            let d2 = act.apply(&rho);
            assert!(max_abs(&(&d1 - &d2)) < 1e-13, "{which}");
        }
        // combined evolution generator as well
        let u = UnitaryCoefficients::new(1.1, 0.2, -0.4);
        let d = DissipativeCoefficients::new(0.3, -0.25, 0.1, -0.05);
        let sup = build_evolution_super(&u, &d, &cfg);
        let act = LiouvilleAction::from_coefficients(&u, &d, &cfg);
        assert!(max_abs(&(&sup.apply(&rho) - &act.apply(&rho))) < 1e-13);
    }

    #[test]
    fn transposition_identity_pins_the_stacking() {
        // tr(o * S rho) = tr(S^T o * rho) with S^T swapping each term's
        // left and right factors
        let cfg = small_cfg(7);
        let dim = cfg.dim;
        let terms = generator_terms(Generator::IsotropicDiffusion, &cfg);
        let swapped: Vec<ProductTerm> = terms
            .iter()
            .map(|t| ProductTerm::new(t.coef, t.right.clone(), t.left.clone()))
            .collect();
        let sup = FockSuperoperator::from_terms(dim, &terms);
        let sup_t = FockSuperoperator::from_terms(dim, &swapped);

        let mut o = CMat::zeros((dim, dim));
        let mut rho = CMat::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                o[[i, j]] = C64::new((i + 2 * j) as f64 * 0.1, (i as f64) * 0.05 - 0.1);
                rho[[i, j]] = C64::new(0.3 - 0.07 * (j as f64), 0.02 * (i * i) as f64);
            }
        }
        let lhs = trace(&o.dot(&sup.apply(&rho)));
        let rhs = trace(&sup_t.apply(&o).dot(&rho));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn trace_functional_is_left_null_on_interior() {
        // tr(S rho) = 0 for any rho supported on the interior block
        let cfg = small_cfg(10);
        let dim = cfg.dim;
        for which in Generator::ALL {
            let sup = build_generator_super(which, &cfg);
            for n in 0..dim - 2 {
                let col = sup.apply(&fock_projector(dim, n));
                assert!(trace(&col).norm() < 1e-13, "{which} |{n}><{n}|");
            }
        }
    }

    #[test]
    fn unitary_exponentials_preserve_purity() {
        let cfg = small_cfg(16);
        let rho = gaussian_state(
            &TruncationConfig {
                dim: 16,
                tail_tol: 1e-10,
            },
            &GaussianMoments::coherent(0.6, -0.4),
        )
        .unwrap();
        for which in Generator::UNITARY {
            let sup = build_generator_super(which, &cfg).expm(0.3).unwrap();
            let out = sup.apply(&rho);
            let purity = trace(&out.dot(&out)).re;
            assert!((purity - 1.0).abs() < 1e-8, "{which} purity {purity}");
        }
    }

    #[test]
    fn dissipative_map_matches_moment_closed_form() {
        // exponentiate the relaxation generator and compare moments with
        // the closed-form single-generator map
        let cfg = TruncationConfig {
            dim: 30,
            tail_tol: 1e-9,
        };
        let m0 = GaussianMoments::new(0.5, -0.3, 0.8, 0.6, 0.1);
        let rho = gaussian_state(&cfg, &m0).unwrap();
        let alpha = -0.35;
        let act = LiouvilleAction::from_generator(Generator::Relaxation, &cfg);
        let evolved = act.expm_apply(&rho, alpha);
        let got = moments_from_rho(&evolved).unwrap();
        let want = apply_dissipative(&m0, Generator::Relaxation, alpha).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-8, "diff {}", got.max_abs_diff(&want));
    }

    #[test]
    fn gaussian_state_round_trips() {
        let cfg = TruncationConfig::default();
        // vacuum is exactly |0><0|
        let rho = gaussian_state(&cfg, &GaussianMoments::vacuum()).unwrap();
        let mut expected = CMat::zeros((cfg.dim, cfg.dim));
        expected[[0, 0]] = C64::new(1.0, 0.0);
        assert!(max_abs(&(&rho - &expected)) < 1e-12);

        // coherent state moments come back
        let m = GaussianMoments::coherent(1.0, 0.5);
        let rho = gaussian_state(&cfg, &m).unwrap();
        let got = moments_from_rho(&rho).unwrap();
        assert!(got.max_abs_diff(&m) < 1e-10);

        // thermal state: diagonal, geometric, delta = b^2
        let m = GaussianMoments::thermal(1.0);
        let rho = gaussian_state(&cfg, &m).unwrap();
        for i in 0..cfg.dim {
            for j in 0..cfg.dim {
                if i != j {
                    assert!(rho[[i, j]].norm() < 1e-14);
                }
            }
        }
        let ratio = rho[[1, 1]].re / rho[[0, 0]].re;
        assert!((ratio - 1.0 / 3.0).abs() < 1e-10, "ratio {ratio}");
        let got = moments_from_rho(&rho).unwrap();
        assert!((got.delta() - 1.0).abs() < 1e-9);

        // rotated squeezed state with displacement
        let m = GaussianMoments::new(0.5, 0.3, 0.9, 0.45, 0.2);
        let rho = gaussian_state(&cfg, &m).unwrap();
        let got = moments_from_rho(&rho).unwrap();
        assert!(got.max_abs_diff(&m) < 1e-9, "diff {}", got.max_abs_diff(&m));
    }

    #[test]
    fn gaussian_state_rejects_unphysical_and_leaky() {
        let cfg = TruncationConfig::default();
        let bad = GaussianMoments::new(0.0, 0.0, 0.3, 0.3, 0.0);
        assert!(matches!(
            gaussian_state(&cfg, &bad),
            Err(Error::Unphysical { .. })
        ));
        let hot = GaussianMoments::thermal(30.0);
        assert!(matches!(
            gaussian_state(&cfg, &hot),
            Err(Error::TruncationLeak { .. })
        ));
    }

    #[test]
    fn squeezed_state_cross_path() {
        // squeeze the vacuum via the scaling map on moments, then build the
        // state directly; moments must match
        let cfg = TruncationConfig::default();
        let psi = 2.0f64.ln();
        let m = crate::moments::apply_unitary(
            &GaussianMoments::vacuum(),
            Generator::Scaling,
            psi,
        )
        .unwrap();
        assert!((m.sigma_xx - 1.0).abs() < 1e-15);
        assert!((m.sigma_pp - 0.25).abs() < 1e-15);
        let rho = gaussian_state(&cfg, &m).unwrap();
        let got = moments_from_rho(&rho).unwrap();
        assert!(got.max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn zero_generator_evolution_is_identity() {
        let cfg = TruncationConfig::default();
        let rho = gaussian_state(&cfg, &GaussianMoments::coherent(0.8, -0.2)).unwrap();
        let out = evolve_oracle(
            &UnitaryCoefficients::default(),
            &DissipativeCoefficients::default(),
            &rho,
            3.7,
            &cfg,
        )
        .unwrap();
        assert!(max_abs(&(&out - &rho)) < 1e-14);
    }

    #[test]
    fn relaxation_fixed_point_from_vacuum() {
        // first preset with b = 1/2 settles at minimum uncertainty
        let cfg = TruncationConfig::default();
        let rho = gaussian_state(&cfg, &GaussianMoments::vacuum()).unwrap();
        let u = UnitaryCoefficients::new(2.0, 0.0, 0.0);
        let d = DissipativeCoefficients::new(0.5, -0.5, 0.0, 0.0);
        let out = evolve_oracle(&u, &d, &rho, 10.0, &cfg).unwrap();
        let m = moments_from_rho(&out).unwrap();
        assert!(m.max_abs_diff(&GaussianMoments::vacuum()) < 1e-7);
        assert!((m.delta() - 0.25).abs() < 1e-7);
    }

    #[test]
    fn oracle_trajectory_steps_match_single_shots() {
        let cfg = TruncationConfig {
            dim: 24,
            tail_tol: 1e-7,
        };
        let rho = gaussian_state(&cfg, &GaussianMoments::coherent(0.5, 0.2)).unwrap();
        let u = UnitaryCoefficients::new(2.0, 0.0, -0.3);
        let d = DissipativeCoefficients::new(0.3, -0.3, -0.3, 0.0);
        let times = [0.5, 1.0, 2.0];
        let samples = oracle_trajectory(&u, &d, &rho, &times, &cfg).unwrap();
        for (&t, sample) in times.iter().zip(&samples) {
            let direct = moments_from_rho(&evolve_oracle(&u, &d, &rho, t, &cfg).unwrap()).unwrap();
            assert!(sample.max_abs_diff(&direct) < 1e-10, "t={t}");
        }
    }

    #[test]
    fn commutator_table_holds_on_interior() {
        let report = commutator_table_check(&small_cfg(8)).unwrap();
        assert_eq!(report.pairs, 49);
        assert!(
            report.max_deviation < 1e-10,
            "worst pair {:?} deviates {}",
            report.worst,
            report.max_deviation
        );
    }
}
