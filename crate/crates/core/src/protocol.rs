//! Scenario parameters and the closed-form statistics of the conditional
//! idler after heterodyne detection.
//!
//! A transmitter sends `M` signal modes, each half of a two-mode squeezed
//! vacuum of brightness `N_S`. Under target presence the return is
//! `√κ e^{iθ} â_S + √(1-κ) â_B` with `N_B` thermal background photons. After
//! heterodyning every return mode, each idler collapses to a displaced
//! thermal state `ρ_{d_m,E}` with
//!
//! - `d_m = μ_κ e^{iθ} α*_m`, `μ_κ = √(κN_S(N_S+1)) / (κN_S+N_B+1)`,
//! - `E = N_S(N_B+κ-1) / (N_B+κN_S+1)`.
//!
//! Combining the idlers with weights `α_m/|α|` yields a single mode with
//! displacement of magnitude `√x`, `x = μ_κ²|α|²`, which is gamma distributed
//! with shape `M` and scale `2ξ_κ`, `ξ_κ = κN_S(N_S+1) / (2(κN_S+N_B+1))`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::fock::{choose_cutoff, photon_number_pmf, StateSpec};
use crate::specfn::GammaDensityParams;
use crate::{Error, Result};

/// The scenario tuple `(N_S, κ, θ, N_B, M)`.
///
/// `m = 0` is accepted as the degenerate "no probes" case so that closed
/// forms can be evaluated at the origin; every sampling routine rejects it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Mean signal photons per mode.
    pub n_s: f64,
    /// Target reflectivity.
    pub kappa: f64,
    /// Round-trip phase shift in radians.
    pub theta: f64,
    /// Mean background photons in the return.
    pub n_b: f64,
    /// Number of signal-idler mode pairs.
    pub m: u64,
}

impl Default for ProtocolParams {
    /// `N_S = 0.001`, `κ = 0.01`, `N_B = 20`, `M = 10⁵`, `θ = 0`.
    fn default() -> Self {
        Self {
            n_s: 1e-3,
            kappa: 0.01,
            theta: 0.0,
            n_b: 20.0,
            m: 100_000,
        }
    }
}

impl ProtocolParams {
    pub fn new(n_s: f64, kappa: f64, theta: f64, n_b: f64, m: u64) -> Result<Self> {
        let p = Self {
            n_s,
            kappa,
            theta,
            n_b,
            m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s >= 0.0 && self.n_s.is_finite()) {
            return Err(Error::InvalidParameter(
                "N_S must be finite and nonnegative",
            ));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::InvalidParameter("kappa must lie in [0, 1]"));
        }
        if !(self.n_b >= 0.0 && self.n_b.is_finite()) {
            return Err(Error::InvalidParameter(
                "N_B must be finite and nonnegative",
            ));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite"));
        }
        Ok(())
    }

    /// Same scenario with a different mode count.
    pub fn with_m(&self, m: u64) -> Self {
        Self { m, ..*self }
    }

    /// Same scenario with a different reflectivity.
    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..*self }
    }

    /// Mean photons per return mode, `κN_S + N_B`.
    pub fn return_photons(&self) -> f64 {
        self.kappa * self.n_s + self.n_b
    }
}

/// Statistics of the conditional idler. `displacement` and `x` are zero
/// until [`combine_displacement`] fills them from a heterodyne record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalState {
    pub mu: f64,
    pub xi: f64,
    pub e_therm: f64,
    pub displacement: Complex64,
    /// Squared displacement `μ_κ²|α|²`.
    pub x: f64,
}

impl ConditionalState {
    /// The combined idler as a displaced thermal state.
    pub fn state_spec(&self) -> Result<StateSpec> {
        StateSpec::displaced_thermal(self.displacement, self.e_therm)
    }

    /// Gamma law of `x` for `m` combined modes.
    pub fn x_law(&self, m: u64) -> Result<GammaDensityParams> {
        GammaDensityParams::new(m, 2.0 * self.xi)
    }
}

/// `μ_κ`, `ξ_κ` and `E` exactly as the closed forms read.
///
/// `E` is negative when `N_B < 1 - κ`; it is returned unchanged and rejected
/// later by anything that has to build a state from it.
pub fn conditional_params(p: &ProtocolParams) -> ConditionalState {
    let denom = p.kappa * p.n_s + p.n_b + 1.0;
    let corr = p.kappa * p.n_s * (p.n_s + 1.0);
    ConditionalState {
        mu: corr.sqrt() / denom,
        xi: corr / (2.0 * denom),
        e_therm: p.n_s * (p.n_b + p.kappa - 1.0) / (p.n_b + p.kappa * p.n_s + 1.0),
        displacement: Complex64::new(0.0, 0.0),
        x: 0.0,
    }
}

/// Per-quadrature variance of a heterodyne outcome on the return,
/// `(N_B + κN_S + 1)/2`.
pub fn heterodyne_variance(p: &ProtocolParams) -> f64 {
    0.5 * (p.return_photons() + 1.0)
}

/// Combining weights `w_m = α_m/|α|`. An all-zero record gives zero weights.
pub fn combining_weights(alphas: &[Complex64]) -> Vec<Complex64> {
    let norm = euclidean_norm(alphas);
    if norm == 0.0 {
        return alphas.to_vec();
    }
    alphas.iter().map(|a| a / norm).collect()
}

pub fn euclidean_norm(alphas: &[Complex64]) -> f64 {
    alphas.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Sets the combined displacement `μ_κ e^{iθ}|α|` and `x = μ_κ²|α|²`.
pub fn combine_displacement(
    c: &ConditionalState,
    alphas: &[Complex64],
    theta: f64,
) -> Result<ConditionalState> {
    if alphas.is_empty() {
        return Err(Error::EmptyInput("heterodyne record"));
    }
    let norm = euclidean_norm(alphas);
    let amp = c.mu * norm;
    Ok(ConditionalState {
        displacement: Complex64::from_polar(amp, theta),
        x: amp * amp,
        ..*c
    })
}

/// How the return phase behaves across transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseModel {
    Fixed(f64),
    Uniform,
}

/// A finite reflectivity distribution with a phase model.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSpec {
    kappa_grid: Vec<(f64, f64)>,
    phase: PhaseModel,
}

impl FadingSpec {
    pub fn new(kappa_grid: Vec<(f64, f64)>, phase: PhaseModel) -> Result<Self> {
        if kappa_grid.is_empty() {
            return Err(Error::EmptyInput("fading grid"));
        }
        let mut total = 0.0;
        for &(k, w) in &kappa_grid {
            if !(0.0..=1.0).contains(&k) {
                return Err(Error::InvalidParameter("fading kappa must lie in [0, 1]"));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(
                    "fading weights must be nonnegative",
                ));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("fading weights must sum to 1"));
        }
        Ok(Self { kappa_grid, phase })
    }

    pub fn kappa_grid(&self) -> &[(f64, f64)] {
        &self.kappa_grid
    }

    pub fn phase(&self) -> PhaseModel {
        self.phase
    }
}

/// Displaced-thermal component for reflectivity `kappa` when the nominal
/// scenario `p` produced squared displacement `x`.
fn fading_component(p: &ProtocolParams, kappa: f64, x: f64) -> Result<StateSpec> {
    let nominal = conditional_params(p);
    if nominal.mu == 0.0 {
        return Err(Error::InvalidParameter(
            "fading rescaling needs a nominal scenario with nonzero conversion",
        ));
    }
    let c = conditional_params(&p.with_kappa(kappa));
    let x_k = x * (c.mu / nominal.mu).powi(2);
    StateSpec::displaced_thermal(Complex64::new(x_k.sqrt(), 0.0), c.e_therm)
}

/// Largest cutoff any fading component needs at `x`.
pub fn fading_n_max(p: &ProtocolParams, f: &FadingSpec, x: f64) -> Result<usize> {
    let mut n = 0;
    for &(k, _) in &f.kappa_grid {
        n = n.max(choose_cutoff(&fading_component(p, k, x)?)?);
    }
    Ok(n.saturating_sub(1))
}

/// Photon-count law of the combined idler averaged over the reflectivity
/// grid. Phases do not enter since counts are phase-blind.
pub fn fading_average_pmf(
    p: &ProtocolParams,
    f: &FadingSpec,
    x: f64,
    n_max: usize,
) -> Result<Vec<f64>> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            what: "x",
            value: x,
        });
    }
    let mut acc = alloc::vec![0.0; n_max + 1];
    for &(k, w) in &f.kappa_grid {
        if w == 0.0 {
            continue;
        }
        let pmf = photon_number_pmf(&fading_component(p, k, x)?, n_max);
        for (a, q) in acc.iter_mut().zip(pmf) {
            *a += w * q;
        }
    }
    Ok(acc)
}
