//! Cavity-enhanced quantum pulse gate.
//!
//! A single-resonance cavity of linewidth `γ` hosts sum-frequency
//! conversion with coupling `η`. Frequency mode `n` (`ω_n = 2πn/T`) of the
//! pump-shaped temporal mode `Â_n` leaves as
//!
//! `b̂_out,n = t(ω_n) Â_n + r(ω_n) b̂_in,n`,
//!
//! `t = (η√γ/√T) / (iω_n - γ/2 - η²/2T)`,
//! `r = (iω_n + γ/2 - η²/2T) / (iω_n - γ/2 - η²/2T)`.
//!
//! Impedance matching `γ = η²/T` gives `t(0) = -1`: the central mode is
//! converted completely. Spectra are indexed symmetrically, position `k` of
//! a length-`2L+1` slice holding frequency index `k - L`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Gate parameters. The coupling is stored as the conversion rate `η²/T`
/// so that a matched gate compares equal rates exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QpgSpec {
    gamma: f64,
    conversion_rate: f64,
    duration: f64,
    pump: Vec<Complex64>,
}

fn check_normalized(pump: &[Complex64]) -> Result<()> {
    let total: f64 = pump.iter().map(|b| b.norm_sqr()).sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(
            "spectrum must satisfy sum |beta_n|^2 = 1",
        ));
    }
    Ok(())
}

fn check_centered(len: usize) -> Result<usize> {
    if len % 2 == 0 {
        return Err(Error::InvalidParameter(
            "spectra are indexed -L..=L and need odd length",
        ));
    }
    Ok(len / 2)
}

impl QpgSpec {
    /// `gamma` in rad/s, `eta` in s^{1/2}, `duration` in s.
    pub fn new(gamma: f64, eta: f64, duration: f64, pump: Vec<Complex64>) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter("eta must be nonnegative"));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter("duration must be positive"));
        }
        Self::with_rate(gamma, eta * eta / duration, duration, pump)
    }

    /// Same as [`QpgSpec::new`] with the coupling given as `η²/T` in rad/s.
    pub fn with_rate(
        gamma: f64,
        conversion_rate: f64,
        duration: f64,
        pump: Vec<Complex64>,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be positive"));
        }
        if !(conversion_rate >= 0.0 && conversion_rate.is_finite()) {
            return Err(Error::InvalidParameter(
                "conversion rate must be nonnegative",
            ));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter("duration must be positive"));
        }
        check_centered(pump.len())?;
        check_normalized(&pump)?;
        Ok(Self {
            gamma,
            conversion_rate,
            duration,
            pump,
        })
    }

    /// Impedance-matched gate, `η = √(γT)`, with a single-frequency pump.
    pub fn matched(gamma: f64, duration: f64) -> Result<Self> {
        Self::with_rate(
            gamma,
            gamma,
            duration,
            alloc::vec![Complex64::new(1.0, 0.0)],
        )
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        (self.conversion_rate * self.duration).sqrt()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn conversion_rate(&self) -> f64 {
        self.conversion_rate
    }

    pub fn pump(&self) -> &[Complex64] {
        &self.pump
    }

    /// `ω_n = 2πn/T`.
    pub fn omega(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.duration
    }

    /// `|γT - η²| ≤ 10⁻⁹ γT`.
    pub fn is_matched(&self) -> bool {
        (self.gamma - self.conversion_rate).abs() <= 1e-9 * self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    pub omega: f64,
    pub t_coeff: Complex64,
    pub r_coeff: Complex64,
}

pub fn transfer(spec: &QpgSpec, n: i64) -> TransferPoint {
    let omega = spec.omega(n);
    let half_gamma = 0.5 * spec.gamma;
    let half_conv = 0.5 * spec.conversion_rate;
    let den = Complex64::new(-half_gamma - half_conv, omega);
    let num_t = (spec.gamma * spec.conversion_rate).sqrt();
    TransferPoint {
        omega,
        t_coeff: Complex64::new(num_t, 0.0) / den,
        r_coeff: Complex64::new(half_gamma - half_conv, omega) / den,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectivityReport {
    /// `|t(0)|²`.
    pub conversion_0: f64,
    /// `max_{n≠0} |t(ω_n)|²`.
    pub worst_crosstalk: f64,
    pub matched: bool,
}

/// `|t|²` is even in `ω` and decreasing in `|ω|`, so the worst neighbour is
/// `n = ±1`; both are evaluated.
pub fn selectivity_report(spec: &QpgSpec) -> SelectivityReport {
    let conv = |n| transfer(spec, n).t_coeff.norm_sqr();
    SelectivityReport {
        conversion_0: conv(0),
        worst_crosstalk: conv(1).max(conv(-1)),
        matched: spec.is_matched(),
    }
}

/// Matched-case crosstalk ceiling `(γT/2π)² / (1 + (γT/2π)²)`.
pub fn crosstalk_bound(gamma_t: f64) -> f64 {
    let q = (gamma_t / (2.0 * PI)).powi(2);
    q / (1.0 + q)
}

/// Coefficients of `Â_n = Σ_l β_{n-l} â_{I_l}` on the idler modes
/// `l = -L..=L`; pump entries outside the slice count as zero.
pub fn temporal_mode_coefficients(pump: &[Complex64], n: i64) -> Result<Vec<Complex64>> {
    let half = check_centered(pump.len())? as i64;
    Ok((-half..=half)
        .map(|l| {
            let k = n - l;
            if k.abs() <= half {
                pump[(k + half) as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// Overlap `Σ_l β_{-l} w_l*` between the gate mode `Â_0` and the idler mode
/// with weights `w_l`.
pub fn temporal_mode_overlap(pump: &[Complex64], idler_weights: &[Complex64]) -> Result<Complex64> {
    if pump.len() != idler_weights.len() {
        return Err(Error::DimensionMismatch {
            left: pump.len(),
            right: idler_weights.len(),
        });
    }
    let coeffs = temporal_mode_coefficients(pump, 0)?;
    Ok(coeffs
        .iter()
        .zip(idler_weights)
        .map(|(c, w)| c * w.conj())
        .sum())
}

/// `|Σ_m β*_{m+shift} β_m|`, the residual of the approximation
/// `Σ_m β*_{l+m-n} β_m ≈ δ_{ln}`.
pub fn autocorr_check(beta: &[Complex64], shift: i64) -> Result<f64> {
    check_normalized(beta)?;
    let n = beta.len() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        let k = m + shift;
        if (0..n).contains(&k) {
            acc += beta[k as usize].conj() * beta[m as usize];
        }
    }
    Ok(acc.norm())
}
