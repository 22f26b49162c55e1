//! SPDC frequency-mode source.
//!
//! A pump at `ω_P` drives a medium of length `L`; every signal frequency
//! mode `ω_S + ω_n` pairs with the idler mode `ω_I - ω_n`, `ω_n = 2πn/T`,
//! through the Bogoliubov map
//!
//! `â_S,n(L) = G â_S,n(0) + g â†_I,-n(0)`, with `G = cosh|ζL|`,
//! `g = (ζ/|ζ|) sinh|ζL|`.
//!
//! Each pair is a two-mode squeezed vacuum with `N_S = |g|²`. Bandwidths are
//! angular (rad/s) throughout.

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use core::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    /// `ζL`, dimensionless.
    pub coupling: Complex64,
    /// Pulse duration `T` in seconds.
    pub duration: f64,
    /// Phase-matching bandwidth `Ω` in rad/s.
    pub bandwidth: f64,
    /// `c₂` in `Δk_n L = c₂ ω_n²`, in s².
    pub mismatch_coeff: f64,
}

impl SourceSpec {
    pub fn new(
        coupling: Complex64,
        duration: f64,
        bandwidth: f64,
        mismatch_coeff: f64,
    ) -> Result<Self> {
        let s = Self {
            coupling,
            duration,
            bandwidth,
            mismatch_coeff,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.re.is_finite() && self.coupling.im.is_finite()) {
            return Err(Error::InvalidParameter("coupling must be finite"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter("duration must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidParameter("bandwidth must be positive"));
        }
        if !(self.mismatch_coeff >= 0.0 && self.mismatch_coeff.is_finite()) {
            return Err(Error::InvalidParameter(
                "mismatch coefficient must be nonnegative",
            ));
        }
        Ok(())
    }
}

/// Coupling magnitude `|ζL|` that yields brightness `n_s`.
pub fn coupling_for_brightness(n_s: f64) -> Result<f64> {
    if !(n_s >= 0.0 && n_s.is_finite()) {
        return Err(Error::Domain {
            what: "brightness",
            value: n_s,
        });
    }
    Ok(n_s.sqrt().asinh())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub g_coeff: f64,
    pub g_small: Complex64,
    pub n_s: f64,
}

impl BogoliubovPair {
    /// `G² - |g|² - 1`; zero when commutators are preserved.
    pub fn commutator_defect(&self) -> f64 {
        self.g_coeff * self.g_coeff - self.g_small.norm_sqr() - 1.0
    }

    /// Signal-idler cross correlation `G|g| = √(N_S(N_S+1))`.
    pub fn correlation(&self) -> f64 {
        self.g_coeff * self.g_small.norm()
    }
}

pub fn bogoliubov(spec: &SourceSpec) -> BogoliubovPair {
    let r = spec.coupling.norm();
    if r == 0.0 {
        return BogoliubovPair {
            g_coeff: 1.0,
            g_small: Complex64::new(0.0, 0.0),
            n_s: 0.0,
        };
    }
    let sh = r.sinh();
    BogoliubovPair {
        g_coeff: r.cosh(),
        g_small: spec.coupling / r * sh,
        n_s: sh * sh,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeCount {
    pub l: u64,
    /// Signal-idler pairs, `2l + 1`.
    pub m: u64,
    /// Set when `ΩT < 4π`, so only the central pair survives.
    pub too_narrow: bool,
}

/// `l = ⌊ΩT/4π⌋`, `M = 2l + 1`.
pub fn mode_count(spec: &SourceSpec) -> ModeCount {
    let ratio = spec.bandwidth * spec.duration / (4.0 * PI);
    // Absorb rounding in products such as (4π·k)·1 landing just below k.
    let l = (ratio * (1.0 + 1e-12)).floor() as u64;
    ModeCount {
        l,
        m: 2 * l + 1,
        too_narrow: l == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthEstimate {
    /// Full two-sided angular bandwidth in rad/s.
    pub omega: f64,
    /// Set when `c₂ = 0`: the quadratic model never leaves the budget.
    pub unbounded: bool,
}

/// Width over which `c₂ω²` stays below `budget`: `Ω = 2√(budget/c₂)`.
pub fn bandwidth_from_mismatch(spec: &SourceSpec, budget: f64) -> Result<BandwidthEstimate> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::Domain {
            what: "mismatch budget",
            value: budget,
        });
    }
    if spec.mismatch_coeff == 0.0 {
        return Ok(BandwidthEstimate {
            omega: f64::INFINITY,
            unbounded: true,
        });
    }
    Ok(BandwidthEstimate {
        omega: 2.0 * (budget / spec.mismatch_coeff).sqrt(),
        unbounded: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{conditional_params, ProtocolParams};

    fn spec(coupling: f64, omega_t: f64) -> SourceSpec {
        SourceSpec::new(Complex64::new(coupling, 0.0), 1.0, omega_t, 4e-25).unwrap()
    }

    #[test]
    fn bogoliubov_examples() {
        let b = bogoliubov(&spec(0.0, 4.0 * PI));
        assert_eq!(
            (b.g_coeff, b.g_small, b.n_s),
            (1.0, Complex64::new(0.0, 0.0), 0.0)
        );
        let b = bogoliubov(&spec(0.0316228, 4.0 * PI));
        let want = 0.0316228f64.sinh().powi(2);
        assert!((b.n_s - want).abs() < 1e-15);
        assert!((b.n_s - 1.000335e-3).abs() < 1e-9);
    }

    #[test]
    fn coupling_phase_is_carried() {
        let z = Complex64::from_polar(0.4, 1.1);
        let s = SourceSpec::new(z, 1.0, 10.0, 0.0).unwrap();
        let b = bogoliubov(&s);
        assert!((b.g_small.arg() - 1.1).abs() < 1e-14);
        assert!(b.commutator_defect().abs() < 1e-12);
    }

    #[test]
    fn mode_count_examples() {
        assert_eq!(mode_count(&spec(0.1, 4.0 * PI)).m, 3);
        let c = mode_count(&spec(0.1, 2.0 * PI * 1e5));
        assert_eq!((c.l, c.m), (50_000, 100_001));
        assert_eq!(mode_count(&spec(0.1, 4.0 * PI * 7.4)).m, 15);
        assert!(mode_count(&spec(0.1, 2.0)).too_narrow);
    }

    #[test]
    fn bandwidth_examples() {
        let s = spec(0.1, 1.0);
        let w = bandwidth_from_mismatch(&s, 0.01).unwrap().omega;
        assert!((w - 2.0 * 2.5e22f64.sqrt()).abs() < 1e-3 * w);
        assert!(w > 1e11 && w < 1e12);
        let w4 = bandwidth_from_mismatch(&s, 0.04).unwrap().omega;
        assert!((w4 / w - 2.0).abs() < 1e-12);
        assert_eq!(bandwidth_from_mismatch(&s, 0.0).unwrap().omega, 0.0);
        let flat = SourceSpec::new(Complex64::new(0.1, 0.0), 1.0, 1.0, 0.0).unwrap();
        assert!(bandwidth_from_mismatch(&flat, 0.01).unwrap().unbounded);
        assert!(bandwidth_from_mismatch(&s, -1.0).is_err());
    }

    #[test]
    fn source_brightness_feeds_protocol() {
        let n_s = 1e-3;
        let r = coupling_for_brightness(n_s).unwrap();
        let b = bogoliubov(&spec(r, 4.0 * PI));
        let direct = conditional_params(&ProtocolParams::default());
        let via = conditional_params(&ProtocolParams {
            n_s: b.n_s,
            ..ProtocolParams::default()
        });
        assert!((direct.mu - via.mu).abs() < 1e-12 * direct.mu);
        assert!((b.correlation() - (n_s * (n_s + 1.0)).sqrt()).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn hyperbolic_identity(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let s = SourceSpec::new(Complex64::new(re, im), 1.0, 1.0, 0.0).unwrap();
            let b = bogoliubov(&s);
            proptest::prop_assert!(b.commutator_defect().abs() <= 1e-12 * b.g_coeff.powi(2));
        }

        #[test]
        fn mode_count_monotone(w in 1.0f64..1e6, t in 1e-3f64..10.0, dw in 0.0f64..1e5, dt in 0.0f64..5.0) {
            let base = mode_count(&SourceSpec::new(Complex64::new(0.1, 0.0), t, w, 0.0).unwrap()).l;
            let wider = mode_count(&SourceSpec::new(Complex64::new(0.1, 0.0), t, w + dw, 0.0).unwrap()).l;
            let longer = mode_count(&SourceSpec::new(Complex64::new(0.1, 0.0), t + dt, w, 0.0).unwrap()).l;
            proptest::prop_assert!(wider >= base && longer >= base);
        }
    }
}
