//! Photon-counting receiver on the combined idler.
//!
//! Decision rule: declare the target present iff the count exceeds the
//! integer threshold. Threshold 0 is the Kennedy rule.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use num_complex::Complex64;

use super::cd::checked_conditional;
use super::mixture::{gamma_nodes, QuadSettings};
use crate::fock::{photon_number_pmf, StateSpec};
use crate::protocol::{conditional_params, ProtocolParams};
use crate::specfn::{lambert_w_minus1, GammaDensityParams};
use crate::{Error, Result};

/// `Pr[n > t]` for a thermal state of occupancy `n_s`.
pub fn thermal_exceedance(n_s: f64, threshold: u64) -> f64 {
    if n_s == 0.0 {
        return 0.0;
    }
    ((threshold as f64 + 1.0) * (n_s.ln() - n_s.ln_1p())).exp()
}

/// Photon-count law of the combined idler under target presence, averaged
/// over the gamma law of `x`, for counts `0..=n_max`.
pub fn present_count_pmf(
    p: &ProtocolParams,
    n_max: usize,
    quad: &QuadSettings,
) -> Result<Vec<f64>> {
    quad.validate()?;
    let Some(c) = checked_conditional(p)? else {
        return Ok(photon_number_pmf(&StateSpec::thermal(p.n_s)?, n_max));
    };
    let at = |x: f64| -> Result<Vec<f64>> {
        let spec = StateSpec::displaced_thermal(Complex64::new(x.sqrt(), 0.0), c.e_therm)?;
        Ok(photon_number_pmf(&spec, n_max))
    };
    if p.m == 0 || c.xi == 0.0 {
        return at(0.0);
    }
    let law = GammaDensityParams::new(p.m, 2.0 * c.xi)?;
    let mut acc = vec![0.0; n_max + 1];
    for (x, w) in gamma_nodes(law, quad)? {
        if w == 0.0 {
            continue;
        }
        for (a, q) in acc.iter_mut().zip(at(x)?) {
            *a += w * q;
        }
    }
    Ok(acc)
}

/// Error of the threshold rule for every threshold `0..=t_max`.
pub fn count_errors(p: &ProtocolParams, t_max: u64, quad: &QuadSettings) -> Result<Vec<f64>> {
    let pmf = present_count_pmf(p, t_max as usize, quad)?;
    let mut miss = 0.0;
    Ok(pmf
        .iter()
        .enumerate()
        .map(|(t, q)| {
            miss += q;
            (0.5 * thermal_exceedance(p.n_s, t as u64) + 0.5 * miss).min(0.5)
        })
        .collect())
}

/// Error of the rule "present iff count > `threshold`".
pub fn photon_count_error(p: &ProtocolParams, threshold: u64, quad: &QuadSettings) -> Result<f64> {
    Ok(*count_errors(p, threshold, quad)?.last().expect("nonempty"))
}

/// Thresholds worth scanning: well past the bulk of the present-count law.
fn scan_limit(p: &ProtocolParams) -> u64 {
    let c = conditional_params(p);
    let mean = 2.0 * c.xi * p.m as f64 + c.e_therm.max(0.0) + p.n_s;
    (2.0 * mean + 10.0 * mean.sqrt() + 10.0).ceil() as u64
}

/// Best integer threshold and its error, ties resolved toward the lower one.
pub fn best_threshold(p: &ProtocolParams, quad: &QuadSettings) -> Result<(u64, f64)> {
    let errs = count_errors(p, scan_limit(p), quad)?;
    let mut best = (0, errs[0]);
    for (t, &e) in errs.iter().enumerate().skip(1) {
        if e < best.1 {
            best = (t as u64, e);
        }
    }
    Ok(best)
}

/// Continuous threshold formula next to the brute-force optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPlan {
    /// `ε = -W₋₁(-N_S/e)`.
    pub epsilon: f64,
    /// `2μ_κ²(κN_S+N_B+1)M/ε`, which equals `4ξ_κM/ε`.
    pub n_opt_real: f64,
    /// `⌊n_opt_real⌋`.
    pub n_opt_int: u64,
    /// `ε/2ξ_κ`.
    pub m_star: f64,
    /// `ε/4ξ_κ`, where `n_opt_real` reaches 1.
    pub m_star_formula: f64,
    pub best_threshold: u64,
    pub best_error: f64,
}

pub fn optimal_threshold(p: &ProtocolParams, quad: &QuadSettings) -> Result<ThresholdPlan> {
    p.validate()?;
    if !(p.n_s > 0.0 && p.n_s < (-1.0f64).exp()) {
        return Err(Error::Domain {
            what: "N_S for the threshold formula (needs 0 < N_S < 1/e)",
            value: p.n_s,
        });
    }
    let epsilon = -lambert_w_minus1(-p.n_s * (-1.0f64).exp())?;
    let c = conditional_params(p);
    let n_opt_real = 2.0 * c.mu * c.mu * (p.return_photons() + 1.0) * p.m as f64 / epsilon;
    let (best_threshold, best_error) = best_threshold(p, quad)?;
    Ok(ThresholdPlan {
        epsilon,
        n_opt_real,
        n_opt_int: n_opt_real.floor() as u64,
        m_star: epsilon / (2.0 * c.xi),
        m_star_formula: epsilon / (4.0 * c.xi),
        best_threshold,
        best_error,
    })
}

/// Smallest `M` in `[m_lo, m_hi]` whose best threshold is nonzero, found by
/// bisection. `None` if the threshold is already nonzero at `m_lo` or still
/// zero at `m_hi`.
pub fn threshold_transition(
    p: &ProtocolParams,
    m_lo: u64,
    m_hi: u64,
    quad: &QuadSettings,
) -> Result<Option<u64>> {
    if m_lo == 0 || m_lo >= m_hi {
        return Err(Error::InvalidParameter(
            "transition search needs 0 < m_lo < m_hi",
        ));
    }
    let nonzero = |m: u64| -> Result<bool> { Ok(best_threshold(&p.with_m(m), quad)?.0 > 0) };
    if nonzero(m_lo)? || !nonzero(m_hi)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (m_lo, m_hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if nonzero(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cd::{p_cd, p_cd_dephased};

    #[test]
    fn vacuum_background_never_fires() {
        let p = ProtocolParams::new(0.0, 0.3, 0.0, 0.7, 5).unwrap();
        let q = QuadSettings::default();
        let miss = present_count_pmf(&p, 0, &q).unwrap()[0];
        assert!((photon_count_error(&p, 0, &q).unwrap() - 0.5 * miss).abs() < 1e-15);
    }

    #[test]
    fn huge_threshold_is_a_coin_flip() {
        let p = ProtocolParams::new(0.01, 0.1, 0.0, 1.0, 100).unwrap();
        let e = photon_count_error(&p, 400, &QuadSettings::default()).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn counting_cannot_beat_helstrom() {
        let p = ProtocolParams::default();
        let q = QuadSettings::default();
        let kennedy = photon_count_error(&p, 0, &q).unwrap();
        let deph = p_cd_dephased(&p, &q).unwrap();
        // Equal up to rounding here: for small x the per-outcome optimal
        // count rule is the Kennedy rule.
        assert!(kennedy >= deph * (1.0 - 1e-12), "{kennedy} vs {deph}");
        assert!(kennedy >= p_cd(&p, &q).unwrap());
    }

    #[test]
    fn plan_reference_values() {
        let plan = optimal_threshold(&ProtocolParams::default(), &QuadSettings::default()).unwrap();
        assert!((plan.epsilon - 10.2334).abs() < 1e-4);
        assert!(
            (plan.m_star / 2.147e7 - 1.0).abs() < 1e-3,
            "{}",
            plan.m_star
        );
        assert!(
            (plan.n_opt_real / 9.316e-3 - 1.0).abs() < 1e-3,
            "{}",
            plan.n_opt_real
        );
        assert_eq!(plan.n_opt_int, 0);
        assert_eq!(plan.best_threshold, 0);
        assert!((plan.m_star_formula * 2.0 - plan.m_star).abs() < 1e-6 * plan.m_star);
    }

    #[test]
    fn plan_rejects_bright_sources() {
        let p = ProtocolParams::new(0.5, 0.1, 0.0, 1.0, 10).unwrap();
        assert!(optimal_threshold(&p, &QuadSettings::default()).is_err());
    }
}
