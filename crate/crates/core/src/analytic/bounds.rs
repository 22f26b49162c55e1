//! Entangled-probe lower bound and the classical-illumination baseline.

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use num_complex::Complex64;

use crate::fock::{build_state_closed_form, choose_cutoff, helstrom, StateSpec};
use crate::protocol::ProtocolParams;
use crate::Result;

/// `¼e^{-βMN_S}` together with `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgBound {
    pub value: f64,
    pub beta: f64,
    /// Set when `κ = 1` and `N_B = 0`: `β` is infinite and the bound is 0.
    pub degenerate: bool,
}

/// `β = -ln(1 - κ/(N_B(1-κ)+1))`.
pub fn ng_beta(p: &ProtocolParams) -> f64 {
    let ratio = p.kappa / (p.n_b * (1.0 - p.kappa) + 1.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    -(-ratio).ln_1p()
}

/// Lower bound on the error of any entangled-probe receiver.
pub fn p_ng(p: &ProtocolParams) -> Result<NgBound> {
    p.validate()?;
    let beta = ng_beta(p);
    if beta.is_infinite() {
        let value = if p.m == 0 || p.n_s == 0.0 { 0.25 } else { 0.0 };
        return Ok(NgBound {
            value,
            beta,
            degenerate: true,
        });
    }
    Ok(NgBound {
        value: 0.25 * (-beta * p.m as f64 * p.n_s).exp(),
        beta,
        degenerate: false,
    })
}

/// Coherent-state illumination with the same total energy.
///
/// The `M` coherent returns of amplitude `√(κN_S)` on top of `N_B` thermal
/// photons combine into one mode of amplitude `√(MκN_S)`, to be told apart
/// from the bare thermal background. Both hypotheses are shifted by half the
/// amplitude, so the states compared are `ρ_{∓d/2,N_B}` and the cutoff only
/// has to cover a quarter of the signal energy. `cutoff` acts as a floor on
/// the automatic choice.
pub fn p_ci(p: &ProtocolParams, cutoff: Option<usize>) -> Result<f64> {
    p.validate()?;
    let d = (p.m as f64 * p.kappa * p.n_s).sqrt();
    if d == 0.0 {
        return Ok(0.5);
    }
    let absent = StateSpec::displaced_thermal(Complex64::new(-0.5 * d, 0.0), p.n_b)?;
    let present = StateSpec::displaced_thermal(Complex64::new(0.5 * d, 0.0), p.n_b)?;
    let dim = choose_cutoff(&present)?.max(cutoff.unwrap_or(0));
    helstrom(
        &build_state_closed_form(&absent, dim)?,
        &build_state_closed_form(&present, dim)?,
    )
}
