//! Error probability of the C→D receiver.

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use num_complex::Complex64;

use super::mixture::{gamma_expectation, QuadSettings};
use crate::fock::{
    build_state, build_state_closed_form, choose_cutoff, helstrom, helstrom_diagonal,
    photon_number_pmf, StateSpec,
};
use crate::protocol::{conditional_params, ConditionalState, ProtocolParams};
use crate::specfn::GammaDensityParams;
use crate::{Error, Result};

/// Which version of the conditional idler is discriminated from `ρ_{0,N_S}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdlerModel {
    /// The displaced thermal state itself.
    Coherent,
    /// Its photon-number diagonal, as left by a uniformly random phase.
    Dephased,
}

/// Conditional statistics, or `None` when the target-present idler equals
/// the target-absent one (`κ = 0`).
pub(crate) fn checked_conditional(p: &ProtocolParams) -> Result<Option<ConditionalState>> {
    p.validate()?;
    if p.kappa == 0.0 {
        return Ok(None);
    }
    let c = conditional_params(p);
    if c.e_therm < 0.0 {
        return Err(Error::Domain {
            what: "residual idler noise E (needs N_B >= 1 - kappa)",
            value: c.e_therm,
        });
    }
    Ok(Some(c))
}

/// `P_H(ρ_{0,N_S}, ρ_{√x,E})` for one heterodyne outcome.
pub fn conditional_helstrom(p: &ProtocolParams, x: f64, model: IdlerModel) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            what: "x",
            value: x,
        });
    }
    match checked_conditional(p)? {
        None => Ok(0.5),
        Some(c) => helstrom_given(p.n_s, &c, x, model),
    }
}

fn helstrom_given(n_s: f64, c: &ConditionalState, x: f64, model: IdlerModel) -> Result<f64> {
    let absent = StateSpec::thermal(n_s)?;
    let present = StateSpec::displaced_thermal(Complex64::new(x.sqrt(), 0.0), c.e_therm)?;
    let cutoff = choose_cutoff(&absent)?.max(choose_cutoff(&present)?);
    match model {
        IdlerModel::Dephased => Ok(helstrom_diagonal(
            &photon_number_pmf(&absent, cutoff - 1),
            &photon_number_pmf(&present, cutoff - 1),
        )),
        IdlerModel::Coherent => helstrom(
            &build_state(&absent, cutoff)?,
            &build_state_closed_form(&present, cutoff)?,
        ),
    }
}

/// `∫ P^M(x; ξ_κ) P_H(ρ_{0,N_S}, ρ_{√x,E}) dx` for the chosen idler model.
pub fn p_cd_model(p: &ProtocolParams, quad: &QuadSettings, model: IdlerModel) -> Result<f64> {
    quad.validate()?;
    let Some(c) = checked_conditional(p)? else {
        return Ok(0.5);
    };
    if p.m == 0 || c.xi == 0.0 {
        return helstrom_given(p.n_s, &c, 0.0, model);
    }
    let law = GammaDensityParams::new(p.m, 2.0 * c.xi)?;
    let v = gamma_expectation(law, quad, |x| helstrom_given(p.n_s, &c, x, model))?;
    Ok(v.clamp(0.0, 0.5))
}

/// C→D error probability with the coherent conditional idler.
pub fn p_cd(p: &ProtocolParams, quad: &QuadSettings) -> Result<f64> {
    p_cd_model(p, quad, IdlerModel::Coherent)
}

/// C→D error probability with the dephased conditional idler.
pub fn p_cd_dephased(p: &ProtocolParams, quad: &QuadSettings) -> Result<f64> {
    p_cd_model(p, quad, IdlerModel::Dephased)
}
