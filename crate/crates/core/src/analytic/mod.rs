//! Error probabilities, bounds, thresholds and exponents.
//!
//! Every C→D quantity is an average over the gamma law of the squared
//! combined displacement `x`, evaluated by Gauss–Legendre quadrature
//! ([`QuadSettings`]). The inner discrimination problem is single-mode and
//! comes from [`crate::fock`].

mod bounds;
mod cd;
mod counting;
mod curve;
mod homodyne;
mod mixture;

pub use bounds::{ng_beta, p_ci, p_ng, NgBound};
pub use cd::{conditional_helstrom, p_cd, p_cd_dephased, p_cd_model, IdlerModel};
pub use counting::{
    best_threshold, count_errors, optimal_threshold, photon_count_error, present_count_pmf,
    thermal_exceedance, threshold_transition, ThresholdPlan,
};
pub use curve::{
    asymptotic_ratio_db, cd_exponent, ci_exponent, derivative, error_exponents, error_point,
    exponent, local_exponent, log_grid, ErrorCurve, ErrorPoint,
};
pub use homodyne::{homodyne_error, homodyne_error_fixed, homodyne_test, GaussianTest, Region};
pub use mixture::{gamma_expectation, gamma_nodes, QuadSettings};
