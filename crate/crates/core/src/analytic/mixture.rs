//! Outer quadrature over the gamma law of `x`.

use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::quadrature::GaussLegendre;
use crate::specfn::{gamma_ln_pdf, GammaDensityParams};
use crate::{Error, Result};

/// Node budget and window width for the outer integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub nodes: usize,
    /// Half-width of the integration window in standard deviations.
    pub sigmas: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            nodes: 128,
            sigmas: 12.0,
        }
    }
}

impl QuadSettings {
    pub fn with_nodes(nodes: usize) -> Self {
        Self {
            nodes,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 64 {
            return Err(Error::InvalidParameter(
                "outer quadrature needs at least 64 nodes",
            ));
        }
        if !(self.sigmas >= 6.0 && self.sigmas.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadrature window must span at least 6 sigma",
            ));
        }
        Ok(())
    }
}

/// Extra upper reach in units of the scale, so that the exponential tail of
/// low-shape laws is covered.
const TAIL_SCALES: f64 = 40.0;

/// Abscissae and weights (density folded in) for `∫ Γ(x; M, scale) f(x) dx`.
///
/// The window is `mean ± sigmas·σ`, stretched upward by 40 scales. When it
/// reaches the origin the substitution `x = t²` removes the `x^{M-1}`
/// endpoint behaviour of low shapes.
pub fn gamma_nodes(law: GammaDensityParams, quad: &QuadSettings) -> Result<Vec<(f64, f64)>> {
    quad.validate()?;
    let rule = GaussLegendre::new(quad.nodes);
    let lo = law.mean() - quad.sigmas * law.std_dev();
    let hi = law.mean() + quad.sigmas * law.std_dev() + TAIL_SCALES * law.scale();
    let mut out = Vec::with_capacity(quad.nodes);
    if lo > 0.0 {
        for (x, w) in rule.mapped(lo, hi) {
            out.push((x, w * gamma_ln_pdf(x, law)?.exp()));
        }
    } else {
        for (t, w) in rule.mapped(0.0, hi.sqrt()) {
            let x = t * t;
            out.push((x, 2.0 * t * w * gamma_ln_pdf(x, law)?.exp()));
        }
    }
    Ok(out)
}

/// `∫ Γ(x; M, scale) f(x) dx`.
pub fn gamma_expectation<F>(law: GammaDensityParams, quad: &QuadSettings, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (x, w) in gamma_nodes(law, quad)? {
        if w != 0.0 {
            acc += w * f(x)?;
        }
    }
    Ok(acc)
}
