//! Homodyne detection of the combined idler.
//!
//! The quadrature aligned with the displacement reads `N(0, 2N_S+1)` when
//! the target is absent and `N(2√x, 2E+1)` when it is present, in units
//! where the vacuum variance is 1.

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use super::cd::checked_conditional;
use super::mixture::{gamma_expectation, QuadSettings};
use crate::protocol::ProtocolParams;
use crate::specfn::{normal_sf, GammaDensityParams};
use crate::{Error, Result};

/// Outcomes for which the likelihood-ratio test declares "present".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Never,
    Always,
    Above(f64),
    Below(f64),
    Inside(f64, f64),
    Outside(f64, f64),
}

impl Region {
    /// Ties go to "absent".
    pub fn contains(&self, y: f64) -> bool {
        match *self {
            Region::Never => false,
            Region::Always => true,
            Region::Above(t) => y > t,
            Region::Below(t) => y < t,
            Region::Inside(a, b) => a < y && y < b,
            Region::Outside(a, b) => y < a || y > b,
        }
    }

    /// Probability of the region under `N(mean, var)`.
    pub fn probability(&self, mean: f64, var: f64) -> f64 {
        let s = var.sqrt();
        let above = |t: f64| normal_sf((t - mean) / s);
        let below = |t: f64| normal_sf((mean - t) / s);
        match *self {
            Region::Never => 0.0,
            Region::Always => 1.0,
            Region::Above(t) => above(t),
            Region::Below(t) => below(t),
            Region::Inside(a, b) => {
                let (za, zb) = ((a - mean) / s, (b - mean) / s);
                if za >= 0.0 {
                    normal_sf(za) - normal_sf(zb)
                } else if zb <= 0.0 {
                    normal_sf(-zb) - normal_sf(-za)
                } else {
                    1.0 - normal_sf(zb) - normal_sf(-za)
                }
            }
            Region::Outside(a, b) => below(a) + above(b),
        }
    }
}

/// Minimum-error test between `N(0, v0)` (absent) and `N(m1, v1)` (present).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTest {
    pub v0: f64,
    pub m1: f64,
    pub v1: f64,
    pub region: Region,
}

impl GaussianTest {
    /// Solves `2(ln f₁ - ln f₀) = a y² + b y + c = 0` for the decision
    /// boundary.
    pub fn new(v0: f64, m1: f64, v1: f64) -> Result<Self> {
        if !(v0 > 0.0 && v1 > 0.0) || !m1.is_finite() {
            return Err(Error::InvalidParameter(
                "Gaussian test needs positive variances",
            ));
        }
        let a = (v1 - v0) / (v0 * v1);
        let b = 2.0 * m1 / v1;
        let c = -m1 * m1 / v1 - ((v1 - v0) / v0).ln_1p();
        let region = if a == 0.0 {
            if b > 0.0 {
                Region::Above(-c / b)
            } else if b < 0.0 {
                Region::Below(-c / b)
            } else if c > 0.0 {
                Region::Always
            } else {
                Region::Never
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc <= 0.0 {
                if a > 0.0 {
                    Region::Always
                } else {
                    Region::Never
                }
            } else {
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                let (r1, r2) = if q == 0.0 {
                    let r = (-c / a).sqrt();
                    (-r, r)
                } else {
                    let (x, y) = (q / a, c / q);
                    (x.min(y), x.max(y))
                };
                if a > 0.0 {
                    Region::Outside(r1, r2)
                } else {
                    Region::Inside(r1, r2)
                }
            }
        };
        Ok(Self { v0, m1, v1, region })
    }

    pub fn declares_present(&self, y: f64) -> bool {
        self.region.contains(y)
    }

    /// Equal-prior error of the test.
    pub fn error(&self) -> f64 {
        let false_alarm = self.region.probability(0.0, self.v0);
        let miss = 1.0 - self.region.probability(self.m1, self.v1);
        (0.5 * (false_alarm + miss)).clamp(0.0, 0.5)
    }
}

/// Optimal test for one outcome `x` of the combined displacement.
pub fn homodyne_test(p: &ProtocolParams, x: f64) -> Result<GaussianTest> {
    let e = match checked_conditional(p)? {
        Some(c) => c.e_therm,
        None => p.n_s,
    };
    let m1 = if p.kappa == 0.0 { 0.0 } else { 2.0 * x.sqrt() };
    GaussianTest::new(2.0 * p.n_s + 1.0, m1, 2.0 * e + 1.0)
}

fn x_law(p: &ProtocolParams) -> Result<Option<GammaDensityParams>> {
    let Some(c) = checked_conditional(p)? else {
        return Ok(None);
    };
    if p.m == 0 || c.xi == 0.0 {
        return Ok(None);
    }
    Ok(Some(GammaDensityParams::new(p.m, 2.0 * c.xi)?))
}

/// Homodyne error with the threshold optimized for each outcome `x`.
pub fn homodyne_error(p: &ProtocolParams, quad: &QuadSettings) -> Result<f64> {
    quad.validate()?;
    match x_law(p)? {
        None => Ok(homodyne_test(p, 0.0)?.error()),
        Some(law) => gamma_expectation(law, quad, |x| Ok(homodyne_test(p, x)?.error())),
    }
}

/// Homodyne error of the fixed rule "present iff `y > threshold`".
pub fn homodyne_error_fixed(
    p: &ProtocolParams,
    threshold: f64,
    quad: &QuadSettings,
) -> Result<f64> {
    quad.validate()?;
    let rule = Region::Above(threshold);
    let false_alarm = rule.probability(0.0, 2.0 * p.n_s + 1.0);
    let miss = |x: f64| -> Result<f64> {
        let t = homodyne_test(p, x)?;
        Ok(Region::Below(threshold).probability(t.m1, t.v1))
    };
    let miss = match x_law(p)? {
        None => miss(0.0)?,
        Some(law) => gamma_expectation(law, quad, miss)?,
    };
    Ok(0.5 * (false_alarm + miss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cd::p_cd;
    use crate::specfn::erfc;

    #[test]
    fn identical_gaussians() {
        let t = GaussianTest::new(1.5, 0.0, 1.5).unwrap();
        assert_eq!(t.error(), 0.5);
    }

    #[test]
    fn equal_unit_variances() {
        for x in [0.1f64, 1.0, 4.0] {
            let t = GaussianTest::new(1.0, 2.0 * x.sqrt(), 1.0).unwrap();
            assert_eq!(t.region, Region::Above(x.sqrt()));
            let want = 0.5 * erfc(x.sqrt() / 2f64.sqrt());
            assert!((t.error() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn unequal_variances_against_numeric_overlap() {
        // Oracle: ½∫min(f0, f1) by a fine midpoint sum.
        for (v0, m1, v1) in [(1.0, 1.0, 3.0), (2.5, 0.4, 1.0), (1.002, 0.44, 1.0018)] {
            let t = GaussianTest::new(v0, m1, v1).unwrap();
            let f = |y: f64, m: f64, v: f64| {
                (-(y - m) * (y - m) / (2.0 * v)).exp() / (2.0 * core::f64::consts::PI * v).sqrt()
            };
            let (lo, hi, n) = (-40.0, 40.0, 400_000);
            let h = (hi - lo) / n as f64;
            let s: f64 = (0..n)
                .map(|i| {
                    let y = lo + (i as f64 + 0.5) * h;
                    f(y, 0.0, v0).min(f(y, m1, v1))
                })
                .sum();
            assert!((t.error() - 0.5 * s * h).abs() < 1e-8, "{v0} {m1} {v1}");
        }
    }

    #[test]
    fn helstrom_beats_homodyne() {
        let p = ProtocolParams::default();
        let q = QuadSettings::default();
        let hom = homodyne_error(&p, &q).unwrap();
        assert!(hom >= p_cd(&p, &q).unwrap());
        assert!(hom <= 0.5);
    }

    #[test]
    fn fixed_threshold_is_never_better() {
        let p = ProtocolParams::new(0.1, 0.1, 0.0, 1.0, 100).unwrap();
        let q = QuadSettings::default();
        let best = homodyne_error(&p, &q).unwrap();
        for t in [0.0, 0.2, 0.5, 1.0] {
            assert!(homodyne_error_fixed(&p, t, &q).unwrap() >= best - 1e-15);
        }
    }
}
