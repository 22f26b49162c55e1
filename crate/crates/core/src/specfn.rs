//! Special functions used across the crate.
//!
//! Only what the receiver models need, at the accuracies they need: the
//! lower real branch of Lambert W, gamma-law densities for large shape
//! parameters, and Laguerre polynomials for displaced-thermal statistics.

use alloc::vec::Vec;
use core::f64::consts::E;

#[allow(unused_imports)] // needed without std
use num_traits::Float;
use rand_core::RngCore;
use rand_distr::Distribution;

use crate::{Error, Result};

/// Branch point of Lambert W, `-1/e`.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Lower real branch `W₋₁(z)` for `z ∈ (-1/e, 0)`.
///
/// Bisection on the monotone piece `w ≤ -1` of `w·eʷ`, then a few guarded
/// Newton steps. The branch point itself maps to `-1`.
pub fn lambert_w_minus1(z: f64) -> Result<f64> {
    let domain = Error::Domain {
        what: "lambert_w_minus1",
        value: z,
    };
    if !z.is_finite() || z >= 0.0 {
        return Err(domain);
    }
    let gap = z - BRANCH_POINT;
    if gap.abs() <= 8.0 * f64::EPSILON {
        return Ok(-1.0);
    }
    if gap < 0.0 {
        return Err(domain);
    }

    // w·eʷ decreases from 0⁻ to -1/e on (-∞, -1].
    let residual = |w: f64| w * w.exp() - z;
    let mut hi = -1.0;
    let mut lo = -2.0;
    while residual(lo) <= 0.0 {
        hi = lo;
        lo *= 2.0;
        if lo < -1.0e4 {
            return Err(Error::NonConvergence("lambert_w_minus1 bracket"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..4 {
        let slope = (1.0 + w) * w.exp();
        if slope == 0.0 {
            break;
        }
        let next = w - residual(w) / slope;
        if !(next >= lo && next <= hi) {
            break;
        }
        w = next;
    }
    Ok(w)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Upper tail of the standard normal, `Pr[Z > z]`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / core::f64::consts::SQRT_2)
}

/// Shape/scale pair of the gamma law followed by `x = μ²|α|²`.
///
/// The shape is the mode count `M`, the scale is `2ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDensityParams {
    shape: u64,
    scale: f64,
}

impl GammaDensityParams {
    pub fn new(shape: u64, scale: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidParameter("gamma shape must be at least 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter("gamma scale must be positive"));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> u64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }

    pub fn std_dev(&self) -> f64 {
        (self.shape as f64).sqrt() * self.scale
    }
}

/// Log-density of the gamma law; `-∞` where the density vanishes.
pub fn gamma_ln_pdf(x: f64, p: GammaDensityParams) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            what: "gamma_pdf",
            value: x,
        });
    }
    let m = p.shape as f64;
    if x == 0.0 {
        return Ok(if p.shape == 1 {
            -p.scale.ln()
        } else {
            f64::NEG_INFINITY
        });
    }
    let y = x / p.scale;
    Ok(ln_gamma_kernel(m, y) - y.ln() - p.scale.ln())
}

/// `ln(1+u) - u`, accurate for small `u`.
fn log1pmx(u: f64) -> f64 {
    if u.abs() >= 0.25 {
        return u.ln_1p() - u;
    }
    let mut term = u;
    let mut sum = 0.0;
    for k in 2..200 {
        term *= -u;
        let add = term / k as f64;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `a ln y - y - ln Γ(a)`.
///
/// For large `a` the three terms are each of order `a ln a` and cancel to
/// `O(1)`, so the Stirling form `a·(ln(1+u) - u) + ½ln(a/2π) - c(a)` with
/// `u = (y - a)/a` is used instead.
fn ln_gamma_kernel(a: f64, y: f64) -> f64 {
    if a < 20.0 {
        return a * y.ln() - y - ln_gamma(a);
    }
    let stirling = 1.0 / (12.0 * a) - 1.0 / (360.0 * a.powi(3)) + 1.0 / (1260.0 * a.powi(5))
        - 1.0 / (1680.0 * a.powi(7));
    a * log1pmx((y - a) / a) + 0.5 * (a / (2.0 * core::f64::consts::PI)).ln() - stirling
}

/// Gamma density `x^{M-1} e^{-x/s} / (s^M Γ(M))`, evaluated in log space.
pub fn gamma_pdf(x: f64, p: GammaDensityParams) -> Result<f64> {
    gamma_ln_pdf(x, p).map(f64::exp)
}

/// Gamma CDF via the regularized lower incomplete gamma function.
pub fn gamma_cdf(x: f64, p: GammaDensityParams) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            what: "gamma_cdf",
            value: x,
        });
    }
    Ok(regularized_lower_gamma(p.shape as f64, x / p.scale))
}

/// `P(a, x)`: series below `a + 1`, Lentz continued fraction above.
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_prefactor = ln_gamma_kernel(a, x);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..100_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() + ln_prefactor).exp().min(1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (1.0 - (h.ln() + ln_prefactor).exp()).max(0.0)
    }
}

/// Draws one variate from the gamma law.
pub fn sample_gamma<R: RngCore + ?Sized>(p: GammaDensityParams, rng: &mut R) -> f64 {
    // Shape and scale are validated on construction.
    let law = rand_distr::Gamma::new(p.shape as f64, p.scale).expect("validated gamma params");
    law.sample(rng)
}

/// Laguerre polynomial `L_n(x)` by upward three-term recurrence.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Logarithms of `E^k L_k^{(a)}(-u/E) / (1+E)^k` for `k = 0..=n_max`,
/// where `u = |d|²/(1+E)`.
///
/// This is the Laguerre factor of displaced-thermal matrix elements with the
/// `E^k` and `(1+E)^k` weights folded in, so the `E → 0` (coherent) limit is
/// regular. The recurrence runs on successive ratios to stay in range for
/// large occupancies. Entries after a vanishing term are `-∞`.
pub fn ln_scaled_laguerre(n_max: usize, order: usize, occupancy: f64, u: f64) -> Vec<f64> {
    let e = occupancy;
    let a = order as f64;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(0.0);
    if n_max == 0 {
        return out;
    }
    let one_e = 1.0 + e;
    let q2 = (e / one_e) * (e / one_e);
    let mut ratio = ((1.0 + a) * e + u) / one_e;
    let mut acc = if ratio > 0.0 {
        ratio.ln()
    } else {
        f64::NEG_INFINITY
    };
    out.push(acc);
    for k in 1..n_max {
        let kf = k as f64;
        if ratio > 0.0 {
            let drift = ((2.0 * kf + 1.0 + a) * e + u) / one_e;
            ratio = (drift - (kf + a) * q2 / ratio) / (kf + 1.0);
        }
        acc = if ratio > 0.0 && acc.is_finite() {
            acc + ratio.ln()
        } else {
            ratio = 0.0;
            f64::NEG_INFINITY
        };
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    // Independent oracle: w = ln(-z) - ln(-w) converges on the -1 branch.
    fn w_minus1_fixed_point(z: f64) -> f64 {
        let mut w = (-z).ln() - 1.0;
        for _ in 0..2000 {
            w = (-z).ln() - (-w).ln();
        }
        w
    }

    #[test]
    fn gamma_kernel_matches_direct_form() {
        for a in [20.0, 35.5, 1e3] {
            for y in [0.3 * a, a, 1.7 * a] {
                let direct = a * f64::ln(y) - y - ln_gamma(a);
                let stable = ln_gamma_kernel(a, y);
                assert!(
                    (direct - stable).abs() < 1e-11 * direct.abs().max(1.0),
                    "{a} {y}"
                );
            }
        }
        for u in [-0.2, -1e-3, 1e-6, 0.1, 0.24] {
            let want = f64::ln_1p(u) - u;
            assert!((log1pmx(u) - want).abs() < 1e-12 * want.abs().max(1e-30) + 1e-18);
        }
    }

    #[test]
    fn lambert_branch_point() {
        assert_eq!(lambert_w_minus1(BRANCH_POINT).unwrap(), -1.0);
    }

    #[test]
    fn lambert_reference_value() {
        let z = -0.001 / E;
        let w = lambert_w_minus1(z).unwrap();
        let oracle = w_minus1_fixed_point(z);
        assert!((w - oracle).abs() < 1e-10, "{w} vs {oracle}");
        assert!((w + 10.2334).abs() < 1e-4);
    }

    #[test]
    fn lambert_newton_vs_bisection() {
        let z = -2e-2;
        let w = lambert_w_minus1(z).unwrap();
        assert!((w * w.exp() - z).abs() <= 1e-12 * z.abs());
        assert!((w - w_minus1_fixed_point(z)).abs() < 1e-10);
    }

    #[test]
    fn lambert_residual_over_log_grid() {
        let lo: f64 = 1e-12;
        let hi: f64 = -(BRANCH_POINT + 1e-6);
        for i in 0..100 {
            let t = i as f64 / 99.0;
            let z = -(lo.ln() + t * (hi.ln() - lo.ln())).exp();
            let w = lambert_w_minus1(z).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - z).abs() <= 1e-12 * z.abs(), "z={z} w={w}");
        }
    }

    #[test]
    fn lambert_rejects_outside_domain() {
        assert!(lambert_w_minus1(0.0).is_err());
        assert!(lambert_w_minus1(0.3).is_err());
        assert!(lambert_w_minus1(-0.5).is_err());
        assert!(lambert_w_minus1(f64::NAN).is_err());
    }

    #[test]
    fn gamma_pdf_at_origin() {
        let p = GammaDensityParams::new(1, 0.5).unwrap();
        assert!((gamma_pdf(0.0, p).unwrap() - 2.0).abs() < 1e-15);
        let p2 = GammaDensityParams::new(3, 0.5).unwrap();
        assert_eq!(gamma_pdf(0.0, p2).unwrap(), 0.0);
        assert!(gamma_pdf(-1.0, p).is_err());
        assert!(GammaDensityParams::new(0, 1.0).is_err());
        assert!(GammaDensityParams::new(1, 0.0).is_err());
    }

    // Composite Simpson over a window wide enough for the tails to vanish.
    fn simpson_moments(p: GammaDensityParams) -> (f64, f64) {
        let mean = p.mean();
        let sd = p.std_dev();
        let lo = (mean - 40.0 * sd).max(0.0);
        let hi = mean + 40.0 * sd + 60.0 * p.scale();
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let (mut m0, mut m1) = (0.0, 0.0);
        for i in 0..=n {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let f = gamma_pdf(x, p).unwrap();
            m0 += w * f;
            m1 += w * f * x;
        }
        (m0 * h / 3.0, m1 * h / 3.0)
    }

    #[test]
    fn gamma_pdf_normalization_and_mean() {
        for (shape, scale) in [(1, 0.5), (2, 1.0), (10, 0.3), (1000, 2.0e-3)] {
            let p = GammaDensityParams::new(shape, scale).unwrap();
            let (m0, m1) = simpson_moments(p);
            assert!((m0 - 1.0).abs() < 1e-9, "norm {m0} for M={shape}");
            assert!(((m1 - p.mean()) / p.mean()).abs() < 1e-8, "mean {m1}");
        }
        let p = GammaDensityParams::new(2, 1.0).unwrap();
        assert!((simpson_moments(p).1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_pdf_large_shape_is_finite() {
        let p = GammaDensityParams::new(10_000_000, 4.0e-7).unwrap();
        let v = gamma_pdf(p.mean(), p).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn gamma_cdf_matches_closed_forms() {
        // Shape 1: 1 - e^{-x/s}; shape 2: 1 - (1 + x/s) e^{-x/s}.
        let p1 = GammaDensityParams::new(1, 0.7).unwrap();
        let p2 = GammaDensityParams::new(2, 0.7).unwrap();
        for x in [0.01, 0.5, 1.0, 3.0, 10.0] {
            let y: f64 = x / 0.7;
            assert!((gamma_cdf(x, p1).unwrap() - (1.0 - (-y).exp())).abs() < 1e-14);
            let c2 = 1.0 - (1.0 + y) * (-y).exp();
            assert!((gamma_cdf(x, p2).unwrap() - c2).abs() < 1e-14);
        }
    }

    fn laguerre_coefficients(n: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * x.powi(k as i32) / fact;
        }
        sum
    }

    #[test]
    fn laguerre_small_cases() {
        assert_eq!(laguerre(0, 123.0), 1.0);
        assert_eq!(laguerre(1, 3.0), -2.0);
        assert!((laguerre(5, 0.7) - laguerre_coefficients(5, 0.7)).abs() < 1e-12);
    }

    #[test]
    fn laguerre_recurrence_matches_coefficients() {
        for n in 0..=10 {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let a = laguerre(n, x);
                let b = laguerre_coefficients(n, x);
                let scale = b.abs().max(1.0);
                assert!((a - b).abs() <= 1e-10 * scale, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaled_laguerre_matches_plain_recurrence() {
        for &(e, d2) in &[(0.2, 0.09), (1.0, 4.0), (0.05, 2.5)] {
            let u = d2 / (1.0 + e);
            let lr = ln_scaled_laguerre(20, 0, e, u);
            for (k, &l) in lr.iter().enumerate() {
                let direct = e.powi(k as i32) * laguerre(k as u32, -d2 / (e * (1.0 + e)))
                    / (1.0 + e).powi(k as i32);
                assert!(
                    (l.exp() - direct).abs() <= 1e-12 * direct.max(1e-300),
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn scaled_laguerre_coherent_limit() {
        // E = 0: r_k = u^k / k!
        let u = 1.7;
        let lr = ln_scaled_laguerre(12, 0, 0.0, u);
        let mut expect = 1.0;
        for (k, &l) in lr.iter().enumerate() {
            if k > 0 {
                expect *= u / k as f64;
            }
            assert!((l.exp() - expect).abs() < 1e-14 * expect.max(1.0));
        }
        let vac = ln_scaled_laguerre(3, 0, 0.0, 0.0);
        assert_eq!(
            vac,
            vec![0.0, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY]
        );
    }
}
