//! Error curves over a grid of mode counts and their error exponents.

use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use super::bounds::{p_ci, p_ng};
use super::cd::{p_cd, p_cd_dephased};
use super::counting::best_threshold;
use super::mixture::QuadSettings;
use crate::protocol::{conditional_params, ProtocolParams};
use crate::{Error, Result};

/// Printed classical-illumination exponent `κN_S/4N_B`.
pub fn ci_exponent(p: &ProtocolParams) -> f64 {
    p.kappa * p.n_s / (4.0 * p.n_b)
}

/// Asymptotic C→D exponent `2ξ_κ`.
pub fn cd_exponent(p: &ProtocolParams) -> f64 {
    2.0 * conditional_params(p).xi
}

/// `10·log10(2ξ_κ / r_CI) = 10·log10(4N_B(N_S+1)/(κN_S+N_B+1))`.
pub fn asymptotic_ratio_db(p: &ProtocolParams) -> f64 {
    10.0 * (4.0 * p.n_b * (p.n_s + 1.0) / (p.return_photons() + 1.0)).log10()
}

/// Log-spaced integer grid from `m_min` to `m_max` inclusive, duplicates
/// removed.
pub fn log_grid(m_min: u64, m_max: u64, per_decade: u32) -> Result<Vec<u64>> {
    if m_min == 0 || m_min >= m_max {
        return Err(Error::InvalidParameter("grid needs 0 < m_min < m_max"));
    }
    if per_decade < 4 {
        return Err(Error::InvalidParameter(
            "grid needs at least 4 points per decade",
        ));
    }
    let (lo, hi) = ((m_min as f64).log10(), (m_max as f64).log10());
    let steps = ((hi - lo) * per_decade as f64).ceil() as usize;
    let mut out: Vec<u64> = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = (lo + (hi - lo) * k as f64 / steps as f64).min(hi);
        let m = (10f64.powf(t).round() as u64).clamp(m_min, m_max);
        if out.last() != Some(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// `d f/d x` on a nonuniform grid, second order everywhere: centered
/// three-point stencils inside, one-sided three-point stencils at the ends.
pub fn derivative(xs: &[f64], fs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n != fs.len() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: fs.len(),
        });
    }
    if n < 3 {
        return Err(Error::InvalidParameter(
            "derivative needs at least 3 grid points",
        ));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("grid must be strictly increasing"));
    }
    let mut out = Vec::with_capacity(n);
    {
        let (h1, h2) = (xs[1] - xs[0], xs[2] - xs[1]);
        out.push(
            -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * fs[0] + (h1 + h2) / (h1 * h2) * fs[1]
                - h1 / (h2 * (h1 + h2)) * fs[2],
        );
    }
    for i in 1..n - 1 {
        let (h1, h2) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        out.push(
            -h2 / (h1 * (h1 + h2)) * fs[i - 1]
                + (h2 - h1) / (h1 * h2) * fs[i]
                + h1 / (h2 * (h1 + h2)) * fs[i + 1],
        );
    }
    {
        let (h1, h2) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
        out.push(
            h2 / (h1 * (h1 + h2)) * fs[n - 3] - (h1 + h2) / (h1 * h2) * fs[n - 2]
                + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * fs[n - 1],
        );
    }
    Ok(out)
}

/// `-d ln P/dM` along a grid.
pub fn exponent(ms: &[u64], ps: &[f64]) -> Result<Vec<f64>> {
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let ln: Vec<f64> = ps.iter().map(|p| p.ln()).collect();
    Ok(derivative(&xs, &ln)?.into_iter().map(|d| -d).collect())
}

/// All error probabilities at one mode count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    pub m: u64,
    pub p_cd: f64,
    pub p_cd_dephased: f64,
    pub p_ng: f64,
    pub p_ci: f64,
    /// Photon counting with the best integer threshold.
    pub p_count: f64,
    pub count_threshold: u64,
}

pub fn error_point(
    p: &ProtocolParams,
    quad: &QuadSettings,
    ci_cutoff: Option<usize>,
) -> Result<ErrorPoint> {
    let (count_threshold, p_count) = best_threshold(p, quad)?;
    Ok(ErrorPoint {
        m: p.m,
        p_cd: p_cd(p, quad)?,
        p_cd_dephased: p_cd_dephased(p, quad)?,
        p_ng: p_ng(p)?.value,
        p_ci: p_ci(p, ci_cutoff)?,
        p_count,
        count_threshold,
    })
}

/// Column-oriented error curve. Exponent columns are filled by
/// [`error_exponents`]; until then they are empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorCurve {
    pub m_grid: Vec<u64>,
    pub p_cd: Vec<f64>,
    pub p_cd_dephased: Vec<f64>,
    pub p_ng: Vec<f64>,
    pub p_ci: Vec<f64>,
    pub p_count: Vec<f64>,
    pub count_threshold: Vec<u64>,
    pub r_cd: Vec<f64>,
    pub r_cd_dephased: Vec<f64>,
    pub r_ci: Vec<f64>,
    pub ratio_db: Vec<f64>,
    pub ratio_db_dephased: Vec<f64>,
}

impl ErrorCurve {
    pub fn from_points(points: &[ErrorPoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("error curve"));
        }
        if points.windows(2).any(|w| w[1].m <= w[0].m) {
            return Err(Error::InvalidParameter("grid must be strictly increasing"));
        }
        let col = |f: fn(&ErrorPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
        Ok(Self {
            m_grid: points.iter().map(|q| q.m).collect(),
            p_cd: col(|q| q.p_cd),
            p_cd_dephased: col(|q| q.p_cd_dephased),
            p_ng: col(|q| q.p_ng),
            p_ci: col(|q| q.p_ci),
            p_count: col(|q| q.p_count),
            count_threshold: points.iter().map(|q| q.count_threshold).collect(),
            ..Self::default()
        })
    }

    pub fn len(&self) -> usize {
        self.m_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_grid.is_empty()
    }
}

fn ratio_db(r: &[f64], r_ci: f64) -> Vec<f64> {
    r.iter().map(|&v| 10.0 * (v / r_ci).log10()).collect()
}

/// Fills `r_cd = -d ln P_CD/dM` (both idler models), `r_ci` with the printed
/// constant, and the dB ratios.
pub fn error_exponents(mut curve: ErrorCurve, r_ci: f64) -> Result<ErrorCurve> {
    curve.r_cd = exponent(&curve.m_grid, &curve.p_cd)?;
    curve.r_cd_dephased = exponent(&curve.m_grid, &curve.p_cd_dephased)?;
    curve.r_ci = alloc::vec![r_ci; curve.len()];
    curve.ratio_db = ratio_db(&curve.r_cd, r_ci);
    curve.ratio_db_dephased = ratio_db(&curve.r_cd_dephased, r_ci);
    Ok(curve)
}

/// Exponent of `P` at `m` from a local three-point stencil `m·e^{±h}`.
pub fn local_exponent<F>(m: u64, h: f64, mut prob: F) -> Result<f64>
where
    F: FnMut(u64) -> Result<f64>,
{
    let ms = [
        (m as f64 * (-h).exp()).round() as u64,
        m,
        (m as f64 * h.exp()).round() as u64,
    ];
    let ps = [prob(ms[0])?, prob(ms[1])?, prob(ms[2])?];
    Ok(exponent(&ms, &ps)?[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_exponentials() {
        let ms = log_grid(1000, 1_000_000, 50).unwrap();
        let c = 3.7e-6;
        let ps: Vec<f64> = ms.iter().map(|&m| 0.25 * (-c * m as f64).exp()).collect();
        for r in exponent(&ms, &ps).unwrap() {
            assert!((r / c - 1.0).abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn derivative_exact_for_quadratics() {
        let xs = [0.0, 0.3, 1.1, 1.5, 4.0];
        let fs: Vec<f64> = xs.iter().map(|x| 2.0 * x * x - x + 5.0).collect();
        for (x, d) in xs.iter().zip(derivative(&xs, &fs).unwrap()) {
            assert!((d - (4.0 * x - 1.0)).abs() < 1e-12);
        }
        assert!(derivative(&xs[..2], &fs[..2]).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = log_grid(1000, 100_000, 50).unwrap();
        assert_eq!((g[0], *g.last().unwrap()), (1000, 100_000));
        assert_eq!(g.len(), 101);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(10, 10, 50).is_err());
        assert!(log_grid(1, 10, 3).is_err());
        assert_eq!(log_grid(1, 3, 4).unwrap(), [1, 2, 3]);
    }

    #[test]
    fn asymptotic_ratio_value() {
        let p = ProtocolParams::default();
        assert!((asymptotic_ratio_db(&p) - 5.81305).abs() < 1e-5);
        let direct = 10.0 * (cd_exponent(&p) / ci_exponent(&p)).log10();
        assert!((asymptotic_ratio_db(&p) - direct).abs() < 1e-10);
    }

    #[test]
    fn curve_requires_increasing_grid() {
        let pt = ErrorPoint {
            m: 5,
            p_cd: 0.4,
            p_cd_dephased: 0.4,
            p_ng: 0.2,
            p_ci: 0.45,
            p_count: 0.45,
            count_threshold: 0,
        };
        assert!(ErrorCurve::from_points(&[pt, pt]).is_err());
        assert!(ErrorCurve::from_points(&[]).is_err());
        let c = ErrorCurve::from_points(&[pt, ErrorPoint { m: 6, ..pt }]).unwrap();
        assert_eq!(c.len(), 2);
        assert!(error_exponents(c, 1.0).is_err());
    }
}
