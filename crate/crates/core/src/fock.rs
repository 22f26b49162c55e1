//! Truncated Fock-space states and minimum-error discrimination.
//!
//! Every state the receiver has to discriminate is single-mode: a thermal
//! state, a coherent state, or a displaced thermal state. They are stored as
//! dense density matrices in the photon-number basis, truncated at a cutoff
//! chosen so that the discarded trace stays below [`TRUNCATION_BUDGET`].
//!
//! Displaced-thermal matrices can be built two ways: by conjugating the
//! thermal diagonal with a displacement operator obtained from a matrix
//! exponential ([`build_state`]), or directly from the generalized Laguerre
//! closed form ([`build_state_closed_form`]). The two routes are independent
//! and are checked against each other in the tests.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::linalg::{hermitian_eigen, hermitian_eigenvalues};
use crate::specfn::{ln_gamma, ln_scaled_laguerre};
use crate::{Error, Result};

/// Largest trace deficit a truncated state may carry.
pub const TRUNCATION_BUDGET: f64 = 1e-8;

/// Eigenvalues above this floor count as zero when checking positivity.
pub const EIGEN_FLOOR: f64 = -1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
/// Tail mass left outside an automatically chosen cutoff.
const TAIL_TARGET: f64 = TRUNCATION_BUDGET * 1e-3;
const MAX_CUTOFF: usize = 8192;

/// Dense density matrix in the photon-number basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl FockMatrix {
    /// Wraps a row-major buffer after checking Hermiticity and trace.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("cutoff must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i].conj();
                if (a - b).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidParameter("density matrix is not Hermitian"));
                }
            }
        }
        let m = Self { dim, entries };
        m.check_trace()?;
        Ok(m)
    }

    /// Diagonal matrix with the given photon-number probabilities.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let dim = probs.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (n, &p) in probs.iter().enumerate() {
            entries[n * dim + n] = Complex64::new(p, 0.0);
        }
        Self::new(dim, entries)
    }

    fn check_trace(&self) -> Result<()> {
        let t = self.trace();
        let deficit = 1.0 - t;
        if deficit.is_nan() || deficit > TRUNCATION_BUDGET || t > 1.0 + 1e-10 {
            return Err(Error::Truncation {
                cutoff: self.dim,
                deficit,
            });
        }
        Ok(())
    }

    pub fn cutoff(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.dim + n]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.entry(n, n).re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|n| self.entry(n, n).re).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim)
                .all(|j| i == j || self.entries[i * self.dim + j] == Complex64::new(0.0, 0.0))
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(self.dim, &self.entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Positive semidefiniteness down to [`EIGEN_FLOOR`].
    pub fn check_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidParameter(
                "density matrix has a negative eigenvalue",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Thermal,
    Coherent,
    DisplacedThermal,
}

/// A single-mode Gaussian state: displacement `d` on top of a thermal state
/// with mean occupancy `occupancy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    kind: StateKind,
    displacement: Complex64,
    occupancy: f64,
}

impl StateSpec {
    pub fn thermal(occupancy: f64) -> Result<Self> {
        check_occupancy(occupancy)?;
        Ok(Self {
            kind: StateKind::Thermal,
            displacement: Complex64::new(0.0, 0.0),
            occupancy,
        })
    }

    pub fn coherent(displacement: Complex64) -> Result<Self> {
        check_displacement(displacement)?;
        Ok(Self {
            kind: StateKind::Coherent,
            displacement,
            occupancy: 0.0,
        })
    }

    pub fn displaced_thermal(displacement: Complex64, occupancy: f64) -> Result<Self> {
        check_occupancy(occupancy)?;
        check_displacement(displacement)?;
        Ok(Self {
            kind: StateKind::DisplacedThermal,
            displacement,
            occupancy,
        })
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn displacement(&self) -> Complex64 {
        self.displacement
    }

    pub fn occupancy(&self) -> f64 {
        self.occupancy
    }

    pub fn mean_photons(&self) -> f64 {
        self.displacement.norm_sqr() + self.occupancy
    }
}

fn check_occupancy(n: f64) -> Result<()> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(
            "thermal occupancy must be finite and nonnegative",
        ));
    }
    Ok(())
}

fn check_displacement(d: Complex64) -> Result<()> {
    if !(d.re.is_finite() && d.im.is_finite()) {
        return Err(Error::InvalidParameter("displacement must be finite"));
    }
    Ok(())
}

/// Photon-count probabilities `p_0..=p_{n_max}`.
///
/// Thermal states follow the geometric law; displaced states use the
/// Laguerre closed form
/// `p_n = E^n/(E+1)^{n+1} · e^{-|d|²/(E+1)} · L_n(-|d|²/(E(E+1)))`,
/// evaluated through [`ln_scaled_laguerre`] so that `E = 0` reduces to the
/// Poisson law.
pub fn photon_number_pmf(spec: &StateSpec, n_max: usize) -> Vec<f64> {
    let e = spec.occupancy;
    let d2 = spec.displacement.norm_sqr();
    if d2 == 0.0 {
        return thermal_pmf(e, n_max);
    }
    let u = d2 / (1.0 + e);
    let base = -e.ln_1p() - u;
    ln_scaled_laguerre(n_max, 0, e, u)
        .into_iter()
        .map(|l| (l + base).exp())
        .collect()
}

fn thermal_pmf(occupancy: f64, n_max: usize) -> Vec<f64> {
    if occupancy == 0.0 {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        return p;
    }
    let ln_ratio = occupancy.ln() - occupancy.ln_1p();
    let ln_norm = -occupancy.ln_1p();
    (0..=n_max)
        .map(|n| (n as f64 * ln_ratio + ln_norm).exp())
        .collect()
}

/// Cutoff covering the photon-number distribution of `spec`.
///
/// Starts from `⌈n̄ + 10√n̄ + 20⌉` (`n̄ = |d|² + occupancy`) and grows it
/// until the tail beyond the cutoff is below a thousandth of the truncation
/// budget. The tail check matters for bright thermal states, whose
/// geometric tail is much longer than ten standard deviations of a Poisson.
pub fn choose_cutoff(spec: &StateSpec) -> Result<usize> {
    let nbar = spec.mean_photons();
    let base = (nbar + 10.0 * nbar.sqrt() + 20.0).ceil() as usize;
    let mut n_max = base.max(32);
    loop {
        if n_max > MAX_CUTOFF {
            return Err(Error::NonConvergence("Fock cutoff ladder"));
        }
        let pmf = photon_number_pmf(spec, n_max);
        let mut acc = 0.0;
        for (k, p) in pmf.iter().enumerate() {
            acc += p;
            if 1.0 - acc <= TAIL_TARGET {
                return Ok(base.max(k + 1));
            }
        }
        n_max *= 2;
    }
}

/// Density matrix by displacement conjugation: `D(d) ρ_th D(d)†`.
///
/// `D(d) = exp(d a† - d* a)` is exponentiated on a padded space through the
/// eigendecomposition of the Hermitian generator `i(d a† - d* a)`, then the
/// result is cut back to `cutoff`. The padding scales with the spread of the
/// displaced number states so that edge effects of the truncated generator
/// never reach the retained block.
pub fn build_state(spec: &StateSpec, cutoff: usize) -> Result<FockMatrix> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive"));
    }
    let d = spec.displacement;
    if spec.kind == StateKind::Thermal || d.norm_sqr() == 0.0 {
        return FockMatrix::from_diagonal(&thermal_pmf(spec.occupancy, cutoff - 1));
    }
    let amp = d.norm();
    let pad = 10 + (amp * amp + 6.0 * amp * ((2 * cutoff + 1) as f64).sqrt()).ceil() as usize;
    let big = cutoff + pad;

    // H = i(d a† - d* a): H[n+1][n] = i d √(n+1), H[n][n+1] = conj.
    let mut gen = vec![Complex64::new(0.0, 0.0); big * big];
    let i_unit = Complex64::new(0.0, 1.0);
    for n in 0..big - 1 {
        let s = ((n + 1) as f64).sqrt();
        let lower = i_unit * d * s;
        gen[(n + 1) * big + n] = lower;
        gen[n * big + n + 1] = lower.conj();
    }
    let (lambda, vecs) = hermitian_eigen(big, &gen);
    let phases: Vec<Complex64> = lambda
        .iter()
        .map(|&l| Complex64::new(0.0, -l).exp())
        .collect();

    // Rows 0..cutoff of D = V diag(e^{-iλ}) V†.
    let mut disp = vec![Complex64::new(0.0, 0.0); cutoff * big];
    for i in 0..cutoff {
        for n in 0..big {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..big {
                acc += vecs[i * big + k] * phases[k] * vecs[n * big + k].conj();
            }
            disp[i * big + n] = acc;
        }
    }

    let weights = thermal_pmf(spec.occupancy, big - 1);
    let mut entries = vec![Complex64::new(0.0, 0.0); cutoff * cutoff];
    for i in 0..cutoff {
        for j in i..cutoff {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                acc += disp[i * big + n] * disp[j * big + n].conj() * w;
            }
            entries[i * cutoff + j] = acc;
            entries[j * cutoff + i] = acc.conj();
        }
        entries[i * cutoff + i].im = 0.0;
    }
    FockMatrix::new(cutoff, entries)
}

/// Density matrix from the generalized Laguerre closed form: for `m ≥ n`,
///
/// `ρ_mn = E^n/(1+E)^{m+1} · √(n!/m!) · d^{m-n} · e^{-|d|²/(1+E)} · L_n^{(m-n)}(-|d|²/(E(1+E)))`.
pub fn build_state_closed_form(spec: &StateSpec, cutoff: usize) -> Result<FockMatrix> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive"));
    }
    let d = spec.displacement;
    let e = spec.occupancy;
    let d2 = d.norm_sqr();
    if d2 == 0.0 {
        return FockMatrix::from_diagonal(&thermal_pmf(e, cutoff - 1));
    }
    let u = d2 / (1.0 + e);
    let ln_amp = d2.sqrt().ln();
    let unit = d / d2.sqrt();
    let ln_one_e = e.ln_1p();
    let ln_fact: Vec<f64> = (0..cutoff).map(|k| ln_gamma(k as f64 + 1.0)).collect();

    let mut entries = vec![Complex64::new(0.0, 0.0); cutoff * cutoff];
    for offset in 0..cutoff {
        let lr = ln_scaled_laguerre(cutoff - 1 - offset, offset, e, u);
        let a = offset as f64;
        // Integer powers keep real displacements exactly real.
        let phase = unit.powi(offset as i32);
        for (n, &l) in lr.iter().enumerate() {
            let m = n + offset;
            let ln_mag =
                l - (a + 1.0) * ln_one_e + 0.5 * (ln_fact[n] - ln_fact[m]) + a * ln_amp - u;
            let val = phase * ln_mag.exp();
            entries[m * cutoff + n] = val;
            entries[n * cutoff + m] = val.conj();
        }
    }
    for n in 0..cutoff {
        entries[n * cutoff + n].im = 0.0;
    }
    FockMatrix::new(cutoff, entries)
}

/// Removes every coherence, keeping the photon-number diagonal.
pub fn dephase(rho: &FockMatrix) -> FockMatrix {
    let dim = rho.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        entries[n * dim + n] = rho.entries[n * dim + n];
    }
    FockMatrix { dim, entries }
}

/// `‖ρ₀ - ρ₁‖₁` from the eigenvalues of the Hermitian difference.
pub fn trace_norm_difference(rho0: &FockMatrix, rho1: &FockMatrix) -> Result<f64> {
    if rho0.dim != rho1.dim {
        return Err(Error::DimensionMismatch {
            left: rho0.dim,
            right: rho1.dim,
        });
    }
    if rho0.is_diagonal() && rho1.is_diagonal() {
        return Ok((0..rho0.dim)
            .map(|n| (rho0.entry(n, n).re - rho1.entry(n, n).re).abs())
            .sum());
    }
    let diff: Vec<Complex64> = rho0
        .entries
        .iter()
        .zip(&rho1.entries)
        .map(|(a, b)| a - b)
        .collect();
    Ok(hermitian_eigenvalues(rho0.dim, &diff)
        .into_iter()
        .map(f64::abs)
        .sum())
}

/// Minimum error probability for equal priors, `½(1 - ½‖ρ₀ - ρ₁‖₁)`.
///
/// Written as `¼(tr ρ₀ + tr ρ₁ - ‖ρ₀ - ρ₁‖₁)` so that truncated states are
/// treated as the sub-normalized measures they are; for diagonal pairs this
/// is exactly `½ Σ min(p₀, p₁)`, which keeps relative accuracy for tiny
/// error probabilities.
pub fn helstrom(rho0: &FockMatrix, rho1: &FockMatrix) -> Result<f64> {
    if rho0.dim != rho1.dim {
        return Err(Error::DimensionMismatch {
            left: rho0.dim,
            right: rho1.dim,
        });
    }
    if rho0.is_diagonal() && rho1.is_diagonal() {
        return Ok(helstrom_diagonal(&rho0.diagonal(), &rho1.diagonal()));
    }
    let norm = trace_norm_difference(rho0, rho1)?;
    let p = 0.25 * (rho0.trace() + rho1.trace() - norm);
    Ok(p.clamp(0.0, 0.5))
}

/// Helstrom error between two photon-count distributions, `½ Σ min(p₀, p₁)`.
/// Missing entries count as zero.
pub fn helstrom_diagonal(p0: &[f64], p1: &[f64]) -> f64 {
    let n = p0.len().max(p1.len());
    let at = |p: &[f64], k: usize| p.get(k).copied().unwrap_or(0.0);
    let s: f64 = (0..n).map(|k| at(p0, k).min(at(p1, k))).sum();
    (0.5 * s).clamp(0.0, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed(spec: StateSpec) -> FockMatrix {
        let k = choose_cutoff(&spec).unwrap();
        build_state_closed_form(&spec, k).unwrap()
    }

    #[test]
    fn vacuum_projector() {
        let s = StateSpec::thermal(0.0).unwrap();
        let rho = build_state(&s, 5).unwrap();
        assert_eq!(rho.entry(0, 0), c(1.0, 0.0));
        let rest: f64 = rho.entries().iter().skip(1).map(|z| z.norm()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn thermal_geometric_law() {
        let n = 0.7;
        let s = StateSpec::thermal(n).unwrap();
        let k = choose_cutoff(&s).unwrap();
        let rho = build_state(&s, k).unwrap();
        for m in 0..10 {
            let expect = n.powi(m as i32) / (n + 1.0).powi(m as i32 + 1);
            assert!((rho.entry(m, m).re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn displaced_thermal_diagonal_matches_laguerre() {
        let s = StateSpec::displaced_thermal(c(0.3, 0.0), 0.2).unwrap();
        let rho = build_state(&s, 40).unwrap();
        let (d2, e) = (0.09, 0.2);
        for n in 0..40 {
            let expect = e.powi(n as i32) / (e + 1.0).powi(n as i32 + 1)
                * (-d2 / (e + 1.0)).exp()
                * crate::specfn::laguerre(n as u32, -d2 / (e * (e + 1.0)));
            assert!((rho.entry(n, n).re - expect).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn conjugation_matches_closed_form_entrywise() {
        for &(d, e) in &[
            (c(0.3, 0.0), 0.2),
            (c(1.2, -0.7), 0.5),
            (c(0.0, 3.0), 1.0),
            (c(2.1, 2.1), 0.0),
        ] {
            let s = StateSpec::displaced_thermal(d, e).unwrap();
            let k = choose_cutoff(&s).unwrap();
            let a = build_state(&s, k).unwrap();
            let b = build_state_closed_form(&s, k).unwrap();
            let worst = a
                .entries()
                .iter()
                .zip(b.entries())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "d={d} E={e}: {worst:e}");
        }
    }

    #[test]
    fn cutoff_too_small_is_reported() {
        let s = StateSpec::displaced_thermal(c(3.0, 0.0), 1.0).unwrap();
        match build_state_closed_form(&s, 8) {
            Err(Error::Truncation { cutoff, .. }) => assert_eq!(cutoff, 8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn bright_thermal_cutoff_covers_tail() {
        let s = StateSpec::thermal(20.0).unwrap();
        let k = choose_cutoff(&s).unwrap();
        let tail = (20.0f64 / 21.0).powi(k as i32);
        assert!(tail <= TAIL_TARGET * 1.0001, "k={k} tail={tail:e}");
    }

    #[test]
    fn built_states_are_positive() {
        let s = StateSpec::displaced_thermal(c(0.8, 0.4), 0.3).unwrap();
        closed(s).check_positive().unwrap();
    }

    #[test]
    fn identical_states_are_indistinguishable() {
        let rho = closed(StateSpec::displaced_thermal(c(0.5, 0.1), 0.1).unwrap());
        assert!((helstrom(&rho, &rho).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn vacuum_vs_coherent_pure_state_formula() {
        for x in [0.25, 1.0, 2.0, 5.0] {
            let amp = c(f64::sqrt(x), 0.0);
            let coh = StateSpec::coherent(amp).unwrap();
            let k = choose_cutoff(&coh).unwrap();
            let vac = build_state(&StateSpec::thermal(0.0).unwrap(), k).unwrap();
            let rho = build_state_closed_form(&coh, k).unwrap();
            let expect = 0.5 * (1.0 - (1.0 - (-x).exp()).sqrt());
            assert!(
                (helstrom(&vac, &rho).unwrap() - expect).abs() < 1e-9,
                "x={x}"
            );
        }
        let coh = StateSpec::coherent(c(1.0, 0.0)).unwrap();
        let k = choose_cutoff(&coh).unwrap();
        let vac = build_state(&StateSpec::thermal(0.0).unwrap(), k).unwrap();
        let p = helstrom(&vac, &build_state_closed_form(&coh, k).unwrap()).unwrap();
        assert!((p - 0.102470).abs() < 1e-6);
    }

    #[test]
    fn vacuum_vs_dephased_coherent() {
        let coh = StateSpec::coherent(c(1.0, 0.0)).unwrap();
        let k = choose_cutoff(&coh).unwrap();
        let vac = build_state(&StateSpec::thermal(0.0).unwrap(), k).unwrap();
        let rho = dephase(&build_state_closed_form(&coh, k).unwrap());
        let p = helstrom(&vac, &rho).unwrap();
        assert!((p - (-1.0f64).exp() / 2.0).abs() < 1e-12);
        assert!((p - 0.183940).abs() < 1e-6);
    }

    #[test]
    fn dephase_is_idempotent_and_keeps_diagonal() {
        let th = closed(StateSpec::thermal(0.4).unwrap());
        assert_eq!(dephase(&th), th);
        let rho = closed(StateSpec::coherent(c(1.0, 0.0)).unwrap());
        let dep = dephase(&rho);
        let mut fact = 1.0;
        for n in 0..10 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((dep.entry(n, n).re - (-1.0f64).exp() / fact).abs() < 1e-14);
        }
        assert_eq!(dep.diagonal(), rho.diagonal());
    }

    #[test]
    fn dephased_diagonal_matches_pmf() {
        let s = StateSpec::displaced_thermal(c(0.5, 0.0), 0.1).unwrap();
        let k = choose_cutoff(&s).unwrap();
        let dep = dephase(&build_state(&s, k).unwrap());
        let pmf = photon_number_pmf(&s, k - 1);
        for (n, q) in pmf.iter().enumerate() {
            assert!((dep.entry(n, n).re - q).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn pmf_limits() {
        let d = c(0.6, -0.8);
        let coh = photon_number_pmf(&StateSpec::coherent(d).unwrap(), 15);
        let mut term = (-1.0f64).exp();
        for (n, p) in coh.iter().enumerate() {
            if n > 0 {
                term *= 1.0 / n as f64;
            }
            assert!((p - term).abs() < 1e-15);
        }
        let th = photon_number_pmf(&StateSpec::thermal(0.3).unwrap(), 15);
        for (n, p) in th.iter().enumerate() {
            let expect = 0.3f64.powi(n as i32) / 1.3f64.powi(n as i32 + 1);
            assert!((p - expect).abs() < 1e-15);
        }
        let s = StateSpec::displaced_thermal(c(0.3, 0.0), 0.2).unwrap();
        let pmf = photon_number_pmf(&s, 39);
        let rho = build_state(&s, 40).unwrap();
        for (n, q) in pmf.iter().enumerate() {
            assert!((q - rho.entry(n, n).re).abs() < 1e-10);
        }
        assert!(pmf.iter().sum::<f64>() <= 1.0 + 1e-15);
    }

    #[test]
    fn helstrom_phase_covariance() {
        let rho0 = StateSpec::thermal(0.05).unwrap();
        for &(amp, e) in &[(0.7, 0.03), (1.5, 0.2)] {
            let reference = {
                let s = StateSpec::displaced_thermal(c(amp, 0.0), e).unwrap();
                let k = choose_cutoff(&s).unwrap();
                helstrom(
                    &build_state(&rho0, k).unwrap(),
                    &build_state_closed_form(&s, k).unwrap(),
                )
                .unwrap()
            };
            for phi in [0.0, PI / 3.0, PI] {
                let s = StateSpec::displaced_thermal(Complex64::from_polar(amp, phi), e).unwrap();
                let k = choose_cutoff(&s).unwrap();
                let p = helstrom(
                    &build_state(&rho0, k).unwrap(),
                    &build_state_closed_form(&s, k).unwrap(),
                )
                .unwrap();
                assert!((p - reference).abs() < 1e-10, "phi={phi}");
            }
        }
    }

    #[test]
    fn small_brightness_helstrom_tracks_quarter_exponential() {
        for &x in &[2.0, 4.0, 6.0, 8.0] {
            let s = StateSpec::displaced_thermal(c(f64::sqrt(x), 0.0), 1e-3).unwrap();
            let k = choose_cutoff(&s).unwrap();
            let r0 = build_state(&StateSpec::thermal(1e-3).unwrap(), k).unwrap();
            let p = helstrom(&r0, &build_state_closed_form(&s, k).unwrap()).unwrap();
            let env = (-x).exp() / 4.0;
            assert!(p >= 0.5 * env && p <= 2.0 * env, "x={x}: {p} vs {env}");
        }
    }

    #[test]
    fn cutoff_doubling_is_converged() {
        let s = StateSpec::displaced_thermal(c(1.3, 0.0), 0.01).unwrap();
        let th = StateSpec::thermal(0.01).unwrap();
        let k = choose_cutoff(&s).unwrap();
        let p = |k| {
            helstrom(
                &build_state(&th, k).unwrap(),
                &build_state_closed_form(&s, k).unwrap(),
            )
            .unwrap()
        };
        assert!((p(k) - p(2 * k)).abs() <= 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = build_state(&StateSpec::thermal(0.0).unwrap(), 4).unwrap();
        let b = build_state(&StateSpec::thermal(0.0).unwrap(), 5).unwrap();
        assert!(matches!(
            helstrom(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
