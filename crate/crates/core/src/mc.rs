//! Seeded Monte Carlo of the full measurement chain.
//!
//! Each trial draws the hypothesis with equal priors, a heterodyne record
//! (or, on the fast path, the squared displacement `x` directly from its
//! gamma law), and an outcome of the chosen receiver on the combined idler.
//! Trial `i` of seed `s` always uses ChaCha8 stream `i` of key `s`, so
//! results do not depend on evaluation order.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Open01, StandardNormal};

use crate::analytic::{
    conditional_helstrom, homodyne_error, homodyne_error_fixed, homodyne_test, p_cd_model,
    photon_count_error, IdlerModel, QuadSettings,
};
use crate::fock::{choose_cutoff, photon_number_pmf, StateSpec};
use crate::protocol::{conditional_params, euclidean_norm, heterodyne_variance, ProtocolParams};
use crate::specfn::{sample_gamma, GammaDensityParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    Absent,
    Present,
}

/// One heterodyne record and the combined displacement it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct HeterodyneRecord {
    pub alphas: Vec<Complex64>,
    pub norm: f64,
    /// `μ_κ²|α|²`, computed with the nominal `κ` whatever the hypothesis.
    pub x: f64,
    pub hypothesis: Hypothesis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HomodyneRule {
    /// Likelihood-ratio test for the record's own `x`.
    PerRecord,
    /// Present iff the quadrature exceeds the threshold.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Receiver {
    /// Present iff the photon count exceeds the threshold.
    PhotonCount(u64),
    Homodyne(HomodyneRule),
    /// Not a sampled measurement: each trial contributes the analytic
    /// Helstrom error for an `x` drawn from the target-present law.
    HelstromOracle(IdlerModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub params: ProtocolParams,
    pub trials: u64,
    pub seed: u64,
    pub receiver: Receiver,
    /// Draw `x` from its gamma law instead of sampling `M` outcomes.
    pub fast_path: bool,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1"));
        }
        if self.params.m == 0 {
            return Err(Error::InvalidParameter("Monte Carlo needs M >= 1"));
        }
        if self.params.kappa > 0.0 && conditional_params(&self.params).e_therm < 0.0 {
            return Err(Error::InvalidParameter(
                "residual idler noise E must be nonnegative",
            ));
        }
        Ok(())
    }
}

/// Independent generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn return_params(p: &ProtocolParams, h: Hypothesis) -> ProtocolParams {
    match h {
        Hypothesis::Present => *p,
        Hypothesis::Absent => p.with_kappa(0.0),
    }
}

/// `M` circular complex Gaussian outcomes with the per-quadrature variance
/// of the hypothesis.
pub fn sample_record<R: RngCore + ?Sized>(
    p: &ProtocolParams,
    h: Hypothesis,
    rng: &mut R,
) -> HeterodyneRecord {
    let sd = heterodyne_variance(&return_params(p, h)).sqrt();
    let alphas: Vec<Complex64> = (0..p.m)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(sd * re, sd * im)
        })
        .collect();
    let norm = euclidean_norm(&alphas);
    let mu = conditional_params(p).mu;
    HeterodyneRecord {
        x: mu * mu * norm * norm,
        norm,
        alphas,
        hypothesis: h,
    }
}

/// Law of `x` under the hypothesis: shape `M`, scale `2μ_κ²σ²`, which is
/// `2ξ_κ` when the target is present.
pub fn x_law(p: &ProtocolParams, h: Hypothesis) -> Result<GammaDensityParams> {
    let mu = conditional_params(p).mu;
    let var = heterodyne_variance(&return_params(p, h));
    GammaDensityParams::new(p.m, 2.0 * mu * mu * var)
}

fn sample_x<R: RngCore + ?Sized>(
    p: &ProtocolParams,
    h: Hypothesis,
    fast: bool,
    rng: &mut R,
) -> Result<f64> {
    if conditional_params(p).mu == 0.0 {
        return Ok(0.0);
    }
    if fast {
        Ok(sample_gamma(x_law(p, h)?, rng))
    } else {
        Ok(sample_record(p, h, rng).x)
    }
}

/// Inverse-CDF draw from a photon-count law.
pub fn sample_count<R: RngCore + ?Sized>(spec: &StateSpec, rng: &mut R) -> Result<u64> {
    let u: f64 = Open01.sample(rng);
    if spec.displacement().norm_sqr() == 0.0 {
        let n = spec.occupancy();
        if n == 0.0 {
            return Ok(0);
        }
        // Geometric law: Pr[count ≥ k] = (n/(n+1))^k.
        return Ok((u.ln() / (n.ln() - n.ln_1p())).floor() as u64);
    }
    let pmf = photon_number_pmf(spec, choose_cutoff(spec)? - 1);
    let mut acc = 0.0;
    for (k, q) in pmf.iter().enumerate() {
        acc += q;
        if u <= acc {
            return Ok(k as u64);
        }
    }
    Ok(pmf.len() as u64)
}

/// Idler handed to the receiver: the displaced thermal state when the
/// target is present, the unconditioned thermal idler otherwise.
fn idler_spec(p: &ProtocolParams, h: Hypothesis, x: f64) -> Result<StateSpec> {
    match h {
        Hypothesis::Present if p.kappa > 0.0 => {
            let e = conditional_params(p).e_therm;
            StateSpec::displaced_thermal(Complex64::from_polar(x.sqrt(), p.theta), e)
        }
        _ => StateSpec::thermal(p.n_s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub hypothesis: Hypothesis,
    pub x: f64,
    pub declared_present: bool,
    /// 0 or 1 for sampled receivers, the analytic error for the oracle.
    pub error: f64,
}

pub fn simulate_trial(cfg: &TrialConfig, index: u64) -> Result<TrialOutcome> {
    let p = &cfg.params;
    let mut rng = trial_rng(cfg.seed, index);
    let h = if rng.next_u32() & 1 == 1 {
        Hypothesis::Present
    } else {
        Hypothesis::Absent
    };
    // The oracle evaluates P_H(x) with x drawn from the target-present law,
    // which is the average the C→D error formula takes.
    let x_hypothesis = match cfg.receiver {
        Receiver::HelstromOracle(_) => Hypothesis::Present,
        _ => h,
    };
    let x = sample_x(p, x_hypothesis, cfg.fast_path, &mut rng)?;
    let declared_present = match cfg.receiver {
        Receiver::PhotonCount(t) => sample_count(&idler_spec(p, h, x)?, &mut rng)? > t,
        Receiver::Homodyne(rule) => {
            let test = homodyne_test(p, x)?;
            let (mean, var) = match h {
                Hypothesis::Present => (test.m1, test.v1),
                Hypothesis::Absent => (0.0, test.v0),
            };
            let y = Normal::new(mean, var.sqrt())
                .map_err(|_| Error::InvalidParameter("homodyne variance"))?
                .sample(&mut rng);
            match rule {
                HomodyneRule::PerRecord => test.declares_present(y),
                HomodyneRule::Fixed(t) => y > t,
            }
        }
        Receiver::HelstromOracle(model) => {
            let e = conditional_helstrom(p, x, model)?;
            return Ok(TrialOutcome {
                hypothesis: h,
                x,
                declared_present: false,
                error: e,
            });
        }
    };
    let wrong = declared_present != (h == Hypothesis::Present);
    Ok(TrialOutcome {
        hypothesis: h,
        x,
        declared_present,
        error: if wrong { 1.0 } else { 0.0 },
    })
}

/// Wilson score interval for `successes` out of `n` at `z` standard scores.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub trials: u64,
    pub absent: u64,
    pub present: u64,
    pub false_alarms: u64,
    pub misses: u64,
    pub empirical_error: f64,
    /// 95% interval: Wilson for sampled receivers, normal for the oracle.
    pub ci95: (f64, f64),
    pub analytic_ref: f64,
}

impl TrialSummary {
    /// `|empirical - analytic|` in units of the binomial standard error at
    /// the analytic value.
    pub fn z_score(&self) -> f64 {
        let p = self.analytic_ref;
        let se = (p * (1.0 - p) / self.trials as f64).sqrt();
        (self.empirical_error - p).abs() / se
    }
}

/// Analytic prediction for the configured receiver.
pub fn analytic_reference(cfg: &TrialConfig, quad: &QuadSettings) -> Result<f64> {
    let p = &cfg.params;
    match cfg.receiver {
        Receiver::PhotonCount(t) => photon_count_error(p, t, quad),
        Receiver::Homodyne(HomodyneRule::PerRecord) => homodyne_error(p, quad),
        Receiver::Homodyne(HomodyneRule::Fixed(t)) => homodyne_error_fixed(p, t, quad),
        Receiver::HelstromOracle(model) => p_cd_model(p, quad, model),
    }
}

/// Folds outcomes, which must be in trial-index order, into a summary.
pub fn summarize(
    cfg: &TrialConfig,
    outcomes: &[TrialOutcome],
    quad: &QuadSettings,
) -> Result<TrialSummary> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("trial outcomes"));
    }
    let n = outcomes.len() as u64;
    let mut absent = 0;
    let mut false_alarms = 0;
    let mut misses = 0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for o in outcomes {
        match o.hypothesis {
            Hypothesis::Absent => {
                absent += 1;
                if o.declared_present {
                    false_alarms += 1;
                }
            }
            Hypothesis::Present => {
                if !o.declared_present {
                    misses += 1;
                }
            }
        }
        sum += o.error;
        sum_sq += o.error * o.error;
    }
    let mean = sum / n as f64;
    let ci95 = match cfg.receiver {
        Receiver::HelstromOracle(_) => {
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            let half = Z95 * (var / n as f64).sqrt();
            (mean - half, mean + half)
        }
        _ => wilson_interval(false_alarms + misses, n, Z95),
    };
    let (false_alarms, misses) = match cfg.receiver {
        Receiver::HelstromOracle(_) => (0, 0),
        _ => (false_alarms, misses),
    };
    Ok(TrialSummary {
        trials: n,
        absent,
        present: n - absent,
        false_alarms,
        misses,
        empirical_error: mean,
        ci95,
        analytic_ref: analytic_reference(cfg, quad)?,
    })
}

/// Sequential driver; callers wanting parallelism map [`simulate_trial`]
/// over indices themselves and pass the ordered results to [`summarize`].
pub fn run_trials(cfg: &TrialConfig, quad: &QuadSettings) -> Result<TrialSummary> {
    cfg.validate()?;
    let outcomes = (0..cfg.trials)
        .map(|i| simulate_trial(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    summarize(cfg, &outcomes, quad)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: FnMut(f64) -> f64>(samples: &[f64], mut cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    d
}

/// Asymptotic one-sample KS critical value, `√(-ln(α/2)/2)/√n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
