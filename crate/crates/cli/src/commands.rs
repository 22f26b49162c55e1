//! Subcommand bodies. Each returns its data and leaves file output to the
//! caller, so tests can check results without touching the disk.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use qillum_core::analytic::{
    asymptotic_ratio_db, cd_exponent, ci_exponent, error_exponents, error_point, local_exponent,
    log_grid, optimal_threshold, p_cd_model, ErrorCurve, IdlerModel,
};
use qillum_core::mc::{simulate_trial, summarize, TrialConfig, TrialSummary};
use qillum_core::qpg::{crosstalk_bound, selectivity_report, transfer, QpgSpec, SelectivityReport};
use qillum_core::source::{
    bandwidth_from_mismatch, bogoliubov, coupling_for_brightness, mode_count, BandwidthEstimate,
    BogoliubovPair, ModeCount, SourceSpec,
};
use qillum_core::Complex64;

use crate::config::{ReceiverKind, RunConfig};
use crate::error::CliResult;
use crate::output::{real, Table};
use crate::svg::{render, Marker, Panel, Series};

/// Column names of the error-curve CSV: the fixed schema, then the
/// photon-number-diagonal idler columns and the counting threshold.
pub const ERROR_CURVE_HEADER: &[&str] = &[
    "M",
    "p_cd",
    "p_ng",
    "p_ci",
    "p_count",
    "r_cd",
    "r_ci",
    "ratio_db",
    "p_cd_dephased",
    "r_cd_dephased",
    "ratio_db_dephased",
    "count_threshold",
];

pub fn grid(cfg: &RunConfig) -> CliResult<Vec<u64>> {
    match &cfg.grid.m_values {
        Some(ms) => Ok(ms.clone()),
        None => Ok(log_grid(
            cfg.grid.m_min,
            cfg.grid.m_max,
            cfg.grid.points_per_decade,
        )?),
    }
}

/// Evaluates every curve on the grid in parallel. `log` receives one line
/// per grid point, in completion order.
pub fn error_curves(cfg: &RunConfig, log: &(dyn Fn(&str) + Sync)) -> CliResult<ErrorCurve> {
    let ms = grid(cfg)?;
    let quad = cfg.numerics.quad();
    let cutoff = cfg.numerics.cutoff_override;
    let points = ms
        .par_iter()
        .map(|&m| {
            let start = Instant::now();
            let pt = error_point(&cfg.scenario.with_m(m), &quad, cutoff)?;
            log(&format!(
                "M = {m}: p_cd = {:.6e}, p_cd_dephased = {:.6e}, p_ci = {:.6e} ({:.2} s)",
                pt.p_cd,
                pt.p_cd_dephased,
                pt.p_ci,
                start.elapsed().as_secs_f64()
            ));
            Ok(pt)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let curve = ErrorCurve::from_points(&points)?;
    if curve.len() < 3 {
        // Exponents need three points; report them as undefined.
        let nan = vec![f64::NAN; curve.len()];
        return Ok(ErrorCurve {
            r_cd: nan.clone(),
            r_cd_dephased: nan.clone(),
            r_ci: vec![ci_exponent(&cfg.scenario); curve.len()],
            ratio_db: nan.clone(),
            ratio_db_dephased: nan,
            ..curve
        });
    }
    Ok(error_exponents(curve, ci_exponent(&cfg.scenario))?)
}

pub fn error_curves_table(c: &ErrorCurve) -> Table {
    let mut t = Table::new(ERROR_CURVE_HEADER);
    for i in 0..c.len() {
        t.push(vec![
            c.m_grid[i].to_string(),
            real(c.p_cd[i]),
            real(c.p_ng[i]),
            real(c.p_ci[i]),
            real(c.p_count[i]),
            real(c.r_cd[i]),
            real(c.r_ci[i]),
            real(c.ratio_db[i]),
            real(c.p_cd_dephased[i]),
            real(c.r_cd_dephased[i]),
            real(c.ratio_db_dephased[i]),
            c.count_threshold[i].to_string(),
        ]);
    }
    t
}

/// `ε/2ξ_κ`, where the counting threshold first leaves zero; `None` when
/// the formula does not apply.
pub fn threshold_marker(cfg: &RunConfig) -> Option<f64> {
    let plan = optimal_threshold(&cfg.scenario, &cfg.numerics.quad()).ok()?;
    plan.m_star.is_finite().then_some(plan.m_star)
}

pub fn error_curves_svg(c: &ErrorCurve, cfg: &RunConfig) -> String {
    let ms: Vec<f64> = c.m_grid.iter().map(|&m| m as f64).collect();
    let series = |label: &str, color: &'static str, dashed: bool, ys: &[f64]| Series {
        label: label.into(),
        color,
        dashed,
        points: ms.iter().copied().zip(ys.iter().copied()).collect(),
    };
    let mut markers = vec![Marker {
        x: cfg.scenario.m as f64,
        label: format!("M = {}", cfg.scenario.m),
    }];
    if let Some(m) = threshold_marker(cfg) {
        markers.push(Marker {
            x: m,
            label: format!("eps/2xi = {m:.3e}"),
        });
    }
    let probs = Panel {
        title: "Error probability".into(),
        x_label: "M".into(),
        y_label: "error probability".into(),
        log_y: true,
        series: vec![
            series("C-D (coherent)", "#1f77b4", false, &c.p_cd),
            series("C-D (dephased)", "#1f77b4", true, &c.p_cd_dephased),
            series("lower bound", "#2ca02c", false, &c.p_ng),
            series("classical", "#d62728", false, &c.p_ci),
            series("photon count", "#9467bd", true, &c.p_count),
        ],
        markers: markers.clone(),
    };
    let asym = asymptotic_ratio_db(&cfg.scenario);
    let ratio = Panel {
        title: "Error-exponent advantage".into(),
        x_label: "M".into(),
        y_label: "r_CD / r_CI (dB)".into(),
        log_y: false,
        series: vec![
            series("coherent", "#1f77b4", false, &c.ratio_db),
            series("dephased", "#ff7f0e", false, &c.ratio_db_dephased),
            series("asymptote", "#777", true, &vec![asym; ms.len()]),
        ],
        markers,
    };
    render(&[probs, ratio])
}

/// Local exponents at the scenario `M` next to their asymptotes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRatio {
    pub m: u64,
    pub r_cd: f64,
    pub r_cd_dephased: f64,
    pub r_ci: f64,
    pub ratio_db: f64,
    pub ratio_db_dephased: f64,
    pub r_cd_asymptotic: f64,
    pub ratio_db_asymptotic: f64,
}

pub const EXPONENT_RATIO_HEADER: &[&str] = &[
    "M",
    "r_cd",
    "r_cd_dephased",
    "r_ci",
    "ratio_db",
    "ratio_db_dephased",
    "r_cd_asymptotic",
    "ratio_db_asymptotic",
];

/// The stencil step is one grid spacing, `ln 10 / points_per_decade`.
pub fn exponent_ratio(cfg: &RunConfig) -> CliResult<ExponentRatio> {
    let p = cfg.scenario;
    let quad = cfg.numerics.quad();
    let h = std::f64::consts::LN_10 / cfg.grid.points_per_decade as f64;
    let model_exponent = |model| local_exponent(p.m, h, |m| p_cd_model(&p.with_m(m), &quad, model));
    let (r_cd, r_cd_dephased) = rayon::join(
        || model_exponent(IdlerModel::Coherent),
        || model_exponent(IdlerModel::Dephased),
    );
    let (r_cd, r_cd_dephased) = (r_cd?, r_cd_dephased?);
    let r_ci = ci_exponent(&p);
    Ok(ExponentRatio {
        m: p.m,
        r_cd,
        r_cd_dephased,
        r_ci,
        ratio_db: 10.0 * (r_cd / r_ci).log10(),
        ratio_db_dephased: 10.0 * (r_cd_dephased / r_ci).log10(),
        r_cd_asymptotic: cd_exponent(&p),
        ratio_db_asymptotic: asymptotic_ratio_db(&p),
    })
}

pub fn exponent_ratio_table(e: &ExponentRatio) -> Table {
    let mut t = Table::new(EXPONENT_RATIO_HEADER);
    t.push(vec![
        e.m.to_string(),
        real(e.r_cd),
        real(e.r_cd_dephased),
        real(e.r_ci),
        real(e.ratio_db),
        real(e.ratio_db_dephased),
        real(e.r_cd_asymptotic),
        real(e.ratio_db_asymptotic),
    ]);
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpgReport {
    pub spec: QpgSpec,
    /// `(n, |t|², |r|², arg t)`.
    pub rows: Vec<(i64, f64, f64, f64)>,
    pub summary: SelectivityReport,
    /// Matched-case crosstalk ceiling at this `γT`.
    pub crosstalk_bound: f64,
}

pub const QPG_HEADER: &[&str] = &["n", "t_abs2", "r_abs2", "arg_t"];

/// `γ = 2π·gamma_hz`, `T = 1/mode_spacing_hz`, single-frequency pump.
pub fn qpg_report(cfg: &RunConfig) -> CliResult<QpgReport> {
    let gamma = 2.0 * PI * cfg.qpg.gamma_hz;
    let duration = cfg.duration();
    let spec = match cfg.qpg.eta {
        None => QpgSpec::matched(gamma, duration)?,
        Some(eta) => QpgSpec::new(gamma, eta, duration, vec![Complex64::new(1.0, 0.0)])?,
    };
    let w = cfg.qpg.window as i64;
    let rows = (-w..=w)
        .map(|n| {
            let tp = transfer(&spec, n);
            (
                n,
                tp.t_coeff.norm_sqr(),
                tp.r_coeff.norm_sqr(),
                tp.t_coeff.arg(),
            )
        })
        .collect();
    Ok(QpgReport {
        summary: selectivity_report(&spec),
        crosstalk_bound: crosstalk_bound(gamma * duration),
        spec,
        rows,
    })
}

pub fn qpg_table(r: &QpgReport) -> Table {
    let mut t = Table::new(QPG_HEADER);
    for &(n, t2, r2, arg) in &r.rows {
        t.push(vec![n.to_string(), real(t2), real(r2), real(arg)]);
    }
    t
}

pub fn qpg_summary(r: &QpgReport) -> String {
    let t0 = transfer(&r.spec, 0).t_coeff;
    format!(
        "gamma = {:.6e} rad/s, T = {:.6e} s, eta = {:.6e}, matched = {}\n\
         conversion_0 = {}, t(0) = {} {:+}i\n\
         worst_crosstalk = {:.6e} (matched ceiling {:.6e})",
        r.spec.gamma(),
        r.spec.duration(),
        r.spec.eta(),
        r.summary.matched,
        r.summary.conversion_0,
        t0.re,
        t0.im,
        r.summary.worst_crosstalk,
        r.crosstalk_bound
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceReport {
    pub spec: SourceSpec,
    pub pair: BogoliubovPair,
    pub modes: ModeCount,
    pub mismatch_bandwidth: BandwidthEstimate,
}

pub const SOURCE_HEADER: &[&str] = &[
    "G",
    "g_re",
    "g_im",
    "N_S",
    "l",
    "M",
    "omega_rad_s",
    "omega_mismatch_rad_s",
    "too_narrow",
];

/// `Ω = 2π·bandwidth_hz`, `T = 1/mode_spacing_hz`; the coupling defaults to
/// the one giving the scenario brightness.
pub fn source_report(cfg: &RunConfig) -> CliResult<SourceReport> {
    let s = &cfg.source;
    let r = match s.coupling {
        Some(r) => r,
        None => coupling_for_brightness(cfg.scenario.n_s)?,
    };
    let spec = SourceSpec::new(
        Complex64::from_polar(r, s.coupling_phase),
        cfg.duration(),
        2.0 * PI * s.bandwidth_hz,
        s.mismatch_coeff,
    )?;
    Ok(SourceReport {
        pair: bogoliubov(&spec),
        modes: mode_count(&spec),
        mismatch_bandwidth: bandwidth_from_mismatch(&spec, s.mismatch_budget)?,
        spec,
    })
}

pub fn source_table(r: &SourceReport) -> Table {
    let mut t = Table::new(SOURCE_HEADER);
    t.push(vec![
        real(r.pair.g_coeff),
        real(r.pair.g_small.re),
        real(r.pair.g_small.im),
        real(r.pair.n_s),
        r.modes.l.to_string(),
        r.modes.m.to_string(),
        real(r.spec.bandwidth),
        real(r.mismatch_bandwidth.omega),
        r.modes.too_narrow.to_string(),
    ]);
    t
}

pub fn trial_config(cfg: &RunConfig, kind: ReceiverKind) -> TrialConfig {
    TrialConfig {
        params: cfg.scenario,
        trials: cfg.mc.trials,
        seed: cfg.mc.seed,
        receiver: cfg.mc.receiver(kind),
        fast_path: cfg.mc.fast_path_for(cfg.scenario.m),
    }
}

/// Runs the trials of one receiver in parallel; outcomes are merged in
/// trial-index order, so the summary does not depend on scheduling.
pub fn run_receiver(tc: &TrialConfig, cfg: &RunConfig) -> CliResult<TrialSummary> {
    tc.validate()?;
    let outcomes = (0..tc.trials)
        .into_par_iter()
        .map(|i| simulate_trial(tc, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(tc, &outcomes, &cfg.numerics.quad())?)
}

pub fn montecarlo(cfg: &RunConfig) -> CliResult<Vec<(ReceiverKind, TrialSummary)>> {
    cfg.mc
        .receivers
        .iter()
        .map(|&k| Ok((k, run_receiver(&trial_config(cfg, k), cfg)?)))
        .collect()
}

pub const MONTECARLO_HEADER: &[&str] = &[
    "receiver",
    "trials",
    "seed",
    "fast_path",
    "absent",
    "present",
    "false_alarms",
    "misses",
    "empirical_error",
    "ci95_lo",
    "ci95_hi",
    "analytic_ref",
    "z_score",
];

pub fn montecarlo_table(cfg: &RunConfig, rows: &[(ReceiverKind, TrialSummary)]) -> Table {
    let mut t = Table::new(MONTECARLO_HEADER);
    for (k, s) in rows {
        let label = match k {
            ReceiverKind::Helstrom | ReceiverKind::HelstromDephased => {
                format!("{}_oracle", k.label())
            }
            _ => k.label().to_string(),
        };
        t.push(vec![
            label,
            s.trials.to_string(),
            cfg.mc.seed.to_string(),
            cfg.mc.fast_path_for(cfg.scenario.m).to_string(),
            s.absent.to_string(),
            s.present.to_string(),
            s.false_alarms.to_string(),
            s.misses.to_string(),
            real(s.empirical_error),
            real(s.ci95.0),
            real(s.ci95.1),
            real(s.analytic_ref),
            real(s.z_score()),
        ]);
    }
    t
}
