//! Run configuration.
//!
//! Files hold one `key = value` per line; `#` starts a comment. Later
//! sources override earlier ones: defaults, then the config file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qillum_core::analytic::IdlerModel;
use qillum_core::analytic::QuadSettings;
use qillum_core::mc::{HomodyneRule, Receiver};
use qillum_core::protocol::ProtocolParams;

use crate::error::{CliError, CliResult};

/// Records above this many modes are drawn on the gamma fast path when
/// `fast_path = auto`.
pub const AUTO_FAST_PATH_ABOVE: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Default,
    File,
    Flag,
}

impl Origin {
    fn label(self) -> &'static str {
        match self {
            Origin::Default => "default",
            Origin::File => "config",
            Origin::Flag => "flag",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub m_min: u64,
    pub m_max: u64,
    pub points_per_decade: u32,
    /// Explicit grid; replaces the log grid when set.
    pub m_values: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Fixed Fock cutoff for the classical benchmark; adaptive when `None`.
    pub cutoff_override: Option<usize>,
    pub quad_nodes: usize,
}

impl Numerics {
    pub fn quad(&self) -> QuadSettings {
        QuadSettings::with_nodes(self.quad_nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastPath {
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverKind {
    Count,
    Homodyne,
    Helstrom,
    HelstromDephased,
}

impl ReceiverKind {
    pub fn label(self) -> &'static str {
        match self {
            ReceiverKind::Count => "count",
            ReceiverKind::Homodyne => "homodyne",
            ReceiverKind::Helstrom => "helstrom",
            ReceiverKind::HelstromDephased => "helstrom_dephased",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "count" => ReceiverKind::Count,
            "homodyne" => ReceiverKind::Homodyne,
            "helstrom" => ReceiverKind::Helstrom,
            "helstrom_dephased" => ReceiverKind::HelstromDephased,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub receivers: Vec<ReceiverKind>,
    pub count_threshold: u64,
    /// Fixed quadrature threshold; per-record likelihood test when `None`.
    pub homodyne_threshold: Option<f64>,
    pub fast_path: FastPath,
}

impl McSettings {
    pub fn receiver(&self, kind: ReceiverKind) -> Receiver {
        match kind {
            ReceiverKind::Count => Receiver::PhotonCount(self.count_threshold),
            ReceiverKind::Homodyne => Receiver::Homodyne(match self.homodyne_threshold {
                Some(t) => HomodyneRule::Fixed(t),
                None => HomodyneRule::PerRecord,
            }),
            ReceiverKind::Helstrom => Receiver::HelstromOracle(IdlerModel::Coherent),
            ReceiverKind::HelstromDephased => Receiver::HelstromOracle(IdlerModel::Dephased),
        }
    }

    pub fn fast_path_for(&self, m: u64) -> bool {
        match self.fast_path {
            FastPath::On => true,
            FastPath::Off => false,
            FastPath::Auto => m > AUTO_FAST_PATH_ABOVE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpgSettings {
    /// Cavity linewidth `γ/2π` in Hz.
    pub gamma_hz: f64,
    /// `η`; matched to `√(γT)` when `None`.
    pub eta: Option<f64>,
    /// Modes reported on each side of the carrier.
    pub window: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSettings {
    /// `|ζL|`; derived from the scenario `n_s` when `None`.
    pub coupling: Option<f64>,
    pub coupling_phase: f64,
    /// Phase-matching bandwidth `Ω/2π` in Hz.
    pub bandwidth_hz: f64,
    /// `c₂` in s².
    pub mismatch_coeff: f64,
    pub mismatch_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ProtocolParams,
    pub grid: GridSpec,
    pub numerics: Numerics,
    pub mc: McSettings,
    pub qpg: QpgSettings,
    pub source: SourceSettings,
    /// Mode spacing `2π/T` expressed in Hz; shared by the source and the gate.
    pub mode_spacing_hz: f64,
    pub outputs: Outputs,
    pub threads: Option<usize>,
    origins: BTreeMap<&'static str, Origin>,
}

/// Every recognised key, in header order.
pub const KEYS: &[&str] = &[
    "n_s",
    "kappa",
    "theta",
    "n_b",
    "m",
    "m_min",
    "m_max",
    "points_per_decade",
    "m_values",
    "cutoff_override",
    "quad_nodes",
    "trials",
    "seed",
    "receivers",
    "count_threshold",
    "homodyne_threshold",
    "fast_path",
    "gamma_hz",
    "eta",
    "window",
    "mode_spacing_hz",
    "coupling",
    "coupling_phase",
    "bandwidth_hz",
    "mismatch_coeff",
    "mismatch_budget",
    "out",
    "svg",
    "threads",
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ProtocolParams::default(),
            grid: GridSpec {
                m_min: 1_000,
                m_max: 50_000_000,
                points_per_decade: 50,
                m_values: None,
            },
            numerics: Numerics {
                cutoff_override: None,
                quad_nodes: QuadSettings::default().nodes,
            },
            mc: McSettings {
                trials: 100_000,
                seed: 42,
                receivers: vec![
                    ReceiverKind::Count,
                    ReceiverKind::Homodyne,
                    ReceiverKind::Helstrom,
                ],
                count_threshold: 0,
                homodyne_threshold: None,
                fast_path: FastPath::Auto,
            },
            qpg: QpgSettings {
                gamma_hz: 1e4,
                eta: None,
                window: 10,
            },
            source: SourceSettings {
                coupling: None,
                coupling_phase: 0.0,
                bandwidth_hz: 1e11,
                mismatch_coeff: 4e-25,
                mismatch_budget: 0.01,
            },
            mode_spacing_hz: 1e6,
            outputs: Outputs::default(),
            threads: None,
            origins: BTreeMap::new(),
        }
    }
}

fn bad(key: &str, value: &str, want: &str) -> CliError {
    CliError::config(format!("{key} = {value:?}: expected {want}"))
}

fn real(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>().map_err(|_| bad(key, v, "a real number"))
}

/// Integers accept scientific notation when exact, e.g. `1e5`.
fn integer(key: &str, v: &str) -> CliResult<u64> {
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(bad(key, v, "a nonnegative integer")),
    }
}

fn boolean(key: &str, v: &str) -> CliResult<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "true or false")),
    }
}

/// Shortest round-tripping form, in scientific notation outside `[1e-4, 1e6)`.
fn show(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Splits a config text into `(line, key, value)` triples.
pub fn parse_lines(text: &str) -> CliResult<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::config(format!(
                "line {}: expected key = value",
                i + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::config(format!("line {}: empty key", i + 1)));
        }
        out.push((i + 1, k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl RunConfig {
    pub fn origin(&self, key: &str) -> Origin {
        self.origins.get(key).copied().unwrap_or(Origin::Default)
    }

    /// Sets one key; `origin` is recorded for the run header.
    pub fn set(&mut self, key: &str, v: &str, origin: Origin) -> CliResult<()> {
        let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
            return Err(CliError::config(format!("unknown key {key:?}")));
        };
        match key {
            "n_s" => self.scenario.n_s = real(key, v)?,
            "kappa" => self.scenario.kappa = real(key, v)?,
            "theta" => self.scenario.theta = real(key, v)?,
            "n_b" => self.scenario.n_b = real(key, v)?,
            "m" => self.scenario.m = integer(key, v)?,
            "m_min" => self.grid.m_min = integer(key, v)?,
            "m_max" => self.grid.m_max = integer(key, v)?,
            "points_per_decade" => {
                self.grid.points_per_decade =
                    u32::try_from(integer(key, v)?).map_err(|_| bad(key, v, "a small integer"))?
            }
            "m_values" => {
                self.grid.m_values = if v.is_empty() || v == "none" {
                    None
                } else {
                    Some(
                        v.split(',')
                            .map(|s| integer(key, s.trim()))
                            .collect::<CliResult<Vec<_>>>()?,
                    )
                }
            }
            "cutoff_override" => {
                self.numerics.cutoff_override = match v {
                    "auto" | "none" => None,
                    _ => Some(integer(key, v)? as usize),
                }
            }
            "quad_nodes" => self.numerics.quad_nodes = integer(key, v)? as usize,
            "trials" => self.mc.trials = integer(key, v)?,
            "seed" => self.mc.seed = integer(key, v)?,
            "receivers" => {
                self.mc.receivers = v
                    .split(',')
                    .map(|s| {
                        ReceiverKind::parse(s.trim()).ok_or_else(|| {
                            bad(key, s, "count, homodyne, helstrom or helstrom_dephased")
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?
            }
            "count_threshold" => self.mc.count_threshold = integer(key, v)?,
            "homodyne_threshold" => {
                self.mc.homodyne_threshold = match v {
                    "per_record" => None,
                    _ => Some(real(key, v)?),
                }
            }
            "fast_path" => {
                self.mc.fast_path = match v {
                    "auto" => FastPath::Auto,
                    _ if boolean(key, v)? => FastPath::On,
                    _ => FastPath::Off,
                }
            }
            "gamma_hz" => self.qpg.gamma_hz = real(key, v)?,
            "eta" => {
                self.qpg.eta = match v {
                    "matched" => None,
                    _ => Some(real(key, v)?),
                }
            }
            "window" => self.qpg.window = integer(key, v)?,
            "mode_spacing_hz" => self.mode_spacing_hz = real(key, v)?,
            "coupling" => {
                self.source.coupling = match v {
                    "auto" => None,
                    _ => Some(real(key, v)?),
                }
            }
            "coupling_phase" => self.source.coupling_phase = real(key, v)?,
            "bandwidth_hz" => self.source.bandwidth_hz = real(key, v)?,
            "mismatch_coeff" => self.source.mismatch_coeff = real(key, v)?,
            "mismatch_budget" => self.source.mismatch_budget = real(key, v)?,
            "out" => self.outputs.csv_path = Some(PathBuf::from(v)),
            "svg" => self.outputs.svg_path = Some(PathBuf::from(v)),
            "threads" => {
                self.threads = match v {
                    "auto" => None,
                    _ => match integer(key, v)? {
                        0 => None,
                        n => Some(n as usize),
                    },
                }
            }
            _ => unreachable!("key table and match disagree"),
        }
        self.origins.insert(key, origin);
        Ok(())
    }

    /// Current value of `key` in config syntax.
    pub fn get(&self, key: &str) -> Option<String> {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or("stdout".into(), |p| p.display().to_string())
        };
        Some(match key {
            "n_s" => show(self.scenario.n_s),
            "kappa" => show(self.scenario.kappa),
            "theta" => show(self.scenario.theta),
            "n_b" => show(self.scenario.n_b),
            "m" => self.scenario.m.to_string(),
            "m_min" => self.grid.m_min.to_string(),
            "m_max" => self.grid.m_max.to_string(),
            "points_per_decade" => self.grid.points_per_decade.to_string(),
            "m_values" => self.grid.m_values.as_deref().map_or("none".into(), join),
            "cutoff_override" => self
                .numerics
                .cutoff_override
                .map_or("auto".into(), |c| c.to_string()),
            "quad_nodes" => self.numerics.quad_nodes.to_string(),
            "trials" => self.mc.trials.to_string(),
            "seed" => self.mc.seed.to_string(),
            "receivers" => self
                .mc
                .receivers
                .iter()
                .map(|r| r.label())
                .collect::<Vec<_>>()
                .join(","),
            "count_threshold" => self.mc.count_threshold.to_string(),
            "homodyne_threshold" => self.mc.homodyne_threshold.map_or("per_record".into(), show),
            "fast_path" => match self.mc.fast_path {
                FastPath::Auto => "auto".into(),
                FastPath::On => "true".into(),
                FastPath::Off => "false".into(),
            },
            "gamma_hz" => show(self.qpg.gamma_hz),
            "eta" => self.qpg.eta.map_or("matched".into(), show),
            "window" => self.qpg.window.to_string(),
            "mode_spacing_hz" => show(self.mode_spacing_hz),
            "coupling" => self.source.coupling.map_or("auto".into(), show),
            "coupling_phase" => show(self.source.coupling_phase),
            "bandwidth_hz" => show(self.source.bandwidth_hz),
            "mismatch_coeff" => show(self.source.mismatch_coeff),
            "mismatch_budget" => show(self.source.mismatch_budget),
            "out" => path(&self.outputs.csv_path),
            "svg" => self
                .outputs
                .svg_path
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
            "threads" => self.threads.map_or("auto".into(), |t| t.to_string()),
            _ => return None,
        })
    }

    pub fn apply_text(&mut self, text: &str, origin: Origin) -> CliResult<()> {
        for (line, k, v) in parse_lines(text)? {
            self.set(&k, &v, origin)
                .map_err(|e| CliError::config(format!("line {line}: {e}")))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text, Origin::File)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Applies a `KEY=VALUE` override.
    pub fn apply_assignment(&mut self, kv: &str) -> CliResult<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set {kv:?}: expected KEY=VALUE")))?;
        self.set(k.trim(), v.trim(), Origin::Flag)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.scenario.validate()?;
        let g = &self.grid;
        match &g.m_values {
            Some(ms) => {
                if ms.is_empty() || ms.contains(&0) {
                    return Err(CliError::config("m_values must be positive mode counts"));
                }
                if ms.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CliError::config("m_values must be strictly increasing"));
                }
            }
            None => {
                if !(g.m_min > 0 && g.m_min < g.m_max) {
                    return Err(CliError::config("grid needs 0 < m_min < m_max"));
                }
                if g.points_per_decade < 4 {
                    return Err(CliError::config("points_per_decade must be at least 4"));
                }
            }
        }
        self.numerics.quad().validate()?;
        if self.mc.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.mc.receivers.is_empty() {
            return Err(CliError::config(
                "receivers must name at least one receiver",
            ));
        }
        if let Some(t) = self.mc.homodyne_threshold {
            if !t.is_finite() {
                return Err(CliError::config("homodyne_threshold must be finite"));
            }
        }
        for (key, v) in [
            ("gamma_hz", self.qpg.gamma_hz),
            ("mode_spacing_hz", self.mode_spacing_hz),
            ("bandwidth_hz", self.source.bandwidth_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(format!("{key} must be positive")));
            }
        }
        if let Some(e) = self.qpg.eta {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(CliError::config("eta must be nonnegative"));
            }
        }
        if let Some(c) = self.source.coupling {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(CliError::config("coupling must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Pulse duration `T = 1/mode_spacing_hz`, so that `2π/T = 2π·mode_spacing_hz`.
    pub fn duration(&self) -> f64 {
        1.0 / self.mode_spacing_hz
    }

    /// `# key = value (origin)` for every key.
    pub fn header(&self) -> String {
        let mut s = String::new();
        for &k in KEYS {
            let v = self.get(k).expect("known key");
            let _ = writeln!(s, "# {k} = {v} ({})", self.origin(k).label());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_scenario() {
        let c = RunConfig::default();
        assert_eq!(
            c.scenario,
            ProtocolParams::new(1e-3, 0.01, 0.0, 20.0, 100_000).unwrap()
        );
        c.validate().unwrap();
        assert!(c.header().contains("# n_b = 20 (default)"));
    }

    #[test]
    fn every_key_round_trips() {
        let mut c = RunConfig::default();
        for &k in KEYS {
            let v = c.get(k).unwrap();
            if k == "out" || k == "svg" {
                continue;
            }
            c.set(k, &v, Origin::File).unwrap();
            assert_eq!(c.get(k).unwrap(), v, "{k}");
        }
    }

    #[test]
    fn comments_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# scenario\nn_s = 0.1  # bright\n\nm = 1e2\nreceivers = count, homodyne\n",
            Origin::File,
        )
        .unwrap();
        c.apply_assignment("m=250").unwrap();
        assert_eq!(c.scenario.n_s, 0.1);
        assert_eq!(c.scenario.m, 250);
        assert_eq!(c.origin("m"), Origin::Flag);
        assert_eq!(c.origin("n_s"), Origin::File);
        assert_eq!(
            c.mc.receivers,
            [ReceiverKind::Count, ReceiverKind::Homodyne]
        );
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("n_s 0.1", Origin::File).is_err());
        assert!(c.apply_text("colour = red", Origin::File).is_err());
        assert!(c.apply_text("m = 1.5", Origin::File).is_err());
        assert!(c.apply_assignment("trials").is_err());
        c.set("trials", "0", Origin::Flag).unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("points_per_decade", "3", Origin::Flag).unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("m_values", "10,10", Origin::Flag).unwrap();
        assert!(c.validate().is_err());
    }
}
