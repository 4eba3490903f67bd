//! Experiment files.
//!
//! A file holds either one experiment at the top level or several under
//! `[[experiment]]`. Parsing rejects unknown keys; validation then collects
//! every problem before anything runs.

use std::fmt;
use std::path::PathBuf;

use fss::stats::{DEFAULT_FIT_MAX_FRACTION, DEFAULT_FRACTIONS};
use fss::TrapSpec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Raw canonical samples and their moments at each temperature.
    Sample,
    ExactCanonical,
    ExactMicro,
    /// Post-selection curves and the extrapolated microcanonical variance.
    Postselect,
    ScanPeak,
    /// `S̃` at the canonical peak, next to the exact `S` and `S̃`.
    SRatio,
    Verify,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sample => "sample",
            Mode::ExactCanonical => "exact-canonical",
            Mode::ExactMicro => "exact-micro",
            Mode::Postselect => "postselect",
            Mode::ScanPeak => "scan-peak",
            Mode::SRatio => "s-ratio",
            Mode::Verify => "verify",
        }
    }

    fn samples(self) -> bool {
        matches!(self, Mode::Sample | Mode::Postselect | Mode::ScanPeak | Mode::SRatio)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TrapConfig {
    Ring1d {
        #[serde(default = "one")]
        length: f64,
    },
    Harmonic1d {
        #[serde(default = "one")]
        omega: f64,
    },
    Harmonic3d {
        aspect_ratio: f64,
    },
}

impl TrapConfig {
    pub fn spec(self) -> TrapSpec {
        match self {
            TrapConfig::Ring1d { length } => TrapSpec::Ring1d { length },
            TrapConfig::Harmonic1d { omega } => TrapSpec::Harmonic1d { omega },
            TrapConfig::Harmonic3d { aspect_ratio } => TrapSpec::Harmonic3d { aspect_ratio },
        }
    }

    /// Unit of temperature, energy and coupling in this trap.
    pub fn units(self) -> UnitNames {
        match self {
            TrapConfig::Ring1d { .. } => UnitNames {
                temperature: "2*pi^2*hbar^2/(m*k_B*L^2)",
                energy: "2*pi^2*hbar^2/(m*L^2)",
                coupling: "2*pi^2*hbar^2/(m*L)",
            },
            TrapConfig::Harmonic1d { .. } => UnitNames {
                temperature: "hbar*omega/k_B",
                energy: "hbar*omega",
                coupling: "sqrt(hbar^3*omega/m)",
            },
            TrapConfig::Harmonic3d { .. } => UnitNames {
                temperature: "hbar*omega_z/k_B",
                energy: "hbar*omega_z",
                coupling: "(m*omega_z)^(3/2)*omega_perp/sqrt(hbar)",
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitNames {
    pub temperature: &'static str,
    pub energy: &'static str,
    pub coupling: &'static str,
}

/// Optional statement of the units the numbers are written in. Only the trap's
/// own units are accepted; the point is to catch files written for another trap.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Recorded samples per chain.
    pub samples: usize,
    pub chains: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thinning: Option<u64>,
    /// Single-particle energy cutoff of the mode basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 1000, chains: 16, seed: 0, gamma: None, burn_in_steps: None, thinning: None, cutoff: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PostselectConfig {
    pub fractions: Vec<f64>,
    pub degree: usize,
    pub fit_max_fraction: f64,
}

impl Default for PostselectConfig {
    fn default() -> Self {
        PostselectConfig { fractions: DEFAULT_FRACTIONS.to_vec(), degree: 2, fit_max_fraction: DEFAULT_FIT_MAX_FRACTION }
    }
}

impl PostselectConfig {
    pub fn fit(&self) -> fss::stats::MicroFit {
        fss::stats::MicroFit { fractions: self.fractions.clone(), degree: self.degree, max_fraction: self.fit_max_fraction }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Output subdirectory; filled in by normalisation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperatures: Option<Vec<f64>>,
    /// Multiples of the ideal-gas canonical peak temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_temperatures: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<u64>>,
    /// Whether to add exact ideal-gas rows next to sampled ones. Defaults to
    /// on when the coupling is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    /// Sample mode only: also write every record (default on).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write_samples: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub postselect: PostselectConfig,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode,
            label: None,
            atoms: None,
            coupling: 0.0,
            temperatures: None,
            relative_temperatures: None,
            energies: None,
            exact: None,
            write_samples: None,
            trap: None,
            units: None,
            sampler: SamplerConfig::default(),
            postselect: PostselectConfig::default(),
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.mode.as_str())
    }

    pub fn wants_exact(&self) -> bool {
        self.exact.unwrap_or(self.coupling == 0.0)
    }

    /// Canonical TOML of this experiment alone, used for hashing.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Output directory; the command line and `FSS_OUT_DIR` take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub experiment: Vec<ExperimentConfig>,
}

#[derive(Debug, PartialEq)]
pub enum ConfigError {
    Parse(String),
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "cannot parse configuration: {msg}"),
            ConfigError::Invalid(problems) => {
                writeln!(f, "invalid configuration ({} problem{}):", problems.len(), if problems.len() == 1 { "" } else { "s" })?;
                for p in problems {
                    writeln!(f, "  - {p}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses without validating.
pub fn parse_config(text: &str) -> Result<Plan, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    if table.contains_key("experiment") {
        return Plan::deserialize(toml::Value::Table(table)).map_err(|e| ConfigError::Parse(e.to_string()));
    }
    let mut table = table;
    let mut take = |key: &str| table.remove(key);
    let name = take("name");
    let output = take("output");
    let single = ExperimentConfig::deserialize(toml::Value::Table(table)).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let str_field = |v: Option<toml::Value>, key: &str| match v {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(ConfigError::Parse(format!("{key} must be a string, got {}", other.type_str()))),
    };
    Ok(Plan {
        name: str_field(name, "name")?,
        output: str_field(output, "output")?.map(PathBuf::from),
        experiment: vec![single],
    })
}

/// Parses, normalises and validates.
pub fn load_config(text: &str) -> Result<Plan, ConfigError> {
    let mut plan = parse_config(text)?;
    plan.normalize();
    let problems = plan.validate();
    if problems.is_empty() {
        Ok(plan)
    } else {
        Err(ConfigError::Invalid(problems))
    }
}

impl Plan {
    /// Gives every experiment an explicit label.
    pub fn normalize(&mut self) {
        let many = self.experiment.len() > 1;
        for (i, e) in self.experiment.iter_mut().enumerate() {
            if e.label.is_none() {
                e.label = Some(if many { format!("{i:02}-{}", e.mode) } else { e.mode.to_string() });
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serialises")
    }

    /// Every problem with the plan, each naming its experiment and field.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.experiment.is_empty() {
            out.push("no experiments given".to_string());
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.experiment {
            let label = e.label();
            if !seen.insert(label) {
                out.push(format!("label \"{label}\" is used by more than one experiment"));
            }
            out.extend(validate_experiment(e).into_iter().map(|p| format!("[{label}] {p}")));
        }
        out
    }

    /// Divides atom numbers and sample budgets by `factor`, at least one each.
    pub fn scaled(&self, factor: f64) -> Plan {
        let mut plan = self.clone();
        if factor == 1.0 {
            return plan;
        }
        for e in &mut plan.experiment {
            if let Some(n) = e.atoms.as_mut() {
                *n = ((*n as f64 / factor).round() as usize).max(1);
            }
            e.sampler.samples = ((e.sampler.samples as f64 / factor).ceil() as usize).max(1);
        }
        plan
    }
}

fn positive_list(name: &str, xs: &[f64], out: &mut Vec<String>) {
    if xs.is_empty() {
        out.push(format!("{name} is empty"));
    }
    if let Some(x) = xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        out.push(format!("{name} must be positive and finite, got {x}"));
    }
}

pub fn validate_experiment(e: &ExperimentConfig) -> Vec<String> {
    let mut out = Vec::new();
    let label = e.label();
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) || label.starts_with('.') {
        out.push(format!("label \"{label}\" must be a plain directory name (letters, digits, '.', '_', '-')"));
    }
    if e.mode == Mode::Verify {
        return out;
    }

    match e.trap {
        None => out.push("trap is missing".to_string()),
        Some(t) => {
            if let Err(err) = t.spec().validate() {
                out.push(format!("trap: {err}"));
            }
            if let Some(u) = &e.units {
                check_units(t, u, &mut out);
            }
            if e.mode == Mode::ExactMicro && !t.spec().is_integer_grid() {
                out.push(format!(
                    "exact-micro counts states on an integer energy grid, which {} does not have; use an integer aspect ratio",
                    t.spec()
                ));
            }
        }
    }
    match e.atoms {
        None => out.push("atoms is missing".to_string()),
        Some(0) => out.push("atoms must be at least 1".to_string()),
        Some(_) => {}
    }
    if !e.coupling.is_finite() {
        out.push(format!("coupling must be finite, got {}", e.coupling));
    } else if e.coupling < 0.0 {
        out.push(format!("coupling {}: attractive interactions unsupported", e.coupling));
    }
    let exact_mode = matches!(e.mode, Mode::ExactCanonical | Mode::ExactMicro);
    if exact_mode && e.coupling != 0.0 {
        out.push(format!("{} describes the ideal gas only; coupling must be 0, got {}", e.mode, e.coupling));
    }

    // temperatures
    let temps = match (&e.temperatures, &e.relative_temperatures) {
        (Some(_), Some(_)) => {
            out.push("give either temperatures or relative_temperatures, not both".to_string());
            None
        }
        (Some(t), None) => {
            positive_list("temperatures", t, &mut out);
            Some(t)
        }
        (None, Some(t)) => {
            positive_list("relative_temperatures", t, &mut out);
            Some(t)
        }
        (None, None) => None,
    };
    match e.mode {
        Mode::ExactMicro => {
            if temps.is_some() {
                out.push("exact-micro works at fixed energies; remove temperatures and give energies".to_string());
            }
            match &e.energies {
                None => out.push("energies is missing".to_string()),
                Some(v) if v.is_empty() => out.push("energies is empty".to_string()),
                _ => {}
            }
        }
        Mode::SRatio => {
            if temps.is_none() && e.coupling != 0.0 {
                out.push("s-ratio with interactions needs a temperature grid to locate the peak".to_string());
            }
            if let Some(t) = temps {
                check_scan_grid(t, &mut out);
            }
        }
        Mode::ScanPeak => match temps {
            None => out.push("temperatures is missing".to_string()),
            Some(t) => check_scan_grid(t, &mut out),
        },
        _ => {
            if temps.is_none() {
                out.push("temperatures is missing".to_string());
            }
        }
    }
    if e.mode != Mode::Sample && e.write_samples.is_some() {
        out.push(format!("write_samples is only used by sample, not {}", e.mode));
    }
    if e.mode != Mode::ExactMicro && e.energies.is_some() {
        out.push(format!("energies is only used by exact-micro, not {}", e.mode));
    }

    if e.mode.samples() {
        let s = &e.sampler;
        if s.samples == 0 {
            out.push("sampler.samples must be at least 1".to_string());
        }
        if s.chains == 0 {
            out.push("sampler.chains must be at least 1".to_string());
        } else if s.chains < fss::stats::MIN_CHAINS_FOR_ERRORS && e.mode != Mode::Sample {
            out.push(format!(
                "sampler.chains = {}: error bars need at least {} independent chains",
                s.chains,
                fss::stats::MIN_CHAINS_FOR_ERRORS
            ));
        }
        if let Some(g) = s.gamma {
            if !(g.is_finite() && g >= 0.0) {
                out.push(format!("sampler.gamma must be non-negative, got {g}"));
            }
        }
        if s.seed > i64::MAX as u64 {
            out.push(format!("sampler.seed = {} does not fit a TOML integer (at most {})", s.seed, i64::MAX));
        }
        if s.thinning == Some(0) {
            out.push("sampler.thinning must be at least 1".to_string());
        }
        if s.cutoff == Some(0) {
            out.push("sampler.cutoff must be at least 1".to_string());
        }
    }
    if matches!(e.mode, Mode::Postselect | Mode::SRatio) {
        let p = &e.postselect;
        if !(1..=3).contains(&p.degree) {
            out.push(format!("postselect.degree must be 1, 2 or 3, got {}", p.degree));
        }
        if p.fractions.iter().any(|f| !(f.is_finite() && *f > 0.0 && *f <= 1.0)) {
            out.push("postselect.fractions must lie in (0, 1]".to_string());
        }
        if p.fractions.windows(2).any(|w| w[1] >= w[0]) {
            out.push("postselect.fractions must be strictly decreasing".to_string());
        }
        if !(p.fit_max_fraction > 0.0 && p.fit_max_fraction <= 1.0) {
            out.push(format!("postselect.fit_max_fraction must lie in (0, 1], got {}", p.fit_max_fraction));
        }
        let fitted = p.fractions.iter().filter(|&&f| f <= p.fit_max_fraction).count();
        if fitted < p.degree + 2 {
            out.push(format!(
                "postselect: a degree-{} fit needs {} fractions at or below fit_max_fraction = {}, got {fitted}",
                p.degree,
                p.degree + 2,
                p.fit_max_fraction
            ));
        }
    }
    out
}

fn check_scan_grid(t: &[f64], out: &mut Vec<String>) {
    if t.len() < 5 {
        out.push(format!("locating a peak needs at least 5 temperatures, got {}", t.len()));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        out.push("temperatures for a peak scan must be strictly increasing".to_string());
    }
}

fn same_unit(a: &str, b: &str) -> bool {
    a.chars().filter(|c| !c.is_whitespace()).eq(b.chars().filter(|c| !c.is_whitespace()))
}

fn check_units(trap: TrapConfig, u: &Units, out: &mut Vec<String>) {
    let want = trap.units();
    let kind = trap.spec().kind();
    for (name, given, expected) in [
        ("temperature", &u.temperature, want.temperature),
        ("energy", &u.energy, want.energy),
        ("coupling", &u.coupling, want.coupling),
    ] {
        if let Some(given) = given {
            if !same_unit(given, expected) {
                out.push(format!("units.{name} = \"{given}\" does not match {kind}, whose {name} unit is \"{expected}\""));
            }
        }
    }
}
