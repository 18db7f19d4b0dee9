//! Experiment configuration: one TOML file, then command-line overrides.
//!
//! The grammar is documented in the repository README. Every key is
//! optional; an empty file is the saddle-point run at `N = 50`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use tact_core::HamiltonianKind;

use crate::error::CliError;

/// A configuration problem, located by its dotted key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Coherent starting state `|theta, phi>`; the default is the saddle on +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialState {
    pub theta: f64,
    pub phi: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }
}

/// `t_max` in units of `1/chi`; absent means `3 ln(2 pi N) / (2N)` per `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_max: None,
            samples: tact_core::analysis::DEFAULT_SAMPLES,
        }
    }
}

/// What `evolve` writes. The dedicated subcommands force their own output on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub observables: bool,
    pub fidelities: bool,
    pub maps: bool,
    pub portrait: bool,
    pub approximations: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            observables: true,
            fidelities: true,
            maps: false,
            portrait: false,
            approximations: false,
        }
    }
}

/// Sphere grid for the event snapshots. Absent sizes give `2N+1` polar
/// nodes and `4N+4` azimuths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_phi: Option<usize>,
    /// Also write each map as a little-endian binary dump.
    pub binary: bool,
    /// Also write the state at each event as JSON.
    pub states: bool,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            n_theta: None,
            n_phi: None,
            binary: false,
            states: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitOptions {
    pub n_phi: usize,
    pub n_z: usize,
    /// Mean-field time span in units of `1/(N chi)`.
    pub t_end: f64,
    pub dt: f64,
    /// Trajectory starts as `[phi, z]` pairs.
    pub starts: Vec<[f64; 2]>,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            n_phi: 48,
            n_z: 31,
            t_end: 10.0,
            dt: 1e-3,
            starts: vec![
                [FRAC_PI_2, 0.2],
                [FRAC_PI_2, 0.5],
                [-FRAC_PI_2, -0.4],
                [1.0, -0.3],
                [-2.5, 0.6],
                [2.2, -0.25],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// One particle number or a list; always serialized as a list.
    #[serde(rename = "N", deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    pub hamiltonian: HamiltonianKind,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Recorded for reproducibility; the default pipeline draws no random numbers.
    pub seed: u64,
    /// Fixed Yurke mixing angle; absent means optimized at every time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yurke_alpha: Option<f64>,
    pub initial: InitialState,
    pub time: TimeGrid,
    pub outputs: Outputs,
    pub maps: MapOptions,
    pub portrait: PortraitOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: vec![50],
            hamiltonian: HamiltonianKind::TactRotated,
            out_dir: PathBuf::from("tact-out"),
            format: OutputFormat::Csv,
            seed: 0,
            yurke_alpha: None,
            initial: InitialState::default(),
            time: TimeGrid::default(),
            outputs: Outputs::default(),
            maps: MapOptions::default(),
            portrait: PortraitOptions::default(),
        }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Counts {
        One(usize),
        Many(Vec<usize>),
    }
    match Counts::deserialize(d) {
        Ok(Counts::One(n)) => Ok(vec![n]),
        Ok(Counts::Many(v)) => Ok(v),
        Err(_) => Err(serde::de::Error::custom(
            "expected a non-negative integer or a list of them",
        )),
    }
}

/// Command-line values; each one present replaces the file value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub n: Option<Vec<usize>>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub format: Option<OutputFormat>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("", e.message().to_string()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(if path == "." { String::new() } else { path }, e.into_inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Ok(Self::from_toml_str(&text)?)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(out) = &o.out {
            self.out_dir = out.clone();
        }
        if let Some(n) = &o.n {
            self.n = n.clone();
        }
        if let Some(t) = o.t_max {
            self.time.t_max = Some(t);
        }
        if let Some(s) = o.samples {
            self.time.samples = s;
        }
        if let Some(f) = o.format {
            self.format = f;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n.is_empty() {
            return Err(ConfigError::new("N", "list must not be empty"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n == 0 {
                return Err(ConfigError::new(format!("N[{i}]"), "must be at least 1"));
            }
        }
        if self.time.samples < 2 {
            return Err(ConfigError::new("time.samples", "must be at least 2"));
        }
        if let Some(t) = self.time.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::new("time.t_max", "must be positive and finite"));
            }
        }
        if !(0.0..=PI).contains(&self.initial.theta) {
            return Err(ConfigError::new("initial.theta", "must lie in [0, pi]"));
        }
        if !(-PI..PI).contains(&self.initial.phi) {
            return Err(ConfigError::new("initial.phi", "must lie in [-pi, pi)"));
        }
        if let Some(a) = self.yurke_alpha {
            if !a.is_finite() {
                return Err(ConfigError::new("yurke_alpha", "must be finite"));
            }
        }
        if self.maps.n_theta == Some(0) {
            return Err(ConfigError::new("maps.n_theta", "must be at least 1"));
        }
        if self.maps.n_phi == Some(0) {
            return Err(ConfigError::new("maps.n_phi", "must be at least 1"));
        }
        let p = &self.portrait;
        if p.n_phi == 0 {
            return Err(ConfigError::new("portrait.n_phi", "must be at least 1"));
        }
        if p.n_z == 0 {
            return Err(ConfigError::new("portrait.n_z", "must be at least 1"));
        }
        if !(p.dt > 0.0 && p.dt.is_finite()) {
            return Err(ConfigError::new("portrait.dt", "must be positive and finite"));
        }
        if !(p.t_end > 0.0 && p.t_end.is_finite()) {
            return Err(ConfigError::new("portrait.t_end", "must be positive and finite"));
        }
        for (i, [phi, z]) in p.starts.iter().enumerate() {
            if !phi.is_finite() {
                return Err(ConfigError::new(format!("portrait.starts[{i}]"), "phi must be finite"));
            }
            if !(z.abs() < 1.0) {
                return Err(ConfigError::new(format!("portrait.starts[{i}]"), "z must lie in (-1, 1)"));
            }
        }
        Ok(())
    }

    /// Time window for particle number `n`.
    pub fn t_max_for(&self, n: tact_core::ParticleNumber) -> f64 {
        self.time
            .t_max
            .unwrap_or_else(|| tact_core::analysis::default_t_max(n))
    }
}
