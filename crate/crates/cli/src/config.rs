//! Resolved run configurations: JSON-file defaults overridden by flags.
//!
//! Every subcommand resolves to one of these structs. A `--config <file>`
//! seeds the fields (partial files are fine, unknown keys are rejected),
//! explicit flags override the file, and remaining fields take the defaults
//! below. `--dump-config` writes the fully resolved struct back out, so a
//! dumped file re-parses to an equivalent run.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spinchain::fidelity::{BellSign, BlochAngles, PeakConfig, Scenario};
use spinchain::parrondo::CouplingAxis;
use spinchain::DisorderAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Single,
    Bell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignKind {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Alpha,
    Beta,
}

impl From<CouplingKind> for CouplingAxis {
    fn from(kind: CouplingKind) -> Self {
        match kind {
            CouplingKind::Alpha => CouplingAxis::Alpha,
            CouplingKind::Beta => CouplingAxis::Beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhichDelta {
    DeltaAlpha,
    DeltaBeta,
}

impl From<WhichDelta> for DisorderAxis {
    fn from(which: WhichDelta) -> Self {
        match which {
            WhichDelta::DeltaAlpha => DisorderAxis::DeltaAlpha,
            WhichDelta::DeltaBeta => DisorderAxis::DeltaBeta,
        }
    }
}

/// Scenario selection shared by most commands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Polar angle for the single-qubit input (radians); pi sends |1>.
    pub theta: f64,
    /// Azimuthal phase for the single-qubit input (radians).
    pub phi: f64,
    /// Bell-state sign for the bell scenario.
    pub bell_sign: SignKind,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::Single,
            theta: std::f64::consts::PI,
            phi: 0.0,
            bell_sign: SignKind::Plus,
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario> {
        Ok(match self.kind {
            ScenarioKind::Single => {
                Scenario::Single(BlochAngles::new(self.theta, self.phi).context("bad angles")?)
            }
            ScenarioKind::Bell => Scenario::Bell(match self.bell_sign {
                SignKind::Plus => BellSign::Plus,
                SignKind::Minus => BellSign::Minus,
            }),
        })
    }
}

/// Sampling window shared by most commands; `tau_max` defaults to `2N`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub tau_max: Option<f64>,
    pub dtau: f64,
    pub threshold_fraction: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            tau_max: None,
            dtau: PeakConfig::DEFAULT_DTAU,
            threshold_fraction: PeakConfig::DEFAULT_THRESHOLD_FRACTION,
        }
    }
}

impl WindowConfig {
    /// Materializes the peak config for an N-site chain and pins the
    /// resolved horizon back into `tau_max`.
    pub fn resolve(&mut self, n: usize) -> Result<PeakConfig> {
        let tau_max = self.tau_max.unwrap_or(2.0 * n as f64);
        self.tau_max = Some(tau_max);
        PeakConfig::new(tau_max, self.dtau, self.threshold_fraction).context("bad sampling window")
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

// --- scan-static ------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanStaticConfig {
    pub scenario: ScenarioConfig,
    pub n: usize,
    pub coupling: CouplingKind,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub window: WindowConfig,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for ScanStaticConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            n: 10,
            coupling: CouplingKind::Alpha,
            from: 0.3,
            to: 1.7,
            step: 0.01,
            window: WindowConfig::default(),
            out_dir: default_out_dir(),
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

// --- evolve -------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub scenario: ScenarioConfig,
    pub n: usize,
    /// Emit the static-chain series (uses `alpha`, `beta`).
    #[serde(rename = "static")]
    pub static_run: bool,
    /// Emit the driven-protocol series (uses the pair fields below).
    pub driven: bool,
    /// Emit the effective-chain series of the driven protocol.
    pub effective: bool,
    pub alpha: f64,
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub omega: Option<f64>,
    pub eta: Option<f64>,
    pub delta_alpha: f64,
    pub delta_beta: f64,
    pub window: WindowConfig,
    /// Also dump the final amplitude state of each requested evolution.
    pub dump_state: bool,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            n: 10,
            static_run: false,
            driven: false,
            effective: false,
            alpha: 1.0,
            beta: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            beta1: 1.0,
            beta2: 1.0,
            omega: None,
            eta: None,
            delta_alpha: 0.0,
            delta_beta: 0.0,
            window: WindowConfig::default(),
            dump_state: false,
            out_dir: default_out_dir(),
            format: OutputFormat::Csv,
        }
    }
}

// --- sweep --------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: ScenarioConfig,
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Defaults depend on the scenario: omega in [0.50, 3.50] for single,
    /// [0.01, 3.00] for bell.
    pub omega_from: Option<f64>,
    pub omega_to: Option<f64>,
    pub omega_step: f64,
    pub eta_from: f64,
    pub eta_to: f64,
    pub eta_step: f64,
    pub window: WindowConfig,
    pub driven_threshold_fraction: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            n: 10,
            alpha1: 1.0,
            alpha2: 1.0,
            beta1: 1.0,
            beta2: 1.0,
            omega_from: None,
            omega_to: None,
            omega_step: 0.01,
            eta_from: 0.0,
            eta_to: 1.0,
            eta_step: 0.01,
            window: WindowConfig::default(),
            driven_threshold_fraction:
                spinchain::ParrondoConfig::DEFAULT_DRIVEN_THRESHOLD_FRACTION,
            out_dir: default_out_dir(),
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

impl SweepConfig {
    pub fn resolve_omega_range(&mut self) -> (f64, f64) {
        let (lo, hi) = match self.scenario.kind {
            ScenarioKind::Single => (0.50, 3.50),
            ScenarioKind::Bell => (0.01, 3.00),
        };
        let from = self.omega_from.unwrap_or(lo);
        let to = self.omega_to.unwrap_or(hi);
        self.omega_from = Some(from);
        self.omega_to = Some(to);
        (from, to)
    }
}

// --- table ----------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    pub id: u32,
    pub omega_step: f64,
    pub eta_step: f64,
    pub sweep_dtau: f64,
    /// Coarse-then-refine search; probes a subset of the full grid.
    pub refine: bool,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            id: 1,
            omega_step: 0.01,
            eta_step: 0.01,
            sweep_dtau: PeakConfig::DEFAULT_DTAU,
            refine: false,
            out_dir: default_out_dir(),
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

// --- disorder ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisorderConfig {
    pub scenario: ScenarioConfig,
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub omega: f64,
    pub eta: f64,
    pub which: WhichDelta,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    /// Deviation pairs (delta_alpha, delta_beta) for full time-series export.
    pub series_pairs: Vec<(f64, f64)>,
    pub window: WindowConfig,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for DisorderConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            n: 12,
            alpha1: 0.47,
            alpha2: 1.01,
            beta1: 1.0,
            beta2: 1.0,
            omega: 1.84,
            eta: 0.64,
            which: WhichDelta::DeltaAlpha,
            from: -0.2,
            to: 0.2,
            step: 0.01,
            series_pairs: Vec::new(),
            window: WindowConfig::default(),
            out_dir: default_out_dir(),
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

// --- peak -------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakCommandConfig {
    pub input: Option<PathBuf>,
    pub threshold_fraction: f64,
    pub out: Option<PathBuf>,
}

impl Default for PeakCommandConfig {
    fn default() -> Self {
        Self {
            input: None,
            threshold_fraction: PeakConfig::DEFAULT_THRESHOLD_FRACTION,
            out: None,
        }
    }
}

/// Loads a (possibly partial) config file for any command.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("bad config file {}", path.display()))
}

/// Writes the fully resolved config for `--dump-config`.
pub fn dump_config<T: Serialize>(config: &T, path: &PathBuf) -> Result<()> {
    let mut text = serde_json::to_string_pretty(config).context("config serialization")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
