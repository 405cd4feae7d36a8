//! Experiment configuration: defaults, declarative file, flag overrides.
//! Precedence is defaults < config file < flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use parity_proxy::homodyne::Prescription;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrescriptionChoice {
    /// Two bright oscillator phases plus one dark run.
    Three,
    /// Four bright oscillator phases; the dark term cancels.
    Four,
}

impl From<PrescriptionChoice> for Prescription {
    fn from(choice: PrescriptionChoice) -> Self {
        match choice {
            PrescriptionChoice::Three => Prescription::ThreeMeasurement,
            PrescriptionChoice::Four => Prescription::FourPhase,
        }
    }
}

impl PrescriptionChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            PrescriptionChoice::Three => "three",
            PrescriptionChoice::Four => "four",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comma-separated table with a `#`-prefixed header block.
    Csv,
    /// One object holding the config, the rows, and any summary.
    Json,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Everything a run needs. Angles are radians, gains dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Amplifier gain parameter of the squeezed pair.
    pub r: f64,
    /// First probe phase of the grid.
    pub phi_start: f64,
    /// Last probe phase of the grid.
    pub phi_stop: f64,
    /// Number of grid points (both endpoints included once steps > 1).
    pub steps: usize,
    /// Local-oscillator magnitude |beta|.
    pub beta: f64,
    pub prescription: PrescriptionChoice,
    /// Shots per measurement setting (sampled runs only).
    pub shots: u64,
    pub seed: u64,
    /// Ladder size per mode on number-basis paths.
    pub cutoff: usize,
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            r: 0.5,
            phi_start: 0.0,
            phi_stop: std::f64::consts::PI,
            steps: 64,
            beta: 2.0,
            prescription: PrescriptionChoice::Three,
            shots: 100_000,
            seed: 42,
            cutoff: 40,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

/// Sampled runs keep the oscillator inside the ladder budget.
pub const MAX_SAMPLED_BETA: f64 = 3.0;
pub const CUTOFF_RANGE: std::ops::RangeInclusive<usize> = 8..=120;

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The probe phases, start to stop inclusive.
    pub fn phi_grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.phi_start];
        }
        let span = self.phi_stop - self.phi_start;
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.phi_start + span * (k as f64) / last).collect()
    }

    /// Shared invariants; command-specific ones live with the commands.
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, value) in [
            ("r", self.r),
            ("phi-start", self.phi_start),
            ("phi-stop", self.phi_stop),
            ("beta", self.beta),
        ] {
            if !value.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite, got {value}")));
            }
        }
        if self.r < 0.0 {
            return Err(CliError::Config(format!("r must be >= 0, got {}", self.r)));
        }
        if self.beta < 0.0 {
            return Err(CliError::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.steps < 1 {
            return Err(CliError::Config("steps must be >= 1".into()));
        }
        if !CUTOFF_RANGE.contains(&self.cutoff) {
            return Err(CliError::Config(format!(
                "cutoff must lie in [{}, {}], got {}",
                CUTOFF_RANGE.start(),
                CUTOFF_RANGE.end(),
                self.cutoff
            )));
        }
        Ok(())
    }
}
