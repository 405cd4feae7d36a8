//! Command-line driver over the interferometer library: phase sweeps,
//! sensitivity tables, cross-route invariant checks, and finite-shot
//! experiments, emitted as CSV or JSON.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, OutputFormat, PrescriptionChoice};

/// Exit codes: 0 success, 2 config error, 3 failed checks, 4 infeasible
/// numerics (truncation budget).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
    #[error("numerically infeasible: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::ChecksFailed { .. } => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

/// Truncation complaints from the library mean the requested cutoff cannot
/// carry the state; everything else is a bad request.
impl From<parity_proxy::Error> for CliError {
    fn from(e: parity_proxy::Error) -> Self {
        match e {
            parity_proxy::Error::InsufficientCutoff { .. }
            | parity_proxy::Error::CutoffTooSmall { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "parity-proxy",
    version,
    about = "Parity detection by intensity correlations in a squeezed-light interferometer",
    long_about = "Simulates a two-detector readout that recovers the photon-number parity of \
                  an interferometer output from intensity correlations. All angles are radians; \
                  gains and oscillator magnitudes are dimensionless."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the probe phase and tabulate the recovered parity signal
    Sweep(RunArgs),
    /// Tabulate the phase uncertainty and report its minimum
    Sensitivity(RunArgs),
    /// Run the cross-route invariant checks and report pass/fail
    Validate(RunArgs),
    /// Finite-shot simulation of the full detection chain
    Montecarlo(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep(_) => "sweep",
            Command::Sensitivity(_) => "sensitivity",
            Command::Validate(_) => "validate",
            Command::Montecarlo(_) => "montecarlo",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Sweep(a) | Command::Sensitivity(a) | Command::Validate(a) | Command::Montecarlo(a) => a,
        }
    }
}

/// One flag per config field; a set flag overrides the config file.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Declarative config file (TOML); flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Amplifier gain parameter
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// First probe phase (radians)
    #[arg(long, allow_negative_numbers = true)]
    pub phi_start: Option<f64>,
    /// Last probe phase (radians)
    #[arg(long, allow_negative_numbers = true)]
    pub phi_stop: Option<f64>,
    /// Number of phase-grid points
    #[arg(long)]
    pub steps: Option<usize>,
    /// Local-oscillator magnitude |beta|
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Measurement schedule used to invert for the pair moment
    #[arg(long, value_enum)]
    pub prescription: Option<PrescriptionChoice>,
    /// Shots per measurement setting (sampled runs)
    #[arg(long)]
    pub shots: Option<u64>,
    /// Master seed for sampled runs
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ladder size per mode on number-basis paths
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl RunArgs {
    /// Defaults, overlaid by the config file, overlaid by set flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(r) = self.r {
            cfg.r = r;
        }
        if let Some(phi_start) = self.phi_start {
            cfg.phi_start = phi_start;
        }
        if let Some(phi_stop) = self.phi_stop {
            cfg.phi_stop = phi_stop;
        }
        if let Some(steps) = self.steps {
            cfg.steps = steps;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(prescription) = self.prescription {
            cfg.prescription = prescription;
        }
        if let Some(shots) = self.shots {
            cfg.shots = shots;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(cutoff) = self.cutoff {
            cfg.cutoff = cutoff;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses, runs, and writes one invocation; the caller maps errors to exit
/// codes.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.command.args().resolve()?;
    let document = match &cli.command {
        Command::Sweep(_) => output::Document::sweep(commands::run_sweep(&cfg)?),
        Command::Sensitivity(_) => {
            let (rows, summary) = commands::run_sensitivity(&cfg)?;
            output::Document::sensitivity(rows, summary)
        }
        Command::Validate(_) => output::Document::validate(validate::run_checks(&cfg)),
        Command::Montecarlo(_) => output::Document::montecarlo(commands::run_montecarlo(&cfg)?),
    };
    document.write(&cfg)?;
    if let output::Body::Checks(checks) = &document.body {
        let failed = checks.iter().filter(|c| !c.passed).count();
        if failed > 0 {
            return Err(CliError::ChecksFailed { failed, total: checks.len() });
        }
    }
    Ok(())
}
