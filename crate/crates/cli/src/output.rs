//! Rendering: CSV with a `#`-prefixed header block, or a JSON mirror.
//! Floating-point values print with 17 significant digits so identical runs
//! produce identical bytes.

use serde::Serialize;
use serde_json::json;

use crate::commands::{MontecarloRow, SensitivityRow, SensitivitySummary, SweepRow};
use crate::config::ExperimentConfig;
use crate::validate::CheckOutcome;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits; round-trips every f64 exactly.
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug)]
pub enum Body {
    Sweep(Vec<SweepRow>),
    Sensitivity(Vec<SensitivityRow>),
    Checks(Vec<CheckOutcome>),
    Montecarlo(Vec<MontecarloRow>),
}

/// One finished run, ready to render.
#[derive(Debug)]
pub struct Document {
    pub command: &'static str,
    pub body: Body,
    pub summary: Option<SensitivitySummary>,
}

impl Document {
    pub fn sweep(rows: Vec<SweepRow>) -> Self {
        Self { command: "sweep", body: Body::Sweep(rows), summary: None }
    }

    pub fn sensitivity(rows: Vec<SensitivityRow>, summary: SensitivitySummary) -> Self {
        Self { command: "sensitivity", body: Body::Sensitivity(rows), summary: Some(summary) }
    }

    pub fn validate(checks: Vec<CheckOutcome>) -> Self {
        Self { command: "validate", body: Body::Checks(checks), summary: None }
    }

    pub fn montecarlo(rows: Vec<MontecarloRow>) -> Self {
        Self { command: "montecarlo", body: Body::Montecarlo(rows), summary: None }
    }

    fn header(&self, cfg: &ExperimentConfig) -> String {
        let mut h = String::new();
        h.push_str(&format!("# parity-proxy {VERSION}\n"));
        h.push_str(&format!("# command = {}\n", self.command));
        h.push_str(&format!("# r = {}\n", float17(cfg.r)));
        h.push_str(&format!("# phi_start = {}\n", float17(cfg.phi_start)));
        h.push_str(&format!("# phi_stop = {}\n", float17(cfg.phi_stop)));
        h.push_str(&format!("# steps = {}\n", cfg.steps));
        h.push_str(&format!("# beta = {}\n", float17(cfg.beta)));
        h.push_str(&format!("# prescription = {}\n", cfg.prescription.as_str()));
        h.push_str(&format!("# shots = {}\n", cfg.shots));
        h.push_str(&format!("# seed = {}\n", cfg.seed));
        h.push_str(&format!("# cutoff = {}\n", cfg.cutoff));
        if let Some(summary) = &self.summary {
            h.push_str(&format!("# delta_phi_min = {}\n", float17(summary.delta_phi_min)));
            h.push_str(&format!("# delta_phi_formula = {}\n", float17(summary.delta_phi_formula)));
            h.push_str(&format!("# at_minimum = {}\n", summary.at_minimum));
        }
        h
    }

    fn csv(&self, cfg: &ExperimentConfig) -> String {
        let mut s = self.header(cfg);
        match &self.body {
            Body::Sweep(rows) => {
                s.push_str("phi,s_proxy,s_closed_form,parity_gaussian,intensity\n");
                for row in rows {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        float17(row.phi),
                        float17(row.s_proxy),
                        float17(row.s_closed_form),
                        float17(row.parity_gaussian),
                        float17(row.intensity)
                    ));
                }
            }
            Body::Sensitivity(rows) => {
                s.push_str("phi,delta_phi\n");
                for row in rows {
                    s.push_str(&format!("{},{}\n", float17(row.phi), float17(row.delta_phi)));
                }
            }
            Body::Checks(checks) => {
                s.push_str("check,passed,max_deviation,tolerance,detail\n");
                for c in checks {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        c.check,
                        c.passed,
                        float17(c.max_deviation),
                        float17(c.tolerance),
                        csv_field(&c.detail)
                    ));
                }
            }
            Body::Montecarlo(rows) => {
                s.push_str("phi,s_estimate,stderr,shots\n");
                for row in rows {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        float17(row.phi),
                        float17(row.s_estimate),
                        float17(row.stderr),
                        row.shots
                    ));
                }
            }
        }
        s
    }

    fn json(&self, cfg: &ExperimentConfig) -> String {
        fn rows_json<T: Serialize>(rows: &[T]) -> serde_json::Value {
            serde_json::to_value(rows).expect("rows serialize")
        }
        let rows = match &self.body {
            Body::Sweep(rows) => rows_json(rows),
            Body::Sensitivity(rows) => rows_json(rows),
            Body::Checks(rows) => rows_json(rows),
            Body::Montecarlo(rows) => rows_json(rows),
        };
        let mut doc = json!({
            "tool": "parity-proxy",
            "version": VERSION,
            "command": self.command,
            "config": serde_json::to_value(cfg).expect("config serializes"),
            "rows": rows,
        });
        if let Some(summary) = &self.summary {
            doc["summary"] = serde_json::to_value(summary).expect("summary serializes");
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
        text.push('\n');
        text
    }

    /// Renders to the configured format and destination.
    pub fn write(&self, cfg: &ExperimentConfig) -> Result<(), CliError> {
        let text = match cfg.format {
            crate::config::OutputFormat::Csv => self.csv(cfg),
            crate::config::OutputFormat::Json => self.json(cfg),
        };
        match &cfg.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
