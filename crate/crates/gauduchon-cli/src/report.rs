//! Structured run reports and the tolerance-aware regression diff.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "gauduchon-report-v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub scenario: String,
    pub params: Params,
    /// named scalar results of the run
    pub metrics: BTreeMap<String, f64>,
    /// declared per-metric comparison tolerances for `verify`
    pub tolerances: BTreeMap<String, f64>,
    /// named pass/fail gates evaluated during the run
    pub checks: Vec<CheckLine>,
    pub t_path: Vec<f64>,
    /// (t, newton iteration, residual sup-norm)
    pub residual_history: Vec<(f64, usize, f64)>,
    pub min_eig_margins: Vec<f64>,
    pub timings_ms: BTreeMap<String, f64>,
    pub status: RunStatus,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub res: usize,
    pub seed: u64,
    pub s: Option<f64>,
    pub s_schedule: Option<Vec<f64>>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    SolverFailure,
    IdentityViolation,
}

impl RunReport {
    pub fn new(scenario: &str, params: Params) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            scenario: scenario.to_string(),
            params,
            metrics: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            t_path: Vec::new(),
            residual_history: Vec::new(),
            min_eig_margins: Vec::new(),
            timings_ms: BTreeMap::new(),
            status: RunStatus::Ok,
            failure: None,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    /// Record a gated metric: value, its gate, and the pass flag; also
    /// declares the verify tolerance.
    pub fn gate(&mut self, name: &str, value: f64, tolerance: f64) -> bool {
        let pass = value <= tolerance;
        self.metrics.insert(name.to_string(), value);
        self.tolerances.insert(name.to_string(), tolerance);
        self.checks.push(CheckLine {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
        pass
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let report: RunReport =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if report.schema != SCHEMA {
            bail!("unsupported report schema '{}'", report.schema);
        }
        Ok(report)
    }
}

#[derive(Debug, Clone)]
pub struct DiffLine {
    pub name: String,
    pub report: f64,
    pub baseline: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DiffSummary {
    pub compared: usize,
    pub violations: Vec<DiffLine>,
}

/// Compare the scalar metrics of two reports within the baseline's declared
/// tolerances. Key-set or scenario mismatches are schema errors.
pub fn verify(report: &RunReport, baseline: &RunReport) -> Result<DiffSummary> {
    if report.scenario != baseline.scenario {
        bail!(
            "schema mismatch: scenario '{}' vs baseline '{}'",
            report.scenario,
            baseline.scenario
        );
    }
    let keys_r: Vec<&String> = report.metrics.keys().collect();
    let keys_b: Vec<&String> = baseline.metrics.keys().collect();
    if keys_r != keys_b {
        bail!(
            "schema mismatch: metric keys differ\n  report:   {:?}\n  baseline: {:?}",
            keys_r,
            keys_b
        );
    }
    let mut summary = DiffSummary::default();
    for (name, &b) in &baseline.metrics {
        let r = report.metrics[name];
        // absent tolerance means the metric must match exactly
        let tol = baseline.tolerances.get(name).copied().unwrap_or(0.0);
        summary.compared += 1;
        let diff = (r - b).abs();
        let equal_enough = diff <= tol || (r == b) || (r.is_nan() && b.is_nan());
        if !equal_enough {
            summary.violations.push(DiffLine {
                name: name.clone(),
                report: r,
                baseline: b,
                tolerance: tol,
            });
        }
    }
    Ok(summary)
}
