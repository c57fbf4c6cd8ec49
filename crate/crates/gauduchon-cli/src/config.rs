//! Run configuration: a documented TOML key-value format, validated before
//! anything executes.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gauduchon_core::driver::TEstimateConfig;
use gauduchon_core::solver::SolverConfig;

pub const SCENARIOS: &[&str] = &[
    "flat",
    "conformal",
    "manufactured",
    "kahler-n2-crosscheck",
    "estimate-T",
    "identity-suite",
];

/// Top-level config file. Unknown keys are rejected so typos surface as
/// config errors (exit 2) rather than silently running defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// one of [`SCENARIOS`]
    pub scenario: String,
    /// complex dimension (2 or 3)
    #[serde(default = "default_n")]
    pub n: usize,
    /// points per real axis; a power of two
    #[serde(default = "default_res")]
    pub res: usize,
    /// seed for the randomized suites
    #[serde(default)]
    pub seed: u64,
    /// output directory for dumps, reports and CSVs
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// path parameter for the single-s scenarios
    #[serde(default)]
    pub s: Option<f64>,
    /// several s values (flat scenario)
    #[serde(default)]
    pub s_schedule: Option<Vec<f64>>,
    /// λ override for the manufactured scenario
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub solver: SolverToml,
    #[serde(default)]
    pub estimate_t: EstimateToml,
}

fn default_n() -> usize {
    2
}

fn default_res() -> usize {
    16
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("gauduchon-out")
}

/// Solver tolerances and damping schedule; every field optional, defaults
/// match `SolverConfig::default()`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverToml {
    pub tol: Option<f64>,
    pub lin_tol: Option<f64>,
    pub min_dt: Option<f64>,
    pub max_newton: Option<usize>,
    pub eps_pos: Option<f64>,
    pub dt_init: Option<f64>,
    pub dt_growth: Option<f64>,
    pub dt_shrink: Option<f64>,
    pub fast_newton_steps: Option<usize>,
    pub ls_backtrack: Option<f64>,
    pub ls_min: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateToml {
    pub s_init: Option<f64>,
    pub s_max: Option<f64>,
    pub s_resolution: Option<f64>,
    pub growth: Option<f64>,
    pub max_probes: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            bail!(
                "unknown scenario '{}'; known: {}",
                self.scenario,
                SCENARIOS.join(", ")
            );
        }
        if !self.res.is_power_of_two() {
            bail!("res must be a power of two, got {}", self.res);
        }
        // grid-level constraints (n, res range) are checked here too so
        // config errors stay exit code 2
        gauduchon_core::TorusGrid::new(self.n, self.res)
            .map_err(|e| anyhow::anyhow!("grid: {e}"))?;
        let solver = self.solver_config();
        for (name, v) in [
            ("solver.tol", solver.tol),
            ("solver.lin_tol", solver.lin_tol),
            ("solver.min_dt", solver.min_dt),
            ("solver.eps_pos", solver.eps_pos),
            ("solver.dt_init", solver.dt_init),
            ("solver.ls_backtrack", solver.ls_backtrack),
            ("solver.ls_min", solver.ls_min),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{name} must be a positive finite number, got {v}");
            }
        }
        if let Some(s) = self.s {
            if !(s >= 0.0) {
                bail!("s must be non-negative, got {s}");
            }
        }
        if let Some(sched) = &self.s_schedule {
            if sched.is_empty() || sched.iter().any(|&s| !(s >= 0.0)) {
                bail!("s_schedule must be non-empty with non-negative entries");
            }
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                bail!("lambda must be positive, got {l}");
            }
        }
        let est = self.estimate_config();
        if !(est.s_init > 0.0) || !(est.s_resolution > 0.0) || est.s_max < est.s_init {
            bail!(
                "estimate_t: need 0 < s_init ≤ s_max and s_resolution > 0 (got {} / {} / {})",
                est.s_init,
                est.s_max,
                est.s_resolution
            );
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let s = &self.solver;
        SolverConfig {
            tol: s.tol.unwrap_or(d.tol),
            lin_tol: s.lin_tol.unwrap_or(d.lin_tol),
            min_dt: s.min_dt.unwrap_or(d.min_dt),
            max_newton: s.max_newton.unwrap_or(d.max_newton),
            eps_pos: s.eps_pos.unwrap_or(d.eps_pos),
            dt_init: s.dt_init.unwrap_or(d.dt_init),
            dt_growth: s.dt_growth.unwrap_or(d.dt_growth),
            dt_shrink: s.dt_shrink.unwrap_or(d.dt_shrink),
            fast_newton_steps: s.fast_newton_steps.unwrap_or(d.fast_newton_steps),
            ls_backtrack: s.ls_backtrack.unwrap_or(d.ls_backtrack),
            ls_min: s.ls_min.unwrap_or(d.ls_min),
            divergence_window: d.divergence_window,
            gmres_restart: d.gmres_restart,
            gmres_max_iters: d.gmres_max_iters,
        }
    }

    pub fn estimate_config(&self) -> TEstimateConfig {
        let d = TEstimateConfig::default();
        let e = &self.estimate_t;
        TEstimateConfig {
            s_init: e.s_init.unwrap_or(d.s_init),
            s_max: e.s_max.unwrap_or(d.s_max),
            s_resolution: e.s_resolution.unwrap_or(d.s_resolution),
            growth: e.growth.unwrap_or(d.growth),
            max_probes: e.max_probes.unwrap_or(d.max_probes),
            solver: self.solver_config(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: RunConfig = toml::from_str("scenario = \"flat\"").unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n, 2);
        assert_eq!(cfg.res, 16);
        assert_eq!(cfg.solver_config().tol, 1e-9);
    }

    #[test]
    fn unknown_scenario_and_keys_rejected() {
        let cfg: RunConfig = toml::from_str("scenario = \"warp\"").unwrap();
        assert!(cfg.validate().is_err());
        assert!(toml::from_str::<RunConfig>("scenario = \"flat\"\nbogus = 1").is_err());
    }

    #[test]
    fn res_must_be_power_of_two() {
        let cfg: RunConfig = toml::from_str("scenario = \"flat\"\nres = 12").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn negative_tolerance_rejected() {
        let cfg: RunConfig =
            toml::from_str("scenario = \"flat\"\n[solver]\ntol = -1e-9").unwrap();
        assert!(cfg.validate().is_err());
    }
}
