//! Numerical estimation of the maximal existence time T of the continuity
//! equation: march s upward (geometric growth, then bisection refinement),
//! bootstrapping the positivity certificate from each solved metric.
//!
//! The returned value is explicitly a LOWER bound: T is a supremum over all
//! smooth certificate functions, and a failed probe only means this search
//! found no certificate, not that none exists.

use crate::forms::Form11;
use crate::grid::ScalarField;
use crate::solver::SolverConfig;

use super::{solve_at_s, ContinuityInstance, DriverError};

#[derive(Debug, Clone)]
pub struct TEstimateConfig {
    /// first probe value
    pub s_init: f64,
    /// search ceiling; reaching it reports "no obstruction found up to s_max"
    pub s_max: f64,
    /// bisection stops when the bracket is this tight
    pub s_resolution: f64,
    /// geometric growth factor of the probe sequence
    pub growth: f64,
    /// hard cap on solve attempts
    pub max_probes: usize,
    pub solver: SolverConfig,
}

impl Default for TEstimateConfig {
    fn default() -> Self {
        Self {
            s_init: 0.05,
            s_max: 1.0,
            s_resolution: 0.02,
            growth: 2.0,
            max_probes: 40,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ProbeOutcome {
    Solved { defect: f64, newton_steps: usize },
    CertificateInvalid { min_eig: f64 },
    SolverFailed { reason: String },
}

#[derive(Debug, Clone)]
pub struct ProbeRecord {
    pub s: f64,
    pub outcome: ProbeOutcome,
}

#[derive(Debug, Clone)]
pub struct TEstimate {
    /// the largest s at which a solution was produced and verified — a
    /// numerical lower bound for T
    pub lower_bound: f64,
    /// true when the search exhausted s_max without obstruction
    pub reached_s_max: bool,
    pub probes: Vec<ProbeRecord>,
}

/// March s upward with certificate bootstrapping. The running certificate
/// density ρ = φ_cert/T̂ starts at 0 and after each success at s becomes
/// ρ ← ρ + u, i.e. (n−1)·log(ωⁿ(s)/ω₀ⁿ) — the exact certificate the solved
/// metric provides.
pub fn estimate_t(
    omega0: &Form11,
    alpha: &Form11,
    cfg: &TEstimateConfig,
) -> Result<TEstimate, DriverError> {
    let grid = *omega0.grid();
    if !(cfg.s_init > 0.0) || cfg.s_max < cfg.s_init || !(cfg.s_resolution > 0.0) {
        return Err(DriverError::InvalidInstance(format!(
            "bad search range: s_init = {}, s_max = {}, resolution = {}",
            cfg.s_init, cfg.s_max, cfg.s_resolution
        )));
    }

    let mut rho = ScalarField::zeros(grid);
    let mut lo = 0.0f64;
    let mut hi_failed: Option<f64> = None;
    let mut s_next = cfg.s_init;
    let mut probes = Vec::new();

    while probes.len() < cfg.max_probes {
        let s = s_next.min(cfg.s_max);
        let phi_cert = rho.scale_re(s);
        let attempt = ContinuityInstance::new(
            omega0.clone(),
            alpha.clone(),
            s,
            s,
            phi_cert,
        )
        .and_then(|inst| solve_at_s(&inst, &cfg.solver));

        match attempt {
            Ok(sol) => {
                probes.push(ProbeRecord {
                    s,
                    outcome: ProbeOutcome::Solved {
                        defect: sol.defect,
                        newton_steps: sol.trace.total_newton_steps,
                    },
                });
                lo = s;
                rho = rho.add(&sol.u);
                if (s - cfg.s_max).abs() < f64::EPSILON * cfg.s_max {
                    return Ok(TEstimate {
                        lower_bound: cfg.s_max,
                        reached_s_max: true,
                        probes,
                    });
                }
                s_next = match hi_failed {
                    None => (s * cfg.growth).min(cfg.s_max),
                    Some(h) => {
                        if h - lo <= cfg.s_resolution {
                            break;
                        }
                        0.5 * (lo + h)
                    }
                };
            }
            Err(err) => {
                let outcome = match &err {
                    DriverError::CertificateInvalid { min_eig, .. } => {
                        ProbeOutcome::CertificateInvalid { min_eig: *min_eig }
                    }
                    other => ProbeOutcome::SolverFailed {
                        reason: other.to_string(),
                    },
                };
                probes.push(ProbeRecord { s, outcome });
                hi_failed = Some(s);
                if s - lo <= cfg.s_resolution {
                    break;
                }
                s_next = 0.5 * (lo + s);
            }
        }
    }

    Ok(TEstimate {
        lower_bound: lo,
        reached_s_max: false,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;

    #[test]
    fn flat_instance_reaches_s_max() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let id = Form11::identity(grid);
        let cfg = TEstimateConfig {
            s_max: 4.0,
            ..TEstimateConfig::default()
        };
        let est = estimate_t(&id, &id, &cfg).unwrap();
        assert!(est.reached_s_max);
        assert_eq!(est.lower_bound, 4.0);
        assert!(est
            .probes
            .iter()
            .all(|p| matches!(p.outcome, ProbeOutcome::Solved { .. })));
    }

    #[test]
    fn bad_range_is_rejected() {
        let grid = TorusGrid::new(2, 4).unwrap();
        let id = Form11::identity(grid);
        let cfg = TEstimateConfig {
            s_init: 0.0,
            ..TEstimateConfig::default()
        };
        assert!(estimate_t(&id, &id, &cfg).is_err());
    }
}
