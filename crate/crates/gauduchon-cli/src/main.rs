//! `gauduchon` — scenario runner for the continuity-equation solver.
//!
//! Exit codes: 0 success, 1 verify found violations, 2 configuration or
//! I/O error, 3 solver failure (the report is still written), 4
//! identity-suite violation.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use gauduchon_cli::config::RunConfig;
use gauduchon_cli::report::{self, RunReport, RunStatus};
use gauduchon_cli::scenarios;

#[derive(Parser)]
#[command(name = "gauduchon", version, about = "continuity equation of Gauduchon metrics on flat complex tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario described by a TOML config file
    Run { config: PathBuf },
    /// Compare a run report against a baseline within declared tolerances
    Verify { report: PathBuf, baseline: PathBuf },
    /// List the registered scenarios
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match cli.command {
        Command::Run { config } => match cmd_run(&config) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::Verify { report, baseline } => match cmd_verify(&report, &baseline) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::ListScenarios => {
            for (name, blurb) in scenarios::catalog() {
                println!("{name:<22} {blurb}");
            }
            ExitCode::SUCCESS
        }
    }
}

/// `GAUDUCHON_THREADS` caps the rayon pool; parallel kernels write disjoint
/// outputs, so results do not depend on the thread count.
fn init_threads() {
    if let Ok(v) = std::env::var("GAUDUCHON_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn cmd_run(config_path: &PathBuf) -> Result<ExitCode> {
    let cfg = RunConfig::load(config_path)?;
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let report = scenarios::run_scenario(&cfg, &cfg.out_dir)?;
    let report_path = cfg.out_dir.join("report.json");
    report.write(&report_path)?;
    print_summary(&report);
    println!("report: {}", report_path.display());
    Ok(match report.status {
        RunStatus::Ok => ExitCode::SUCCESS,
        RunStatus::SolverFailure => ExitCode::from(3),
        RunStatus::IdentityViolation => ExitCode::from(4),
    })
}

fn print_summary(report: &RunReport) {
    println!("scenario: {}", report.scenario);
    for check in &report.checks {
        println!(
            "  [{}] {} = {:.3e} (tolerance {:.3e})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.value,
            check.tolerance
        );
    }
    if let Some(f) = &report.failure {
        println!("  failure: {f}");
    }
}

fn cmd_verify(report_path: &PathBuf, baseline_path: &PathBuf) -> Result<ExitCode> {
    let report = RunReport::load(report_path)?;
    let baseline = RunReport::load(baseline_path)?;
    let summary = report::verify(&report, &baseline)?;
    if summary.violations.is_empty() {
        println!("verify: {} metrics within tolerance", summary.compared);
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "verify: {} of {} metrics out of tolerance",
            summary.violations.len(),
            summary.compared
        );
        for v in &summary.violations {
            println!(
                "  {}: report {:.6e} vs baseline {:.6e} (|Δ| = {:.3e} > {:.3e})",
                v.name,
                v.report,
                v.baseline,
                (v.report - v.baseline).abs(),
                v.tolerance
            );
        }
        Ok(ExitCode::from(1))
    }
}
