//! Scenario registry and execution. Every scenario fills a [`RunReport`];
//! solver failures are captured into the report (the caller still writes
//! it) rather than aborting the process.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gauduchon_core::calculus::i_ddbar;
use gauduchon_core::chern;
use gauduchon_core::driver::{
    self, continuity_n2_direct, estimate_t, ContinuityInstance, ProbeOutcome,
};
use gauduchon_core::eigen;
use gauduchon_core::forms::{
    hodge_star, p_alpha, power_n_minus_1, wedge, Form11, FormN1N1, PQForm,
};
use gauduchon_core::grid::{ScalarField, TorusGrid};
use gauduchon_core::solver::{assemble_tilde_omega, varpi_from, ContinuationTrace, MAProblem};

use crate::config::RunConfig;
use crate::dd::Dd;
use crate::dump;
use crate::report::{Params, RunReport, RunStatus};

/// Scenario catalog with one-line descriptions, for `list-scenarios`.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("flat", "flat ω₀ = α: the fixed point of the continuity equation, over an s-schedule"),
        ("conformal", "n = 2 conformal ω₀ = e^u·δ against flat Gauduchon α, solved at one s"),
        ("manufactured", "known-answer problem: G generated from a chosen φ*, recovery gated at 1e-8"),
        ("kahler-n2-crosscheck", "driver pipeline vs the directly coded n = 2 solver ω = ω₀ − s·Ric(ω)"),
        ("estimate-T", "lower-bound search for the maximal existence time on the conformal preset"),
        ("identity-suite", "randomized sweep of the star/determinant/eigenvalue identities"),
    ]
}

/// Amplitude of the conformal preset u = ε sin(2πx¹).
pub const CONFORMAL_EPS: f64 = 0.1;

/// Analytic positivity-loss threshold of the naive certificate (φ = 0) for
/// the n = 2 conformal preset: s* = e^ε/(2π²ε).
pub fn conformal_naive_threshold(eps: f64) -> f64 {
    eps.exp() / (2.0 * PI * PI * eps)
}

pub fn run_scenario(cfg: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    let mut report = RunReport::new(
        &cfg.scenario,
        Params {
            n: cfg.n,
            res: cfg.res,
            seed: cfg.seed,
            s: cfg.s,
            s_schedule: cfg.s_schedule.clone(),
            lambda: cfg.lambda,
        },
    );
    let started = Instant::now();
    let result = match cfg.scenario.as_str() {
        "flat" => scenario_flat(cfg, out_dir, &mut report),
        "conformal" => scenario_conformal(cfg, out_dir, &mut report),
        "manufactured" => scenario_manufactured(cfg, out_dir, &mut report),
        "kahler-n2-crosscheck" => scenario_crosscheck(cfg, out_dir, &mut report),
        "estimate-T" => scenario_estimate_t(cfg, out_dir, &mut report),
        "identity-suite" => scenario_identity_suite(cfg, &mut report),
        other => bail!("unknown scenario '{other}'"),
    };
    report
        .timings_ms
        .insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    result?;
    if report.status == RunStatus::Ok && !report.all_checks_pass() {
        report.status = if cfg.scenario == "identity-suite" {
            RunStatus::IdentityViolation
        } else {
            RunStatus::SolverFailure
        };
        if report.failure.is_none() {
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} = {:e} > {:e}", c.name, c.value, c.tolerance))
                .collect();
            report.failure = Some(failed.join("; "));
        }
    }
    Ok(report)
}

fn record_trace(report: &mut RunReport, trace: &ContinuationTrace) {
    for step in &trace.steps {
        report.t_path.push(step.t);
        report.min_eig_margins.push(step.min_eig_margin);
    }
    for s in &trace.residual_history {
        report
            .residual_history
            .push((s.t, s.newton_iter, s.norm));
    }
}

fn capture_solver_failure(report: &mut RunReport, err: impl std::fmt::Display) {
    report.status = RunStatus::SolverFailure;
    report.failure = Some(err.to_string());
}

// ---------------------------------------------------------------------------

fn scenario_flat(cfg: &RunConfig, out_dir: &Path, report: &mut RunReport) -> Result<()> {
    let grid = TorusGrid::new(cfg.n, cfg.res)?;
    let id = Form11::identity(grid);
    let schedule: Vec<f64> = match (&cfg.s_schedule, cfg.s) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => vec![s],
        (None, None) => vec![0.1, 1.0, 10.0],
    };
    let solver = cfg.solver_config();
    let mut defect_max = 0.0f64;
    let mut last = None;
    for (k, &s) in schedule.iter().enumerate() {
        let inst = ContinuityInstance::new(
            id.clone(),
            id.clone(),
            s,
            s.max(1.0),
            ScalarField::zeros(grid),
        )?;
        match driver::solve_at_s(&inst, &solver) {
            Ok(sol) => {
                record_trace(report, &sol.trace);
                report.metric(&format!("defect_s{k}"), sol.defect);
                report.metric(
                    &format!("omega_drift_s{k}"),
                    sol.omega.sup_diff(&inst.omega0),
                );
                defect_max = defect_max.max(sol.defect);
                last = Some(sol);
            }
            Err(e) => {
                capture_solver_failure(report, &e);
                break;
            }
        }
    }
    report.gate("defect_max", defect_max, 1e-9);
    if let Some(sol) = last {
        dump::dump_scalar(out_dir, "u", &sol.u)?;
        dump::dump_form11(out_dir, "omega", &sol.omega)?;
    }
    dump::dump_convergence(out_dir, &report.residual_history)?;
    Ok(())
}

fn conformal_omega0(grid: TorusGrid, eps: f64) -> Form11 {
    let u = ScalarField::from_real_fn(grid, move |x| eps * (TAU * x[0]).sin());
    Form11::conformal(&u)
}

fn scenario_conformal(cfg: &RunConfig, out_dir: &Path, report: &mut RunReport) -> Result<()> {
    if cfg.n != 2 {
        bail!("the conformal preset is n = 2 only (its threshold oracle is two-dimensional)");
    }
    let grid = TorusGrid::new(2, cfg.res)?;
    let omega0 = conformal_omega0(grid, CONFORMAL_EPS);
    let s_star = conformal_naive_threshold(CONFORMAL_EPS);
    let s = cfg.s.unwrap_or(0.5 * s_star);
    report.metric("naive_threshold", s_star);
    report.metric("s", s);
    let solver = cfg.solver_config();
    let inst = ContinuityInstance::new(
        omega0,
        Form11::identity(grid),
        s,
        s.max(1e-12),
        ScalarField::zeros(grid),
    )?;
    match driver::solve_at_s(&inst, &solver) {
        Ok(sol) => {
            record_trace(report, &sol.trace);
            report.gate("defect", sol.defect, 100.0 * solver.tol);
            report.metric("u_sup", sol.u.sup_re());
            report.metric("omega_min_eig", sol.omega.min_eig());
            dump::dump_scalar(out_dir, "u", &sol.u)?;
            dump::dump_form11(out_dir, "omega", &sol.omega)?;
        }
        Err(e) => capture_solver_failure(report, &e),
    }
    dump::dump_convergence(out_dir, &report.residual_history)?;
    Ok(())
}

/// Manufactured truth for n = 2 and the gentler n = 3 variant.
pub fn manufactured_phi_star(grid: TorusGrid) -> ScalarField {
    if grid.dim() == 2 {
        ScalarField::from_real_fn(grid, |x| {
            0.1 * (TAU * x[0]).sin() + 0.05 * (TAU * x[1]).cos()
        })
    } else {
        ScalarField::from_real_fn(grid, |x| {
            0.03 * (TAU * x[0]).sin() + 0.02 * (TAU * x[1]).cos()
        })
    }
}

/// Background data of the manufactured problem: flat α for n = 2; for n = 3
/// a non-Kähler Gauduchon α built from a conformally flat base by the
/// numerically solved conformal factor, so the gradient term Z is active.
pub fn manufactured_background(grid: TorusGrid) -> Result<(Form11, Form11)> {
    if grid.dim() == 2 {
        Ok((Form11::identity(grid), Form11::identity(grid)))
    } else {
        let u = ScalarField::from_real_fn(grid, |x| 0.05 * (TAU * x[0]).sin());
        let beta = Form11::conformal(&u);
        let w = driver::gauduchon_conformal_factor(&beta, 1e-13)
            .context("building the Gauduchon background")?;
        let n = grid.dim();
        let mut alpha = beta.clone();
        for pt in 0..grid.num_points() {
            let f = w.values()[pt].re.powf(1.0 / (n as f64 - 1.0));
            for v in alpha.at_mut(pt) {
                *v *= f;
            }
        }
        let varpi = varpi_from(&Form11::identity(grid), &alpha)?;
        Ok((alpha, varpi))
    }
}

/// Assemble the manufactured problem around φ*: G := log(ω̃(φ*)ⁿ/αⁿ) − λφ*.
pub fn manufactured_problem(
    grid: TorusGrid,
    lambda: f64,
) -> Result<(MAProblem, ScalarField)> {
    let (alpha, varpi) = manufactured_background(grid)?;
    let phi_star = manufactured_phi_star(grid);
    let tmp = MAProblem::new(
        alpha.clone(),
        varpi.clone(),
        ScalarField::zeros(grid),
        lambda,
    )?;
    let om_star = assemble_tilde_omega(&phi_star, &tmp)?;
    let g = chern::log_volume_ratio(&om_star, &alpha)?.sub(&phi_star.scale_re(lambda));
    Ok((MAProblem::new(alpha, varpi, g, lambda)?, phi_star))
}

fn scenario_manufactured(cfg: &RunConfig, out_dir: &Path, report: &mut RunReport) -> Result<()> {
    let grid = TorusGrid::new(cfg.n, cfg.res)?;
    let lambda = cfg.lambda.unwrap_or(1.0);
    let (prob, phi_star) = manufactured_problem(grid, lambda)?;
    let solver = cfg.solver_config();
    match gauduchon_core::solver::continuation_solve_traced(&prob, &solver, None) {
        Ok((state, trace)) => {
            record_trace(report, &trace);
            let err = state.phi.sub(&phi_star).max_abs();
            report.gate("phi_error_sup", err, 1e-8);
            report.metric("newton_steps_total", trace.total_newton_steps as f64);
            report.metric("final_residual_sup", state.residual_norm);
            report.metric("min_eig_margin", state.min_eig_margin);
            dump::dump_scalar(out_dir, "phi", &state.phi)?;
            dump::dump_scalar(out_dir, "phi_star", &phi_star)?;
        }
        Err(e) => capture_solver_failure(report, &e),
    }
    dump::dump_convergence(out_dir, &report.residual_history)?;
    Ok(())
}

fn scenario_crosscheck(cfg: &RunConfig, out_dir: &Path, report: &mut RunReport) -> Result<()> {
    if cfg.n != 2 {
        bail!("the Kähler cross-check is n = 2 only");
    }
    let grid = TorusGrid::new(2, cfg.res)?;
    let rho = ScalarField::from_real_fn(grid, |x| {
        0.02 * (TAU * x[0]).sin() * (TAU * x[1]).sin()
    });
    let omega0 = Form11::identity(grid).add(&i_ddbar(&rho)?);
    let s = cfg.s.unwrap_or(0.2);
    let solver = cfg.solver_config();

    let direct = match continuity_n2_direct(&omega0, s, &solver) {
        Ok(om) => om,
        Err(e) => {
            capture_solver_failure(report, &e);
            return Ok(());
        }
    };
    let inst = ContinuityInstance::new(
        omega0,
        Form11::identity(grid),
        s,
        s,
        ScalarField::zeros(grid),
    )?;
    match driver::solve_at_s(&inst, &solver) {
        Ok(sol) => {
            record_trace(report, &sol.trace);
            let diff = direct.sup_diff(&sol.omega);
            report.gate("crosscheck_diff", diff, 1e-7);
            report.metric("defect", sol.defect);
            dump::dump_form11(out_dir, "omega_driver", &sol.omega)?;
            dump::dump_form11(out_dir, "omega_direct", &direct)?;
        }
        Err(e) => capture_solver_failure(report, &e),
    }
    dump::dump_convergence(out_dir, &report.residual_history)?;
    Ok(())
}

fn scenario_estimate_t(cfg: &RunConfig, out_dir: &Path, report: &mut RunReport) -> Result<()> {
    if cfg.n != 2 {
        bail!("the estimate-T preset is n = 2 only");
    }
    let grid = TorusGrid::new(2, cfg.res)?;
    let omega0 = conformal_omega0(grid, CONFORMAL_EPS);
    let alpha = Form11::identity(grid);
    let est_cfg = cfg.estimate_config();
    let s_star = conformal_naive_threshold(CONFORMAL_EPS);
    report.metric("naive_threshold", s_star);
    match estimate_t(&omega0, &alpha, &est_cfg) {
        Ok(est) => {
            report.metric("lower_bound", est.lower_bound);
            report.metric("reached_s_max", if est.reached_s_max { 1.0 } else { 0.0 });
            report.metric("probes", est.probes.len() as f64);
            // the bound may only fall short of the naive threshold by the
            // search resolution
            let shortfall =
                (s_star.min(est_cfg.s_max) - est_cfg.s_resolution) - est.lower_bound;
            report.gate("threshold_shortfall", shortfall.max(0.0), 0.0);

            let mut csv = String::from("s,outcome,detail\n");
            for p in &est.probes {
                let (tag, detail) = match &p.outcome {
                    ProbeOutcome::Solved {
                        defect,
                        newton_steps,
                    } => ("solved".to_string(), format!("defect={defect:e};newton={newton_steps}")),
                    ProbeOutcome::CertificateInvalid { min_eig } => {
                        ("certificate-invalid".to_string(), format!("min_eig={min_eig:e}"))
                    }
                    ProbeOutcome::SolverFailed { reason } => {
                        ("solver-failed".to_string(), reason.replace(',', ";"))
                    }
                };
                csv.push_str(&format!("{},{},{}\n", p.s, tag, detail));
            }
            std::fs::write(out_dir.join("probes.csv"), csv)?;
        }
        Err(e) => capture_solver_failure(report, &e),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

pub fn rand_metric(rng: &mut ChaCha8Rng, grid: TorusGrid, shift: f64) -> Form11 {
    let n = grid.dim();
    let mut entries = vec![Complex64::default(); n * n];
    for (k, e) in entries.iter_mut().enumerate() {
        let re: f64 = rng.random_range(-0.5..0.5);
        let im: f64 = if k / n == k % n {
            0.0
        } else {
            rng.random_range(-0.5..0.5)
        };
        *e = Complex64::new(re + if k / n == k % n { shift } else { 0.0 }, im);
    }
    let bump: f64 = rng.random_range(-0.2..0.2);
    let mut g = Form11::from_entry_fn(grid, |x, i, j| {
        entries[i * n + j] * (1.0 + bump * (TAU * x[0]).sin())
    });
    g.hermitize();
    g
}

pub fn rand_pq(rng: &mut ChaCha8Rng, grid: TorusGrid, p: usize, q: usize) -> PQForm {
    let mut f = PQForm::zeros(grid, p, q);
    for c in 0..f.num_comps() {
        let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        f.comp_mut(c).fill(v);
    }
    f
}

/// Σ λ_k f_k − n evaluated in double-double arithmetic straight from μ, so
/// the identity is checked below f64 conditioning even at extreme spreads.
pub fn lambda_f_identity_dd(mu: &[f64]) -> f64 {
    let n = mu.len();
    let n1 = Dd::from(n as f64 - 1.0);
    let mut sum_mu = Dd::ZERO;
    let mut sum_inv = Dd::ZERO;
    let inv: Vec<Dd> = mu.iter().map(|&m| Dd::from(m).recip()).collect();
    for k in 0..n {
        sum_mu = sum_mu.add(Dd::from(mu[k]));
        sum_inv = sum_inv.add(inv[k]);
    }
    let mut acc = Dd::ZERO;
    for k in 0..n {
        // λ_k = Σμ − (n−1)μ_k, f_k = (Σ 1/μ − 1/μ_k)/(n−1)
        let lam = sum_mu.sub(n1.mul(Dd::from(mu[k])));
        let f = sum_inv.sub(inv[k]).div(n1);
        acc = acc.add(lam.mul(f));
    }
    acc.sub(Dd::from(n as f64)).to_f64()
}

fn scenario_identity_suite(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reps = 100usize;

    let mut star_err = 0.0f64;
    let mut star_real_err = 0.0f64;
    let mut det_pow_err = 0.0f64;
    let mut det_star_err = 0.0f64;
    let mut p_alpha_err = 0.0f64;
    let mut root_err = 0.0f64;
    let mut convert_err = 0.0f64;

    for n in [2usize, 3] {
        let grid = TorusGrid::new(n, 4)?;
        let fact: f64 = (1..n).map(|k| k as f64).product();
        for rep in 0..reps {
            let alpha = rand_metric(&mut rng, grid, 3.0);
            // star involution over every bidegree (cycled to keep the
            // sweep at `reps` forms per bidegree across the run)
            for p in 0..=n {
                for q in 0..=n {
                    let phi = rand_pq(&mut rng, grid, p, q);
                    let ss = hodge_star(&hodge_star(&phi, &alpha)?, &alpha)?;
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    let diff = ss
                        .sub(&phi.scale(Complex64::new(sign, 0.0)))?
                        .sup_abs();
                    star_err = star_err.max(diff);
                }
            }

            // real operator: conj(∗φ) = ∗conj(φ)
            let phi = rand_pq(&mut rng, grid, 1, n - 1);
            let lhs = hodge_star(&phi, &alpha)?.conj();
            let rhs = hodge_star(&phi.conj(), &alpha)?;
            star_real_err = star_real_err.max(lhs.sup_diff(&rhs));

            // determinant identities on a random positive pair
            let phi_m = rand_metric(&mut rng, grid, 3.0 + 0.1 * (rep % 7) as f64);
            let xi_m = rand_metric(&mut rng, grid, 3.5);
            let dp = phi_m.det();
            let dx = xi_m.det();
            let pw = power_n_minus_1(&phi_m)?.det();
            for pt in 0..grid.num_points() {
                let want = dp.values()[pt].powu(n as u32 - 1);
                let rel = (pw.values()[pt] - want).norm() / want.norm().max(1e-30);
                det_pow_err = det_pow_err.max(rel);
            }
            let sphi = FormN1N1::from_pq(&hodge_star(&phi_m.to_pq(), &alpha)?)?.det();
            let sxi = FormN1N1::from_pq(&hodge_star(&xi_m.to_pq(), &alpha)?)?.det();
            for pt in 0..grid.num_points() {
                let lhs = sphi.values()[pt] / sxi.values()[pt];
                let rhs = dp.values()[pt] / dx.values()[pt];
                let rel = (lhs - rhs).norm() / rhs.norm().max(1e-30);
                det_star_err = det_star_err.max(rel);
            }

            // P_α dual routes
            let xi = rand_metric(&mut rng, grid, 0.0);
            let algebraic = p_alpha(&xi, &alpha)?;
            let apow = if n == 2 {
                PQForm::one(grid)
            } else {
                alpha.to_pq()
            };
            let starred = hodge_star(&wedge(&xi.to_pq(), &apow)?, &alpha)?
                .scale(Complex64::new(1.0 / fact, 0.0));
            p_alpha_err = p_alpha_err.max(starred.sup_diff(&algebraic.to_pq()));

            // root ∘ power and the canonical conversions
            let back = power_n_minus_1(&phi_m)?.root_n_minus_1()?;
            root_err = root_err.max(back.sup_diff(&phi_m) / phi_m.sup_abs().max(1.0));
            let round = Form11::from_pq(&phi_m.to_pq())?;
            convert_err = convert_err.max(round.sup_diff(&phi_m));
            let psi = power_n_minus_1(&phi_m)?;
            let round_n1 = FormN1N1::from_pq(&psi.to_pq())?;
            convert_err = convert_err.max(round_n1.sup_diff(&psi));
        }
    }

    report.gate("star_involution_max_err", star_err, 1e-12);
    report.gate("star_real_operator_max_err", star_real_err, 1e-12);
    report.gate("det_power_max_rel_err", det_pow_err, 1e-10);
    report.gate("det_star_ratio_max_rel_err", det_star_err, 1e-10);
    report.gate("p_alpha_routes_max_err", p_alpha_err, 1e-10);
    report.gate("root_power_round_trip_max_err", root_err, 1e-12);
    report.gate("conversion_round_trip_max_err", convert_err, 1e-13);

    // eigenvalue identities, 1e5 samples per dimension
    let mut identity_err = 0.0f64;
    let mut violations = 0usize;
    let mut mu_route_err = 0.0f64;
    for n in [2usize, 3] {
        for _ in 0..100_000 {
            let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            if mu.iter().any(|&m| m <= 0.0) {
                continue;
            }
            identity_err = identity_err.max(lambda_f_identity_dd(&mu).abs());
            let mut lam = eigen::p_map_inverse(&mu).unwrap();
            lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let fv = eigen::f_values(&lam).unwrap();
            let s: f64 = fv
                .mu
                .iter()
                .zip(&fv.grad_f_tilde)
                .map(|(m, f)| m * f)
                .sum();
            mu_route_err = mu_route_err.max((s - n as f64).abs());
            if !eigen::check_inequalities(&lam).unwrap().all_hold() {
                violations += 1;
            }
        }
    }
    report.gate("eigen_lambda_f_identity_max_err", identity_err, 1e-12);
    report.gate("eigen_mu_route_max_err", mu_route_err, 1e-12);
    report.gate("eigen_inequality_violations", violations as f64, 0.0);
    Ok(())
}
