//! Independently coded n = 2 continuity-equation solver, used as a
//! cross-check oracle for the full reduction pipeline.
//!
//! For n = 2 the α-terms drop out and the equation is just
//! ω = ω₀ − s·Ric(ω). Writing v = log(ωⁿ/ω₀ⁿ) turns it into the scalar
//! fixed-point problem
//!
//!   F(v) = log det(ω₀ − s·Ric(ω₀) + s·√−1∂∂̄v) − log det ω₀ − v = 0,
//!
//! which this module attacks directly with damped Newton — no continuity
//! path, no Hodge star, no ϖ. Agreement with the driver pipeline is an
//! end-to-end consistency check, since the two routes share only the
//! spectral calculus primitives.

use num_complex::Complex64;

use crate::calculus;
use crate::chern;
use crate::forms::Form11;
use crate::grid::ScalarField;
use crate::hermitian;
use crate::solver::{gmres, KrylovOptions, SolverConfig};

use super::DriverError;

/// Solve ω = ω₀ − s·Ric(ω) on a complex 2-torus. `s` must stay below the
/// positivity threshold of ω₀ − s·Ric(ω₀) reachable from v = 0.
pub fn continuity_n2_direct(
    omega0: &Form11,
    s: f64,
    cfg: &SolverConfig,
) -> Result<Form11, DriverError> {
    let grid = *omega0.grid();
    assert_eq!(grid.dim(), 2, "direct solver is n = 2 only");
    let n = 2usize;
    if s == 0.0 {
        return Ok(omega0.clone());
    }

    let logdet0 = chern::log_det(omega0)?;
    // fixed part ω₀ − s·Ric(ω₀)
    let base = omega0.sub(&chern::chern_ricci(omega0)?.scale(s));

    let omega_of = |v: &ScalarField| -> Result<Form11, DriverError> {
        let mut om = base.clone();
        om.axpy(s, &calculus::i_ddbar(v)?);
        Ok(om)
    };
    let residual_of = |v: &ScalarField, om: &Form11| -> Option<ScalarField> {
        let mut out = ScalarField::zeros(grid);
        for pt in 0..grid.num_points() {
            let ld = hermitian::logdet_pd(n, om.at(pt))?;
            out.values_mut()[pt] = Complex64::new(
                ld - logdet0.values()[pt].re - v.values()[pt].re,
                0.0,
            );
        }
        Some(out)
    };

    let mut v = ScalarField::zeros(grid);
    let mut om = omega_of(&v)?;
    let mut r = residual_of(&v, &om).ok_or_else(|| {
        DriverError::CertificateInvalid {
            s,
            min_eig: om.min_eig(),
        }
    })?;
    let mut rnorm = r.sup_re();

    for _iter in 0..cfg.max_newton {
        if rnorm <= cfg.tol {
            om.check_positive(cfg.eps_pos)?;
            return Ok(om);
        }

        // Newton: dF(δ) = s·tr(ω⁻¹ i∂∂̄δ) − δ
        let om_inv = om.pointwise_inverse()?;
        let mut winv_mean = hermitian::zero_mat();
        for pt in 0..grid.num_points() {
            for e in 0..n * n {
                winv_mean[e] += om_inv.at(pt)[e];
            }
        }
        for e in winv_mean.iter_mut() {
            *e /= grid.num_points() as f64;
        }

        let apply = |x: &[f64]| -> Vec<f64> {
            let u = ScalarField::from_values(
                grid,
                x.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            );
            let hess = calculus::i_ddbar(&u).expect("Hessian");
            let mut out = vec![0.0f64; x.len()];
            for pt in 0..grid.num_points() {
                let tr = hermitian::trace_mul(n, om_inv.at(pt), hess.at(pt)).re;
                out[pt] = s * tr - x[pt];
            }
            out
        };
        let tau_c = std::f64::consts::TAU;
        let precond = |x: &[f64]| -> Vec<f64> {
            let f = ScalarField::from_values(
                grid,
                x.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            );
            let spectrum = f.spectrum();
            let out = ScalarField::from_spectrum_symbol(grid, &spectrum, |k| {
                let mut quad = 0.0;
                for j in 0..n {
                    for i in 0..n {
                        let kj = Complex64::new(k[j], -k[n + j]);
                        let ki = Complex64::new(k[i], -k[n + i]);
                        quad += (kj.conj() * winv_mean[j * n + i] * ki).re;
                    }
                }
                Complex64::new(1.0 / (-s * 0.25 * tau_c * tau_c * quad - 1.0), 0.0)
            });
            out.values().iter().map(|c| c.re).collect()
        };

        let rhs: Vec<f64> = r.values().iter().map(|c| -c.re).collect();
        let opts = KrylovOptions {
            restart: cfg.gmres_restart,
            max_iters: cfg.gmres_max_iters,
            tol: cfg.lin_tol,
        };
        let sol = gmres(apply, precond, &rhs, &opts).map_err(|f| {
            DriverError::ConformalFactor(format!("n2 direct linear solve stalled: {f}"))
        })?;
        let delta = ScalarField::from_values(
            grid,
            sol.x.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        );
        let hess_delta = calculus::i_ddbar(&delta)?;

        let mut tau = 1.0f64;
        let mut progressed = false;
        while tau >= cfg.ls_min {
            let mut cand_om = om.clone();
            cand_om.axpy(s * tau, &hess_delta);
            let mut cand_v = v.clone();
            cand_v.axpy(Complex64::new(tau, 0.0), &delta);
            if let Some(cand_r) = residual_of(&cand_v, &cand_om) {
                let cn = cand_r.sup_re();
                if cn < rnorm {
                    v = cand_v;
                    om = cand_om;
                    r = cand_r;
                    rnorm = cn;
                    progressed = true;
                    break;
                }
            }
            tau *= cfg.ls_backtrack;
        }
        if !progressed {
            return Err(DriverError::InvalidInstance(format!(
                "n2 direct solver stalled at residual {rnorm:e} (s = {s})"
            )));
        }
    }
    if rnorm <= cfg.tol {
        Ok(om)
    } else {
        Err(DriverError::InvalidInstance(format!(
            "n2 direct solver did not converge: residual {rnorm:e} after {} iterations",
            cfg.max_newton
        )))
    }
}
