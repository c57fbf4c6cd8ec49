//! Geometric layer over the scalar solver: the continuity equation
//!
//!   ω^{n−1} = ω₀^{n−1} − s(n−1)( Ric(ω)∧α^{n−2}
//!                                − ℜ(√−1 ∂log(ωⁿ/αⁿ) ∧ ∂̄(α^{n−2})) ) > 0
//!
//! for Hermitian metrics against a Gauduchon background α. Given a
//! positivity certificate (T̂, φ_cert), the equation at s ≤ T̂ reduces to a
//! scalar Monge-Ampère problem through the volume form
//! Ω = ω₀ⁿ e^{φ_cert/((n−1)T̂)}; the solver unknown ψ rebuilds
//! ω^{n−1} = ω̂_s^{n−1} + √−1∂∂̄ψ∧α^{n−2} + ℜ(√−1∂ψ∧∂̄(α^{n−2})), and the
//! metric returns through the (n−1)-st root. Every solution is re-verified
//! against the original equation with an independent Chern-Ricci
//! evaluation.

mod estimate;
mod n2;

pub use estimate::{estimate_t, ProbeOutcome, ProbeRecord, TEstimate, TEstimateConfig};
pub use n2::continuity_n2_direct;

use num_complex::Complex64;
use thiserror::Error;

use crate::calculus::{self, CalculusError};
use crate::chern::{self, ChernError};
use crate::forms::{
    factorial, hodge_star, power_n_minus_1, re_part, wedge, Form11, FormN1N1, FormsError, PQForm,
};
use crate::grid::{GridError, ScalarField, TorusGrid};
use crate::solver::{
    continuation_solve_traced, ContinuationTrace, MAProblem, SolverConfig, SolverError,
    DEFAULT_GAUDUCHON_TOL,
};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("α is not Gauduchon: ∂∂̄(α^(n−1)) sup-norm {defect:e} exceeds {tol:e}")]
    NotGauduchon { defect: f64, tol: f64 },
    #[error("certificate invalid at s = {s}: ω̂_s^(n−1) has min eigenvalue {min_eig:e}")]
    CertificateInvalid { s: f64, min_eig: f64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(
        "reconstruction inconsistency: continuity-equation defect {defect:e} \
         exceeds 100·tol = {bound:e}"
    )]
    ReconstructionInconsistency { defect: f64, bound: f64 },
    #[error("Gauduchon conformal factor failed: {0}")]
    ConformalFactor(String),
}

/// One solvable configuration of the continuity equation: initial metric,
/// Gauduchon background, target parameter s, and a positivity certificate
/// (T̂, φ_cert) with s ≤ T̂.
#[derive(Debug, Clone)]
pub struct ContinuityInstance {
    pub omega0: Form11,
    pub alpha: Form11,
    pub s: f64,
    pub t_hat: f64,
    pub phi_cert: ScalarField,
}

impl ContinuityInstance {
    pub fn new(
        omega0: Form11,
        alpha: Form11,
        s: f64,
        t_hat: f64,
        phi_cert: ScalarField,
    ) -> Result<Self, DriverError> {
        omega0.grid().same_grid(alpha.grid())?;
        omega0.grid().same_grid(phi_cert.grid())?;
        if !(s >= 0.0) || !(t_hat > 0.0) || s > t_hat {
            return Err(DriverError::InvalidInstance(format!(
                "need 0 ≤ s ≤ T̂ with T̂ > 0, got s = {s}, T̂ = {t_hat}"
            )));
        }
        let (e, pt) = omega0.min_eig_with_point();
        if e <= 0.0 {
            return Err(DriverError::InvalidInstance(format!(
                "ω₀ not positive definite (min eig {e:e} at point {pt})"
            )));
        }
        let defect = chern::gauduchon_defect(&alpha)?;
        if defect > DEFAULT_GAUDUCHON_TOL {
            return Err(DriverError::NotGauduchon {
                defect,
                tol: DEFAULT_GAUDUCHON_TOL,
            });
        }
        phi_cert.check_real(1e-10)?;
        Ok(Self {
            omega0,
            alpha,
            s,
            t_hat,
            phi_cert,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.omega0.grid()
    }

    /// Certificate validity = positivity of ω̂ at s = T̂, which equals
    /// Φ_T̂ + √−1∂∂̄φ_cert∧α^{n−2} + ℜ(√−1∂φ_cert∧∂̄(α^{n−2})).
    pub fn validate_certificate(&self) -> Result<f64, DriverError> {
        let hat = omega_hat_n1(self, self.t_hat)?;
        let min_eig = min_eig_n1(&hat);
        if min_eig <= 0.0 {
            return Err(DriverError::CertificateInvalid {
                s: self.t_hat,
                min_eig,
            });
        }
        Ok(min_eig)
    }
}

/// Solution of the continuity equation at one s.
#[derive(Debug, Clone)]
pub struct ContinuitySolution {
    /// ω^{n−1}(s)/(n−1)! in the matrix convention (the normalisation of
    /// `power_n_minus_1`, so `power_n_minus_1(omega) == omega_n1`)
    pub omega_n1: FormN1N1,
    /// recovered metric ω(s)
    pub omega: Form11,
    /// the scalar unknown u = ψ/s of the reduction
    pub u: ScalarField,
    /// sup-norm residual of the original continuity equation, evaluated
    /// with an independent Chern-Ricci recomputation
    pub defect: f64,
    pub trace: ContinuationTrace,
}

/// Φ_s and its positivity margin.
#[derive(Debug, Clone)]
pub struct PhiS {
    /// the literal (n−1,n−1)-form ω₀^{n−1} − s(n−1)(Ric(ω₀)∧α^{n−2} − …)
    pub form: FormN1N1,
    pub min_eig: f64,
}

/// Φ_s := ω₀^{n−1} − s(n−1)(Ric(ω₀)∧α^{n−2} − ℜ(√−1∂log(ω₀ⁿ/αⁿ)∧∂̄(α^{n−2}))).
/// Non-positivity is information (the naive certificate fails), not an error.
pub fn compute_phi_s(omega0: &Form11, alpha: &Form11, s: f64) -> Result<PhiS, DriverError> {
    let ric = chern::chern_ricci(omega0)?;
    let logratio = chern::log_volume_ratio(omega0, alpha)?;
    let pq = correction_family(omega0, alpha, &ric, &logratio, s)?;
    let form = FormN1N1::from_pq(&pq)?;
    let min_eig = min_eig_n1(&form);
    Ok(PhiS { form, min_eig })
}

/// ω₀^{n−1} − s(n−1)(ric∧α^{n−2} − ℜ(√−1 ∂logratio ∧ ∂̄(α^{n−2}))) as a
/// literal (n−1,n−1) PQForm, for the given Ricci form and log-density.
fn correction_family(
    omega0: &Form11,
    alpha: &Form11,
    ric: &Form11,
    logratio: &ScalarField,
    s: f64,
) -> Result<PQForm, DriverError> {
    let n = alpha.dim();
    let apow = alpha_power_n2(alpha);
    let base = power_n_minus_1(omega0)?
        .to_pq()
        .scale(Complex64::new(factorial(n - 1), 0.0));
    let term1 = wedge(&ric.to_pq(), &apow)?;
    let db_apow = calculus::pq_d_antiholo(&apow)?;
    let dlog = calculus::d_holo_form(logratio)?.scale(Complex64::i());
    let term2 = re_part(&wedge(&dlog, &db_apow)?)?;
    let factor = Complex64::new(-s * (n as f64 - 1.0), 0.0);
    base.add(&term1.sub(&term2)?.scale(factor))
        .map_err(DriverError::from)
}

/// α^{n−2} as a PQForm (the constant 1 for n = 2).
fn alpha_power_n2(alpha: &Form11) -> PQForm {
    if alpha.dim() == 2 {
        PQForm::one(*alpha.grid())
    } else {
        alpha.to_pq()
    }
}

fn min_eig_n1(f: &FormN1N1) -> f64 {
    let n = f.dim();
    let mut worst = f64::INFINITY;
    for pt in 0..f.grid().num_points() {
        worst = worst.min(crate::hermitian::min_eig(n, f.at(pt)));
    }
    worst
}

/// ω̂_s^{n−1}/(n−1)! for the instance's volume form Ω, as a FormN1N1.
fn omega_hat_n1(instance: &ContinuityInstance, s: f64) -> Result<FormN1N1, DriverError> {
    let n = instance.grid().dim();
    // ψ_c = φ_cert/((n−1)T̂); Ric(Ω) = Ric(ω₀) − i∂∂̄ψ_c,
    // log(Ω/αⁿ) = log(ω₀ⁿ/αⁿ) + ψ_c
    let psi_c = instance
        .phi_cert
        .scale_re(1.0 / ((n as f64 - 1.0) * instance.t_hat));
    let ric_omega = chern::chern_ricci(&instance.omega0)?.sub(&calculus::i_ddbar(&psi_c)?);
    let logratio = chern::log_volume_ratio(&instance.omega0, &instance.alpha)?.add(&psi_c);
    let pq = correction_family(&instance.omega0, &instance.alpha, &ric_omega, &logratio, s)?;
    Ok(FormN1N1::from_pq(
        &pq.scale(Complex64::new(1.0 / factorial(n - 1), 0.0)),
    )?)
}

/// Reduce the continuity equation at `instance.s` to a scalar problem:
/// ϖ = (1/(n−1)!)∗ω̂_s^{n−1}, G = φ_cert/T̂ + (n−1)log(det ω₀/det α),
/// λ = 1/s. Fails when the certificate does not keep ω̂_s^{n−1} positive.
pub fn reduce(instance: &ContinuityInstance) -> Result<MAProblem, DriverError> {
    Ok(reduce_full(instance)?.0)
}

fn reduce_full(instance: &ContinuityInstance) -> Result<(MAProblem, FormN1N1), DriverError> {
    if instance.s == 0.0 {
        return Err(DriverError::InvalidInstance(
            "the reduction needs s > 0 (λ = 1/s); s = 0 is the initial metric".into(),
        ));
    }
    let hat = omega_hat_n1(instance, instance.s)?;
    let min_eig = min_eig_n1(&hat);
    if min_eig <= 0.0 {
        return Err(DriverError::CertificateInvalid {
            s: instance.s,
            min_eig,
        });
    }
    let mut varpi = Form11::from_pq(&hodge_star(&hat.to_pq(), &instance.alpha)?)?;
    varpi.hermitize();
    let g = instance
        .phi_cert
        .scale_re(1.0 / instance.t_hat)
        .add(&chern::log_volume_ratio(&instance.omega0, &instance.alpha)?
            .scale_re(instance.grid().dim() as f64 - 1.0));
    let lambda = 1.0 / instance.s;
    let prob = MAProblem::new(instance.alpha.clone(), varpi, g, lambda)?;
    Ok((prob, hat))
}

/// Solve the continuity equation at `instance.s`: reduce, run the
/// continuation solver, rebuild ω^{n−1} and ω, and verify the original
/// equation with an independently recomputed Chern-Ricci form.
pub fn solve_at_s(
    instance: &ContinuityInstance,
    cfg: &SolverConfig,
) -> Result<ContinuitySolution, DriverError> {
    let grid = *instance.grid();
    if instance.s == 0.0 {
        let omega_n1 = power_n_minus_1(&instance.omega0)?;
        return Ok(ContinuitySolution {
            omega_n1,
            omega: instance.omega0.clone(),
            u: ScalarField::zeros(grid),
            defect: 0.0,
            trace: ContinuationTrace::default(),
        });
    }
    let (prob, hat) = reduce_full(instance)?;
    let (state, trace) = continuation_solve_traced(&prob, cfg, None)?;
    let psi = state.phi;
    let u = psi.scale_re(1.0 / instance.s);

    // ω^{n−1}/(n−1)! = ω̂_s^{n−1}/(n−1)!
    //   + (1/(n−1)!)[√−1∂∂̄ψ∧α^{n−2} + ℜ(√−1∂ψ∧∂̄(α^{n−2}))]
    let n = grid.dim();
    let apow = alpha_power_n2(&instance.alpha);
    let hess_pq = calculus::i_ddbar(&psi)?.to_pq();
    let corr1 = wedge(&hess_pq, &apow)?;
    let db_apow = calculus::pq_d_antiholo(&apow)?;
    let dpsi = calculus::d_holo_form(&psi)?.scale(Complex64::i());
    let corr2 = re_part(&wedge(&dpsi, &db_apow)?)?;
    let corr = corr1
        .add(&corr2)?
        .scale(Complex64::new(1.0 / factorial(n - 1), 0.0));
    let omega_n1 = FormN1N1::from_pq(&hat.to_pq().add(&corr)?)?;
    omega_n1.check_positive(0.0)?;
    let omega = omega_n1.root_n_minus_1()?;

    let defect = continuity_defect(&omega, &instance.omega0, &instance.alpha, instance.s)?;
    let bound = 100.0 * cfg.tol;
    if defect > bound {
        return Err(DriverError::ReconstructionInconsistency { defect, bound });
    }
    Ok(ContinuitySolution {
        omega_n1,
        omega,
        u,
        defect,
        trace,
    })
}

/// Sup-norm residual of the original continuity equation evaluated at ω,
/// with Ric(ω) and log(ωⁿ/αⁿ) recomputed from scratch.
pub fn continuity_defect(
    omega: &Form11,
    omega0: &Form11,
    alpha: &Form11,
    s: f64,
) -> Result<f64, DriverError> {
    let n = alpha.dim();
    let ric = chern::chern_ricci(omega)?;
    let logratio = chern::log_volume_ratio(omega, alpha)?;
    // ω₀^{n−1} − s(n−1)(Ric(ω)∧α^{n−2} − ℜ(…)) − ω^{n−1}
    let rhs = correction_family(omega0, alpha, &ric, &logratio, s)?;
    let lhs = power_n_minus_1(omega)?
        .to_pq()
        .scale(Complex64::new(factorial(n - 1), 0.0));
    Ok(lhs.sub(&rhs)?.sup_abs())
}

/// Gauduchon representative of the conformal class of β: the positive
/// factor w (mean 1) with ∂∂̄(w·β^{n−1}) = 0, so α = w^{1/(n−1)}β is
/// Gauduchon. Solved spectrally as a linear system; the one-dimensional
/// kernel is pinned by augmenting with the grid mean.
pub fn gauduchon_conformal_factor(beta: &Form11, tol: f64) -> Result<ScalarField, DriverError> {
    let grid = *beta.grid();
    let b_pq = power_n_minus_1(beta)?.to_pq();
    let ncomp = b_pq.num_comps();
    let np = grid.num_points();

    // ∂∂̄ of a real (n−1,n−1)-form is anti-real, so its top coefficient is
    // purely imaginary for even n and real for odd n.
    let take_im = grid.dim() % 2 == 0;
    let pick = move |c: Complex64| if take_im { c.im } else { c.re };

    let ddbar_coeff = |w: &[f64]| -> Result<ScalarField, DriverError> {
        // (n,n)-coefficient of ∂∂̄(w·B)
        let mut wb = b_pq.clone();
        for c in 0..ncomp {
            let comp = wb.comp_mut(c);
            for (v, &s) in comp.iter_mut().zip(w) {
                *v *= s;
            }
        }
        let dd = calculus::pq_d_holo(&calculus::pq_d_antiholo(&wb)?)?;
        Ok(ScalarField::from_values(grid, dd.comp(0).to_vec()))
    };

    // calibrate a Laplacian-scale constant for the preconditioner off a
    // single probe mode
    let tau = std::f64::consts::TAU;
    let probe: Vec<f64> = (0..np)
        .map(|pt| (tau * grid.coords_of(pt)[0]).sin())
        .collect();
    let e_probe = ddbar_coeff(&probe)?;
    let probe_scale = e_probe.max_abs().max(1e-14);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let c0 = probe_scale / pi2;

    // The plain operator has the Gauduchon factor in its kernel; adding the
    // grid mean pins it and leaves mean-zero solutions untouched.
    let apply = |v: &[f64]| -> Vec<f64> {
        let e = ddbar_coeff(v).expect("Gauduchon operator application");
        let mean: f64 = v.iter().sum::<f64>() / np as f64;
        e.values().iter().map(|c| pick(*c) + mean).collect()
    };

    let rhs: Vec<f64> = {
        let ones = vec![1.0; np];
        let e1 = ddbar_coeff(&ones)?;
        e1.values().iter().map(|c| -pick(*c)).collect()
    };

    let precond = move |v: &[f64]| -> Vec<f64> {
        let field = ScalarField::from_values(
            grid,
            v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        );
        let spectrum = field.spectrum();
        let out = ScalarField::from_spectrum_symbol(grid, &spectrum, |k| {
            let q: f64 = k.iter().map(|&ka| ka * ka).sum();
            if q == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(1.0 / (c0 * pi2 * q), 0.0)
            }
        });
        out.values().iter().map(|c| c.re).collect()
    };

    let opts = crate::solver::KrylovOptions {
        restart: 80,
        max_iters: 2000,
        tol,
    };
    let sol = crate::solver::gmres(apply, precond, &rhs, &opts)
        .map_err(|f| DriverError::ConformalFactor(format!("linear solve stalled: {f}")))?;
    let mut w = vec![0.0f64; np];
    for (o, v) in w.iter_mut().zip(&sol.x) {
        *o = 1.0 + v;
    }
    if w.iter().any(|&x| x <= 0.0) {
        return Err(DriverError::ConformalFactor(
            "conformal factor not positive; base metric too far from Gauduchon".into(),
        ));
    }
    Ok(ScalarField::from_values(
        grid,
        w.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    ))
}
