//! The scalar Monge-Ampère-type equation
//!
//!   log( ω̃(φ)ⁿ / αⁿ ) = λφ + G,
//!   ω̃(φ) = ϖ + (1/(n−1))[(Δφ)α − √−1∂∂̄φ] + Z(dφ),
//!
//! on the flat torus, solved by a method of continuity in t through the
//! family λφ + (1−t)G₀ + tG with G₀ = log(ϖⁿ/αⁿ), which is exactly solved
//! by φ = 0 at t = 0. Each t-level runs a damped Newton iteration whose
//! line search never accepts an iterate with min eig(ω̃) ≤ ε_pos, and the
//! t-step adapts: halve on failure, double on fast convergence.
//!
//! The map φ ↦ ω̃(φ) is affine, so the Gateaux derivative of the residual
//! is exactly B(u) = h^{j̄i}·(ω̃-linear part of u)_{ij̄} − λu with h = ω̃(φ₀);
//! its second-order coefficient Θ^{j̄i} = (1/(n−1))((tr_{ω̃₀}α)α^{j̄i} − h^{j̄i})
//! stays positive definite while ω̃₀ > 0, which is the ellipticity the
//! continuation relies on.

mod krylov;

pub use krylov::{gmres, KrylovFailure, KrylovOptions, KrylovResult};

use num_complex::Complex64;
use thiserror::Error;

use crate::calculus::{self, CalculusError};
use crate::chern::{self, ChernError};
use crate::forms::{
    factorial, hodge_star, power_n_minus_1, re_part, wedge, Form11, FormsError, PQForm,
};
use crate::grid::{GridError, ScalarField, TorusGrid};
use crate::hermitian;

pub const DEFAULT_GAUDUCHON_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("ω̃ lost positivity at point {point} (min eigenvalue {min_eig:e}, t = {t})")]
    PositivityLoss { t: f64, point: usize, min_eig: f64 },
    #[error(
        "continuation step underflow at t = {t} (dt = {dt:e} < min_dt): {reason}; \
         residual ∞-norm {residual_norm:e}, ‖φ‖∞ = {phi_norm:e}"
    )]
    TStepUnderflow {
        t: f64,
        dt: f64,
        reason: String,
        residual_norm: f64,
        phi_norm: f64,
    },
    #[error(
        "Newton diverged at t = {t}: no residual progress over {window} iterations \
         (residual ∞-norm {residual_norm:e})"
    )]
    NewtonDivergence {
        t: f64,
        window: usize,
        residual_norm: f64,
    },
    #[error(
        "positivity breakdown not recoverable by damping at t = {t} \
         (worst point {point}, min eigenvalue {min_eig:e})"
    )]
    PositivityBreakdown { t: f64, point: usize, min_eig: f64 },
}

/// Data of the scalar equation: Gauduchon background α, reference form ϖ,
/// right-hand data G, and the zeroth-order coefficient λ > 0.
#[derive(Debug, Clone)]
pub struct MAProblem {
    pub alpha: Form11,
    pub varpi: Form11,
    pub g: ScalarField,
    pub lambda: f64,
}

impl MAProblem {
    /// Validates every invariant: λ > 0, α and ϖ positive definite, and
    /// ∂∂̄(α^{n−1}) vanishing to `DEFAULT_GAUDUCHON_TOL`.
    pub fn new(
        alpha: Form11,
        varpi: Form11,
        g: ScalarField,
        lambda: f64,
    ) -> Result<Self, SolverError> {
        Self::with_gauduchon_tol(alpha, varpi, g, lambda, DEFAULT_GAUDUCHON_TOL)
    }

    pub fn with_gauduchon_tol(
        alpha: Form11,
        varpi: Form11,
        g: ScalarField,
        lambda: f64,
        tol_gauduchon: f64,
    ) -> Result<Self, SolverError> {
        if !(lambda > 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "λ must be positive, got {lambda}"
            )));
        }
        alpha.grid().same_grid(varpi.grid())?;
        alpha.grid().same_grid(g.grid())?;
        let (e, pt) = alpha.min_eig_with_point();
        if e <= 0.0 {
            return Err(SolverError::InvalidProblem(format!(
                "α not positive definite (min eig {e:e} at point {pt})"
            )));
        }
        let (e, pt) = varpi.min_eig_with_point();
        if e <= 0.0 {
            return Err(SolverError::InvalidProblem(format!(
                "ϖ not positive definite (min eig {e:e} at point {pt})"
            )));
        }
        let defect = chern::gauduchon_defect(&alpha)?;
        if defect > tol_gauduchon {
            return Err(SolverError::InvalidProblem(format!(
                "α fails the Gauduchon check: ∂∂̄(α^(n−1)) sup-norm {defect:e} > {tol_gauduchon:e}"
            )));
        }
        Ok(Self {
            alpha,
            varpi,
            g,
            lambda,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.alpha.grid()
    }
}

/// One accepted point on the continuity path.
#[derive(Debug, Clone)]
pub struct ContinuationState {
    pub t: f64,
    pub phi: ScalarField,
    pub residual_norm: f64,
    /// smallest eigenvalue of ω̃ over the grid; > 0 for any accepted state
    pub min_eig_margin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualSample {
    pub t: f64,
    pub newton_iter: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceStep {
    pub t: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub min_eig_margin: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ContinuationTrace {
    pub steps: Vec<TraceStep>,
    pub residual_history: Vec<ResidualSample>,
    pub total_newton_steps: usize,
}

/// Solver knobs. Defaults implement the documented contract: residual
/// tolerance 1e−9, linear relative residual 1e−10, t-step start 0.25 with
/// halving floor 1e−4, positivity margin ε_pos = 1e−8.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tol: f64,
    pub lin_tol: f64,
    pub min_dt: f64,
    pub max_newton: usize,
    pub eps_pos: f64,
    pub dt_init: f64,
    pub dt_growth: f64,
    pub dt_shrink: f64,
    /// accepting a t-level in at most this many Newton steps doubles dt
    pub fast_newton_steps: usize,
    pub ls_backtrack: f64,
    pub ls_min: f64,
    /// consecutive no-progress Newton iterations before declaring divergence
    pub divergence_window: usize,
    pub gmres_restart: usize,
    pub gmres_max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            lin_tol: 1e-10,
            min_dt: 1e-4,
            max_newton: 30,
            eps_pos: 1e-8,
            dt_init: 0.25,
            dt_growth: 2.0,
            dt_shrink: 0.5,
            fast_newton_steps: 3,
            ls_backtrack: 0.5,
            ls_min: 1e-3,
            divergence_window: 5,
            gmres_restart: 60,
            gmres_max_iters: 800,
        }
    }
}

// ---------------------------------------------------------------------------
// Z(dφ) and the prepared engine
// ---------------------------------------------------------------------------

/// The first-order map Z(dφ) = (1/(n−1)!) ∗ ℜ(√−1 ∂φ ∧ ∂̄(α^{n−2})),
/// with ∂̄(α^{n−2}) cached: it is identically zero for n = 2 (α⁰ = 1) and
/// for ∂̄-closed α.
pub(crate) struct ZOperator {
    db_apow: Option<PQForm>,
}

impl ZOperator {
    pub(crate) fn new(alpha: &Form11) -> Result<Self, SolverError> {
        let n = alpha.grid().dim();
        if n == 2 {
            return Ok(Self { db_apow: None });
        }
        // α^{n−2} = α for n = 3
        let db = calculus::pq_d_antiholo(&alpha.to_pq())?;
        let db_apow = if db.sup_abs() == 0.0 { None } else { Some(db) };
        Ok(Self { db_apow })
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.db_apow.is_none()
    }

    pub(crate) fn apply(&self, phi: &ScalarField, alpha: &Form11) -> Result<Form11, SolverError> {
        match &self.db_apow {
            None => Ok(Form11::zeros(*alpha.grid())),
            Some(db) => {
                let n = alpha.grid().dim();
                let dphi = calculus::d_holo_form(phi)?.scale(Complex64::i());
                let wedge_part = wedge(&dphi, db)?;
                let real_part = re_part(&wedge_part)?;
                let starred = hodge_star(&real_part, alpha)?
                    .scale(Complex64::new(1.0 / factorial(n - 1), 0.0));
                Ok(Form11::from_pq(&starred)?)
            }
        }
    }
}

/// Everything that depends only on the problem data, computed once per
/// solve: α⁻¹, log det α, G₀, and the cached Z machinery.
pub(crate) struct Engine<'p> {
    prob: &'p MAProblem,
    zop: ZOperator,
    alpha_inv: Form11,
    logdet_alpha: ScalarField,
    g0: ScalarField,
}

pub(crate) struct LinopParts {
    pub h_inv: Form11,
    pub theta_min_eig: f64,
    /// tr(ω̃₀⁻¹·α) per point; the second-order coefficient scale
    pub trace_h_alpha: Vec<f64>,
    /// w(x) = tr Θ(x)/n, the pointwise scale split off by the preconditioner
    pub w_scale: Vec<f64>,
    /// grid mean of Θ(x)/w(x): the shape left for the spectral solve
    pub theta_shape_mean: hermitian::Mat,
    /// λ·mean(1/w), the zeroth-order part of the preconditioner symbol
    pub lambda_scaled: f64,
}

impl<'p> Engine<'p> {
    pub(crate) fn new(prob: &'p MAProblem) -> Result<Self, SolverError> {
        let zop = ZOperator::new(&prob.alpha)?;
        let alpha_inv = prob.alpha.pointwise_inverse()?;
        let logdet_alpha = chern::log_det(&prob.alpha)?;
        let g0 = chern::log_volume_ratio(&prob.varpi, &prob.alpha)?;
        Ok(Self {
            prob,
            zop,
            alpha_inv,
            logdet_alpha,
            g0,
        })
    }

    /// The φ-linear part of ω̃: (1/(n−1))[(Δu)α − √−1∂∂̄u] + Z(du).
    pub(crate) fn linear_part(&self, u: &ScalarField) -> Result<Form11, SolverError> {
        let grid = *self.prob.grid();
        let n = grid.dim();
        let hess = calculus::i_ddbar(u)?;
        let z = if self.zop.is_zero() {
            None
        } else {
            Some(self.zop.apply(u, &self.prob.alpha)?)
        };
        let inv_n1 = 1.0 / (n as f64 - 1.0);
        let mut out = Form11::zeros(grid);
        let nn = n * n;
        for pt in 0..grid.num_points() {
            let lap = hermitian::trace_mul(n, self.alpha_inv.at(pt), hess.at(pt)).re;
            let a = self.prob.alpha.at(pt);
            let h = hess.at(pt);
            let dst = out.at_mut(pt);
            for e in 0..nn {
                dst[e] = inv_n1 * (lap * a[e] - h[e]);
            }
            if let Some(z) = &z {
                let zp = z.at(pt);
                for e in 0..nn {
                    dst[e] += zp[e];
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn assemble(&self, phi: &ScalarField) -> Result<Form11, SolverError> {
        Ok(self.prob.varpi.add(&self.linear_part(phi)?))
    }

    /// Residual from an already assembled ω̃ (pointwise only).
    pub(crate) fn residual_from(
        &self,
        phi: &ScalarField,
        omega_tilde: &Form11,
        t: f64,
    ) -> Result<ScalarField, SolverError> {
        let n = self.prob.grid().dim();
        let lambda = self.prob.lambda;
        let mut out = ScalarField::zeros(*self.prob.grid());
        for pt in 0..self.prob.grid().num_points() {
            let ld = match hermitian::logdet_pd(n, omega_tilde.at(pt)) {
                Some(v) => v,
                None => {
                    return Err(SolverError::PositivityLoss {
                        t,
                        point: pt,
                        min_eig: hermitian::min_eig(n, omega_tilde.at(pt)),
                    })
                }
            };
            let val = ld - self.logdet_alpha.values()[pt].re
                - lambda * phi.values()[pt].re
                - (1.0 - t) * self.g0.values()[pt].re
                - t * self.prob.g.values()[pt].re;
            out.values_mut()[pt] = Complex64::new(val, 0.0);
        }
        Ok(out)
    }

    pub(crate) fn residual(
        &self,
        phi: &ScalarField,
        t: f64,
    ) -> Result<(ScalarField, Form11), SolverError> {
        let om = self.assemble(phi)?;
        let r = self.residual_from(phi, &om, t)?;
        Ok((r, om))
    }

    /// Ellipticity data of the linearisation at ω̃₀.
    pub(crate) fn linop_parts(&self, omega_tilde0: &Form11) -> Result<LinopParts, SolverError> {
        let grid = self.prob.grid();
        let n = grid.dim();
        let np = grid.num_points();
        let inv_n1 = 1.0 / (n as f64 - 1.0);
        let mut h_inv = Form11::zeros(*grid);
        let mut trace_h_alpha = vec![0.0f64; np];
        let mut w_scale = vec![0.0f64; np];
        let mut theta_min = f64::INFINITY;
        let mut theta_shape_mean = hermitian::zero_mat();
        let mut inv_w_mean = 0.0f64;
        for pt in 0..np {
            let h = omega_tilde0.at(pt);
            let mut hinv = hermitian::zero_mat();
            if !hermitian::inverse(n, h, &mut hinv) {
                return Err(SolverError::PositivityLoss {
                    t: f64::NAN,
                    point: pt,
                    min_eig: hermitian::min_eig(n, h),
                });
            }
            // Θ^{j̄i} = (1/(n−1))((tr_{ω̃₀}α)·α^{j̄i} − h^{j̄i})
            let tr = hermitian::trace_mul(n, &hinv[..n * n], self.prob.alpha.at(pt)).re;
            trace_h_alpha[pt] = tr;
            let mut theta = hermitian::zero_mat();
            let ai = self.alpha_inv.at(pt);
            let mut theta_tr = 0.0f64;
            for e in 0..n * n {
                theta[e] = inv_n1 * (tr * ai[e] - hinv[e]);
            }
            for i in 0..n {
                theta_tr += theta[i * n + i].re;
            }
            let e_min = hermitian::min_eig(n, &theta[..n * n]);
            if e_min < theta_min {
                theta_min = e_min;
            }
            let w = (theta_tr / n as f64).max(1e-300);
            w_scale[pt] = w;
            inv_w_mean += 1.0 / w;
            for e in 0..n * n {
                theta_shape_mean[e] += theta[e] / w;
            }
            h_inv.at_mut(pt).copy_from_slice(&hinv[..n * n]);
        }
        for e in theta_shape_mean.iter_mut() {
            *e /= np as f64;
        }
        Ok(LinopParts {
            h_inv,
            theta_min_eig: theta_min,
            trace_h_alpha,
            w_scale,
            theta_shape_mean,
            lambda_scaled: self.prob.lambda * inv_w_mean / np as f64,
        })
    }

    /// B(u) = h^{j̄i}(linear_part u)_{ij̄} − λu, fused pointwise:
    /// (1/(n−1))[Δu·tr(h⁻¹α) − tr(h⁻¹·∂∂̄u)] + tr(h⁻¹·Z(du)) − λu.
    pub(crate) fn apply_b(
        &self,
        parts: &LinopParts,
        u: &ScalarField,
    ) -> Result<ScalarField, SolverError> {
        let grid = *self.prob.grid();
        let n = grid.dim();
        let inv_n1 = 1.0 / (n as f64 - 1.0);
        let lambda = self.prob.lambda;
        let hess = calculus::i_ddbar(u)?;
        let z = if self.zop.is_zero() {
            None
        } else {
            Some(self.zop.apply(u, &self.prob.alpha)?)
        };
        let mut out = ScalarField::zeros(grid);
        for pt in 0..grid.num_points() {
            let h = hess.at(pt);
            let hinv = parts.h_inv.at(pt);
            let lap = hermitian::trace_mul(n, self.alpha_inv.at(pt), h).re;
            let tr_hh = hermitian::trace_mul(n, hinv, h).re;
            let mut val = inv_n1 * (lap * parts.trace_h_alpha[pt] - tr_hh)
                - lambda * u.values()[pt].re;
            if let Some(z) = &z {
                val += hermitian::trace_mul(n, hinv, z.at(pt)).re;
            }
            out.values_mut()[pt] = Complex64::new(val, 0.0);
        }
        Ok(out)
    }

    /// Approximate inverse of B for right preconditioning: split off the
    /// pointwise coefficient scale w(x) = tr Θ/n and invert the remaining
    /// mean-shape operator spectrally,
    ///   M(u) = w(x)·(S u),  S symbol = −(π/L)² κᴴ Θ̄_shape κ − λ·mean(1/w),
    /// which is never singular since λ > 0.
    pub(crate) fn precondition(&self, parts: &LinopParts, v: &[f64]) -> Vec<f64> {
        let grid = *self.prob.grid();
        let n = grid.dim();
        let tau = std::f64::consts::TAU;
        let shape = parts.theta_shape_mean;
        let lambda_scaled = parts.lambda_scaled;
        let field = ScalarField::from_values(
            grid,
            v.iter()
                .zip(&parts.w_scale)
                .map(|(&x, &w)| Complex64::new(x / w, 0.0))
                .collect(),
        );
        let spectrum = field.spectrum();
        let out = ScalarField::from_spectrum_symbol(grid, &spectrum, move |k| {
            let mut quad = 0.0f64;
            for j in 0..n {
                for i in 0..n {
                    let kj = Complex64::new(k[j], -k[n + j]);
                    let ki = Complex64::new(k[i], -k[n + i]);
                    quad += (kj.conj() * shape[j * n + i] * ki).re;
                }
            }
            let m = -(0.25 * tau * tau) * quad - lambda_scaled;
            Complex64::new(1.0 / m, 0.0)
        });
        out.values().iter().map(|c| c.re).collect()
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// ϖ = (1/(n−1)!) ∗ ω_h^{n−1} with respect to αⁿ/n!; positive definite for
/// consistent inputs, and an error otherwise.
pub fn varpi_from(omega_h: &Form11, alpha: &Form11) -> Result<Form11, SolverError> {
    let psi = power_n_minus_1(omega_h)?; // ω_h^{n−1}/(n−1)!
    let starred = hodge_star(&psi.to_pq(), alpha)?;
    let mut out = Form11::from_pq(&starred)?;
    out.hermitize();
    out.check_positive(0.0)?;
    Ok(out)
}

/// Z(dφ) with a freshly built cache; the solver reuses one cache per solve.
pub fn z_of_dphi(phi: &ScalarField, alpha: &Form11) -> Result<Form11, SolverError> {
    ZOperator::new(alpha)?.apply(phi, alpha)
}

/// ω̃(φ) = ϖ + (1/(n−1))[(Δφ)α − √−1∂∂̄φ] + Z(dφ). Hermitian by
/// construction; positivity is *not* guaranteed — callers check the margin.
pub fn assemble_tilde_omega(phi: &ScalarField, prob: &MAProblem) -> Result<Form11, SolverError> {
    Engine::new(prob)?.assemble(phi)
}

/// log(ω̃(φ)ⁿ/αⁿ) − λφ − (1−t)G₀ − tG with G₀ = log(ϖⁿ/αⁿ); errors carry
/// the worst point when ω̃ loses positivity.
pub fn residual(phi: &ScalarField, t: f64, prob: &MAProblem) -> Result<ScalarField, SolverError> {
    let engine = Engine::new(prob)?;
    Ok(engine.residual(phi, t)?.0)
}

/// G₀ = log(ϖⁿ/αⁿ), the t = 0 data of the continuity family.
pub fn reference_g0(prob: &MAProblem) -> Result<ScalarField, SolverError> {
    Ok(chern::log_volume_ratio(&prob.varpi, &prob.alpha)?)
}

/// Handle applying the Gateaux derivative B(u) = P(u) − λu of the residual
/// at φ₀. Strict ellipticity (Θ > 0 pointwise) is checked at construction.
pub struct LinearizedOperator<'p> {
    engine: Engine<'p>,
    parts: LinopParts,
}

pub fn linearized_operator<'p>(
    phi0: &ScalarField,
    prob: &'p MAProblem,
) -> Result<LinearizedOperator<'p>, SolverError> {
    let engine = Engine::new(prob)?;
    let om0 = engine.assemble(phi0)?;
    let (min_eig, point) = om0.min_eig_with_point();
    if min_eig <= 0.0 {
        return Err(SolverError::PositivityLoss {
            t: f64::NAN,
            point,
            min_eig,
        });
    }
    let parts = engine.linop_parts(&om0)?;
    Ok(LinearizedOperator { engine, parts })
}

impl<'p> LinearizedOperator<'p> {
    pub fn apply(&self, u: &ScalarField) -> Result<ScalarField, SolverError> {
        self.engine.apply_b(&self.parts, u)
    }

    /// Smallest eigenvalue of Θ over the grid (strict ellipticity margin).
    pub fn theta_min_eig(&self) -> f64 {
        self.parts.theta_min_eig
    }
}

// ---------------------------------------------------------------------------
// Newton + continuation
// ---------------------------------------------------------------------------

enum NewtonFailure {
    Positivity { point: usize, min_eig: f64 },
    NoDecrease { residual_norm: f64 },
    MaxIterations { residual_norm: f64 },
    Diverged { residual_norm: f64 },
    LinearStall { rel_residual: f64, residual_norm: f64 },
}

impl NewtonFailure {
    fn describe(&self) -> String {
        match self {
            NewtonFailure::Positivity { point, min_eig } => {
                format!("positivity lost (point {point}, min eig {min_eig:e})")
            }
            NewtonFailure::NoDecrease { residual_norm } => {
                format!("line search found no decrease (residual {residual_norm:e})")
            }
            NewtonFailure::MaxIterations { residual_norm } => {
                format!("Newton iteration budget exhausted (residual {residual_norm:e})")
            }
            NewtonFailure::Diverged { residual_norm } => {
                format!("residual stagnated/grew (residual {residual_norm:e})")
            }
            NewtonFailure::LinearStall {
                rel_residual,
                residual_norm,
            } => format!(
                "linear solve stalled (relative residual {rel_residual:e}, residual {residual_norm:e})"
            ),
        }
    }
}

struct NewtonOutcome {
    iters: usize,
    residual_norm: f64,
    omega_tilde: Form11,
}

/// Check min eig(ω̃) > eps via Cholesky of ω̃ − eps·I; returns the first
/// failing point.
fn margin_violation(om: &Form11, eps: f64) -> Option<usize> {
    let n = om.dim();
    let mut shifted = hermitian::zero_mat();
    for pt in 0..om.grid().num_points() {
        let m = om.at(pt);
        shifted[..n * n].copy_from_slice(&m[..n * n]);
        for i in 0..n {
            shifted[i * n + i] -= eps;
        }
        if hermitian::cholesky(n, &shifted[..n * n]).is_none() {
            return Some(pt);
        }
    }
    None
}

fn newton_at_t(
    engine: &Engine,
    phi: &mut ScalarField,
    t: f64,
    cfg: &SolverConfig,
    trace: &mut ContinuationTrace,
) -> Result<NewtonOutcome, NewtonFailure> {
    let (mut r, mut om) = engine.residual(phi, t).map_err(|e| match e {
        SolverError::PositivityLoss { point, min_eig, .. } => {
            NewtonFailure::Positivity { point, min_eig }
        }
        _ => NewtonFailure::NoDecrease {
            residual_norm: f64::NAN,
        },
    })?;
    let mut rnorm = r.sup_re();
    let mut stagnant = 0usize;
    let mut iters = 0usize;

    loop {
        trace.residual_history.push(ResidualSample {
            t,
            newton_iter: iters,
            norm: rnorm,
        });
        if rnorm <= cfg.tol {
            return Ok(NewtonOutcome {
                iters,
                residual_norm: rnorm,
                omega_tilde: om,
            });
        }
        if iters >= cfg.max_newton {
            return Err(NewtonFailure::MaxIterations {
                residual_norm: rnorm,
            });
        }

        let parts = match engine.linop_parts(&om) {
            Ok(p) => p,
            Err(SolverError::PositivityLoss { point, min_eig, .. }) => {
                return Err(NewtonFailure::Positivity { point, min_eig })
            }
            Err(_) => {
                return Err(NewtonFailure::NoDecrease {
                    residual_norm: rnorm,
                })
            }
        };
        if parts.theta_min_eig <= 0.0 {
            return Err(NewtonFailure::Positivity {
                point: 0,
                min_eig: parts.theta_min_eig,
            });
        }

        // Solve B δ = −r to the relative-residual contract.
        let rhs: Vec<f64> = r.values().iter().map(|v| -v.re).collect();
        let opts = KrylovOptions {
            restart: cfg.gmres_restart,
            max_iters: cfg.gmres_max_iters,
            tol: cfg.lin_tol,
        };
        let grid = *engine.prob.grid();
        let apply = |v: &[f64]| -> Vec<f64> {
            let u = ScalarField::from_values(
                grid,
                v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            );
            let bu = engine.apply_b(&parts, &u).expect("B application");
            bu.values().iter().map(|c| c.re).collect()
        };
        let precond = |v: &[f64]| engine.precondition(&parts, v);
        let sol = match gmres(apply, precond, &rhs, &opts) {
            Ok(s) => s,
            Err(f) => {
                return Err(NewtonFailure::LinearStall {
                    rel_residual: f.rel_residual,
                    residual_norm: rnorm,
                })
            }
        };
        let delta = ScalarField::from_values(
            grid,
            sol.x.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        );

        // ω̃ is affine in φ: one linear-part evaluation powers the whole
        // line search.
        let ldelta = match engine.linear_part(&delta) {
            Ok(l) => l,
            Err(_) => {
                return Err(NewtonFailure::NoDecrease {
                    residual_norm: rnorm,
                })
            }
        };

        if cfg!(debug_assertions) && trace.total_newton_steps % 10 == 9 {
            linearization_consistency_check(engine, &parts, phi, &om, &delta, &ldelta, t);
        }

        let mut tau = 1.0f64;
        let mut accepted = false;
        let mut last_bad_point = None;
        while tau >= cfg.ls_min {
            let mut cand_om = om.clone();
            cand_om.axpy(tau, &ldelta);
            if let Some(pt) = margin_violation(&cand_om, cfg.eps_pos) {
                last_bad_point = Some(pt);
                tau *= cfg.ls_backtrack;
                continue;
            }
            let mut cand_phi = phi.clone();
            cand_phi.axpy(Complex64::new(tau, 0.0), &delta);
            let cand_r = match engine.residual_from(&cand_phi, &cand_om, t) {
                Ok(rr) => rr,
                Err(_) => {
                    tau *= cfg.ls_backtrack;
                    continue;
                }
            };
            let cand_norm = cand_r.sup_re();
            if cand_norm < rnorm {
                if cand_norm > 0.99 * rnorm {
                    stagnant += 1;
                } else {
                    stagnant = 0;
                }
                *phi = cand_phi;
                om = cand_om;
                r = cand_r;
                rnorm = cand_norm;
                accepted = true;
                break;
            }
            tau *= cfg.ls_backtrack;
        }

        if !accepted {
            return match last_bad_point {
                Some(pt) => Err(NewtonFailure::Positivity {
                    point: pt,
                    min_eig: hermitian::min_eig(om.dim(), om.at(pt)),
                }),
                None => Err(NewtonFailure::NoDecrease {
                    residual_norm: rnorm,
                }),
            };
        }
        iters += 1;
        trace.total_newton_steps += 1;
        if stagnant >= cfg.divergence_window {
            return Err(NewtonFailure::Diverged {
                residual_norm: rnorm,
            });
        }
    }
}

/// Debug-build check (runs every 10th global Newton step) that the
/// finite-difference directional derivative of the residual matches B(δ)
/// to first order.
fn linearization_consistency_check(
    engine: &Engine,
    parts: &LinopParts,
    phi: &ScalarField,
    om: &Form11,
    delta: &ScalarField,
    ldelta: &Form11,
    t: f64,
) {
    let scale = delta.sup_re().max(1e-14);
    let eps = 1e-6 / scale;
    let mut phi_eps = phi.clone();
    phi_eps.axpy(Complex64::new(eps, 0.0), delta);
    let mut om_eps = om.clone();
    om_eps.axpy(eps, ldelta);
    let (r0, r1) = match (
        engine.residual_from(phi, om, t),
        engine.residual_from(&phi_eps, &om_eps, t),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return, // positivity lost under the probe step; nothing to check
    };
    let bd = engine.apply_b(parts, delta).expect("B application");
    let fd = r1.sub(&r0).scale_re(1.0 / eps);
    let err = fd.sub(&bd).sup_re();
    let denom = bd.sup_re().max(1.0);
    debug_assert!(
        err / denom < 1e-4,
        "linearization inconsistency: |FD − B(δ)|/‖B(δ)‖ = {:e}",
        err / denom
    );
}

/// Method-of-continuity solve of log(ω̃ⁿ/αⁿ) = λφ + G: marches t from 0
/// (where φ = 0 is exact) to 1 with adaptive steps and damped Newton at
/// each level. Returns φ with ‖residual(φ, 1)‖∞ ≤ cfg.tol.
pub fn continuation_solve(prob: &MAProblem, cfg: &SolverConfig) -> Result<ScalarField, SolverError> {
    continuation_solve_traced(prob, cfg, None).map(|(state, _)| state.phi)
}

/// As [`continuation_solve`], but returns the final path state and the full
/// trace; `init` seeds the t = 0 Newton solve (default φ = 0).
pub fn continuation_solve_traced(
    prob: &MAProblem,
    cfg: &SolverConfig,
    init: Option<&ScalarField>,
) -> Result<(ContinuationState, ContinuationTrace), SolverError> {
    let engine = Engine::new(prob)?;
    let grid = *prob.grid();
    let mut trace = ContinuationTrace::default();
    let mut phi = match init {
        Some(f) => {
            f.check_real(1e-10)?;
            f.re_field()
        }
        None => ScalarField::zeros(grid),
    };

    let map_failure = |fail: NewtonFailure, t: f64, dt: f64, phi_norm: f64| match fail {
        NewtonFailure::Diverged { residual_norm } => SolverError::NewtonDivergence {
            t,
            window: 5,
            residual_norm,
        },
        NewtonFailure::Positivity { point, min_eig } => SolverError::PositivityBreakdown {
            t,
            point,
            min_eig,
        },
        other => {
            let residual_norm = match other {
                NewtonFailure::NoDecrease { residual_norm }
                | NewtonFailure::MaxIterations { residual_norm }
                | NewtonFailure::LinearStall { residual_norm, .. } => residual_norm,
                _ => f64::NAN,
            };
            SolverError::TStepUnderflow {
                t,
                dt,
                reason: other.describe(),
                residual_norm,
                phi_norm,
            }
        }
    };

    // t = 0 first: exactly solvable, so failure here means bad data or a
    // bad initial guess.
    let outcome = newton_at_t(&engine, &mut phi, 0.0, cfg, &mut trace)
        .map_err(|f| map_failure(f, 0.0, cfg.dt_init, phi.sup_re()))?;
    let mut state = ContinuationState {
        t: 0.0,
        phi: phi.clone(),
        residual_norm: outcome.residual_norm,
        min_eig_margin: outcome.omega_tilde.min_eig(),
    };
    trace.steps.push(TraceStep {
        t: 0.0,
        newton_iters: outcome.iters,
        residual_norm: outcome.residual_norm,
        min_eig_margin: state.min_eig_margin,
    });

    let mut t = 0.0f64;
    let mut dt = cfg.dt_init;
    while t < 1.0 {
        let t_try = (t + dt).min(1.0);
        let mut phi_try = phi.clone();
        match newton_at_t(&engine, &mut phi_try, t_try, cfg, &mut trace) {
            Ok(outcome) => {
                phi = phi_try;
                t = t_try;
                state = ContinuationState {
                    t,
                    phi: phi.clone(),
                    residual_norm: outcome.residual_norm,
                    min_eig_margin: outcome.omega_tilde.min_eig(),
                };
                trace.steps.push(TraceStep {
                    t,
                    newton_iters: outcome.iters,
                    residual_norm: outcome.residual_norm,
                    min_eig_margin: state.min_eig_margin,
                });
                if outcome.iters <= cfg.fast_newton_steps {
                    dt = (dt * cfg.dt_growth).min(1.0);
                }
            }
            Err(fail) => {
                dt *= cfg.dt_shrink;
                if dt < cfg.min_dt {
                    return Err(map_failure(fail, t_try, dt, phi.sup_re()));
                }
            }
        }
    }
    Ok((state, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::i_ddbar;
    use crate::forms::p_alpha;
    use std::f64::consts::{PI, TAU};

    fn grid2(res: usize) -> TorusGrid {
        TorusGrid::new(2, res).unwrap()
    }

    fn flat_problem(res: usize, lambda: f64) -> MAProblem {
        let grid = grid2(res);
        MAProblem::new(
            Form11::identity(grid),
            Form11::identity(grid),
            ScalarField::zeros(grid),
            lambda,
        )
        .unwrap()
    }

    fn manufactured_problem(
        grid: TorusGrid,
        lambda: f64,
        phi_star: &ScalarField,
    ) -> MAProblem {
        let alpha = Form11::identity(grid);
        let varpi = Form11::identity(grid);
        let tmp = MAProblem::new(
            alpha.clone(),
            varpi.clone(),
            ScalarField::zeros(grid),
            lambda,
        )
        .unwrap();
        let om_star = assemble_tilde_omega(phi_star, &tmp).unwrap();
        let g = chern::log_volume_ratio(&om_star, &alpha)
            .unwrap()
            .sub(&phi_star.scale_re(lambda));
        MAProblem::new(alpha, varpi, g, lambda).unwrap()
    }

    #[test]
    fn problem_validation() {
        let grid = grid2(4);
        let id = Form11::identity(grid);
        let zero = ScalarField::zeros(grid);
        assert!(MAProblem::new(id.clone(), id.clone(), zero.clone(), 0.0).is_err());
        assert!(MAProblem::new(id.clone(), id.scale(-1.0), zero.clone(), 1.0).is_err());
        // non-Gauduchon α is rejected
        let u = ScalarField::from_real_fn(grid, |x| 0.3 * (TAU * x[0]).sin());
        let bad = Form11::conformal(&u);
        assert!(matches!(
            MAProblem::new(bad, id.clone(), zero.clone(), 1.0),
            Err(SolverError::InvalidProblem(_))
        ));
        assert!(MAProblem::new(id.clone(), id, zero, 1.0).is_ok());
    }

    #[test]
    fn varpi_from_examples() {
        let grid = grid2(4);
        let id = Form11::identity(grid);
        // flat: ϖ = identity
        let v = varpi_from(&id, &id).unwrap();
        assert!(v.sup_diff(&id) < 1e-12);
        // n=2 α = identity, ω_h = diag(2,3) → diag(3,2)
        let wh = Form11::from_entry_fn(grid, |_, i, j| {
            if i == j {
                Complex64::new(if i == 0 { 2.0 } else { 3.0 }, 0.0)
            } else {
                Complex64::default()
            }
        });
        let v = varpi_from(&wh, &id).unwrap();
        let expect = Form11::from_entry_fn(grid, |_, i, j| {
            if i == j {
                Complex64::new(if i == 0 { 3.0 } else { 2.0 }, 0.0)
            } else {
                Complex64::default()
            }
        });
        assert!(v.sup_diff(&expect) < 1e-12);
    }

    #[test]
    fn z_vanishes_for_n2_and_flat_alpha() {
        let grid = grid2(8);
        let phi = ScalarField::from_real_fn(grid, |x| (TAU * x[1]).sin());
        let z = z_of_dphi(&phi, &Form11::identity(grid)).unwrap();
        assert_eq!(z.sup_abs(), 0.0);

        let grid3 = TorusGrid::new(3, 4).unwrap();
        let phi3 = ScalarField::from_real_fn(grid3, |x| (TAU * x[1]).sin());
        let z3 = z_of_dphi(&phi3, &Form11::identity(grid3)).unwrap();
        assert_eq!(z3.sup_abs(), 0.0, "∂̄(α^(n−2)) = 0 for constant α");
    }

    #[test]
    fn assemble_examples() {
        let grid = grid2(16);
        let prob = flat_problem(16, 1.0);
        // φ ≡ 0 → ϖ
        let om0 = assemble_tilde_omega(&ScalarField::zeros(grid), &prob).unwrap();
        assert!(om0.sup_diff(&prob.varpi) < 1e-14);

        // n=2 flat: φ = ε sin(2πx¹) → ω̃ = diag(1, 1 − επ² sin(2πx¹))
        let eps = 0.01;
        let phi = ScalarField::from_real_fn(grid, move |x| eps * (TAU * x[0]).sin());
        let om = assemble_tilde_omega(&phi, &prob).unwrap();
        let expect = Form11::from_entry_fn(grid, move |x, i, j| {
            if i != j {
                Complex64::default()
            } else if i == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(1.0 - eps * PI * PI * (TAU * x[0]).sin(), 0.0)
            }
        });
        assert!(om.sup_diff(&expect) < 1e-10);
    }

    #[test]
    fn assemble_is_affine_in_phi() {
        let grid = grid2(8);
        let prob = flat_problem(8, 1.0);
        let f1 = ScalarField::from_real_fn(grid, |x| 0.02 * (TAU * x[0]).sin());
        let f2 = ScalarField::from_real_fn(grid, |x| 0.03 * (TAU * x[1]).cos());
        let base = assemble_tilde_omega(&ScalarField::zeros(grid), &prob).unwrap();
        let a1 = assemble_tilde_omega(&f1, &prob).unwrap().sub(&base);
        let a2 = assemble_tilde_omega(&f2, &prob).unwrap().sub(&base);
        let sum = assemble_tilde_omega(&f1.add(&f2), &prob).unwrap().sub(&base);
        assert!(sum.sub(&a1.add(&a2)).sup_abs() < 1e-12);
    }

    #[test]
    fn residual_zero_at_t0_with_zero_phi() {
        let grid = grid2(8);
        // non-trivial ϖ derived from a positive ω_h
        let mut wh = Form11::from_entry_fn(grid, |x, i, j| {
            if i == j {
                Complex64::new(2.0 + 0.2 * (TAU * x[0]).cos() + i as f64, 0.0)
            } else {
                Complex64::new(0.1, 0.05)
            }
        });
        wh.hermitize();
        let alpha = Form11::identity(grid);
        let varpi = varpi_from(&wh, &alpha).unwrap();
        let g = ScalarField::from_real_fn(grid, |x| (TAU * x[1]).sin());
        let prob = MAProblem::new(alpha, varpi, g, 2.0).unwrap();
        let r = residual(&ScalarField::zeros(grid), 0.0, &prob).unwrap();
        assert!(r.sup_re() < 1e-14, "t = 0 is exactly solved by φ = 0");
    }

    #[test]
    fn manufactured_residual_vanishes_at_truth() {
        let grid = grid2(16);
        let lambda = 1.0;
        let phi_star = ScalarField::from_real_fn(grid, |x| {
            0.05 * (TAU * x[0]).sin() + 0.02 * (TAU * x[1]).cos()
        });
        let prob = manufactured_problem(grid, lambda, &phi_star);
        let r = residual(&phi_star, 1.0, &prob).unwrap();
        assert!(r.sup_re() < 1e-12);

        // shifting by a constant drives the residual negative (λ-term)
        let shifted = phi_star.add(&ScalarField::constant(grid, Complex64::new(0.05, 0.0)));
        let rs = residual(&shifted, 1.0, &prob).unwrap();
        let min = rs.values().iter().fold(f64::INFINITY, |m, v| m.min(v.re));
        assert!(min < -1e-3, "monotone in the constant direction: {min}");
    }

    #[test]
    fn residual_reports_positivity_breakdown() {
        let grid = grid2(8);
        let prob = flat_problem(8, 1.0);
        // large φ destroys ω̃ > 0
        let phi = ScalarField::from_real_fn(grid, |x| 2.0 * (TAU * x[0]).sin());
        match residual(&phi, 0.0, &prob) {
            Err(SolverError::PositivityLoss { min_eig, .. }) => assert!(min_eig <= 0.0),
            other => panic!("expected positivity loss, got {other:?}"),
        }
    }

    #[test]
    fn linearized_operator_on_constants_and_flat_background() {
        let grid = grid2(16);
        let prob = flat_problem(16, 0.7);
        let phi0 = ScalarField::zeros(grid);
        let linop = linearized_operator(&phi0, &prob).unwrap();
        assert!((linop.theta_min_eig() - 1.0).abs() < 1e-12, "Θ = identity");

        // constants: B(c) = −λc
        let c = ScalarField::constant(grid, Complex64::new(3.0, 0.0));
        let bc = linop.apply(&c).unwrap();
        let expect = ScalarField::constant(grid, Complex64::new(-0.7 * 3.0, 0.0));
        assert!(bc.sub(&expect).max_abs() < 1e-12);

        // flat background: B(u) = Δu − λu on sin(2πx¹)
        let u = ScalarField::from_real_fn(grid, |x| (TAU * x[0]).sin());
        let bu = linop.apply(&u).unwrap();
        let expect = ScalarField::from_real_fn(grid, |x| {
            -(PI * PI + 0.7) * (TAU * x[0]).sin()
        });
        assert!(bu.sub(&expect).max_abs() < 1e-10);
    }

    #[test]
    fn linearization_matches_finite_differences() {
        let grid = grid2(8);
        let alpha = Form11::identity(grid);
        let varpi = Form11::identity(grid);
        let g = ScalarField::from_real_fn(grid, |x| 0.1 * (TAU * x[0]).cos());
        let prob = MAProblem::new(alpha, varpi, g, 1.0).unwrap();
        let phi0 = ScalarField::from_real_fn(grid, |x| 0.03 * (TAU * x[1]).sin());
        let linop = linearized_operator(&phi0, &prob).unwrap();
        let u = ScalarField::from_real_fn(grid, |x| {
            0.5 * (TAU * x[0]).sin() + 0.3 * (TAU * (x[1] + x[3])).cos()
        });
        let bu = linop.apply(&u).unwrap();
        let t = 0.4;
        let r0 = residual(&phi0, t, &prob).unwrap();
        let mut errs = Vec::new();
        for eps in [1e-3, 1e-4, 1e-5] {
            let mut pe = phi0.clone();
            pe.axpy(Complex64::new(eps, 0.0), &u);
            let re = residual(&pe, t, &prob).unwrap();
            let fd = re.sub(&r0).scale_re(1.0 / eps);
            errs.push(fd.sub(&bu).sup_re());
        }
        // first order in ε: each decade of ε loses about a decade of error
        assert!(errs[1] < errs[0] * 0.2, "{errs:?}");
        assert!(errs[2] < errs[1] * 0.2 + 1e-11, "{errs:?}");
    }

    #[test]
    fn trivial_path_returns_zero_in_at_most_one_step() {
        // G = G₀ makes the t-path constant: φ = 0 is exact for every t
        let grid = grid2(8);
        let alpha = Form11::identity(grid);
        let varpi = alpha.scale(1.5);
        let g0 = chern::log_volume_ratio(&varpi, &alpha).unwrap();
        let lambda = 2.0;
        let prob = MAProblem::new(alpha, varpi, g0, lambda).unwrap();
        let cfg = SolverConfig::default();
        let (state, trace) = continuation_solve_traced(&prob, &cfg, None).unwrap();
        assert!(state.phi.sup_re() <= cfg.tol * (1.0 + 1.0 / lambda));
        assert!(trace.total_newton_steps <= 1);
        assert!((state.t - 1.0).abs() < 1e-15);
        assert!(state.min_eig_margin > 0.0);
    }

    #[test]
    fn manufactured_solve_recovers_truth_small() {
        let grid = grid2(8);
        let phi_star = ScalarField::from_real_fn(grid, |x| {
            0.05 * (TAU * x[0]).sin() + 0.03 * (TAU * x[1]).cos()
        });
        let prob = manufactured_problem(grid, 1.0, &phi_star);
        let cfg = SolverConfig::default();
        let phi = continuation_solve(&prob, &cfg).unwrap();
        let err = phi.sub(&phi_star).max_abs();
        assert!(err < 1e-8, "‖φ − φ*‖∞ = {err:e}");
    }

    #[test]
    fn n2_residual_matches_direct_monge_ampere_form() {
        // For n = 2 the equation degenerates to
        // log det(∗ϖ + i∂∂̄φ)/det α = λφ + G with ∗ϖ = P_α(ϖ).
        let grid = grid2(8);
        let alpha = Form11::identity(grid);
        let mut wh = Form11::from_entry_fn(grid, |x, i, j| {
            if i == j {
                Complex64::new(1.5 + 0.1 * (TAU * x[0]).cos() + 0.3 * i as f64, 0.0)
            } else {
                Complex64::new(0.05, 0.02)
            }
        });
        wh.hermitize();
        let varpi = varpi_from(&wh, &alpha).unwrap();
        let g = ScalarField::from_real_fn(grid, |x| 0.05 * (TAU * x[1]).sin());
        let lambda = 1.3;
        let prob = MAProblem::new(alpha.clone(), varpi.clone(), g.clone(), lambda).unwrap();
        let phi = ScalarField::from_real_fn(grid, |x| 0.02 * (TAU * x[0]).sin());
        let t = 0.6;
        let r = residual(&phi, t, &prob).unwrap();

        // direct 2D route
        let star_varpi = p_alpha(&varpi, &alpha).unwrap();
        let om2 = star_varpi.add(&i_ddbar(&phi).unwrap());
        let g0 = reference_g0(&prob).unwrap();
        let direct = chern::log_volume_ratio(&om2, &alpha)
            .unwrap()
            .sub(&phi.scale_re(lambda))
            .sub(&g0.scale_re(1.0 - t))
            .sub(&g.scale_re(t));
        assert!(r.sub(&direct).max_abs() < 1e-11);
    }

    #[test]
    fn continuation_error_paths_surface() {
        // brutal manufactured data with a tiny iteration budget forces a
        // continuation failure
        let grid = grid2(4);
        let alpha = Form11::identity(grid);
        let varpi = Form11::identity(grid);
        let g = ScalarField::from_real_fn(grid, |x| 5.0 * (TAU * x[0]).sin());
        let prob = MAProblem::new(alpha, varpi, g, 1.0).unwrap();
        let cfg = SolverConfig {
            max_newton: 1,
            min_dt: 0.2,
            ..SolverConfig::default()
        };
        match continuation_solve(&prob, &cfg) {
            Err(
                SolverError::TStepUnderflow { .. }
                | SolverError::PositivityBreakdown { .. }
                | SolverError::NewtonDivergence { .. },
            ) => {}
            other => panic!("expected continuation failure, got {other:?}"),
        }
    }

    #[test]
    fn uniqueness_across_configs_small() {
        let grid = grid2(8);
        let phi_star = ScalarField::from_real_fn(grid, |x| {
            0.04 * (TAU * x[0]).sin() + 0.02 * (TAU * x[1]).cos()
        });
        let prob = manufactured_problem(grid, 1.0, &phi_star);

        let cfg_a = SolverConfig::default();
        let cfg_b = SolverConfig {
            dt_init: 0.1,
            ls_backtrack: 0.7,
            fast_newton_steps: 2,
            ..SolverConfig::default()
        };
        let seed = ScalarField::from_real_fn(grid, |x| 0.005 * (TAU * x[2]).sin());
        let a = continuation_solve(&prob, &cfg_a).unwrap();
        let (b, _) = continuation_solve_traced(&prob, &cfg_b, Some(&seed)).unwrap();
        assert!(a.sub(&b.phi).max_abs() < 10.0 * cfg_a.tol);
    }
}
