//! Pointwise exterior algebra of (p,q)-forms over the torus grid: the
//! wedge product, the Hodge star, positivity, determinants, and the
//! (1,1) ↔ (n−1,n−1) power maps.
//!
//! Conventions (fixed once, used everywhere):
//!
//! * A real (1,1)-form ω = √−1 Σ g_{ij̄} dz^i ∧ dz̄^j is stored through its
//!   Hermitian coefficient matrix, entry `(i, j) = g_{ij̄}` (row unbarred,
//!   column barred). ω is positive iff (g_{ij̄}) is positive semi-definite.
//! * A real (n−1,n−1)-form ψ = (√−1)^{n−1} Σ (−1)^{n(n+1)/2+i+j+1} ψ^{j̄i}
//!   dz^{1..î..n} ∧ dz̄^{1..ĵ..n} is stored through its Hermitian matrix,
//!   entry `(j, i) = ψ^{j̄i}` (row barred, column unbarred). ψ is positive
//!   iff (ψ^{j̄i}) is positive semi-definite.
//! * The hatted-basis sign lives only in the canonical PQForm ↔ FormN1N1
//!   conversion pair below, never in arithmetic.
//! * Generic (p,q)-forms keep one coefficient per strictly increasing index
//!   pair (I, J), i.e. φ = Σ_{I,J incr} φ_{IJ̄} dz^I ∧ dz̄^J.

pub(crate) mod multi_index;
mod star;
mod wedge;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{GridError, ScalarField, TorusGrid};
use crate::hermitian;
use multi_index::{subset_pos, subsets};

pub use star::hodge_star;
pub use wedge::wedge;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("wedge degree overflow: ({p},{q}) exceeds n = {n}")]
    DegreeOverflow { p: usize, q: usize, n: usize },
    #[error("operation needs a (p,p)-form, got ({p},{q})")]
    NotPPForm { p: usize, q: usize },
    #[error("bidegree mismatch: expected ({ep},{eq}), got ({p},{q})")]
    BidegreeMismatch { ep: usize, eq: usize, p: usize, q: usize },
    #[error("coefficient matrix singular at point {point}")]
    Singular { point: usize },
    #[error("matrix not positive definite at point {point} (min eigenvalue {min_eig:e})")]
    NotPositive { point: usize, min_eig: f64 },
}

const PAR_THRESHOLD: usize = 1 << 13;

/// Map over grid points in parallel; each point writes `width` output
/// entries, so results are bit-identical for any thread count.
pub(crate) fn point_map<F>(npoints: usize, width: usize, out: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    debug_assert_eq!(out.len(), npoints * width);
    if npoints >= PAR_THRESHOLD {
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(pt, chunk)| f(pt, chunk));
    } else {
        for (pt, chunk) in out.chunks_mut(width).enumerate() {
            f(pt, chunk);
        }
    }
}

// ---------------------------------------------------------------------------
// Matrix-valued (1,1) and (n−1,n−1) forms
// ---------------------------------------------------------------------------

/// Real (1,1)-form as a Hermitian n×n matrix field g_{ij̄}.
#[derive(Debug, Clone)]
pub struct Form11 {
    grid: TorusGrid,
    data: Vec<Complex64>,
}

/// Real (n−1,n−1)-form as a Hermitian n×n matrix field ψ^{j̄i}, stored in
/// the hatted-basis sign convention described in the module docs.
#[derive(Debug, Clone)]
pub struct FormN1N1 {
    grid: TorusGrid,
    data: Vec<Complex64>,
}

macro_rules! matrix_form_shared {
    ($T:ident) => {
        impl $T {
            pub fn zeros(grid: TorusGrid) -> Self {
                let nn = grid.dim() * grid.dim();
                Self {
                    grid,
                    data: vec![Complex64::default(); grid.num_points() * nn],
                }
            }

            pub fn identity(grid: TorusGrid) -> Self {
                let n = grid.dim();
                let mut form = Self::zeros(grid);
                for pt in 0..grid.num_points() {
                    for i in 0..n {
                        form.data[pt * n * n + i * n + i] = Complex64::new(1.0, 0.0);
                    }
                }
                form
            }

            /// Build from a function of the coordinates and matrix entry.
            pub fn from_entry_fn(grid: TorusGrid, f: impl Fn(&[f64], usize, usize) -> Complex64) -> Self {
                let n = grid.dim();
                let mut form = Self::zeros(grid);
                for pt in 0..grid.num_points() {
                    let x = grid.coords_of(pt);
                    for r in 0..n {
                        for c in 0..n {
                            form.data[pt * n * n + r * n + c] = f(&x[..grid.axes()], r, c);
                        }
                    }
                }
                form
            }

            pub fn grid(&self) -> &TorusGrid {
                &self.grid
            }

            pub fn dim(&self) -> usize {
                self.grid.dim()
            }

            /// Coefficient matrix at a grid point (row-major n×n slice).
            pub fn at(&self, pt: usize) -> &[Complex64] {
                let nn = self.dim() * self.dim();
                &self.data[pt * nn..(pt + 1) * nn]
            }

            pub fn at_mut(&mut self, pt: usize) -> &mut [Complex64] {
                let nn = self.dim() * self.dim();
                &mut self.data[pt * nn..(pt + 1) * nn]
            }

            pub fn data(&self) -> &[Complex64] {
                &self.data
            }

            pub fn data_mut(&mut self) -> &mut [Complex64] {
                &mut self.data
            }

            pub fn scale(&self, c: f64) -> Self {
                Self {
                    grid: self.grid,
                    data: self.data.iter().map(|v| v * c).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Self {
                self.grid.same_grid(&other.grid).expect("add");
                Self {
                    grid: self.grid,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a + b)
                        .collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.grid.same_grid(&other.grid).expect("sub");
                Self {
                    grid: self.grid,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a - b)
                        .collect(),
                }
            }

            pub fn axpy(&mut self, c: f64, other: &Self) {
                self.grid.same_grid(&other.grid).expect("axpy");
                for (a, b) in self.data.iter_mut().zip(&other.data) {
                    *a += c * b;
                }
            }

            /// Largest |entry| deviation from Hermitian symmetry.
            pub fn hermitian_defect(&self) -> f64 {
                let n = self.dim();
                let mut worst = 0.0f64;
                for pt in 0..self.grid.num_points() {
                    let m = self.at(pt);
                    for i in 0..n {
                        for j in 0..n {
                            worst = worst.max((m[i * n + j] - m[j * n + i].conj()).norm());
                        }
                    }
                }
                worst
            }

            /// Symmetrise in place: M ← (M + Mᴴ)/2. Used to strip round-off
            /// from fields that are Hermitian by construction.
            pub fn hermitize(&mut self) {
                let n = self.dim();
                for pt in 0..self.grid.num_points() {
                    let base = pt * n * n;
                    for i in 0..n {
                        for j in i..n {
                            let a = self.data[base + i * n + j];
                            let b = self.data[base + j * n + i].conj();
                            let avg = 0.5 * (a + b);
                            self.data[base + i * n + j] = avg;
                            self.data[base + j * n + i] = avg.conj();
                        }
                        let d = self.data[base + i * n + i].re;
                        self.data[base + i * n + i] = Complex64::new(d, 0.0);
                    }
                }
            }

            /// Smallest eigenvalue over the whole grid and where it occurs.
            pub fn min_eig_with_point(&self) -> (f64, usize) {
                let n = self.dim();
                let mut best = (f64::INFINITY, 0usize);
                for pt in 0..self.grid.num_points() {
                    let e = hermitian::min_eig(n, self.at(pt));
                    if e < best.0 {
                        best = (e, pt);
                    }
                }
                best
            }

            pub fn min_eig(&self) -> f64 {
                self.min_eig_with_point().0
            }

            /// Pointwise determinant of the coefficient matrix.
            pub fn det(&self) -> ScalarField {
                let n = self.dim();
                let mut out = ScalarField::zeros(self.grid);
                for pt in 0..self.grid.num_points() {
                    out.values_mut()[pt] = hermitian::det(n, self.at(pt));
                }
                out
            }

            /// Largest |entry| over the grid.
            pub fn sup_abs(&self) -> f64 {
                self.data
                    .iter()
                    .fold(0.0, |m: f64, v| m.max(v.norm_sqr()))
                    .sqrt()
            }

            pub fn sup_diff(&self, other: &Self) -> f64 {
                self.data
                    .iter()
                    .zip(&other.data)
                    .fold(0.0, |m: f64, (a, b)| m.max((a - b).norm_sqr()))
                    .sqrt()
            }
        }
    };
}

matrix_form_shared!(Form11);
matrix_form_shared!(FormN1N1);

impl Form11 {
    /// Conformal metric e^{u(x)}·δ.
    pub fn conformal(u: &ScalarField) -> Self {
        let grid = *u.grid();
        let n = grid.dim();
        let mut form = Self::zeros(grid);
        for pt in 0..grid.num_points() {
            let e = u.values()[pt].re.exp();
            for i in 0..n {
                form.data[pt * n * n + i * n + i] = Complex64::new(e, 0.0);
            }
        }
        form
    }

    /// Pointwise inverse; fails on the first singular point.
    pub fn pointwise_inverse(&self) -> Result<Form11, FormsError> {
        let n = self.dim();
        let mut out = Form11::zeros(self.grid);
        for pt in 0..self.grid.num_points() {
            let mut inv = hermitian::zero_mat();
            if !hermitian::inverse(n, self.at(pt), &mut inv) {
                return Err(FormsError::Singular { point: pt });
            }
            out.at_mut(pt).copy_from_slice(&inv[..n * n]);
        }
        Ok(out)
    }

    /// Require positive definiteness with the given margin on the smallest
    /// eigenvalue; solver-facing checks use a strict margin so breakdown is
    /// detectable.
    pub fn check_positive(&self, margin: f64) -> Result<(), FormsError> {
        let (e, pt) = self.min_eig_with_point();
        if e > margin {
            Ok(())
        } else {
            Err(FormsError::NotPositive {
                point: pt,
                min_eig: e,
            })
        }
    }

    /// The (1,1)-form as a generic PQForm, coefficients φ_{(i)(j)} = √−1 g_{ij̄}.
    pub fn to_pq(&self) -> PQForm {
        let n = self.dim();
        let np = self.grid.num_points();
        let mut pq = PQForm::zeros(self.grid, 1, 1);
        for c in 0..n * n {
            let (i, j) = (c / n, c % n);
            let dst = &mut pq.data[c * np..(c + 1) * np];
            for pt in 0..np {
                dst[pt] = Complex64::i() * self.data[pt * n * n + i * n + j];
            }
        }
        pq
    }

    /// Inverse of [`Form11::to_pq`]; symmetrises away round-off so the result
    /// is exactly Hermitian (the input must be a real form).
    pub fn from_pq(pq: &PQForm) -> Result<Form11, FormsError> {
        let n = pq.grid.dim();
        if (pq.p, pq.q) != (1, 1) {
            return Err(FormsError::BidegreeMismatch {
                ep: 1,
                eq: 1,
                p: pq.p,
                q: pq.q,
            });
        }
        let np = pq.grid.num_points();
        let mut out = Form11::zeros(pq.grid);
        for c in 0..n * n {
            let (i, j) = (c / n, c % n);
            let src = &pq.data[c * np..(c + 1) * np];
            for pt in 0..np {
                out.data[pt * n * n + i * n + j] = -Complex64::i() * src[pt];
            }
        }
        out.hermitize();
        Ok(out)
    }

    /// tr_α ξ = α^{j̄i} ξ_{ij̄} as a scalar field (α = self).
    pub fn trace_of(&self, xi: &Form11) -> Result<ScalarField, FormsError> {
        let inv = self.pointwise_inverse()?;
        let n = self.dim();
        let mut out = ScalarField::zeros(self.grid);
        for pt in 0..self.grid.num_points() {
            out.values_mut()[pt] = hermitian::trace_mul(n, inv.at(pt), xi.at(pt));
        }
        Ok(out)
    }
}

impl FormN1N1 {
    pub fn check_positive(&self, margin: f64) -> Result<(), FormsError> {
        let n = self.dim();
        for pt in 0..self.grid.num_points() {
            let e = hermitian::min_eig(n, self.at(pt));
            if e <= margin {
                return Err(FormsError::NotPositive {
                    point: pt,
                    min_eig: e,
                });
            }
        }
        Ok(())
    }

    /// Canonical conversion to the generic representation; the hatted-basis
    /// sign (−1)^{n(n+1)/2+i+j+1} and the (√−1)^{n−1} prefactor are applied
    /// here and only here.
    pub fn to_pq(&self) -> PQForm {
        let grid = self.grid;
        let n = grid.dim();
        let np = grid.num_points();
        let mut pq = PQForm::zeros(grid, n - 1, n - 1);
        let sets = subsets(n, n - 1);
        let i_pow = Complex64::i().powu((n - 1) as u32);
        for i in 0..n {
            for j in 0..n {
                let ci = subset_pos_of_complement(n, i, &sets);
                let cj = subset_pos_of_complement(n, j, &sets);
                let comp = ci * sets.len() + cj;
                let sign = hat_sign(n, i, j);
                let factor = i_pow * sign;
                let dst = &mut pq.data[comp * np..(comp + 1) * np];
                for pt in 0..np {
                    dst[pt] = factor * self.data[pt * n * n + j * n + i];
                }
            }
        }
        pq
    }

    /// Inverse of [`FormN1N1::to_pq`]; symmetrises away round-off.
    pub fn from_pq(pq: &PQForm) -> Result<FormN1N1, FormsError> {
        let grid = pq.grid;
        let n = grid.dim();
        if (pq.p, pq.q) != (n - 1, n - 1) {
            return Err(FormsError::BidegreeMismatch {
                ep: n - 1,
                eq: n - 1,
                p: pq.p,
                q: pq.q,
            });
        }
        let np = grid.num_points();
        let sets = subsets(n, n - 1);
        let i_pow = Complex64::i().powu((n - 1) as u32);
        let mut out = FormN1N1::zeros(grid);
        for i in 0..n {
            for j in 0..n {
                let ci = subset_pos_of_complement(n, i, &sets);
                let cj = subset_pos_of_complement(n, j, &sets);
                let comp = ci * sets.len() + cj;
                let inv_factor = (i_pow * hat_sign(n, i, j)).finv();
                let src = &pq.data[comp * np..(comp + 1) * np];
                for pt in 0..np {
                    out.data[pt * n * n + j * n + i] = inv_factor * src[pt];
                }
            }
        }
        out.hermitize();
        Ok(out)
    }

    /// The unique positive (1,1)-form φ with φ^{n−1}/(n−1)! equal to self,
    /// computed pointwise as φ = (det ψ)^{1/(n−1)} ψ⁻¹.
    pub fn root_n_minus_1(&self) -> Result<Form11, FormsError> {
        let n = self.dim();
        let exponent = 1.0 / (n as f64 - 1.0);
        let mut out = Form11::zeros(self.grid);
        for pt in 0..self.grid.num_points() {
            let m = self.at(pt);
            if hermitian::cholesky(n, m).is_none() {
                return Err(FormsError::NotPositive {
                    point: pt,
                    min_eig: hermitian::min_eig(n, m),
                });
            }
            let d = hermitian::det(n, m).re;
            let mut inv = hermitian::zero_mat();
            hermitian::inverse(n, m, &mut inv);
            let scale = d.powf(exponent);
            let dst = out.at_mut(pt);
            for (o, v) in dst.iter_mut().zip(inv.iter()) {
                *o = scale * v;
            }
        }
        Ok(out)
    }
}

fn subset_pos_of_complement(n: usize, hole: usize, sets: &[Vec<u8>]) -> usize {
    let comp: Vec<u8> = (0..n as u8).filter(|&v| v as usize != hole).collect();
    sets.iter().position(|s| *s == comp).expect("complement present")
}

/// (−1)^{n(n+1)/2 + i + j + 1} with 0-based i, j (same parity as 1-based).
fn hat_sign(n: usize, i: usize, j: usize) -> f64 {
    if (n * (n + 1) / 2 + i + j + 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// φ^{n−1}/(n−1)! of a (1,1)-form: coefficients ψ^{ℓ̄k} = det(φ)·φ̃^{ℓ̄k},
/// i.e. the pointwise adjugate of the coefficient matrix.
pub fn power_n_minus_1(phi: &Form11) -> Result<FormN1N1, FormsError> {
    let n = phi.dim();
    let mut out = FormN1N1::zeros(*phi.grid());
    for pt in 0..phi.grid().num_points() {
        let m = phi.at(pt);
        if hermitian::det(n, m).norm() == 0.0 {
            return Err(FormsError::Singular { point: pt });
        }
        let mut adj = hermitian::zero_mat();
        hermitian::adjugate(n, m, &mut adj);
        out.at_mut(pt).copy_from_slice(&adj[..n * n]);
    }
    Ok(out)
}

/// P_α(ξ) = (1/(n−1))((tr_α ξ)α − ξ); algebraic route of the operator that
/// the Hodge star realises as (1/(n−1)!)∗(ξ∧α^{n−2}).
pub fn p_alpha(xi: &Form11, alpha: &Form11) -> Result<Form11, FormsError> {
    xi.grid().same_grid(alpha.grid())?;
    let n = alpha.dim();
    let inv_n1 = 1.0 / (n as f64 - 1.0);
    let mut out = Form11::zeros(*alpha.grid());
    for pt in 0..alpha.grid().num_points() {
        let a = alpha.at(pt);
        let x = xi.at(pt);
        let mut ainv = hermitian::zero_mat();
        if !hermitian::inverse(n, a, &mut ainv) {
            return Err(FormsError::Singular { point: pt });
        }
        let tr = hermitian::trace_mul(n, &ainv[..n * n], x);
        let dst = out.at_mut(pt);
        for i in 0..n * n {
            dst[i] = inv_n1 * (tr * a[i] - x[i]);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generic (p,q)-forms
// ---------------------------------------------------------------------------

/// Coefficient field of a (p,q)-form on strictly increasing index pairs,
/// component-major (each component is a contiguous scalar field).
#[derive(Debug, Clone)]
pub struct PQForm {
    grid: TorusGrid,
    p: usize,
    q: usize,
    /// `data[comp * num_points + pt]`, comp = pos(I)·C(n,q) + pos(J).
    data: Vec<Complex64>,
}

impl PQForm {
    pub fn zeros(grid: TorusGrid, p: usize, q: usize) -> Self {
        assert!(p <= grid.dim() && q <= grid.dim());
        let ncomp = binom(grid.dim(), p) * binom(grid.dim(), q);
        Self {
            grid,
            p,
            q,
            data: vec![Complex64::default(); ncomp * grid.num_points()],
        }
    }

    /// The constant function 1 as a (0,0)-form.
    pub fn one(grid: TorusGrid) -> Self {
        let mut f = Self::zeros(grid, 0, 0);
        f.data.fill(Complex64::new(1.0, 0.0));
        f
    }

    pub fn from_scalar(f: &ScalarField) -> Self {
        Self {
            grid: *f.grid(),
            p: 0,
            q: 0,
            data: f.values().to_vec(),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn num_comps(&self) -> usize {
        binom(self.grid.dim(), self.p) * binom(self.grid.dim(), self.q)
    }

    /// The increasing index pair of component `c`.
    pub fn comp_indices(&self, c: usize) -> (Vec<u8>, Vec<u8>) {
        let nq = binom(self.grid.dim(), self.q);
        let si = subsets(self.grid.dim(), self.p);
        let sj = subsets(self.grid.dim(), self.q);
        (si[c / nq].clone(), sj[c % nq].clone())
    }

    pub fn comp_pos(&self, unbarred: &[u8], barred: &[u8]) -> usize {
        let nq = binom(self.grid.dim(), self.q);
        subset_pos(self.grid.dim(), unbarred) * nq + subset_pos(self.grid.dim(), barred)
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        let np = self.grid.num_points();
        &self.data[c * np..(c + 1) * np]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.grid.num_points();
        &mut self.data[c * np..(c + 1) * np]
    }

    /// Coefficient φ_{IJ̄} at one point.
    pub fn coeff_at(&self, c: usize, pt: usize) -> Complex64 {
        self.data[c * self.grid.num_points() + pt]
    }

    pub fn scale(&self, s: Complex64) -> PQForm {
        PQForm {
            grid: self.grid,
            p: self.p,
            q: self.q,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &PQForm) -> Result<PQForm, FormsError> {
        self.expect_bidegree(other.p, other.q)?;
        self.grid.same_grid(&other.grid)?;
        Ok(PQForm {
            grid: self.grid,
            p: self.p,
            q: self.q,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &PQForm) -> Result<PQForm, FormsError> {
        Ok(self.add(&other.scale(Complex64::new(-1.0, 0.0)))?)
    }

    pub fn sup_abs(&self) -> f64 {
        self.data
                    .iter()
                    .fold(0.0, |m: f64, v| m.max(v.norm_sqr()))
                    .sqrt()
    }

    pub fn sup_diff(&self, other: &PQForm) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).norm_sqr()))
            .sqrt()
    }

    /// Complex conjugate, a (q,p)-form: (conj φ)_{J,I} = (−1)^{pq} conj(φ_{I,J}).
    pub fn conj(&self) -> PQForm {
        let mut out = PQForm::zeros(self.grid, self.q, self.p);
        let np = self.grid.num_points();
        let sign = if (self.p * self.q) % 2 == 0 { 1.0 } else { -1.0 };
        for c_out in 0..out.num_comps() {
            let (ko, lo) = out.comp_indices(c_out);
            let c_in = self.comp_pos(&lo, &ko);
            let src = &self.data[c_in * np..(c_in + 1) * np];
            let dst = &mut out.data[c_out * np..(c_out + 1) * np];
            for pt in 0..np {
                dst[pt] = sign * src[pt].conj();
            }
        }
        out
    }

    /// Sup-norm distance from reality, ‖φ − conj φ‖_∞ (p = q only).
    pub fn reality_defect(&self) -> f64 {
        self.sub(&self.conj()).map(|d| d.sup_abs()).unwrap_or(f64::INFINITY)
    }

    fn expect_bidegree(&self, p: usize, q: usize) -> Result<(), FormsError> {
        if (self.p, self.q) == (p, q) {
            Ok(())
        } else {
            Err(FormsError::BidegreeMismatch {
                ep: p,
                eq: q,
                p: self.p,
                q: self.q,
            })
        }
    }
}

/// ℜφ = ½(φ + conj φ) for (p,p)-forms; idempotent and equal to its own
/// conjugate.
pub fn re_part(phi: &PQForm) -> Result<PQForm, FormsError> {
    if phi.p != phi.q {
        return Err(FormsError::NotPPForm { p: phi.p, q: phi.q });
    }
    let conj = phi.conj();
    let mut out = phi.clone();
    for (o, c) in out.data.iter_mut().zip(&conj.data) {
        *o = 0.5 * (*o + c);
    }
    Ok(out)
}

/// m! as a float (m ≤ 6 here, so exact).
pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}
