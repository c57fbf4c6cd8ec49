//! Differential operators mixing scalar fields and form fields: the complex
//! Hessian i∂∂̄, metric Laplacians, and exterior derivatives ∂, ∂̄ of
//! (p,q)-form fields. Everything is trigonometric differentiation, so the
//! operators are exact on band-limited data.

use num_complex::Complex64;
use thiserror::Error;

use crate::forms::{Form11, FormsError, PQForm};
use crate::grid::{GridError, ScalarField};
use crate::hermitian;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Tolerance used when asserting a field is real before taking i∂∂̄.
pub const REAL_TOL: f64 = 1e-12;

/// Complex Hessian of a real field: the matrix field (∂ᵢ∂ⱼ̄ f), Hermitian at
/// every point by construction, so √−1 ∂∂̄f is a real (1,1)-form.
///
/// The upper triangle is computed spectrally off a single forward transform
/// and mirrored, which both halves the transform count and makes the
/// Hermitian symmetry exact.
pub fn i_ddbar(f: &ScalarField) -> Result<Form11, CalculusError> {
    f.check_real(REAL_TOL)?;
    let grid = *f.grid();
    let n = grid.dim();
    let tau = std::f64::consts::TAU;
    let spectrum = f.spectrum();
    let mut out = Form11::zeros(grid);
    for i in 0..n {
        for j in i..n {
            // ∂ᵢ∂ⱼ̄ ↦ −(π/L)²·κᵢ·κ̄ⱼ, κᵢ = kᵢ − √−1 k_{n+i}
            let entry = ScalarField::from_spectrum_symbol(grid, &spectrum, |k| {
                let ki = Complex64::new(k[i], -k[n + i]);
                let kj = Complex64::new(k[j], -k[n + j]);
                -(0.25 * tau * tau) * ki * kj.conj()
            });
            let vals = entry.values();
            let nn = n * n;
            let data = out.data_mut();
            if i == j {
                for (pt, v) in vals.iter().enumerate() {
                    data[pt * nn + i * n + i] = Complex64::new(v.re, 0.0);
                }
            } else {
                for (pt, v) in vals.iter().enumerate() {
                    data[pt * nn + i * n + j] = *v;
                    data[pt * nn + j * n + i] = v.conj();
                }
            }
        }
    }
    Ok(out)
}

/// Δφ = α^{j̄i} ∂ᵢ∂ⱼ̄ φ, the Laplacian of the positive (1,1)-form α;
/// real-valued for real φ.
pub fn laplacian(f: &ScalarField, alpha: &Form11) -> Result<ScalarField, CalculusError> {
    let hess = i_ddbar(f)?;
    Ok(contract_with_inverse(&hess, alpha)?)
}

/// α^{j̄i} h_{ij̄} as a real scalar field (both arguments Hermitian fields).
pub fn contract_with_inverse(h: &Form11, alpha: &Form11) -> Result<ScalarField, FormsError> {
    h.grid().same_grid(alpha.grid())?;
    let n = alpha.dim();
    let mut out = ScalarField::zeros(*alpha.grid());
    for pt in 0..alpha.grid().num_points() {
        let mut ainv = hermitian::zero_mat();
        if !hermitian::inverse(n, alpha.at(pt), &mut ainv) {
            return Err(FormsError::Singular { point: pt });
        }
        let tr = hermitian::trace_mul(n, &ainv[..n * n], h.at(pt));
        out.values_mut()[pt] = Complex64::new(tr.re, 0.0);
    }
    Ok(out)
}

/// ∂φ of a scalar as a (1,0)-form; all n derivatives come off a single
/// forward transform.
pub fn d_holo_form(f: &ScalarField) -> Result<PQForm, CalculusError> {
    let grid = *f.grid();
    let n = grid.dim();
    let tau = std::f64::consts::TAU;
    let spectrum = f.spectrum();
    let mut out = PQForm::zeros(grid, 1, 0);
    for i in 0..n {
        let df = ScalarField::from_spectrum_symbol(grid, &spectrum, |k| {
            Complex64::i() * (0.5 * tau) * Complex64::new(k[i], -k[n + i])
        });
        let c = out.comp_pos(&[i as u8], &[]);
        out.comp_mut(c).copy_from_slice(df.values());
    }
    Ok(out)
}

/// Exterior ∂ of a (p,q)-form field:
/// (∂φ)_{i₀..i_p, J} = Σ_k (−1)ᵏ ∂_{i_k} φ_{i₀..î_k..i_p, J}.
pub fn pq_d_holo(phi: &PQForm) -> Result<PQForm, CalculusError> {
    pq_exterior(phi, false)
}

/// Exterior ∂̄; the extra (−1)^p accounts for dz̄ passing the p dz factors:
/// (∂̄φ)_{I, j₀..j_q} = (−1)^p Σ_k (−1)ᵏ ∂_{j̄_k} φ_{I, j₀..ĵ_k..j_q}.
pub fn pq_d_antiholo(phi: &PQForm) -> Result<PQForm, CalculusError> {
    pq_exterior(phi, true)
}

fn pq_exterior(phi: &PQForm, barred: bool) -> Result<PQForm, CalculusError> {
    let grid = *phi.grid();
    let n = grid.dim();
    let (p, q) = phi.bidegree();
    let (op, oq) = if barred { (p, q + 1) } else { (p + 1, q) };
    if op > n || oq > n {
        return Err(CalculusError::Forms(FormsError::DegreeOverflow { p: op, q: oq, n }));
    }
    let mut out = PQForm::zeros(grid, op, oq);
    let global_sign = if barred && p % 2 == 1 { -1.0 } else { 1.0 };

    // Differentiate each input component once per axis, scatter into the
    // cofactor positions of the output.
    for c_in in 0..phi.num_comps() {
        let (iset, jset) = phi.comp_indices(c_in);
        let field = ScalarField::from_values(grid, phi.comp(c_in).to_vec());
        for axis in 0..n as u8 {
            let grown = if barred {
                if jset.contains(&axis) {
                    continue;
                }
                let df = field.d_antiholo(axis as usize)?;
                let (merged, sign) = insert_sign(&jset, axis);
                (iset.clone(), merged, sign, df)
            } else {
                if iset.contains(&axis) {
                    continue;
                }
                let df = field.d_holo(axis as usize)?;
                let (merged, sign) = insert_sign(&iset, axis);
                (merged, jset.clone(), sign, df)
            };
            let (oi, oj, sign, df) = grown;
            let c_out = out.comp_pos(&oi, &oj);
            let s = Complex64::new(global_sign * sign, 0.0);
            let dst = out.comp_mut(c_out);
            for (d, v) in dst.iter_mut().zip(df.values()) {
                *d += s * v;
            }
        }
    }
    Ok(out)
}

/// Insert `axis` into an increasing tuple; the sign (−1)^position is the
/// cost of moving the new factor from the front to its slot.
fn insert_sign(set: &[u8], axis: u8) -> (Vec<u8>, f64) {
    let pos = set.iter().take_while(|&&v| v < axis).count();
    let mut merged = Vec::with_capacity(set.len() + 1);
    merged.extend_from_slice(&set[..pos]);
    merged.push(axis);
    merged.extend_from_slice(&set[pos..]);
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    (merged, sign)
}
