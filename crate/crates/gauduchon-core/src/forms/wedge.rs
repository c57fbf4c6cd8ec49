//! Exterior product of (p,q)-form fields.

use num_complex::Complex64;

use super::multi_index::splits;
use super::{FormsError, PQForm};

/// a ∧ b with the shuffle sign. Bilinear and graded-commutative:
/// b ∧ a = (−1)^{(p₁+q₁)(p₂+q₂)} a ∧ b.
pub fn wedge(a: &PQForm, b: &PQForm) -> Result<PQForm, FormsError> {
    a.grid.same_grid(&b.grid)?;
    let n = a.grid.dim();
    let (p, q) = (a.p + b.p, a.q + b.q);
    if p > n || q > n {
        return Err(FormsError::DegreeOverflow { p, q, n });
    }
    let mut out = PQForm::zeros(a.grid, p, q);
    let np = a.grid.num_points();

    // dz̄^{J₁} moving past dz^{I₂} contributes (−1)^{q₁·p₂}.
    let cross = if (a.q * b.p) % 2 == 0 { 1.0 } else { -1.0 };

    // term table: (out comp, a comp, b comp, sign)
    let mut terms: Vec<(usize, usize, usize, f64)> = Vec::new();
    for oc in 0..out.num_comps() {
        let (ki, kj) = out.comp_indices(oc);
        for (i1, i2, si) in splits(&ki, a.p) {
            for (j1, j2, sj) in splits(&kj, a.q) {
                let ca = a.comp_pos(&i1, &j1);
                let cb = b.comp_pos(&i2, &j2);
                terms.push((oc, ca, cb, si * sj * cross));
            }
        }
    }

    for (oc, ca, cb, sign) in terms {
        let sa = &a.data[ca * np..(ca + 1) * np];
        let sb = &b.data[cb * np..(cb + 1) * np];
        let dst = &mut out.data[oc * np..(oc + 1) * np];
        let s = Complex64::new(sign, 0.0);
        for pt in 0..np {
            dst[pt] += s * sa[pt] * sb[pt];
        }
    }
    Ok(out)
}
