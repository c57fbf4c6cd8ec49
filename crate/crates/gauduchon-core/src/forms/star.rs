//! Hodge star of (p,q)-forms with respect to the volume form αⁿ/n! of a
//! positive (1,1)-form α.
//!
//! For φ of bidegree (p,q) the star has bidegree (n−q, n−p) and coefficients
//!
//!   (∗φ)_{A B̄} = (√−1)ⁿ(−1)^{np+n(n−1)/2} det(α) ·
//!       Σ_{I,J} φ_{I J̄} · det(α^{·̄·}[comp(B), I]) · det(α^{·̄·}[J, comp(A)])
//!                · δ^{1..n}_{comp(B) B} · δ^{1..n}_{comp(A) A},
//!
//! where α^{x̄y} is the inverse metric (barred row, unbarred column) and the
//! minors run over the listed row/column index sets. Summing over strictly
//! increasing I, J with minor determinants absorbs the 1/(p!q!(n−p)!(n−q)!)
//! of the all-indices formula.

use num_complex::Complex64;

use super::multi_index::{complement, concat_sign, subsets};
use super::{point_map, Form11, FormsError, PQForm};
use crate::hermitian;

struct Term {
    out_comp: usize,
    in_comp: usize,
    sign: f64,
    /// rows (barred) and columns (unbarred) of the two inverse-metric minors
    rows_p: Vec<u8>,
    cols_p: Vec<u8>,
    rows_q: Vec<u8>,
    cols_q: Vec<u8>,
}

/// ∗φ with respect to αⁿ/n!. ∗ is a real operator, ∗∗φ = (−1)^{p+q} φ, and
/// ∗1 = αⁿ/n!.
pub fn hodge_star(phi: &PQForm, alpha: &Form11) -> Result<PQForm, FormsError> {
    phi.grid.same_grid(alpha.grid())?;
    let n = phi.grid.dim();
    let (p, q) = (phi.p, phi.q);
    let mut out = PQForm::zeros(phi.grid, n - q, n - p);
    let np = phi.grid.num_points();

    // (√−1)ⁿ(−1)^{np + n(n−1)/2}
    let mut pref = Complex64::i().powu(n as u32);
    if (n * p + n * (n - 1) / 2) % 2 == 1 {
        pref = -pref;
    }

    let in_i = subsets(n, p);
    let in_j = subsets(n, q);
    let out_a = subsets(n, n - q);
    let out_b = subsets(n, n - p);

    let mut terms: Vec<Term> = Vec::new();
    for (ai, aset) in out_a.iter().enumerate() {
        let comp_a = complement(n, aset);
        let sign_a = concat_sign(&comp_a, aset);
        for (bi, bset) in out_b.iter().enumerate() {
            let comp_b = complement(n, bset);
            let sign_b = concat_sign(&comp_b, bset);
            let out_comp = ai * out_b.len() + bi;
            for (ii, iset) in in_i.iter().enumerate() {
                for (ji, jset) in in_j.iter().enumerate() {
                    terms.push(Term {
                        out_comp,
                        in_comp: ii * in_j.len() + ji,
                        sign: sign_a * sign_b,
                        rows_p: comp_b.clone(),
                        cols_p: iset.clone(),
                        rows_q: jset.clone(),
                        cols_q: comp_a.clone(),
                    });
                }
            }
        }
    }

    let ncomp_out = out.num_comps();
    let n_in = phi.num_comps();
    let phi_data = &phi.data;
    let grid = phi.grid;

    // Work point-major: for each point invert α once and accumulate all
    // output components.
    let mut buf = vec![Complex64::default(); np * ncomp_out];
    point_map(np, ncomp_out, &mut buf, |pt, dst| {
        let a = alpha.at(pt);
        let mut ainv = hermitian::zero_mat();
        if !hermitian::inverse(n, a, &mut ainv) {
            // flagged after the loop via a NaN marker
            dst.fill(Complex64::new(f64::NAN, 0.0));
            return;
        }
        let det_a = hermitian::det(n, a);
        let scale = pref * det_a;
        let mut in_vals = [Complex64::default(); 9];
        for (c, v) in in_vals.iter_mut().enumerate().take(n_in) {
            *v = phi_data[c * np + pt];
        }
        dst.fill(Complex64::default());
        for t in &terms {
            let m1 = minor_det(n, &ainv[..n * n], &t.rows_p, &t.cols_p);
            let m2 = minor_det(n, &ainv[..n * n], &t.rows_q, &t.cols_q);
            dst[t.out_comp] += t.sign * in_vals[t.in_comp] * m1 * m2;
        }
        for v in dst.iter_mut() {
            *v *= scale;
        }
    });

    if buf.iter().any(|v| v.re.is_nan()) {
        let pt = (0..np)
            .find(|&pt| buf[pt * ncomp_out].re.is_nan())
            .unwrap_or(0);
        return Err(FormsError::Singular { point: pt });
    }

    // transpose buffer (point-major) into component-major storage
    for c in 0..ncomp_out {
        let dst = &mut out.data[c * np..(c + 1) * np];
        for pt in 0..np {
            dst[pt] = buf[pt * ncomp_out + c];
        }
    }
    let _ = grid;
    Ok(out)
}

/// Determinant of the sub-matrix of the inverse metric with the given
/// barred rows and unbarred columns (sizes 0..=3; empty minor is 1).
/// `ainv` is row-major with stride `n`.
fn minor_det(n: usize, ainv: &[Complex64], rows: &[u8], cols: &[u8]) -> Complex64 {
    let k = rows.len();
    debug_assert_eq!(k, cols.len());
    let e = |r: usize, c: usize| ainv[rows[r] as usize * n + cols[c] as usize];
    match k {
        0 => Complex64::new(1.0, 0.0),
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => unreachable!("minor size ≤ 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{power_n_minus_1, wedge, Form11, FormN1N1, PQForm};
    use super::*;
    use crate::grid::TorusGrid;

    fn grid2() -> TorusGrid {
        TorusGrid::new(2, 4).unwrap()
    }

    fn grid3() -> TorusGrid {
        TorusGrid::new(3, 4).unwrap()
    }

    fn random_herm(grid: TorusGrid, seed: u64, shift: f64) -> Form11 {
        let mut g = Form11::from_entry_fn(grid, |x, i, j| {
            let t = std::f64::consts::TAU;
            let a = ((seed + 1) as f64 * 0.37 + (i * 3 + j) as f64).sin();
            let b = ((seed + 2) as f64 * 0.51 + (i + 5 * j) as f64).cos();
            let base = Complex64::new(a, if i == j { 0.0 } else { b });
            base * (1.0 + 0.1 * (t * x[0]).sin()) + if i == j { shift } else { 0.0 }
        });
        g.hermitize();
        g
    }

    #[test]
    fn star_of_one_is_volume_form() {
        // ∗1 = αⁿ/n!
        for grid in [grid2(), grid3()] {
            let n = grid.dim();
            let alpha = random_herm(grid, 3, 4.0);
            let one = PQForm::one(grid);
            let star1 = hodge_star(&one, &alpha).unwrap();
            // αⁿ/n! via repeated wedge
            let a_pq = alpha.to_pq();
            let mut pow = a_pq.clone();
            for _ in 1..n {
                pow = wedge(&pow, &a_pq).unwrap();
            }
            let mut fact = 1.0;
            for k in 2..=n {
                fact *= k as f64;
            }
            let vol = pow.scale(Complex64::new(1.0 / fact, 0.0));
            assert!(star1.sup_diff(&vol) < 1e-11 * vol.sup_abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn star_swaps_diagonal_n2() {
        // n=2, α = identity: ∗diag(a,b) = diag(b,a)
        let grid = grid2();
        let alpha = Form11::identity(grid);
        let phi = Form11::from_entry_fn(grid, |_, i, j| {
            if i == j {
                Complex64::new(if i == 0 { 3.0 } else { 5.0 }, 0.0)
            } else {
                Complex64::default()
            }
        });
        let star = hodge_star(&phi.to_pq(), &alpha).unwrap();
        let expect = Form11::from_entry_fn(grid, |_, i, j| {
            if i == j {
                Complex64::new(if i == 0 { 5.0 } else { 3.0 }, 0.0)
            } else {
                Complex64::default()
            }
        });
        assert!(star.sup_diff(&expect.to_pq()) < 1e-12);
    }

    #[test]
    fn star_involution_all_bidegrees() {
        // ∗∗φ = (−1)^{p+q} φ
        for grid in [grid2(), grid3()] {
            let n = grid.dim();
            let alpha = random_herm(grid, 11, 5.0);
            for p in 0..=n {
                for q in 0..=n {
                    let mut phi = PQForm::zeros(grid, p, q);
                    for c in 0..phi.num_comps() {
                        let v = Complex64::new(
                            ((c + 1) as f64 * 0.73).sin(),
                            ((c + 2) as f64 * 1.19).cos(),
                        );
                        phi.comp_mut(c).fill(v);
                    }
                    let ss = hodge_star(&hodge_star(&phi, &alpha).unwrap(), &alpha).unwrap();
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    let diff = ss.sub(&phi.scale(Complex64::new(sign, 0.0))).unwrap().sup_abs();
                    assert!(diff < 1e-11, "n={n} (p,q)=({p},{q}): {diff}");
                }
            }
        }
    }

    #[test]
    fn star_is_real_operator() {
        // conj(∗φ) = ∗conj(φ)
        let grid = grid3();
        let alpha = random_herm(grid, 7, 4.5);
        let mut phi = PQForm::zeros(grid, 2, 1);
        for c in 0..phi.num_comps() {
            phi.comp_mut(c)
                .fill(Complex64::new((c as f64).sin(), (c as f64 * 2.0).cos()));
        }
        let lhs = hodge_star(&phi, &alpha).unwrap().conj();
        let rhs = hodge_star(&phi.conj(), &alpha).unwrap();
        assert!(lhs.sup_diff(&rhs) < 1e-11);
    }

    #[test]
    fn det_ratio_identity() {
        // det(∗φ)/det(∗ξ) = det φ/det ξ, stars read in the matrix convention
        for grid in [grid2(), grid3()] {
            let alpha = random_herm(grid, 23, 5.0);
            let phi = random_herm(grid, 31, 6.0);
            let xi = random_herm(grid, 47, 6.5);
            let sphi = FormN1N1::from_pq(&hodge_star(&phi.to_pq(), &alpha).unwrap()).unwrap();
            let sxi = FormN1N1::from_pq(&hodge_star(&xi.to_pq(), &alpha).unwrap()).unwrap();
            let (dp, dx) = (phi.det(), xi.det());
            let (dsp, dsx) = (sphi.det(), sxi.det());
            for pt in 0..grid.num_points().min(64) {
                let lhs = dsp.values()[pt] / dsx.values()[pt];
                let rhs = dp.values()[pt] / dx.values()[pt];
                assert!(
                    (lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0),
                    "n = {}: {lhs} vs {rhs}",
                    grid.dim()
                );
            }
        }
    }

    #[test]
    fn p_alpha_star_route_matches_algebraic() {
        // (1/(n−1)!)∗(ξ∧α^{n−2}) = (1/(n−1))((tr_α ξ)α − ξ)
        for grid in [grid2(), grid3()] {
            let n = grid.dim();
            let alpha = random_herm(grid, 5, 5.0);
            let xi = random_herm(grid, 17, 1.0);
            let algebraic = super::super::p_alpha(&xi, &alpha).unwrap();

            let apow = if n == 2 {
                PQForm::one(grid)
            } else {
                alpha.to_pq()
            };
            let wedge_route = wedge(&xi.to_pq(), &apow).unwrap();
            let starred = hodge_star(&wedge_route, &alpha)
                .unwrap()
                .scale(Complex64::new(1.0 / super::super::factorial(n - 1), 0.0));
            let diff = starred.sup_diff(&algebraic.to_pq());
            assert!(diff < 1e-10, "n = {n}: {diff}");
        }
    }

    #[test]
    fn star_of_power_recovers_power_through_involution() {
        // (1/(n−1)!)∗(result) sends ω_h^{n−1}/(n−1)! forward; ∗∗ = +1 brings it back
        let grid = grid3();
        let alpha = random_herm(grid, 2, 5.0);
        let omega_h = random_herm(grid, 13, 4.0);
        let psi = power_n_minus_1(&omega_h).unwrap().to_pq();
        let starred = hodge_star(&psi, &alpha).unwrap();
        let back = hodge_star(&starred, &alpha).unwrap();
        // (n−1,n−1) has even total degree, so ∗∗ = +1
        assert!(back.sup_diff(&psi) < 1e-10 * psi.sup_abs().max(1.0));
    }
}
