//! Dense kernels for the pointwise n×n Hermitian matrices (n ≤ 3) that
//! carry (1,1)- and (n−1,n−1)-form coefficients.
//!
//! Matrices are row-major slices of length n². Positive-definiteness is
//! detected through the Cholesky factorisation, so log-determinants come
//! with a positivity certificate for free.

use num_complex::Complex64;

pub const MAX_N: usize = 3;
pub type Mat = [Complex64; MAX_N * MAX_N];

pub fn zero_mat() -> Mat {
    [Complex64::default(); MAX_N * MAX_N]
}

/// Determinant by cofactor expansion (n ≤ 3).
pub fn det(n: usize, a: &[Complex64]) -> Complex64 {
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => unreachable!("n ≤ 3"),
    }
}

/// Adjugate matrix: adj(A) = det(A)·A⁻¹, defined for singular A too.
pub fn adjugate(n: usize, a: &[Complex64], out: &mut [Complex64]) {
    match n {
        1 => out[0] = Complex64::new(1.0, 0.0),
        2 => {
            out[0] = a[3];
            out[1] = -a[1];
            out[2] = -a[2];
            out[3] = a[0];
        }
        3 => {
            out[0] = a[4] * a[8] - a[5] * a[7];
            out[1] = a[2] * a[7] - a[1] * a[8];
            out[2] = a[1] * a[5] - a[2] * a[4];
            out[3] = a[5] * a[6] - a[3] * a[8];
            out[4] = a[0] * a[8] - a[2] * a[6];
            out[5] = a[2] * a[3] - a[0] * a[5];
            out[6] = a[3] * a[7] - a[4] * a[6];
            out[7] = a[1] * a[6] - a[0] * a[7];
            out[8] = a[0] * a[4] - a[1] * a[3];
        }
        _ => unreachable!("n ≤ 3"),
    }
}

/// Matrix inverse via adjugate/det. Returns false when |det| vanishes.
pub fn inverse(n: usize, a: &[Complex64], out: &mut [Complex64]) -> bool {
    let d = det(n, a);
    if d.norm() == 0.0 || !d.is_finite() {
        return false;
    }
    let mut adj = zero_mat();
    adjugate(n, a, &mut adj);
    let inv_d = d.finv();
    for (o, &v) in out.iter_mut().zip(adj.iter()).take(n * n) {
        *o = v * inv_d;
    }
    true
}

/// Lower Cholesky factor of a Hermitian positive definite matrix
/// (A = L·Lᴴ). `None` when a pivot is non-positive or non-finite, i.e.
/// exactly when A fails to be positive definite.
pub fn cholesky(n: usize, a: &[Complex64]) -> Option<Mat> {
    let mut l = zero_mat();
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * MAX_N + k] * l[j * MAX_N + k].conj();
            }
            if i == j {
                let d = sum.re;
                if !(d > 0.0) || !d.is_finite() {
                    return None;
                }
                l[i * MAX_N + i] = Complex64::new(d.sqrt(), 0.0);
            } else {
                l[i * MAX_N + j] = sum / l[j * MAX_N + j].re;
            }
        }
    }
    Some(l)
}

/// log det of a Hermitian positive definite matrix via Cholesky.
pub fn logdet_pd(n: usize, a: &[Complex64]) -> Option<f64> {
    let l = cholesky(n, a)?;
    let mut s = 0.0;
    for i in 0..n {
        s += l[i * MAX_N + i].re.ln();
    }
    Some(2.0 * s)
}

/// Eigenvalues of a Hermitian matrix, ascending. 2×2 in closed form,
/// 3×3 by cyclic complex Jacobi sweeps (deterministic, ~1e−15 accurate).
pub fn eigvals(n: usize, a: &[Complex64]) -> [f64; MAX_N] {
    let mut ev = [0.0f64; MAX_N];
    match n {
        1 => ev[0] = a[0].re,
        2 => {
            let tr = a[0].re + a[3].re;
            let d = a[0].re - a[3].re;
            let disc = (d * d + 4.0 * a[1].norm_sqr()).sqrt();
            ev[0] = 0.5 * (tr - disc);
            ev[1] = 0.5 * (tr + disc);
        }
        3 => {
            let mut m = zero_mat();
            m[..9].copy_from_slice(&a[..9]);
            let scale = m.iter().fold(0.0f64, |s, v| s.max(v.norm())).max(1e-300);
            for _sweep in 0..30 {
                let mut off = 0.0;
                for p in 0..3 {
                    for q in (p + 1)..3 {
                        off += m[p * MAX_N + q].norm_sqr();
                    }
                }
                if off.sqrt() <= 1e-16 * scale {
                    break;
                }
                for p in 0..3 {
                    for q in (p + 1)..3 {
                        jacobi_rotate(&mut m, p, q);
                    }
                }
            }
            for i in 0..3 {
                ev[i] = m[i * MAX_N + i].re;
            }
            ev[..3].sort_by(|x, y| x.partial_cmp(y).unwrap());
        }
        _ => unreachable!("n ≤ 3"),
    }
    ev
}

/// One complex Jacobi rotation annihilating m[p][q] (p < q), applied as
/// M ← Jᴴ M J on the full 3×3 block.
fn jacobi_rotate(m: &mut Mat, p: usize, q: usize) {
    let apq = m[p * MAX_N + q];
    if apq.norm() == 0.0 {
        return;
    }
    let app = m[p * MAX_N + p].re;
    let aqq = m[q * MAX_N + q].re;
    // Phase so the pivot becomes real, then a real Jacobi angle.
    let phase = apq / apq.norm();
    let b = apq.norm();
    let theta = 0.5 * (2.0 * b).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    // Column rotation: col_p ← c·col_p − s·phasē·col_q ; col_q ← s·phase·col_p + c·col_q
    let cp = Complex64::new(c, 0.0);
    let sp = phase * s;
    for r in 0..3 {
        let vp = m[r * MAX_N + p];
        let vq = m[r * MAX_N + q];
        m[r * MAX_N + p] = vp * cp - vq * sp.conj();
        m[r * MAX_N + q] = vp * sp + vq * cp;
    }
    for col in 0..3 {
        let vp = m[p * MAX_N + col];
        let vq = m[q * MAX_N + col];
        m[p * MAX_N + col] = vp * cp - vq * sp;
        m[q * MAX_N + col] = vp * sp.conj() + vq * cp;
    }
    // Hermitian clean-up of the pivot pair.
    m[p * MAX_N + q] = Complex64::new(0.0, 0.0);
    m[q * MAX_N + p] = Complex64::new(0.0, 0.0);
    m[p * MAX_N + p] = Complex64::new(m[p * MAX_N + p].re, 0.0);
    m[q * MAX_N + q] = Complex64::new(m[q * MAX_N + q].re, 0.0);
}

pub fn min_eig(n: usize, a: &[Complex64]) -> f64 {
    eigvals(n, a)[0]
}

/// Generalised eigenvalues of the pencil (G, A) with A Hermitian positive
/// definite: the eigenvalues of the endomorphism G·A⁻¹, computed as the
/// ordinary spectrum of L⁻¹ G L⁻ᴴ with A = L·Lᴴ. Ascending order.
pub fn gen_eigvals(n: usize, g: &[Complex64], a: &[Complex64]) -> Option<[f64; MAX_N]> {
    let l = cholesky(n, a)?;
    // X = L⁻¹ G (forward substitution on columns), then M = X L⁻ᴴ
    // (forward substitution on rows, conjugated).
    let mut x = zero_mat();
    for col in 0..n {
        for i in 0..n {
            let mut sum = g[i * n + col];
            for k in 0..i {
                sum -= l[i * MAX_N + k] * x[k * MAX_N + col];
            }
            x[i * MAX_N + col] = sum / l[i * MAX_N + i].re;
        }
    }
    let mut m = zero_mat();
    for row in 0..n {
        for j in 0..n {
            let mut sum = x[row * MAX_N + j];
            for k in 0..j {
                sum -= m[row * MAX_N + k] * l[j * MAX_N + k].conj();
            }
            m[row * MAX_N + j] = sum / l[j * MAX_N + j].re;
        }
    }
    let mut packed = [Complex64::default(); 9];
    for i in 0..n {
        for j in 0..n {
            packed[i * n + j] = m[i * MAX_N + j];
        }
    }
    Some(eigvals(n, &packed[..n * n]))
}

/// C ← A·B for row-major n×n blocks.
pub fn mat_mul(n: usize, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::default();
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = s;
        }
    }
}

/// tr(A·B).
pub fn trace_mul(n: usize, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut s = Complex64::default();
    for i in 0..n {
        for k in 0..n {
            s += a[i * n + k] * b[k * n + i];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm3() -> Vec<Complex64> {
        // eigenvalues of this matrix are computed by the tests themselves
        vec![
            Complex64::new(4.0, 0.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, -0.25),
            Complex64::new(1.0, -2.0),
            Complex64::new(6.0, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(0.5, 0.25),
            Complex64::new(-1.0, -0.5),
            Complex64::new(5.0, 0.0),
        ]
    }

    #[test]
    fn det_of_diagonal() {
        let a = [
            Complex64::new(2.0, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(3.0, 0.0),
        ];
        assert_eq!(det(2, &a), Complex64::new(6.0, 0.0));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = herm3();
        let mut inv = zero_mat();
        assert!(inverse(3, &a, &mut inv));
        let mut prod = zero_mat();
        mat_mul(3, &a, &inv[..9], &mut prod);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i * 3 + j] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_detects_indefiniteness() {
        let a = herm3();
        assert!(cholesky(3, &a).is_some());
        let neg: Vec<Complex64> = a.iter().map(|v| -v).collect();
        assert!(cholesky(3, &neg).is_none());
    }

    #[test]
    fn logdet_matches_direct_det() {
        let a = herm3();
        let ld = logdet_pd(3, &a).unwrap();
        assert!((ld - det(3, &a).re.ln()).abs() < 1e-12);
    }

    #[test]
    fn eigvals_sum_and_product_match_trace_and_det() {
        let a = herm3();
        let ev = eigvals(3, &a);
        let tr: f64 = (0..3).map(|i| a[i * 3 + i].re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-12);
        assert!((ev[0] * ev[1] * ev[2] - det(3, &a).re).abs() < 1e-10);
        assert!(ev[0] <= ev[1] && ev[1] <= ev[2]);
    }

    #[test]
    fn eigvals_2x2_closed_form() {
        let a = [
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let ev = eigvals(2, &a);
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn gen_eigvals_of_identity_pencil() {
        let a = herm3();
        let id: Vec<Complex64> = (0..9)
            .map(|i| Complex64::new(if i % 4 == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let ge = gen_eigvals(3, &a, &id).unwrap();
        let ev = eigvals(3, &a);
        for (x, y) in ge.iter().zip(ev.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gen_eigvals_scale_with_pencil() {
        // (G, 2I) halves the spectrum
        let a = herm3();
        let two_id: Vec<Complex64> = (0..9)
            .map(|i| Complex64::new(if i % 4 == 0 { 2.0 } else { 0.0 }, 0.0))
            .collect();
        let ge = gen_eigvals(3, &a, &two_id).unwrap();
        let ev = eigvals(3, &a);
        for (x, y) in ge.iter().zip(ev.iter()) {
            assert!((x - 0.5 * y).abs() < 1e-12);
        }
    }
}
