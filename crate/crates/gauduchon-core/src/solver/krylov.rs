//! Restarted GMRES with right preconditioning for the Newton linear solves.
//!
//! Right preconditioning keeps the monitored residual equal to the true
//! residual, so the solver can honour a relative-residual contract exactly.
//! All inner products are sequential, which keeps runs bit-reproducible.

#[derive(Debug, Clone)]
pub struct KrylovOptions {
    pub restart: usize,
    pub max_iters: usize,
    /// relative residual target ‖b − A x‖ / ‖b‖
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct KrylovResult {
    pub x: Vec<f64>,
    pub rel_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, thiserror::Error)]
#[error("linear solve stalled: relative residual {rel_residual:e} after {iterations} iterations (target {tol:e})")]
pub struct KrylovFailure {
    pub rel_residual: f64,
    pub iterations: usize,
    pub tol: f64,
    pub x: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve A(M⁻¹ y) = b by GMRES(m) and return x = M⁻¹ y. `apply` is the
/// operator A, `precond` applies M⁻¹.
pub fn gmres<A, P>(
    apply: A,
    precond: P,
    b: &[f64],
    opts: &KrylovOptions,
) -> Result<KrylovResult, KrylovFailure>
where
    A: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(KrylovResult {
            x: vec![0.0; n],
            rel_residual: 0.0,
            iterations: 0,
        });
    }
    let m = opts.restart.max(1);
    let mut y = vec![0.0; n]; // solution in the preconditioned variable
    let mut total_iters = 0usize;
    let mut rel = f64::INFINITY;

    while total_iters < opts.max_iters {
        // r = b − A M⁻¹ y
        let x = precond(&y);
        let ax = apply(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= opts.tol {
            return Ok(KrylovResult {
                x,
                rel_residual: rel,
                iterations: total_iters,
            });
        }

        for v in r.iter_mut() {
            *v /= beta;
        }
        let mut basis: Vec<Vec<f64>> = vec![r];
        let mut h = vec![vec![0.0f64; m]; m + 1]; // h[i][j]
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![0.0f64; m];
        let mut g = vec![0.0f64; m + 1];
        g[0] = beta;
        let mut k_used = 0;

        for j in 0..m {
            if total_iters >= opts.max_iters {
                break;
            }
            total_iters += 1;
            let w0 = apply(&precond(&basis[j]));
            let mut w = w0;
            // modified Gram-Schmidt
            for (i, vi) in basis.iter().enumerate() {
                let hij = dot(&w, vi);
                h[i][j] = hij;
                for (we, ve) in w.iter_mut().zip(vi) {
                    *we -= hij * ve;
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = hn;
            // apply accumulated Givens rotations to the new column
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = (h[j][j] * h[j][j] + hn * hn).sqrt();
            if denom == 0.0 {
                k_used = j;
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = hn / denom;
            h[j][j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k_used = j + 1;
            rel = g[j + 1].abs() / b_norm;

            if hn > 0.0 && rel > opts.tol && j + 1 < m {
                for v in w.iter_mut() {
                    *v /= hn;
                }
                basis.push(w);
            } else {
                break;
            }
        }

        // back-substitute for the Krylov coefficients
        let mut coeff = vec![0.0f64; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for l in i + 1..k_used {
                s -= h[i][l] * coeff[l];
            }
            coeff[i] = s / h[i][i];
        }
        for (i, &ci) in coeff.iter().enumerate() {
            for (ye, ve) in y.iter_mut().zip(&basis[i]) {
                *ye += ci * ve;
            }
        }

        if rel <= opts.tol {
            // verify against the true residual before declaring victory
            let x = precond(&y);
            let ax = apply(&x);
            let true_rel = b
                .iter()
                .zip(&ax)
                .map(|(bi, ai)| (bi - ai) * (bi - ai))
                .sum::<f64>()
                .sqrt()
                / b_norm;
            if true_rel <= opts.tol {
                return Ok(KrylovResult {
                    x,
                    rel_residual: true_rel,
                    iterations: total_iters,
                });
            }
            rel = true_rel;
        }
    }

    Err(KrylovFailure {
        rel_residual: rel,
        iterations: total_iters,
        tol: opts.tol,
        x: precond(&y),
    })
}
