//! Eigenvalue-function machinery for the (n−1)-type Monge-Ampère operator,
//! kept deliberately free of grids: the averaging map P, the λ ↔ μ
//! conversion, the functions f̃(μ) = log Πμᵢ and f = f̃∘P with their
//! gradients, cone membership, and the exact identities and inequalities
//! they satisfy.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("need n ≥ 2 eigenvalues, got {0}")]
    TooFew(usize),
    #[error("at most n = 3 supported, got {0}")]
    TooMany(usize),
    #[error("λ outside Γ: μ_{index} = {value:e} ≤ 0")]
    OutsideCone { index: usize, value: f64 },
    #[error("input must be sorted descending (λ₁ ≥ … ≥ λₙ)")]
    Unsorted,
}

/// Ordered eigenvalue vector λ₁ ≥ … ≥ λₙ of the endomorphism
/// (g_{iℓ̄} α^{ℓ̄j}); membership in Γ = P⁻¹(Γₙ) means every μₖ > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenVector {
    lam: Vec<f64>,
}

impl EigenVector {
    /// Accepts a descending vector; rejects unsorted input.
    pub fn new(lam: Vec<f64>) -> Result<Self, EigenError> {
        check_len(lam.len())?;
        if lam.windows(2).any(|w| w[0] < w[1]) {
            return Err(EigenError::Unsorted);
        }
        Ok(Self { lam })
    }

    /// Sorts descending.
    pub fn from_unsorted(mut lam: Vec<f64>) -> Result<Self, EigenError> {
        check_len(lam.len())?;
        lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { lam })
    }

    pub fn values(&self) -> &[f64] {
        &self.lam
    }

    pub fn in_cone(&self) -> bool {
        p_map(&self.lam).map_or(false, |mu| mu.iter().all(|&m| m > 0.0))
    }
}

fn check_len(n: usize) -> Result<(), EigenError> {
    if n < 2 {
        Err(EigenError::TooFew(n))
    } else if n > 3 {
        Err(EigenError::TooMany(n))
    } else {
        Ok(())
    }
}

/// μₖ = (1/(n−1)) Σ_{i≠k} λᵢ. With λ descending, μ comes out ascending.
pub fn p_map(lam: &[f64]) -> Result<Vec<f64>, EigenError> {
    check_len(lam.len())?;
    let n = lam.len();
    let sum: f64 = lam.iter().sum();
    Ok(lam
        .iter()
        .map(|&l| (sum - l) / (n as f64 - 1.0))
        .collect())
}

/// Inverse of [`p_map`]: λⱼ = Σₖ μₖ − (n−1)μⱼ.
pub fn p_map_inverse(mu: &[f64]) -> Result<Vec<f64>, EigenError> {
    check_len(mu.len())?;
    let n = mu.len();
    let sum: f64 = mu.iter().sum();
    Ok(mu.iter().map(|&m| sum - (n as f64 - 1.0) * m).collect())
}

/// Everything the estimates need at one eigenvalue vector: μ = P(λ),
/// f̃(μ) = Σ log μᵢ with gradient f̃ᵢ = 1/μᵢ, and f = f̃∘P with gradient
/// fᵢ = (1/(n−1)) Σ_{k≠i} 1/μₖ.
#[derive(Debug, Clone)]
pub struct FValues {
    pub mu: Vec<f64>,
    /// f̃(μ) = f(λ) = log Π μᵢ
    pub value: f64,
    /// f̃ᵢ = 1/μᵢ
    pub grad_f_tilde: Vec<f64>,
    /// fᵢ = (1/(n−1)) Σ_{k≠i} 1/μₖ
    pub grad_f: Vec<f64>,
}

/// Evaluate f̃, f and their gradients at λ ∈ Γ; errors outside the cone.
pub fn f_values(lam: &[f64]) -> Result<FValues, EigenError> {
    let mu = p_map(lam)?;
    for (i, &m) in mu.iter().enumerate() {
        if !(m > 0.0) {
            return Err(EigenError::OutsideCone { index: i, value: m });
        }
    }
    let n = lam.len();
    let value = mu.iter().map(|m| m.ln()).sum();
    let grad_f_tilde: Vec<f64> = mu.iter().map(|m| 1.0 / m).collect();
    let inv_sum: f64 = grad_f_tilde.iter().sum();
    let grad_f: Vec<f64> = grad_f_tilde
        .iter()
        .map(|&gi| (inv_sum - gi) / (n as f64 - 1.0))
        .collect();
    Ok(FValues {
        mu,
        value,
        grad_f_tilde,
        grad_f,
    })
}

/// Verdict and slack for one inequality; `holds` allows a rounding guard
/// of 1e−12 relative to the comparison scale.
#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn worst(&self) -> Option<&InequalityCheck> {
        self.checks
            .iter()
            .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap())
    }
}

const ROUNDING_GUARD: f64 = 1e-12;

fn check(name: &'static str, slack: f64, scale: f64) -> InequalityCheck {
    InequalityCheck {
        name,
        slack,
        holds: slack >= -ROUNDING_GUARD * scale.max(1.0),
    }
}

/// The gradient inequalities for descending λ ∈ Γ:
/// 0 < f̃₁/(n−1) ≤ fₖ ≤ f̃₁ (k ≥ 2), f̃ₖ ≤ (n−1)f₁ (k > 1),
/// plus the monotone chains μ ascending, f̃ descending, f ascending.
pub fn check_inequalities(lam: &[f64]) -> Result<InequalityReport, EigenError> {
    if lam.windows(2).any(|w| w[0] < w[1]) {
        return Err(EigenError::Unsorted);
    }
    let fv = f_values(lam)?;
    let n = lam.len();
    let n1 = n as f64 - 1.0;
    let scale = fv.grad_f_tilde.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut checks = Vec::new();

    let ft1 = fv.grad_f_tilde[0];
    checks.push(check("f̃₁ > 0", ft1, scale));
    for k in 1..n {
        let fk = fv.grad_f[k];
        checks.push(check("f̃₁/(n−1) ≤ f_k", fk - ft1 / n1, scale));
        checks.push(check("f_k ≤ f̃₁", ft1 - fk, scale));
        checks.push(check("f̃_k ≤ (n−1)f₁", n1 * fv.grad_f[0] - fv.grad_f_tilde[k], scale));
    }
    for k in 0..n - 1 {
        checks.push(check("μ ascending", fv.mu[k + 1] - fv.mu[k], scale));
        checks.push(check(
            "f̃ descending",
            fv.grad_f_tilde[k] - fv.grad_f_tilde[k + 1],
            scale,
        ));
        checks.push(check("f ascending", fv.grad_f[k + 1] - fv.grad_f[k], scale));
    }
    checks.push(check("μ₁ > 0", fv.mu[0], scale));
    checks.push(check("f₁ > 0", fv.grad_f[0], scale));
    Ok(InequalityReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_map_symmetric_point() {
        assert_eq!(p_map(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn p_map_swaps_for_n2() {
        // each μ is the other λ
        assert_eq!(p_map(&[3.0, 1.0]).unwrap(), vec![1.0, 3.0]);
    }

    #[test]
    fn p_map_round_trip() {
        let lam = vec![4.0, 1.5, -0.5];
        let mu = p_map(&lam).unwrap();
        let back = p_map_inverse(&mu).unwrap();
        let scale = 1.0 + lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in lam.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14 * scale);
        }
    }

    #[test]
    fn descending_lambda_gives_ascending_mu() {
        let mu = p_map(&[5.0, 2.0, 1.0]).unwrap();
        assert!(mu.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn f_values_symmetric_point() {
        let fv = f_values(&[1.0, 1.0, 1.0]).unwrap();
        assert!(fv.value.abs() < 1e-15);
        for i in 0..3 {
            assert!((fv.grad_f_tilde[i] - 1.0).abs() < 1e-15);
            assert!((fv.grad_f[i] - 1.0).abs() < 1e-15);
        }
        let sum: f64 = fv.grad_f.iter().zip([1.0, 1.0, 1.0]).map(|(f, l)| f * l).sum();
        assert!((sum - 3.0).abs() < 1e-14);
    }

    #[test]
    fn f_values_hand_example_n2() {
        // λ = (3,1): μ = (1,3), f = (1/3, 1), Σλ_k f_k = 2 = n
        let fv = f_values(&[3.0, 1.0]).unwrap();
        assert_eq!(fv.mu, vec![1.0, 3.0]);
        assert!((fv.grad_f[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((fv.grad_f[1] - 1.0).abs() < 1e-15);
        let s: f64 = fv.grad_f.iter().zip([3.0, 1.0]).map(|(f, l)| f * l).sum();
        assert!((s - 2.0).abs() < 1e-14);
        let s2: f64 = fv.grad_f_tilde.iter().zip(&fv.mu).map(|(f, m)| f * m).sum();
        assert!((s2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cone_membership() {
        assert!(EigenVector::new(vec![3.0, 1.0]).unwrap().in_cone());
        // λ = (5, -2): μ₁ = -2 < 0 → outside Γ (n = 2, μ is the swap)
        assert!(!EigenVector::new(vec![5.0, -2.0]).unwrap().in_cone());
        // n = 3 admits one negative eigenvalue when the others compensate
        assert!(EigenVector::new(vec![5.0, 4.0, -1.0]).unwrap().in_cone());
        assert!(f_values(&[5.0, -2.0]).is_err());
    }

    #[test]
    fn inequalities_symmetric_and_spread() {
        let rep = check_inequalities(&[1.0, 1.0, 1.0]).unwrap();
        assert!(rep.all_hold());
        // equalities at the symmetric point: f_k = f̃₁
        let eq = rep
            .checks
            .iter()
            .find(|c| c.name == "f_k ≤ f̃₁")
            .unwrap();
        assert!(eq.slack.abs() < 1e-15);

        let rep = check_inequalities(&[10.0, 1.0, 1.0]).unwrap();
        assert!(rep.all_hold());
        // strict slack away from the symmetric point
        assert!(rep
            .checks
            .iter()
            .filter(|c| c.name == "f̃₁/(n−1) ≤ f_k")
            .all(|c| c.slack > 1e-6));
    }

    #[test]
    fn unsorted_input_rejected() {
        assert_eq!(
            check_inequalities(&[1.0, 2.0]).unwrap_err(),
            EigenError::Unsorted
        );
        assert!(EigenVector::new(vec![1.0, 2.0]).is_err());
        assert!(EigenVector::from_unsorted(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let lam = [4.0, 2.5, 1.0];
        let fv = f_values(&lam).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut lp = lam;
            let mut lm = lam;
            lp[i] += h;
            lm[i] -= h;
            let fd = (f_values(&lp).unwrap().value - f_values(&lm).unwrap().value) / (2.0 * h);
            assert!(
                (fd - fv.grad_f[i]).abs() < 1e-6 * fv.grad_f[i].abs().max(1.0),
                "∂f/∂λ_{i}: fd {fd} vs {}",
                fv.grad_f[i]
            );
        }
    }

    #[test]
    fn f_is_concave_on_segments() {
        let x = [6.0, 3.0, 1.5];
        let y = [4.0, 3.5, 2.0];
        for t in [0.25, 0.5, 0.75] {
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            let fm = f_values(&mid).unwrap().value;
            let bound =
                t * f_values(&x).unwrap().value + (1.0 - t) * f_values(&y).unwrap().value;
            assert!(fm >= bound - 1e-12);
        }
    }
}
