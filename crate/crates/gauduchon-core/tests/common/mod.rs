//! Test-only brute-force (p,q)-form arithmetic on full coefficient tensors
//! at a single grid point. Everything here is definitional — permutation
//! sums, verbatim index formulas — and deliberately independent of the
//! increasing-multi-index machinery in the library, so it can serve as an
//! oracle for it.

use num_complex::Complex64;

use gauduchon_core::forms::PQForm;

/// Full antisymmetric coefficient tensor of a (p,q)-form at one point:
/// `c[idx]` with idx running row-major over (i₁..i_p, j₁..j_q), each index
/// 0..n. The form is (1/(p!q!)) Σ c_{IJ̄} dz^I ∧ dz̄^J over all tuples.
#[derive(Debug, Clone)]
pub struct RawForm {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub c: Vec<Complex64>,
}

fn tuple_iter(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut t| {
        let mut out = vec![0usize; len];
        for slot in out.iter_mut().rev() {
            *slot = t % n;
            t /= n;
        }
        out
    })
}

fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * n + d)
}

/// Sign of the permutation sorting `t`; `None` when an index repeats.
fn sort_sign(t: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut sorted: Vec<usize> = t.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mut inversions = 0;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] > t[j] {
                inversions += 1;
            }
        }
    }
    Some((sorted, if inversions % 2 == 0 { 1.0 } else { -1.0 }))
}

fn permutations(len: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(vec![], 1.0)];
    for k in 0..len {
        let mut next = Vec::new();
        for (perm, sign) in &out {
            for pos in 0..=perm.len() {
                let mut p = perm.clone();
                p.insert(pos, k);
                // inserting k at `pos` jumps over (len(perm) − pos) earlier
                // entries, all smaller than k
                let jumps = perm.len() - pos;
                let s = if jumps % 2 == 0 { *sign } else { -sign };
                next.push((p, s));
            }
        }
        out = next;
    }
    out
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

impl RawForm {
    pub fn zeros(n: usize, p: usize, q: usize) -> Self {
        Self {
            n,
            p,
            q,
            c: vec![Complex64::default(); n.pow((p + q) as u32)],
        }
    }

    pub fn get(&self, i: &[usize], j: &[usize]) -> Complex64 {
        let mut t = i.to_vec();
        t.extend_from_slice(j);
        self.c[tuple_index(self.n, &t)]
    }

    pub fn set(&mut self, i: &[usize], j: &[usize], v: Complex64) {
        let mut t = i.to_vec();
        t.extend_from_slice(j);
        let idx = tuple_index(self.n, &t);
        self.c[idx] = v;
    }

    /// Expand the library's increasing-index components at one grid point
    /// into the full antisymmetric tensor.
    pub fn from_pq(pq: &PQForm, pt: usize) -> Self {
        let n = pq.grid().dim();
        let (p, q) = pq.bidegree();
        let mut raw = Self::zeros(n, p, q);
        for it in tuple_iter(n, p) {
            let si = sort_sign(&it);
            for jt in tuple_iter(n, q) {
                let sj = sort_sign(&jt);
                let val = match (&si, &sj) {
                    (Some((is, isign)), Some((js, jsign))) => {
                        let iu: Vec<u8> = is.iter().map(|&v| v as u8).collect();
                        let ju: Vec<u8> = js.iter().map(|&v| v as u8).collect();
                        let comp = pq.comp_pos(&iu, &ju);
                        isign * jsign * pq.coeff_at(comp, pt)
                    }
                    _ => Complex64::default(),
                };
                raw.set(&it, &jt, val);
            }
        }
        raw
    }

    pub fn max_diff(&self, other: &RawForm) -> f64 {
        self.c
            .iter()
            .zip(&other.c)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn scale(&self, s: Complex64) -> RawForm {
        RawForm {
            n: self.n,
            p: self.p,
            q: self.q,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// conj: a (q,p)-form with tensor (conj φ)_{J,I} = (−1)^{pq} conj(φ_{I,J}).
    pub fn conj(&self) -> RawForm {
        let mut out = RawForm::zeros(self.n, self.q, self.p);
        let sign = if (self.p * self.q) % 2 == 0 { 1.0 } else { -1.0 };
        for it in tuple_iter(self.n, self.q) {
            for jt in tuple_iter(self.n, self.p) {
                out.set(&it, &jt, sign * self.get(&jt, &it).conj());
            }
        }
        out
    }

    pub fn re_part(&self) -> RawForm {
        assert_eq!(self.p, self.q);
        let conj = self.conj();
        let mut out = self.clone();
        for (o, c) in out.c.iter_mut().zip(&conj.c) {
            *o = 0.5 * (*o + c);
        }
        out
    }
}

/// Definitional wedge: permutation shuffle sums over both index groups,
/// with the (−1)^{q₁p₂} cross sign.
pub fn raw_wedge(a: &RawForm, b: &RawForm) -> RawForm {
    assert_eq!(a.n, b.n);
    let n = a.n;
    let (p, q) = (a.p + b.p, a.q + b.q);
    assert!(p <= n && q <= n);
    let mut out = RawForm::zeros(n, p, q);
    let perms_p = permutations(p);
    let perms_q = permutations(q);
    let norm = 1.0
        / (factorial(a.p) * factorial(b.p) * factorial(a.q) * factorial(b.q));
    let cross = if (a.q * b.p) % 2 == 0 { 1.0 } else { -1.0 };
    for it in tuple_iter(n, p) {
        for jt in tuple_iter(n, q) {
            let mut acc = Complex64::default();
            for (sigma, ssign) in &perms_p {
                let i1: Vec<usize> = sigma[..a.p].iter().map(|&k| it[k]).collect();
                let i2: Vec<usize> = sigma[a.p..].iter().map(|&k| it[k]).collect();
                for (tau, tsign) in &perms_q {
                    let j1: Vec<usize> = tau[..a.q].iter().map(|&k| jt[k]).collect();
                    let j2: Vec<usize> = tau[a.q..].iter().map(|&k| jt[k]).collect();
                    acc += ssign * tsign * a.get(&i1, &j1) * b.get(&i2, &j2);
                }
            }
            let idx = tuple_index(n, &[it.clone(), jt.clone()].concat());
            out.c[idx] = norm * cross * acc;
        }
    }
    out
}

/// Verbatim Hodge star: all-index loops over the coefficient formula with
/// generalized Kronecker deltas and the (√−1)ⁿ(−1)^{np+n(n−1)/2} det g
/// prefactor. `g` is the metric matrix g_{ij̄} at the point (row-major).
pub fn raw_star(phi: &RawForm, g: &[Complex64]) -> RawForm {
    let n = phi.n;
    let (p, q) = (phi.p, phi.q);
    let mut out = RawForm::zeros(n, n - q, n - p);

    // inverse metric g^{x̄y}: row barred. With G[i][j] = g_{ij̄},
    // Σ_ℓ g^{ℓ̄j} g_{kℓ̄} = δ — i.e. the plain matrix inverse of G.
    let det_g = mat_det(n, g);
    let ginv = mat_inv(n, g);

    let mut pref = Complex64::i().powu(n as u32) * det_g;
    if (n * p + n * (n - 1) / 2) % 2 == 1 {
        pref = -pref;
    }
    let norm = pref / (factorial(p) * factorial(q));

    for a_t in tuple_iter(n, n - q) {
        for b_t in tuple_iter(n, n - p) {
            let mut acc = Complex64::default();
            for i_t in tuple_iter(n, p) {
                for j_t in tuple_iter(n, q) {
                    let base = phi.get(&i_t, &j_t);
                    if base.norm() == 0.0 {
                        continue;
                    }
                    for l_t in tuple_iter(n, p) {
                        // δ^{1..n}_{ℓ₁..ℓ_p b₁..b_{n−p}}
                        let mut lb = l_t.clone();
                        lb.extend_from_slice(&b_t);
                        let Some((sorted, dsign)) = sort_sign(&lb) else {
                            continue;
                        };
                        if sorted != (0..n).collect::<Vec<_>>() {
                            continue;
                        }
                        let mut gl = Complex64::new(1.0, 0.0);
                        for (l, i) in l_t.iter().zip(&i_t) {
                            gl *= ginv[l * n + i];
                        }
                        for k_t in tuple_iter(n, q) {
                            let mut ka = k_t.clone();
                            ka.extend_from_slice(&a_t);
                            let Some((sorted2, dsign2)) = sort_sign(&ka) else {
                                continue;
                            };
                            if sorted2 != (0..n).collect::<Vec<_>>() {
                                continue;
                            }
                            let mut gk = Complex64::new(1.0, 0.0);
                            for (j, k) in j_t.iter().zip(&k_t) {
                                gk *= ginv[j * n + k];
                            }
                            acc += dsign * dsign2 * base * gl * gk;
                        }
                    }
                }
            }
            let idx = tuple_index(n, &[a_t.clone(), b_t.clone()].concat());
            out.c[idx] = norm * acc;
        }
    }
    out
}

fn mat_det(n: usize, a: &[Complex64]) -> Complex64 {
    match n {
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => unreachable!(),
    }
}

fn mat_inv(n: usize, a: &[Complex64]) -> Vec<Complex64> {
    let d = mat_det(n, a);
    let mut adj = vec![Complex64::default(); n * n];
    match n {
        2 => {
            adj[0] = a[3];
            adj[1] = -a[1];
            adj[2] = -a[2];
            adj[3] = a[0];
        }
        3 => {
            adj[0] = a[4] * a[8] - a[5] * a[7];
            adj[1] = a[2] * a[7] - a[1] * a[8];
            adj[2] = a[1] * a[5] - a[2] * a[4];
            adj[3] = a[5] * a[6] - a[3] * a[8];
            adj[4] = a[0] * a[8] - a[2] * a[6];
            adj[5] = a[2] * a[3] - a[0] * a[5];
            adj[6] = a[3] * a[7] - a[4] * a[6];
            adj[7] = a[1] * a[6] - a[0] * a[7];
            adj[8] = a[0] * a[4] - a[1] * a[3];
        }
        _ => unreachable!(),
    }
    adj.iter().map(|v| v / d).collect()
}
