//! Strictly increasing multi-index bookkeeping for (p,q)-form components.
//!
//! A (p,q)-form is stored on the basis dz^I ∧ dz̄^J with I, J strictly
//! increasing; antisymmetry is then structural rather than numerical.

/// All strictly increasing k-tuples of {0, .., n−1}, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<u8> = (0..k as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < (n - k + i) as u8 {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of an increasing tuple in the lexicographic `subsets` list.
pub fn subset_pos(n: usize, set: &[u8]) -> usize {
    subsets(n, set.len())
        .iter()
        .position(|s| s == set)
        .expect("increasing tuple in range")
}

/// Complement of an increasing tuple in {0, .., n−1}, increasing.
pub fn complement(n: usize, set: &[u8]) -> Vec<u8> {
    (0..n as u8).filter(|i| !set.contains(i)).collect()
}

/// Sign of the permutation (a ++ b) of {0, .., n−1}, where a and b are
/// disjoint increasing tuples covering everything. This is the generalised
/// Kronecker delta δ^{0..n−1}_{a b}.
pub fn concat_sign(a: &[u8], b: &[u8]) -> f64 {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x > y {
                inversions += 1;
            }
        }
    }
    // a and b are internally increasing, so all inversions are across.
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Merge two disjoint increasing tuples into one increasing tuple together
/// with the interleave sign; `None` if they intersect.
#[cfg(test)]
pub fn merge_sign(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, f64)> {
    for x in a {
        if b.contains(x) {
            return None;
        }
    }
    let mut merged: Vec<u8> = a.iter().chain(b.iter()).copied().collect();
    let sign = concat_sign_general(&merged);
    merged.sort_unstable();
    Some((merged, sign))
}

/// Sign of the permutation sorting an arbitrary duplicate-free tuple.
fn concat_sign_general(t: &[u8]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] > t[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All ways to split the increasing tuple `k` into an increasing pair
/// (first of size p1, rest), with the shuffle sign of (first ++ rest) → k.
pub fn splits(k: &[u8], p1: usize) -> Vec<(Vec<u8>, Vec<u8>, f64)> {
    let len = k.len();
    assert!(p1 <= len);
    let mut out = Vec::new();
    for mask in 0u32..(1 << len) {
        if mask.count_ones() as usize != p1 {
            continue;
        }
        let mut first = Vec::with_capacity(p1);
        let mut rest = Vec::with_capacity(len - p1);
        for (i, &v) in k.iter().enumerate() {
            if mask & (1 << i) != 0 {
                first.push(v);
            } else {
                rest.push(v);
            }
        }
        let concat: Vec<u8> = first.iter().chain(rest.iter()).copied().collect();
        let sign = concat_sign_general(&concat);
        out.push((first, rest, sign));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_counts_are_binomial() {
        assert_eq!(subsets(3, 0), vec![Vec::<u8>::new()]);
        assert_eq!(subsets(3, 1).len(), 3);
        assert_eq!(subsets(3, 2).len(), 3);
        assert_eq!(subsets(3, 3).len(), 1);
        assert_eq!(subsets(2, 1), vec![vec![0], vec![1]]);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn complement_and_concat_sign() {
        assert_eq!(complement(3, &[1]), vec![0, 2]);
        // (1,2,0) has two inversions against (0): pairs (1,0),(2,0)
        assert_eq!(concat_sign(&[1, 2], &[0]), 1.0);
        assert_eq!(concat_sign(&[1], &[0, 2]), -1.0);
        assert_eq!(concat_sign(&[0, 1, 2], &[]), 1.0);
    }

    #[test]
    fn merge_sign_detects_overlap_and_parity() {
        assert!(merge_sign(&[0], &[0]).is_none());
        let (m, s) = merge_sign(&[1], &[0]).unwrap();
        assert_eq!(m, vec![0, 1]);
        assert_eq!(s, -1.0);
        let (m, s) = merge_sign(&[0, 2], &[1]).unwrap();
        assert_eq!(m, vec![0, 1, 2]);
        assert_eq!(s, -1.0); // (0,2,1): one inversion
    }

    #[test]
    fn splits_cover_all_shuffles() {
        let sp = splits(&[0, 1, 2], 1);
        assert_eq!(sp.len(), 3);
        for (first, rest, sign) in sp {
            let (merged, s2) = merge_sign(&first, &rest).unwrap();
            assert_eq!(merged, vec![0, 1, 2]);
            assert_eq!(sign, s2);
        }
    }
}
