//! Weights, compositions, margin matrices and the counting oracle.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::field::Prime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComboError {
    #[error("weight {weight:?} has total {total}, functor has degree {degree}")]
    DegreeMismatch { weight: Vec<u32>, total: u32, degree: u32 },
}

/// A composition: one natural number per basis vector of k^m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<u32>);

impl Weight {
    pub fn zero(m: usize) -> Self {
        Weight(vec![0; m])
    }

    pub fn unit(m: usize, j: usize) -> Self {
        let mut w = vec![0; m];
        w[j] = 1;
        Weight(w)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &Weight) -> Weight {
        assert_eq!(self.len(), o.len());
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u32) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }

    /// Divide every part by k, if all are divisible.
    pub fn divide(&self, k: u32) -> Option<Weight> {
        if self.0.iter().all(|a| a % k == 0) {
            Some(Weight(self.0.iter().map(|a| a / k).collect()))
        } else {
            None
        }
    }

    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// The dominant weight in the Weyl orbit.
    pub fn sorted_desc(&self) -> Weight {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Weight(v)
    }

    /// Shift by k·(ε_a − ε_{a+1}); None if a part would go negative.
    pub fn shift_root(&self, a: usize, k: i64) -> Option<Weight> {
        let mut v = self.0.clone();
        let x = v[a] as i64 + k;
        let y = v[a + 1] as i64 - k;
        if x < 0 || y < 0 {
            return None;
        }
        v[a] = x as u32;
        v[a + 1] = y as u32;
        Some(Weight(v))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// One weight per functor variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiWeight(pub Vec<Weight>);

impl MultiWeight {
    pub fn single(w: Weight) -> Self {
        MultiWeight(vec![w])
    }

    pub fn zero(factors: &[usize]) -> Self {
        MultiWeight(factors.iter().map(|&m| Weight::zero(m)).collect())
    }

    pub fn factors(&self) -> &[Weight] {
        &self.0
    }

    pub fn add(&self, o: &MultiWeight) -> MultiWeight {
        MultiWeight(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn scale(&self, k: u32) -> MultiWeight {
        MultiWeight(self.0.iter().map(|a| a.scale(k)).collect())
    }

    pub fn divide(&self, k: u32) -> Option<MultiWeight> {
        self.0.iter().map(|w| w.divide(k)).collect::<Option<Vec<_>>>().map(MultiWeight)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|w| w.is_dominant())
    }

    pub fn sorted_desc(&self) -> MultiWeight {
        MultiWeight(self.0.iter().map(|w| w.sorted_desc()).collect())
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.0.iter().map(|w| w.total()).collect()
    }

    pub fn concat(&self, o: &MultiWeight) -> MultiWeight {
        MultiWeight(self.0.iter().chain(&o.0).cloned().collect())
    }

    pub fn shift_root(&self, factor: usize, a: usize, k: i64) -> Option<MultiWeight> {
        let mut v = self.0.clone();
        v[factor] = v[factor].shift_root(a, k)?;
        Some(MultiWeight(v))
    }
}

impl fmt::Display for MultiWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let s: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "[{}]", s.join(";"))
    }
}

/// All length-m compositions of d in lexicographic order.
pub fn compositions(d: u32, m: usize) -> Vec<Weight> {
    assert!(m >= 1);
    let mut out = Vec::new();
    let mut cur = vec![0u32; m];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Weight>) {
        let m = cur.len();
        if i == m - 1 {
            cur[i] = left;
            out.push(Weight(cur.clone()));
            return;
        }
        for x in 0..=left {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Dominant weights of total d and length m (zero-padded partitions), highest first.
pub fn dominant_weights(d: u32, m: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    fn rec(left: u32, maxpart: u32, cur: &mut Vec<u32>, m: usize, out: &mut Vec<Weight>) {
        if cur.len() == m {
            if left == 0 {
                out.push(Weight(cur.clone()));
            }
            return;
        }
        let hi = left.min(maxpart);
        for x in (0..=hi).rev() {
            if (m - cur.len()) as u32 * x < left {
                break;
            }
            cur.push(x);
            rec(left - x, x, cur, m, out);
            cur.pop();
        }
    }
    if m == 0 {
        return out;
    }
    rec(d, d, &mut Vec::new(), m, &mut out);
    out
}

/// Dominant multi-weights for the given degrees and evaluation dimensions.
pub fn dominant_multiweights(degrees: &[u32], dims: &[usize]) -> Vec<MultiWeight> {
    let lists: Vec<Vec<Weight>> = degrees.iter().zip(dims).map(|(&d, &m)| dominant_weights(d, m)).collect();
    cartesian(&lists).into_iter().map(MultiWeight).collect()
}

pub fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

pub fn multinomial(parts: &[u32]) -> u128 {
    let mut total = 0u64;
    let mut r: u128 = 1;
    for &x in parts {
        total += x as u64;
        r *= binomial(total, x as u64);
    }
    r
}

/// Binomial coefficient mod p by Lucas' theorem.
pub fn binomial_mod(n: u64, k: u64, p: Prime) -> u32 {
    if k > n {
        return 0;
    }
    let q = p.get() as u64;
    let (mut n, mut k) = (n, k);
    let mut r = 1u32;
    while n > 0 || k > 0 {
        let (a, b) = (n % q, k % q);
        if b > a {
            return 0;
        }
        r = p.mul(r, (binomial(a, b) % q as u128) as u32);
        n /= q;
        k /= q;
    }
    r
}

/// Sorted multisets of size d drawn from 0..n, in lexicographic order.
pub fn multisets(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x as u32);
            rec(x, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut Vec::new(), &mut out);
    out
}

/// Strictly increasing d-subsets of 0..n, in lexicographic order.
pub fn subsets(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x as u32);
            rec(x + 1, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut Vec::new(), &mut out);
    out
}

/// Nonnegative integer matrices (row-major) with the given row and column sums, lexicographic order.
pub fn margin_matrices(rows: &[u32], cols: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if rows.iter().sum::<u32>() != cols.iter().sum::<u32>() {
        return out;
    }
    let (r, c) = (rows.len(), cols.len());
    let mut cur = vec![0u32; r * c];
    let mut colleft = cols.to_vec();
    fn rec(i: usize, j: usize, rowleft: u32, rows: &[u32], colleft: &mut [u32], cur: &mut [u32], c: usize, out: &mut Vec<Vec<u32>>) {
        let r = rows.len();
        if i == r {
            out.push(cur.to_vec());
            return;
        }
        if j == c - 1 {
            if rowleft > colleft[j] {
                return;
            }
            cur[i * c + j] = rowleft;
            colleft[j] -= rowleft;
            // remaining rows must be able to fill the columns
            let next = if i + 1 < r { rows[i + 1] } else { 0 };
            if i + 1 < r || colleft.iter().all(|&x| x == 0) {
                rec(i + 1, 0, next, rows, colleft, cur, c, out);
            }
            colleft[j] += rowleft;
            cur[i * c + j] = 0;
            return;
        }
        let later: u32 = colleft[j + 1..].iter().sum();
        let lo = rowleft.saturating_sub(later);
        let hi = rowleft.min(colleft[j]);
        for x in lo..=hi {
            cur[i * c + j] = x;
            colleft[j] -= x;
            rec(i, j + 1, rowleft - x, rows, colleft, cur, c, out);
            colleft[j] += x;
        }
        cur[i * c + j] = 0;
    }
    if r == 0 {
        out.push(Vec::new());
        return out;
    }
    if c == 0 {
        if rows.iter().all(|&x| x == 0) {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, 0, rows[0], rows, &mut colleft, &mut cur, c, &mut out);
    out
}

/// Functor kinds known to the counting oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Gamma(Vec<u32>),
    Sym(Vec<u32>),
    Wedge(Vec<u32>),
    Tensor(u32),
}

impl OracleKind {
    pub fn degree(&self) -> u32 {
        match self {
            OracleKind::Gamma(mu) | OracleKind::Sym(mu) | OracleKind::Wedge(mu) => mu.iter().sum(),
            OracleKind::Tensor(d) => *d,
        }
    }
}

/// Count matrices with the given margins, entries bounded by `cap`.
fn count_matrices(rows: &[u32], cols: &[u32], cap: u32) -> u64 {
    // row by row: distribute each row over the columns
    fn rec(i: usize, rows: &[u32], colleft: &mut Vec<u32>, cap: u32) -> u64 {
        if i == rows.len() {
            return colleft.iter().all(|&x| x == 0) as u64;
        }
        let mut total = 0;
        fill(0, rows[i], i, rows, colleft, cap, &mut total);
        total
    }
    fn fill(j: usize, left: u32, i: usize, rows: &[u32], colleft: &mut Vec<u32>, cap: u32, total: &mut u64) {
        if j == colleft.len() {
            if left == 0 {
                *total += rec(i + 1, rows, colleft, cap);
            }
            return;
        }
        let hi = left.min(colleft[j]).min(cap);
        for x in 0..=hi {
            colleft[j] -= x;
            fill(j + 1, left - x, i, rows, colleft, cap, total);
            colleft[j] += x;
        }
    }
    if rows.iter().sum::<u32>() != cols.iter().sum::<u32>() {
        return 0;
    }
    rec(0, rows, &mut cols.to_vec(), cap)
}

/// Dimension of the λ-weight space of the given functor, by direct counting.
pub fn weight_space_dim_oracle(kind: &OracleKind, lambda: &Weight) -> Result<u64, ComboError> {
    let degree = kind.degree();
    if lambda.total() != degree {
        return Err(ComboError::DegreeMismatch { weight: lambda.0.clone(), total: lambda.total(), degree });
    }
    Ok(match kind {
        OracleKind::Gamma(mu) | OracleKind::Sym(mu) => count_matrices(mu, &lambda.0, u32::MAX),
        OracleKind::Wedge(mu) => count_matrices(mu, &lambda.0, 1),
        OracleKind::Tensor(_) => multinomial(&lambda.0) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_examples() {
        assert_eq!(compositions(0, 3), vec![Weight(vec![0, 0, 0])]);
        assert_eq!(compositions(2, 2), vec![Weight(vec![0, 2]), Weight(vec![1, 1]), Weight(vec![2, 0])]);
        assert_eq!(compositions(3, 3).len(), 10);
    }

    #[test]
    fn composition_counts() {
        for d in 0..=12u32 {
            for m in 1..=8usize {
                assert_eq!(compositions(d, m).len() as u128, binomial((d as usize + m - 1) as u64, (m - 1) as u64));
            }
        }
    }

    #[test]
    fn dominant_listing() {
        let w: Vec<Vec<u32>> = dominant_weights(4, 3).into_iter().map(|w| w.0).collect();
        assert_eq!(w, vec![vec![4, 0, 0], vec![3, 1, 0], vec![2, 2, 0], vec![2, 1, 1]]);
        assert_eq!(dominant_weights(6, 6).len(), 11);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(weight_space_dim_oracle(&OracleKind::Sym(vec![2]), &Weight(vec![2, 0])).unwrap(), 1);
        assert_eq!(weight_space_dim_oracle(&OracleKind::Sym(vec![1, 1]), &Weight(vec![1, 1])).unwrap(), 2);
        assert_eq!(weight_space_dim_oracle(&OracleKind::Wedge(vec![2]), &Weight(vec![1, 1])).unwrap(), 1);
        assert!(weight_space_dim_oracle(&OracleKind::Wedge(vec![2]), &Weight(vec![1, 1, 1])).is_err());
    }

    #[test]
    fn oracle_sums_to_closed_forms() {
        for m in 1..=4usize {
            for d in 0..=5u32 {
                let ws = compositions(d, m);
                let s = |k: OracleKind| ws.iter().map(|w| weight_space_dim_oracle(&k, w).unwrap()).sum::<u64>() as u128;
                let sym = binomial((m as u64) + d as u64 - 1, d as u64);
                assert_eq!(s(OracleKind::Gamma(vec![d])), sym);
                assert_eq!(s(OracleKind::Sym(vec![d])), sym);
                assert_eq!(s(OracleKind::Wedge(vec![d])), binomial(m as u64, d as u64));
                assert_eq!(s(OracleKind::Tensor(d)), (m as u128).pow(d));
            }
        }
    }

    #[test]
    fn margins_match_counts() {
        for rows in [vec![2, 1], vec![3, 0, 1], vec![1, 1, 1]] {
            for cols in compositions(rows.iter().sum(), 3) {
                let ms = margin_matrices(&rows, &cols.0);
                assert_eq!(ms.len() as u64, count_matrices(&rows, &cols.0, u32::MAX));
                let mut sorted = ms.clone();
                sorted.sort();
                assert_eq!(sorted, ms);
            }
        }
    }

    #[test]
    fn lucas() {
        let p = Prime::new(3).unwrap();
        for n in 0..30u64 {
            for k in 0..=n {
                assert_eq!(binomial_mod(n, k, p) as u128, binomial(n, k) % 3);
            }
        }
    }
}
