//! Exact arithmetic over the prime field F_p and matrices over it.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A validated prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl TryFrom<u32> for Prime {
    type Error = FieldError;
    fn try_from(p: u32) -> Result<Self, FieldError> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Prime {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p < 2 || p > 65521 || (2..p).take_while(|q| q * q <= p).any(|q| p % q == 0) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "inverting zero mod {}", self.0);
        self.pow(a, (self.0 - 2) as u64)
    }

    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.0 as i64) as u32
    }

    pub fn reduce_u64(self, a: u64) -> u32 {
        (a % self.0 as u64) as u32
    }
}

/// A residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u32,
    p: Prime,
}

impl FpScalar {
    pub fn new(value: i64, p: u32) -> Result<Self, FieldError> {
        let p = Prime::new(p)?;
        Ok(FpScalar { value: p.reduce(value), p })
    }

    pub fn from_prime(value: i64, p: Prime) -> Self {
        FpScalar { value: p.reduce(value), p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn prime(self) -> Prime {
        self.p
    }

    fn check(self, o: FpScalar) -> Result<(), FieldError> {
        if self.p != o.p {
            return Err(FieldError::ModulusMismatch(self.p.0, o.p.0));
        }
        Ok(())
    }

    pub fn add(self, o: FpScalar) -> Result<FpScalar, FieldError> {
        self.check(o)?;
        Ok(FpScalar { value: self.p.add(self.value, o.value), p: self.p })
    }

    pub fn sub(self, o: FpScalar) -> Result<FpScalar, FieldError> {
        self.check(o)?;
        Ok(FpScalar { value: self.p.sub(self.value, o.value), p: self.p })
    }

    pub fn mul(self, o: FpScalar) -> Result<FpScalar, FieldError> {
        self.check(o)?;
        Ok(FpScalar { value: self.p.mul(self.value, o.value), p: self.p })
    }

    pub fn inv(self) -> Option<FpScalar> {
        if self.value == 0 {
            None
        } else {
            Some(FpScalar { value: self.p.inv(self.value), p: self.p })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    Dense(Vec<u32>),
    /// row-wise (column, value) lists, sorted by column, no zeros
    Sparse(Vec<Vec<(u32, u32)>>),
}

/// Matrix over F_p, stored densely or sparsely.
#[derive(Clone, Debug)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: Prime,
    store: Storage,
}

/// Density below which `compact` picks sparse storage.
pub const SPARSE_THRESHOLD: f64 = 0.05;

impl PartialEq for FpMatrix {
    fn eq(&self, o: &FpMatrix) -> bool {
        self.p == o.p && self.rows == o.rows && self.cols == o.cols && self.to_row_lists() == o.to_row_lists()
    }
}
impl Eq for FpMatrix {}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, p, store: Storage::Sparse(vec![Vec::new(); rows]) }
    }

    pub fn dense_zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, p, store: Storage::Dense(vec![0; rows * cols]) }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i as u32, 1)]).collect();
        FpMatrix { rows: n, cols: n, p, store: Storage::Sparse(rows) }
    }

    /// Build from integer rows; entries are reduced mod p.
    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FieldError::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| p.reduce(x))).collect();
        Ok(FpMatrix { rows: rows.len(), cols, p, store: Storage::Dense(data) })
    }

    pub fn from_dense(p: Prime, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| x < p.get()));
        FpMatrix { rows, cols, p, store: Storage::Dense(data) }
    }

    /// Triplets (row, col, value); repeated positions are summed.
    pub fn from_triplets(p: Prime, rows: usize, cols: usize, trips: &[(usize, usize, u32)]) -> Self {
        let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); rows];
        for &(r, c, v) in trips {
            assert!(r < rows && c < cols, "triplet out of range");
            lists[r].push((c as u32, v % p.get()));
        }
        for l in lists.iter_mut() {
            normalize_list(p, l);
        }
        FpMatrix { rows, cols, p, store: Storage::Sparse(lists) }
    }

    pub fn from_row_lists(p: Prime, cols: usize, mut lists: Vec<Vec<(u32, u32)>>) -> Self {
        for l in lists.iter_mut() {
            normalize_list(p, l);
        }
        FpMatrix { rows: lists.len(), cols, p, store: Storage::Sparse(lists) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.store, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        match &self.store {
            Storage::Dense(d) => d[r * self.cols + c],
            Storage::Sparse(l) => match l[r].binary_search_by_key(&(c as u32), |e| e.0) {
                Ok(i) => l[r][i].1,
                Err(_) => 0,
            },
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.store {
            Storage::Dense(d) => d.iter().filter(|&&x| x != 0).count(),
            Storage::Sparse(l) => l.iter().map(|r| r.len()).sum(),
        }
    }

    pub fn density(&self) -> f64 {
        if self.rows * self.cols == 0 {
            0.0
        } else {
            self.nnz() as f64 / (self.rows * self.cols) as f64
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn to_dense(&self) -> FpMatrix {
        FpMatrix { rows: self.rows, cols: self.cols, p: self.p, store: Storage::Dense(self.dense_data()) }
    }

    pub fn to_sparse(&self) -> FpMatrix {
        FpMatrix { rows: self.rows, cols: self.cols, p: self.p, store: Storage::Sparse(self.to_row_lists()) }
    }

    /// Sparse storage below the density threshold, dense otherwise.
    pub fn compact(self) -> FpMatrix {
        let sparse = self.density() < SPARSE_THRESHOLD;
        match (&self.store, sparse) {
            (Storage::Dense(_), true) => self.to_sparse(),
            (Storage::Sparse(_), false) => self.to_dense(),
            _ => self,
        }
    }

    pub fn dense_data(&self) -> Vec<u32> {
        match &self.store {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(l) => {
                let mut d = vec![0; self.rows * self.cols];
                for (r, row) in l.iter().enumerate() {
                    for &(c, v) in row {
                        d[r * self.cols + c as usize] = v;
                    }
                }
                d
            }
        }
    }

    pub fn to_row_lists(&self) -> Vec<Vec<(u32, u32)>> {
        match &self.store {
            Storage::Sparse(l) => l.clone(),
            Storage::Dense(d) => (0..self.rows)
                .map(|r| {
                    d[r * self.cols..(r + 1) * self.cols]
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0)
                        .map(|(c, &v)| (c as u32, v))
                        .collect()
                })
                .collect(),
        }
    }

    /// Nonzero entries as (row, col, value), row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (r, row) in self.to_row_lists().into_iter().enumerate() {
            for (c, v) in row {
                out.push((r, c as usize, v));
            }
        }
        out
    }

    pub fn row(&self, r: usize) -> Vec<u32> {
        let mut v = vec![0; self.cols];
        match &self.store {
            Storage::Dense(d) => v.copy_from_slice(&d[r * self.cols..(r + 1) * self.cols]),
            Storage::Sparse(l) => {
                for &(c, x) in &l[r] {
                    v[c as usize] = x;
                }
            }
        }
        v
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    fn same_modulus(&self, o: &FpMatrix) -> Result<(), FieldError> {
        if self.p != o.p {
            return Err(FieldError::ModulusMismatch(self.p.get(), o.p.get()));
        }
        Ok(())
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.to_row_lists().into_iter().enumerate() {
            for (c, v) in row {
                lists[c as usize].push((r as u32, v));
            }
        }
        let t = FpMatrix { rows: self.cols, cols: self.rows, p: self.p, store: Storage::Sparse(lists) };
        if self.is_sparse() {
            t
        } else {
            t.to_dense()
        }
    }

    pub fn mul(&self, o: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.same_modulus(o)?;
        if self.cols != o.rows {
            return Err(FieldError::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let p = self.p;
        let b = o.to_row_lists();
        let a = self.to_row_lists();
        let mut acc = vec![0u64; o.cols];
        let mut seen = vec![false; o.cols];
        let mut out = Vec::with_capacity(self.rows);
        for row in &a {
            let mut touched: Vec<u32> = Vec::new();
            for &(k, x) in row {
                for &(c, y) in &b[k as usize] {
                    let c = c as usize;
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c as u32);
                    }
                    acc[c] = (acc[c] + x as u64 * y as u64) % p.get() as u64;
                }
            }
            touched.sort_unstable();
            let mut r = Vec::with_capacity(touched.len());
            for c in touched {
                let v = acc[c as usize] as u32;
                acc[c as usize] = 0;
                seen[c as usize] = false;
                if v != 0 {
                    r.push((c, v));
                }
            }
            out.push(r);
        }
        let m = FpMatrix { rows: self.rows, cols: o.cols, p, store: Storage::Sparse(out) };
        Ok(if self.is_sparse() && o.is_sparse() { m } else { m.compact() })
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, FieldError> {
        if x.len() != self.cols {
            return Err(FieldError::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let p = self.p;
        Ok(match &self.store {
            Storage::Dense(d) => (0..self.rows)
                .map(|r| {
                    let s: u64 = d[r * self.cols..(r + 1) * self.cols]
                        .iter()
                        .zip(x)
                        .map(|(&a, &b)| a as u64 * b as u64)
                        .fold(0u64, |acc, t| (acc + t) % (1 << 62));
                    p.reduce_u64(s)
                })
                .collect(),
            Storage::Sparse(l) => l
                .iter()
                .map(|row| p.reduce_u64(row.iter().map(|&(c, v)| v as u64 * x[c as usize] as u64).sum()))
                .collect(),
        })
    }

    pub fn add(&self, o: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.lin_comb(1, o, 1)
    }

    pub fn sub(&self, o: &FpMatrix) -> Result<FpMatrix, FieldError> {
        let m1 = self.p.neg(1);
        self.lin_comb(1, o, m1)
    }

    /// a·self + b·o
    pub fn lin_comb(&self, a: u32, o: &FpMatrix, b: u32) -> Result<FpMatrix, FieldError> {
        self.same_modulus(o)?;
        if self.rows != o.rows || self.cols != o.cols {
            return Err(FieldError::Dimension("shape mismatch in sum".into()));
        }
        let p = self.p;
        let x = self.to_row_lists();
        let y = o.to_row_lists();
        let lists = x
            .into_iter()
            .zip(y)
            .map(|(r, s)| {
                let mut l: Vec<(u32, u32)> =
                    r.into_iter().map(|(c, v)| (c, p.mul(a, v))).chain(s.into_iter().map(|(c, v)| (c, p.mul(b, v)))).collect();
                normalize_list(p, &mut l);
                l
            })
            .collect();
        Ok(FpMatrix { rows: self.rows, cols: self.cols, p, store: Storage::Sparse(lists) })
    }

    pub fn scale(&self, a: u32) -> FpMatrix {
        let p = self.p;
        let lists = self
            .to_row_lists()
            .into_iter()
            .map(|r| r.into_iter().map(|(c, v)| (c, p.mul(a, v))).filter(|e| e.1 != 0).collect())
            .collect();
        FpMatrix { rows: self.rows, cols: self.cols, p, store: Storage::Sparse(lists) }
    }

    /// Kronecker product: (A⊗B)[i·rB+k, j·cB+l] = A[i,j]·B[k,l].
    pub fn kron(&self, o: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.same_modulus(o)?;
        let p = self.p;
        let a = self.to_row_lists();
        let b = o.to_row_lists();
        let mut lists = Vec::with_capacity(self.rows * o.rows);
        for ra in &a {
            for rb in &b {
                let mut l = Vec::with_capacity(ra.len() * rb.len());
                for &(j, x) in ra {
                    for &(k, y) in rb {
                        l.push((j * o.cols as u32 + k, p.mul(x, y)));
                    }
                }
                lists.push(l);
            }
        }
        Ok(FpMatrix { rows: self.rows * o.rows, cols: self.cols * o.cols, p, store: Storage::Sparse(lists) })
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, o: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.same_modulus(o)?;
        let mut lists = self.to_row_lists();
        for r in o.to_row_lists() {
            lists.push(r.into_iter().map(|(c, v)| (c + self.cols as u32, v)).collect());
        }
        Ok(FpMatrix { rows: self.rows + o.rows, cols: self.cols + o.cols, p: self.p, store: Storage::Sparse(lists) })
    }

    /// Reduced row-echelon form and the strictly increasing pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut d = self.dense_data();
        let pivots = rref_dense(self.p, &mut d, self.rows, self.cols);
        (FpMatrix { rows: self.rows, cols: self.cols, p: self.p, store: Storage::Dense(d) }, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut d = self.dense_data();
        rref_dense(self.p, &mut d, self.rows, self.cols).len()
    }

    /// Basis of {x : Mx = 0}, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let (r, piv) = self.rref();
        let d = match &r.store {
            Storage::Dense(d) => d,
            _ => unreachable!(),
        };
        kernel_from_rref(self.p, d, self.cols, &piv)
    }

    /// Some x with Mx = b, or None.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, FieldError> {
        if b.len() != self.rows {
            return Err(FieldError::Dimension(format!("rhs of length {} for {} rows", b.len(), self.rows)));
        }
        let w = self.cols + 1;
        let mut d = vec![0u32; self.rows * w];
        for r in 0..self.rows {
            for c in 0..self.cols {
                d[r * w + c] = self.get(r, c);
            }
            d[r * w + self.cols] = b[r] % self.p.get();
        }
        let piv = rref_dense(self.p, &mut d, self.rows, w);
        if piv.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = d[i * w + self.cols];
        }
        Ok(Some(x))
    }
}

fn normalize_list(p: Prime, l: &mut Vec<(u32, u32)>) {
    l.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(l.len());
    for &(c, v) in l.iter() {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = p.add(last.1, v),
            _ => out.push((c, v % p.get())),
        }
    }
    out.retain(|e| e.1 != 0);
    *l = out;
}

/// In-place RREF of a dense row-major matrix; returns pivot columns.
pub fn rref_dense(p: Prime, d: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| d[i * cols + c] != 0) else { continue };
        if pr != r {
            for j in 0..cols {
                d.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = p.inv(d[r * cols + c]);
        for j in c..cols {
            d[r * cols + j] = p.mul(d[r * cols + j], inv);
        }
        let (before, rest) = d.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[c];
            if f != 0 {
                let nf = p.neg(f);
                axpy(p, row, nf, prow, c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// row += f·src over columns from `start`.
#[inline]
pub(crate) fn axpy(p: Prime, row: &mut [u32], f: u32, src: &[u32], start: usize) {
    // x + f·s < p² + p < 2³², reduced with a precomputed reciprocal
    let pp = p.get() as u64;
    let m = u64::MAX / pp + 1;
    for (x, &s) in row[start..].iter_mut().zip(&src[start..]) {
        if s != 0 {
            let t = (*x + f * s) as u64;
            *x = ((m.wrapping_mul(t) as u128 * pp as u128) >> 64) as u32;
        }
    }
}

fn kernel_from_rref(p: Prime, d: &[u32], cols: usize, piv: &[usize]) -> Vec<Vec<u32>> {
    let mut is_piv = vec![false; cols];
    for &c in piv {
        is_piv[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..cols).filter(|&c| !is_piv[c]) {
        let mut v = vec![0; cols];
        v[f] = 1;
        for (i, &c) in piv.iter().enumerate() {
            v[c] = p.neg(d[i * cols + f]);
        }
        out.push(v);
    }
    out
}

/// Incrementally maintained fully reduced echelon basis of a subspace of F_p^n.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: Prime,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    pivot_of_col: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(p: Prime, n: usize) -> Self {
        Echelon { p, n, rows: Vec::new(), pivots: Vec::new(), pivot_of_col: vec![None; n] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce v in place against the basis.
    pub fn reduce(&self, v: &mut [u32]) {
        for (i, &c) in self.pivots.iter().enumerate() {
            let f = v[c];
            if f != 0 {
                axpy(self.p, v, self.p.neg(f), &self.rows[i], 0);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Add v to the span; returns false if it was already there.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        self.insert_reduced(w)
    }

    /// Insert a vector that is already reduced against the basis.
    pub fn insert_reduced(&mut self, mut w: Vec<u32>) -> bool {
        let Some(c) = w.iter().position(|&x| x != 0) else { return false };
        let inv = self.p.inv(w[c]);
        for x in w.iter_mut() {
            *x = self.p.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                axpy(self.p, row, self.p.neg(f), &w, 0);
            }
        }
        self.pivot_of_col[c] = Some(self.rows.len());
        self.rows.push(w);
        self.pivots.push(c);
        true
    }

    /// Coordinates of v in terms of the stored rows, if v is in the span.
    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        if w.iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c]).collect())
    }

    pub fn pivot_row_of(&self, col: usize) -> Option<usize> {
        self.pivot_of_col[col]
    }
}

/// Rank of a list of equal-length vectors.
pub fn rank_of(p: Prime, vecs: &[Vec<u32>], n: usize) -> usize {
    let mut e = Echelon::new(p, n);
    for v in vecs {
        e.insert(v);
    }
    e.rank()
}

/// Rank of the map whose columns are given sparsely in F_p^n.
pub fn column_rank(p: Prime, n: usize, cols: &[Vec<(u32, u32)>]) -> usize {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in cols {
        if rows.len() == n {
            break;
        }
        let mut v = vec![0u32; n];
        for &(i, x) in col {
            v[i as usize] = p.add(v[i as usize], x);
        }
        for (r, &pc) in pivots.iter().enumerate() {
            let f = v[pc];
            if f != 0 {
                axpy(p, &mut v, p.neg(f), &rows[r], pc);
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = p.inv(v[pc]);
            v.iter_mut().for_each(|x| *x = p.mul(*x, inv));
            rows.push(v);
            pivots.push(pc);
        }
    }
    rows.len()
}

/// Rank and kernel of the map whose columns are given sparsely in F_p^n.
/// Kernel vectors are sparse combinations of column indices.
pub fn column_kernel(p: Prime, n: usize, cols: &[Vec<(u32, u32)>]) -> (usize, Vec<Vec<(u32, u32)>>) {
    // rows are [reduced column | combination of input columns], reduced left to right
    let c = cols.len();
    let w = n + c;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut kernel = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut v = vec![0u32; w];
        for &(i, x) in col {
            v[i as usize] = p.add(v[i as usize], x);
        }
        v[n + j] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            let f = v[pc];
            if f != 0 {
                axpy(p, &mut v[..n + j + 1], p.neg(f), &rows[r][..n + j + 1], pc);
            }
        }
        match v[..n].iter().position(|&x| x != 0) {
            None => kernel.push(v[n..].iter().enumerate().filter(|e| *e.1 != 0).map(|(k, &x)| (k as u32, x)).collect()),
            Some(pc) => {
                let inv = p.inv(v[pc]);
                v.iter_mut().for_each(|x| *x = p.mul(*x, inv));
                rows.push(v);
                pivots.push(pc);
            }
        }
    }
    (rows.len(), kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: u32) -> Prime {
        Prime::new(x).unwrap()
    }

    #[test]
    fn primes_validated() {
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(7).is_ok());
        assert!(FpScalar::new(3, 9).is_err());
        assert_eq!(FpScalar::new(-1, 5).unwrap().value(), 4);
    }

    #[test]
    fn scalar_mismatch() {
        let a = FpScalar::new(1, 3).unwrap();
        let b = FpScalar::new(1, 5).unwrap();
        assert_eq!(a.add(b), Err(FieldError::ModulusMismatch(3, 5)));
        assert_eq!(FpScalar::new(3, 7).unwrap().inv().unwrap().value(), 5);
    }

    #[test]
    fn rref_examples() {
        let z = FpMatrix::zeros(p(3), 2, 2);
        let (r, piv) = z.rref();
        assert!(r.is_zero());
        assert!(piv.is_empty());
        let i = FpMatrix::identity(p(2), 3);
        let (r, piv) = i.rref();
        assert_eq!(r, i);
        assert_eq!(piv, vec![0, 1, 2]);
        let m = FpMatrix::from_rows(p(5), &[vec![1, 2], vec![2, 4]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(r, FpMatrix::from_rows(p(5), &[vec![1, 2], vec![0, 0]]).unwrap());
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        assert!(FpMatrix::identity(p(3), 4).kernel_basis().is_empty());
        assert_eq!(FpMatrix::zeros(p(3), 2, 3).kernel_basis().len(), 3);
        let m = FpMatrix::from_rows(p(2), &[vec![1, 1]]).unwrap();
        assert_eq!(m.kernel_basis(), vec![vec![1, 1]]);
    }

    #[test]
    fn solve_examples() {
        let id = FpMatrix::identity(p(7), 3);
        assert_eq!(id.solve(&[1, 5, 6]).unwrap(), Some(vec![1, 5, 6]));
        let m = FpMatrix::from_rows(p(5), &[vec![2]]).unwrap();
        assert_eq!(m.solve(&[3]).unwrap(), Some(vec![4]));
        let z = FpMatrix::from_rows(p(5), &[vec![0]]).unwrap();
        assert_eq!(z.solve(&[1]).unwrap(), None);
        assert!(m.solve(&[1, 2]).is_err());
    }

    #[test]
    fn kron_examples() {
        let k = FpMatrix::identity(p(3), 2).kron(&FpMatrix::identity(p(3), 3)).unwrap();
        assert_eq!(k, FpMatrix::identity(p(3), 6));
        let a = FpMatrix::from_rows(p(2), &[vec![1, 1]]).unwrap();
        let b = FpMatrix::from_rows(p(2), &[vec![1], vec![1]]).unwrap();
        let k = a.kron(&b).unwrap();
        assert_eq!(k, FpMatrix::from_rows(p(2), &[vec![1, 1], vec![1, 1]]).unwrap());
        assert!(a.kron(&FpMatrix::zeros(p(2), 2, 2)).unwrap().is_zero());
        assert!(a.kron(&FpMatrix::identity(p(3), 1)).is_err());
    }

    #[test]
    fn storage_switch() {
        let m = FpMatrix::identity(p(3), 40).to_dense().compact();
        assert!(m.is_sparse());
        let d = FpMatrix::from_rows(p(3), &[vec![1, 2], vec![2, 2]]).unwrap().compact();
        assert!(!d.is_sparse());
        assert_eq!(m.to_dense(), m);
    }

    #[test]
    fn echelon_coords() {
        let mut e = Echelon::new(p(5), 3);
        assert!(e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 3, 1]));
        let c = e.coords(&[2, 0, 1]).unwrap();
        let mut v = vec![0; 3];
        for (k, row) in c.iter().zip(e.rows()) {
            for j in 0..3 {
                v[j] = p(5).add(v[j], p(5).mul(*k, row[j]));
            }
        }
        assert_eq!(v, vec![2, 0, 1]);
        assert!(e.coords(&[0, 0, 1]).is_none());
    }
}
