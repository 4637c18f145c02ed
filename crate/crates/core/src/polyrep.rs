//! Strict polynomial functors realized as weight-graded modules with divided-power
//! Chevalley generators e^{(k)}, f^{(k)}.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

use crate::combinatorics::{binomial_mod, factorial, multisets, subsets, MultiWeight, Weight};
use crate::field::{Echelon, FpMatrix, Prime};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error("empty parameter space")]
    EmptySpace,
    #[error("modulus mismatch")]
    Modulus,
    #[error("malformed serialized module: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupShape {
    pub factors: Vec<usize>,
    pub degrees: Vec<u32>,
}

impl GroupShape {
    pub fn new(factors: Vec<usize>, degrees: Vec<u32>) -> Self {
        assert_eq!(factors.len(), degrees.len());
        assert!(!factors.is_empty() && factors.iter().all(|&m| m >= 1));
        GroupShape { factors, degrees }
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// Evaluation is faithful when m_i ≥ d_i for every factor.
    pub fn is_faithful(&self) -> bool {
        self.factors.iter().zip(&self.degrees).all(|(&m, &d)| m >= d as usize)
    }
}

/// Finite-dimensional graded vector space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedSpace {
    pub dims: BTreeMap<i64, usize>,
}

impl GradedSpace {
    pub fn new(dims: BTreeMap<i64, usize>) -> Self {
        GradedSpace { dims: dims.into_iter().filter(|e| e.1 > 0).collect() }
    }

    /// k^l concentrated in degree 0.
    pub fn trivial(l: usize) -> Self {
        GradedSpace::new([(0, l)].into_iter().collect())
    }

    /// E_r: k in degrees 0, 2, …, 2p^r − 2.
    pub fn e_r(p: Prime, r: u32) -> Self {
        let q = (p.get() as i64).pow(r);
        GradedSpace::new((0..q).map(|i| (2 * i, 1)).collect())
    }

    pub fn dual(&self) -> Self {
        GradedSpace::new(self.dims.iter().map(|(&d, &n)| (-d, n)).collect())
    }

    pub fn tensor(&self, o: &GradedSpace) -> Self {
        let mut m = BTreeMap::new();
        for (&a, &x) in &self.dims {
            for (&b, &y) in &o.dims {
                *m.entry(a + b).or_insert(0) += x * y;
            }
        }
        GradedSpace::new(m)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Degrees of a basis, in increasing order.
    pub fn basis_degrees(&self) -> Vec<i64> {
        self.dims.iter().flat_map(|(&d, &n)| std::iter::repeat(d).take(n)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    E,
    F,
}

/// Divided power e_{factor,root}^{(k)} or f_{factor,root}^{(k)}; root a is the simple root ε_a − ε_{a+1}, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenKey {
    pub factor: usize,
    pub root: usize,
    pub k: u32,
    pub kind: GenKind,
}

impl GenKey {
    pub fn e(factor: usize, root: usize, k: u32) -> Self {
        GenKey { factor, root, k, kind: GenKind::E }
    }
    pub fn f(factor: usize, root: usize, k: u32) -> Self {
        GenKey { factor, root, k, kind: GenKind::F }
    }
    /// Weight shift in units of the root.
    pub fn shift(&self) -> i64 {
        match self.kind {
            GenKind::E => self.k as i64,
            GenKind::F => -(self.k as i64),
        }
    }
    pub fn opposite(&self) -> GenKey {
        GenKey { kind: if self.kind == GenKind::E { GenKind::F } else { GenKind::E }, ..*self }
    }
}

/// Compressed sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csc {
    pub rows: usize,
    colptr: Vec<u32>,
    entries: Vec<(u32, u32)>,
}

impl Csc {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Csc { rows, colptr: vec![0; cols + 1], entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Csc { rows: n, colptr: (0..=n as u32).collect(), entries: (0..n as u32).map(|i| (i, 1)).collect() }
    }

    /// Columns must already be sorted, merged and free of zeros.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(u32, u32)>>) -> Self {
        let mut colptr = Vec::with_capacity(cols.len() + 1);
        let mut entries = Vec::new();
        colptr.push(0);
        for c in cols {
            entries.extend(c);
            colptr.push(entries.len() as u32);
        }
        Csc { rows, colptr, entries }
    }

    pub fn cols(&self) -> usize {
        self.colptr.len() - 1
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[(u32, u32)] {
        &self.entries[self.colptr[j] as usize..self.colptr[j + 1] as usize]
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_matrix(&self, p: Prime) -> FpMatrix {
        let mut trips = Vec::with_capacity(self.nnz());
        for j in 0..self.cols() {
            for &(r, v) in self.col(j) {
                trips.push((r as usize, j, v));
            }
        }
        FpMatrix::from_triplets(p, self.rows, self.cols(), &trips)
    }

    pub fn from_matrix(m: &FpMatrix) -> Self {
        let mut cols = vec![Vec::new(); m.cols()];
        for (r, c, v) in m.triplets() {
            cols[c].push((r as u32, v));
        }
        Csc::from_columns(m.rows(), cols)
    }

    pub fn transpose(&self) -> Csc {
        let mut cols = vec![Vec::new(); self.rows];
        for j in 0..self.cols() {
            for &(r, v) in self.col(j) {
                cols[r as usize].push((j as u32, v));
            }
        }
        Csc::from_columns(self.cols(), cols)
    }

    /// y += c·M x for sparse x given as (index, value).
    pub fn apply_sparse(&self, p: Prime, x: &[(u32, u32)]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &(j, a) in x {
            for &(r, v) in self.col(j as usize) {
                out.push((r, p.mul(a, v)));
            }
        }
        merge(p, &mut out);
        out
    }

    pub fn apply_dense(&self, p: Prime, x: &[u32]) -> Vec<u32> {
        let mut y = vec![0u32; self.rows];
        for (j, &a) in x.iter().enumerate() {
            if a != 0 {
                for &(r, v) in self.col(j) {
                    y[r as usize] = p.add(y[r as usize], p.mul(a, v));
                }
            }
        }
        y
    }
}

/// Sort by index, sum duplicates, drop zeros.
pub fn merge(p: Prime, v: &mut Vec<(u32, u32)>) {
    if v.len() <= 1 {
        v.retain(|e| e.1 != 0);
        return;
    }
    v.sort_unstable_by_key(|e| e.0);
    let mut w = 0;
    for i in 0..v.len() {
        if w > 0 && v[w - 1].0 == v[i].0 {
            v[w - 1].1 = p.add(v[w - 1].1, v[i].1);
        } else {
            v[w] = v[i];
            w += 1;
        }
    }
    v.truncate(w);
    v.retain(|e| e.1 != 0);
}

/// A weight-graded module with divided-power generator actions.
#[derive(Clone, Debug)]
pub struct PolyRep {
    p: Prime,
    shape: GroupShape,
    weights: Vec<MultiWeight>,
    aux: Vec<i64>,
    gens: Vec<Csc>,
    expr: String,
    block_keys: Vec<(MultiWeight, i64)>,
    block_of: Vec<u32>,
    local: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl PartialEq for PolyRep {
    fn eq(&self, o: &PolyRep) -> bool {
        self.p == o.p && self.shape == o.shape && self.weights == o.weights && self.aux == o.aux && self.gens == o.gens
    }
}

/// Key of a weight block: (weight, aux degree).
pub type BlockKey = (MultiWeight, i64);

fn gen_keys(shape: &GroupShape) -> Vec<GenKey> {
    let mut keys = Vec::new();
    for (f, (&m, &d)) in shape.factors.iter().zip(&shape.degrees).enumerate() {
        for a in 0..m.saturating_sub(1) {
            for k in 1..=d {
                keys.push(GenKey::e(f, a, k));
                keys.push(GenKey::f(f, a, k));
            }
        }
    }
    keys
}

impl PolyRep {
    /// Assemble from parts; generator matrices are given for every key of `generator_keys`.
    pub fn from_parts(
        p: Prime,
        shape: GroupShape,
        weights: Vec<MultiWeight>,
        aux: Vec<i64>,
        gens: Vec<Csc>,
        expr: impl Into<String>,
    ) -> Self {
        let dim = weights.len();
        assert_eq!(aux.len(), dim);
        assert_eq!(gens.len(), gen_keys(&shape).len());
        let mut keys: Vec<BlockKey> = weights.iter().cloned().zip(aux.iter().cloned()).collect();
        keys.sort();
        keys.dedup();
        let index: HashMap<&BlockKey, u32> = keys.iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
        let mut block_of = Vec::with_capacity(dim);
        let mut local = Vec::with_capacity(dim);
        let mut members = vec![Vec::new(); keys.len()];
        for i in 0..dim {
            let b = index[&(weights[i].clone(), aux[i])];
            block_of.push(b);
            local.push(members[b as usize].len() as u32);
            members[b as usize].push(i as u32);
        }
        PolyRep { p, shape, weights, aux, gens, expr: expr.into(), block_keys: keys, block_of, local, members }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize) -> &MultiWeight {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[MultiWeight] {
        &self.weights
    }

    pub fn aux_degree(&self, i: usize) -> i64 {
        self.aux[i]
    }

    pub fn aux_degrees(&self) -> &[i64] {
        &self.aux
    }

    pub fn expr(&self) -> &str {
        &self.expr
    }

    pub fn with_expr(mut self, e: impl Into<String>) -> Self {
        self.expr = e.into();
        self
    }

    pub fn generator_keys(&self) -> Vec<GenKey> {
        gen_keys(&self.shape)
    }

    pub fn gen_index(&self, key: GenKey) -> Option<usize> {
        let mut off = 0;
        for (f, (&m, &d)) in self.shape.factors.iter().zip(&self.shape.degrees).enumerate() {
            let n = m.saturating_sub(1) * d as usize * 2;
            if f == key.factor {
                if key.root + 1 >= m || key.k == 0 || key.k > d {
                    return None;
                }
                return Some(off + (key.root * d as usize + (key.k as usize - 1)) * 2 + (key.kind == GenKind::F) as usize);
            }
            off += n;
        }
        None
    }

    /// Generator matrix; identity for k = 0 and zero beyond the degree.
    pub fn gen_csc(&self, key: GenKey) -> std::borrow::Cow<'_, Csc> {
        if key.k == 0 {
            return std::borrow::Cow::Owned(Csc::identity(self.dim()));
        }
        match self.gen_index(key) {
            Some(i) => std::borrow::Cow::Borrowed(&self.gens[i]),
            None => std::borrow::Cow::Owned(Csc::zero(self.dim(), self.dim())),
        }
    }

    pub fn gens(&self) -> &[Csc] {
        &self.gens
    }

    /// e_{factor,root}^{(k)} as a matrix.
    pub fn e(&self, factor: usize, root: usize, k: u32) -> FpMatrix {
        self.gen_csc(GenKey::e(factor, root, k)).to_matrix(self.p)
    }

    /// f_{factor,root}^{(k)} as a matrix.
    pub fn f(&self, factor: usize, root: usize, k: u32) -> FpMatrix {
        self.gen_csc(GenKey::f(factor, root, k)).to_matrix(self.p)
    }

    pub fn apply(&self, key: GenKey, x: &[(u32, u32)]) -> Vec<(u32, u32)> {
        if key.k == 0 {
            return x.to_vec();
        }
        match self.gen_index(key) {
            Some(i) => self.gens[i].apply_sparse(self.p, x),
            None => Vec::new(),
        }
    }

    pub fn blocks(&self) -> &[BlockKey] {
        &self.block_keys
    }

    pub fn block_members(&self, b: usize) -> &[u32] {
        &self.members[b]
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i] as usize
    }

    pub fn local_index(&self, i: usize) -> usize {
        self.local[i] as usize
    }

    pub fn find_block(&self, key: &BlockKey) -> Option<usize> {
        self.block_keys.binary_search(key).ok()
    }

    /// Basis indices of the given weight (all aux degrees).
    pub fn weight_space(&self, w: &MultiWeight) -> Vec<usize> {
        (0..self.dim()).filter(|&i| &self.weights[i] == w).collect()
    }

    pub fn weight_dims(&self) -> BTreeMap<MultiWeight, usize> {
        let mut m = BTreeMap::new();
        for w in &self.weights {
            *m.entry(w.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn aux_dims(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &a in &self.aux {
            *m.entry(a).or_insert(0) += 1;
        }
        m
    }

    /// Check the defining relations of the generator presentation.
    pub fn validate(&self) -> Result<(), RepError> {
        let p = self.p;
        let dim = self.dim();
        for key in self.generator_keys() {
            let g = self.gen_csc(key);
            for j in 0..dim {
                for &(r, _) in g.col(j) {
                    let want = self.weights[j].shift_root(key.factor, key.root, key.shift());
                    if want.as_ref() != Some(&self.weights[r as usize]) {
                        return Err(RepError::Invalid(format!("{key:?} breaks the weight shift at basis {j}")));
                    }
                    if self.aux[r as usize] != self.aux[j] {
                        return Err(RepError::Invalid(format!("{key:?} changes the aux degree at basis {j}")));
                    }
                }
            }
        }
        for (f, (&m, &d)) in self.shape.factors.iter().zip(&self.shape.degrees).enumerate() {
            for a in 0..m.saturating_sub(1) {
                for kind in [GenKind::E, GenKind::F] {
                    let g = |k: u32| GenKey { factor: f, root: a, k, kind };
                    // e^{(j)} e^{(k)} = C(j+k, j) e^{(j+k)}, which gives k!·e^{(k)} = e^k
                    for j in 1..=d {
                        for k in 1..=d {
                            for v in 0..dim {
                                let x = vec![(v as u32, 1)];
                                let lhs = self.apply(g(j), &self.apply(g(k), &x));
                                let c = binomial_mod((j + k) as u64, j as u64, p);
                                let mut rhs = self.apply(g(j + k), &x);
                                rhs.iter_mut().for_each(|e| e.1 = p.mul(e.1, c));
                                rhs.retain(|e| e.1 != 0);
                                if lhs != rhs {
                                    return Err(RepError::Invalid(format!("divided-power law fails for {:?} j={j} k={k}", g(1))));
                                }
                            }
                        }
                    }
                }
                // Kostant: e^{(k)} f^{(l)} v = Σ_t C(h + k − l, t) f^{(l−t)} e^{(k−t)} v, h the weight of v
                for k in 1..=d {
                    for l in 1..=d {
                        for v in 0..dim {
                            let w = &self.weights[v].0[f].0;
                            let h = w[a] as i64 - w[a + 1] as i64;
                            let x = vec![(v as u32, 1)];
                            let lhs = self.apply(GenKey::e(f, a, k), &self.apply(GenKey::f(f, a, l), &x));
                            let mut rhs = Vec::new();
                            for t in 0..=k.min(l) {
                                let c = gen_binomial_mod(h + k as i64 - l as i64, t as u64, p);
                                if c == 0 {
                                    continue;
                                }
                                let y = self.apply(GenKey::f(f, a, l - t), &self.apply(GenKey::e(f, a, k - t), &x));
                                rhs.extend(y.into_iter().map(|(i, z)| (i, p.mul(z, c))));
                            }
                            merge(p, &mut rhs);
                            if lhs != rhs {
                                return Err(RepError::Invalid(format!("commutation law fails: factor {f} root {a} k={k} l={l} basis {v}")));
                            }
                        }
                    }
                }
            }
        }
        // generators for distinct roots or factors commute where they must
        let keys = self.generator_keys();
        for &g1 in &keys {
            for &g2 in &keys {
                let must = if g1.factor != g2.factor {
                    true
                } else if g1.root == g2.root {
                    g1.kind == g2.kind
                } else {
                    g1.kind != g2.kind || g1.root.abs_diff(g2.root) >= 2
                };
                if !must || g1 >= g2 {
                    continue;
                }
                for v in 0..dim {
                    let x = vec![(v as u32, 1)];
                    if self.apply(g1, &self.apply(g2, &x)) != self.apply(g2, &self.apply(g1, &x)) {
                        return Err(RepError::Invalid(format!("{g1:?} and {g2:?} do not commute")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Is f (rows: target basis, cols: self basis) equivariant into `target`?
    pub fn is_equivariant(&self, target: &PolyRep, f: &FpMatrix) -> bool {
        self.check_map(target, f).is_ok()
    }

    pub fn check_map(&self, target: &PolyRep, f: &FpMatrix) -> Result<(), RepError> {
        if self.shape != target.shape && self.shape.factors != target.shape.factors {
            return Err(RepError::Shape("maps need equal shapes".into()));
        }
        if f.rows() != target.dim() || f.cols() != self.dim() {
            return Err(RepError::Shape(format!("{}x{} map between dims {} and {}", f.rows(), f.cols(), self.dim(), target.dim())));
        }
        let fc = Csc::from_matrix(f);
        for j in 0..self.dim() {
            for &(r, _) in fc.col(j) {
                if target.weights[r as usize] != self.weights[j] {
                    return Err(RepError::NotEquivariant(format!("weight mismatch at column {j}")));
                }
            }
        }
        let p = self.p;
        for key in self.generator_keys() {
            for j in 0..self.dim() {
                let x = vec![(j as u32, 1)];
                let a = target.apply(key, &fc.apply_sparse(p, &x));
                let b = fc.apply_sparse(p, &self.apply(key, &x));
                if a != b {
                    return Err(RepError::NotEquivariant(format!("{key:?} at column {j}")));
                }
            }
        }
        Ok(())
    }

    fn check_same(&self, o: &PolyRep) -> Result<(), RepError> {
        if self.p != o.p {
            return Err(RepError::Modulus);
        }
        if self.shape.factors != o.shape.factors {
            return Err(RepError::Shape(format!("{:?} vs {:?}", self.shape.factors, o.shape.factors)));
        }
        Ok(())
    }

    fn gens_from<F: FnMut(GenKey) -> Csc>(shape: &GroupShape, mut f: F) -> Vec<Csc> {
        gen_keys(shape).into_iter().map(&mut f).collect()
    }
}

/// Generalized binomial C(n, t) mod p for integer n.
pub fn gen_binomial_mod(n: i64, t: u64, p: Prime) -> u32 {
    if n >= 0 {
        binomial_mod(n as u64, t, p)
    } else {
        // C(n, t) = (−1)^t C(t − n − 1, t)
        let c = binomial_mod((t as i64 - n - 1) as u64, t, p);
        if t % 2 == 1 {
            p.neg(c)
        } else {
            c
        }
    }
}

/// The standard representation k^m, degree 1.
pub fn standard(p: Prime, m: usize) -> PolyRep {
    let shape = GroupShape::new(vec![m], vec![1]);
    let weights = (0..m).map(|j| MultiWeight::single(Weight::unit(m, j))).collect();
    let gens = PolyRep::gens_from(&shape, |key| {
        let mut cols = vec![Vec::new(); m];
        match key.kind {
            GenKind::E => cols[key.root + 1].push((key.root as u32, 1)),
            GenKind::F => cols[key.root].push((key.root as u32 + 1, 1)),
        }
        Csc::from_columns(m, cols)
    });
    PolyRep::from_parts(p, shape, weights, vec![0; m], gens, "I")
}

/// The one-dimensional degree-0 module over the given evaluation dimensions.
pub fn unit(p: Prime, factors: &[usize]) -> PolyRep {
    let shape = GroupShape::new(factors.to_vec(), vec![0; factors.len()]);
    PolyRep::from_parts(p, shape, vec![MultiWeight::zero(factors)], vec![0], Vec::new(), "1")
}

/// U ⊗ A with U a graded space carrying the trivial action.
pub fn with_multiplicity(a: &PolyRep, u: &GradedSpace) -> Result<PolyRep, RepError> {
    if u.total() == 0 {
        return Err(RepError::EmptySpace);
    }
    let degs = u.basis_degrees();
    let n = a.dim();
    let mut weights = Vec::with_capacity(n * degs.len());
    let mut aux = Vec::with_capacity(n * degs.len());
    for &d in &degs {
        for i in 0..n {
            weights.push(a.weights[i].clone());
            aux.push(a.aux[i] + d);
        }
    }
    let gens = PolyRep::gens_from(&a.shape, |key| {
        let g = a.gen_csc(key);
        let mut cols = Vec::with_capacity(n * degs.len());
        for b in 0..degs.len() {
            for j in 0..n {
                cols.push(g.col(j).iter().map(|&(r, v)| (r + (b * n) as u32, v)).collect());
            }
        }
        Csc::from_columns(n * degs.len(), cols)
    });
    Ok(PolyRep::from_parts(a.p, a.shape.clone(), weights, aux, gens, format!("param({},{:?})", a.expr, u.dims)))
}

/// The parameterized standard module U ⊗ k^m.
pub fn multiplicity_standard(p: Prime, u: &GradedSpace, m: usize) -> Result<PolyRep, RepError> {
    with_multiplicity(&standard(p, m), u)
}

/// A ⊗ B with the divided-power coproduct action.
pub fn tensor(a: &PolyRep, b: &PolyRep) -> Result<PolyRep, RepError> {
    a.check_same(b)?;
    let p = a.p;
    let degrees: Vec<u32> = a.shape.degrees.iter().zip(&b.shape.degrees).map(|(x, y)| x + y).collect();
    let shape = GroupShape::new(a.shape.factors.clone(), degrees);
    let (na, nb) = (a.dim(), b.dim());
    let mut weights = Vec::with_capacity(na * nb);
    let mut aux = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            weights.push(a.weights[i].add(&b.weights[j]));
            aux.push(a.aux[i] + b.aux[j]);
        }
    }
    let gens = PolyRep::gens_from(&shape, |key| {
        let parts: Vec<(std::borrow::Cow<Csc>, std::borrow::Cow<Csc>)> = (0..=key.k)
            .filter(|&u| u <= a.shape.degrees[key.factor] && key.k - u <= b.shape.degrees[key.factor])
            .map(|u| (a.gen_csc(GenKey { k: u, ..key }), b.gen_csc(GenKey { k: key.k - u, ..key })))
            .collect();
        let mut cols = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let mut c = Vec::new();
                for (ga, gb) in &parts {
                    for &(r1, v1) in ga.col(i) {
                        for &(r2, v2) in gb.col(j) {
                            c.push((r1 * nb as u32 + r2, p.mul(v1, v2)));
                        }
                    }
                }
                merge(p, &mut c);
                cols.push(c);
            }
        }
        Csc::from_columns(na * nb, cols)
    });
    Ok(PolyRep::from_parts(p, shape, weights, aux, gens, format!("tensor({},{})", a.expr, b.expr)))
}

pub fn tensor_power(a: &PolyRep, n: u32) -> Result<PolyRep, RepError> {
    let mut r = unit(a.p, &a.shape.factors);
    for _ in 0..n {
        r = tensor(&r, a)?;
    }
    Ok(r.with_expr(format!("tensorpow({}) o ({})", n, a.expr)))
}

/// Exterior tensor product: shapes concatenate.
pub fn boxtimes(a: &PolyRep, b: &PolyRep) -> Result<PolyRep, RepError> {
    if a.p != b.p {
        return Err(RepError::Modulus);
    }
    let p = a.p;
    let na_f = a.shape.n();
    let shape = GroupShape::new(
        a.shape.factors.iter().chain(&b.shape.factors).cloned().collect(),
        a.shape.degrees.iter().chain(&b.shape.degrees).cloned().collect(),
    );
    let (na, nb) = (a.dim(), b.dim());
    let mut weights = Vec::with_capacity(na * nb);
    let mut aux = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            weights.push(a.weights[i].concat(&b.weights[j]));
            aux.push(a.aux[i] + b.aux[j]);
        }
    }
    let gens = PolyRep::gens_from(&shape, |key| {
        let mut cols = Vec::with_capacity(na * nb);
        if key.factor < na_f {
            let g = a.gen_csc(key);
            for i in 0..na {
                for j in 0..nb {
                    cols.push(g.col(i).iter().map(|&(r, v)| (r * nb as u32 + j as u32, v)).collect());
                }
            }
        } else {
            let g = b.gen_csc(GenKey { factor: key.factor - na_f, ..key });
            for i in 0..na {
                for j in 0..nb {
                    cols.push(g.col(j).iter().map(|&(r, v)| (i as u32 * nb as u32 + r, v)).collect());
                }
            }
        }
        Csc::from_columns(na * nb, cols)
    });
    Ok(PolyRep::from_parts(p, shape, weights, aux, gens, format!("box({},{})", a.expr, b.expr)))
}

pub fn direct_sum(a: &PolyRep, b: &PolyRep) -> Result<PolyRep, RepError> {
    a.check_same(b)?;
    if a.shape.degrees != b.shape.degrees && a.dim() > 0 && b.dim() > 0 {
        return Err(RepError::Shape("direct sum of different degrees".into()));
    }
    let shape = if a.dim() > 0 { a.shape.clone() } else { b.shape.clone() };
    let na = a.dim();
    let weights = a.weights.iter().chain(&b.weights).cloned().collect();
    let aux = a.aux.iter().chain(&b.aux).cloned().collect();
    let gens = PolyRep::gens_from(&shape, |key| {
        let (ga, gb) = (a.gen_csc(key), b.gen_csc(key));
        let mut cols: Vec<Vec<(u32, u32)>> = (0..na).map(|j| ga.col(j).to_vec()).collect();
        cols.extend((0..b.dim()).map(|j| gb.col(j).iter().map(|&(r, v)| (r + na as u32, v)).collect()));
        Csc::from_columns(na + b.dim(), cols)
    });
    Ok(PolyRep::from_parts(a.p, shape, weights, aux, gens, format!("sum({},{})", a.expr, b.expr)))
}

/// The zero module of the given shape.
pub fn zero_rep(p: Prime, shape: &GroupShape) -> PolyRep {
    let gens = PolyRep::gens_from(shape, |_| Csc::zero(0, 0));
    PolyRep::from_parts(p, shape.clone(), Vec::new(), Vec::new(), gens, "0")
}

/// Kuhn dual: transpose the opposite generators, negate aux degrees.
pub fn kuhn_dual(a: &PolyRep) -> PolyRep {
    let gens = PolyRep::gens_from(&a.shape, |key| a.gen_csc(key.opposite()).transpose());
    let aux = a.aux.iter().map(|x| -x).collect();
    PolyRep::from_parts(a.p, a.shape.clone(), a.weights.clone(), aux, gens, format!("dual({})", a.expr))
}

/// Frobenius twist: weights and degrees times p^r, e^{(k)} ↦ e^{(k/p^r)}.
pub fn frobenius_twist(a: &PolyRep, r: u32) -> PolyRep {
    if r == 0 {
        return a.clone();
    }
    let q = a.p.get().pow(r);
    let shape = GroupShape::new(a.shape.factors.clone(), a.shape.degrees.iter().map(|d| d * q).collect());
    let weights = a.weights.iter().map(|w| w.scale(q)).collect();
    let gens = PolyRep::gens_from(&shape, |key| {
        if key.k % q == 0 {
            a.gen_csc(GenKey { k: key.k / q, ..key }).into_owned()
        } else {
            Csc::zero(a.dim(), a.dim())
        }
    });
    PolyRep::from_parts(a.p, shape, weights, a.aux.clone(), gens, format!("twist({},{})", a.expr, r))
}

/// Shared driver for S^d and Λ^d (odd p): basis of sorted index tuples, Leibniz rule on factors.
fn power_construction(a: &PolyRep, d: u32, basis: Vec<Vec<u32>>, wedge: bool, expr: String) -> PolyRep {
    let p = a.p;
    let shape = GroupShape::new(a.shape.factors.clone(), a.shape.degrees.iter().map(|x| x * d).collect());
    let index: HashMap<Vec<u32>, u32> = basis.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
    let weights: Vec<MultiWeight> = basis
        .iter()
        .map(|b| b.iter().fold(MultiWeight::zero(&a.shape.factors), |acc, &i| acc.add(&a.weights[i as usize])))
        .collect();
    let aux = basis.iter().map(|b| b.iter().map(|&i| a.aux[i as usize]).sum()).collect();
    let n = basis.len();
    // group keys by (factor, root, kind) so each pass computes all k at once
    let mut cache: HashMap<(usize, usize, GenKind), Vec<Vec<Vec<(u32, u32)>>>> = HashMap::new();
    let keys = gen_keys(&shape);
    for key in &keys {
        let id = (key.factor, key.root, key.kind);
        if cache.contains_key(&id) {
            continue;
        }
        let kmax = shape.degrees[key.factor];
        let da = a.shape.degrees[key.factor];
        let ga: Vec<std::borrow::Cow<Csc>> = (0..=da.min(kmax)).map(|j| a.gen_csc(GenKey { k: j, ..*key })).collect();
        let mut per_k: Vec<Vec<Vec<(u32, u32)>>> = vec![Vec::with_capacity(n); kmax as usize + 1];
        for mono in &basis {
            // states[used] : partial tuple -> coefficient
            let mut states: Vec<HashMap<Vec<u32>, u32>> = vec![HashMap::new(); kmax as usize + 1];
            states[0].insert(Vec::new(), 1);
            for &x in mono {
                let mut next: Vec<HashMap<Vec<u32>, u32>> = vec![HashMap::new(); kmax as usize + 1];
                for used in 0..=kmax as usize {
                    for (part, &c) in &states[used] {
                        for (j, g) in ga.iter().enumerate() {
                            if used + j > kmax as usize {
                                break;
                            }
                            for &(y, v) in g.col(x as usize) {
                                let Some((np, sign)) = insert_sorted(part, y, wedge) else { continue };
                                let mut coef = p.mul(c, v);
                                if sign {
                                    coef = p.neg(coef);
                                }
                                let e = next[used + j].entry(np).or_insert(0);
                                *e = p.add(*e, coef);
                            }
                        }
                    }
                }
                for s in next.iter_mut() {
                    s.retain(|_, v| *v != 0);
                }
                states = next;
            }
            for k in 1..=kmax as usize {
                let mut col: Vec<(u32, u32)> = states[k].iter().map(|(t, &v)| (index[t], v)).collect();
                merge(p, &mut col);
                per_k[k].push(col);
            }
        }
        cache.insert(id, per_k);
    }
    let gens = keys
        .iter()
        .map(|key| {
            let cols = cache[&(key.factor, key.root, key.kind)][key.k as usize].clone();
            Csc::from_columns(n, cols)
        })
        .collect();
    PolyRep::from_parts(p, shape, weights, aux, gens, expr)
}

/// Insert y into a sorted tuple; for wedges report the sign and reject repeats.
fn insert_sorted(part: &[u32], y: u32, wedge: bool) -> Option<(Vec<u32>, bool)> {
    let pos = part.partition_point(|&z| z < y);
    if wedge && pos < part.len() && part[pos] == y {
        return None;
    }
    let mut v = Vec::with_capacity(part.len() + 1);
    v.extend_from_slice(&part[..pos]);
    v.push(y);
    v.extend_from_slice(&part[pos..]);
    // y moves past the part.len() − pos larger entries
    Some((v, wedge && (part.len() - pos) % 2 == 1))
}

/// S^d(A): coinvariants of A^{⊗d}, monomial basis indexed by sorted multisets.
pub fn symmetric_power(a: &PolyRep, d: u32) -> PolyRep {
    let basis = multisets(a.dim(), d as usize);
    power_construction(a, d, basis, false, format!("sym({}) o ({})", d, a.expr))
}

/// Γ^d(A): invariants of A^{⊗d}, orbit-sum basis indexed by sorted multisets.
pub fn divided_power(a: &PolyRep, d: u32) -> PolyRep {
    kuhn_dual(&symmetric_power(&kuhn_dual(a), d)).with_expr(format!("gamma({}) o ({})", d, a.expr))
}

/// Λ^d(A): sign coinvariants for odd p; the image of the norm map S^d → Γ^d for p = 2.
pub fn exterior_power(a: &PolyRep, d: u32) -> PolyRep {
    let expr = format!("wedge({}) o ({})", d, a.expr);
    if a.p.get() != 2 {
        let basis = subsets(a.dim(), d as usize);
        return power_construction(a, d, basis, true, expr);
    }
    let s = symmetric_power(a, d);
    let g = divided_power(a, d);
    let n = symmetrization_map(a, d);
    image(&n, &s, &g).expect("the norm map is equivariant").with_expr(expr)
}

/// Norm map S^d(A) → Γ^d(A): Π a^{c_a} ↦ (Π c_a!)·Π a^{[c_a]}.
pub fn symmetrization_map(a: &PolyRep, d: u32) -> FpMatrix {
    let p = a.p;
    let basis = multisets(a.dim(), d as usize);
    let trips: Vec<(usize, usize, u32)> = basis
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let c = runs(m).iter().fold(1u32, |acc, &(_, k)| p.mul(acc, (factorial(k as u64) % p.get() as u128) as u32));
            (i, i, c)
        })
        .collect();
    FpMatrix::from_triplets(p, basis.len(), basis.len(), &trips)
}

/// Map Γ^d(A) → S^d(A): Π a^{[c_a]} ↦ (d!/Π c_a!)·Π a^{c_a}.
pub fn gamma_to_sym_map(a: &PolyRep, d: u32) -> FpMatrix {
    let p = a.p;
    let basis = multisets(a.dim(), d as usize);
    let trips: Vec<(usize, usize, u32)> = basis
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let ks: Vec<u32> = runs(m).iter().map(|e| e.1).collect();
            (i, i, (crate::combinatorics::multinomial(&ks) % p.get() as u128) as u32)
        })
        .collect();
    FpMatrix::from_triplets(p, basis.len(), basis.len(), &trips)
}

/// Run-length encoding of a sorted multiset.
pub fn runs(m: &[u32]) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &x in m {
        match out.last_mut() {
            Some(l) if l.0 == x => l.1 += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

fn multiset_index(n: usize, d: usize) -> HashMap<Vec<u32>, usize> {
    multisets(n, d).into_iter().enumerate().map(|(i, m)| (m, i)).collect()
}

/// Δ_{d,e}: Γ^{d+e}(A) → Γ^d(A) ⊗ Γ^e(A).
pub fn comultiplication_map(d: u32, e: u32, a: &PolyRep) -> FpMatrix {
    let p = a.p;
    let n = a.dim();
    let src = multisets(n, (d + e) as usize);
    let id = multiset_index(n, d as usize);
    let ie = multiset_index(n, e as usize);
    let mut trips = Vec::new();
    for (col, m) in src.iter().enumerate() {
        let r = runs(m);
        // choose how many copies of each element go left
        let mut choice = vec![0u32; r.len()];
        fn rec(i: usize, left: u32, r: &[(u32, u32)], choice: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == r.len() {
                if left == 0 {
                    out.push(choice.clone());
                }
                return;
            }
            for x in 0..=r[i].1.min(left) {
                choice[i] = x;
                rec(i + 1, left - x, r, choice, out);
            }
        }
        let mut splits = Vec::new();
        rec(0, d, &r, &mut choice, &mut splits);
        for s in splits {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (&(x, k), &c) in r.iter().zip(&s) {
                left.extend(std::iter::repeat(x).take(c as usize));
                right.extend(std::iter::repeat(x).take((k - c) as usize));
            }
            let row = id[&left] * ie.len() + ie[&right];
            trips.push((row, col, 1));
        }
    }
    let _ = p;
    FpMatrix::from_triplets(a.p, id.len() * ie.len(), src.len(), &trips)
}

/// m_μ: Γ^{μ_1}(A) ⊗ … ⊗ Γ^{μ_k}(A) → Γ^{|μ|}(A).
pub fn multiplication_map(mu: &[u32], a: &PolyRep) -> FpMatrix {
    let p = a.p;
    let n = a.dim();
    let total: u32 = mu.iter().sum();
    let tgt = multiset_index(n, total as usize);
    let factors: Vec<Vec<Vec<u32>>> = mu.iter().map(|&d| multisets(n, d as usize)).collect();
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let src_dim: usize = dims.iter().product();
    let mut trips = Vec::new();
    for col in 0..src_dim {
        let mut rem = col;
        let mut idx = vec![0; mu.len()];
        for i in (0..mu.len()).rev() {
            idx[i] = rem % dims[i];
            rem /= dims[i];
        }
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        let mut coef = 1u32;
        for (i, &j) in idx.iter().enumerate() {
            for (x, k) in runs(&factors[i][j]) {
                let c = counts.entry(x).or_insert(0);
                coef = p.mul(coef, binomial_mod((*c + k) as u64, k as u64, p));
                *c += k;
            }
        }
        if coef == 0 {
            continue;
        }
        let m: Vec<u32> = counts.iter().flat_map(|(&x, &k)| std::iter::repeat(x).take(k as usize)).collect();
        trips.push((tgt[&m], col, coef));
    }
    FpMatrix::from_triplets(p, tgt.len(), src_dim, &trips)
}

/// S^d(A) ⊗ S^e(A) → S^{d+e}(A), concatenation of monomials.
pub fn sym_multiplication_map(d: u32, e: u32, a: &PolyRep) -> FpMatrix {
    let n = a.dim();
    let (ld, le) = (multisets(n, d as usize), multisets(n, e as usize));
    let tgt = multiset_index(n, (d + e) as usize);
    let mut trips = Vec::with_capacity(ld.len() * le.len());
    for (i, x) in ld.iter().enumerate() {
        for (j, y) in le.iter().enumerate() {
            let mut m: Vec<u32> = x.iter().chain(y).cloned().collect();
            m.sort();
            trips.push((tgt[&m], i * le.len() + j, 1));
        }
    }
    FpMatrix::from_triplets(a.p, tgt.len(), ld.len() * le.len(), &trips)
}

/// Γ^{p^r}(A) → A^{(r)}: a^{[p^r]} ↦ a, other orbit sums ↦ 0.
pub fn frobenius_projection(a: &PolyRep, r: u32) -> FpMatrix {
    let q = a.p.get().pow(r);
    let src = multisets(a.dim(), q as usize);
    let trips: Vec<(usize, usize, u32)> = src
        .iter()
        .enumerate()
        .filter(|(_, m)| m.iter().all(|&x| x == m[0]))
        .map(|(i, m)| (m[0] as usize, i, 1))
        .collect();
    FpMatrix::from_triplets(a.p, a.dim(), src.len(), &trips)
}

/// A submodule together with its basis in ambient coordinates.
#[derive(Clone, Debug)]
pub struct SubRep {
    pub rep: PolyRep,
    /// ambient-coordinate basis vectors, one per basis element of `rep`
    pub basis: Vec<Vec<(u32, u32)>>,
}

impl SubRep {
    pub fn inclusion(&self, ambient_dim: usize) -> FpMatrix {
        let mut trips = Vec::new();
        for (c, v) in self.basis.iter().enumerate() {
            for &(r, x) in v {
                trips.push((r as usize, c, x));
            }
        }
        FpMatrix::from_triplets(self.rep.p, ambient_dim, self.basis.len(), &trips)
    }
}

/// Per-block echelon forms of the smallest generator-stable subspace containing the seeds.
fn spin_blocks(a: &PolyRep, seeds: &[Vec<u32>]) -> Vec<Echelon> {
    let p = a.p;
    let nb = a.block_keys.len();
    let mut ech: Vec<Echelon> = (0..nb).map(|b| Echelon::new(p, a.members[b].len())).collect();
    let mut queue: Vec<(usize, Vec<u32>)> = Vec::new();
    let push = |ech: &mut Vec<Echelon>, queue: &mut Vec<(usize, Vec<u32>)>, b: usize, mut v: Vec<u32>| {
        ech[b].reduce(&mut v);
        if v.iter().any(|&x| x != 0) {
            ech[b].insert_reduced(v.clone());
            queue.push((b, v));
        }
    };
    for s in seeds {
        // weight components of the seed
        let mut comps: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (i, &x) in s.iter().enumerate() {
            if x % p.get() != 0 {
                let b = a.block_of[i] as usize;
                comps.entry(b).or_insert_with(|| vec![0; a.members[b].len()])[a.local[i] as usize] = x % p.get();
            }
        }
        for (b, v) in comps {
            push(&mut ech, &mut queue, b, v);
        }
    }
    let keys = a.generator_keys();
    while let Some((b, v)) = queue.pop() {
        let x: Vec<(u32, u32)> = v.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &c)| (a.members[b][i], c)).collect();
        for &key in &keys {
            let y = a.apply(key, &x);
            if y.is_empty() {
                continue;
            }
            let tb = a.block_of[y[0].0 as usize] as usize;
            let mut w = vec![0; a.members[tb].len()];
            for (i, c) in y {
                w[a.local[i as usize] as usize] = c;
            }
            push(&mut ech, &mut queue, tb, w);
        }
    }
    ech
}

/// Restrict the action to a stable subspace given by per-block echelon bases.
fn restrict(a: &PolyRep, ech: &[Echelon], expr: String) -> SubRep {
    let p = a.p;
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    let mut aux = Vec::new();
    let mut offset = vec![0usize; ech.len()];
    for (b, e) in ech.iter().enumerate() {
        offset[b] = basis.len();
        // order rows by pivot for a canonical basis
        let mut rows: Vec<(usize, &Vec<u32>)> = e.pivots().iter().cloned().zip(e.rows()).collect();
        rows.sort_by_key(|r| r.0);
        for (_, row) in rows {
            let v: Vec<(u32, u32)> = row.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &c)| (a.members[b][i], c)).collect();
            basis.push(v);
            weights.push(a.block_keys[b].0.clone());
            aux.push(a.block_keys[b].1);
        }
    }
    let sorted_pivots: Vec<Vec<usize>> = ech
        .iter()
        .map(|e| {
            let mut v = e.pivots().to_vec();
            v.sort();
            v
        })
        .collect();
    let gens = PolyRep::gens_from(&a.shape, |key| {
        let cols = basis
            .iter()
            .map(|v| {
                let y = a.apply(key, v);
                if y.is_empty() {
                    return Vec::new();
                }
                let tb = a.block_of[y[0].0 as usize] as usize;
                let mut w = vec![0; a.members[tb].len()];
                for (i, c) in y {
                    w[a.local[i as usize] as usize] = c;
                }
                debug_assert!(ech[tb].contains(&w));
                sorted_pivots[tb]
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| w[c] != 0)
                    .map(|(k, &c)| ((offset[tb] + k) as u32, w[c]))
                    .collect()
            })
            .collect();
        Csc::from_columns(basis.len(), cols)
    });
    let rep = PolyRep::from_parts(p, a.shape.clone(), weights, aux, gens, expr);
    SubRep { rep, basis }
}

/// Smallest submodule containing the seed vectors (ambient coordinates).
pub fn submodule(a: &PolyRep, seeds: &[Vec<u32>]) -> SubRep {
    let ech = spin_blocks(a, seeds);
    restrict(a, &ech, format!("sub({})", a.expr))
}

/// Quotient by the submodule spanned by `sub` (which must be stable).
pub fn quotient(a: &PolyRep, sub: &[Vec<u32>]) -> Result<SubRep, RepError> {
    let p = a.p;
    let ech = spin_blocks(a, sub);
    let mut given = vec![0usize; ech.len()];
    {
        let mut probe: Vec<Echelon> = ech.iter().map(|e| Echelon::new(p, e.ambient())).collect();
        for s in sub {
            for (b, e) in probe.iter_mut().enumerate() {
                let v: Vec<u32> = a.members[b].iter().map(|&i| s[i as usize] % p.get()).collect();
                e.insert(&v);
            }
        }
        for (b, e) in probe.iter().enumerate() {
            given[b] = e.rank();
        }
    }
    if given.iter().zip(&ech).any(|(g, e)| *g != e.rank()) {
        return Err(RepError::Invalid("quotient by a non-stable subspace".into()));
    }
    // complement: non-pivot coordinates of each block
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    let mut aux = Vec::new();
    let mut qindex: Vec<Vec<Option<u32>>> = Vec::new();
    for (b, e) in ech.iter().enumerate() {
        let mut idx = vec![None; e.ambient()];
        for l in 0..e.ambient() {
            if e.pivot_row_of(l).is_none() {
                idx[l] = Some(basis.len() as u32);
                basis.push(vec![(a.members[b][l], 1)]);
                weights.push(a.block_keys[b].0.clone());
                aux.push(a.block_keys[b].1);
            }
        }
        qindex.push(idx);
    }
    let gens = PolyRep::gens_from(&a.shape, |key| {
        let cols = basis
            .iter()
            .map(|v| {
                let y = a.apply(key, v);
                if y.is_empty() {
                    return Vec::new();
                }
                let tb = a.block_of[y[0].0 as usize] as usize;
                let mut w = vec![0; a.members[tb].len()];
                for (i, c) in y {
                    w[a.local[i as usize] as usize] = c;
                }
                ech[tb].reduce(&mut w);
                let mut col: Vec<(u32, u32)> =
                    w.iter().enumerate().filter(|e| *e.1 != 0).map(|(l, &c)| (qindex[tb][l].expect("reduced"), c)).collect();
                col.sort();
                col
            })
            .collect();
        Csc::from_columns(basis.len(), cols)
    });
    let rep = PolyRep::from_parts(p, a.shape.clone(), weights, aux, gens, format!("quot({})", a.expr));
    Ok(SubRep { rep, basis })
}

/// Image of an equivariant map f: A → B, as a submodule of B.
pub fn image(f: &FpMatrix, a: &PolyRep, b: &PolyRep) -> Result<PolyRep, RepError> {
    a.check_map(b, f)?;
    let cols: Vec<Vec<u32>> = (0..f.cols()).map(|c| f.column(c)).collect();
    Ok(submodule(b, &cols).rep.with_expr(format!("image({}->{})", a.expr, b.expr)))
}

/// F∘Δ_n: a module over n equal factors viewed over one factor, generators acting by
/// the divided-power coproduct across the factors.
pub fn restrict_diagonal(a: &PolyRep) -> Result<PolyRep, RepError> {
    let m = *a.shape.factors.first().ok_or_else(|| RepError::Shape("no factors".into()))?;
    if a.shape.factors.iter().any(|&x| x != m) {
        return Err(RepError::Shape(format!("diagonal needs equal factors, got {:?}", a.shape.factors)));
    }
    let p = a.p;
    let total: u32 = a.shape.degrees.iter().sum();
    let shape = GroupShape::new(vec![m], vec![total]);
    let weights = a
        .weights
        .iter()
        .map(|w| MultiWeight::single(w.factors().iter().fold(Weight::zero(m), |acc, x| acc.add(x))))
        .collect();
    let nf = a.shape.n();
    let gens = PolyRep::gens_from(&shape, |key| {
        // Σ over k_1 + … + k_n = k of Π_f g_{f}^{(k_f)}
        let splits = crate::combinatorics::compositions(key.k, nf);
        let cols = (0..a.dim())
            .map(|j| {
                let mut acc = Vec::new();
                for sp in &splits {
                    let mut v = vec![(j as u32, 1)];
                    for (f, &kf) in sp.parts().iter().enumerate() {
                        if kf > 0 {
                            v = a.apply(GenKey { factor: f, k: kf, ..key }, &v);
                        }
                        if v.is_empty() {
                            break;
                        }
                    }
                    acc.extend(v);
                }
                merge(p, &mut acc);
                acc
            })
            .collect();
        Csc::from_columns(a.dim(), cols)
    });
    Ok(PolyRep::from_parts(p, shape, weights, a.aux.clone(), gens, format!("diag({})", a.expr)))
}

/// F∘⊞^n: a one-factor module evaluated at k^{m_1} ⊕ … ⊕ k^{m_n}, split by multidegree.
/// Only the roots inside each summand act; the components are modules over GL_{m_1} × … × GL_{m_n}.
pub fn restrict_to_sum(a: &PolyRep, dims: &[usize]) -> Result<BTreeMap<Vec<u32>, PolyRep>, RepError> {
    if a.shape.n() != 1 || dims.iter().sum::<usize>() != a.shape.factors[0] {
        return Err(RepError::Shape(format!("cannot split {:?} as {:?}", a.shape.factors, dims)));
    }
    let mut offs = vec![0usize];
    for &m in dims {
        offs.push(offs.last().unwrap() + m);
    }
    let split = |w: &MultiWeight| -> MultiWeight {
        MultiWeight((0..dims.len()).map(|i| Weight(w.factors()[0].parts()[offs[i]..offs[i + 1]].to_vec())).collect())
    };
    let mut comps: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for i in 0..a.dim() {
        comps.entry(split(&a.weights[i]).degrees()).or_default().push(i);
    }
    let mut out = BTreeMap::new();
    for (deg, members) in comps {
        let shape = GroupShape::new(dims.to_vec(), deg.clone());
        let pos: HashMap<usize, u32> = members.iter().enumerate().map(|(l, &i)| (i, l as u32)).collect();
        let gens = PolyRep::gens_from(&shape, |key| {
            let big = GenKey { factor: 0, root: offs[key.factor] + key.root, ..key };
            let g = a.gen_csc(big);
            let cols = members
                .iter()
                .map(|&j| g.col(j).iter().map(|&(r, v)| (pos[&(r as usize)], v)).collect())
                .collect();
            Csc::from_columns(members.len(), cols)
        });
        let weights = members.iter().map(|&i| split(&a.weights[i])).collect();
        let aux = members.iter().map(|&i| a.aux[i]).collect();
        let rep = PolyRep::from_parts(a.p, shape, weights, aux, gens, format!("({}) o sum{:?}", a.expr, deg));
        out.insert(deg, rep);
    }
    Ok(out)
}

/// Versioned JSON form of a module.
#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct PolyRepJson {
    pub schema: String,
    pub p: u32,
    pub shape: GroupShape,
    pub dim: usize,
    pub weights: Vec<MultiWeight>,
    pub aux_degrees: Vec<i64>,
    pub generators: Vec<GeneratorJson>,
    pub expr: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct GeneratorJson {
    pub factor: usize,
    pub root: usize,
    pub k: u32,
    pub kind: GenKind,
    /// (row, col, value) triplets
    pub entries: Vec<(u32, u32, u32)>,
}

pub const POLYREP_SCHEMA: &str = "spf.polyrep/1";

impl PolyRep {
    pub fn to_json_value(&self) -> PolyRepJson {
        let generators = self
            .generator_keys()
            .into_iter()
            .zip(&self.gens)
            .filter(|(_, g)| !g.is_zero())
            .map(|(key, g)| {
                let mut entries = Vec::with_capacity(g.nnz());
                for j in 0..g.cols() {
                    for &(r, v) in g.col(j) {
                        entries.push((r, j as u32, v));
                    }
                }
                entries.sort();
                GeneratorJson { factor: key.factor, root: key.root, k: key.k, kind: key.kind, entries }
            })
            .collect();
        PolyRepJson {
            schema: POLYREP_SCHEMA.into(),
            p: self.p.get(),
            shape: self.shape.clone(),
            dim: self.dim(),
            weights: self.weights.clone(),
            aux_degrees: self.aux.clone(),
            generators,
            expr: self.expr.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<PolyRep, RepError> {
        let j: PolyRepJson = serde_json::from_str(s).map_err(|e| RepError::Format(e.to_string()))?;
        if j.schema != POLYREP_SCHEMA {
            return Err(RepError::Format(format!("unknown schema {}", j.schema)));
        }
        let p = Prime::new(j.p).map_err(|e| RepError::Format(e.to_string()))?;
        if j.weights.len() != j.dim || j.aux_degrees.len() != j.dim {
            return Err(RepError::Format("dimension does not match weights".into()));
        }
        if j.shape.factors.len() != j.shape.degrees.len() || j.shape.factors.is_empty() {
            return Err(RepError::Format("bad shape".into()));
        }
        let keys = gen_keys(&j.shape);
        let mut gens = vec![Csc::zero(j.dim, j.dim); keys.len()];
        for g in j.generators {
            let key = GenKey { factor: g.factor, root: g.root, k: g.k, kind: g.kind };
            let pos = keys.iter().position(|k| *k == key).ok_or_else(|| RepError::Format(format!("unexpected generator {key:?}")))?;
            let mut cols = vec![Vec::new(); j.dim];
            for (r, c, v) in g.entries {
                if r as usize >= j.dim || c as usize >= j.dim || v >= p.get() {
                    return Err(RepError::Format("entry out of range".into()));
                }
                cols[c as usize].push((r, v));
            }
            for c in cols.iter_mut() {
                merge(p, c);
            }
            gens[pos] = Csc::from_columns(j.dim, cols);
        }
        Ok(PolyRep::from_parts(p, j.shape, j.weights, j.aux_degrees, gens, j.expr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{compositions, weight_space_dim_oracle, OracleKind};

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn vec_of(n: usize, entries: &[(usize, u32)]) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = entries.iter().map(|&(i, c)| (i as u32, c)).collect();
        v.sort();
        let _ = n;
        v
    }

    #[test]
    fn standard_examples() {
        let s1 = standard(pr(3), 1);
        assert_eq!(s1.dim(), 1);
        assert!(s1.generator_keys().is_empty());
        let s2 = standard(pr(3), 2);
        assert_eq!(s2.apply(GenKey::e(0, 0, 1), &[(1, 1)]), vec![(0, 1)]);
        assert!(s2.apply(GenKey::e(0, 0, 1), &[(0, 1)]).is_empty());
        let s3 = standard(pr(5), 3);
        let ws: Vec<Vec<u32>> = s3.weights().iter().map(|w| w.0[0].0.clone()).collect();
        assert_eq!(ws, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        s3.validate().unwrap();
    }

    #[test]
    fn multiplicity_examples() {
        let p2 = pr(2);
        let a = multiplicity_standard(p2, &GradedSpace::trivial(1), 3).unwrap();
        assert_eq!(a, standard(p2, 3));
        let e1 = multiplicity_standard(p2, &GradedSpace::e_r(p2, 1), 2).unwrap();
        assert_eq!(e1.dim(), 4);
        assert_eq!(e1.aux_degrees(), &[0, 0, 2, 2]);
        let e3 = multiplicity_standard(pr(3), &GradedSpace::e_r(pr(3), 1), 1).unwrap();
        assert_eq!(e3.aux_degrees(), &[0, 2, 4]);
        assert_eq!(multiplicity_standard(p2, &GradedSpace::trivial(0), 2), Err(RepError::EmptySpace));
    }

    #[test]
    fn tensor_examples() {
        let p = pr(3);
        let s2 = standard(p, 2);
        let t = tensor(&s2, &s2).unwrap();
        assert_eq!(t.dim(), 4);
        // e_2⊗e_2 is index 3; e_1⊗e_2 = 1, e_2⊗e_1 = 2
        assert_eq!(t.apply(GenKey::e(0, 0, 1), &[(3, 1)]), vec_of(4, &[(1, 1), (2, 1)]));
        t.validate().unwrap();
        let u = unit(p, &[2]);
        assert_eq!(tensor(&s2, &u).unwrap().gens(), s2.gens());
        let s3 = standard(p, 3);
        let t2 = tensor(&s3, &s3).unwrap();
        assert_eq!(tensor(&t2, &s3).unwrap().dim(), 27);
        assert!(tensor(&s2, &s3).is_err());
    }

    #[test]
    fn boxtimes_examples() {
        let p = pr(2);
        let b = boxtimes(&standard(p, 2), &standard(p, 3)).unwrap();
        assert_eq!(b.shape().factors, vec![2, 3]);
        assert_eq!(b.dim(), 6);
        // e_1⊗e_2 has index 0*3+1
        assert_eq!(b.weight(1), &MultiWeight(vec![Weight(vec![1, 0]), Weight(vec![0, 1, 0])]));
        b.validate().unwrap();
        assert_eq!(boxtimes(&standard(p, 1), &standard(p, 1)).unwrap().dim(), 1);
    }

    #[test]
    fn divided_power_examples() {
        let p = pr(3);
        let g = divided_power(&standard(p, 2), 2);
        assert_eq!(g.dim(), 3);
        let ws: Vec<Vec<u32>> = g.weights().iter().map(|w| w.0[0].0.clone()).collect();
        assert_eq!(ws, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        g.validate().unwrap();
        assert_eq!(divided_power(&standard(p, 2), 0).dim(), 1);
        let l = exterior_power(&standard(p, 4), 2);
        assert_eq!(l.dim(), 6);
        assert_eq!(divided_power(&l, 3).dim(), 56);
    }

    #[test]
    fn symmetric_and_exterior_examples() {
        for p in [2, 3] {
            let p = pr(p);
            let s = symmetric_power(&standard(p, 3), 1);
            assert_eq!(s.gens(), standard(p, 3).gens());
            assert_eq!(symmetric_power(&standard(p, 3), 2).dim(), 6);
            assert_eq!(exterior_power(&standard(p, 3), 2).dim(), 3);
            assert_eq!(exterior_power(&standard(p, 2), 3).dim(), 0);
            let mut ws: Vec<Vec<u32>> = exterior_power(&standard(p, 3), 2).weights().iter().map(|w| w.0[0].0.clone()).collect();
            ws.sort();
            assert_eq!(ws, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        }
        // composite S² → Γ² at p = 2 has rank m(m−1)/2
        for m in 2..=4 {
            let n = symmetrization_map(&standard(pr(2), m), 2);
            assert_eq!(n.rank(), m * (m - 1) / 2);
        }
    }

    #[test]
    fn constructors_validate() {
        for p in [2, 3, 5] {
            let p = pr(p);
            let s = standard(p, 3);
            symmetric_power(&s, 3).validate().unwrap();
            divided_power(&s, 3).validate().unwrap();
            exterior_power(&s, 2).validate().unwrap();
            exterior_power(&s, 3).validate().unwrap();
            frobenius_twist(&s, 1).validate().unwrap();
            frobenius_twist(&symmetric_power(&standard(p, 2), 2), 1).validate().unwrap();
            kuhn_dual(&symmetric_power(&s, 2)).validate().unwrap();
            divided_power(&exterior_power(&s, 2), 2).validate().unwrap();
        }
    }

    #[test]
    fn twist_examples() {
        let p = pr(2);
        let s = standard(p, 2);
        assert_eq!(frobenius_twist(&s, 0), s);
        let t = frobenius_twist(&s, 1);
        let ws: Vec<Vec<u32>> = t.weights().iter().map(|w| w.0[0].0.clone()).collect();
        assert_eq!(ws, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(t.e(0, 0, 2), s.e(0, 0, 1));
        assert!(t.e(0, 0, 1).is_zero());
    }

    #[test]
    fn kuhn_dual_examples() {
        let p = pr(3);
        let a = with_multiplicity(&symmetric_power(&standard(p, 2), 2), &GradedSpace::e_r(p, 1)).unwrap();
        assert_eq!(kuhn_dual(&kuhn_dual(&a)), a);
        let s = symmetric_power(&standard(p, 2), 2);
        assert_eq!(kuhn_dual(&s).weight_dims(), divided_power(&standard(p, 2), 2).weight_dims());
        let l = exterior_power(&standard(p, 3), 2);
        assert_eq!(kuhn_dual(&l).weight_dims(), l.weight_dims());
        assert_eq!(kuhn_dual(&a).aux_dims().keys().cloned().collect::<Vec<_>>(), vec![-4, -2, 0]);
    }

    #[test]
    fn submodule_examples() {
        let p = pr(2);
        let s2 = standard(p, 2);
        let t = tensor(&s2, &s2).unwrap();
        let sub = submodule(&t, &[vec![1, 0, 0, 0]]);
        assert_eq!(sub.rep.dim(), 3);
        sub.rep.validate().unwrap();
        let all: Vec<Vec<u32>> = (0..4).map(|i| (0..4).map(|j| (i == j) as u32).collect()).collect();
        assert_eq!(quotient(&t, &all).unwrap().rep.dim(), 0);
        let span: Vec<Vec<u32>> = sub.basis.iter().map(|v| {
            let mut d = vec![0; 4];
            v.iter().for_each(|&(i, c)| d[i as usize] = c);
            d
        }).collect();
        let q = quotient(&t, &span).unwrap();
        assert_eq!(q.rep.dim(), 1);
        q.rep.validate().unwrap();
        let d = direct_sum(&t, &s2.clone());
        assert!(d.is_err());
        assert_eq!(direct_sum(&t, &t).unwrap().dim(), 8);
        assert!(quotient(&t, &[vec![1, 0, 0, 0]]).is_err());
    }

    #[test]
    fn structure_maps() {
        let p = pr(3);
        let s2 = standard(p, 2);
        let g2 = divided_power(&s2, 2);
        let g1 = divided_power(&s2, 1);
        let t = tensor(&g1, &g1).unwrap();
        let delta = comultiplication_map(1, 1, &s2);
        assert!(g2.is_equivariant(&t, &delta));
        // γ_2(e_1) is the first basis vector, e_1⊗e_1 the first tensor basis vector
        assert_eq!(delta.column(0), vec![1, 0, 0, 0]);
        let m = multiplication_map(&[1, 1], &s2);
        assert!(t.is_equivariant(&g2, &m));
        let md = m.mul(&delta).unwrap();
        assert_eq!(md, FpMatrix::identity(p, 3).scale(2));
        let p2 = pr(2);
        let md2 = multiplication_map(&[1, 1], &standard(p2, 2)).mul(&comultiplication_map(1, 1, &standard(p2, 2))).unwrap();
        assert!(md2.is_zero());
        let d20 = comultiplication_map(2, 0, &s2);
        assert_eq!(d20, FpMatrix::identity(p, 3));
        for pp in [2, 3] {
            let p = pr(pp);
            let a = symmetric_power(&standard(p, 2), 2);
            let pr_map = frobenius_projection(&a, 1);
            assert!(divided_power(&a, pp).is_equivariant(&frobenius_twist(&a, 1), &pr_map));
        }
    }

    #[test]
    fn oracle_agreement_small() {
        for p in [2, 3] {
            let p = pr(p);
            for m in 1..=3 {
                for d in 0..=3u32 {
                    let s = standard(p, m);
                    let cases = [
                        (divided_power(&s, d), OracleKind::Gamma(vec![d])),
                        (symmetric_power(&s, d), OracleKind::Sym(vec![d])),
                        (exterior_power(&s, d), OracleKind::Wedge(vec![d])),
                        (tensor_power(&s, d).unwrap(), OracleKind::Tensor(d)),
                    ];
                    for (rep, kind) in cases {
                        let dims = rep.weight_dims();
                        for w in compositions(d, m) {
                            let want = weight_space_dim_oracle(&kind, &w).unwrap() as usize;
                            let got = dims.get(&MultiWeight::single(w.clone())).cloned().unwrap_or(0);
                            assert_eq!(got, want, "{kind:?} at {w}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = pr(3);
        let a = with_multiplicity(&divided_power(&standard(p, 2), 2), &GradedSpace::e_r(p, 1)).unwrap();
        let s = a.to_json();
        let b = PolyRep::from_json(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_json(), s);
        assert!(PolyRep::from_json("{}").is_err());
    }

    #[test]
    fn diagonal_of_box_is_tensor() {
        let p = Prime::new(3).unwrap();
        let v = standard(p, 3);
        let (a, b) = (symmetric_power(&v, 2), exterior_power(&v, 2));
        let d = restrict_diagonal(&boxtimes(&a, &b).unwrap()).unwrap();
        d.validate().unwrap();
        assert!(d == tensor(&a, &b).unwrap());
        let bb = boxtimes(&v, &v).unwrap();
        assert!(restrict_diagonal(&bb).unwrap() == tensor_power(&v, 2).unwrap());
    }

    #[test]
    fn sum_restriction_splits_by_degree() {
        for (p, m) in [(2, 2), (3, 3)] {
            let p = Prime::new(p).unwrap();
            let s2 = symmetric_power(&standard(p, 2 * m), 2);
            let parts = restrict_to_sum(&s2, &[m, m]).unwrap();
            let dims: Vec<(Vec<u32>, usize)> = parts.iter().map(|(k, r)| (k.clone(), r.dim())).collect();
            let sm = m * (m + 1) / 2;
            assert_eq!(dims, vec![(vec![0, 2], sm), (vec![1, 1], m * m), (vec![2, 0], sm)]);
            for r in parts.values() {
                r.validate().unwrap();
            }
            // the mixed part is the exterior product of two standards
            let vv = boxtimes(&standard(p, m), &standard(p, m)).unwrap();
            let h = crate::hom::hom_space(&parts[&vec![1, 1]], &vv).unwrap();
            assert_eq!(h.dim(), 1);
        }
    }
}
