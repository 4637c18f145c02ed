//! Projective resolutions by sums of Γ^μ, computed in Yoneda coordinates: a layer is a list of
//! dominant weights, differentials are margin combinations, kernels are taken weight by weight.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::combinatorics::{dominant_multiweights, MultiWeight};
use crate::field::{column_kernel, Echelon, FpMatrix, Prime};
use crate::polyrep::{direct_sum, kuhn_dual, with_multiplicity, zero_rep, GradedSpace, GroupShape, PolyRep, RepError};
use crate::schur::SchurCtx;
use crate::yoneda::{gamma_rep, GammaIndex, TreeCache};

#[derive(Debug, Error)]
pub enum HomalgError {
    #[error("resource guard: layer {layer} needs {dim} basis vectors (bound {bound})")]
    Guard { layer: usize, dim: usize, bound: usize },
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// bound on Σ_κ dim Hom(Γ^κ, P_i) over dominant κ
    pub max_layer_dim: usize,
    pub prune: bool,
    pub side: ResolveSide,
    /// seeds the sampling used while choosing generators; tables do not depend on it
    pub seed: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { max_layer_dim: 200_000, prune: true, side: ResolveSide::Auto, seed: 0x5eed }
    }
}

/// Which argument of Ext(A, B) gets resolved: A itself, or B♯ via Ext(A,B) ≅ Ext(B♯,A♯).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolveSide {
    /// the smaller of A and B
    Auto,
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub weight: MultiWeight,
    pub aux: i64,
}

/// Sparse combination over a margin basis.
pub type Combo = Vec<(u32, u32)>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Resolution {
    pub p: Prime,
    pub dims: Vec<usize>,
    pub degrees: Vec<u32>,
    pub expr: String,
    pub layers: Vec<Vec<Summand>>,
    /// image of γ^{μ_s} in M for each summand of P_0
    pub augmentation: Vec<Vec<(u32, u32)>>,
    /// differentials[i] is d_{i+1}: P_{i+1} → P_i; entry [s] lists (t, combination in Hom(Γ^{μ_s}, Γ^{μ_t}))
    pub differentials: Vec<Vec<Vec<(u32, Combo)>>>,
    /// the kernel of the last computed differential vanished
    pub terminated: bool,
    /// Σ_κ dim Hom(Γ^κ, P_i) over dominant κ
    pub working_dims: Vec<usize>,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn layer(&self, i: usize) -> &[Summand] {
        self.layers.get(i).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Summed dimension of the realized layer Σ_s dim Γ^{μ_s}(k^m).
    pub fn realized_dim(&self, i: usize) -> u128 {
        self.layer(i)
            .iter()
            .map(|s| {
                s.weight
                    .factors()
                    .iter()
                    .zip(&self.dims)
                    .map(|(w, &m)| w.parts().iter().map(|&x| crate::combinatorics::binomial(x as u64 + m as u64 - 1, x as u64)).product::<u128>())
                    .product::<u128>()
            })
            .sum()
    }
}

/// Cohomology dimensions indexed by (cohomological degree, aux degree).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtTable {
    pub entries: BTreeMap<(u32, i64), u64>,
}

#[derive(Serialize, Deserialize)]
struct ExtEntry {
    degree: u32,
    aux: i64,
    dim: u64,
}

impl Serialize for ExtTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<ExtEntry> = self.entries.iter().map(|(&(degree, aux), &dim)| ExtEntry { degree, aux, dim }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<ExtEntry> = Vec::deserialize(d)?;
        Ok(ExtTable { entries: v.into_iter().filter(|e| e.dim > 0).map(|e| ((e.degree, e.aux), e.dim)).collect() })
    }
}

impl ExtTable {
    pub fn add(&mut self, degree: u32, aux: i64, dim: u64) {
        if dim > 0 {
            *self.entries.entry((degree, aux)).or_insert(0) += dim;
        }
    }

    /// Dimensions per cohomological degree, summed over aux degrees.
    pub fn by_degree(&self) -> BTreeMap<u32, u64> {
        let mut m = BTreeMap::new();
        for (&(d, _), &n) in &self.entries {
            *m.entry(d).or_insert(0) += n;
        }
        m
    }

    /// Fold the aux grading into the cohomological degree: (i, a) ↦ i + a.
    pub fn folded(&self) -> BTreeMap<i64, u64> {
        let mut m = BTreeMap::new();
        for (&(d, a), &n) in &self.entries {
            *m.entry(d as i64 + a).or_insert(0) += n;
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn degree(&self, d: u32) -> u64 {
        self.entries.iter().filter(|e| e.0 .0 == d).map(|e| e.1).sum()
    }

    /// Graded tensor product (convolution over both gradings).
    pub fn convolve(&self, o: &ExtTable) -> ExtTable {
        let mut t = ExtTable::default();
        for (&(d1, a1), &n1) in &self.entries {
            for (&(d2, a2), &n2) in &o.entries {
                t.add(d1 + d2, a1 + a2, n1 * n2);
            }
        }
        t
    }

    /// Keep only degrees ≤ max.
    pub fn truncate(&self, max: u32) -> ExtTable {
        ExtTable { entries: self.entries.iter().filter(|e| e.0 .0 <= max).map(|(k, v)| (*k, *v)).collect() }
    }
}

/// Shared state for resolutions and Hom-complex evaluation at fixed (p, evaluation dims, degrees).
pub struct Engine {
    pub p: Prime,
    pub dims: Vec<usize>,
    pub degrees: Vec<u32>,
    pub ctx: SchurCtx,
    pub trees: TreeCache,
    pub kappas: Vec<MultiWeight>,
    pub opts: EngineOptions,
}

/// Per-generator images: [κ index] → one vector per margin in Hom(Γ^κ, Γ^{μ_gen}), in target coordinates.
type Images = Vec<Vec<Vec<(u32, u32)>>>;

struct Gen {
    kappa: usize,
    aux: i64,
    vector: Vec<(u32, u32)>,
    images: Images,
}

impl Engine {
    pub fn new(p: Prime, dims: &[usize], degrees: &[u32], opts: EngineOptions) -> Self {
        Engine {
            p,
            dims: dims.to_vec(),
            degrees: degrees.to_vec(),
            ctx: SchurCtx::new(p, dims),
            trees: TreeCache::default(),
            kappas: dominant_multiweights(degrees, dims),
            opts,
        }
    }

    pub fn for_rep(m: &PolyRep, opts: EngineOptions) -> Self {
        Engine::new(m.prime(), &m.shape().factors, &m.shape().degrees, opts)
    }

    /// Offsets of the summands with the given aux degree in Hom(Γ^κ, P), and the total.
    fn offsets(&mut self, layer: &[Summand], kappa: &MultiWeight, aux: i64) -> (Vec<Option<usize>>, usize) {
        let mut off = Vec::with_capacity(layer.len());
        let mut total = 0;
        for s in layer {
            if s.aux == aux {
                off.push(Some(total));
                total += self.ctx.space(&s.weight, kappa).len();
            } else {
                off.push(None);
            }
        }
        (off, total)
    }

    fn working_dim(&mut self, layer: &[Summand]) -> usize {
        let kappas = self.kappas.clone();
        let mut t = 0;
        for s in layer {
            for k in &kappas {
                t += self.ctx.space(&s.weight, k).len();
            }
        }
        t
    }

    /// Images of a Yoneda generator v ∈ M_κ at every dominant weight, in local block coordinates of M.
    fn module_images(&mut self, m: &PolyRep, kappa: &MultiWeight, aux: i64, v: &[(u32, u32)]) -> Images {
        let kappas = self.kappas.clone();
        let tree = self.trees.get(self.p, &self.dims, kappa);
        let blocks: Vec<usize> = kappas.iter().map(|k| tree.block_of_weight(k).expect("all weights occur")).collect();
        let out = tree.evaluate(m, &[v.to_vec()], &blocks);
        let mut images = Vec::with_capacity(kappas.len());
        for (ki, k) in kappas.iter().enumerate() {
            let space = self.ctx.space(kappa, k);
            let mblock = m.find_block(&(k.clone(), aux));
            let tree = self.trees.get(self.p, &self.dims, kappa);
            let mut vecs = Vec::with_capacity(space.len());
            for b in &space.basis {
                let (_, x) = tree.locate(b);
                let w = &out[ki][x][0];
                let mut loc: Vec<(u32, u32)> = match mblock {
                    Some(_) => w.iter().map(|&(i, c)| (m.local_index(i as usize) as u32, c)).collect(),
                    None => {
                        debug_assert!(w.is_empty());
                        Vec::new()
                    }
                };
                loc.sort();
                vecs.push(loc);
            }
            images.push(vecs);
        }
        images
    }

    /// Images of a layer generator g ∈ Hom(Γ^κ, P_i) under precomposition with every ξ_b.
    fn layer_images(&mut self, layer: &[Summand], kappa_idx: usize, aux: i64, g: &[(u32, u32)]) -> Images {
        let kappas = self.kappas.clone();
        let kappa = &kappas[kappa_idx];
        let (off_src, _) = self.offsets(layer, kappa, aux);
        let parts = split_by_summand(&off_src, g);
        let mut images = Vec::with_capacity(kappas.len());
        for k in &kappas {
            let (off_dst, _) = self.offsets(layer, k, aux);
            let sb = self.ctx.space(kappa, k);
            let mut vecs = Vec::with_capacity(sb.len());
            for bi in 0..sb.len() as u32 {
                let mut col = Vec::new();
                for (t, combo) in &parts {
                    let st = self.ctx.space(&layer[*t].weight, kappa);
                    let out = self.ctx.space(&layer[*t].weight, k);
                    let r = self.ctx.compose_combo(&st, combo, &sb, &[(bi, 1)], &out);
                    let o = off_dst[*t].expect("same aux") as u32;
                    col.extend(r.into_iter().map(|(i, c)| (i + o, c)));
                }
                col.sort();
                vecs.push(col);
            }
            images.push(vecs);
        }
        images
    }

    /// Greedy top-down choice of generators for the subspaces `kernel[(κ, aux)]`, then pruning.
    fn choose_generators<F>(&mut self, kernel: &BTreeMap<(usize, i64), (usize, Vec<Vec<(u32, u32)>>)>, coords: &BTreeMap<(usize, i64), Coords>, mut images_of: F) -> Vec<Gen>
    where
        F: FnMut(&mut Engine, usize, i64, &[(u32, u32)]) -> Images,
    {
        let p = self.p;
        let mut rng = StdRng::seed_from_u64(self.opts.seed);
        let mut gens: Vec<Gen> = Vec::new();
        for (&(ki, aux), (_, basis)) in kernel {
            if basis.is_empty() {
                continue;
            }
            let c = &coords[&(ki, aux)];
            let mut ech = Echelon::new(p, c.len());
            let old: Vec<&Vec<(u32, u32)>> = gens.iter().filter(|g| g.aux == aux).flat_map(|g| g.images[ki].iter()).collect();
            span_into(&mut ech, &old, c, &mut rng);
            for v in basis {
                if ech.is_full() {
                    break;
                }
                let dv = c.project(v);
                if ech.contains(&dv) {
                    continue;
                }
                let images = images_of(self, ki, aux, v);
                for w in &images[ki] {
                    if ech.is_full() {
                        break;
                    }
                    ech.insert(&c.project(w));
                }
                gens.push(Gen { kappa: ki, aux, vector: v.clone(), images });
            }
        }
        if self.opts.prune {
            // per block: span of the other blocks' generators, then leave-one-out inside the block
            let mut alive = vec![true; gens.len()];
            let blocks: BTreeSet<(usize, i64)> = gens.iter().map(|g| (g.kappa, g.aux)).collect();
            for (ki, aux) in blocks {
                let c = &coords[&(ki, aux)];
                let mut base = Echelon::new(p, c.len());
                let others: Vec<&Vec<(u32, u32)>> =
                    gens.iter().enumerate().filter(|(k, g)| alive[*k] && g.aux == aux && g.kappa != ki).flat_map(|(_, g)| g.images[ki].iter()).collect();
                span_into(&mut base, &others, c, &mut rng);
                let members: Vec<usize> = (0..gens.len()).filter(|&k| gens[k].kappa == ki && gens[k].aux == aux).collect();
                for &j in &members {
                    let mut ech = base.clone();
                    let rest: Vec<&Vec<(u32, u32)>> = members.iter().filter(|&&k| k != j && alive[k]).flat_map(|&k| gens[k].images[ki].iter()).collect();
                    span_into(&mut ech, &rest, c, &mut rng);
                    if ech.contains(&c.project(&gens[j].vector)) {
                        alive[j] = false;
                    }
                }
            }
            let mut k = 0;
            gens.retain(|_| {
                k += 1;
                alive[k - 1]
            });
        }
        gens
    }

    /// Kernel of the map whose columns at (κ, aux) are the generators' images.
    fn kernels(
        &mut self,
        gens: &[Gen],
        target_dim: &dyn Fn(&mut Engine, usize, i64) -> usize,
        expected_rank: &dyn Fn(usize, i64) -> usize,
        proj: Option<&BTreeMap<(usize, i64), Coords>>,
    ) -> Result<BTreeMap<(usize, i64), (usize, Vec<Vec<(u32, u32)>>)>, HomalgError> {
        let auxes: BTreeSet<i64> = gens.iter().map(|g| g.aux).collect();
        let mut out = BTreeMap::new();
        for ki in 0..self.kappas.len() {
            for &aux in &auxes {
                let mut cols: Vec<Vec<(u32, u32)>> = gens.iter().filter(|g| g.aux == aux).flat_map(|g| g.images[ki].iter().cloned()).collect();
                let mut n = target_dim(self, ki, aux);
                // images lie in the previous kernel, on which its coordinates are injective
                if let Some(proj) = proj {
                    match proj.get(&(ki, aux)) {
                        Some(c) => {
                            cols = cols.iter().map(|v| c.project_sparse(v)).collect();
                            n = c.len();
                        }
                        None => {
                            cols.iter_mut().for_each(|v| v.clear());
                            n = 0;
                        }
                    }
                }
                let (rank, ker) = column_kernel(self.p, n, &cols);
                if rank != expected_rank(ki, aux) {
                    return Err(HomalgError::Internal(format!("layer does not cover weight {} aux {}", self.kappas[ki], aux)));
                }
                out.insert((ki, aux), (cols.len(), ker));
            }
        }
        Ok(out)
    }

    /// Resolve M through P_length.
    pub fn resolve(&mut self, m: &PolyRep, length: usize) -> Result<Resolution, HomalgError> {
        if m.shape().factors != self.dims || m.shape().degrees != self.degrees {
            return Err(HomalgError::Shape("module does not match the engine".into()));
        }
        let p = self.p;
        let mut res = Resolution {
            p,
            dims: self.dims.clone(),
            degrees: self.degrees.clone(),
            expr: m.expr().to_string(),
            layers: Vec::new(),
            augmentation: Vec::new(),
            differentials: Vec::new(),
            terminated: false,
            working_dims: Vec::new(),
        };
        // weight blocks of M at dominant κ
        let auxes: BTreeSet<i64> = m.aux_degrees().iter().cloned().collect();
        let mut top: BTreeMap<(usize, i64), (usize, Vec<Vec<(u32, u32)>>)> = BTreeMap::new();
        for (ki, k) in self.kappas.clone().iter().enumerate() {
            for &aux in &auxes {
                if let Some(b) = m.find_block(&(k.clone(), aux)) {
                    let n = m.block_members(b).len();
                    top.insert((ki, aux), (n, (0..n as u32).map(|l| vec![(l, 1)]).collect()));
                }
            }
        }
        let kappas = self.kappas.clone();
        let coords = coordinates(&top);
        let gens = self.choose_generators(&top, &coords, |e, ki, aux, v| {
            let b = m.find_block(&(kappas[ki].clone(), aux)).expect("block");
            let global: Vec<(u32, u32)> = v.iter().map(|&(l, c)| (m.block_members(b)[l as usize], c)).collect();
            e.module_images(m, &kappas[ki], aux, &global)
        });
        let layer0: Vec<Summand> = gens.iter().map(|g| Summand { weight: kappas[g.kappa].clone(), aux: g.aux }).collect();
        res.augmentation = gens
            .iter()
            .map(|g| {
                let b = m.find_block(&(kappas[g.kappa].clone(), g.aux)).expect("block");
                g.vector.iter().map(|&(l, c)| (m.block_members(b)[l as usize], c)).collect()
            })
            .collect();
        let wd = self.working_dim(&layer0);
        res.working_dims.push(wd);
        if wd > self.opts.max_layer_dim {
            return Err(HomalgError::Guard { layer: 0, dim: wd, bound: self.opts.max_layer_dim });
        }
        res.layers.push(layer0);
        if length == 0 && m.dim() == 0 {
            res.terminated = true;
            return Ok(res);
        }
        let mdims = |_: &mut Engine, ki: usize, aux: i64| m.find_block(&(kappas[ki].clone(), aux)).map(|b| m.block_members(b).len()).unwrap_or(0);
        let mdims2 = |ki: usize, aux: i64| m.find_block(&(kappas[ki].clone(), aux)).map(|b| m.block_members(b).len()).unwrap_or(0);
        let mut kernel = self.kernels(&gens, &mdims, &mdims2, None)?;
        for i in 1..=length {
            if kernel.values().all(|(_, k)| k.is_empty()) {
                res.terminated = true;
                break;
            }
            let prev = res.layers[i - 1].clone();
            let coords = coordinates(&kernel);
            let gens = self.choose_generators(&kernel, &coords, |e, ki, aux, v| e.layer_images(&prev, ki, aux, v));
            let layer: Vec<Summand> = gens.iter().map(|g| Summand { weight: kappas[g.kappa].clone(), aux: g.aux }).collect();
            let wd = self.working_dim(&layer);
            res.working_dims.push(wd);
            if wd > self.opts.max_layer_dim {
                return Err(HomalgError::Guard { layer: i, dim: wd, bound: self.opts.max_layer_dim });
            }
            let mut d = Vec::with_capacity(gens.len());
            for g in &gens {
                let (off, _) = self.offsets(&prev, &kappas[g.kappa], g.aux);
                d.push(split_by_summand(&off, &g.vector).into_iter().map(|(t, c)| (t as u32, c)).collect());
            }
            res.differentials.push(d);
            res.layers.push(layer);
            if i < length {
                let prev2 = prev.clone();
                let kap = kappas.clone();
                let dims_of = move |e: &mut Engine, ki: usize, aux: i64| e.offsets(&prev2, &kap[ki], aux).1;
                let prevk: BTreeMap<(usize, i64), usize> = kernel.iter().map(|(k, v)| (*k, v.1.len())).collect();
                kernel = self.kernels(&gens, &dims_of, &|ki, aux| prevk.get(&(ki, aux)).cloned().unwrap_or(0), Some(&coords))?;
            } else {
                // exactness at P_{i-1} is ensured by the covering; record whether P_i is the end
                let prev2 = prev.clone();
                let kap = kappas.clone();
                let dims_of = move |e: &mut Engine, ki: usize, aux: i64| e.offsets(&prev2, &kap[ki], aux).1;
                let prevk: BTreeMap<(usize, i64), usize> = kernel.iter().map(|(k, v)| (*k, v.1.len())).collect();
                let k = self.kernels(&gens, &dims_of, &|ki, aux| prevk.get(&(ki, aux)).cloned().unwrap_or(0), Some(&coords))?;
                res.terminated = k.values().all(|(_, k)| k.is_empty());
            }
        }
        Ok(res)
    }

    /// Ext^i(A, B) for i ≤ max_degree from a resolution of A through P_{max_degree+1}.
    pub fn ext_from_resolution(&mut self, res: &Resolution, b: &PolyRep, max_degree: usize) -> Result<ExtTable, HomalgError> {
        let p = self.p;
        if b.shape().factors != self.dims {
            return Err(HomalgError::Shape("target does not match the resolution".into()));
        }
        if b.shape().degrees != self.degrees {
            return Ok(ExtTable::default());
        }
        if res.length() < max_degree + 1 && !res.terminated {
            return Err(HomalgError::Internal("resolution too short".into()));
        }
        // C^i coordinates: per summand, the weight space of B
        let nlayers = (max_degree + 2).min(res.layers.len());
        let mut wspace: BTreeMap<MultiWeight, Vec<usize>> = BTreeMap::new();
        let mut coords: Vec<Vec<usize>> = Vec::new();
        for i in 0..nlayers {
            let mut offs = Vec::new();
            let mut t = 0;
            for s in res.layer(i) {
                offs.push(t);
                t += wspace.entry(s.weight.clone()).or_insert_with(|| b.weight_space(&s.weight)).len();
            }
            offs.push(t);
            coords.push(offs);
        }
        // δ^i: C^i → C^{i+1}, as columns indexed by C^i coordinates
        let mut ranks: Vec<BTreeMap<i64, usize>> = Vec::new();
        let mut grades: Vec<Vec<i64>> = Vec::new();
        for i in 0..nlayers {
            let mut g = Vec::new();
            for s in res.layer(i) {
                for &x in &wspace[&s.weight] {
                    g.push(b.aux_degree(x) - s.aux);
                }
            }
            grades.push(g);
        }
        for i in 0..nlayers.saturating_sub(1).min(max_degree + 1) {
            let src = res.layer(i);
            let diff = &res.differentials[i];
            let ncols = *coords[i].last().unwrap();
            let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ncols];
            // group differential entries by source summand s of P_i
            let mut by_s: BTreeMap<usize, Vec<(usize, &Combo)>> = BTreeMap::new();
            for (s2, entries) in diff.iter().enumerate() {
                for (t, c) in entries {
                    by_s.entry(*t as usize).or_default().push((s2, c));
                }
            }
            for (s, uses) in by_s {
                let mu = src[s].weight.clone();
                let basis = &wspace[&mu];
                if basis.is_empty() {
                    continue;
                }
                let vs: Vec<Vec<(u32, u32)>> = basis.iter().map(|&x| vec![(x as u32, 1)]).collect();
                let tgt_w: Vec<MultiWeight> = {
                    let set: BTreeSet<MultiWeight> = uses.iter().map(|(s2, _)| res.layers[i + 1][*s2].weight.clone()).collect();
                    set.into_iter().collect()
                };
                if tgt_w.iter().all(|w| wspace[w].is_empty()) {
                    continue;
                }
                let tree = self.trees.get(p, &self.dims, &mu);
                let blocks: Vec<usize> = tgt_w.iter().map(|w| tree.block_of_weight(w).expect("weight")).collect();
                let out = tree.evaluate(b, &vs, &blocks);
                for (s2, combo) in uses {
                    let w2 = &res.layers[i + 1][s2].weight;
                    let tw = tgt_w.binary_search(w2).unwrap();
                    let sp = self.ctx.space(&mu, w2);
                    let tree = self.trees.get(p, &self.dims, &mu);
                    let tgt_basis = &wspace[w2];
                    let off2 = coords[i + 1][s2];
                    for (vi, _) in basis.iter().enumerate() {
                        let mut acc: Vec<(u32, u32)> = Vec::new();
                        for &(a, c) in combo.iter() {
                            let (_, x) = tree.locate(&sp.basis[a as usize]);
                            acc.extend(out[tw][x][vi].iter().map(|&(r, z)| (r, p.mul(z, c))));
                        }
                        crate::polyrep::merge(p, &mut acc);
                        let col = &mut cols[coords[i][s] + vi];
                        for (r, z) in acc {
                            let pos = tgt_basis.binary_search(&(r as usize)).expect("image lies in the weight space");
                            col.push(((off2 + pos) as u32, z));
                        }
                    }
                }
            }
            // rank per aux shift
            let mut r = BTreeMap::new();
            let shifts: BTreeSet<i64> = grades[i].iter().cloned().collect();
            for &sh in &shifts {
                let sel: Vec<Vec<(u32, u32)>> =
                    cols.iter().enumerate().filter(|(c, _)| grades[i][*c] == sh).map(|(_, v)| { let mut v = v.clone(); crate::polyrep::merge(p, &mut v); v }).collect();
                let n = *coords[i + 1].last().unwrap();
                let (rank, _) = column_kernel(p, n, &sel);
                r.insert(sh, rank);
            }
            ranks.push(r);
        }
        let mut table = ExtTable::default();
        for i in 0..=max_degree.min(nlayers.saturating_sub(1)) {
            let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
            for &g in &grades[i] {
                *dims.entry(g).or_insert(0) += 1;
            }
            for (&sh, &n) in &dims {
                let out = ranks.get(i).and_then(|r| r.get(&sh)).cloned().unwrap_or(0);
                let inc = if i > 0 { ranks[i - 1].get(&sh).cloned().unwrap_or(0) } else { 0 };
                table.add(i as u32, sh, (n - out - inc) as u64);
            }
        }
        Ok(table)
    }

    /// Realize layer i as a module and d_i as a matrix (small cases; used in tests).
    pub fn realize(&mut self, res: &Resolution, m: &PolyRep) -> Result<RealizedResolution, HomalgError> {
        let p = self.p;
        let shape = GroupShape::new(self.dims.clone(), self.degrees.clone());
        let mut reps = Vec::new();
        let mut offsets = Vec::new();
        for layer in &res.layers {
            let mut r = zero_rep(p, &shape);
            let mut off = Vec::new();
            for s in layer {
                off.push(r.dim());
                let g = with_multiplicity(&gamma_rep(p, &self.dims, &s.weight), &GradedSpace::new([(s.aux, 1)].into_iter().collect()))?;
                r = direct_sum(&r, &g)?;
            }
            off.push(r.dim());
            reps.push(r);
            offsets.push(off);
        }
        let mut maps = Vec::new();
        for i in 0..res.layers.len() {
            let (tgt, images): (&PolyRep, Vec<Vec<(u32, u32)>>) = if i == 0 {
                (m, res.augmentation.clone())
            } else {
                let tl = &res.layers[i - 1];
                let imgs = res.differentials[i - 1]
                    .iter()
                    .enumerate()
                    .map(|(s, entries)| {
                        let mut v = Vec::new();
                        for (t, combo) in entries {
                            let t = *t as usize;
                            let sp = self.ctx.space(&tl[t].weight, &res.layers[i][s].weight);
                            let gi = GammaIndex::new(&self.dims, &tl[t].weight);
                            for &(a, c) in combo {
                                v.push(((offsets[i - 1][t] + gi.index(&sp.basis[a as usize])) as u32, c));
                            }
                        }
                        crate::polyrep::merge(p, &mut v);
                        v
                    })
                    .collect();
                (&reps[i - 1], imgs)
            };
            let mut trips = Vec::new();
            for (s, summand) in res.layers[i].iter().enumerate() {
                let tree = self.trees.get(p, &self.dims, &summand.weight);
                let nb = tree.rep().blocks().len();
                let blocks: Vec<usize> = (0..nb).collect();
                let out = tree.evaluate(tgt, &[images[s].clone()], &blocks);
                let tree = self.trees.get(p, &self.dims, &summand.weight);
                for b in 0..nb {
                    for (x, &glob) in tree.rep().block_members(b).iter().enumerate() {
                        for &(r, c) in &out[b][x][0] {
                            trips.push((r as usize, offsets[i][s] + glob as usize, c));
                        }
                    }
                }
            }
            maps.push(FpMatrix::from_triplets(p, tgt.dim(), reps[i].dim(), &trips));
        }
        Ok(RealizedResolution { layers: reps, maps })
    }
}

/// Layers as modules; maps[0] is the augmentation P_0 → M, maps[i] is d_i.
pub struct RealizedResolution {
    pub layers: Vec<PolyRep>,
    pub maps: Vec<FpMatrix>,
}

fn coordinates(kernel: &BTreeMap<(usize, i64), (usize, Vec<Vec<(u32, u32)>>)>) -> BTreeMap<(usize, i64), Coords> {
    kernel.iter().map(|(k, (dim, basis))| (*k, Coords::new(*dim, basis))).collect()
}

/// Coordinates on a subspace given by a basis whose last nonzero indices are distinct:
/// restricting to those indices is injective on the span.
struct Coords {
    pos: Vec<u32>,
    len: usize,
}

impl Coords {
    fn new(ambient: usize, basis: &[Vec<(u32, u32)>]) -> Self {
        let mut pos = vec![u32::MAX; ambient];
        for (i, v) in basis.iter().enumerate() {
            let last = v.iter().map(|e| e.0).max().expect("nonzero basis vector") as usize;
            assert_eq!(pos[last], u32::MAX, "basis is not triangular");
            pos[last] = i as u32;
        }
        Coords { pos, len: basis.len() }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn project(&self, v: &[(u32, u32)]) -> Vec<u32> {
        let mut out = vec![0; self.len];
        for &(i, c) in v {
            let j = self.pos[i as usize];
            if j != u32::MAX {
                out[j as usize] = c;
            }
        }
        out
    }

    fn project_sparse(&self, v: &[(u32, u32)]) -> Vec<(u32, u32)> {
        v.iter().filter_map(|&(i, c)| Some(self.pos[i as usize]).filter(|&j| j != u32::MAX).map(|j| (j, c))).collect()
    }
}

/// Grow `ech` towards the span of `vecs`. Long lists are sampled by random combinations until
/// a run of them adds nothing; an unlucky draw only costs a redundant generator.
fn span_into<R: Rng>(ech: &mut Echelon, vecs: &[&Vec<(u32, u32)>], c: &Coords, rng: &mut R) {
    const SLACK: usize = 24;
    let room = ech.ambient() - ech.rank();
    if vecs.len() <= room + SLACK {
        for v in vecs {
            if ech.is_full() {
                return;
            }
            ech.insert(&c.project(v));
        }
        return;
    }
    let pp = ech.prime().get() as u64;
    let sparse: Vec<Vec<(u32, u32)>> = vecs.iter().map(|v| c.project_sparse(v)).filter(|v| !v.is_empty()).collect();
    let mut acc = vec![0u64; c.len()];
    let mut misses = 0;
    while misses < SLACK && !ech.is_full() {
        acc.iter_mut().for_each(|x| *x = 0);
        for v in &sparse {
            let r = rng.gen_range(0..pp);
            if r != 0 {
                for &(j, x) in v {
                    acc[j as usize] += r * x as u64;
                }
            }
        }
        let w: Vec<u32> = acc.iter().map(|&x| (x % pp) as u32).collect();
        if ech.insert(&w) {
            misses = 0;
        } else {
            misses += 1;
        }
    }
}

fn split_by_summand(offsets: &[Option<usize>], v: &[(u32, u32)]) -> Vec<(usize, Combo)> {
    let mut starts: Vec<(usize, usize)> = offsets.iter().enumerate().filter_map(|(t, o)| o.map(|o| (o, t))).collect();
    starts.sort();
    let mut out: BTreeMap<usize, Combo> = BTreeMap::new();
    for &(i, c) in v {
        let pos = starts.partition_point(|&(o, _)| o <= i as usize) - 1;
        let (o, t) = starts[pos];
        out.entry(t).or_default().push(((i as usize - o) as u32, c));
    }
    out.into_iter().collect()
}

/// Resolve A and compute Ext^{≤ max_degree}(A, B).
pub fn ext_groups(a: &PolyRep, b: &PolyRep, max_degree: usize, opts: &EngineOptions) -> Result<ExtTable, HomalgError> {
    ext_groups_cached(a, b, max_degree, opts, None)
}

/// `ext_groups` with resolutions read from and written to a cache.
pub fn ext_groups_cached(
    a: &PolyRep,
    b: &PolyRep,
    max_degree: usize,
    opts: &EngineOptions,
    cache: Option<&crate::cache::ResolutionCache>,
) -> Result<ExtTable, HomalgError> {
    if a.shape().factors != b.shape().factors {
        return Err(HomalgError::Shape(format!("{:?} vs {:?}", a.shape().factors, b.shape().factors)));
    }
    if a.shape().degrees != b.shape().degrees || a.dim() == 0 || b.dim() == 0 {
        return Ok(ExtTable::default());
    }
    let dual = match opts.side {
        ResolveSide::Auto => b.dim() < a.dim(),
        ResolveSide::Source => false,
        ResolveSide::Target => true,
    };
    // aux shifts agree: aux(A♯) − aux(B♯) = aux(B) − aux(A)
    let (a, b) = if dual { (kuhn_dual(b), kuhn_dual(a)) } else { (a.clone(), b.clone()) };
    let mut e = Engine::for_rep(&a, opts.clone());
    let res = match cache {
        Some(c) => c.resolve(&mut e, &a, max_degree + 1)?,
        None => e.resolve(&a, max_degree + 1)?,
    };
    e.ext_from_resolution(&res, &b, max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrep::*;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn check_exact(e: &mut Engine, res: &Resolution, m: &PolyRep) {
        let r = e.realize(res, m).unwrap();
        for (i, layer) in r.layers.iter().enumerate() {
            let tgt = if i == 0 { m } else { &r.layers[i - 1] };
            layer.check_map(tgt, &r.maps[i]).unwrap();
        }
        assert_eq!(r.maps[0].rank(), m.dim(), "augmentation onto");
        for i in 1..r.maps.len() {
            assert!(r.maps[i - 1].mul(&r.maps[i]).unwrap().is_zero(), "d∘d = 0 at {i}");
            let ker = r.layers[i - 1].dim() - r.maps[i - 1].rank();
            assert_eq!(r.maps[i].rank(), ker, "exact at {}", i - 1);
        }
    }

    #[test]
    fn projective_resolves_trivially() {
        let p = pr(3);
        let g = divided_power(&standard(p, 3), 3);
        let mut e = Engine::for_rep(&g, EngineOptions::default());
        let res = e.resolve(&g, 3).unwrap();
        assert_eq!(res.layers.len(), 1);
        assert!(res.terminated);
        assert_eq!(res.layers[0].len(), 1);
        assert_eq!(res.layers[0][0].weight.0[0].0, vec![3, 0, 0]);
    }

    #[test]
    fn twist_resolution_is_exact() {
        for (pp, m) in [(2u32, 2usize), (3, 3)] {
            let p = pr(pp);
            let t = frobenius_twist(&standard(p, m), 1);
            let mut e = Engine::for_rep(&t, EngineOptions::default());
            let res = e.resolve(&t, 4).unwrap();
            check_exact(&mut e, &res, &t);
            let ext = e.ext_from_resolution(&res, &t, 3).unwrap();
            let want: BTreeMap<u32, u64> = (0..pp).map(|i| (2 * i, 1)).filter(|e| e.0 <= 3).collect();
            assert_eq!(ext.by_degree(), want);
        }
    }

    #[test]
    fn symmetric_square_resolution_is_exact() {
        let p = pr(2);
        let s = symmetric_power(&standard(p, 2), 2);
        let mut e = Engine::for_rep(&s, EngineOptions::default());
        let res = e.resolve(&s, 3).unwrap();
        assert_eq!(res.layers[0].len(), 1);
        check_exact(&mut e, &res, &s);
        let l = exterior_power(&standard(p, 3), 3);
        let mut e = Engine::for_rep(&l, EngineOptions::default());
        let res = e.resolve(&l, 3).unwrap();
        check_exact(&mut e, &res, &l);
    }

    #[test]
    fn ext_examples() {
        for pp in [2u32, 3] {
            let p = pr(pp);
            let m = pp as usize;
            let lam = exterior_power(&standard(p, m), pp);
            let tw = frobenius_twist(&standard(p, m), 1);
            let ext = ext_groups(&lam, &tw, 2 * m, &EngineOptions::default()).unwrap();
            let want: BTreeMap<u32, u64> = [(pp - 1, 1)].into_iter().collect();
            assert_eq!(ext.by_degree(), want, "p = {pp}");
        }
        let p = pr(3);
        let g = divided_power(&standard(p, 3), 3);
        let f = symmetric_power(&standard(p, 3), 3);
        let ext = ext_groups(&g, &f, 3, &EngineOptions::default()).unwrap();
        assert_eq!(ext.by_degree(), [(0, 1)].into_iter().collect());
    }

    #[test]
    fn both_sides_agree() {
        let p = pr(3);
        let v = standard(p, 3);
        let pairs = [
            (exterior_power(&v, 3), frobenius_twist(&v, 1)),
            (symmetric_power(&v, 3), frobenius_twist(&v, 1)),
            (divided_power(&v, 3), symmetric_power(&v, 3)),
            (tensor_power(&v, 3).unwrap(), exterior_power(&v, 3)),
        ];
        for (a, b) in &pairs {
            let mut t = Vec::new();
            for side in [ResolveSide::Source, ResolveSide::Target] {
                let opts = EngineOptions { side, ..Default::default() };
                t.push(ext_groups(a, b, 4, &opts).unwrap());
            }
            assert_eq!(t[0], t[1], "{} vs {}", a.expr(), b.expr());
        }
    }
}
