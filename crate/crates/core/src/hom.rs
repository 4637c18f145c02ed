//! Intertwiners, minimal generators and projective covers of realized modules.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::combinatorics::MultiWeight;
use crate::field::{column_kernel, rref_dense, Echelon, FpMatrix, Prime};
use crate::polyrep::{direct_sum, merge, with_multiplicity, zero_rep, GenKey, GradedSpace, PolyRep};
use crate::resolution::{HomalgError, Resolution, Summand};
use crate::schur::SchurCtx;
use crate::yoneda::{gamma_rep, GammaIndex, SpinTree};

/// A basis of Hom(A, B); each basis map is homogeneous for the aux grading.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source_dim: usize,
    pub target_dim: usize,
    pub basis: Vec<FpMatrix>,
    /// aux_B − aux_A for each basis map
    pub aux_shifts: Vec<i64>,
    /// false when some evaluation dimension is below the degree
    pub faithful: bool,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dims_by_shift(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &s in &self.aux_shifts {
            *m.entry(s).or_insert(0) += 1;
        }
        m
    }
}

/// A weight vector of M used as a module generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGenerator {
    pub weight: MultiWeight,
    pub aux: i64,
    pub vector: Vec<(u32, u32)>,
}

/// Per-block spans of a submodule, grown by spinning.
struct Spinner<'a> {
    m: &'a PolyRep,
    ech: Vec<Echelon>,
}

impl<'a> Spinner<'a> {
    fn new(m: &'a PolyRep) -> Self {
        let ech = (0..m.blocks().len()).map(|b| Echelon::new(m.prime(), m.block_members(b).len())).collect();
        Spinner { m, ech }
    }

    fn local(&self, v: &[(u32, u32)]) -> Option<(usize, Vec<u32>)> {
        let first = v.first()?;
        let b = self.m.block_of(first.0 as usize);
        let mut w = vec![0; self.m.block_members(b).len()];
        for &(i, c) in v {
            w[self.m.local_index(i as usize)] = c;
        }
        Some((b, w))
    }

    fn contains(&self, v: &[(u32, u32)]) -> bool {
        match self.local(v) {
            None => true,
            Some((b, w)) => self.ech[b].contains(&w),
        }
    }

    /// Add a weight vector and everything it generates.
    fn add(&mut self, v: &[(u32, u32)]) {
        let keys = self.m.generator_keys();
        let mut queue = vec![v.to_vec()];
        while let Some(x) = queue.pop() {
            let Some((b, mut w)) = self.local(&x) else { continue };
            self.ech[b].reduce(&mut w);
            if w.iter().all(|&c| c == 0) {
                continue;
            }
            let members = self.m.block_members(b);
            let y: Vec<(u32, u32)> = w.iter().enumerate().filter(|e| *e.1 != 0).map(|(l, &c)| (members[l], c)).collect();
            self.ech[b].insert_reduced(w);
            for &k in &keys {
                let z = self.m.apply(k, &y);
                if !z.is_empty() {
                    queue.push(z);
                }
            }
        }
    }

    fn dim(&self) -> usize {
        self.ech.iter().map(|e| e.rank()).sum()
    }
}

/// Weight blocks with dominant weight, highest weights first.
fn dominant_blocks(m: &PolyRep) -> Vec<usize> {
    let mut bs: Vec<usize> = (0..m.blocks().len()).filter(|&b| m.blocks()[b].0.is_dominant()).collect();
    bs.sort_by(|&x, &y| m.blocks()[y].cmp(&m.blocks()[x]));
    bs
}

/// A generating set of minimal cardinality among greedy choices: basis vectors of dominant
/// weight spaces are taken top-down, then each is dropped if the others generate it.
pub fn minimal_generators(m: &PolyRep) -> Vec<ModuleGenerator> {
    let mut sp = Spinner::new(m);
    let mut gens: Vec<Vec<(u32, u32)>> = Vec::new();
    for b in dominant_blocks(m) {
        for &i in m.block_members(b) {
            if sp.dim() == m.dim() {
                break;
            }
            let v = vec![(i, 1)];
            if !sp.contains(&v) {
                sp.add(&v);
                gens.push(v);
            }
        }
    }
    let mut j = 0;
    while j < gens.len() {
        let mut sp = Spinner::new(m);
        for (k, g) in gens.iter().enumerate() {
            if k != j {
                sp.add(g);
            }
        }
        if sp.contains(&gens[j]) {
            gens.remove(j);
        } else {
            j += 1;
        }
    }
    gens.into_iter()
        .map(|v| {
            let i = v[0].0 as usize;
            ModuleGenerator { weight: m.weight(i).clone(), aux: m.aux_degree(i), vector: v }
        })
        .collect()
}

/// A spanning tree of A grown from its generators, with every non-tree edge recorded
/// as a linear relation among node vectors.
struct ModuleTree {
    gen_of: Vec<usize>,
    parent: Vec<Option<(usize, GenKey)>>,
    vecs: Vec<Vec<(u32, u32)>>,
    block_nodes: Vec<Vec<usize>>,
    /// (node, key, combination of nodes equal to key·node)
    relations: Vec<(usize, GenKey, Vec<(u32, u32)>)>,
}

impl ModuleTree {
    fn new(a: &PolyRep, gens: &[ModuleGenerator]) -> Self {
        let p = a.prime();
        let nb = a.blocks().len();
        // per block: reduced rows, their node combinations, pivots
        let mut rows: Vec<Vec<Vec<u32>>> = vec![Vec::new(); nb];
        let mut combos: Vec<Vec<Vec<(u32, u32)>>> = vec![Vec::new(); nb];
        let mut pivots: Vec<Vec<usize>> = vec![Vec::new(); nb];
        let mut t = ModuleTree { gen_of: Vec::new(), parent: Vec::new(), vecs: Vec::new(), block_nodes: vec![Vec::new(); nb], relations: Vec::new() };
        // reduce w; returns the node combination of the reduced part and the residual
        let reduce = |rows: &[Vec<u32>], combos: &[Vec<(u32, u32)>], pivots: &[usize], w: &mut Vec<u32>| -> Vec<(u32, u32)> {
            let mut acc = Vec::new();
            for (r, &c) in pivots.iter().enumerate() {
                let f = w[c];
                if f != 0 {
                    let nf = p.neg(f);
                    for (x, &y) in w.iter_mut().zip(&rows[r]) {
                        if y != 0 {
                            *x = p.add(*x, p.mul(nf, y));
                        }
                    }
                    acc.extend(combos[r].iter().map(|&(n, z)| (n, p.mul(f, z))));
                }
            }
            merge(p, &mut acc);
            acc
        };
        let mut queue = std::collections::VecDeque::new();
        let add_node = |t: &mut ModuleTree,
                            rows: &mut Vec<Vec<Vec<u32>>>,
                            combos: &mut Vec<Vec<Vec<(u32, u32)>>>,
                            pivots: &mut Vec<Vec<usize>>,
                            b: usize,
                            mut w: Vec<u32>,
                            mut minus: Vec<(u32, u32)>,
                            v: Vec<(u32, u32)>,
                            g: usize,
                            parent: Option<(usize, GenKey)>|
         -> usize {
            let n = t.vecs.len();
            // row = node − (reduced part)
            let c = w.iter().position(|&x| x != 0).expect("independent");
            let inv = p.inv(w[c]);
            w.iter_mut().for_each(|x| *x = p.mul(*x, inv));
            for z in minus.iter_mut() {
                z.1 = p.mul(p.neg(z.1), inv);
            }
            minus.push((n as u32, inv));
            merge(p, &mut minus);
            for r in 0..rows[b].len() {
                let f = rows[b][r][c];
                if f != 0 {
                    let nf = p.neg(f);
                    for (x, &y) in rows[b][r].iter_mut().zip(&w) {
                        if y != 0 {
                            *x = p.add(*x, p.mul(nf, y));
                        }
                    }
                    let mut cc = combos[b][r].clone();
                    cc.extend(minus.iter().map(|&(k, z)| (k, p.mul(nf, z))));
                    merge(p, &mut cc);
                    combos[b][r] = cc;
                }
            }
            rows[b].push(w);
            combos[b].push(minus);
            pivots[b].push(c);
            t.gen_of.push(g);
            t.parent.push(parent);
            t.vecs.push(v);
            t.block_nodes[b].push(n);
            n
        };
        for (g, gen) in gens.iter().enumerate() {
            let b = a.block_of(gen.vector[0].0 as usize);
            let mut w = vec![0; a.block_members(b).len()];
            for &(i, c) in &gen.vector {
                w[a.local_index(i as usize)] = c;
            }
            let minus = reduce(&rows[b], &combos[b], &pivots[b], &mut w);
            let n = add_node(&mut t, &mut rows, &mut combos, &mut pivots, b, w, minus, gen.vector.clone(), g, None);
            queue.push_back(n);
        }
        let keys = a.generator_keys();
        while let Some(n) = queue.pop_front() {
            for &k in &keys {
                let y = a.apply(k, &t.vecs[n]);
                if y.is_empty() {
                    t.relations.push((n, k, Vec::new()));
                    continue;
                }
                let b = a.block_of(y[0].0 as usize);
                let mut w = vec![0; a.block_members(b).len()];
                for &(i, c) in &y {
                    w[a.local_index(i as usize)] = c;
                }
                let comb = reduce(&rows[b], &combos[b], &pivots[b], &mut w);
                if w.iter().all(|&x| x == 0) {
                    t.relations.push((n, k, comb));
                } else {
                    let g = t.gen_of[n];
                    let c = add_node(&mut t, &mut rows, &mut combos, &mut pivots, b, w, comb, y, g, Some((n, k)));
                    queue.push_back(c);
                }
            }
        }
        t
    }

    fn len(&self) -> usize {
        self.vecs.len()
    }
}

/// Inverse of the matrix whose columns are the node vectors of block b (local coordinates).
fn node_inverse(a: &PolyRep, t: &ModuleTree, b: usize) -> Vec<u32> {
    let p = a.prime();
    let n = a.block_members(b).len();
    let mut aug = vec![0u32; n * 2 * n];
    for (c, &node) in t.block_nodes[b].iter().enumerate() {
        for &(i, v) in &t.vecs[node] {
            aug[a.local_index(i as usize) * 2 * n + c] = v;
        }
    }
    for r in 0..n {
        aug[r * 2 * n + n + r] = 1;
    }
    let piv = rref_dense(p, &mut aug, n, 2 * n);
    assert!(piv.len() == n && (n == 0 || piv[n - 1] == n - 1), "tree nodes form a basis");
    let mut inv = vec![0u32; n * n];
    for r in 0..n {
        inv[r * n..(r + 1) * n].copy_from_slice(&aug[r * 2 * n + n..(r + 1) * 2 * n]);
    }
    inv
}

/// All equivariant maps A → B, found by solving for the images of generators of A.
pub fn hom_space(a: &PolyRep, b: &PolyRep) -> Result<HomSpace, HomalgError> {
    if a.shape().factors != b.shape().factors || a.prime() != b.prime() {
        return Err(HomalgError::Shape(format!("{:?} vs {:?}", a.shape().factors, b.shape().factors)));
    }
    let faithful = a.shape().is_faithful() && b.shape().is_faithful();
    let mut out = HomSpace { source_dim: a.dim(), target_dim: b.dim(), basis: Vec::new(), aux_shifts: Vec::new(), faithful };
    if a.dim() == 0 || b.dim() == 0 || a.shape().degrees != b.shape().degrees {
        return Ok(out);
    }
    let p = a.prime();
    let gens = minimal_generators(a);
    let tree = ModuleTree::new(a, &gens);
    debug_assert_eq!(tree.len(), a.dim());
    let shifts: BTreeSet<i64> = gens
        .iter()
        .flat_map(|g| b.blocks().iter().filter(|k| k.0 == g.weight).map(move |k| k.1 - g.aux))
        .collect();
    let inverses: HashMap<usize, Vec<u32>> = (0..a.blocks().len()).map(|bl| (bl, node_inverse(a, &tree, bl))).collect();
    for delta in shifts {
        // unknowns: the image of generator g is Σ_l u_{off_g + l} · (basis vector l of B_{w_g, aux_g + δ})
        let mut off = Vec::with_capacity(gens.len());
        let mut seeds: Vec<Vec<u32>> = Vec::with_capacity(gens.len());
        let mut nunk = 0usize;
        for g in &gens {
            off.push(nunk);
            let members = b.find_block(&(g.weight.clone(), g.aux + delta)).map(|bl| b.block_members(bl).to_vec()).unwrap_or_default();
            nunk += members.len();
            seeds.push(members);
        }
        if nunk == 0 {
            continue;
        }
        // X(node)[u] for the unknowns of the node's generator
        let mut x: Vec<Vec<Vec<(u32, u32)>>> = Vec::with_capacity(tree.len());
        for n in 0..tree.len() {
            let g = tree.gen_of[n];
            let v = match tree.parent[n] {
                None => seeds[g].iter().map(|&i| vec![(i, 1)]).collect(),
                Some((par, k)) => x[par].iter().map(|c: &Vec<(u32, u32)>| b.apply(k, c)).collect(),
            };
            x.push(v);
        }
        // constraint columns, one per unknown, rows compacted
        let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nunk];
        let mut row_ids: HashMap<(usize, u32), u32> = HashMap::new();
        for (ri, (n, k, comb)) in tree.relations.iter().enumerate() {
            let mut per_unknown: BTreeMap<usize, Vec<(u32, u32)>> = BTreeMap::new();
            let g = tree.gen_of[*n];
            for (u, c) in x[*n].iter().enumerate() {
                let y = b.apply(*k, c);
                if !y.is_empty() {
                    per_unknown.entry(off[g] + u).or_default().extend(y);
                }
            }
            for &(m, z) in comb {
                let gm = tree.gen_of[m as usize];
                let nz = p.neg(z);
                for (u, c) in x[m as usize].iter().enumerate() {
                    if !c.is_empty() {
                        per_unknown.entry(off[gm] + u).or_default().extend(c.iter().map(|&(i, y)| (i, p.mul(nz, y))));
                    }
                }
            }
            for (u, mut v) in per_unknown {
                merge(p, &mut v);
                for (i, c) in v {
                    let next = row_ids.len() as u32;
                    let r = *row_ids.entry((ri, i)).or_insert(next);
                    cols[u].push((r, c));
                }
            }
        }
        let (_, kernel) = column_kernel(p, row_ids.len(), &cols);
        for kv in kernel {
            // X on nodes
            let mut xn: Vec<Vec<(u32, u32)>> = Vec::with_capacity(tree.len());
            for n in 0..tree.len() {
                let g = tree.gen_of[n];
                let mut acc = Vec::new();
                for &(u, c) in &kv {
                    let u = u as usize;
                    if u >= off[g] && u < off[g] + seeds[g].len() {
                        acc.extend(x[n][u - off[g]].iter().map(|&(i, y)| (i, p.mul(c, y))));
                    }
                }
                merge(p, &mut acc);
                xn.push(acc);
            }
            // X on the standard basis: x_i = Σ_n inv[n][i] X(node n)
            let mut trips = Vec::new();
            for bl in 0..a.blocks().len() {
                let inv = &inverses[&bl];
                let nodes = &tree.block_nodes[bl];
                let sz = nodes.len();
                for (li, &gi) in a.block_members(bl).iter().enumerate() {
                    let mut acc = Vec::new();
                    for (r, &node) in nodes.iter().enumerate() {
                        let c = inv[r * sz + li];
                        if c != 0 {
                            acc.extend(xn[node].iter().map(|&(i, y)| (i, p.mul(c, y))));
                        }
                    }
                    merge(p, &mut acc);
                    trips.extend(acc.into_iter().map(|(i, c)| (i as usize, gi as usize, c)));
                }
            }
            out.basis.push(FpMatrix::from_triplets(p, b.dim(), a.dim(), &trips));
            out.aux_shifts.push(delta);
        }
    }
    Ok(out)
}

/// A direct sum of Γ^μ copies with their Yoneda generators.
#[derive(Clone, Debug)]
pub struct ProjectiveLayer {
    /// one entry per distinct summand type, with multiplicity
    pub summands: Vec<(Summand, usize)>,
    /// summands in realized order
    pub order: Vec<Summand>,
    pub realized: PolyRep,
    /// basis index of γ^μ for each summand copy, in realized order
    pub canonical_generators: Vec<usize>,
}

/// Realize ⊕_s Γ^{μ_s} (with aux shifts) and the positions of the γ^{μ_s}.
pub fn realize_layer(p: Prime, dims: &[usize], degrees: &[u32], order: &[Summand]) -> Result<ProjectiveLayer, HomalgError> {
    let shape = crate::polyrep::GroupShape::new(dims.to_vec(), degrees.to_vec());
    let mut r = zero_rep(p, &shape);
    let mut canon = Vec::new();
    for s in order {
        let g = gamma_rep(p, dims, &s.weight);
        let root = generator_index(dims, &s.weight);
        canon.push(r.dim() + root);
        let g = with_multiplicity(&g, &GradedSpace::new([(s.aux, 1)].into_iter().collect()))?;
        r = direct_sum(&r, &g)?;
    }
    let mut counts: BTreeMap<Summand, usize> = BTreeMap::new();
    for s in order {
        *counts.entry(s.clone()).or_insert(0) += 1;
    }
    Ok(ProjectiveLayer { summands: counts.into_iter().collect(), order: order.to_vec(), realized: r, canonical_generators: canon })
}

/// Basis index of γ^μ in `gamma_rep`.
pub fn generator_index(dims: &[usize], mu: &MultiWeight) -> usize {
    let gi = crate::yoneda::GammaIndex::new(dims, mu);
    let mut id = Vec::new();
    for (f, w) in mu.factors().iter().enumerate() {
        let m = dims[f];
        let mut a = vec![0u32; m * m];
        for (i, &x) in w.parts().iter().enumerate() {
            a[i * m + i] = x;
        }
        id.extend(a);
    }
    gi.index(&id)
}

/// The matrix of the map ⊕_s Γ^{μ_s} → M sending γ^{μ_s} to images[s].
pub fn yoneda_map(layer: &ProjectiveLayer, m: &PolyRep, images: &[Vec<(u32, u32)>]) -> FpMatrix {
    let p = m.prime();
    let dims = &m.shape().factors;
    let mut trips = Vec::new();
    let mut off = 0usize;
    for (s, summand) in layer.order.iter().enumerate() {
        let mut tree = SpinTree::new(p, dims, &summand.weight);
        let nb = tree.rep().blocks().len();
        let blocks: Vec<usize> = (0..nb).collect();
        let out = tree.evaluate(m, &[images[s].clone()], &blocks);
        for bl in 0..nb {
            for (x, &glob) in tree.rep().block_members(bl).iter().enumerate() {
                for &(r, c) in &out[bl][x][0] {
                    trips.push((r as usize, off + glob as usize, c));
                }
            }
        }
        off += tree.rep().dim();
    }
    FpMatrix::from_triplets(p, m.dim(), layer.realized.dim(), &trips)
}

/// Projective cover ⊕ Γ^μ ↠ M built on minimal generators.
pub fn projective_cover(m: &PolyRep) -> Result<(ProjectiveLayer, FpMatrix), HomalgError> {
    let gens = minimal_generators(m);
    let order: Vec<Summand> = gens.iter().map(|g| Summand { weight: g.weight.clone(), aux: g.aux }).collect();
    let layer = realize_layer(m.prime(), &m.shape().factors, &m.shape().degrees, &order)?;
    let images: Vec<Vec<(u32, u32)>> = gens.iter().map(|g| g.vector.clone()).collect();
    let f = yoneda_map(&layer, m, &images);
    if f.rank() != m.dim() {
        return Err(HomalgError::Internal("cover is not surjective".into()));
    }
    Ok((layer, f))
}

/// A resolution with realized layers; maps[0] is the augmentation and maps[i] is d_i.
#[derive(Clone, Debug)]
pub struct RealizedComplex {
    pub module: PolyRep,
    pub layers: Vec<ProjectiveLayer>,
    pub maps: Vec<FpMatrix>,
}

/// Realize every layer of a Yoneda-coordinate resolution of m.
pub fn realize_resolution(res: &Resolution, m: &PolyRep) -> Result<RealizedComplex, HomalgError> {
    let p = m.prime();
    let dims = &m.shape().factors;
    let degrees = &m.shape().degrees;
    let mut ctx = SchurCtx::new(p, dims);
    let layers: Vec<ProjectiveLayer> = res.layers.iter().map(|l| realize_layer(p, dims, degrees, l)).collect::<Result<_, _>>()?;
    let mut maps = vec![yoneda_map(&layers[0], m, &res.augmentation)];
    for (i, d) in res.differentials.iter().enumerate() {
        let tgt = &res.layers[i];
        let mut offs = Vec::with_capacity(tgt.len());
        let mut t = 0;
        for s in tgt {
            offs.push(t);
            t += gamma_rep(p, dims, &s.weight).dim();
        }
        let images: Vec<Vec<(u32, u32)>> = d
            .iter()
            .enumerate()
            .map(|(s, entries)| {
                let mut v = Vec::new();
                for (t, combo) in entries {
                    let tw = &tgt[*t as usize].weight;
                    let sp = ctx.space(tw, &res.layers[i + 1][s].weight);
                    let gi = GammaIndex::new(dims, tw);
                    v.extend(combo.iter().map(|&(a, c)| ((offs[*t as usize] + gi.index(&sp.basis[a as usize])) as u32, c)));
                }
                merge(p, &mut v);
                v
            })
            .collect();
        maps.push(yoneda_map(&layers[i + 1], &layers[i].realized, &images));
    }
    Ok(RealizedComplex { module: m.clone(), layers, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrep::*;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn hom_examples() {
        let p = pr(3);
        let s = standard(p, 2);
        let h = hom_space(&divided_power(&s, 2), &symmetric_power(&s, 2)).unwrap();
        assert_eq!(h.dim(), 1);
        let t = tensor_power(&s, 2).unwrap();
        let h = hom_space(&t, &t).unwrap();
        assert_eq!(h.dim(), 2);
        for f in &h.basis {
            t.check_map(&t, f).unwrap();
        }
    }

    #[test]
    fn generators_of_projectives_and_sums() {
        let p = pr(2);
        let g = divided_power(&standard(p, 3), 2);
        let gens = minimal_generators(&g);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].weight.0[0].0, vec![2, 0, 0]);
        let s = symmetric_power(&standard(p, 3), 2);
        let d = direct_sum(&g, &s).unwrap();
        assert_eq!(minimal_generators(&d).len(), minimal_generators(&g).len() + minimal_generators(&s).len());
        assert!(minimal_generators(&zero_rep(p, g.shape())).is_empty());
    }

    #[test]
    fn covers() {
        let p = pr(2);
        let tw = frobenius_twist(&standard(p, 2), 1);
        let (layer, f) = projective_cover(&tw).unwrap();
        assert_eq!(layer.order.len(), 1);
        assert_eq!(layer.order[0].weight.0[0].0, vec![2, 0]);
        assert_eq!((f.rows(), f.cols()), (2, 3));
        layer.realized.check_map(&tw, &f).unwrap();
        let s2 = symmetric_power(&standard(p, 2), 2);
        let (layer, f) = projective_cover(&s2).unwrap();
        assert_eq!(layer.order.len(), 1);
        layer.realized.check_map(&s2, &f).unwrap();
        let g = divided_power(&standard(p, 2), 2);
        let (layer, f) = projective_cover(&g).unwrap();
        assert_eq!(layer.realized.dim(), g.dim());
        assert_eq!(f.rank(), g.dim());
    }

    #[test]
    fn degree_zero_ext_agrees() {
        use crate::resolution::{ext_groups, EngineOptions};
        for (p, m) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let p = pr(p);
            let v = standard(p, m);
            let reps = vec![
                symmetric_power(&v, 2),
                divided_power(&v, 2),
                exterior_power(&v, 2),
                tensor_power(&v, 2).unwrap(),
                frobenius_twist(&v, 1),
            ];
            for a in &reps {
                for b in &reps {
                    if a.shape().degrees != b.shape().degrees {
                        continue;
                    }
                    let h = hom_space(a, b).unwrap();
                    let e = ext_groups(a, b, 0, &EngineOptions::default()).unwrap();
                    assert_eq!(h.dim() as u64, e.degree(0), "{} -> {}", a.expr(), b.expr());
                    for f in &h.basis {
                        a.check_map(b, f).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn yoneda_dimension() {
        let p = pr(3);
        let v = standard(p, 3);
        let s3 = symmetric_power(&v, 3);
        for w in crate::combinatorics::dominant_weights(3, 3) {
            let mu = MultiWeight::single(w);
            let g = gamma_rep(p, &[3], &mu);
            assert_eq!(hom_space(&g, &s3).unwrap().dim(), s3.weight_space(&mu).len());
        }
    }
}
