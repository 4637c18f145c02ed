//! Yoneda maps out of the projectives Γ^μ: the morphism Γ^μ → M sending γ^μ to v is
//! evaluated on canonical basis vectors by spinning γ^μ with the generators.

use std::collections::HashMap;

use crate::combinatorics::{multisets, MultiWeight};
use crate::field::{Echelon, FpMatrix, Prime};
use crate::polyrep::{boxtimes, divided_power, merge, standard, tensor, unit, GenKey, PolyRep};

/// Γ^μ evaluated at (k^{m_1}, …, k^{m_n}); factor f is ⊗_i Γ^{μ_{f,i}}(k^{m_f}).
pub fn gamma_rep(p: Prime, dims: &[usize], mu: &MultiWeight) -> PolyRep {
    let mut out: Option<PolyRep> = None;
    for (f, w) in mu.factors().iter().enumerate() {
        let m = dims[f];
        let s = standard(p, m);
        let mut r = unit(p, &[m]);
        for &x in w.parts() {
            r = tensor(&r, &divided_power(&s, x)).expect("same shape");
        }
        out = Some(match out {
            None => r,
            Some(o) => boxtimes(&o, &r).expect("same prime"),
        });
    }
    out.expect("at least one factor").with_expr(format!("gamma[{mu}]"))
}

/// Maps margins of Γ^μ(k^m) to basis indices of `gamma_rep`.
pub struct GammaIndex {
    dims: Vec<usize>,
    mu: MultiWeight,
    tables: HashMap<(usize, u32), HashMap<Vec<u32>, usize>>,
    factor_dims: Vec<usize>,
}

impl GammaIndex {
    pub fn new(dims: &[usize], mu: &MultiWeight) -> Self {
        let mut tables = HashMap::new();
        let mut factor_dims = Vec::new();
        for (f, w) in mu.factors().iter().enumerate() {
            let m = dims[f];
            let mut total = 1usize;
            for &x in w.parts() {
                let t = tables.entry((m, x)).or_insert_with(|| {
                    multisets(m, x as usize).into_iter().enumerate().map(|(i, s)| (s, i)).collect::<HashMap<_, _>>()
                });
                total *= t.len();
            }
            factor_dims.push(total);
        }
        GammaIndex { dims: dims.to_vec(), mu: mu.clone(), tables, factor_dims }
    }

    /// Index of x_a = ⊗_i Π_j e_j^{[a_ij]}.
    pub fn index(&self, a: &[u32]) -> usize {
        let mut idx = 0usize;
        let mut off = 0;
        for (f, w) in self.mu.factors().iter().enumerate() {
            let m = self.dims[f];
            let mut fi = 0usize;
            for (i, &x) in w.parts().iter().enumerate() {
                let t = &self.tables[&(m, x)];
                let mut ms = Vec::with_capacity(x as usize);
                for j in 0..m {
                    for _ in 0..a[off + i * m + j] {
                        ms.push(j as u32);
                    }
                }
                fi = fi * t.len() + t[&ms];
            }
            idx = idx * self.factor_dims[f] + fi;
            off += m * m;
        }
        idx
    }
}

/// A spanning tree of Γ^μ(k^m) grown from γ^μ, with per-block transition data.
pub struct SpinTree {
    pub mu: MultiWeight,
    rep: PolyRep,
    index: GammaIndex,
    parent: Vec<u32>,
    key: Vec<GenKey>,
    vecs: Vec<Vec<(u32, u32)>>,
    block_nodes: Vec<Vec<u32>>,
    children: Vec<Vec<u32>>,
    transitions: HashMap<usize, FpMatrix>,
}

impl SpinTree {
    pub fn new(p: Prime, dims: &[usize], mu: &MultiWeight) -> Self {
        let rep = gamma_rep(p, dims, mu);
        let index = GammaIndex::new(dims, mu);
        let id: Vec<u32> = {
            let mut v = Vec::new();
            for (f, w) in mu.factors().iter().enumerate() {
                let m = dims[f];
                let mut a = vec![0u32; m * m];
                for (i, &x) in w.parts().iter().enumerate() {
                    a[i * m + i] = x;
                }
                v.extend(a);
            }
            v
        };
        let root = index.index(&id);
        let nb = rep.blocks().len();
        let mut ech: Vec<Echelon> = (0..nb).map(|b| Echelon::new(p, rep.block_members(b).len())).collect();
        let mut block_nodes = vec![Vec::new(); nb];
        let mut parent = vec![u32::MAX];
        let mut key = vec![GenKey::e(0, 0, 0)];
        let mut vecs = vec![vec![(root as u32, 1)]];
        let mut children = vec![Vec::new()];
        let rb = rep.block_of(root);
        let mut v0 = vec![0; rep.block_members(rb).len()];
        v0[rep.local_index(root)] = 1;
        ech[rb].insert_reduced(v0);
        block_nodes[rb].push(0);
        let mut full = ech.iter().filter(|e| e.is_full()).count();
        let keys = rep.generator_keys();
        let mut head = 0;
        while head < vecs.len() && full < nb {
            let x = vecs[head].clone();
            for &k in &keys {
                let y = rep.apply(k, &x);
                if y.is_empty() {
                    continue;
                }
                let b = rep.block_of(y[0].0 as usize);
                if ech[b].is_full() {
                    continue;
                }
                let mut w = vec![0; rep.block_members(b).len()];
                for &(i, c) in &y {
                    w[rep.local_index(i as usize)] = c;
                }
                ech[b].reduce(&mut w);
                if w.iter().all(|&c| c == 0) {
                    continue;
                }
                ech[b].insert_reduced(w);
                if ech[b].is_full() {
                    full += 1;
                }
                let n = vecs.len() as u32;
                parent.push(head as u32);
                key.push(k);
                vecs.push(y);
                children.push(Vec::new());
                children[head].push(n);
                block_nodes[b].push(n);
            }
            head += 1;
        }
        debug_assert_eq!(full, nb, "Γ^μ is cyclic on γ^μ");
        SpinTree { mu: mu.clone(), rep, index, parent, key, vecs, block_nodes, children, transitions: HashMap::new() }
    }

    pub fn rep(&self) -> &PolyRep {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    /// Block and local index of the canonical vector x_a.
    pub fn locate(&self, a: &[u32]) -> (usize, usize) {
        let i = self.index.index(a);
        (self.rep.block_of(i), self.rep.local_index(i))
    }

    pub fn block_of_weight(&self, w: &MultiWeight) -> Option<usize> {
        self.rep.find_block(&(w.clone(), 0))
    }

    /// Inverse of the node-vector matrix of a block: row t gives the coefficients of
    /// canonical local vector… transposed: entry (n, x) = coefficient of node n in x.
    fn transition(&mut self, b: usize) -> &FpMatrix {
        if !self.transitions.contains_key(&b) {
            let p = self.rep.prime();
            let n = self.rep.block_members(b).len();
            let mut trips = Vec::new();
            for (c, &node) in self.block_nodes[b].iter().enumerate() {
                for &(i, v) in &self.vecs[node as usize] {
                    trips.push((self.rep.local_index(i as usize), c, v));
                }
            }
            let nm = FpMatrix::from_triplets(p, n, n, &trips).to_dense();
            // invert via RREF of [N | I]
            let mut aug = vec![0u32; n * 2 * n];
            for r in 0..n {
                for c in 0..n {
                    aug[r * 2 * n + c] = nm.get(r, c);
                }
                aug[r * 2 * n + n + r] = 1;
            }
            let piv = crate::field::rref_dense(p, &mut aug, n, 2 * n);
            assert!(piv.len() == n && piv[n - 1] == n - 1, "spin tree block is a basis");
            let mut inv = vec![0u32; n * n];
            for r in 0..n {
                inv[r * n..(r + 1) * n].copy_from_slice(&aug[r * 2 * n + n..(r + 1) * 2 * n]);
            }
            self.transitions.insert(b, FpMatrix::from_dense(p, n, n, inv));
        }
        &self.transitions[&b]
    }

    /// For every target block and every v in `vs` (weight-μ vectors of `m`), the image of each
    /// canonical basis vector of the block under the Yoneda map γ^μ ↦ v.
    /// Result: out[target][local x][v] as a sparse vector of `m`.
    pub fn evaluate(&mut self, m: &PolyRep, vs: &[Vec<(u32, u32)>], targets: &[usize]) -> Vec<Vec<Vec<Vec<(u32, u32)>>>> {
        let p = m.prime();
        let nb = self.rep.blocks().len();
        let mut slot = vec![usize::MAX; nb];
        for (t, &b) in targets.iter().enumerate() {
            slot[b] = t;
        }
        for &b in targets {
            self.transition(b);
        }
        let n = self.vecs.len();
        let mut node_block = vec![0usize; n];
        let mut pos = vec![0usize; n];
        for (b, nodes) in self.block_nodes.iter().enumerate() {
            for (i, &x) in nodes.iter().enumerate() {
                node_block[x as usize] = b;
                pos[x as usize] = i;
            }
        }
        // needed: node lies in a target block or has such a descendant
        let mut needed = vec![false; n];
        for i in (0..n).rev() {
            if slot[node_block[i]] != usize::MAX {
                needed[i] = true;
            }
            if needed[i] && i > 0 {
                needed[self.parent[i] as usize] = true;
            }
        }
        let mut out: Vec<Vec<Vec<Vec<(u32, u32)>>>> = targets
            .iter()
            .map(|&b| vec![vec![Vec::new(); vs.len()]; self.rep.block_members(b).len()])
            .collect();
        if n == 0 || !needed[0] {
            return out;
        }
        let mut stack: Vec<(u32, Vec<Vec<(u32, u32)>>)> = vec![(0, vs.to_vec())];
        while let Some((node, vals)) = stack.pop() {
            let b = node_block[node as usize];
            if slot[b] != usize::MAX {
                let t = slot[b];
                let tr = &self.transitions[&b];
                let r = pos[node as usize];
                for x in 0..tr.cols() {
                    let c = tr.get(r, x);
                    if c == 0 {
                        continue;
                    }
                    for (vi, val) in vals.iter().enumerate() {
                        out[t][x][vi].extend(val.iter().map(|&(i, z)| (i, p.mul(z, c))));
                    }
                }
            }
            for &ch in &self.children[node as usize] {
                if !needed[ch as usize] {
                    continue;
                }
                let k = self.key[ch as usize];
                let nv: Vec<Vec<(u32, u32)>> = vals.iter().map(|v| m.apply(k, v)).collect();
                stack.push((ch, nv));
            }
        }
        for t in out.iter_mut() {
            for x in t.iter_mut() {
                for v in x.iter_mut() {
                    merge(p, v);
                }
            }
        }
        out
    }
}

/// Trees cached by (μ, dims).
#[derive(Default)]
pub struct TreeCache {
    trees: HashMap<(MultiWeight, Vec<usize>), SpinTree>,
}

impl TreeCache {
    pub fn get(&mut self, p: Prime, dims: &[usize], mu: &MultiWeight) -> &mut SpinTree {
        self.trees.entry((mu.clone(), dims.to_vec())).or_insert_with(|| SpinTree::new(p, dims, mu))
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{dominant_weights, Weight};
    use crate::schur::SchurCtx;

    #[test]
    fn tree_evaluation_matches_schur_product() {
        for p in [2, 3] {
            let p = Prime::new(p).unwrap();
            let dims = [3usize];
            let ws: Vec<MultiWeight> = dominant_weights(3, 3).into_iter().map(MultiWeight::single).collect();
            let mut ctx = SchurCtx::new(p, &dims);
            for nu in &ws {
                let target = gamma_rep(p, &dims, nu);
                let tidx = GammaIndex::new(&dims, nu);
                for mu in &ws {
                    let mut tree = SpinTree::new(p, &dims, mu);
                    let sb = ctx.space(nu, mu);
                    let vs: Vec<Vec<(u32, u32)>> = sb.basis.iter().map(|b| vec![(tidx.index(b) as u32, 1)]).collect();
                    for la in &ws {
                        let sa = ctx.space(mu, la);
                        let out_space = ctx.space(nu, la);
                        let blk = tree.block_of_weight(la).unwrap();
                        let res = tree.evaluate(&target, &vs, &[blk]);
                        for (ai, a) in sa.basis.iter().enumerate() {
                            let (b2, x) = tree.locate(a);
                            assert_eq!(b2, blk);
                            for bi in 0..sb.len() {
                                let want = ctx.compose_combo(&sb, &[(bi as u32, 1)], &sa, &[(ai as u32, 1)], &out_space);
                                let mut want: Vec<(u32, u32)> =
                                    want.into_iter().map(|(i, c)| (tidx.index(&out_space.basis[i as usize]) as u32, c)).collect();
                                want.sort();
                                assert_eq!(res[0][x][bi], want, "{nu} {mu} {la}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn multi_factor_tree() {
        let p = Prime::new(2).unwrap();
        let mu = MultiWeight(vec![Weight(vec![1, 1]), Weight(vec![2, 0])]);
        let t = SpinTree::new(p, &[2, 2], &mu);
        assert_eq!(t.len(), 4 * 3);
    }
}
