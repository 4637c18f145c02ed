//! Margin-matrix coordinates: Hom(Γ^λ, Γ^μ) has basis ξ_a for matrices a with
//! row sums μ and column sums λ (one matrix per factor). Composition is the Schur product.

use std::collections::HashMap;
use std::sync::Arc;

use crate::combinatorics::{cartesian, margin_matrices, MultiWeight};
use crate::field::Prime;

/// Basis of Hom(Γ^source, Γ^target). Each margin is the row-major concatenation of one
/// m_f × m_f matrix per factor.
#[derive(Debug)]
pub struct MarginSpace {
    pub target: MultiWeight,
    pub source: MultiWeight,
    pub basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
}

impl MarginSpace {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, a: &[u32]) -> Option<usize> {
        self.index.get(a).map(|&i| i as usize)
    }
}

/// Composition context with caches; one per computation.
pub struct SchurCtx {
    pub p: Prime,
    pub dims: Vec<usize>,
    spaces: HashMap<(MultiWeight, MultiWeight), Arc<MarginSpace>>,
    inner: HashMap<(Vec<u32>, Vec<u32>), Arc<Vec<Vec<u32>>>>,
    binom: Vec<Vec<u32>>,
}

impl SchurCtx {
    pub fn new(p: Prime, dims: &[usize]) -> Self {
        SchurCtx { p, dims: dims.to_vec(), spaces: HashMap::new(), inner: HashMap::new(), binom: vec![vec![1]] }
    }

    fn binom(&mut self, n: u32, k: u32) -> u32 {
        while self.binom.len() <= n as usize {
            let prev = self.binom.last().unwrap().clone();
            let mut row = vec![1u32; prev.len() + 1];
            for i in 1..prev.len() {
                row[i] = self.p.add(prev[i - 1], prev[i]);
            }
            self.binom.push(row);
        }
        self.binom[n as usize][k as usize]
    }

    pub fn space(&mut self, target: &MultiWeight, source: &MultiWeight) -> Arc<MarginSpace> {
        let key = (target.clone(), source.clone());
        if let Some(s) = self.spaces.get(&key) {
            return s.clone();
        }
        let per: Vec<Vec<Vec<u32>>> = target
            .factors()
            .iter()
            .zip(source.factors())
            .map(|(t, s)| if t.total() == s.total() { margin_matrices(t.parts(), s.parts()) } else { Vec::new() })
            .collect();
        let basis: Vec<Vec<u32>> = cartesian(&per).into_iter().map(|parts| parts.concat()).collect();
        let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
        let s = Arc::new(MarginSpace { target: target.clone(), source: source.clone(), basis, index });
        self.spaces.insert(key, s.clone());
        s
    }

    /// The margin of the identity of Γ^μ.
    pub fn identity(&self, mu: &MultiWeight) -> Vec<u32> {
        let mut out = Vec::new();
        for (f, w) in mu.factors().iter().enumerate() {
            let m = self.dims[f];
            let mut a = vec![0u32; m * m];
            for (i, &x) in w.parts().iter().enumerate() {
                a[i * m + i] = x;
            }
            out.extend(a);
        }
        out
    }

    fn enumerate(&mut self, rows: Vec<u32>, cols: Vec<u32>) -> Arc<Vec<Vec<u32>>> {
        let key = (rows, cols);
        if let Some(v) = self.inner.get(&key) {
            return v.clone();
        }
        let v = Arc::new(margin_matrices(&key.0, &key.1));
        self.inner.insert(key, v.clone());
        v
    }

    fn compose_factor(&mut self, m: usize, b: &[u32], a: &[u32]) -> Vec<(Vec<u32>, u32)> {
        let mut out: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut stack: Vec<(usize, Vec<u32>, u32)> = vec![(0, vec![0; m * m], 1)];
        while let Some((i, c, coef)) = stack.pop() {
            if i == m {
                let e = out.entry(c).or_insert(0);
                *e = self.p.add(*e, coef);
                continue;
            }
            let colb: Vec<u32> = (0..m).map(|k| b[k * m + i]).collect();
            let rowa: Vec<u32> = a[i * m..(i + 1) * m].to_vec();
            if colb.iter().all(|&x| x == 0) {
                stack.push((i + 1, c, coef));
                continue;
            }
            let ts = self.enumerate(colb, rowa);
            'next: for t in ts.iter() {
                let mut c2 = c.clone();
                let mut k2 = coef;
                for idx in 0..m * m {
                    if t[idx] > 0 {
                        k2 = self.p.mul(k2, self.binom(c[idx] + t[idx], t[idx]));
                        if k2 == 0 {
                            continue 'next;
                        }
                        c2[idx] += t[idx];
                    }
                }
                stack.push((i + 1, c2, k2));
            }
        }
        out.into_iter().filter(|e| e.1 != 0).collect()
    }

    /// ξ_b ∘ ξ_a as a list of (margin, coefficient).
    pub fn compose(&mut self, b: &[u32], a: &[u32]) -> Vec<(Vec<u32>, u32)> {
        let mut per = Vec::with_capacity(self.dims.len());
        let mut off = 0;
        for f in 0..self.dims.len() {
            let m = self.dims[f];
            let r = self.compose_factor(m, &b[off..off + m * m], &a[off..off + m * m]);
            if r.is_empty() {
                return Vec::new();
            }
            per.push(r);
            off += m * m;
        }
        let mut acc: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 1)];
        for r in per {
            let mut next = Vec::with_capacity(acc.len() * r.len());
            for (x, cx) in &acc {
                for (y, cy) in &r {
                    let mut z = x.clone();
                    z.extend_from_slice(y);
                    next.push((z, self.p.mul(*cx, *cy)));
                }
            }
            acc = next;
        }
        acc
    }

    /// Compose sparse combinations: Σ_b β_b ξ_b ∘ Σ_a α_a ξ_a, expressed in the basis of `out_space`.
    pub fn compose_combo(
        &mut self,
        b_space: &MarginSpace,
        b: &[(u32, u32)],
        a_space: &MarginSpace,
        a: &[(u32, u32)],
        out_space: &MarginSpace,
    ) -> Vec<(u32, u32)> {
        let p = self.p;
        let mut out = Vec::new();
        for &(bi, bc) in b {
            for &(ai, ac) in a {
                let c0 = p.mul(bc, ac);
                for (m, c) in self.compose(&b_space.basis[bi as usize], &a_space.basis[ai as usize]) {
                    let idx = out_space.index_of(&m).expect("composite margin lies in the target space");
                    out.push((idx as u32, p.mul(c0, c)));
                }
            }
        }
        crate::polyrep::merge(p, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{dominant_weights, Weight};

    fn mw(v: &[u32]) -> MultiWeight {
        MultiWeight::single(Weight(v.to_vec()))
    }

    #[test]
    fn identity_is_neutral() {
        let p = Prime::new(3).unwrap();
        let mut ctx = SchurCtx::new(p, &[3]);
        let (mu, la) = (mw(&[2, 1, 0]), mw(&[1, 1, 1]));
        let s = ctx.space(&mu, &la);
        let (im, il) = (ctx.identity(&mu), ctx.identity(&la));
        for a in s.basis.clone() {
            assert_eq!(ctx.compose(&im, &a), vec![(a.clone(), 1)]);
            assert_eq!(ctx.compose(&a, &il), vec![(a.clone(), 1)]);
        }
    }

    #[test]
    fn composition_is_associative() {
        for p in [2, 3] {
            let p = Prime::new(p).unwrap();
            let mut ctx = SchurCtx::new(p, &[3]);
            let ws: Vec<MultiWeight> = dominant_weights(3, 3).into_iter().map(MultiWeight::single).collect();
            for x in &ws {
                for y in &ws {
                    for z in &ws {
                        for w in &ws {
                            let (sc, sb, sa) = (ctx.space(w, z), ctx.space(z, y), ctx.space(y, x));
                            let (szx, swy, swx) = (ctx.space(z, x), ctx.space(w, y), ctx.space(w, x));
                            for ci in 0..sc.len() as u32 {
                                for bi in 0..sb.len() as u32 {
                                    for ai in 0..sa.len() as u32 {
                                        let ba = ctx.compose_combo(&sb, &[(bi, 1)], &sa, &[(ai, 1)], &szx);
                                        let left = ctx.compose_combo(&sc, &[(ci, 1)], &szx, &ba, &swx);
                                        let cb = ctx.compose_combo(&sc, &[(ci, 1)], &sb, &[(bi, 1)], &swy);
                                        let right = ctx.compose_combo(&swy, &cb, &sa, &[(ai, 1)], &swx);
                                        assert_eq!(left, right);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_of_degree_two() {
        // Γ^{(1,1)} → Γ^{(2)} → Γ^{(1,1)}: comultiplication after multiplication is 1 + swap
        let p = Prime::new(5).unwrap();
        let mut ctx = SchurCtx::new(p, &[2]);
        let (two, ones) = (mw(&[2, 0]), mw(&[1, 1]));
        let m = vec![1, 1, 0, 0];
        let d = vec![1, 0, 1, 0];
        let r = ctx.compose(&d, &m);
        let mut r: Vec<_> = r.into_iter().collect();
        r.sort();
        assert_eq!(r, vec![(vec![0, 1, 1, 0], 1), (vec![1, 0, 0, 1], 1)]);
        let _ = (two, ones);
        // the other order gives 2·id on Γ²
        assert_eq!(ctx.compose(&m, &d), vec![(vec![2, 0, 0, 0], 2)]);
    }
}
