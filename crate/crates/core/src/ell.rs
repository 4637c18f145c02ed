//! The left adjoint ℓ^r of Frobenius precomposition, and its derived functor, computed
//! from projective resolutions: ℓ^r(Γ^μ) = Γ^{μ/p^r} when p^r divides μ and 0 otherwise,
//! and a margin basis map ξ_a goes to ξ_{a/p^r} or 0.

use std::collections::{BTreeMap, BTreeSet};

use crate::combinatorics::{dominant_multiweights, MultiWeight};
use crate::hom::{realize_layer, yoneda_map, ProjectiveLayer};
use crate::polyrep::{quotient, PolyRep};
use crate::resolution::{Combo, Engine, EngineOptions, HomalgError, Resolution, Summand};
use crate::schur::SchurCtx;
use crate::yoneda::GammaIndex;

/// Homology of ℓ^r(P_•): per homological degree, dims indexed by (dominant weight, aux).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedHomology {
    pub dims: Vec<usize>,
    pub degrees: Vec<BTreeMap<(MultiWeight, i64), u64>>,
}

impl GradedHomology {
    /// Total dimension in homological degree i, counting every weight in each orbit.
    pub fn total(&self, i: usize) -> u64 {
        self.degrees.get(i).map(|t| t.iter().map(|((w, _), n)| n * orbit_size(w)).sum()).unwrap_or(0)
    }

    pub fn totals(&self) -> BTreeMap<usize, u64> {
        (0..self.degrees.len()).map(|i| (i, self.total(i))).filter(|e| e.1 > 0).collect()
    }
}

/// Number of distinct permutations of each factor of the weight.
pub fn orbit_size(w: &MultiWeight) -> u64 {
    w.factors()
        .iter()
        .map(|f| {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &x in f.parts() {
                *counts.entry(x).or_insert(0) += 1;
            }
            let parts: Vec<u32> = counts.values().map(|&c| c as u32).collect();
            crate::combinatorics::multinomial(&parts) as u64
        })
        .product()
}

fn divide_margin(a: &[u32], q: u32) -> Option<Vec<u32>> {
    a.iter().map(|&x| if x % q == 0 { Some(x / q) } else { None }).collect()
}

/// ℓ^r applied to a resolution: surviving summands and differentials in reduced margins.
struct Untwisted {
    layers: Vec<Vec<Summand>>,
    /// diffs[i][s] = (t, combination) for d_{i+1}, summand indices in the surviving lists
    diffs: Vec<Vec<Vec<(usize, Combo)>>>,
}

fn untwist(res: &Resolution, q: u32, ctx_big: &mut SchurCtx, ctx: &mut SchurCtx) -> Untwisted {
    let mut keep: Vec<Vec<Option<usize>>> = Vec::new();
    let mut layers = Vec::new();
    for layer in &res.layers {
        let mut idx = Vec::new();
        let mut out = Vec::new();
        for s in layer {
            match s.weight.divide(q) {
                Some(w) => {
                    idx.push(Some(out.len()));
                    out.push(Summand { weight: w, aux: s.aux });
                }
                None => idx.push(None),
            }
        }
        keep.push(idx);
        layers.push(out);
    }
    let mut diffs = Vec::new();
    for (i, d) in res.differentials.iter().enumerate() {
        let mut di = vec![Vec::new(); layers[i + 1].len()];
        for (s, entries) in d.iter().enumerate() {
            let Some(s2) = keep[i + 1][s] else { continue };
            for (t, combo) in entries {
                let Some(t2) = keep[i][*t as usize] else { continue };
                let big = ctx_big.space(&res.layers[i][*t as usize].weight, &res.layers[i + 1][s].weight);
                let small = ctx.space(&layers[i][t2].weight, &layers[i + 1][s2].weight);
                let mut c: Combo = combo
                    .iter()
                    .filter_map(|&(a, x)| divide_margin(&big.basis[a as usize], q).map(|m| (small.index_of(&m).expect("margin") as u32, x)))
                    .collect();
                crate::polyrep::merge(ctx.p, &mut c);
                if !c.is_empty() {
                    di[s2].push((t2, c));
                }
            }
        }
        diffs.push(di);
    }
    Untwisted { layers, diffs }
}

/// H_i(ℓ^r P_•) for i ≤ length, evaluated at F's own dimensions.
pub fn derived_ell_r(f: &PolyRep, r: u32, length: usize, opts: &EngineOptions) -> Result<GradedHomology, HomalgError> {
    let p = f.prime();
    let dims = f.shape().factors.clone();
    let q = p.get().pow(r);
    let mut out = GradedHomology { dims: dims.clone(), degrees: vec![BTreeMap::new(); length + 1] };
    if f.dim() == 0 || f.shape().degrees.iter().any(|d| d % q != 0) {
        return Ok(out);
    }
    let small_deg: Vec<u32> = f.shape().degrees.iter().map(|d| d / q).collect();
    let mut e = Engine::for_rep(f, opts.clone());
    let res = e.resolve(f, length + 1)?;
    let mut ctx = SchurCtx::new(p, &dims);
    let u = untwist(&res, q, &mut e.ctx, &mut ctx);
    let auxes: BTreeSet<i64> = u.layers.iter().flatten().map(|s| s.aux).collect();
    for kappa in dominant_multiweights(&small_deg, &dims) {
        for &aux in &auxes {
            // C_i = ⊕_s Hom(Γ^κ, Γ^{ν_s}); d_{i+1} acts by post-composition
            let offsets: Vec<Vec<usize>> = u
                .layers
                .iter()
                .map(|l| {
                    let mut o = Vec::new();
                    let mut t = 0;
                    for s in l {
                        o.push(t);
                        if s.aux == aux {
                            t += ctx.space(&s.weight, &kappa).len();
                        }
                    }
                    o.push(t);
                    o
                })
                .collect();
            let dim = |i: usize| offsets.get(i).map(|o| *o.last().unwrap()).unwrap_or(0);
            let mut ranks = vec![0usize; u.layers.len() + 1];
            for (i, d) in u.diffs.iter().enumerate() {
                // rank of d_{i+1}: C_{i+1} → C_i
                let mut cols = Vec::new();
                for (s, entries) in d.iter().enumerate() {
                    let src = &u.layers[i + 1][s];
                    if src.aux != aux {
                        continue;
                    }
                    let sb = ctx.space(&src.weight, &kappa);
                    for bi in 0..sb.len() as u32 {
                        let mut col = Vec::new();
                        for (t, combo) in entries {
                            let tw = &u.layers[i][*t].weight;
                            let st = ctx.space(tw, &src.weight);
                            let so = ctx.space(tw, &kappa);
                            let img = ctx.compose_combo(&st, combo, &sb, &[(bi, 1)], &so);
                            col.extend(img.into_iter().map(|(x, c)| (x + offsets[i][*t] as u32, c)));
                        }
                        col.sort();
                        cols.push(col);
                    }
                }
                ranks[i + 1] = crate::field::column_rank(p, dim(i), &cols);
            }
            for (i, slot) in out.degrees.iter_mut().enumerate() {
                let h = dim(i) - ranks.get(i).cloned().unwrap_or(0) - ranks.get(i + 1).cloned().unwrap_or(0);
                if h > 0 {
                    slot.insert((kappa.clone(), aux), h as u64);
                }
            }
        }
    }
    Ok(out)
}

/// ℓ^r(F) = coker(ℓ^r P_1 → ℓ^r P_0), as a module over the same GL's as F.
pub fn ell_r(f: &PolyRep, r: u32, opts: &EngineOptions) -> Result<PolyRep, HomalgError> {
    let p = f.prime();
    let dims = f.shape().factors.clone();
    let q = p.get().pow(r);
    let small_deg: Vec<u32> = f.shape().degrees.iter().map(|d| d / q).collect();
    let shape = crate::polyrep::GroupShape::new(dims.clone(), small_deg.clone());
    if f.dim() == 0 || f.shape().degrees.iter().any(|d| d % q != 0) {
        return Ok(crate::polyrep::zero_rep(p, &shape));
    }
    let mut e = Engine::for_rep(f, opts.clone());
    let res = e.resolve(f, 1)?;
    let mut ctx = SchurCtx::new(p, &dims);
    let u = untwist(&res, q, &mut e.ctx, &mut ctx);
    let l0: ProjectiveLayer = realize_layer(p, &dims, &small_deg, &u.layers[0])?;
    let mut offs = Vec::new();
    let mut t = 0;
    for s in &u.layers[0] {
        offs.push(t);
        t += crate::yoneda::gamma_rep(p, &dims, &s.weight).dim();
    }
    let mut image_cols: Vec<Vec<u32>> = Vec::new();
    if let (Some(l1), Some(d)) = (u.layers.get(1), u.diffs.first()) {
        let layer1 = realize_layer(p, &dims, &small_deg, l1)?;
        let images: Vec<Vec<(u32, u32)>> = d
            .iter()
            .enumerate()
            .map(|(s, entries)| {
                let mut v = Vec::new();
                for (t, combo) in entries {
                    let tw = &u.layers[0][*t].weight;
                    let sp = ctx.space(tw, &l1[s].weight);
                    let gi = GammaIndex::new(&dims, tw);
                    v.extend(combo.iter().map(|&(a, c)| ((offs[*t] + gi.index(&sp.basis[a as usize])) as u32, c)));
                }
                crate::polyrep::merge(p, &mut v);
                v
            })
            .collect();
        let m = yoneda_map(&layer1, &l0.realized, &images);
        image_cols = (0..m.cols()).map(|c| m.column(c)).collect();
    }
    let qt = quotient(&l0.realized, &image_cols)?;
    Ok(qt.rep.with_expr(format!("ell({},{})", f.expr(), r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::hom::hom_space;
    use crate::polyrep::*;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn ell_of_small_functors() {
        for pp in [2u32, 3] {
            let p = pr(pp);
            let m = pp as usize;
            let v = standard(p, m);
            let o = EngineOptions::default();
            let g = ell_r(&divided_power(&v, pp), 1, &o).unwrap();
            assert_eq!(g.weight_dims(), v.weight_dims());
            assert_eq!(hom_space(&g, &v).unwrap().dim(), 1);
            assert_eq!(ell_r(&symmetric_power(&v, pp), 1, &o).unwrap().dim(), 0);
            let s2 = symmetric_power(&v, 2);
            let l0 = ell_r(&s2, 0, &o).unwrap();
            assert_eq!(l0.weight_dims(), s2.weight_dims());
            let h = hom_space(&l0, &s2).unwrap();
            assert!(h.basis.iter().any(|x| x.rank() == s2.dim()));
        }
    }

    #[test]
    fn derived_ell_of_symmetric_power() {
        for pp in [2u32, 3] {
            let p = pr(pp);
            let s = symmetric_power(&standard(p, pp as usize), pp);
            let h = derived_ell_r(&s, 1, 2 * pp as usize, &EngineOptions::default()).unwrap();
            let want: BTreeMap<usize, u64> = [(2 * (pp as usize - 1), pp as u64)].into_iter().collect();
            assert_eq!(h.totals(), want);
        }
    }

    #[test]
    fn coprime_degree_vanishes() {
        let p = pr(3);
        let s = symmetric_power(&standard(p, 2), 2);
        let h = derived_ell_r(&s, 1, 3, &EngineOptions::default()).unwrap();
        assert!(h.totals().is_empty());
        let h = derived_ell_r(&s, 0, 3, &EngineOptions::default()).unwrap();
        assert_eq!(h.totals(), [(0, 3)].into_iter().collect());
    }

    #[test]
    fn adjunction_dimensions() {
        let o = EngineOptions::default();
        let p = pr(2);
        let v = standard(p, 4);
        let fs = [
            symmetric_power(&v, 4),
            divided_power(&v, 4),
            exterior_power(&v, 4),
            divided_power(&symmetric_power(&v, 2), 2),
            tensor_power(&divided_power(&v, 2), 2).unwrap(),
            frobenius_twist(&exterior_power(&v, 2), 1),
        ];
        let gs = [symmetric_power(&v, 2), divided_power(&v, 2), exterior_power(&v, 2), tensor_power(&v, 2).unwrap()];
        for f in &fs {
            let l = ell_r(f, 1, &o).unwrap();
            for g in &gs {
                let left = hom_space(&l, g).unwrap().dim();
                let right = hom_space(f, &frobenius_twist(g, 1)).unwrap().dim();
                assert_eq!(left, right, "{} / {}", f.expr(), g.expr());
            }
        }
    }
}
