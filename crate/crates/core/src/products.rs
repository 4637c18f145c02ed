//! Künneth tables and cup products on Ext.

use rand::Rng;

use crate::field::{FpMatrix, Prime};
use crate::hom::{yoneda_map, RealizedComplex};
use crate::polyrep::{boxtimes, comultiplication_map, direct_sum, tensor, zero_rep, PolyRep};
use crate::resolution::{ext_groups, EngineOptions, ExtTable, HomalgError};

/// Ext(A1 ⊠ A2, B1 ⊠ B2) as the graded tensor product of the factor tables.
pub fn kunneth_ext(a1: &PolyRep, b1: &PolyRep, a2: &PolyRep, b2: &PolyRep, max_degree: usize, opts: &EngineOptions) -> Result<ExtTable, HomalgError> {
    let t1 = ext_groups(a1, b1, max_degree, opts)?;
    let t2 = ext_groups(a2, b2, max_degree, opts)?;
    Ok(t1.convolve(&t2).truncate(max_degree as u32))
}

/// The same table computed on the exterior products.
pub fn kunneth_direct(a1: &PolyRep, b1: &PolyRep, a2: &PolyRep, b2: &PolyRep, max_degree: usize, opts: &EngineOptions) -> Result<ExtTable, HomalgError> {
    ext_groups(&boxtimes(a1, a2)?, &boxtimes(b1, b2)?, max_degree, opts)
}

/// A cochain on layer `degree` of a realized resolution, given by its values on the
/// canonical generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub degree: usize,
    pub values: Vec<Vec<(u32, u32)>>,
}

impl ExtClass {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_empty())
    }

    /// The cochain as a matrix P_degree → M.
    pub fn matrix(&self, res: &RealizedComplex, m: &PolyRep) -> FpMatrix {
        yoneda_map(&res.layers[self.degree], m, &self.values)
    }
}

fn sparse_col(v: &[u32]) -> Vec<(u32, u32)> {
    v.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &c)| (i as u32, c)).collect()
}

fn columns(m: &FpMatrix) -> Vec<Vec<(u32, u32)>> {
    m.transpose().to_row_lists()
}

/// Coordinates of the cochain space: (summand, basis index of M in the summand's weight).
fn cochain_coords(res: &RealizedComplex, n: usize, m: &PolyRep) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if let Some(layer) = res.layers.get(n) {
        for (s, sm) in layer.order.iter().enumerate() {
            for x in m.weight_space(&sm.weight) {
                out.push((s, x));
            }
        }
    }
    out
}

/// Matrix of δ: C^n → C^{n+1} in cochain coordinates.
fn coboundary(res: &RealizedComplex, n: usize, m: &PolyRep) -> FpMatrix {
    let p = m.prime();
    let src = cochain_coords(res, n, m);
    let tgt = cochain_coords(res, n + 1, m);
    if res.layers.get(n + 1).is_none() {
        return FpMatrix::zeros(p, 0, src.len());
    }
    let pos: std::collections::HashMap<(usize, usize), usize> = tgt.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let dcols = columns(&res.maps[n + 1]);
    let gens = &res.layers[n + 1].canonical_generators;
    let nsum = res.layers[n].order.len();
    let mut trips = Vec::new();
    for (c, &(s, x)) in src.iter().enumerate() {
        let mut values = vec![Vec::new(); nsum];
        values[s] = vec![(x as u32, 1)];
        let f = yoneda_map(&res.layers[n], m, &values);
        for (t, &g) in gens.iter().enumerate() {
            let mut acc = vec![0u32; m.dim()];
            for &(r, v) in &dcols[g] {
                for (i, a) in f.column(r as usize).into_iter().enumerate() {
                    if a != 0 {
                        acc[i] = p.add(acc[i], p.mul(a, v));
                    }
                }
            }
            for (i, a) in acc.into_iter().enumerate() {
                if a != 0 {
                    trips.push((pos[&(t, i)], c, a));
                }
            }
        }
    }
    FpMatrix::from_triplets(p, tgt.len(), src.len(), &trips)
}

fn class_vector(res: &RealizedComplex, c: &ExtClass, m: &PolyRep) -> Vec<u32> {
    let coords = cochain_coords(res, c.degree, m);
    let pos: std::collections::HashMap<(usize, usize), usize> = coords.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut v = vec![0u32; coords.len()];
    for (s, vals) in c.values.iter().enumerate() {
        for &(x, a) in vals {
            v[pos[&(s, x as usize)]] = a;
        }
    }
    v
}

fn class_from_vector(res: &RealizedComplex, n: usize, m: &PolyRep, v: &[u32]) -> ExtClass {
    let coords = cochain_coords(res, n, m);
    let mut values = vec![Vec::new(); res.layers[n].order.len()];
    for (i, &(s, x)) in coords.iter().enumerate() {
        if v[i] != 0 {
            values[s].push((x as u32, v[i]));
        }
    }
    ExtClass { degree: n, values }
}

/// Cocycles of degree n representing a basis of Ext^n(res.module, m).
pub fn ext_basis(res: &RealizedComplex, m: &PolyRep, n: usize) -> Vec<ExtClass> {
    let p = m.prime();
    let delta = coboundary(res, n, m);
    let cocycles = if delta.rows() == 0 {
        (0..delta.cols()).map(|i| {
            let mut e = vec![0; delta.cols()];
            e[i] = 1;
            e
        }).collect()
    } else {
        delta.kernel_basis()
    };
    let mut ech = crate::field::Echelon::new(p, delta.cols());
    if n > 0 {
        let prev = coboundary(res, n - 1, m);
        for c in 0..prev.cols() {
            ech.insert(&prev.column(c));
        }
    }
    let mut out = Vec::new();
    for z in cocycles {
        if ech.insert(&z) {
            out.push(class_from_vector(res, n, m, &z));
        }
    }
    out
}

/// Whether the cocycle is a coboundary.
pub fn is_coboundary(res: &RealizedComplex, m: &PolyRep, c: &ExtClass) -> bool {
    if c.degree == 0 {
        return c.is_zero();
    }
    let p = m.prime();
    let prev = coboundary(res, c.degree - 1, m);
    let mut ech = crate::field::Echelon::new(p, prev.rows());
    for i in 0..prev.cols() {
        ech.insert(&prev.column(i));
    }
    ech.contains(&class_vector(res, c, m))
}

/// Difference of two cochains of the same degree.
pub fn class_difference(p: Prime, x: &ExtClass, y: &ExtClass) -> ExtClass {
    let values = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(a, b)| {
            let mut v = a.clone();
            v.extend(b.iter().map(|&(i, c)| (i, p.neg(c))));
            crate::polyrep::merge(p, &mut v);
            v
        })
        .collect();
    ExtClass { degree: x.degree, values }
}

/// One factor of a cup product: a resolution of Γ^a∘X, a target module and a cocycle.
pub struct CupFactor<'a> {
    pub resolution: &'a RealizedComplex,
    pub target: &'a PolyRep,
    pub class: &'a ExtClass,
}

/// The tensor product of two realized resolutions, through total degree n.
struct TensorComplex {
    layers: Vec<PolyRep>,
    /// per degree: (i, j, offset) of the P_i ⊗ Q_j pieces
    pieces: Vec<Vec<(usize, usize, usize)>>,
    /// d_k: T_k → T_{k−1} for k ≥ 1; index 0 is the augmentation into A ⊗ B
    maps: Vec<FpMatrix>,
}

fn tensor_complex(pr: &RealizedComplex, qr: &RealizedComplex, n: usize) -> Result<TensorComplex, HomalgError> {
    let p = pr.module.prime();
    let pl = |i: usize| pr.layers.get(i).map(|l| l.realized.clone());
    let ql = |j: usize| qr.layers.get(j).map(|l| l.realized.clone());
    let shape = tensor(&pr.module, &qr.module)?.shape().clone();
    let mut layers = Vec::new();
    let mut pieces = Vec::new();
    for k in 0..=n {
        let mut rep = zero_rep(p, &shape);
        let mut pc = Vec::new();
        for i in 0..=k {
            if let (Some(a), Some(b)) = (pl(i), ql(k - i)) {
                pc.push((i, k - i, rep.dim()));
                rep = direct_sum(&rep, &tensor(&a, &b)?)?;
            }
        }
        layers.push(rep);
        pieces.push(pc);
    }
    let mut maps = vec![pr.maps[0].kron(&qr.maps[0]).map_err(|e| HomalgError::Internal(e.to_string()))?];
    for k in 1..=n {
        let mut trips = Vec::new();
        for &(i, j, off) in &pieces[k] {
            let (di, dj) = (pr.layers[i].realized.dim(), qr.layers[j].realized.dim());
            if i > 0 {
                let &(_, _, o2) = pieces[k - 1].iter().find(|x| x.0 == i - 1 && x.1 == j).expect("piece");
                let m = pr.maps[i].kron(&FpMatrix::identity(p, dj)).map_err(|e| HomalgError::Internal(e.to_string()))?;
                trips.extend(m.triplets().into_iter().map(|(r, c, v)| (r + o2, c + off, v)));
            }
            if j > 0 {
                let &(_, _, o2) = pieces[k - 1].iter().find(|x| x.0 == i && x.1 == j - 1).expect("piece");
                let m = FpMatrix::identity(p, di).kron(&qr.maps[j]).map_err(|e| HomalgError::Internal(e.to_string()))?;
                let m = if i % 2 == 1 { m.scale(p.neg(1)) } else { m };
                trips.extend(m.triplets().into_iter().map(|(r, c, v)| (r + o2, c + off, v)));
            }
        }
        maps.push(FpMatrix::from_triplets(p, layers[k - 1].dim(), layers[k].dim(), &trips));
    }
    Ok(TensorComplex { layers, pieces, maps })
}

/// Solve D z = b for z supported on the given block of T, adding a random kernel element.
fn solve_block<R: Rng>(d: &FpMatrix, cols: &[u32], b: &[u32], rng: &mut R) -> Result<Vec<(u32, u32)>, HomalgError> {
    let p = d.prime();
    let rows: Vec<usize> = {
        let mut r: Vec<usize> = b.iter().enumerate().filter(|e| *e.1 != 0).map(|e| e.0).collect();
        for &c in cols {
            r.extend(d.column(c as usize).iter().enumerate().filter(|e| *e.1 != 0).map(|e| e.0));
        }
        r.sort();
        r.dedup();
        r
    };
    let mut data = vec![0u32; rows.len() * cols.len()];
    for (j, &c) in cols.iter().enumerate() {
        let col = d.column(c as usize);
        for (i, &r) in rows.iter().enumerate() {
            data[i * cols.len() + j] = col[r];
        }
    }
    let sub = FpMatrix::from_dense(p, rows.len(), cols.len(), data);
    let rhs: Vec<u32> = rows.iter().map(|&r| b[r]).collect();
    let mut z = sub
        .solve(&rhs)
        .map_err(|e| HomalgError::Internal(e.to_string()))?
        .ok_or_else(|| HomalgError::Internal("chain map lift failed: the resolution is not exact".into()))?;
    for k in sub.kernel_basis() {
        let c: u32 = rng.gen_range(0..p.get());
        for (x, y) in z.iter_mut().zip(k) {
            *x = p.add(*x, p.mul(c, y));
        }
    }
    Ok(cols.iter().zip(z).filter(|e| e.1 != 0).map(|(&c, v)| (c, v)).collect())
}

/// x ⌣ y ∈ Ext^{i+j}(Γ^{a+b}∘X, M1 ⊗ M2) through a random lift of Δ_{a,b} to the resolutions.
/// `total` resolves Γ^{a+b}∘X; the factors resolve Γ^a∘X and Γ^b∘X.
pub fn cup_product<R: Rng>(x: &PolyRep, a: u32, b: u32, left: CupFactor, right: CupFactor, total: &RealizedComplex, rng: &mut R) -> Result<ExtClass, HomalgError> {
    let (i, j) = (left.class.degree, right.class.degree);
    let n = i + j;
    if total.layers.len() <= n || left.resolution.layers.len() <= i || right.resolution.layers.len() <= j {
        return Err(HomalgError::Internal("resolutions are too short for the product".into()));
    }
    let tc = tensor_complex(left.resolution, right.resolution, n)?;
    let delta = comultiplication_map(a, b, x);
    // f_k on the canonical generators of R_k, as vectors in T_k
    let mut f_mats: Vec<FpMatrix> = Vec::new();
    for k in 0..=n {
        let layer = &total.layers[k];
        let tgt = &tc.layers[k];
        let mut values = Vec::with_capacity(layer.order.len());
        for (s, sm) in layer.order.iter().enumerate() {
            let g = layer.canonical_generators[s];
            let b_vec: Vec<u32> = if k == 0 {
                let e = total.maps[0].column(g);
                delta.mul_vec(&e).map_err(|e| HomalgError::Internal(e.to_string()))?
            } else {
                let dg = total.maps[k].column(g);
                f_mats[k - 1].mul_vec(&dg).map_err(|e| HomalgError::Internal(e.to_string()))?
            };
            let cols: Vec<u32> = match tgt.find_block(&(sm.weight.clone(), sm.aux)) {
                Some(bl) => tgt.block_members(bl).to_vec(),
                None => Vec::new(),
            };
            values.push(solve_block(&tc.maps[k], &cols, &b_vec, rng)?);
        }
        f_mats.push(yoneda_map(layer, tgt, &values));
    }
    // (x ⊗ y) on the P_i ⊗ Q_j piece of T_n
    let xm = left.class.matrix(left.resolution, left.target);
    let ym = right.class.matrix(right.resolution, right.target);
    let xy = xm.kron(&ym).map_err(|e| HomalgError::Internal(e.to_string()))?;
    let &(_, _, off) = tc.pieces[n].iter().find(|q| q.0 == i && q.1 == j).expect("piece");
    let width = xy.cols();
    let fcols = columns(&f_mats[n]);
    let layer = &total.layers[n];
    let values = layer
        .canonical_generators
        .iter()
        .map(|&g| {
            let mut v = vec![0u32; width];
            for &(r, c) in &fcols[g] {
                let r = r as usize;
                if r >= off && r < off + width {
                    v[r - off] = c;
                }
            }
            sparse_col(&xy.mul_vec(&v).expect("width"))
        })
        .collect();
    Ok(ExtClass { degree: n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::realize_resolution;
    use crate::polyrep::*;
    use crate::resolution::Engine;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn resolved(m: &PolyRep, len: usize) -> RealizedComplex {
        let mut e = Engine::for_rep(m, EngineOptions::default());
        let res = e.resolve(m, len).unwrap();
        realize_resolution(&res, m).unwrap()
    }

    #[test]
    fn convolution_example() {
        let t: ExtTable = {
            let mut t = ExtTable::default();
            t.add(0, 0, 1);
            t.add(2, 0, 1);
            t
        };
        assert_eq!(t.convolve(&t).by_degree(), [(0, 1), (2, 2), (4, 1)].into_iter().collect());
    }

    #[test]
    fn kunneth_with_a_projective_factor() {
        let p = pr(2);
        let v = standard(p, 2);
        let tw = frobenius_twist(&v, 1);
        let g = divided_power(&v, 2);
        let o = EngineOptions::default();
        let k = kunneth_ext(&tw, &tw, &g, &g, 3, &o).unwrap();
        assert_eq!(k, ext_groups(&tw, &tw, 3, &o).unwrap());
        assert_eq!(k, kunneth_direct(&tw, &tw, &g, &g, 3, &o).unwrap());
    }

    #[test]
    fn realized_complexes_are_exact() {
        let p = pr(2);
        let tw = frobenius_twist(&standard(p, 2), 1);
        let r = resolved(&tw, 3);
        for k in 1..r.maps.len() {
            assert!(r.maps[k - 1].mul(&r.maps[k]).unwrap().is_zero());
        }
        assert_eq!(r.maps[0].rank(), tw.dim());
        let basis: Vec<usize> = (0..3).map(|n| ext_basis(&r, &tw, n).len()).collect();
        assert_eq!(basis, vec![1, 0, 1]);
    }

    #[test]
    fn degree_one_cup_is_lift_independent() {
        // X = Λ², a = b = 1, M = I^{(1)} at p = 2
        let p = pr(2);
        let m = 4;
        let v = standard(p, m);
        let x = exterior_power(&v, 2);
        let tw = frobenius_twist(&v, 1);
        let ga = divided_power(&x, 1);
        let gab = divided_power(&x, 2);
        let ra = resolved(&ga, 2);
        let rt = resolved(&gab, 3);
        let cls = ext_basis(&ra, &tw, 1);
        assert_eq!(cls.len(), 1);
        let target = tensor(&tw, &tw).unwrap();
        let mut products = Vec::new();
        for seed in [1u64, 2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = CupFactor { resolution: &ra, target: &tw, class: &cls[0] };
            let g = CupFactor { resolution: &ra, target: &tw, class: &cls[0] };
            products.push(cup_product(&x, 1, 1, f, g, &rt, &mut rng).unwrap());
        }
        for c in &products {
            let mat = c.matrix(&rt, &target);
            assert!(mat.mul(&rt.maps[3]).unwrap().is_zero());
        }
        for w in products.windows(2) {
            assert!(is_coboundary(&rt, &target, &class_difference(p, &w[0], &w[1])));
        }
    }

    #[test]
    fn square_of_the_invariant_is_nonzero() {
        // X = S², p = 3: the degree-0 class of Ext(Γ³∘S², S^{2(1)}) squared, then multiplied into S^{4(1)}
        let p = pr(3);
        let v = standard(p, 2);
        let x = symmetric_power(&v, 2);
        let m1 = frobenius_twist(&symmetric_power(&v, 2), 1);
        let ra = resolved(&divided_power(&x, 3), 1);
        let rt = resolved(&divided_power(&x, 6), 0);
        let cls = ext_basis(&ra, &m1, 0);
        assert_eq!(cls.len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = CupFactor { resolution: &ra, target: &m1, class: &cls[0] };
        let g = CupFactor { resolution: &ra, target: &m1, class: &cls[0] };
        let sq = cup_product(&x, 3, 3, f, g, &rt, &mut rng).unwrap();
        let target = tensor(&m1, &m1).unwrap();
        let mat = sq.matrix(&rt, &target);
        let mult = sym_multiplication_map(2, 2, &v);
        assert!(!mult.mul(&mat).unwrap().is_zero());
        // symmetric under the swap of the two factors
        let n = m1.dim();
        let trips: Vec<(usize, usize, u32)> = (0..n * n).map(|k| ((k % n) * n + k / n, k, 1)).collect();
        let swap = FpMatrix::from_triplets(p, n * n, n * n, &trips);
        assert_eq!(swap.mul(&mat).unwrap().triplets(), mat.triplets());
    }
}
