use proptest::prelude::*;
use spf_core::combinatorics::{compositions, weight_space_dim_oracle, MultiWeight, OracleKind};
use spf_core::field::Prime;
use spf_core::hom::hom_space;
use spf_core::polyrep::*;
use spf_core::products::{kunneth_direct, kunneth_ext};
use spf_core::resolution::{ext_groups, EngineOptions, ResolveSide};

fn pr(p: u32) -> Prime {
    Prime::new(p).unwrap()
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Gamma,
    Sym,
    Wedge,
    Tensor,
}

fn build(k: Kind, v: &PolyRep, d: u32) -> PolyRep {
    match k {
        Kind::Gamma => divided_power(v, d),
        Kind::Sym => symmetric_power(v, d),
        Kind::Wedge => exterior_power(v, d),
        Kind::Tensor => tensor_power(v, d).unwrap(),
    }
}

fn oracle(k: Kind, d: u32) -> OracleKind {
    match k {
        Kind::Gamma => OracleKind::Gamma(vec![d]),
        Kind::Sym => OracleKind::Sym(vec![d]),
        Kind::Wedge => OracleKind::Wedge(vec![d]),
        Kind::Tensor => OracleKind::Tensor(d),
    }
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Gamma), Just(Kind::Sym), Just(Kind::Wedge), Just(Kind::Tensor)]
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructions_validate(p in prime(), k in kind(), m in 1usize..=3, d in 1u32..=3, r in 0u32..=1) {
        let v = standard(pr(p), m);
        let f = build(k, &v, d);
        f.validate().unwrap();
        frobenius_twist(&f, r).validate().unwrap();
        kuhn_dual(&f).validate().unwrap();
        with_multiplicity(&f, &GradedSpace::e_r(pr(p), 1)).unwrap().validate().unwrap();
    }

    #[test]
    fn weight_spaces_match_counting(p in prime(), k in kind(), m in 1usize..=4, d in 1u32..=4) {
        prop_assume!(!matches!(k, Kind::Tensor) || (m as u64).pow(d) <= 256);
        let f = build(k, &standard(pr(p), m), d);
        let dims = f.weight_dims();
        for w in compositions(d, m) {
            let got = dims.get(&MultiWeight::single(w.clone())).copied().unwrap_or(0) as u64;
            prop_assert_eq!(got, weight_space_dim_oracle(&oracle(k, d), &w).unwrap());
        }
    }

    #[test]
    fn kuhn_dual_is_an_involution(p in prime(), k in kind(), m in 1usize..=3, d in 1u32..=3) {
        let f = build(k, &standard(pr(p), m), d);
        prop_assert!(kuhn_dual(&kuhn_dual(&f)) == f);
        prop_assert_eq!(kuhn_dual(&f).weight_dims(), f.weight_dims());
    }
}

#[test]
fn gamma_and_sym_are_dual() {
    for p in [2, 3] {
        let v = standard(pr(p), 3);
        for d in 1..=3 {
            let g = divided_power(&v, d);
            let s = symmetric_power(&v, d);
            assert_eq!(hom_space(&kuhn_dual(&s), &g).unwrap().dim(), 1);
        }
    }
}

#[test]
fn ext_agrees_on_both_sides() {
    // Ext(A, B) ≅ Ext(B♯, A♯), so resolving either argument gives the same table
    let p = pr(2);
    let v = standard(p, 2);
    let cases = [
        (divided_power(&v, 2), symmetric_power(&v, 2)),
        (tensor_power(&v, 2).unwrap(), exterior_power(&v, 2)),
        (frobenius_twist(&v, 1), frobenius_twist(&v, 1)),
    ];
    for (a, b) in &cases {
        let src = EngineOptions { side: ResolveSide::Source, ..Default::default() };
        let tgt = EngineOptions { side: ResolveSide::Target, ..Default::default() };
        assert_eq!(ext_groups(a, b, 3, &src).unwrap(), ext_groups(a, b, 3, &tgt).unwrap());
    }
}

#[test]
fn kunneth_up_to_degree_three() {
    let p = pr(2);
    let v = standard(p, 2);
    let t = frobenius_twist(&v, 1);
    let s2 = symmetric_power(&v, 2);
    let opts = EngineOptions::default();
    let direct = kunneth_direct(&t, &t, &s2, &s2, 3, &opts).unwrap();
    assert_eq!(direct, kunneth_ext(&t, &t, &s2, &s2, 3, &opts).unwrap());
    assert!(direct.total() > 0);
}

#[test]
fn twisting_preserves_hom() {
    for p in [2, 3] {
        let v = standard(pr(p), 2 * p as usize);
        for (a, b) in [(divided_power(&v, 2), symmetric_power(&v, 2)), (tensor_power(&v, 2).unwrap(), tensor_power(&v, 2).unwrap())] {
            let plain = hom_space(&a, &b).unwrap().dim();
            let twisted = hom_space(&frobenius_twist(&a, 1), &frobenius_twist(&b, 1)).unwrap().dim();
            assert_eq!(plain, twisted);
        }
    }
}

#[test]
fn hom_from_exterior_product_into_sum() {
    // Hom(⊠², (⊗² ∘ ⊞²)_(1,1)) = 2
    for p in [2, 3] {
        let p = pr(p);
        let parts = restrict_to_sum(&tensor_power(&standard(p, 4), 2).unwrap(), &[2, 2]).unwrap();
        let vv = boxtimes(&standard(p, 2), &standard(p, 2)).unwrap();
        assert_eq!(hom_space(&vv, &parts[&vec![1, 1]]).unwrap().dim(), 2);
    }
}
