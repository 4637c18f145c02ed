use std::collections::BTreeMap;

use spf_core::cache::ResolutionCache;
use spf_core::combinatorics::{binomial, weight_space_dim_oracle, MultiWeight, OracleKind, Weight};
use spf_core::ell::derived_ell_r;
use spf_core::field::Prime;
use spf_core::hom::hom_space;
use spf_core::polyrep::*;
use spf_core::resolution::{ext_groups_cached, EngineOptions, ExtTable, HomalgError};

use crate::hilbert::{enumerate_monomials, generator_degrees, hilbert_table, Group, HilbertTable};
use crate::report::{fold, run_check, table, Source, TheoremReport};

/// Shared settings for the checks: engine options, an optional cache, and the largest
/// functor degree attempted.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub opts: EngineOptions,
    pub cache: Option<ResolutionCache>,
    pub max_functor_degree: u32,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { opts: EngineOptions::default(), cache: None, max_functor_degree: 8 }
    }
}

impl Ctx {
    pub fn ext(&self, a: &PolyRep, b: &PolyRep, max_degree: u32) -> Result<ExtTable, HomalgError> {
        ext_groups_cached(a, b, max_degree as usize, &self.opts, self.cache.as_ref())
    }

    /// A note when the degree is outside the envelope.
    fn out_of_range(&self, degree: u32) -> Option<String> {
        (degree > self.max_functor_degree).then(|| format!("not attempted: degree {degree} exceeds {}", self.max_functor_degree))
    }
}

/// Γ, Λ, S with Chałupnik's shift constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classical {
    Gamma,
    Wedge,
    Sym,
}

impl Classical {
    pub fn parse(s: &str) -> Option<Classical> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" | "g" => Some(Classical::Gamma),
            "wedge" | "lambda" | "l" => Some(Classical::Wedge),
            "sym" | "s" => Some(Classical::Sym),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Classical::Gamma => "gamma",
            Classical::Wedge => "wedge",
            Classical::Sym => "sym",
        }
    }

    pub fn epsilon(self) -> u32 {
        match self {
            Classical::Gamma => 0,
            Classical::Wedge => 1,
            Classical::Sym => 2,
        }
    }

    pub fn apply(self, v: &PolyRep, d: u32) -> PolyRep {
        match self {
            Classical::Gamma => divided_power(v, d),
            Classical::Wedge => exterior_power(v, d),
            Classical::Sym => symmetric_power(v, d),
        }
    }
}

/// Single-variable functors used as bases for twisting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Classical(Classical, u32),
    Tensor(u32),
}

impl Base {
    pub fn parse(s: &str) -> Option<Base> {
        let s = s.trim().to_ascii_lowercase();
        let (head, n) = s.split_at(s.find(|c: char| c.is_ascii_digit())?);
        let n: u32 = n.parse().ok()?;
        match head {
            "tensor" | "t" | "tensorpow" => Some(Base::Tensor(n)),
            h => Classical::parse(h).map(|x| Base::Classical(x, n)),
        }
    }

    pub fn name(self) -> String {
        match self {
            Base::Classical(x, d) => format!("{}{d}", x.name()),
            Base::Tensor(n) => format!("tensor{n}"),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            Base::Classical(_, d) | Base::Tensor(d) => d,
        }
    }

    pub fn apply(self, v: &PolyRep) -> Result<PolyRep, HomalgError> {
        Ok(match self {
            Base::Classical(x, d) => x.apply(v, d),
            Base::Tensor(n) => tensor_power(v, n)?,
        })
    }
}

fn e_dims(p: Prime, r: u32, max: u32) -> ExtTable {
    let e = GradedSpace::e_r(p, r);
    table(e.basis_degrees().into_iter().filter(|&d| d as u32 <= max).map(|d| (d as u32, 1)))
}

/// E_r^{⊗k} as a graded space.
fn e_power(p: Prime, r: u32, k: u32) -> GradedSpace {
    let mut out = GradedSpace::trivial(1);
    for _ in 0..k {
        out = out.tensor(&GradedSpace::e_r(p, r));
    }
    out
}

/// S^μ = S^{μ_1} ⊗ S^{μ_2} ⊗ ⋯
pub fn sym_mu(v: &PolyRep, mu: &[u32]) -> Result<PolyRep, HomalgError> {
    let mut out = symmetric_power(v, mu[0]);
    for &m in &mu[1..] {
        out = tensor(&out, &symmetric_power(v, m))?;
    }
    Ok(out)
}

pub fn verify_friedlander_suslin(ctx: &Ctx, p: Prime, r: u32) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("fs-star").param("p", p.get()).param("r", r);
    run_check(report, |rep| {
        if let Some(n) = ctx.out_of_range(q) {
            rep.notes.push(n);
            return Ok(());
        }
        let max = 2 * q;
        let tw = frobenius_twist(&standard(p, q as usize), r);
        let ext = ctx.ext(&tw, &tw, max)?;
        rep.compare(format!("Ext*(I^({r}), I^({r})), degrees ≤ {max}"), fold(&ext), e_dims(p, r, max), Source::ClosedForm, "E_r: one class in each even degree below 2p^r");
        Ok(())
    })
}

pub fn verify_chalupnik(ctx: &Ctx, p: Prime, r: u32, d: u32, x: Classical) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("chalupnik").param("p", p.get()).param("r", r).param("d", d).param("X", x.name());
    run_check(report, |rep| {
        if let Some(n) = ctx.out_of_range(q * d) {
            rep.notes.push(n);
            return Ok(());
        }
        let m = (q * d) as usize;
        let v = standard(p, m);
        let shift = x.epsilon() * (q * d - d);
        let max = 2 * (q * d - d) + 1;
        let ext = ctx.ext(&x.apply(&v, q * d), &frobenius_twist(&symmetric_power(&v, d), r), max)?;
        // X^{d♯} evaluated on a line
        let line = kuhn_dual(&x.apply(&standard(p, 1), d)).dim() as u64;
        rep.compare(
            format!("Ext*({}^{}, S^{d}({r})), degrees ≤ {max}", x.name(), q * d),
            fold(&ext),
            table([(shift, line)]),
            Source::ClosedForm,
            format!("dim {}^{d}♯(k) in degree ε·(p^r d − d) = {shift}", x.name()),
        );
        Ok(())
    })
}

pub fn verify_twist_stability(ctx: &Ctx, p: Prime, r: u32, f: Base, g: Base) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("twist-stability").param("p", p.get()).param("r", r).param("F", f.name()).param("G", g.name());
    run_check(report, |rep| {
        if f.degree() != g.degree() {
            return Err(HomalgError::Shape(format!("degrees {} and {} differ", f.degree(), g.degree())));
        }
        let deg = f.degree();
        if let Some(n) = ctx.out_of_range(q * deg) {
            rep.notes.push(n);
            return Ok(());
        }
        let max = (2 * q - 2) * deg;
        let v = standard(p, (q * deg) as usize);
        let lhs = ctx.ext(&frobenius_twist(&f.apply(&v)?, r), &frobenius_twist(&g.apply(&v)?, r), max)?;
        let w = standard(p, deg as usize);
        let param = f.apply(&multiplicity_standard(p, &GradedSpace::e_r(p, r).dual(), deg as usize)?)?;
        let rhs = ctx.ext(&param, &g.apply(&w)?, max)?;
        rep.compare(
            format!("Ext*({0}^({r}), {1}^({r})) vs Ext*({0} over E_r, {1}), degrees ≤ {max}", f.name(), g.name()),
            fold(&lhs),
            fold(&rhs).truncate(max),
            Source::Computed,
            "parameterized side computed at the untwisted degree, E_r grading folded in",
        );
        Ok(())
    })
}

pub fn verify_untwisting(ctx: &Ctx, p: Prime, r: u32, n: u32, d: u32, mu: &[u32]) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("untwisting").param("p", p.get()).param("r", r).param("n", n).param("d", d).param("mu", mu.to_vec());
    run_check(report, |rep| {
        if mu.iter().sum::<u32>() != n * d || mu.is_empty() {
            return Err(HomalgError::Shape(format!("μ = {mu:?} is not a composition of n·d = {}", n * d)));
        }
        if let Some(note) = ctx.out_of_range(q * n * d) {
            rep.notes.push(note);
            return Ok(());
        }
        let top = (2 * q - 2) * (n - 1) * d;
        let v = standard(p, (q * n * d) as usize);
        let a = divided_power(&tensor_power(&v, n)?, q * d);
        let b = frobenius_twist(&sym_mu(&v, mu)?, r);
        let lhs = ctx.ext(&a, &b, top + 1)?;
        // Hom(Γ^{d, E_r^{⊗n−1}} ∘ ⊗^n, S^μ), graded by the parameter
        let w = standard(p, (n * d) as usize);
        let e = e_power(p, r, n - 1);
        let src = divided_power(&with_multiplicity(&tensor_power(&w, n)?, &e.dual())?, d);
        let hom = hom_space(&src, &sym_mu(&w, mu)?)?;
        let hom_table = table(hom.dims_by_shift().into_iter().map(|(s, k)| (s as u32, k as u64)));
        rep.compare(
            format!("Ext*(Γ^{} ∘ ⊗^{n}, S^{mu:?}({r})) vs parameterized Hom", q * d),
            fold(&lhs),
            hom_table.clone(),
            Source::Computed,
            "Hom side solved for intertwiners, graded by E_r^{⊗n−1}",
        );
        if d == 1 {
            // Hom(⊗^n, S^μ) is the (1^n)-weight space of S^μ
            let wt = weight_space_dim_oracle(&OracleKind::Sym(mu.to_vec()), &Weight(vec![1; n as usize])).map_err(|e| HomalgError::Internal(e.to_string()))?;
            let mut oracle = ExtTable::default();
            for s in e.basis_degrees() {
                oracle.add(s as u32, 0, wt);
            }
            rep.compare("parameterized Hom vs weight-space count", hom_table, oracle, Source::ClosedForm, "E_r^{⊗n−1} ⊗ (S^μ)_{(1,…,1)}");
        }
        Ok(())
    })
}

/// Ext*(Γ^{p^r}∘⊠², ⊠^{2(r)}) for the bifunctor V ⊗ W.
pub fn verify_box_tensor(ctx: &Ctx, p: Prime, r: u32) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("box-tensor").param("p", p.get()).param("r", r);
    run_check(report, |rep| {
        if let Some(n) = ctx.out_of_range(q) {
            rep.notes.push(n);
            return Ok(());
        }
        let bx = boxtimes(&standard(p, q as usize), &standard(p, q as usize))?;
        let max = 2 * q;
        let ext = ctx.ext(&divided_power(&bx, q), &frobenius_twist(&bx, r), max)?;
        rep.compare(format!("Ext*(Γ^{q} ∘ ⊠², ⊠²({r})), degrees ≤ {max}"), fold(&ext), e_dims(p, r, max), Source::ClosedForm, "E_r");
        Ok(())
    })
}

/// Ext side of the cohomology algebra for d ≤ d_max, against the symmetric-algebra series.
pub fn cohomology_hilbert_series(
    ctx: &Ctx,
    g: Group,
    p: Prime,
    r: u32,
    l: usize,
    d_max: u32,
    closed_form_only: bool,
) -> Result<(HilbertTable, TheoremReport), HomalgError> {
    let q = p.get().pow(r);
    let predicted = hilbert_table(g, p, r, l, d_max);
    let report = TheoremReport::new("hilbert-3311").param("group", g.name()).param("p", p.get()).param("r", r).param("l", l).param("dmax", d_max);
    let rep = run_check(report, |rep| {
        if p.get() == 2 {
            return Err(HomalgError::Shape("the group cases need an odd prime".into()));
        }
        let gens = generator_degrees(g, p, r, l);
        let monomials = enumerate_monomials(&gens, d_max);
        for d in 0..=d_max {
            rep.compare(format!("d={d}: series vs monomials"), row_table(&monomials, d), row_table(&predicted, d), Source::ClosedForm, "Π (1 − t^{2h} s)^{-1}");
        }
        if closed_form_only {
            return Ok(());
        }
        for d in 1..=d_max {
            if let Some(n) = ctx.out_of_range(2 * q * d) {
                rep.notes.push(format!("Ext side d={d}: {n}"));
                continue;
            }
            let v = standard(p, (2 * q * d) as usize);
            let a = divided_power(&g.x_g(&v), q * d);
            let uv = with_multiplicity(&v, &GradedSpace::trivial(l))?;
            let b = frobenius_twist(&symmetric_power(&uv, 2 * d), r);
            let ext = ctx.ext(&a, &b, 2 * (q - 1) * d + 1)?;
            rep.compare(
                format!("d={d}: Ext*(Γ^{} ∘ X_G, S^{}({r}) over k^{l})", q * d, 2 * d),
                fold(&ext),
                row_table(&predicted, d),
                Source::ClosedForm,
                "generators (h|i|j) in degree 2h",
            );
        }
        Ok(())
    })?;
    Ok((predicted, rep))
}

fn row_table(t: &HilbertTable, d: u32) -> ExtTable {
    table(t.row(d))
}

/// Degree-0 invariants: dim Hom(Γ^d ∘ X_G, S^{2d} over k^ℓ) against monomials in the (i|j).
pub fn classical_invariants_check(_ctx: &Ctx, g: Group, p: Prime, l: usize, d_max: u32) -> Result<TheoremReport, HomalgError> {
    let report = TheoremReport::new("invariants-ft").param("group", g.name()).param("p", p.get()).param("l", l).param("dmax", d_max);
    run_check(report, |rep| {
        if p.get() == 2 {
            return Err(HomalgError::Shape("the group cases need an odd prime".into()));
        }
        let n = g.pairs(l).len() as u64;
        let series = hilbert_table(g, p, 0, l, d_max);
        for d in 0..=d_max {
            let count = if n == 0 { (d == 0) as u64 } else { binomial(n + d as u64 - 1, d as u64) as u64 };
            let predicted = table([(0, count)]);
            rep.compare(format!("d={d}: monomials vs series"), row_table(&series, d), predicted.clone(), Source::ClosedForm, "C(N+d−1, d) with N pairs");
            if d == 0 {
                continue;
            }
            // Hom(F, S^λ) ≅ (F♯)_λ, summed over the compositions λ of 2d with ℓ parts
            let f_l = divided_power(&g.x_g(&standard(p, l)), d);
            let yoneda: u64 = kuhn_dual(&f_l).weight_dims().values().map(|&k| k as u64).sum();
            rep.compare(format!("d={d}: weight spaces of (Γ^{d} ∘ X_G)♯(k^{l})"), table([(0, yoneda)]), predicted.clone(), Source::ClosedForm, "Yoneda over S^{2d}(k^ℓ ⊗ V) = ⊕ S^λ");
            if d <= 2 && l <= 2 {
                let v = standard(p, 2 * d as usize);
                let a = divided_power(&g.x_g(&v), d);
                let b = symmetric_power(&with_multiplicity(&v, &GradedSpace::trivial(l))?, 2 * d);
                let hom = hom_space(&a, &b)?;
                rep.compare(format!("d={d}: Hom(Γ^{d} ∘ X_G, S^{} over k^{l})", 2 * d), table([(0, hom.dim() as u64)]), predicted, Source::ClosedForm, "intertwiners solved directly");
            }
        }
        Ok(())
    })
}

/// Functors whose derived ℓ^r has a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LellCase {
    /// X^d in one variable, d divisible by p^r
    Power(Classical, u32),
    /// X^{p^r e} ∘ ⊗^n
    Composite { x: Classical, e: u32, n: u32 },
    /// F^{(r)}
    Twisted(Base),
}

impl LellCase {
    pub fn name(self) -> String {
        match self {
            LellCase::Power(x, d) => format!("{}{d}", x.name()),
            LellCase::Composite { x, e, n } => format!("{}(p^r·{e}) o tensor{n}", x.name()),
            LellCase::Twisted(b) => format!("twist({})", b.name()),
        }
    }
}

pub fn verify_lell_homology(ctx: &Ctx, p: Prime, r: u32, case: LellCase) -> Result<TheoremReport, HomalgError> {
    let q = p.get().pow(r);
    let report = TheoremReport::new("lell").param("p", p.get()).param("r", r).param("F", case.name());
    run_check(report, |rep| {
        let e_r = GradedSpace::e_r(p, r);
        // (F, closed form with aux = homological degree before the shift, shift)
        let (degree, build): (u32, Box<dyn Fn() -> Result<(PolyRep, PolyRep, u32), HomalgError>>) = match case {
            LellCase::Power(x, d) => {
                if d % q != 0 {
                    return Err(HomalgError::Shape(format!("p^r = {q} does not divide {d}")));
                }
                (
                    d,
                    Box::new(move || {
                        let v = standard(p, d as usize);
                        Ok((x.apply(&v, d), x.apply(&v, d / q), x.epsilon() * (d - d / q)))
                    }),
                )
            }
            LellCase::Composite { x, e, n } => (
                q * e * n,
                Box::new(move || {
                    let v = standard(p, (q * e * n) as usize);
                    let t = tensor_power(&v, n)?;
                    let param = with_multiplicity(&t, &e_power(p, r, n - 1))?;
                    Ok((x.apply(&t, q * e), x.apply(&param, e), x.epsilon() * (q * e - e)))
                }),
            ),
            LellCase::Twisted(b) => {
                let e_r = e_r.clone();
                (
                    q * b.degree(),
                    Box::new(move || {
                        let v = standard(p, (q * b.degree()) as usize);
                        Ok((frobenius_twist(&b.apply(&v)?, r), b.apply(&with_multiplicity(&v, &e_r)?)?, 0))
                    }),
                )
            }
        };
        if let Some(n) = ctx.out_of_range(degree) {
            rep.notes.push(n);
            return Ok(());
        }
        let (f, closed, shift) = build()?;
        let mut predicted: BTreeMap<MultiWeight, ExtTable> = BTreeMap::new();
        let mut top = 0;
        for i in 0..closed.dim() {
            let w = closed.weight(i);
            let deg = closed.aux_degree(i) + shift as i64;
            assert!(deg >= 0);
            top = top.max(deg as u32);
            if w.is_dominant() {
                predicted.entry(w.clone()).or_default().add(deg as u32, 0, 1);
            }
        }
        let h = derived_ell_r(&f, r, top as usize + 1, &ctx.opts)?;
        let mut computed: BTreeMap<MultiWeight, ExtTable> = BTreeMap::new();
        for (i, slot) in h.degrees.iter().enumerate() {
            for ((w, aux), &k) in slot {
                computed.entry(w.clone()).or_default().add(i as u32, *aux, k);
            }
        }
        let mut totals_c = ExtTable::default();
        for (i, k) in h.totals() {
            totals_c.add(i as u32, 0, k);
        }
        let mut totals_p = ExtTable::default();
        for i in 0..closed.dim() {
            totals_p.add((closed.aux_degree(i) + shift as i64) as u32, 0, 1);
        }
        rep.compare(format!("H_*Lℓ^{r}({}) total dims", case.name()), totals_c, totals_p, Source::ClosedForm, format!("closed form shifted by {shift}"));
        let weights: Vec<MultiWeight> = computed.keys().chain(predicted.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        for w in weights {
            rep.compare(
                format!("weight {w}"),
                computed.get(&w).cloned().unwrap_or_default(),
                predicted.get(&w).cloned().unwrap_or_default(),
                Source::ClosedForm,
                "per dominant weight",
            );
        }
        Ok(())
    })
}
