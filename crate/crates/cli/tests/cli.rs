use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;
use spf_cli::expr::{parse, Expr, ExprError, Space};
use spf_cli::{run, Outcome};

fn spf(args: &[&str]) -> Outcome {
    let mut all = vec!["spf"];
    all.extend_from_slice(args);
    run(all)
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

#[test]
fn fs_star_passes() {
    let o = spf(&["verify", "fs-star", "--p", "2", "--r", "1"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["schema"], "spf.report/1");
    assert_eq!(v["verdict"], "pass");
    let computed = &v["comparisons"][0]["computed"];
    let degrees: Vec<u64> = computed.as_array().unwrap().iter().map(|e| e["degree"].as_u64().unwrap()).collect();
    assert_eq!(degrees, vec![0, 2]);
}

#[test]
fn verify_exit_code_follows_verdict() {
    for args in [
        vec!["verify", "chalupnik", "--p", "3", "--x", "wedge"],
        vec!["verify", "hilbert-3311", "--p", "3", "--group", "sp"],
        vec!["verify", "invariants-ft", "--p", "3", "--group", "o", "--l", "2", "--dmax", "2"],
        vec!["verify", "fs-star", "--p", "2", "--max-layer-dim", "1"],
    ] {
        let o = spf(&args);
        let expected = match json(&o)["verdict"].as_str().unwrap() {
            "pass" => 0,
            "fail" => 1,
            "not-attempted" => 3,
            v => panic!("verdict {v}"),
        };
        assert_eq!(o.code, expected, "{args:?}");
    }
}

#[test]
fn oracle_counts_weight_spaces() {
    // S²(k²) in weight (1,1) is spanned by e₁e₂ alone
    let o = spf(&["oracle", "sym(2)", "--weight", "1,1"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["dim"], 1);
    assert_eq!(json(&spf(&["oracle", "tensorpow(2)", "--weight", "1,1"]))["dim"], 2);
    assert_eq!(json(&spf(&["oracle", "gamma[1,1]", "--weight", "1,1"]))["dim"], 2);
    let built = spf(&["oracle", "wedge(2) o sym(2)", "--weight", "2,2"]);
    assert_eq!(json(&built)["source"], "module");
    assert_eq!(spf(&["oracle", "sym(2)", "--weight", "1,2"]).code, 2);
}

#[test]
fn syntax_errors_name_the_token() {
    let o = spf(&["ext", "gamma(2) o o", "I", "--p", "2"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("token 3"), "{}", o.stderr);
    match parse("gamma(2) o o") {
        Err(ExprError::Syntax { token, .. }) => assert_eq!(token, 3),
        other => panic!("{other:?}"),
    }
    match parse("twist(sym(2) 1)") {
        Err(ExprError::Syntax { token, column, .. }) => assert_eq!((token, column), (3, 14)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn degree_mismatch_is_a_usage_error() {
    assert_eq!(spf(&["hom", "sum(sym(2),I)", "I", "--p", "2"]).code, 2);
}

#[test]
fn evaluation_dimension_below_degree_needs_consent() {
    let low = spf(&["ext", "gamma(3)", "sym(3)", "--p", "3", "--eval-dim", "2"]);
    assert_eq!(low.code, 2);
    assert!(low.stderr.contains("--unsafe-eval-dim"));
    let ok = spf(&["ext", "gamma(3)", "sym(3)", "--p", "3", "--eval-dim", "2", "--unsafe-eval-dim"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(json(&ok)["eval_dims"], serde_json::json!([2]));
}

#[test]
fn ext_of_twisted_identity() {
    let o = spf(&["ext", "twist(I,1)", "twist(I,1)", "--p", "3", "--max-deg", "6"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["schema"], "spf.ext/1");
    assert_eq!(v["table"], serde_json::json!({"0": 1, "2": 1, "4": 1}));
}

#[test]
fn aux_grading_is_shown_on_request() {
    let o = spf(&["ext", "twist(I,1)", "twist(param(I,E_1),1)", "--p", "3", "--max-deg", "2", "--show-aux", "--format", "csv"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    // E_1 in the cohomological degree, E_1^∨ in the aux degree
    let mut expected = String::from("degree,aux,dim\n");
    for d in [0, 2] {
        for a in [-4, -2, 0] {
            expected += &format!("{d},{a},1\n");
        }
    }
    assert_eq!(o.stdout, expected);
}

#[test]
fn resource_guard_exits_three() {
    let o = spf(&["resolve", "sym(3)", "--p", "3", "--max-layer-dim", "2"]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("resource guard"));
}

#[test]
fn identical_runs_print_identical_bytes() {
    for args in [
        vec!["verify", "chalupnik", "--p", "2", "--x", "sym"],
        vec!["resolve", "wedge(2)", "--p", "3", "--length", "3"],
        vec!["hilbert", "--group", "o", "--p", "3", "--dmax", "3", "--closed-form-only"],
        vec!["lell", "sym(3)", "--p", "3", "--length", "2"],
    ] {
        let a = spf(&args);
        let b = spf(&args);
        assert_eq!(a, b);
        assert!(!a.stdout.contains("wall_ms"));
    }
}

#[test]
fn seed_does_not_change_tables() {
    let a = spf(&["resolve", "wedge(2) o wedge(2)", "--p", "2", "--length", "4"]);
    let b = spf(&["resolve", "wedge(2) o wedge(2)", "--p", "2", "--length", "4", "--seed", "99"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    let ranks = |o: &Outcome| json(o)["layers"].as_array().unwrap().iter().map(|l| l["rank"].clone()).collect::<Vec<_>>();
    assert_eq!(ranks(&a), ranks(&b));
}

#[test]
fn formats() {
    let args = ["hilbert", "--group", "o", "--p", "3", "--dmax", "1", "--closed-form-only"];
    let v = json(&spf(&args));
    assert_eq!(v["schema"], "spf.hilbert/1");
    assert_eq!(v["table"]["1"], serde_json::json!({"0": 1, "2": 1, "4": 1}));
    let mut csv = args.to_vec();
    csv.extend(["--format", "csv"]);
    assert_eq!(spf(&csv).stdout, "d,degree,dim\n0,0,1\n1,0,1\n1,2,1\n1,4,1\n");
    let mut md = args.to_vec();
    md.extend(["--format", "md"]);
    assert!(spf(&md).stdout.starts_with("| d | degree | dim |\n|---|---|---|\n"));
    let rep = spf(&["verify", "fs-star", "--p", "3", "--format", "md"]);
    assert!(rep.stdout.starts_with("### fs-star: pass"));
}

#[test]
fn lell_of_a_twist() {
    let o = spf(&["lell", "twist(I,1)", "--p", "2", "--length", "3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    // ℓ(I^(1)) resolves to I over E_1: one copy of I in degrees 0 and 2
    assert_eq!(json(&o)["totals"], serde_json::json!({"0": 2, "2": 2}));
}

#[test]
fn hom_counts_maps() {
    let o = spf(&["hom", "tensorpow(2)", "tensorpow(2)", "--p", "3", "--basis"]);
    let v = json(&o);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);
    // Γ²(V ⊗ W) → V⊗V ⊗ W⊗W: the diagonal, and the diagonal followed by swapping the W factors
    assert_eq!(json(&spf(&["hom", "gamma(2) o box(I,I)", "tensor(box(I,I),box(I,I))", "--p", "2"]))["dim"], 2);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = spf(&["resolve", "sym(2)", "--p", "2", "--cache-dir", d]);
    let again = spf(&["resolve", "sym(2)", "--p", "2", "--cache-dir", d]);
    assert_eq!(first, again);
    let st = json(&spf(&["cache", "stats", "--cache-dir", d]));
    assert_eq!(st["entries"], 1);
    assert_eq!(json(&spf(&["cache", "clear", "--cache-dir", d]))["removed"], 1);
    assert_eq!(json(&spf(&["cache", "stats", "--cache-dir", d]))["entries"], 0);
}

#[test]
fn binary_honours_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_spf");
    let out = Command::new(bin).args(["resolve", "I", "--p", "2"]).env("SPF_CACHE_DIR", dir.path()).output().unwrap();
    assert!(out.status.success());
    let out = Command::new(bin).args(["cache", "stats"]).env("SPF_CACHE_DIR", dir.path()).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"], 1);
    let out = Command::new(bin).args(["cache", "stats"]).env_remove("SPF_CACHE_DIR").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Id),
        (1u32..4).prop_map(Expr::Gamma),
        (1u32..4).prop_map(Expr::Sym),
        (1u32..4).prop_map(Expr::Wedge),
        (1u32..4).prop_map(Expr::TensorPow),
        prop::collection::vec(1u32..3, 1..3).prop_map(Expr::GammaMu),
        prop::collection::vec(1u32..3, 1..3).prop_map(Expr::SymMu),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Compose(Box::new(a), Box::new(b))),
            (inner.clone(), 1u32..3).prop_map(|(a, r)| Expr::Twist(Box::new(a), r)),
            inner.clone().prop_map(|a| Expr::Dual(Box::new(a))),
            (inner.clone(), prop_oneof![(1usize..3).prop_map(Space::Trivial), (1u32..3).prop_map(Space::E)]).prop_map(|(a, u)| Expr::Param(Box::new(a), u)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Box_(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Tensor(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Sum(Box::new(a.clone()), Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        match e.degrees() {
            Ok(_) => prop_assert_eq!(parse(&text).unwrap(), e),
            Err(_) => prop_assert!(matches!(parse(&text), Err(ExprError::Degree(_)))),
        }
    }
}
