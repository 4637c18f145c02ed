//! The `spf` command line: functor expressions in, integer tables out.

pub mod expr;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spf_core::cache::ResolutionCache;
use spf_core::combinatorics::{MultiWeight, OracleKind, Weight};
use spf_core::ell::derived_ell_r;
use spf_core::field::Prime;
use spf_core::hom::hom_space;
use spf_core::polyrep::PolyRep;
use spf_core::resolution::{Engine, EngineOptions, ExtTable, HomalgError};
use spf_theorems::*;
use thiserror::Error;

use expr::{parse, Expr, ExprError};
pub use output::Format;
use output::Out;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "spf", version, about = "Ext groups and cohomology tables for strict polynomial functors")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// where resolutions are cached; nothing is cached when unset
    #[arg(long, global = true, env = "SPF_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    max_layer_dim: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    /// dimension of the standard module in each variable (default: the degree)
    #[arg(long)]
    eval_dim: Option<usize>,
    /// allow an evaluation dimension below the degree, where Ext need not be faithful
    #[arg(long)]
    unsafe_eval_dim: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the space of natural transformations A → B
    Hom {
        a: String,
        b: String,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        eval: EvalArgs,
        /// include the basis maps as (row, column, value) triplets
        #[arg(long)]
        basis: bool,
    },
    /// Ext*(A, B) up to a cohomological degree
    Ext {
        a: String,
        b: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 4)]
        max_deg: u32,
        #[command(flatten)]
        eval: EvalArgs,
        /// list dimensions by (degree, aux degree)
        #[arg(long)]
        show_aux: bool,
    },
    /// Minimal projective resolution, layer by layer
    Resolve {
        expr: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 4)]
        length: usize,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Homology of the untwisting functor applied to a resolution
    Lell {
        expr: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 4)]
        length: usize,
    },
    /// Bigraded Hilbert table of the cohomology algebra
    Hilbert {
        #[arg(long, value_parser = parse_group)]
        group: Group,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        dmax: u32,
        #[arg(long)]
        closed_form_only: bool,
    },
    /// Check a theorem on concrete parameters
    Verify(VerifyArgs),
    /// Weight-space dimension by counting
    Oracle {
        expr: String,
        /// comma separated, e.g. 2,1,0
        #[arg(long)]
        weight: String,
        /// only matters for expressions with twists
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// Inspect or empty the resolution cache
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    theorem: TheoremId,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// chalupnik and untwisting: the degree d
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// chalupnik: gamma, wedge or sym
    #[arg(long, default_value = "gamma")]
    x: String,
    /// twist-stability: source functor; lell: the functor, as an expression
    #[arg(long)]
    f: Option<String>,
    /// twist-stability: target functor
    #[arg(long)]
    g: Option<String>,
    /// untwisting: number of tensor factors
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// untwisting: the weight of S^mu, comma separated
    #[arg(long, default_value = "2")]
    mu: String,
    #[arg(long, value_parser = parse_group, default_value = "o")]
    group: Group,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    dmax: u32,
    #[arg(long)]
    closed_form_only: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremId {
    FsStar,
    Chalupnik,
    TwistStability,
    Untwisting,
    BoxTensor,
    #[value(name = "hilbert-3311")]
    Hilbert3311,
    InvariantsFt,
    Lell,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CacheAction {
    Stats,
    Clear,
}

fn parse_group(s: &str) -> Result<Group, String> {
    Group::parse(s).ok_or_else(|| format!("unknown group '{s}' (expected sp or o)"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Homalg(#[from] HomalgError),
    #[error("cache: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Expr(_) => EXIT_USAGE,
            CliError::Homalg(HomalgError::Guard { .. }) => EXIT_GUARD,
            CliError::Homalg(HomalgError::Shape(_) | HomalgError::Rep(_)) => EXIT_USAGE,
            CliError::Homalg(HomalgError::Internal(_)) | CliError::Io(_) => EXIT_FAIL,
        }
    }
}

/// What a run printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse the arguments (program name first) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => Outcome { code: out.code, stdout: out.render(cli.format), stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn prime(p: u32) -> Result<Prime, CliError> {
    Prime::new(p).map_err(|e| CliError::Usage(format!("--p {p}: {e}")))
}

fn options(cli: &Cli) -> EngineOptions {
    let mut o = EngineOptions::default();
    if let Some(n) = cli.max_layer_dim {
        o.max_layer_dim = n;
    }
    if let Some(s) = cli.seed {
        o.seed = s;
    }
    o
}

fn cache(cli: &Cli) -> Option<ResolutionCache> {
    cli.cache_dir.as_ref().map(ResolutionCache::new)
}

fn ctx(cli: &Cli) -> Ctx {
    Ctx { opts: options(cli), cache: cache(cli), ..Ctx::default() }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("{what}: expected comma separated naturals, got '{s}'")))
}

/// Evaluation dimensions for a set of expressions sharing their variables.
fn eval_dims(p: Prime, exprs: &[&Expr], eval: &EvalArgs) -> Result<Vec<usize>, CliError> {
    let arity = exprs[0].arity();
    if exprs.iter().any(|e| e.arity() != arity) {
        return Err(CliError::Usage("the expressions have different numbers of variables".into()));
    }
    let mut degrees = vec![0u32; arity];
    for e in exprs {
        for (d, x) in degrees.iter_mut().zip(e.twisted_degrees(p)?) {
            *d = (*d).max(x);
        }
    }
    let dims: Vec<usize> = match eval.eval_dim {
        None => degrees.iter().map(|&d| d.max(1) as usize).collect(),
        Some(m) => {
            if let Some(d) = degrees.iter().find(|&&d| (m as u32) < d) {
                if !eval.unsafe_eval_dim {
                    return Err(CliError::Usage(format!(
                        "--eval-dim {m} is below the degree {d}; Ext is only faithful from the degree on (pass --unsafe-eval-dim to proceed)"
                    )));
                }
            }
            vec![m; arity]
        }
    };
    Ok(dims)
}

fn dispatch(cli: &Cli) -> Result<Out, CliError> {
    match &cli.command {
        Command::Hom { a, b, p, eval, basis } => hom_cmd(prime(*p)?, a, b, eval, *basis),
        Command::Ext { a, b, p, max_deg, eval, show_aux } => ext_cmd(cli, prime(*p)?, a, b, *max_deg, eval, *show_aux),
        Command::Resolve { expr, p, length, eval } => resolve_cmd(cli, prime(*p)?, expr, *length, eval),
        Command::Lell { expr, p, r, length } => lell_cmd(cli, prime(*p)?, expr, *r, *length),
        Command::Hilbert { group, p, r, l, dmax, closed_form_only } => {
            let (t, mut rep) = cohomology_hilbert_series(&ctx(cli), *group, prime(*p)?, *r, *l, *dmax, *closed_form_only)?;
            rep.wall_ms = None;
            Ok(output::hilbert(*group, *p, *r, *l, *dmax, &t, &rep))
        }
        Command::Verify(v) => verify_cmd(cli, v),
        Command::Oracle { expr, weight, p } => oracle_cmd(prime(*p)?, expr, weight),
        Command::Cache { action } => {
            let c = cache(cli).ok_or_else(|| CliError::Usage("no cache directory: pass --cache-dir or set SPF_CACHE_DIR".into()))?;
            match action {
                CacheAction::Stats => Ok(output::cache_stats(&c.dir().display().to_string(), &c.stats()?)),
                CacheAction::Clear => Ok(output::cache_cleared(&c.dir().display().to_string(), c.clear()?)),
            }
        }
    }
}

#[derive(Serialize)]
struct HomJson {
    schema: &'static str,
    p: u32,
    a: String,
    b: String,
    eval_dims: Vec<usize>,
    faithful: bool,
    dim: usize,
    /// aux degree ↦ number of basis maps
    by_aux: BTreeMap<i64, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<Vec<(usize, usize, u32)>>>,
}

fn hom_cmd(p: Prime, a: &str, b: &str, eval: &EvalArgs, basis: bool) -> Result<Out, CliError> {
    let (ea, eb) = (parse(a)?, parse(b)?);
    let dims = eval_dims(p, &[&ea, &eb], eval)?;
    let (ma, mb) = (ea.eval(p, &dims)?, eb.eval(p, &dims)?);
    let h = hom_space(&ma, &mb)?;
    let mut by_aux = BTreeMap::new();
    for &s in &h.aux_shifts {
        *by_aux.entry(s).or_insert(0) += 1;
    }
    let rows = by_aux.iter().map(|(s, n)| vec![s.to_string(), n.to_string()]).collect();
    let json = HomJson {
        schema: "spf.hom/1",
        p: p.get(),
        a: ea.to_string(),
        b: eb.to_string(),
        eval_dims: dims,
        faithful: h.faithful,
        dim: h.dim(),
        by_aux,
        basis: basis.then(|| h.basis.iter().map(|m| m.triplets()).collect()),
    };
    Ok(Out::table(&json, &["aux", "dim"], rows))
}

#[derive(Serialize)]
struct ExtJson {
    schema: &'static str,
    p: u32,
    a: String,
    b: String,
    eval_dims: Vec<usize>,
    max_deg: u32,
    /// cohomological degree ↦ dimension
    table: BTreeMap<u32, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<ExtTable>,
}

fn ext_cmd(cli: &Cli, p: Prime, a: &str, b: &str, max_deg: u32, eval: &EvalArgs, show_aux: bool) -> Result<Out, CliError> {
    let (ea, eb) = (parse(a)?, parse(b)?);
    let dims = eval_dims(p, &[&ea, &eb], eval)?;
    let (ma, mb) = (ea.eval(p, &dims)?, eb.eval(p, &dims)?);
    let t = ctx(cli).ext(&ma, &mb, max_deg)?;
    let rows = if show_aux {
        t.entries.iter().map(|(&(d, x), n)| vec![d.to_string(), x.to_string(), n.to_string()]).collect()
    } else {
        t.by_degree().iter().map(|(d, n)| vec![d.to_string(), n.to_string()]).collect()
    };
    let header: &[&str] = if show_aux { &["degree", "aux", "dim"] } else { &["degree", "dim"] };
    let json = ExtJson {
        schema: "spf.ext/1",
        p: p.get(),
        a: ea.to_string(),
        b: eb.to_string(),
        eval_dims: dims,
        max_deg,
        table: t.by_degree(),
        entries: show_aux.then_some(t),
    };
    Ok(Out::table(&json, header, rows))
}

#[derive(Serialize)]
struct LayerJson {
    index: usize,
    rank: usize,
    realized_dim: u128,
    summands: Vec<SummandJson>,
}

#[derive(Serialize)]
struct SummandJson {
    weight: String,
    aux: i64,
}

#[derive(Serialize)]
struct ResolveJson {
    schema: &'static str,
    p: u32,
    expr: String,
    eval_dims: Vec<usize>,
    length: usize,
    terminated: bool,
    layers: Vec<LayerJson>,
}

fn resolve_cmd(cli: &Cli, p: Prime, src: &str, length: usize, eval: &EvalArgs) -> Result<Out, CliError> {
    let e = parse(src)?;
    let dims = eval_dims(p, &[&e], eval)?;
    let m = e.eval(p, &dims)?;
    let mut engine = Engine::for_rep(&m, options(cli));
    let res = match cache(cli) {
        Some(c) => c.resolve(&mut engine, &m, length)?,
        None => engine.resolve(&m, length)?,
    };
    let layers: Vec<LayerJson> = res
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| LayerJson {
            index: i,
            rank: l.len(),
            realized_dim: res.realized_dim(i),
            summands: l.iter().map(|s| SummandJson { weight: s.weight.to_string(), aux: s.aux }).collect(),
        })
        .collect();
    let rows = layers
        .iter()
        .map(|l| {
            let ws: Vec<String> = l.summands.iter().map(|s| if s.aux == 0 { s.weight.clone() } else { format!("{}[{}]", s.weight, s.aux) }).collect();
            vec![l.index.to_string(), l.rank.to_string(), l.realized_dim.to_string(), ws.join(" ")]
        })
        .collect();
    let json = ResolveJson { schema: "spf.resolve/1", p: p.get(), expr: e.to_string(), eval_dims: dims, length, terminated: res.terminated, layers };
    Ok(Out::table(&json, &["layer", "rank", "realized_dim", "summands"], rows))
}

#[derive(Serialize)]
struct LellEntry {
    degree: usize,
    weight: String,
    aux: i64,
    dim: u64,
}

#[derive(Serialize)]
struct LellJson {
    schema: &'static str,
    p: u32,
    r: u32,
    expr: String,
    eval_dims: Vec<usize>,
    length: usize,
    /// homological degree ↦ total dimension
    totals: BTreeMap<usize, u64>,
    /// dominant weights only
    entries: Vec<LellEntry>,
}

fn lell_cmd(cli: &Cli, p: Prime, src: &str, r: u32, length: usize) -> Result<Out, CliError> {
    let e = parse(src)?;
    let dims = eval_dims(p, &[&e], &EvalArgs { eval_dim: None, unsafe_eval_dim: false })?;
    let f = e.eval(p, &dims)?;
    let h = derived_ell_r(&f, r, length, &options(cli))?;
    let mut entries = Vec::new();
    for (i, t) in h.degrees.iter().enumerate() {
        for ((w, aux), &n) in t {
            entries.push(LellEntry { degree: i, weight: w.to_string(), aux: *aux, dim: n });
        }
    }
    let rows = entries.iter().map(|x| vec![x.degree.to_string(), x.weight.clone(), x.aux.to_string(), x.dim.to_string()]).collect();
    let json = LellJson { schema: "spf.lell/1", p: p.get(), r, expr: e.to_string(), eval_dims: dims, length, totals: h.totals(), entries };
    Ok(Out::table(&json, &["degree", "weight", "aux", "dim"], rows))
}

fn classical(s: &str) -> Result<Classical, CliError> {
    Classical::parse(s).ok_or_else(|| CliError::Usage(format!("unknown functor '{s}' (expected gamma, wedge or sym)")))
}

fn base_of(e: &Expr) -> Option<Base> {
    Some(match e {
        Expr::Gamma(d) => Base::Classical(Classical::Gamma, *d),
        Expr::Wedge(d) => Base::Classical(Classical::Wedge, *d),
        Expr::Sym(d) => Base::Classical(Classical::Sym, *d),
        Expr::TensorPow(n) => Base::Tensor(*n),
        _ => return None,
    })
}

fn base_arg(s: &str) -> Result<Base, CliError> {
    base_of(&parse(s)?).ok_or_else(|| CliError::Usage(format!("'{s}' is not one of gamma(d), wedge(d), sym(d), tensorpow(n)")))
}

/// X(d), twist(B, r) or X(p^r e) o tensorpow(n).
fn lell_case(s: &str, p: Prime, r: u32) -> Result<LellCase, CliError> {
    let e = parse(s)?;
    let q = p.get().pow(r);
    let bad = || CliError::Usage(format!("lell: '{s}' is not X(d), twist(B,{r}) or X(p^r e) o tensorpow(n)"));
    match &e {
        Expr::Twist(b, rr) if *rr == r => base_of(b).map(LellCase::Twisted).ok_or_else(bad),
        Expr::Compose(x, t) => match (base_of(x), &**t) {
            (Some(Base::Classical(x, d)), Expr::TensorPow(n)) if d % q == 0 => Ok(LellCase::Composite { x, e: d / q, n: *n }),
            _ => Err(bad()),
        },
        _ => match base_of(&e) {
            Some(Base::Classical(x, d)) => Ok(LellCase::Power(x, d)),
            _ => Err(bad()),
        },
    }
}

fn verify_cmd(cli: &Cli, v: &VerifyArgs) -> Result<Out, CliError> {
    let c = ctx(cli);
    let p = prime(v.p)?;
    let mut rep = match v.theorem {
        TheoremId::FsStar => verify_friedlander_suslin(&c, p, v.r)?,
        TheoremId::Chalupnik => verify_chalupnik(&c, p, v.r, v.d, classical(&v.x)?)?,
        TheoremId::TwistStability => {
            let f = base_arg(v.f.as_deref().unwrap_or("gamma(2)"))?;
            let g = base_arg(v.g.as_deref().unwrap_or("sym(2)"))?;
            verify_twist_stability(&c, p, v.r, f, g)?
        }
        TheoremId::Untwisting => verify_untwisting(&c, p, v.r, v.n, v.d, &parse_list(&v.mu, "--mu")?)?,
        TheoremId::BoxTensor => verify_box_tensor(&c, p, v.r)?,
        TheoremId::Hilbert3311 => cohomology_hilbert_series(&c, v.group, p, v.r, v.l, v.dmax, v.closed_form_only)?.1,
        TheoremId::InvariantsFt => classical_invariants_check(&c, v.group, p, v.l, v.dmax)?,
        TheoremId::Lell => {
            let f = v.f.as_deref().ok_or_else(|| CliError::Usage("lell needs --f, e.g. --f \"wedge(3)\"".into()))?;
            verify_lell_homology(&c, p, v.r, lell_case(f, p, v.r)?)?
        }
    };
    // timings would make identical runs print different bytes
    rep.wall_ms = None;
    Ok(output::report(&rep))
}

#[derive(Serialize)]
struct OracleJson {
    schema: &'static str,
    expr: String,
    weight: Vec<u32>,
    dim: u64,
    /// "count" for the combinatorial oracle, "module" when the expression had to be built
    source: &'static str,
}

fn oracle_cmd(p: Prime, src: &str, weight: &str) -> Result<Out, CliError> {
    let e = parse(src)?;
    let w = Weight(parse_list(weight, "--weight")?);
    let kind = match &e {
        Expr::Gamma(d) => Some(OracleKind::Gamma(vec![*d])),
        Expr::Sym(d) => Some(OracleKind::Sym(vec![*d])),
        Expr::Wedge(d) => Some(OracleKind::Wedge(vec![*d])),
        Expr::TensorPow(n) => Some(OracleKind::Tensor(*n)),
        Expr::GammaMu(mu) => Some(OracleKind::Gamma(mu.clone())),
        Expr::SymMu(mu) => Some(OracleKind::Sym(mu.clone())),
        _ => None,
    };
    let (dim, source) = match kind {
        Some(k) => (spf_core::combinatorics::weight_space_dim_oracle(&k, &w).map_err(|e| CliError::Usage(e.to_string()))?, "count"),
        None => {
            if e.arity() != 1 {
                return Err(CliError::Usage("oracle takes a functor of one variable".into()));
            }
            let m: PolyRep = e.eval(p, &[w.len()])?;
            let dims = m.weight_dims();
            (dims.get(&MultiWeight::single(w.clone())).copied().unwrap_or(0) as u64, "module")
        }
    };
    let json = OracleJson { schema: "spf.oracle/1", expr: e.to_string(), weight: w.0.clone(), dim, source };
    Ok(Out::table(&json, &["weight", "dim"], vec![vec![w.to_string(), dim.to_string()]]))
}
