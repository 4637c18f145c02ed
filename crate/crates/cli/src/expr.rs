//! Functor expressions: parsing, printing, degrees and evaluation to modules.
//!
//! ```text
//! expr  := term { "o" term }                       composition, left associative
//! term  := atom | "(" expr ")"
//!        | "twist(" expr "," nat ")" | "dual(" expr ")" | "param(" expr "," space ")"
//!        | "box(" expr "," expr ")" | "tensor(" expr "," expr ")" | "sum(" expr "," expr ")"
//! atom  := "I" | "gamma(" nat ")" | "sym(" nat ")" | "wedge(" nat ")" | "tensorpow(" nat ")"
//!        | "gamma[" weight "]" | "sym[" weight "]"
//! space := "k(" nat ")" | "E_" nat
//! ```

use std::fmt;

use spf_core::field::Prime;
use spf_core::polyrep::*;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Space {
    /// k^l with the trivial grading
    Trivial(usize),
    /// E_r
    E(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Id,
    Gamma(u32),
    Sym(u32),
    Wedge(u32),
    TensorPow(u32),
    GammaMu(Vec<u32>),
    SymMu(Vec<u32>),
    Compose(Box<Expr>, Box<Expr>),
    Twist(Box<Expr>, u32),
    Dual(Box<Expr>),
    Param(Box<Expr>, Space),
    Box_(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at token {token} (column {column}): {message}")]
    Syntax { token: usize, column: usize, message: String },
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    /// a name with its argument, e.g. gamma(3), sym[2,1], k(2), E_1, I
    Atom(String, Arg),
    /// a constructor name followed by "("
    Open(String),
    LParen,
    RParen,
    Comma,
    Compose,
    Nat(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Arg {
    None,
    Nat(u32),
    Weight(Vec<u32>),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(n, Arg::None) => format!("'{n}'"),
            Tok::Atom(n, Arg::Nat(k)) if n == "E" => format!("'E_{k}'"),
            Tok::Atom(n, Arg::Nat(k)) => format!("'{n}({k})'"),
            Tok::Atom(n, Arg::Weight(w)) => format!("'{n}{w:?}'"),
            Tok::Open(n) => format!("'{n}('"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Compose => "'o'".into(),
            Tok::Nat(k) => format!("'{k}'"),
        }
    }
}

const ATOMS: [&str; 5] = ["gamma", "sym", "wedge", "tensorpow", "k"];
const OPENERS: [&str; 6] = ["twist", "dual", "param", "box", "tensor", "sum"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |tok: usize, col: usize, msg: String| ExprError::Syntax { token: tok, column: col, message: msg };
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    let nat = |i: &mut usize, tok: usize| -> Result<u32, ExprError> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        if start == *i {
            return Err(err(tok, start + 1, "expected a natural number".into()));
        }
        chars[start..*i].iter().collect::<String>().parse().map_err(|_| err(tok, start + 1, "number too large".into()))
    };
    loop {
        skip_ws(&mut i);
        if i >= chars.len() {
            break;
        }
        let col = i + 1;
        let tok_no = out.len() + 1;
        let c = chars[i];
        let tok = if c == '(' {
            i += 1;
            Tok::LParen
        } else if c == ')' {
            i += 1;
            Tok::RParen
        } else if c == ',' {
            i += 1;
            Tok::Comma
        } else if c.is_ascii_digit() {
            Tok::Nat(nat(&mut i, tok_no)?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric()) {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            match name.as_str() {
                "o" => Tok::Compose,
                "I" => Tok::Atom(name, Arg::None),
                "E" => {
                    if i < chars.len() && chars[i] == '_' {
                        i += 1;
                        Tok::Atom(name, Arg::Nat(nat(&mut i, tok_no)?))
                    } else {
                        return Err(err(tok_no, col, "expected E_r".into()));
                    }
                }
                n if ATOMS.contains(&n) => {
                    skip_ws(&mut i);
                    match chars.get(i) {
                        Some('(') => {
                            i += 1;
                            skip_ws(&mut i);
                            let k = nat(&mut i, tok_no)?;
                            skip_ws(&mut i);
                            if chars.get(i) != Some(&')') {
                                return Err(err(tok_no, i + 1, format!("expected ')' to close {n}(")));
                            }
                            i += 1;
                            Tok::Atom(name, Arg::Nat(k))
                        }
                        Some('[') if n == "gamma" || n == "sym" => {
                            i += 1;
                            let mut w = Vec::new();
                            loop {
                                skip_ws(&mut i);
                                w.push(nat(&mut i, tok_no)?);
                                skip_ws(&mut i);
                                match chars.get(i) {
                                    Some(',') => i += 1,
                                    Some(']') => {
                                        i += 1;
                                        break;
                                    }
                                    _ => return Err(err(tok_no, i + 1, "expected ',' or ']' in a weight".into())),
                                }
                            }
                            Tok::Atom(name, Arg::Weight(w))
                        }
                        _ => return Err(err(tok_no, i + 1, format!("expected '(' after {n}"))),
                    }
                }
                n if OPENERS.contains(&n) => {
                    skip_ws(&mut i);
                    if chars.get(i) != Some(&'(') {
                        return Err(err(tok_no, i + 1, format!("expected '(' after {n}")));
                    }
                    i += 1;
                    Tok::Open(name)
                }
                _ => return Err(err(tok_no, col, format!("unknown name '{name}'"))),
            }
        } else {
            return Err(err(tok_no, col, format!("unexpected character '{c}'")));
        };
        out.push((tok, col));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn error(&self, message: String) -> ExprError {
        let column = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col);
        ExprError::Syntax { token: self.pos + 1, column, message }
    }

    fn found(&self) -> String {
        self.toks.get(self.pos).map(|t| t.0.describe()).unwrap_or_else(|| "end of input".into())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ExprError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", t.describe(), self.found())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        while self.peek() == Some(&Tok::Compose) {
            self.pos += 1;
            let rhs = self.term()?;
            e = Expr::Compose(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn nat(&mut self) -> Result<u32, ExprError> {
        match self.peek() {
            Some(Tok::Nat(k)) => {
                let k = *k;
                self.pos += 1;
                Ok(k)
            }
            _ => Err(self.error(format!("expected a natural number, found {}", self.found()))),
        }
    }

    fn space(&mut self) -> Result<Space, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Atom(n, Arg::Nat(k))) if n == "k" => {
                self.pos += 1;
                Ok(Space::Trivial(k as usize))
            }
            Some(Tok::Atom(n, Arg::Nat(k))) if n == "E" => {
                self.pos += 1;
                Ok(Space::E(k))
            }
            _ => Err(self.error(format!("expected k(l) or E_r, found {}", self.found()))),
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.error("expected an expression, found end of input".into()));
        };
        self.pos += 1;
        Ok(match t {
            Tok::Atom(n, arg) => match (n.as_str(), arg) {
                ("I", Arg::None) => Expr::Id,
                ("gamma", Arg::Nat(d)) => Expr::Gamma(d),
                ("sym", Arg::Nat(d)) => Expr::Sym(d),
                ("wedge", Arg::Nat(d)) => Expr::Wedge(d),
                ("tensorpow", Arg::Nat(d)) => Expr::TensorPow(d),
                ("gamma", Arg::Weight(w)) => Expr::GammaMu(w),
                ("sym", Arg::Weight(w)) => Expr::SymMu(w),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(format!("{} is not a functor", self.found())));
                }
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                e
            }
            Tok::Open(n) => {
                let e = match n.as_str() {
                    "twist" => {
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        Expr::Twist(Box::new(a), self.nat()?)
                    }
                    "dual" => Expr::Dual(Box::new(self.expr()?)),
                    "param" => {
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        Expr::Param(Box::new(a), self.space()?)
                    }
                    _ => {
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let b = self.expr()?;
                        match n.as_str() {
                            "box" => Expr::Box_(Box::new(a), Box::new(b)),
                            "tensor" => Expr::Tensor(Box::new(a), Box::new(b)),
                            _ => Expr::Sum(Box::new(a), Box::new(b)),
                        }
                    }
                };
                self.expect(Tok::RParen)?;
                e
            }
            _ => {
                self.pos -= 1;
                return Err(self.error(format!("expected an expression, found {}", self.found())));
            }
        })
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end_col: src.chars().count() + 1 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error(format!("unexpected {}", p.found())));
    }
    e.degrees()?;
    Ok(e)
}

fn join(w: &[u32]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Trivial(l) => write!(f, "k({l})"),
            Space::E(r) => write!(f, "E_{r}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Id => write!(f, "I"),
            Expr::Gamma(d) => write!(f, "gamma({d})"),
            Expr::Sym(d) => write!(f, "sym({d})"),
            Expr::Wedge(d) => write!(f, "wedge({d})"),
            Expr::TensorPow(d) => write!(f, "tensorpow({d})"),
            Expr::GammaMu(w) => write!(f, "gamma[{}]", join(w)),
            Expr::SymMu(w) => write!(f, "sym[{}]", join(w)),
            Expr::Compose(a, b) => match **b {
                // composition is left associative, so a composite on the right needs parentheses
                Expr::Compose(..) => write!(f, "{a} o ({b})"),
                _ => write!(f, "{a} o {b}"),
            },
            Expr::Twist(a, r) => write!(f, "twist({a},{r})"),
            Expr::Dual(a) => write!(f, "dual({a})"),
            Expr::Param(a, u) => write!(f, "param({a},{u})"),
            Expr::Box_(a, b) => write!(f, "box({a},{b})"),
            Expr::Tensor(a, b) => write!(f, "tensor({a},{b})"),
            Expr::Sum(a, b) => write!(f, "sum({a},{b})"),
        }
    }
}

impl Expr {
    /// Degree in each variable; `box` concatenates the variables of its arguments.
    pub fn degrees(&self) -> Result<Vec<u32>, ExprError> {
        Ok(match self {
            Expr::Id => vec![1],
            Expr::Gamma(d) | Expr::Sym(d) | Expr::Wedge(d) | Expr::TensorPow(d) => vec![*d],
            Expr::GammaMu(w) | Expr::SymMu(w) => vec![w.iter().sum()],
            Expr::Compose(a, b) => {
                let (da, db) = (a.degrees()?, b.degrees()?);
                if da.len() != 1 {
                    return Err(ExprError::Degree(format!("the outer functor {a} must have one variable")));
                }
                db.iter().map(|x| x * da[0]).collect()
            }
            Expr::Twist(a, _) | Expr::Dual(a) | Expr::Param(a, _) => a.degrees()?,
            Expr::Box_(a, b) => {
                let mut d = a.degrees()?;
                d.extend(b.degrees()?);
                d
            }
            Expr::Tensor(a, b) | Expr::Sum(a, b) => {
                let (da, db) = (a.degrees()?, b.degrees()?);
                if da.len() != db.len() {
                    return Err(ExprError::Degree(format!("{a} and {b} have different numbers of variables")));
                }
                if matches!(self, Expr::Sum(..)) && da != db {
                    return Err(ExprError::Degree(format!("sum of degrees {da:?} and {db:?} is not homogeneous")));
                }
                da.iter().zip(&db).map(|(x, y)| x + y).collect()
            }
        })
    }

    /// Degree after Frobenius twists, which multiply by p^r.
    pub fn twisted_degrees(&self, p: Prime) -> Result<Vec<u32>, ExprError> {
        Ok(match self {
            Expr::Twist(a, r) => a.twisted_degrees(p)?.iter().map(|d| d * p.get().pow(*r)).collect(),
            Expr::Compose(a, b) => {
                let (da, db) = (a.twisted_degrees(p)?, b.twisted_degrees(p)?);
                if da.len() != 1 {
                    return Err(ExprError::Degree(format!("the outer functor {a} must have one variable")));
                }
                db.iter().map(|x| x * da[0]).collect()
            }
            Expr::Dual(a) | Expr::Param(a, _) => a.twisted_degrees(p)?,
            Expr::Box_(a, b) => {
                let mut d = a.twisted_degrees(p)?;
                d.extend(b.twisted_degrees(p)?);
                d
            }
            Expr::Tensor(a, b) | Expr::Sum(a, b) => {
                let (da, db) = (a.twisted_degrees(p)?, b.twisted_degrees(p)?);
                if da.len() != db.len() || (matches!(self, Expr::Sum(..)) && da != db) {
                    return Err(ExprError::Degree(format!("{a} and {b} do not match")));
                }
                if matches!(self, Expr::Sum(..)) {
                    da
                } else {
                    da.iter().zip(&db).map(|(x, y)| x + y).collect()
                }
            }
            _ => self.degrees()?,
        })
    }

    /// Number of variables.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Compose(_, b) => b.arity(),
            Expr::Twist(a, _) | Expr::Dual(a) | Expr::Param(a, _) | Expr::Tensor(a, _) | Expr::Sum(a, _) => a.arity(),
            Expr::Box_(a, b) => a.arity() + b.arity(),
            _ => 1,
        }
    }

    /// The module obtained by evaluating on k^{dims[i]} in each variable.
    pub fn eval(&self, p: Prime, dims: &[usize]) -> Result<PolyRep, ExprError> {
        if dims.len() != self.arity() {
            return Err(ExprError::Degree(format!("{self} has {} variables, got {} dimensions", self.arity(), dims.len())));
        }
        match self {
            Expr::Box_(a, b) => {
                let k = a.arity();
                Ok(boxtimes(&a.eval(p, &dims[..k])?, &b.eval(p, &dims[k..])?)?)
            }
            Expr::Compose(a, b) => a.apply(&b.eval(p, dims)?),
            Expr::Tensor(a, b) => Ok(tensor(&a.eval(p, dims)?, &b.eval(p, dims)?)?.with_expr(self.to_string())),
            Expr::Sum(a, b) => Ok(direct_sum(&a.eval(p, dims)?, &b.eval(p, dims)?)?.with_expr(self.to_string())),
            Expr::Twist(a, r) => Ok(frobenius_twist(&a.eval(p, dims)?, *r).with_expr(self.to_string())),
            // the standard module is its own dual
            Expr::Dual(a) => Ok(kuhn_dual(&a.eval(p, dims)?).with_expr(self.to_string())),
            _ => self.apply(&standard(p, dims[0])),
        }
    }

    /// The functor applied to a module (single-variable expressions).
    pub fn apply(&self, v: &PolyRep) -> Result<PolyRep, ExprError> {
        let p = v.prime();
        Ok(match self {
            Expr::Id => v.clone(),
            Expr::Gamma(d) => divided_power(v, *d),
            Expr::Sym(d) => symmetric_power(v, *d),
            Expr::Wedge(d) => exterior_power(v, *d),
            Expr::TensorPow(d) => tensor_power(v, *d)?,
            Expr::GammaMu(w) => product(w.iter().map(|&d| divided_power(v, d)))?,
            Expr::SymMu(w) => product(w.iter().map(|&d| symmetric_power(v, d)))?,
            Expr::Compose(a, b) => a.apply(&b.apply(v)?)?,
            Expr::Twist(a, r) => frobenius_twist(&a.apply(v)?, *r),
            // F♯(W) = F(W♯)♯ as functors of the underlying variable
            Expr::Dual(a) => kuhn_dual(&a.apply(&kuhn_dual(v))?),
            // F^U(W) = F(U^∨ ⊗ W)
            Expr::Param(a, u) => {
                let space = match u {
                    Space::Trivial(l) => GradedSpace::trivial(*l),
                    Space::E(r) => GradedSpace::e_r(p, *r).dual(),
                };
                a.apply(&with_multiplicity(v, &space)?)?
            }
            Expr::Tensor(a, b) => tensor(&a.apply(v)?, &b.apply(v)?)?,
            Expr::Sum(a, b) => direct_sum(&a.apply(v)?, &b.apply(v)?)?,
            Expr::Box_(..) => return Err(ExprError::Degree(format!("{self} cannot be applied to a module"))),
        }
        .with_expr(self.to_string()))
    }
}

fn product(mut it: impl Iterator<Item = PolyRep>) -> Result<PolyRep, RepError> {
    let first = it.next().expect("nonempty weight");
    it.try_fold(first, |acc, x| tensor(&acc, &x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let e = parse("gamma(3) o wedge(2)").unwrap();
        assert_eq!(e, Expr::Compose(Box::new(Expr::Gamma(3)), Box::new(Expr::Wedge(2))));
        assert_eq!(parse("twist(sym(2),1)").unwrap(), Expr::Twist(Box::new(Expr::Sym(2)), 1));
        match parse("gamma(2) o o") {
            Err(ExprError::Syntax { token, .. }) => assert_eq!(token, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn whitespace_and_round_trip() {
        for s in ["gamma(3) o wedge(2)", "twist(sym(2),1)", "param(twist(sym(2),1),k(1))", "box(I,I)", "gamma(2) o box(I,I)", "gamma[2,1]", "sum(sym(2),wedge(2))", "dual(param(gamma(2),E_1))", "gamma(2) o (sym(2) o I)"] {
            let e = parse(s).unwrap();
            assert_eq!(e.to_string(), s);
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse(" gamma ( 3 )o\twedge(2) ").unwrap(), parse("gamma(3) o wedge(2)").unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("sum(sym(2), I)"), Err(ExprError::Degree(_))));
        assert!(matches!(parse("gamma(2"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("foo(2)"), Err(ExprError::Syntax { token: 1, column: 1, .. })));
        assert!(matches!(parse("box(I,I) o I"), Err(ExprError::Degree(_))));
        assert!(matches!(parse(""), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn degrees_and_evaluation() {
        let p = Prime::new(3).unwrap();
        let e = parse("gamma(3) o wedge(2)").unwrap();
        assert_eq!(e.degrees().unwrap(), vec![6]);
        let t = parse("twist(sym(2),1)").unwrap();
        assert_eq!(t.twisted_degrees(p).unwrap(), vec![6]);
        assert_eq!(t.eval(p, &[6]).unwrap().dim(), 21);
        let b = parse("gamma(2) o box(I,I)").unwrap();
        assert_eq!(b.arity(), 2);
        assert_eq!(b.degrees().unwrap(), vec![2, 2]);
        assert_eq!(b.eval(p, &[2, 2]).unwrap().dim(), 10);
        let d = parse("dual(sym(2))").unwrap().eval(p, &[2]).unwrap();
        assert_eq!(d.weight_dims(), divided_power(&standard(p, 2), 2).weight_dims());
        let q = parse("param(I,E_1)").unwrap().eval(p, &[2]).unwrap();
        assert_eq!(q.aux_dims().keys().cloned().collect::<Vec<_>>(), vec![-4, -2, 0]);
    }
}
