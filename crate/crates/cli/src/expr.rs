//! Operator expressions: parsing, printing and evaluation.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := NUMBER | SYMBOL | "comm(" expr "," expr ")" | "acomm(" expr "," expr ")"
//!         | ORDER "[" expr "]" | "exp(" expr ";" INT ")" | "(" expr ")"
//! ```
//!
//! Numbers are non-negative rationals (`3`, `1/2`, `0.25`). Besides operator
//! symbols, a factor may name a declared scalar symbol or the imaginary unit
//! `i` (when no symbol of that name exists).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use gwt_core::operator::{Algebra, OperatorPoly, Statistics};
use gwt_core::ordering::{order_poly, Ordering};
use gwt_core::scalar::{GaussianRational, ScalarPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{CliError, Result};
use crate::lexer::{Cursor, Tok};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOp {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    Comm,
    Acomm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(BigRational),
    Imag,
    Scalar(String),
    Symbol(String),
    Sum(Box<Expr>, Vec<(AddOp, Expr)>),
    Product(Vec<Expr>),
    Bracket { kind: BracketKind, lhs: Box<Expr>, rhs: Box<Expr> },
    Order { name: String, body: Box<Expr> },
    Exp { body: Box<Expr>, order: u32 },
}

/// Names the parser can resolve.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub symbols: BTreeMap<String, Statistics>,
    pub scalars: BTreeSet<String>,
    pub orderings: BTreeSet<String>,
}

impl Scope {
    pub fn from_algebra(alg: &Algebra) -> Self {
        let reg = alg.registry();
        Self {
            symbols: reg.ids().map(|s| (reg.name(s).to_string(), reg.statistics(s))).collect(),
            ..Self::default()
        }
    }
}

pub fn parse_expression(src: &str, scope: &Scope) -> Result<Expr> {
    let mut c = Cursor::new(src)?;
    let e = Parser { scope }.expr(&mut c)?;
    if *c.peek() != Tok::End {
        return Err(c.error(&["`+`", "`-`", "`*`", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    scope: &'a Scope,
}

impl Parser<'_> {
    fn expr(&self, c: &mut Cursor) -> Result<Expr> {
        let first = self.term(c)?;
        let mut rest = Vec::new();
        loop {
            let op = if c.eat(&Tok::Plus) {
                AddOp::Plus
            } else if c.eat(&Tok::Minus) {
                AddOp::Minus
            } else {
                break;
            };
            rest.push((op, self.term(c)?));
        }
        Ok(if rest.is_empty() { first } else { Expr::Sum(Box::new(first), rest) })
    }

    fn term(&self, c: &mut Cursor) -> Result<Expr> {
        let mut factors = vec![self.factor(c)?];
        while c.eat(&Tok::Star) {
            factors.push(self.factor(c)?);
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { Expr::Product(factors) })
    }

    fn factor(&self, c: &mut Cursor) -> Result<Expr> {
        match c.peek().clone() {
            Tok::Num(n) => {
                c.next();
                Ok(Expr::Number(n))
            }
            Tok::LParen => {
                c.next();
                let e = self.expr(c)?;
                c.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let offset = c.offset();
                c.next();
                match (name.as_str(), c.peek()) {
                    ("comm" | "acomm", Tok::LParen) => {
                        c.next();
                        let lhs = self.expr(c)?;
                        c.expect(Tok::Comma)?;
                        let rhs = self.expr(c)?;
                        c.expect(Tok::RParen)?;
                        let kind = if name == "comm" { BracketKind::Comm } else { BracketKind::Acomm };
                        self.check_bracket(kind, &lhs, &rhs)?;
                        Ok(Expr::Bracket { kind, lhs: Box::new(lhs), rhs: Box::new(rhs) })
                    }
                    ("exp", Tok::LParen) => {
                        c.next();
                        let body = self.expr(c)?;
                        c.expect(Tok::Semi)?;
                        let order = match c.next() {
                            Tok::Num(n) if n.is_integer() && !n.is_negative() => u32::try_from(n.to_integer())
                                .map_err(|_| CliError::Syntax { position: offset, expected: vec!["small order".into()] })?,
                            _ => return Err(c.error(&["integer order"])),
                        };
                        c.expect(Tok::RParen)?;
                        Ok(Expr::Exp { body: Box::new(body), order })
                    }
                    (_, Tok::LBrack) => {
                        if !self.scope.orderings.contains(&name) {
                            return Err(CliError::UnknownOrdering(name));
                        }
                        c.next();
                        let body = self.expr(c)?;
                        c.expect(Tok::RBrack)?;
                        Ok(Expr::Order { name, body: Box::new(body) })
                    }
                    _ => {
                        if self.scope.symbols.contains_key(&name) {
                            Ok(Expr::Symbol(name))
                        } else if self.scope.scalars.contains(&name) {
                            Ok(Expr::Scalar(name))
                        } else if name == "i" {
                            Ok(Expr::Imag)
                        } else {
                            Err(CliError::UnknownSymbol(name))
                        }
                    }
                }
            }
            _ => Err(c.error(&["number", "symbol", "`comm(`", "`acomm(`", "`exp(`", "ordering", "`(`"])),
        }
    }

    fn check_bracket(&self, kind: BracketKind, lhs: &Expr, rhs: &Expr) -> Result<()> {
        let (gl, gr) = (grade(lhs, self.scope), grade(rhs, self.scope));
        let ok = match (kind, gl, gr) {
            (_, Grade::Mixed, _) | (_, _, Grade::Mixed) => false,
            (BracketKind::Comm, Grade::Odd, Grade::Odd) => false,
            (BracketKind::Comm, _, _) => true,
            (BracketKind::Acomm, Grade::Odd, Grade::Odd) => true,
            (BracketKind::Acomm, _, _) => false,
        };
        if ok {
            Ok(())
        } else {
            let name = if kind == BracketKind::Comm { "comm" } else { "acomm" };
            Err(CliError::StatisticsMismatch(format!("{name}({lhs}, {rhs})")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Grade {
    Even,
    Odd,
    Mixed,
}

fn combine(a: Grade, b: Grade) -> Grade {
    match (a, b) {
        (Grade::Mixed, _) | (_, Grade::Mixed) => Grade::Mixed,
        (x, y) if x == y => Grade::Even,
        _ => Grade::Odd,
    }
}

/// Fermion-number parity of an expression, `Mixed` when terms disagree.
fn grade(e: &Expr, scope: &Scope) -> Grade {
    match e {
        Expr::Number(_) | Expr::Imag | Expr::Scalar(_) => Grade::Even,
        Expr::Symbol(s) => match scope.symbols.get(s) {
            Some(Statistics::Fermion) => Grade::Odd,
            _ => Grade::Even,
        },
        Expr::Product(fs) => fs.iter().fold(Grade::Even, |g, f| combine(g, grade(f, scope))),
        Expr::Sum(first, rest) => {
            let g = grade(first, scope);
            if rest.iter().all(|(_, t)| grade(t, scope) == g) {
                g
            } else {
                Grade::Mixed
            }
        }
        Expr::Bracket { lhs, rhs, .. } => combine(grade(lhs, scope), grade(rhs, scope)),
        Expr::Order { body, .. } => grade(body, scope),
        Expr::Exp { body, .. } => match grade(body, scope) {
            Grade::Even => Grade::Even,
            _ => Grade::Mixed,
        },
    }
}

fn needs_parens_in_product(e: &Expr) -> bool {
    matches!(e, Expr::Sum(..) | Expr::Product(_))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Imag => f.write_str("i"),
            Expr::Scalar(s) | Expr::Symbol(s) => f.write_str(s),
            Expr::Sum(first, rest) => {
                if matches!(**first, Expr::Sum(..)) {
                    write!(f, "({first})")?;
                } else {
                    write!(f, "{first}")?;
                }
                for (op, t) in rest {
                    f.write_str(if *op == AddOp::Plus { " + " } else { " - " })?;
                    if matches!(t, Expr::Sum(..)) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            Expr::Product(fs) => {
                for (k, x) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    if needs_parens_in_product(x) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Expr::Bracket { kind, lhs, rhs } => {
                let name = if *kind == BracketKind::Comm { "comm" } else { "acomm" };
                write!(f, "{name}({lhs}, {rhs})")
            }
            Expr::Order { name, body } => write!(f, "{name}[{body}]"),
            Expr::Exp { body, order } => write!(f, "exp({body}; {order})"),
        }
    }
}

/// Everything needed to turn an [`Expr`] into an operator polynomial.
pub struct EvalContext<'a> {
    pub algebra: &'a Algebra,
    pub orderings: &'a BTreeMap<String, Ordering>,
}

pub fn evaluate(e: &Expr, ctx: &EvalContext<'_>) -> Result<OperatorPoly> {
    let alg = ctx.algebra;
    Ok(match e {
        Expr::Number(n) => OperatorPoly::scalar(ScalarPoly::constant(GaussianRational::new(n.clone(), BigRational::zero()))),
        Expr::Imag => OperatorPoly::scalar(ScalarPoly::i()),
        Expr::Scalar(s) => OperatorPoly::scalar(ScalarPoly::symbol(s)),
        Expr::Symbol(s) => OperatorPoly::symbol(alg.lookup(s)?),
        Expr::Sum(first, rest) => {
            let mut acc = evaluate(first, ctx)?;
            for (op, t) in rest {
                let v = evaluate(t, ctx)?;
                acc = if *op == AddOp::Plus { &acc + &v } else { &acc - &v };
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = OperatorPoly::one();
            for x in fs {
                acc = &acc * &evaluate(x, ctx)?;
            }
            acc
        }
        Expr::Bracket { kind, lhs, rhs } => {
            let (x, y) = (evaluate(lhs, ctx)?, evaluate(rhs, ctx)?);
            let (xy, yx) = (&x * &y, &y * &x);
            if *kind == BracketKind::Comm {
                &xy - &yx
            } else {
                &xy + &yx
            }
        }
        Expr::Order { name, body } => {
            let o = ctx.orderings.get(name).ok_or_else(|| CliError::UnknownOrdering(name.clone()))?;
            order_poly(alg.registry(), o, &evaluate(body, ctx)?)?
        }
        Expr::Exp { body, order } => {
            let x = evaluate(body, ctx)?;
            let mut acc = OperatorPoly::one();
            let mut term = OperatorPoly::one();
            for k in 1..=*order {
                let inv = ScalarPoly::constant(GaussianRational::new(
                    BigRational::new(BigInt::from(1), BigInt::from(k)),
                    BigRational::zero(),
                ));
                term = (&term * &x).scale(&inv);
                acc = &acc + &term;
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gwt_core::models;

    fn scope() -> (Scope, Algebra) {
        let m = models::single_mode();
        let mut s = Scope::from_algebra(&m.algebra);
        s.orderings.insert("N".into());
        (s, m.algebra)
    }

    #[test]
    fn parses_sum_of_product() {
        let (s, _) = scope();
        let e = parse_expression("a*a† + 1", &s).unwrap();
        assert_eq!(
            e,
            Expr::Sum(
                Box::new(Expr::Product(vec![Expr::Symbol("a".into()), Expr::Symbol("a†".into())])),
                vec![(AddOp::Plus, Expr::Number(BigRational::from_integer(1.into())))]
            )
        );
        assert_eq!(parse_expression("a * a^+ + 1", &s).unwrap(), e);
        assert!(matches!(parse_expression("N[ a*a† ]", &s).unwrap(), Expr::Order { .. }));
    }

    #[test]
    fn errors() {
        let (s, _) = scope();
        assert!(matches!(parse_expression("a +", &s), Err(CliError::Syntax { position: 3, .. })));
        assert_eq!(parse_expression("b", &s), Err(CliError::UnknownSymbol("b".into())));
        assert_eq!(parse_expression("Z[a]", &s), Err(CliError::UnknownOrdering("Z".into())));
        assert!(matches!(parse_expression("acomm(a, a†)", &s), Err(CliError::StatisticsMismatch(_))));
        let f = models::fermion_modes(1).build().unwrap();
        let fs = Scope::from_algebra(&f.algebra);
        assert!(matches!(parse_expression("comm(c0, c0†)", &fs), Err(CliError::StatisticsMismatch(_))));
        assert!(parse_expression("acomm(c0, c0†)", &fs).is_ok());
        assert!(parse_expression("comm(c0, c0†*c0)", &fs).is_ok());
    }

    #[test]
    fn evaluates() {
        let (s, alg) = scope();
        let mut ords = BTreeMap::new();
        ords.insert("N".to_string(), Ordering::normal());
        let ctx = EvalContext { algebra: &alg, orderings: &ords };
        let e = parse_expression("comm(a, a†) - 1 + N[a*a†] - a†*a + exp(a; 2) - 1 - a - 1/2*a*a", &s).unwrap();
        let p = evaluate(&e, &ctx).unwrap();
        assert!(alg.canonical_reduce(&p).unwrap().is_zero());
    }
}
