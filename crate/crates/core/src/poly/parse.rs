//! Expression grammar shared by polynomials and differential operators.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' INT)?
//! atom  := INT | IDENT | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants. Positions are byte
//! offsets into the input.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Poly, Ring};
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match &e.kind {
                ExprKind::Num(_) => {}
                ExprKind::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                ExprKind::Neg(a) | ExprKind::Pow(a, _) => walk(a, out),
                ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(s[start..i].parse().expect("digits")), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(s[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos: i,
                msg: format!("unexpected character `{}`", s[i..].chars().next().unwrap_or(c)),
            });
        }
    }
    out.push((Tok::End, s.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    let (_, pos) = self.bump();
                    let rhs = self.term()?;
                    lhs = Expr { kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)), pos };
                }
                Tok::Sym('-') => {
                    let (_, pos) = self.bump();
                    let rhs = self.term()?;
                    lhs = Expr { kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)), pos };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    let (_, pos) = self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr { kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)), pos };
                }
                Tok::Sym('/') => {
                    let (_, pos) = self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr { kind: ExprKind::Div(Box::new(lhs), Box::new(rhs)), pos };
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    return self.err("missing operator (juxtaposition is not multiplication)")
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                let (_, pos) = self.bump();
                let inner = self.unary()?;
                Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos })
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Tok::Sym('^') = self.peek() {
            let (_, pos) = self.bump();
            match self.bump() {
                (Tok::Int(k), kpos) => {
                    let k = u32::try_from(&k).map_err(|_| Error::Syntax {
                        pos: kpos,
                        msg: "exponent too large".into(),
                    })?;
                    if let Tok::Sym('^') = self.peek() {
                        return self.err("chained exponents need parentheses");
                    }
                    Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), pos })
                }
                (_, p) => Err(Error::Syntax {
                    pos: p,
                    msg: "exponent must be a nonnegative integer literal".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            (Tok::Int(n), pos) => Ok(Expr { kind: ExprKind::Num(n), pos }),
            (Tok::Ident(v), pos) => Ok(Expr { kind: ExprKind::Var(v), pos }),
            (Tok::Sym('('), pos) => {
                let e = self.expr()?;
                match self.bump() {
                    (Tok::Sym(')'), _) => Ok(e),
                    (_, p) => Err(Error::Syntax {
                        pos: p,
                        msg: format!("unclosed parenthesis opened at {pos}"),
                    }),
                }
            }
            (Tok::End, pos) => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            (t, pos) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected token {}", describe(&t)),
            }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Sym(')') => p.err("unmatched `)`"),
        t => {
            let msg = format!("unexpected token {}", describe(t));
            p.err(msg)
        }
    }
}

/// Target of expression evaluation.
pub trait Evaluator {
    type Value: Clone;
    fn num(&self, c: Q) -> Self::Value;
    fn var(&self, name: &str, pos: usize) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn as_constant(&self, a: &Self::Value) -> Option<Q>;
    fn scale(&self, a: &Self::Value, c: &Q) -> Self::Value;
}

pub fn evaluate<E: Evaluator>(ev: &E, e: &Expr) -> Result<E::Value> {
    Ok(match &e.kind {
        ExprKind::Num(n) => ev.num(Q::from_integer(n.clone())),
        ExprKind::Var(v) => ev.var(v, e.pos)?,
        ExprKind::Neg(a) => ev.neg(&evaluate(ev, a)?),
        ExprKind::Add(a, b) => ev.add(&evaluate(ev, a)?, &evaluate(ev, b)?),
        ExprKind::Sub(a, b) => ev.sub(&evaluate(ev, a)?, &evaluate(ev, b)?),
        ExprKind::Mul(a, b) => ev.mul(&evaluate(ev, a)?, &evaluate(ev, b)?),
        ExprKind::Div(a, b) => {
            let num = evaluate(ev, a)?;
            let den = evaluate(ev, b)?;
            match ev.as_constant(&den) {
                Some(c) if !c.is_zero() => ev.scale(&num, &(Q::one() / c)),
                Some(_) => {
                    return Err(Error::Syntax {
                        pos: e.pos,
                        msg: "division by zero".into(),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        pos: e.pos,
                        msg: "division is only allowed by constants".into(),
                    })
                }
            }
        }
        ExprKind::Pow(a, k) => {
            let base = evaluate(ev, a)?;
            let mut acc = ev.num(Q::one());
            for _ in 0..*k {
                acc = ev.mul(&acc, &base);
            }
            acc
        }
    })
}

struct PolyEval<'a>(&'a Arc<Ring>);

impl Evaluator for PolyEval<'_> {
    type Value = Poly;
    fn num(&self, c: Q) -> Poly {
        Poly::constant(self.0, c)
    }
    fn var(&self, name: &str, pos: usize) -> Result<Poly> {
        match self.0.index_of(name) {
            Some(i) => Ok(Poly::var(self.0, i)),
            None => Err(Error::UnknownVariable {
                name: name.to_string(),
                pos,
            }),
        }
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a + b
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a - b
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a * b
    }
    fn neg(&self, a: &Poly) -> Poly {
        -a
    }
    fn as_constant(&self, a: &Poly) -> Option<Q> {
        a.is_constant().then(|| a.constant_term())
    }
    fn scale(&self, a: &Poly, c: &Q) -> Poly {
        a.scale(c)
    }
}

pub fn parse_poly(text: &str, ring: &Arc<Ring>) -> Result<Poly> {
    evaluate(&PolyEval(ring), &parse_expr(text)?)
}

/// Splits the top-level product structure of an expression into
/// `(factor, multiplicity)` pairs. Constant factors are returned as
/// constant polynomials.
pub fn parse_factors(text: &str, ring: &Arc<Ring>) -> Result<Vec<(Poly, u32)>> {
    let e = parse_expr(text)?;
    let mut out = Vec::new();
    collect_factors(&e, 1, ring, &mut out)?;
    Ok(out)
}

fn collect_factors(e: &Expr, mult: u32, ring: &Arc<Ring>, out: &mut Vec<(Poly, u32)>) -> Result<()> {
    match &e.kind {
        ExprKind::Mul(a, b) => {
            collect_factors(a, mult, ring, out)?;
            collect_factors(b, mult, ring, out)
        }
        ExprKind::Neg(a) => {
            out.push((Poly::int(ring, -1), 1));
            collect_factors(a, mult, ring, out)
        }
        ExprKind::Pow(a, k) if *k > 0 => collect_factors(a, mult * k, ring, out),
        _ => {
            out.push((evaluate(&PolyEval(ring), e)?, mult));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn basic_values() {
        let r = Ring::standard(3);
        assert_eq!(parse_poly("x1^2+x2^3", &r).unwrap().len(), 2);
        assert!(parse_poly("x1 - x1", &r).unwrap().is_zero());
        let p = parse_poly("(x1-x2*x3)*(x1*x2^2+x1^2*x2)", &r).unwrap();
        assert_eq!(
            p,
            parse_poly("x1^3*x2 + x1^2*x2^2 - x1^2*x2^2*x3 - x1*x2^3*x3", &r).unwrap()
        );
        assert_eq!(
            parse_poly("3/4", &r).unwrap(),
            Poly::constant(&r, qr(3, 4))
        );
        assert_eq!(parse_poly("-x1^2", &r).unwrap(), -&parse_poly("x1^2", &r).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let r = Ring::standard(2);
        assert_eq!(
            parse_poly("x1 + y", &r),
            Err(Error::UnknownVariable { name: "y".into(), pos: 5 })
        );
        assert!(matches!(parse_poly("x1 +", &r), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_poly("2 x1", &r), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("x1/x2", &r), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("x1/0", &r), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("(x1", &r), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("x1^x2", &r), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("x1 $ 2", &r), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn factors_follow_top_level_product() {
        let r = Ring::standard(3);
        let f = parse_factors("(x1-x2*x3)*(x1^3+x2^4)^2", &r).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].1, 2);
        let f = parse_factors("x1*x2*(x1+x2)", &r).unwrap();
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn variables_in_order_of_appearance() {
        let e = parse_expr("x2*(x1 - x2^3) + 3/4*y").unwrap();
        assert_eq!(e.variables(), vec!["x2", "x1", "y"]);
    }
}
