//! Expression trees for metric components.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" integer)?
//! base   := rational | ident | "(" expr ")" | ("exp" | "sin" | "cos") "(" expr ")" | "-" base
//! ```
//!
//! A rational literal is an integer, a decimal, or `a/b` written without spaces
//! (except directly after `^`, so `x^4/3` divides by three).
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::jet::{AnyJet, Jet};
use crate::scalar::{format_rational, parse_rational, Scalar, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Q),
    /// Coordinate by position in the declared coordinate list.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Num(Q::zero())
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    /// Renders with the given coordinate names; the output parses back to the same tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> impl fmt::Display + 'a {
        Printer { e: self, coords }
    }

    /// Taylor jet at `basepoint` in shifted coordinates, on the exact backend when possible.
    ///
    /// Transcendental functions of an argument that does not vanish at the
    /// basepoint have irrational coefficients, so the whole expression is then
    /// expanded on the float backend.
    pub fn to_jet(&self, basepoint: &[Q], order: usize) -> Result<AnyJet> {
        match self.eval::<Q>(basepoint, order) {
            Ok(j) => Ok(AnyJet::Exact(j)),
            Err(Error::IrrationalRoot(why)) => {
                log::warn!("promoting to the float backend: {why}");
                Ok(AnyJet::Float(self.eval::<f64>(basepoint, order)?))
            }
            Err(e) => Err(e),
        }
    }

    pub fn eval<S: Scalar>(&self, basepoint: &[Q], order: usize) -> Result<Jet<S>> {
        let n = basepoint.len();
        let rec = |e: &Expr| e.eval::<S>(basepoint, order);
        Ok(match self {
            Expr::Num(v) => Jet::constant(n, order, S::from_ratio(v)),
            Expr::Var(i) => {
                let b = basepoint.get(*i).ok_or_else(|| {
                    Error::Arity(format!("coordinate {} outside a {n}-dimensional basepoint", i + 1))
                })?;
                let x = if order == 0 {
                    Jet::zero(n, 0)
                } else {
                    Jet::variable(n, order, *i)
                };
                x.add_constant(&S::from_ratio(b))
            }
            Expr::Add(a, b) => rec(a)?.checked_add(&rec(b)?)?,
            Expr::Sub(a, b) => rec(a)?.checked_sub(&rec(b)?)?,
            Expr::Mul(a, b) => rec(a)?.checked_mul(&rec(b)?)?,
            Expr::Div(a, b) => {
                let den = rec(b)?;
                if den.constant_term().is_negligible(1e-14) {
                    return Err(Error::DivisionByZeroAtBasepoint(format!(
                        "denominator {} vanishes at the basepoint",
                        b.display(&[])
                    )));
                }
                rec(a)?.checked_mul(&den.invert()?)?
            }
            Expr::Pow(b, e) => {
                let base = rec(b)?;
                if *e < 0 && base.constant_term().is_negligible(1e-14) {
                    return Err(Error::DivisionByZeroAtBasepoint(format!(
                        "negative power of {} which vanishes at the basepoint",
                        b.display(&[])
                    )));
                }
                base.powi(*e)?
            }
            Expr::Neg(a) => -rec(a)?,
            Expr::Call(f, a) => {
                let v = rec(a)?;
                match f {
                    Func::Exp => v.exp()?,
                    Func::Sin => v.sin()?,
                    Func::Cos => v.cos()?,
                }
            }
        })
    }
}

struct Printer<'a> {
    e: &'a Expr,
    coords: &'a [String],
}

impl Printer<'_> {
    fn sub<'b>(&'b self, e: &'b Expr) -> Printer<'b> {
        Printer { e, coords: self.coords }
    }

    fn atomic(e: &Expr) -> bool {
        matches!(e, Expr::Num(_) | Expr::Var(_) | Expr::Call(..))
    }

    fn write_grouped(&self, f: &mut fmt::Formatter<'_>, e: &Expr, ok: bool) -> fmt::Result {
        if ok || Self::atomic(e) {
            write!(f, "{}", self.sub(e))
        } else {
            write!(f, "({})", self.sub(e))
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.e {
            Expr::Num(v) => f.write_str(&format_rational(v)),
            Expr::Var(i) => match self.coords.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{}", i + 1),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self.e, Expr::Add(..)) { "+" } else { "-" };
                self.write_grouped(f, a, matches!(**a, Expr::Add(..) | Expr::Sub(..)))?;
                write!(f, " {op} ")?;
                self.write_grouped(f, b, false)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self.e, Expr::Mul(..)) { "*" } else { "/" };
                self.write_grouped(f, a, matches!(**a, Expr::Mul(..) | Expr::Div(..)))?;
                f.write_str(op)?;
                // a positive integer literal after "/" would fuse into a rational literal
                let fuse = op == "/" && matches!(&**b, Expr::Num(v) if !v.is_negative());
                if fuse {
                    write!(f, "({})", self.sub(b))
                } else {
                    self.write_grouped(f, b, false)
                }
            }
            Expr::Pow(b, e) => {
                self.write_grouped(f, b, false)?;
                write!(f, "^{e}")
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                self.write_grouped(f, a, matches!(**a, Expr::Neg(_)))
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), self.sub(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str, line: usize, col0: usize) -> Result<Lexer> {
    let chars: Vec<char> = src.chars().collect();
    let err = |col: usize, message: String| Error::Parse {
        line,
        column: col0 + col,
        message,
    };
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            } else if i + 1 < chars.len()
                && chars[i] == '/'
                && chars[i + 1].is_ascii_digit()
                && !matches!(toks.last(), Some((Tok::Op('^'), _)))
            {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let text = if text.starts_with('.') { format!("0{text}") } else { text };
            let v = parse_rational(&text).ok_or_else(|| err(start, format!("invalid number `{text}`")))?;
            toks.push((Tok::Num(v), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character `{c}`")));
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [String],
    line: usize,
    col0: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.col0 + self.toks[self.pos].1
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col(),
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        match self.peek().clone() {
            Tok::Num(v) if v.is_integer() => {
                self.bump();
                let e: i64 = v
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.err("exponent out of range"))?;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => Err(self.err("expected an integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('-') => Ok(match self.base()? {
                Expr::Num(v) if !v.is_zero() => Expr::Num(-v),
                b => Expr::Neg(Box::new(b)),
            }),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    let func = Func::from_name(&name).ok_or_else(|| Error::Parse {
                        line: self.line,
                        column: col,
                        message: format!("unknown function `{name}`"),
                    })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    if !self.eat(')') {
                        return Err(self.err("expected `)`"));
                    }
                    if args.len() != 1 {
                        return Err(Error::Arity(format!(
                            "{name} takes one argument, got {} (line {}, column {col})",
                            args.len(),
                            self.line
                        )));
                    }
                    return Ok(Expr::Call(func, Box::new(args.pop().expect("one argument"))));
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(Error::Parse {
                        line: self.line,
                        column: col,
                        message: format!("unknown identifier `{name}`"),
                    }),
                }
            }
            Tok::End => Err(Error::Parse {
                line: self.line,
                column: col,
                message: "unexpected end of expression".into(),
            }),
            Tok::Op(c) => Err(Error::Parse {
                line: self.line,
                column: col,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

/// Parses one expression. `line` and `col0` locate `src` in its file for error reports.
pub fn parse_expr_at(src: &str, coords: &[String], line: usize, col0: usize) -> Result<Expr> {
    let lexer = lex(src, line, col0)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        coords,
        line,
        col0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

pub fn parse_expr(src: &str, coords: &[String]) -> Result<Expr> {
    parse_expr_at(src, coords, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn coords(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn precedence() {
        let c = coords(2);
        let e = parse_expr("1 + 2*x1^2 - x2/3", &c).unwrap();
        let j = e.eval::<Q>(&[q(0, 1), q(0, 1)], 3).unwrap();
        use crate::jet::MultiIndex;
        assert_eq!(j.nnz(), 3);
        assert_eq!(j.constant_term(), q(1, 1));
        assert_eq!(j.coeff(&MultiIndex::unit(1)), q(-1, 3));
        assert_eq!(j.coeff(&MultiIndex::from_exponents(&[2, 0]).unwrap()), q(2, 1));
        assert_eq!(parse_expr("-x1^2", &c).unwrap(), Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::Var(0)))), 2));
        assert_eq!(parse_expr("2/3", &c).unwrap(), Expr::Num(q(2, 3)));
        assert_eq!(parse_expr("-3", &c).unwrap(), Expr::Num(q(-3, 1)));
    }

    #[test]
    fn sine_squared() {
        let c = coords(1);
        let e = parse_expr("sin(x1)^2", &c).unwrap();
        assert_eq!(
            e,
            Expr::Pow(Box::new(Expr::Call(Func::Sin, Box::new(Expr::Var(0)))), 2)
        );
        let j = e.to_jet(&[q(0, 1)], 4).unwrap();
        assert_eq!(j, AnyJet::Exact(parse_expr("x1^2 - x1^4/3", &c).unwrap().eval(&[q(0, 1)], 4).unwrap()));
    }

    #[test]
    fn errors() {
        let c = coords(2);
        match parse_expr("1 +", &c) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("y + 1", &c), Err(Error::Parse { column: 1, .. })));
        assert!(matches!(parse_expr("tan(x1)", &c), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("exp(x1, x2)", &c), Err(Error::Arity(_))));
        assert!(matches!(parse_expr("x1^x2", &c), Err(Error::Parse { .. })));
        let e = parse_expr("1/x1", &c).unwrap();
        assert!(matches!(e.to_jet(&[q(0, 1), q(0, 1)], 2), Err(Error::DivisionByZeroAtBasepoint(_))));
    }

    #[test]
    fn promotion() {
        let c = coords(1);
        let e = parse_expr("sin(x1)^2", &c).unwrap();
        let j = e.to_jet(&[q(1, 1)], 2).unwrap();
        let AnyJet::Float(j) = j else { panic!("expected float") };
        assert!((j.constant_term() - 1f64.sin().powi(2)).abs() < 1e-15);
        let e = parse_expr("exp(x1)", &c).unwrap();
        assert!(matches!(e.to_jet(&[q(0, 1)], 3).unwrap(), AnyJet::Exact(_)));
    }

    #[test]
    fn printing_round_trips() {
        let c = coords(3);
        for s in [
            "1 - (x1 - x2)",
            "x1/(2)",
            "x1/2/x3",
            "-(x1 + x2)^3",
            "--x1",
            "2/3*exp(-x1*x2) + cos(x3)^-2",
            "x1^2/(1 + x2^2)^2",
            "x1^4/3",
            "0.25*x1",
        ] {
            let e = parse_expr(s, &c).unwrap();
            let printed = e.display(&c).to_string();
            assert_eq!(parse_expr(&printed, &c).unwrap(), e, "{s} -> {printed}");
        }
    }
}
