//! Tiny expression language for problem files: decision entries `x[i]`,
//! scenario entries `u[j]`, numeric literals, `+ - * / ^` (power is
//! right-associative), unary minus, `exp`, `log`, and two-argument
//! `min`/`max`. Indices are validated at parse time against the declared
//! dimensions, so evaluation never bounds-checks.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X(usize),
    U(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluates with no bounds checks; parse-time validation guarantees the
    /// indices fit. NaN and infinities propagate to the caller, which decides
    /// whether they are an error.
    pub fn eval(&self, x: &[f64], u: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X(i) => x[*i],
            Expr::U(j) => u[*j],
            Expr::Neg(a) => -a.eval(x, u),
            Expr::Add(a, b) => a.eval(x, u) + b.eval(x, u),
            Expr::Sub(a, b) => a.eval(x, u) - b.eval(x, u),
            Expr::Mul(a, b) => a.eval(x, u) * b.eval(x, u),
            Expr::Div(a, b) => a.eval(x, u) / b.eval(x, u),
            Expr::Pow(a, b) => a.eval(x, u).powf(b.eval(x, u)),
            Expr::Exp(a) => a.eval(x, u).exp(),
            Expr::Log(a) => a.eval(x, u).ln(),
            Expr::Min(a, b) => a.eval(x, u).min(b.eval(x, u)),
            Expr::Max(a, b) => a.eval(x, u).max(b.eval(x, u)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, child: &Expr, need: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < need {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c == f64::INFINITY {
                    write!(f, "(1/0)")
                } else if *c == f64::NEG_INFINITY {
                    write!(f, "(-1/0)")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::X(i) => write!(f, "x[{i}]"),
            Expr::U(j) => write!(f, "u[{j}]"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(a, 3, f)
            }
            Expr::Add(a, b) => {
                self.fmt_child(a, 1, f)?;
                write!(f, " + ")?;
                // right child needs one more level so a - (b + c) keeps parens
                self.fmt_child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                self.fmt_child(a, 1, f)?;
                write!(f, " - ")?;
                self.fmt_child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                self.fmt_child(a, 2, f)?;
                write!(f, "*")?;
                self.fmt_child(b, 3, f)
            }
            Expr::Div(a, b) => {
                self.fmt_child(a, 2, f)?;
                write!(f, "/")?;
                self.fmt_child(b, 3, f)
            }
            Expr::Pow(a, b) => {
                // power is right-associative: parenthesize a left power
                self.fmt_child(a, 5, f)?;
                write!(f, "^")?;
                self.fmt_child(b, 3, f)
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
        }
    }
}

/// Parses `src` against decision dimension `n_x` and scenario dimension `n_u`.
pub fn parse(src: &str, n_x: usize, n_u: usize) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, n_x, n_u, src };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err(format!("trailing input at token {:?}", p.tokens[p.pos])));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1;
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // exponent part, careful not to eat an identifier
                if i < bytes.len()
                    && matches!(bytes[i] as char, 'e' | 'E')
                    && i + 1 < bytes.len()
                    && matches!(bytes[i + 1] as char, '0'..='9' | '+' | '-')
                {
                    i += 2;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Expr(format!("bad number literal {text:?} in {src:?}")))?;
                out.push(Tok::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_') {
                    i += 1;
                }
                out.push(Tok::Ident(src[start..i].to_string()));
            }
            other => {
                return Err(Error::Expr(format!("unexpected character {other:?} in {src:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    n_x: usize,
    n_u: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: String) -> Error {
        Error::Expr(format!("{msg} (in {:?})", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.next() {
            Some(ref t) if *t == want => Ok(()),
            got => Err(self.err(format!("expected {want:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            // right-associative, and the exponent may carry a unary minus
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => {
                    let i = self.index()?;
                    if i >= self.n_x {
                        return Err(self.err(format!(
                            "decision index {i} out of range (dimension {})",
                            self.n_x
                        )));
                    }
                    Ok(Expr::X(i))
                }
                "u" => {
                    let j = self.index()?;
                    if j >= self.n_u {
                        return Err(self.err(format!(
                            "scenario index {j} out of range (dimension {})",
                            self.n_u
                        )));
                    }
                    Ok(Expr::U(j))
                }
                "exp" => {
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Exp(Box::new(a)))
                }
                "log" => {
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Log(Box::new(a)))
                }
                "min" | "max" => {
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    if name == "min" {
                        Ok(Expr::Min(Box::new(a), Box::new(b)))
                    } else {
                        Ok(Expr::Max(Box::new(a), Box::new(b)))
                    }
                }
                other => Err(self.err(format!("unknown identifier {other:?}"))),
            },
            got => Err(self.err(format!("expected a value, got {got:?}"))),
        }
    }

    fn index(&mut self) -> Result<usize> {
        self.expect(Tok::LBracket)?;
        let i = match self.next() {
            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v < usize::MAX as f64 => v as usize,
            got => return Err(self.err(format!("expected a nonnegative integer index, got {got:?}"))),
        };
        self.expect(Tok::RBracket)?;
        Ok(i)
    }
}
