use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{Ctx, HarmonicSeries, MultiPoly, EPS, S, T};
use crate::error::{Error, Result};
use crate::gaussian::Gq;

/// Expression tree for the right-hand side `V`.
///
/// `E` stands for e^{it}. Literals are non-negative integers; rationals and
/// negative numbers are built with `/` and unary minus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt),
    I,
    Eps,
    E,
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(BigInt::from(n))
    }

    /// An integer literal, wrapped in `Neg` when negative.
    pub fn int(n: i64) -> Expr {
        if n < 0 {
            Expr::Neg(Box::new(Expr::Num(-BigInt::from(n))))
        } else {
            Expr::num(n)
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: i64) -> Expr {
        Expr::Pow(Box::new(a), e)
    }

    /// `(E^k + E^-k)/2`.
    pub fn cos(k: i64) -> Expr {
        let (p, m) = Self::e_pair(k);
        Expr::div(Expr::add(p, m), Expr::num(2))
    }

    /// `(E^k - E^-k)/(2*i)`.
    pub fn sin(k: i64) -> Expr {
        let (p, m) = Self::e_pair(k);
        Expr::div(Expr::sub(p, m), Expr::mul(Expr::num(2), Expr::I))
    }

    fn e_pair(k: i64) -> (Expr, Expr) {
        let p = if k == 1 { Expr::E } else { Expr::pow(Expr::E, k) };
        (p, Expr::pow(Expr::E, -k))
    }

    /// Names of all `Var` leaves, in first-occurrence order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(n) = e {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }

    /// Whether `E` occurs anywhere.
    pub fn mentions_e(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::E));
        found
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) => a.walk(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Replaces variables for which `f` returns a value.
    pub fn replace_vars(&self, f: &impl Fn(&str) -> Option<Expr>) -> Expr {
        let rec = |a: &Expr| Box::new(a.replace_vars(f));
        match self {
            Expr::Var(n) => f(n).unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(rec(a)),
            Expr::Pow(a, e) => Expr::Pow(rec(a), *e),
            Expr::Add(a, b) => Expr::Add(rec(a), rec(b)),
            Expr::Sub(a, b) => Expr::Sub(rec(a), rec(b)),
            Expr::Mul(a, b) => Expr::Mul(rec(a), rec(b)),
            Expr::Div(a, b) => Expr::Div(rec(a), rec(b)),
            _ => self.clone(),
        }
    }

    /// Expands into a harmonic series over `ctx`. Variables must name
    /// amplitude or parameter slots of the context.
    pub fn expand(&self, ctx: &Ctx) -> Result<HarmonicSeries> {
        self.expand_with(ctx, false)
    }

    /// Expands into a plain polynomial over `ctx`, where `t` and `s` are
    /// ordinary variables and `E` may only appear with total power zero.
    pub fn expand_poly(&self, ctx: &Ctx) -> Result<MultiPoly> {
        let h = self.expand_with(ctx, true)?;
        if h.harmonics().any(|m| m != 0) {
            return Err(Error::NonPolynomial(format!("`{self}` depends on E")));
        }
        Ok(h.coeff(0))
    }

    fn expand_with(&self, ctx: &Ctx, time: bool) -> Result<HarmonicSeries> {
        let rec = |e: &Expr| e.expand_with(ctx, time);
        let one = |c: Gq| HarmonicSeries::single(0, MultiPoly::constant(ctx, c));
        Ok(match self {
            Expr::Num(n) => one(Gq::real(n.clone().into())),
            Expr::I => one(Gq::i()),
            Expr::Eps => HarmonicSeries::single(0, MultiPoly::var(ctx, EPS)),
            Expr::E => HarmonicSeries::single(1, MultiPoly::one(ctx)),
            Expr::Var(name) => {
                let v = ctx.lookup(name)?;
                if (v == T || v == S) && !time {
                    return Err(Error::NonPolynomial(format!(
                        "`{name}` may only appear inside cos(k*t) or sin(k*t)"
                    )));
                }
                if v == EPS {
                    return Err(Error::UnknownSymbol(name.clone()));
                }
                HarmonicSeries::single(0, MultiPoly::var(ctx, v))
            }
            Expr::Neg(a) => rec(a)?.scale(&-Gq::from_int(1)),
            Expr::Add(a, b) => rec(a)?.try_add(&rec(b)?)?,
            Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
            Expr::Mul(a, b) => rec(a)?.try_mul(&rec(b)?)?,
            Expr::Div(a, b) => {
                let inv = invert_monomial(&rec(b)?, b)?;
                rec(a)?.try_mul(&inv)?
            }
            Expr::Pow(a, e) => {
                let base = rec(a)?;
                if *e >= 0 {
                    base.pow(*e as u32)
                } else {
                    invert_monomial(&base, a)?.pow(e.unsigned_abs() as u32)
                }
            }
        })
    }

    /// Direct numeric evaluation with `E = e^{it}`.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Complex64>, eps: f64, t: f64) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(n) => Complex64::new(n.to_f64().unwrap_or(f64::INFINITY), 0.0),
            Expr::I => Complex64::new(0.0, 1.0),
            Expr::Eps => Complex64::new(eps, 0.0),
            Expr::E => Complex64::from_polar(1.0, t),
            Expr::Var(n) => env(n).ok_or_else(|| Error::UnboundSymbol(n.clone()))?,
            Expr::Neg(a) => -a.eval(env, eps, t)?,
            Expr::Add(a, b) => a.eval(env, eps, t)? + b.eval(env, eps, t)?,
            Expr::Sub(a, b) => a.eval(env, eps, t)? - b.eval(env, eps, t)?,
            Expr::Mul(a, b) => a.eval(env, eps, t)? * b.eval(env, eps, t)?,
            Expr::Div(a, b) => {
                let d = b.eval(env, eps, t)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                a.eval(env, eps, t)? / d
            }
            Expr::Pow(a, e) => a.eval(env, eps, t)?.powi(*e as i32),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Inverse of `c·E^k` with `c` a nonzero constant.
fn invert_monomial(h: &HarmonicSeries, src: &Expr) -> Result<HarmonicSeries> {
    let bad = || Error::NonPolynomial(format!("cannot divide by `{src}`"));
    if h.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if h.len() != 1 {
        return Err(bad());
    }
    let (k, p) = h.entries().next().unwrap();
    if p.len() != 1 {
        return Err(bad());
    }
    let (m, c) = p.terms().next().unwrap();
    if !m.is_one() {
        return Err(bad());
    }
    Ok(HarmonicSeries::single(-k, MultiPoly::constant(p.ctx(), c.inv()?)))
}

fn write_sub(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Precedence-aware rendering; parsing the output gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::I => f.write_str("i"),
            Expr::Eps => f.write_str("eps"),
            Expr::E => f.write_str("E"),
            Expr::Var(n) => f.write_str(n),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_sub(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_sub(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_sub(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_sub(f, a, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                write_sub(f, b, 3)
            }
            Expr::Pow(a, e) => {
                write_sub(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() => {
                let mut end = pos;
                while let Some(&(p, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = p + d.len_utf8();
                    chars.next();
                }
                let n: BigInt = src[pos..end].parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: "bad integer".into(),
                })?;
                out.push((pos, Tok::Int(n)));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                let mut end = pos;
                while let Some(&(p, d)) = chars.peek() {
                    if !(d.is_alphanumeric() || d == '_') {
                        break;
                    }
                    end = p + d.len_utf8();
                    chars.next();
                }
                while let Some(&(p, '\'')) = chars.peek() {
                    end = p + 1;
                    chars.next();
                }
                out.push((pos, Tok::Ident(src[pos..end].to_string())));
                continue;
            }
            _ => {
                return Err(Error::Syntax { pos, msg: format!("unexpected character `{c}`") });
            }
        };
        chars.next();
        out.push((pos, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                let e = n.to_i64().filter(|e| *e <= i64::from(u16::MAX)).ok_or(Error::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                Ok(Expr::pow(base, if neg { -e } else { e }))
            }
            _ => Err(Error::Syntax { pos, msg: "expected integer exponent".into() }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Num(n)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::I),
                "eps" => Ok(Expr::Eps),
                "E" => Ok(Expr::E),
                "cos" | "sin" if *self.peek() == Tok::LParen => {
                    self.bump();
                    let k = self.trig_arg()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if name == "cos" { Expr::cos(k) } else { Expr::sin(k) })
                }
                _ => Ok(Expr::Var(name)),
            },
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(Error::Syntax { pos, msg: format!("unexpected token {t:?}") }),
        }
    }

    /// `k*t`, `k t` or `t` with `k` a literal integer.
    fn trig_arg(&mut self) -> Result<i64> {
        let mut k = 1;
        if let Tok::Int(n) = self.peek().clone() {
            k = n.to_i64().ok_or(Error::Syntax { pos: self.pos(), msg: "frequency too large".into() })?;
            self.bump();
            if *self.peek() == Tok::Star {
                self.bump();
            }
        }
        match self.peek() {
            Tok::Ident(t) if t == "t" => {
                self.bump();
                Ok(k)
            }
            _ => self.fail("expected `t` in trigonometric argument"),
        }
    }
}

/// Parses one expression of the `V` grammar.
pub fn parse_expression(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("trailing input");
    }
    Ok(e)
}

/// Parses a polynomial in the symbols of `ctx`, `eps`, `t` and `s` included.
pub fn parse_poly(ctx: &Ctx, src: &str) -> Result<MultiPoly> {
    parse_expression(src)?.expand_poly(ctx)
}
