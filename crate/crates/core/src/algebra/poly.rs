use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::context::{same_ctx, Ctx, EPS, T};
use crate::error::{Error, Result};
use crate::gaussian::Gq;

/// Exponent vector over the variables of a [`PolyContext`](super::PolyContext).
///
/// Ordered by ε-degree first, then by total degree of the remaining
/// variables, then reverse-lexicographically (t before s before amplitudes
/// before parameters), so that ε-truncation is a prefix cut.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn exp(&self, var: usize) -> u16 {
        self.0[var]
    }

    pub fn eps(&self) -> u32 {
        u32::from(self.0[EPS])
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with_exp(&self, var: usize, e: u16) -> Monomial {
        let mut m = self.clone();
        m.0[var] = e;
        m
    }

    fn rest_degree(&self) -> u32 {
        self.0[1..].iter().map(|&e| u32::from(e)).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0[EPS]
            .cmp(&other.0[EPS])
            .then_with(|| self.rest_degree().cmp(&other.rest_degree()))
            .then_with(|| other.0[1..].cmp(&self.0[1..]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over ℚ(i) in the variables of a context, truncated at
/// ε^{K+1}. No zero coefficient is ever stored.
#[derive(Clone)]
pub struct MultiPoly {
    ctx: Ctx,
    terms: BTreeMap<Monomial, Gq>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl MultiPoly {
    pub fn zero(ctx: &Ctx) -> Self {
        Self { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Ctx, c: Gq) -> Self {
        Self::monomial(ctx, Monomial::one(ctx.nvars()), c)
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, Gq::one())
    }

    pub fn var(ctx: &Ctx, var: usize) -> Self {
        Self::var_pow(ctx, var, 1)
    }

    pub fn var_pow(ctx: &Ctx, var: usize, e: u16) -> Self {
        let m = Monomial::one(ctx.nvars()).with_exp(var, e);
        Self::monomial(ctx, m, Gq::one())
    }

    /// A single term; dropped if beyond the truncation order.
    pub fn monomial(ctx: &Ctx, m: Monomial, c: Gq) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() && m.eps() <= ctx.order() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(ctx: &Ctx, terms: impl IntoIterator<Item = (Monomial, Gq)>) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gq)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Gq {
        self.terms.get(m).cloned().unwrap_or_else(Gq::zero)
    }

    /// Adds `c·m` in place, respecting truncation.
    pub fn add_term(&mut self, m: Monomial, c: &Gq) {
        if c.is_zero() || m.eps() > self.ctx.order() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_trunc(other, self.ctx.order()))
    }

    /// Product keeping only ε-degrees ≤ `order`.
    pub fn mul_trunc(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero(&self.ctx);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let order = order.min(self.ctx.order());
        for (ma, ca) in &self.terms {
            let ea = ma.eps();
            if ea > order {
                break;
            }
            for (mb, cb) in &other.terms {
                if ea + mb.eps() > order {
                    break;
                }
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("context mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("context mismatch")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("context mismatch")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Gq::one())
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        Self {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by a monomial `var^e`.
    pub fn shift_var(&self, var: usize, e: u16) -> Self {
        Self::from_terms(
            &self.ctx,
            self.terms.iter().map(|(m, c)| {
                let mut m = m.clone();
                m.0[var] += e;
                (m, c.clone())
            }),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&Gq) -> Gq) -> Self {
        Self::from_terms(&self.ctx, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Complex conjugation of every coefficient (variables treated as formal).
    pub fn conj(&self) -> Self {
        self.map_coeffs(Gq::conj)
    }

    /// Exchanges the exponents of two variables.
    pub fn swap_vars(&self, a: usize, b: usize) -> Self {
        Self::from_terms(
            &self.ctx,
            self.terms.iter().map(|(m, c)| {
                let mut m = m.clone();
                m.0.swap(a, b);
                (m, c.clone())
            }),
        )
    }

    /// Reinterprets the polynomial in a context of identical layout
    /// (renamed symbols or a different truncation order, truncating if lower).
    pub fn with_ctx(&self, ctx: &Ctx) -> Result<Self> {
        if !self.ctx.same_layout(ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(Self::from_terms(ctx, self.terms.iter().map(|(m, c)| (m.clone(), c.clone()))))
    }

    /// Terms with ε-degree ≤ `order`.
    pub fn truncate(&self, order: u32) -> Self {
        Self {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .take_while(|(m, _)| m.eps() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The coefficient of ε^k as a polynomial free of ε.
    pub fn eps_coeff(&self, k: u32) -> Self {
        self.var_coeff(EPS, k as u16)
    }

    /// Coefficient of `var^e`, with `var` removed.
    pub fn var_coeff(&self, var: usize, e: u16) -> Self {
        Self::from_terms(
            &self.ctx,
            self.terms
                .iter()
                .filter(|(m, _)| m.0[var] == e)
                .map(|(m, c)| (m.with_exp(var, 0), c.clone())),
        )
    }

    /// Lowest ε-degree present, or `None` for zero.
    pub fn min_eps(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::eps)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|m| m.0[var] == 0)
    }

    /// Formal partial derivative.
    pub fn diff(&self, var: usize) -> Self {
        Self::from_terms(
            &self.ctx,
            self.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, c)| {
                let e = m.0[var];
                (m.with_exp(var, e - 1), c * &Gq::from_int(i64::from(e)))
            }),
        )
    }

    pub fn diff_t(&self) -> Self {
        self.diff(T)
    }

    /// The antiderivative in `var` with zero constant term.
    pub fn antidiff(&self, var: usize) -> Self {
        Self::from_terms(
            &self.ctx,
            self.terms.iter().map(|(m, c)| {
                let e = m.0[var] + 1;
                (m.with_exp(var, e), c * &Gq::from_frac(1, i64::from(e)))
            }),
        )
    }

    pub fn antidiff_t(&self) -> Self {
        self.antidiff(T)
    }

    /// Sets `var = 0`.
    pub fn at_zero(&self, var: usize) -> Self {
        self.var_coeff(var, 0)
    }

    /// Simultaneous substitution `var ↦ image` for every bound slot, expanded
    /// and truncated. Unbound variables stay as they are.
    pub fn substitute(&self, bindings: &[(usize, MultiPoly)]) -> Result<Self> {
        let n = self.ctx.nvars();
        let mut images: Vec<Option<&MultiPoly>> = vec![None; n];
        for (v, img) in bindings {
            if *v >= n {
                return Err(Error::UnknownSymbol(alloc::format!("#{v}")));
            }
            self.check(img)?;
            images[*v] = Some(img);
        }
        let order = self.ctx.order();
        let mut powers: Vec<Vec<MultiPoly>> = vec![Vec::new(); n];
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut kept = Monomial::one(n);
            let mut factor = Self::constant(&self.ctx, c.clone());
            for v in 0..n {
                let e = m.0[v] as usize;
                if e == 0 {
                    continue;
                }
                match images[v] {
                    None => kept.0[v] = m.0[v],
                    Some(img) => {
                        let cache = &mut powers[v];
                        if cache.is_empty() {
                            cache.push(Self::one(&self.ctx));
                        }
                        while cache.len() <= e {
                            let next = cache.last().unwrap().mul_trunc(img, order);
                            cache.push(next);
                        }
                        factor = factor.mul_trunc(&cache[e], order);
                    }
                }
                if factor.is_zero() {
                    break;
                }
            }
            for (fm, fc) in &factor.terms {
                out.add_term(fm.mul(&kept), fc);
            }
        }
        Ok(out)
    }

    /// Substitution by symbol name.
    pub fn substitute_named(&self, bindings: &[(&str, MultiPoly)]) -> Result<Self> {
        let resolved: Result<Vec<(usize, MultiPoly)>> = bindings
            .iter()
            .map(|(name, img)| Ok((self.ctx.lookup(name)?, img.clone())))
            .collect();
        self.substitute(&resolved?)
    }

    /// Numeric value with every variable given in slot order.
    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        let n = self.ctx.nvars();
        let mut powers: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]; n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = c.to_complex();
            for v in 0..n {
                let e = m.0[v] as usize;
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e {
                    let last = *cache.last().unwrap();
                    cache.push(last * values[v]);
                }
                term *= cache[e];
            }
            acc += term;
        }
        acc
    }

    /// Numeric value with ε and t given explicitly and the other symbols by
    /// name. Symbols the polynomial does not depend on may be left unbound.
    pub fn eval_complex(&self, point: &[(&str, Complex64)], eps: f64, t: f64) -> Result<Complex64> {
        let n = self.ctx.nvars();
        let mut values = vec![None; n];
        values[EPS] = Some(Complex64::new(eps, 0.0));
        values[T] = Some(Complex64::new(t, 0.0));
        for (name, z) in point {
            values[self.ctx.lookup(name)?] = Some(*z);
        }
        for v in 0..n {
            if values[v].is_none() && !self.is_free_of(v) {
                return Err(Error::UnboundSymbol(self.ctx.name(v).into()));
            }
        }
        let vals: Vec<Complex64> =
            values.into_iter().map(|z| z.unwrap_or(Complex64::new(0.0, 0.0))).collect();
        Ok(self.eval(&vals))
    }

    /// First term (in canonical order) where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(Monomial, Gq, Gq)> {
        let diff = self.sub(other);
        diff.terms.keys().next().map(|m| (m.clone(), self.coeff(m), other.coeff(m)))
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        render_monomial(&self.ctx, m)
    }
}

pub(crate) fn render_monomial(ctx: &Ctx, m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ctx.name(v).into()),
            _ => parts.push(alloc::format!("{}^{}", ctx.name(v), e)),
        }
    }
    if parts.is_empty() {
        String::from("1")
    } else {
        parts.join("*")
    }
}

/// Canonical rendering: terms in monomial order, ` + `/` - ` separators,
/// `i` for the imaginary unit, `^` for powers. Re-parses with the expression
/// grammar.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative_lead();
            let mag = if neg { -c } else { c.clone() };
            match (k == 0, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&render_monomial(&self.ctx, m))?;
            } else {
                write!(f, "{}*{}", mag, render_monomial(&self.ctx, m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
