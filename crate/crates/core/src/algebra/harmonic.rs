use alloc::collections::BTreeMap;
use core::fmt;

use super::context::{same_ctx, Ctx};
use super::poly::MultiPoly;
use crate::error::{Error, Result};
use crate::gaussian::Gq;

/// Finite Laurent series `Σ_m P_m e^{imt}` with polynomial coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct HarmonicSeries {
    ctx: Ctx,
    entries: BTreeMap<i64, MultiPoly>,
}

impl HarmonicSeries {
    pub fn zero(ctx: &Ctx) -> Self {
        Self { ctx: ctx.clone(), entries: BTreeMap::new() }
    }

    pub fn single(m: i64, p: MultiPoly) -> Self {
        let mut h = Self::zero(p.ctx());
        h.insert(m, p);
        h
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, &MultiPoly)> {
        self.entries.iter().map(|(m, p)| (*m, p))
    }

    pub fn harmonics(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: i64) -> Option<&MultiPoly> {
        self.entries.get(&m)
    }

    /// Coefficient of e^{imt}, zero if absent.
    pub fn coeff(&self, m: i64) -> MultiPoly {
        self.entries.get(&m).cloned().unwrap_or_else(|| MultiPoly::zero(&self.ctx))
    }

    /// Replaces the coefficient of e^{imt}.
    pub fn insert(&mut self, m: i64, p: MultiPoly) {
        debug_assert!(same_ctx(&self.ctx, p.ctx()));
        if p.is_zero() {
            self.entries.remove(&m);
        } else {
            self.entries.insert(m, p);
        }
    }

    /// Adds `p·e^{imt}`.
    pub fn add_at(&mut self, m: i64, p: &MultiPoly) {
        if p.is_zero() {
            return;
        }
        let next = match self.entries.get(&m) {
            Some(q) => q.add(p),
            None => p.clone(),
        };
        self.insert(m, next);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let mut out = self.clone();
        for (m, p) in &other.entries {
            out.add_at(*m, p);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("context mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Gq::from_int(1)))
    }

    /// Convolution over harmonic indices, ε-truncated.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.mul_trunc(other, self.ctx.order()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("context mismatch")
    }

    pub fn mul_trunc(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (ma, pa) in &self.entries {
            let ea = pa.min_eps().unwrap_or(0);
            for (mb, pb) in &other.entries {
                if ea + pb.min_eps().unwrap_or(0) > order {
                    continue;
                }
                out.add_at(ma + mb, &pa.mul_trunc(pb, order));
            }
        }
        out
    }

    /// Multiplies every coefficient by a polynomial.
    pub fn mul_poly(&self, p: &MultiPoly, order: u32) -> Self {
        self.map(|q| q.mul_trunc(p, order))
    }

    pub fn scale(&self, c: &Gq) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Multiplies by e^{ikt}.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            ctx: self.ctx.clone(),
            entries: self.entries.iter().map(|(m, p)| (m + k, p.clone())).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, p) in &self.entries {
            out.insert(*m, f(p));
        }
        out
    }

    pub fn map_indexed(&self, f: impl Fn(i64, &MultiPoly) -> MultiPoly) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, p) in &self.entries {
            out.insert(*m, f(*m, p));
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map(|p| p.truncate(order))
    }

    pub fn eps_coeff(&self, k: u32) -> Self {
        self.map(|p| p.eps_coeff(k))
    }

    pub fn with_ctx(&self, ctx: &Ctx) -> Result<Self> {
        let mut out = Self::zero(ctx);
        for (m, p) in &self.entries {
            out.insert(*m, p.with_ctx(ctx)?);
        }
        Ok(out)
    }

    /// Lowest ε-degree of each populated harmonic.
    pub fn min_orders(&self) -> BTreeMap<i64, u32> {
        self.entries.iter().map(|(m, p)| (*m, p.min_eps().unwrap_or(0))).collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::single(0, MultiPoly::one(&self.ctx));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for HarmonicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, p)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({p})*E^{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for HarmonicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
