//! Renormalization: amplitudes, the RG field, the secular-free expansion and
//! the inverse amplitude map.

mod polar;

pub use polar::{polar_transform, PolarKey, PolarPoly, PolarSystem};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{Ctx, HarmonicSeries, MultiPoly, T};
use crate::error::Result;
use crate::gaussian::Gq;
use crate::model::{renormalized_names, LinearPart};
use crate::perturb::SecularTable;

/// `𝒜_k(ε, t, A)` for every amplitude, in the table context.
///
/// For a scalar equation the amplitudes attached to factor r are the
/// successive t-derivatives of `P_{m_r}`.
pub fn renormalized_amplitudes(table: &SecularTable) -> Vec<MultiPoly> {
    match &table.spec.linear {
        LinearPart::Scalar(f) => {
            let mut out = Vec::with_capacity(table.spec.n_amplitudes());
            for (mr, nr) in f {
                let mut p = table.p(0, *mr);
                for _ in 0..*nr {
                    let next = p.diff_t();
                    out.push(p);
                    p = next;
                }
            }
            out
        }
        _ => table.resonant_set().iter().map(|(j, m)| table.p(*j, *m)).collect(),
    }
}

/// Context with the amplitude slots renamed to their renormalized names.
pub fn renormalized_ctx(table: &SecularTable) -> Result<Ctx> {
    Ok(table
        .ctx
        .with_amplitude_names(&renormalized_names(table.ctx.amplitude_names()))?
        .shared())
}

/// The autonomous first-order RG system `d𝒜_k/dt = F_k(ε, 𝒜)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RGSystem {
    pub ctx: Ctx,
    pub linear: LinearPart,
    pub field: Vec<MultiPoly>,
}

impl RGSystem {
    pub fn n(&self) -> usize {
        self.field.len()
    }

    /// The derivation `D = Σ_k F_k ∂/∂𝒜_k` applied to a polynomial.
    pub fn derivation(&self, p: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(p.ctx());
        for (k, f) in self.field.iter().enumerate() {
            let d = p.diff(self.ctx.amp(k));
            if !d.is_zero() {
                out = out.add(&d.mul(f));
            }
        }
        out
    }

    /// Numeric field at a point; `params` follow the context's order.
    pub fn eval(&self, eps: f64, amps: &[Complex64], params: &[Complex64]) -> Vec<Complex64> {
        let vals = point(&self.ctx, eps, 0.0, amps, params);
        self.field.iter().map(|f| f.eval(&vals)).collect()
    }

    /// Display lines, highest derivative form for scalar equations.
    pub fn lines(&self) -> Vec<String> {
        let names = self.ctx.amplitude_names();
        match &self.linear {
            LinearPart::Scalar(f) => {
                let mut out = Vec::new();
                let mut offset = 0;
                for (_, nr) in f {
                    let head = &names[offset];
                    let top = &self.field[offset + nr - 1];
                    if *nr == 1 {
                        out.push(format!("d{head}/dt = {top}"));
                    } else {
                        for j in 1..*nr {
                            out.push(format!("d{}/dt = {}", names[offset + j - 1], names[offset + j]));
                        }
                        out.push(format!("d^{nr}{head}/dt^{nr} = {top}"));
                    }
                    offset += nr;
                }
                out
            }
            _ => names.iter().zip(&self.field).map(|(n, f)| format!("d{n}/dt = {f}")).collect(),
        }
    }
}

impl fmt::Display for RGSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Slot-ordered value vector for `eval`.
pub(crate) fn point(ctx: &Ctx, eps: f64, t: f64, amps: &[Complex64], params: &[Complex64]) -> Vec<Complex64> {
    let mut vals = alloc::vec![Complex64::new(0.0, 0.0); ctx.nvars()];
    vals[crate::algebra::EPS] = Complex64::new(eps, 0.0);
    vals[T] = Complex64::new(t, 0.0);
    for (k, a) in amps.iter().enumerate() {
        vals[ctx.amp(k)] = *a;
    }
    for (k, p) in params.iter().enumerate() {
        vals[ctx.param(k)] = *p;
    }
    vals
}

/// The RG field: `F_k = ∂_s 𝒜_k(ε, s, A)|_{s=0}` with `A` renamed to `𝒜`.
pub fn derive_rg(table: &SecularTable) -> Result<RGSystem> {
    let ctx = renormalized_ctx(table)?;
    let field = renormalized_amplitudes(table)
        .iter()
        .map(|a| a.var_coeff(T, 1).with_ctx(&ctx))
        .collect::<Result<_>>()?;
    Ok(RGSystem { ctx, linear: table.spec.linear.clone(), field })
}

/// `Y_j(t) = Σ_m P_{j,m}(ε, 0, 𝒜(t)) e^{imt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizedExpansion {
    pub ctx: Ctx,
    pub components: Vec<HarmonicSeries>,
}

impl RenormalizedExpansion {
    /// Numeric value of every component at time `t` given `𝒜(t)`.
    pub fn eval(&self, eps: f64, t: f64, amps: &[Complex64], params: &[Complex64]) -> Vec<Complex64> {
        let vals = point(&self.ctx, eps, 0.0, amps, params);
        self.components
            .iter()
            .map(|c| {
                c.entries()
                    .map(|(m, p)| p.eval(&vals) * phase(m, t))
                    .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
            })
            .collect()
    }
}

/// `e^{imt}`, exactly conjugate-symmetric in `m`.
pub fn phase(m: i64, t: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, m.unsigned_abs() as f64 * t);
    if m < 0 {
        z.conj()
    } else {
        z
    }
}

pub fn renormalized_expansion(table: &SecularTable) -> Result<RenormalizedExpansion> {
    let ctx = renormalized_ctx(table)?;
    let components = table.components[..table.primary_components()]
        .iter()
        .map(|c| c.map(|p| p.at_zero(T)).with_ctx(&ctx))
        .collect::<Result<_>>()?;
    Ok(RenormalizedExpansion { ctx, components })
}

/// `A_k = 𝒜_k(ε, −t, 𝒜)`, expressed in the renormalized context.
pub fn invert_amplitudes(table: &SecularTable) -> Result<Vec<MultiPoly>> {
    let ctx = renormalized_ctx(table)?;
    let minus_t = MultiPoly::var(&table.ctx, T).scale(&Gq::from_int(-1));
    renormalized_amplitudes(table)
        .iter()
        .map(|a| a.substitute(&[(T, minus_t.clone())])?.with_ctx(&ctx))
        .collect()
}
