//! Naive perturbation: the unique formal solution of each equation class,
//! stored harmonic by harmonic as polynomials in ε, t and the bare
//! amplitudes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{resolve_shift, Ctx, HarmonicSeries, MultiPoly, EPS, T};
use crate::error::{Error, Result};
use crate::gaussian::Gq;
use crate::model::{compose, LinearPart, ODESystemSpec};

/// The naive expansion of one specification.
///
/// For semisimple and nilpotent systems `components[j]` is `Y_j`. For a
/// scalar equation `components[d]` is the d-th time derivative of `Y`, so
/// `components[0]` holds the secular coefficients `P_m` themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularTable {
    pub spec: ODESystemSpec,
    pub ctx: Ctx,
    pub components: Vec<HarmonicSeries>,
    resonant: Vec<(usize, i64)>,
}

impl SecularTable {
    /// Assembles a table from precomputed components (used when reading a
    /// table back from disk).
    pub fn from_parts(spec: ODESystemSpec, ctx: Ctx, components: Vec<HarmonicSeries>) -> Result<Self> {
        let want = spec.n_amplitudes();
        if components.len() != want {
            return Err(Error::InvalidSpec(alloc::format!(
                "expected {want} components, got {}",
                components.len()
            )));
        }
        let resonant = resonant_set(&spec.linear);
        Ok(Self { spec, ctx, components, resonant })
    }

    pub fn order(&self) -> u32 {
        self.ctx.order()
    }

    /// `P_{j,m}` (zero when absent).
    pub fn p(&self, j: usize, m: i64) -> MultiPoly {
        self.components[j].coeff(m)
    }

    /// The (component, harmonic) pairs whose coefficient defines a
    /// renormalized amplitude.
    pub fn resonant_set(&self) -> &[(usize, i64)] {
        &self.resonant
    }

    pub fn is_resonant(&self, j: usize, m: i64) -> bool {
        match &self.spec.linear {
            LinearPart::Scalar(f) => f.iter().any(|(mr, _)| *mr == m),
            _ => self.resonant.contains(&(j, m)),
        }
    }

    /// Lowest ε-degree of `P_{j,m}`, `None` if it vanishes to the order kept.
    pub fn min_order(&self, j: usize, m: i64) -> Option<u32> {
        self.components[j].get(m).and_then(MultiPoly::min_eps)
    }

    /// All `d_{j,m}` at once.
    pub fn min_orders(&self) -> BTreeMap<(usize, i64), u32> {
        let mut out = BTreeMap::new();
        for (j, c) in self.components.iter().enumerate() {
            for (m, d) in c.min_orders() {
                out.insert((j, m), d);
            }
        }
        out
    }

    /// Components that carry the equation's unknowns (all of them, or only
    /// `Y` itself for a scalar equation).
    pub fn primary_components(&self) -> usize {
        match self.spec.linear {
            LinearPart::Scalar(_) => 1,
            _ => self.components.len(),
        }
    }
}

/// Resonant (component, harmonic) pairs of a linear part.
pub fn resonant_set(linear: &LinearPart) -> Vec<(usize, i64)> {
    match linear {
        LinearPart::Semisimple(ms) => ms.iter().copied().enumerate().collect(),
        LinearPart::Nilpotent { m, size } => (0..*size).map(|j| (j, *m)).collect(),
        LinearPart::Scalar(f) => f.iter().map(|(m, _)| (0, *m)).collect(),
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Solves the order-k equation for harmonic `m` given the right-hand side
/// `R` (one entry per component, ε-free). The solution is the unique one
/// satisfying the class's normalization: resonant entries carry no
/// polynomial part of the homogeneous kernel.
pub fn solve_linear_step(linear: &LinearPart, m: i64, rhs: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    let shift = |d: i64| Gq::parts((0, 1), (d, 1));
    match linear {
        LinearPart::Semisimple(ms) => rhs
            .iter()
            .zip(ms)
            .map(|(r, mj)| {
                if m == *mj {
                    Ok(r.antidiff_t())
                } else {
                    resolve_shift(&shift(m - mj), r)
                }
            })
            .collect(),
        LinearPart::Nilpotent { m: m0, size } => {
            if rhs.len() != *size {
                return Err(Error::ContextMismatch);
            }
            let mut out = vec![MultiPoly::zero(rhs[0].ctx()); *size];
            let mut carry = MultiPoly::zero(rhs[0].ctx());
            for j in (0..*size).rev() {
                let r = rhs[j].add(&carry);
                out[j] = if m == *m0 { r.antidiff_t() } else { resolve_shift(&shift(m - m0), &r)? };
                carry = out[j].clone();
            }
            Ok(out)
        }
        LinearPart::Scalar(f) => {
            let [r] = rhs else { return Err(Error::ContextMismatch) };
            let mut p = r.clone();
            for (mr, nr) in f {
                if *mr != m {
                    for _ in 0..*nr {
                        p = resolve_shift(&shift(m - mr), &p)?;
                    }
                }
            }
            if let Some((_, nr)) = f.iter().find(|(mr, _)| *mr == m) {
                for _ in 0..*nr {
                    p = p.antidiff_t();
                }
            }
            Ok(vec![p])
        }
    }
}

/// Runs the engine matching the spec's class.
pub fn expand(spec: &ODESystemSpec) -> Result<SecularTable> {
    match spec.linear {
        LinearPart::Semisimple(_) => expand_semisimple(spec),
        LinearPart::Nilpotent { .. } => expand_nilpotent(spec),
        LinearPart::Scalar(_) => expand_scalar(spec),
    }
}

/// Unperturbed solution in table form.
fn order_zero(spec: &ODESystemSpec, ctx: &Ctx) -> Vec<HarmonicSeries> {
    let amp = |k: usize| MultiPoly::var(ctx, ctx.amp(k));
    let t_pow = |k: usize| {
        MultiPoly::var_pow(ctx, T, k as u16).scale(&Gq::from_frac(1, factorial(k)))
    };
    match &spec.linear {
        LinearPart::Semisimple(ms) => {
            ms.iter().enumerate().map(|(j, m)| HarmonicSeries::single(*m, amp(j))).collect()
        }
        LinearPart::Nilpotent { m, size } => (0..*size)
            .map(|j| {
                let mut g = MultiPoly::zero(ctx);
                for k in j..*size {
                    g = g.add(&amp(k).mul(&t_pow(k - j)));
                }
                HarmonicSeries::single(*m, g)
            })
            .collect(),
        LinearPart::Scalar(f) => {
            let mut y = HarmonicSeries::zero(ctx);
            let mut offset = 0;
            for (mr, nr) in f {
                let mut h = MultiPoly::zero(ctx);
                for j in 0..*nr {
                    h = h.add(&amp(offset + j).mul(&t_pow(j)));
                }
                y.add_at(*mr, &h);
                offset += nr;
            }
            derivative_slots(&y, spec.n_amplitudes())
        }
    }
}

/// `Y, dY/dt, …` for `Y = Σ P_m e^{imt}`, using `d/dt ↦ ∂_t + im`.
pub fn derivative_slots(y: &HarmonicSeries, n: usize) -> Vec<HarmonicSeries> {
    let mut out = Vec::with_capacity(n);
    let mut cur = y.clone();
    for _ in 0..n {
        let next = time_derivative(&cur);
        out.push(cur);
        cur = next;
    }
    out
}

/// `d/dt` of `Σ P_m(t) e^{imt}`.
pub fn time_derivative(y: &HarmonicSeries) -> HarmonicSeries {
    y.map_indexed(|m, p| p.diff_t().add(&p.scale(&Gq::parts((0, 1), (m, 1)))))
}

/// Generic driver: build order k from orders `< k`.
fn run(spec: &ODESystemSpec) -> Result<SecularTable> {
    let ctx = spec.table_ctx()?;
    let v = spec.expanded_v()?;
    let mut comps = order_zero(spec, &ctx);
    let scalar = matches!(spec.linear, LinearPart::Scalar(_));
    for k in 1..=spec.order {
        // [V(ε, e^{it}, Σ_{l<k} ε^l y_l)]_{ε^{k-1}}, per component.
        let rhs: Vec<HarmonicSeries> = v
            .iter()
            .map(|vj| Ok(compose(vj, &comps, &ctx, k - 1)?.eps_coeff(k - 1)))
            .collect::<Result<_>>()?;
        let mut harmonics: Vec<i64> = rhs.iter().flat_map(|h| h.harmonics()).collect();
        harmonics.sort_unstable();
        harmonics.dedup();
        if scalar {
            let mut y = comps[0].clone();
            for m in harmonics {
                let sol = solve_linear_step(&spec.linear, m, &[rhs[0].coeff(m)])?;
                y.add_at(m, &sol[0].shift_var(EPS, k as u16));
            }
            comps = derivative_slots(&y, spec.n_amplitudes());
        } else {
            for m in harmonics {
                let r: Vec<MultiPoly> = rhs.iter().map(|h| h.coeff(m)).collect();
                let sol = solve_linear_step(&spec.linear, m, &r)?;
                for (j, p) in sol.iter().enumerate() {
                    comps[j].add_at(m, &p.shift_var(EPS, k as u16));
                }
            }
        }
    }
    SecularTable::from_parts(spec.clone(), ctx, comps)
}

fn require(spec: &ODESystemSpec, class: &str) -> Result<()> {
    if spec.class_name() == class {
        Ok(())
    } else {
        Err(Error::Unsupported(alloc::format!("expected a {class} spec, got {}", spec.class_name())))
    }
}

/// Semisimple linear part: per harmonic solve `∂P + i(m − m_j)P = R`.
pub fn expand_semisimple(spec: &ODESystemSpec) -> Result<SecularTable> {
    require(spec, "semisimple")?;
    run(spec)
}

/// Single Jordan block: triangular solve per harmonic, shifted by the
/// block eigenvalue.
pub fn expand_nilpotent(spec: &ODESystemSpec) -> Result<SecularTable> {
    require(spec, "nilpotent")?;
    run(spec)
}

/// Scalar N-th order equation: invert the factored characteristic operator
/// per harmonic.
pub fn expand_scalar(spec: &ODESystemSpec) -> Result<SecularTable> {
    require(spec, "scalar")?;
    run(spec)
}
