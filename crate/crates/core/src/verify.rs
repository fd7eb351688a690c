//! Exact checks of a secular table: the functional relations, the group
//! law, absence of secular terms, residuals, inversion and harmonic
//! homogeneity. Also random specifications for property testing.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Ctx, HarmonicSeries, Monomial, MultiPoly, EPS, S, T};
use crate::error::{Error, Result};
use crate::gaussian::Gq;
use crate::model::{compose, Expr, LinearPart, ODESystemSpec};
use crate::perturb::{derivative_slots, time_derivative, SecularTable};
use crate::rg::{derive_rg, invert_amplitudes, renormalized_amplitudes, renormalized_expansion, RGSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    FunctionalRelation,
    GroupProperty,
    NoSecular,
    NaiveResidual,
    RenormalizedResidual,
    Inversion,
    Homogeneity,
    DifferenceFunctionalRelation,
    DifferenceEquation,
    DifferenceRgEquation,
    DifferenceClosedForm,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::FunctionalRelation,
        CheckKind::GroupProperty,
        CheckKind::NoSecular,
        CheckKind::NaiveResidual,
        CheckKind::RenormalizedResidual,
        CheckKind::Inversion,
        CheckKind::Homogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::FunctionalRelation => "functional_relation",
            CheckKind::GroupProperty => "group_property",
            CheckKind::NoSecular => "no_secular",
            CheckKind::NaiveResidual => "naive_residual",
            CheckKind::RenormalizedResidual => "renormalized_residual",
            CheckKind::Inversion => "inversion",
            CheckKind::Homogeneity => "homogeneity",
            CheckKind::DifferenceFunctionalRelation => "difference_functional_relation",
            CheckKind::DifferenceEquation => "difference_equation",
            CheckKind::DifferenceRgEquation => "difference_rg_equation",
            CheckKind::DifferenceClosedForm => "difference_closed_form",
        }
    }

    pub const DIFFERENCE: [CheckKind; 4] = [
        CheckKind::DifferenceFunctionalRelation,
        CheckKind::DifferenceEquation,
        CheckKind::DifferenceRgEquation,
        CheckKind::DifferenceClosedForm,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().chain(Self::DIFFERENCE).find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "N/A",
        }
    }
}

/// Where an identity first breaks. `component` is zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offence {
    pub component: usize,
    pub harmonic: i64,
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub status: CheckStatus,
    pub offence: Option<Offence>,
    pub seed: Option<u64>,
    pub note: Option<String>,
}

impl CheckReport {
    fn pass(kind: CheckKind) -> Self {
        Self { kind, status: CheckStatus::Pass, offence: None, seed: None, note: None }
    }

    fn not_applicable(kind: CheckKind, why: &str) -> Self {
        Self { kind, status: CheckStatus::NotApplicable, offence: None, seed: None, note: Some(why.into()) }
    }

    fn fail(kind: CheckKind, offence: Offence) -> Self {
        Self { kind, status: CheckStatus::Fail, offence: Some(offence), seed: None, note: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.status.as_str())?;
        if let Some(o) = &self.offence {
            write!(
                f,
                " at component {}, harmonic {}, monomial {}: lhs = {}, rhs = {}",
                o.component + 1,
                o.harmonic,
                o.monomial,
                o.lhs,
                o.rhs
            )?;
        }
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        if let Some(s) = self.seed {
            write!(f, " [seed {s}]")?;
        }
        Ok(())
    }
}

/// Compares two polynomials, recording the first differing monomial.
fn compare(kind: CheckKind, component: usize, harmonic: i64, lhs: &MultiPoly, rhs: &MultiPoly) -> Option<CheckReport> {
    lhs.first_difference(rhs).map(|(m, l, r)| {
        CheckReport::fail(
            kind,
            Offence { component, harmonic, monomial: lhs.render_monomial(&m), lhs: l.to_string(), rhs: r.to_string() },
        )
    })
}

fn compare_series(kind: CheckKind, component: usize, lhs: &HarmonicSeries, rhs: &HarmonicSeries) -> Option<CheckReport> {
    let mut hs: Vec<i64> = lhs.harmonics().chain(rhs.harmonics()).collect();
    hs.sort_unstable();
    hs.dedup();
    hs.into_iter().find_map(|m| compare(kind, component, m, &lhs.coeff(m), &rhs.coeff(m)))
}

/// Harmonic index of renormalized amplitude `k`.
fn amplitude_harmonic(table: &SecularTable, k: usize) -> i64 {
    match &table.spec.linear {
        LinearPart::Scalar(f) => {
            let mut offset = 0;
            for (m, n) in f {
                if k < offset + n {
                    return *m;
                }
                offset += n;
            }
            0
        }
        _ => table.resonant_set()[k].1,
    }
}

/// `P_{j,m}(ε,t,A) = P_{j,m}(ε, t−s, 𝒜(ε,s,A))` for every stored coefficient.
pub fn check_functional_relation(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::FunctionalRelation;
    let ctx = &table.ctx;
    let s = MultiPoly::var(ctx, S);
    let t_minus_s = MultiPoly::var(ctx, T).sub(&s);
    let mut bindings = vec![(T, t_minus_s)];
    for (k, a) in renormalized_amplitudes(table).iter().enumerate() {
        bindings.push((ctx.amp(k), a.substitute(&[(T, s.clone())])?));
    }
    for (j, comp) in table.components.iter().enumerate() {
        for (m, p) in comp.entries() {
            let rhs = p.substitute(&bindings)?;
            if let Some(r) = compare(kind, j, m, p, &rhs) {
                return Ok(r);
            }
        }
    }
    Ok(CheckReport::pass(kind))
}

/// `𝒜(ε, t+s, A) = 𝒜(ε, s, 𝒜(ε, t, A))`.
pub fn check_group_property(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::GroupProperty;
    let ctx = &table.ctx;
    let amps = renormalized_amplitudes(table);
    let s = MultiPoly::var(ctx, S);
    let t_plus_s = MultiPoly::var(ctx, T).add(&s);
    let mut inner = vec![(T, s)];
    for (k, a) in amps.iter().enumerate() {
        inner.push((ctx.amp(k), a.clone()));
    }
    for (k, a) in amps.iter().enumerate() {
        let lhs = a.substitute(&[(T, t_plus_s.clone())])?;
        let rhs = a.substitute(&inner)?;
        if let Some(r) = compare(kind, k, amplitude_harmonic(table, k), &lhs, &rhs) {
            return Ok(r);
        }
    }
    Ok(CheckReport::pass(kind))
}

/// The renormalized expansion is free of `t`.
pub fn check_no_secular(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::NoSecular;
    let ren = renormalized_expansion(table)?;
    for (j, comp) in ren.components.iter().enumerate() {
        for (m, p) in comp.entries() {
            let secular = p.sub(&p.at_zero(T));
            if !secular.is_zero() {
                let zero = MultiPoly::zero(p.ctx());
                return Ok(compare(kind, j, m, &secular, &zero).expect("nonzero"));
            }
        }
    }
    Ok(CheckReport::pass(kind))
}

/// Coefficients of `Π_r (x − i m_r)^{n_r}`, lowest degree first.
pub fn characteristic_coefficients(factors: &[(i64, usize)]) -> Vec<Gq> {
    let mut c = vec![Gq::from_int(1)];
    for (m, n) in factors {
        let root = Gq::parts((0, 1), (*m, 1));
        for _ in 0..*n {
            let mut next = vec![Gq::from_int(0); c.len() + 1];
            for (d, a) in c.iter().enumerate() {
                next[d + 1] = &next[d + 1] + a;
                next[d] = &next[d] - &(a * &root);
            }
            c = next;
        }
    }
    c
}

/// `d/dt Y − (linear part) Y − εV(Y)` for the given derivative operator.
fn residuals(
    spec: &ODESystemSpec,
    ctx: &Ctx,
    y: &[HarmonicSeries],
    deriv: &dyn Fn(&HarmonicSeries) -> HarmonicSeries,
) -> Result<Vec<(HarmonicSeries, HarmonicSeries)>> {
    let v = spec.expanded_v()?;
    let order = ctx.order();
    let eps_v = |vj: &HarmonicSeries, args: &[HarmonicSeries]| -> Result<HarmonicSeries> {
        if order == 0 {
            return Ok(HarmonicSeries::zero(ctx));
        }
        Ok(compose(vj, args, ctx, order - 1)?.map(|p| p.shift_var(EPS, 1)))
    };
    let im = |m: i64| Gq::parts((0, 1), (m, 1));
    match &spec.linear {
        LinearPart::Semisimple(ms) => y
            .iter()
            .zip(ms)
            .zip(&v)
            .map(|((yj, mj), vj)| Ok((deriv(yj), yj.scale(&im(*mj)).add(&eps_v(vj, y)?))))
            .collect(),
        LinearPart::Nilpotent { m, .. } => (0..y.len())
            .map(|j| {
                let mut rhs = y[j].scale(&im(*m)).add(&eps_v(&v[j], y)?);
                if j + 1 < y.len() {
                    rhs = rhs.add(&y[j + 1]);
                }
                Ok((deriv(&y[j]), rhs))
            })
            .collect(),
        LinearPart::Scalar(f) => {
            let n = spec.n_amplitudes();
            let mut slots = vec![y[0].clone()];
            for _ in 0..n {
                let next = deriv(slots.last().unwrap());
                slots.push(next);
            }
            let coeffs = characteristic_coefficients(f);
            let mut lhs = HarmonicSeries::zero(ctx);
            for (d, c) in coeffs.iter().enumerate() {
                lhs = lhs.add(&slots[d].scale(c));
            }
            Ok(vec![(lhs, eps_v(&v[0], &slots[..n])?)])
        }
    }
}

/// The naive expansion solves the equation through order K.
pub fn check_naive_residual(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::NaiveResidual;
    if let LinearPart::Scalar(_) = table.spec.linear {
        let slots = derivative_slots(&table.components[0], table.components.len());
        for (d, (stored, fresh)) in table.components.iter().zip(&slots).enumerate() {
            if let Some(r) = compare_series(kind, d, stored, fresh) {
                return Ok(r);
            }
        }
    }
    let y = &table.components[..table.primary_components()];
    for (j, (lhs, rhs)) in residuals(&table.spec, &table.ctx, y, &time_derivative)?.iter().enumerate() {
        if let Some(r) = compare_series(kind, j, lhs, rhs) {
            return Ok(r);
        }
    }
    Ok(CheckReport::pass(kind))
}

/// `d/dt` of `Σ Q_m(𝒜) e^{imt}` along the RG flow.
pub fn flow_derivative(rg: &RGSystem, y: &HarmonicSeries) -> HarmonicSeries {
    y.map_indexed(|m, p| rg.derivation(p).add(&p.scale(&Gq::parts((0, 1), (m, 1)))))
}

/// The renormalized expansion, differentiated along the RG flow, solves the
/// equation through order K.
pub fn check_renormalized_residual(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::RenormalizedResidual;
    let rg = derive_rg(table)?;
    let ren = renormalized_expansion(table)?;
    let deriv = |y: &HarmonicSeries| flow_derivative(&rg, y);
    for (j, (lhs, rhs)) in residuals(&table.spec, &ren.ctx, &ren.components, &deriv)?.iter().enumerate() {
        if let Some(r) = compare_series(kind, j, lhs, rhs) {
            return Ok(r);
        }
    }
    Ok(CheckReport::pass(kind))
}

/// `A ↦ 𝒜 ↦ A` and `𝒜 ↦ A ↦ 𝒜` are both the identity.
pub fn check_inversion(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::Inversion;
    let ctx = &table.ctx;
    let forward = renormalized_amplitudes(table);
    let backward: Vec<MultiPoly> =
        invert_amplitudes(table)?.iter().map(|p| p.with_ctx(ctx)).collect::<Result<_>>()?;
    let bind = |images: &[MultiPoly]| -> Vec<(usize, MultiPoly)> {
        images.iter().enumerate().map(|(k, p)| (ctx.amp(k), p.clone())).collect()
    };
    let (into_forward, into_backward) = (bind(&forward), bind(&backward));
    for k in 0..forward.len() {
        let id = MultiPoly::var(ctx, ctx.amp(k));
        let h = amplitude_harmonic(table, k);
        let round = backward[k].substitute(&into_forward)?;
        if let Some(r) = compare(kind, k, h, &round, &id) {
            return Ok(r);
        }
        let round = forward[k].substitute(&into_backward)?;
        if let Some(r) = compare(kind, k, h, &round, &id) {
            return Ok(r);
        }
    }
    Ok(CheckReport::pass(kind))
}

/// Autonomous semisimple systems: each monomial of `P_{j,m}` has harmonic
/// weight `Σ r_k m_k = m`, and the RG field is equivariant.
pub fn check_homogeneity(table: &SecularTable) -> Result<CheckReport> {
    let kind = CheckKind::Homogeneity;
    let ms = match &table.spec.linear {
        LinearPart::Semisimple(ms) => ms,
        _ => return Ok(CheckReport::not_applicable(kind, "needs a semisimple linear part")),
    };
    if !table.spec.is_autonomous() {
        return Ok(CheckReport::not_applicable(kind, "the perturbation depends on t"));
    }
    let ctx = &table.ctx;
    let weight = |mono: &Monomial| -> i64 {
        ms.iter().enumerate().map(|(k, m)| i64::from(mono.exp(ctx.amp(k))) * m).sum()
    };
    let offending = |j: usize, m: i64, p: &MultiPoly| {
        p.terms().find(|(mono, _)| weight(mono) != m).map(|(mono, c)| {
            CheckReport::fail(
                kind,
                Offence {
                    component: j,
                    harmonic: m,
                    monomial: p.render_monomial(mono),
                    lhs: format!("weight {}", weight(mono)),
                    rhs: format!("weight {m} ({c})"),
                },
            )
        })
    };
    for (j, comp) in table.components.iter().enumerate() {
        for (m, p) in comp.entries() {
            if let Some(r) = offending(j, m, p) {
                return Ok(r);
            }
        }
    }
    let rg = derive_rg(table)?;
    for (j, f) in rg.field.iter().enumerate() {
        if let Some(r) = offending(j, ms[j], &f.with_ctx(ctx)?) {
            return Ok(r);
        }
    }
    Ok(CheckReport::pass(kind))
}

pub fn run_check(kind: CheckKind, table: &SecularTable) -> Result<CheckReport> {
    match kind {
        CheckKind::FunctionalRelation => check_functional_relation(table),
        CheckKind::GroupProperty => check_group_property(table),
        CheckKind::NoSecular => check_no_secular(table),
        CheckKind::NaiveResidual => check_naive_residual(table),
        CheckKind::RenormalizedResidual => check_renormalized_residual(table),
        CheckKind::Inversion => check_inversion(table),
        CheckKind::Homogeneity => check_homogeneity(table),
        _ => Err(Error::Unsupported(format!("{} applies to difference equations", kind.name()))),
    }
}

/// Every check, in [`CheckKind::ALL`] order.
pub fn run_all(table: &SecularTable) -> Result<Vec<CheckReport>> {
    CheckKind::ALL.iter().map(|k| run_check(*k, table)).collect()
}

/// Adds one to a coefficient the functional relation is sure to notice:
/// a t-dependent term of a non-resonant harmonic, or failing that a term of
/// a resonant coefficient at least quadratic in t. Returns the corrupted
/// table and the location changed.
pub fn corrupt_table(table: &SecularTable) -> Result<(SecularTable, Offence)> {
    let pick = |resonant: bool, min_t: u16| {
        table.components.iter().enumerate().find_map(|(j, comp)| {
            comp.entries().filter(|(m, _)| table.is_resonant(j, *m) == resonant).find_map(|(m, p)| {
                p.terms()
                    .find(|(mono, _)| mono.eps() >= 1 && mono.exp(T) >= min_t)
                    .map(|(mono, c)| (j, m, mono.clone(), c.clone()))
            })
        })
    };
    let (j, m, mono, c) = pick(false, 1)
        .or_else(|| pick(true, 2))
        .ok_or_else(|| Error::Unsupported("table has no term suitable for corruption".into()))?;
    let mut out = table.clone();
    let mut p = out.p(j, m);
    p.add_term(mono.clone(), &Gq::from_int(1));
    let changed = &c + &Gq::from_int(1);
    let offence = Offence {
        component: j,
        harmonic: m,
        monomial: p.render_monomial(&mono),
        lhs: c.to_string(),
        rhs: changed.to_string(),
    };
    out.components[j].insert(m, p);
    Ok((out, offence))
}

/// Equation classes produced by [`random_spec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomClass {
    Semisimple,
    Nilpotent,
    Scalar,
}

impl RandomClass {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "semisimple" => Some(Self::Semisimple),
            "nilpotent" => Some(Self::Nilpotent),
            "scalar" => Some(Self::Scalar),
            _ => None,
        }
    }
}

/// A small random specification: at most two unknowns, polynomial degree
/// at most two, order at most three, integer coefficients in `[-3, 3]` and
/// `E` powers in `{-1, 0, 1}`. Deterministic in `seed`.
pub fn random_spec(class: RandomClass, seed: u64) -> Result<ODESystemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=2usize);
    let linear = match class {
        RandomClass::Semisimple => LinearPart::Semisimple((0..n).map(|_| rng.gen_range(-2..=2)).collect()),
        RandomClass::Nilpotent => LinearPart::Nilpotent { m: rng.gen_range(-1..=1), size: n },
        RandomClass::Scalar => {
            let m0 = rng.gen_range(-1..=1);
            if n == 2 && rng.gen_bool(0.5) {
                LinearPart::Scalar(vec![(m0, 1), (m0 + rng.gen_range(1..=2), 1)])
            } else {
                LinearPart::Scalar(vec![(m0, n)])
            }
        }
    };
    let states = linear.state_names();
    let components = match linear {
        LinearPart::Scalar(_) => 1,
        _ => n,
    };
    let v = (0..components).map(|_| random_polynomial(&mut rng, &states)).collect();
    ODESystemSpec::new(linear, v, vec![], rng.gen_range(1..=3), None)
}

fn random_polynomial(rng: &mut ChaCha8Rng, states: &[String]) -> Expr {
    let terms = rng.gen_range(1..=3);
    let mut acc: Option<Expr> = None;
    for _ in 0..terms {
        let c = rng.gen_range(-3..=3i64);
        if c == 0 {
            continue;
        }
        let mut term = Expr::num(c);
        let e = rng.gen_range(-1..=1i64);
        if e != 0 {
            term = Expr::mul(term, Expr::pow(Expr::E, e));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let y = &states[rng.gen_range(0..states.len())];
            term = Expr::mul(term, Expr::var(y));
        }
        acc = Some(match acc {
            None => term,
            Some(a) => Expr::add(a, term),
        });
    }
    acc.unwrap_or_else(|| Expr::num(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_expression;
    use crate::perturb::expand;

    fn cd(k: u32) -> SecularTable {
        let v = ["y1*y2 + E^-1*y2", "y1*y2 + E*y1"].iter().map(|s| parse_expression(s).unwrap()).collect();
        expand(&ODESystemSpec::new(LinearPart::Semisimple(vec![1, -1]), v, vec![], k, None).unwrap()).unwrap()
    }

    #[test]
    fn all_checks_pass_on_cd() {
        for r in run_all(&cd(3)).unwrap() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn homogeneity_not_applicable_for_forced_systems() {
        assert_eq!(check_homogeneity(&cd(2)).unwrap().status, CheckStatus::NotApplicable);
    }

    #[test]
    fn corruption_is_detected() {
        let (bad, at) = corrupt_table(&cd(3)).unwrap();
        let r = check_functional_relation(&bad).unwrap();
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.offence.as_ref().unwrap().component, at.component);
    }

    #[test]
    fn characteristic_polynomial() {
        let c = characteristic_coefficients(&[(1, 1), (-1, 1)]);
        assert_eq!(c, vec![Gq::from_int(1), Gq::from_int(0), Gq::from_int(1)]);
    }

    #[test]
    fn random_specs_are_deterministic() {
        for class in [RandomClass::Semisimple, RandomClass::Nilpotent, RandomClass::Scalar] {
            assert_eq!(random_spec(class, 7).unwrap(), random_spec(class, 7).unwrap());
        }
    }
}
