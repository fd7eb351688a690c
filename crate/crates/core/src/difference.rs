//! The linear difference equation `y(t+π) − y(t−π) = 2εU(e^{it}) y(t)`.
//!
//! Every harmonic is resonant, so the bare amplitudes form an infinite
//! family `A_m`. Computations keep the symbols `A_m` with `|m| ≤ W` and set
//! the rest to zero; results are only returned for harmonics where that
//! truncation cannot reach. Time enters through `u = t/π`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Ctx, HarmonicSeries, MultiPoly, PolyContext, EPS, T};
use crate::error::{Error, Result};
use crate::gaussian::Gq;
use crate::verify::{CheckKind, CheckReport, CheckStatus, Offence};

/// Laurent polynomial `Σ_l α_l z^l` with finite support. Used for `2U(z)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Gq>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Gq::from_int(1))
    }

    pub fn monomial(l: i64, c: Gq) -> Self {
        let mut p = Self::zero();
        p.add_term(l, &c);
        p
    }

    pub fn new(pairs: impl IntoIterator<Item = (i64, Gq)>) -> Self {
        let mut p = Self::zero();
        for (l, c) in pairs {
            p.add_term(l, &c);
        }
        p
    }

    pub fn add_term(&mut self, l: i64, c: &Gq) {
        let sum = self.coeff(l) + c.clone();
        if sum.is_zero() {
            self.coeffs.remove(&l);
        } else {
            self.coeffs.insert(l, sum);
        }
    }

    pub fn coeff(&self, l: i64) -> Gq {
        self.coeffs.get(&l).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Gq)> {
        self.coeffs.iter().map(|(l, c)| (*l, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `U(z) = U(−z)`, i.e. only even powers occur.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|l| l % 2 == 0)
    }

    /// `max |l|` over the support, zero for the zero polynomial.
    pub fn reach(&self) -> i64 {
        self.coeffs.keys().map(|l| l.abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_term(*l, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self::new(self.coeffs.iter().map(|(l, a)| (*l, a * c)))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `p(z^{-1})`.
    pub fn reflect(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(l, c)| (-l, c.clone())))
    }

    /// `p(−z)`.
    pub fn alternate(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(l, c)| (*l, if l % 2 == 0 { c.clone() } else { -c })))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().map(|(l, c)| c.to_complex() * z.powi(*l as i32)).sum()
    }

    /// Constant harmonic series indexed by the power of z.
    fn to_series(&self, ctx: &Ctx) -> HarmonicSeries {
        let mut h = HarmonicSeries::zero(ctx);
        for (l, c) in &self.coeffs {
            h.insert(*l, MultiPoly::constant(ctx, c.clone()));
        }
        h
    }

    /// Renders in the variable `var`, highest power first.
    pub fn render(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (l, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c.is_negative_lead();
            let mag = if neg { -c } else { c.clone() };
            s.push_str(match (k == 0, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            });
            let power = match l {
                0 => String::new(),
                1 => var.into(),
                _ => format!("{var}^{l}"),
            };
            match (power.is_empty(), mag.is_one()) {
                (true, _) => s.push_str(&format!("{mag}")),
                (false, true) => s.push_str(&power),
                (false, false) => s.push_str(&format!("{mag}*{power}")),
            }
        }
        s
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("z"))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `𝒩_k = binom(2k, k) / (2^{2k} (2k+1))`.
pub fn normalization_constant(k: u32) -> BigRational {
    let k = u64::from(k);
    let den = BigInt::from(4u32).pow(k as u32) * BigInt::from(2 * k + 1);
    BigRational::new(binomial(2 * k, k), den)
}

/// The polynomials `g_0..g_K` (coefficients lowest degree first) and the
/// constants `𝒩_0..𝒩_{⌊K/2⌋}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkTable {
    pub g: Vec<Vec<BigRational>>,
    pub n: Vec<BigRational>,
}

impl GkTable {
    pub fn order(&self) -> usize {
        self.g.len() - 1
    }

    pub fn eval(&self, k: usize, u: &BigRational) -> BigRational {
        self.g[k].iter().rev().fold(BigRational::zero(), |acc, c| acc * u + c)
    }

    /// `g_k` as a polynomial in the time slot of `ctx`.
    pub fn poly(&self, k: usize, ctx: &Ctx) -> MultiPoly {
        let mut p = MultiPoly::zero(ctx);
        for (d, c) in self.g[k].iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&MultiPoly::var_pow(ctx, T, d as u16).scale(&Gq::real(c.clone())));
            }
        }
        p
    }

    pub fn render(&self, k: usize) -> String {
        let ctx = PolyContext::with_core_names(["eps", "u", "v"], &[], &[], 0)
            .expect("fixed names")
            .shared();
        format!("{}", self.poly(k, &ctx))
    }
}

/// Solves `g_k(u+1) − g_k(u−1) = g_{k−1}(u)` degree by degree with
/// `g_0 = 1` and `g_k(0) = 0` for `k ≥ 1`.
pub fn gk_poly(order: u32) -> GkTable {
    let mut g = vec![vec![BigRational::one()]];
    for k in 1..=order as usize {
        let q = &g[k - 1];
        let mut p = vec![BigRational::zero(); k + 1];
        for d in (1..=k).rev() {
            // [u^{d-1}] of p(u+1) − p(u−1) is Σ_{e≥d} p_e·binom(e, d−1)·(1 − (−1)^{e−d+1}).
            let mut rest = q[d - 1].clone();
            for e in (d + 1)..=k {
                if (e - d) % 2 == 0 {
                    let b = BigRational::from_integer(binomial(e as u64, (d - 1) as u64) * 2);
                    rest -= &p[e] * b;
                }
            }
            p[d] = rest / rat(2 * d as i64, 1);
        }
        g.push(p);
    }
    let n = (0..=order / 2).map(normalization_constant).collect();
    GkTable { g, n }
}

/// `h_k(z) = Π_{i=1}^{k} 2U((−1)^{i−1} z^{-1})`; its coefficients are `C_{k,j}`.
pub fn ckj_coeffs(alpha: &LaurentPoly, k: u32) -> LaurentPoly {
    let plus = alpha.reflect();
    let minus = plus.alternate();
    (1..=k).fold(LaurentPoly::one(), |h, i| h.mul(if i % 2 == 1 { &plus } else { &minus }))
}

/// Bare amplitude name for harmonic `m`: `A0, A1, …` and `Am1, Am2, …`
/// for negative harmonics.
pub fn amplitude_name(m: i64) -> String {
    if m < 0 {
        format!("Am{}", -m)
    } else {
        format!("A{m}")
    }
}

/// Polynomial context with `A_{-W}..A_W`, ε, `u = t/π` and `v = s/π`.
pub fn difference_ctx(window: i64, order: u32) -> Result<Ctx> {
    let names: Vec<String> = (-window..=window).map(amplitude_name).collect();
    Ok(PolyContext::with_core_names(["eps", "u", "v"], &names, &[], order)?.shared())
}

fn amp(ctx: &Ctx, window: i64, m: i64) -> Option<MultiPoly> {
    (m.abs() <= window).then(|| MultiPoly::var(ctx, ctx.amp((m + window) as usize)))
}

/// Largest `|m|` for which order-K results in window `W` are exact.
pub fn guaranteed_reach(alpha: &LaurentPoly, order: u32, window: i64) -> i64 {
    window - i64::from(order) * alpha.reach()
}

fn check_window(alpha: &LaurentPoly, m: i64, order: u32, window: i64) -> Result<()> {
    let needed = m.abs() + i64::from(order) * alpha.reach();
    if needed > window {
        return Err(Error::WindowTooSmall { needed, have: window });
    }
    Ok(())
}

fn sign(e: i64) -> Gq {
    Gq::from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

fn eps_pow(ctx: &Ctx, k: u32) -> MultiPoly {
    MultiPoly::var_pow(ctx, EPS, k as u16)
}

/// `P_m` with out-of-window amplitudes set to zero, no window check.
fn windowed_pm(gk: &GkTable, hk: &[LaurentPoly], m: i64, ctx: &Ctx, window: i64) -> MultiPoly {
    let mut out = MultiPoly::zero(ctx);
    for (k, h) in hk.iter().enumerate() {
        let g = gk.poly(k, ctx).mul(&eps_pow(ctx, k as u32)).scale(&sign(m * k as i64));
        for (j, c) in h.terms() {
            if let Some(a) = amp(ctx, window, m + j) {
                out = out.add(&g.mul(&a).scale(c));
            }
        }
    }
    out
}

/// Secular coefficient `P_m(ε, u, A) = Σ_j A_{m+j} Σ_k ε^k (−1)^{mk} g_k(u) C_{k,j}`.
pub fn secular_pm(alpha: &LaurentPoly, m: i64, order: u32, window: i64) -> Result<MultiPoly> {
    check_window(alpha, m, order, window)?;
    let ctx = difference_ctx(window, order)?;
    let gk = gk_poly(order);
    let hk: Vec<LaurentPoly> = (0..=order).map(|k| ckj_coeffs(alpha, k)).collect();
    Ok(windowed_pm(&gk, &hk, m, &ctx, window))
}

/// The same coefficient from `B_{m,k} = Σ_l α_l (−1)^{(k−1)l} B_{m−l,k−1}`
/// and `f_{m,k} = (−1)^{mk} g_k(u) B_{m,k}`.
pub fn secular_pm_recursive(alpha: &LaurentPoly, m: i64, order: u32, window: i64) -> Result<MultiPoly> {
    check_window(alpha, m, order, window)?;
    let ctx = difference_ctx(window, order)?;
    let gk = gk_poly(order);
    let zero = MultiPoly::zero(&ctx);
    let mut b: Vec<MultiPoly> = (-window..=window).map(|n| amp(&ctx, window, n).unwrap()).collect();
    let idx = |n: i64| (n + window) as usize;
    let mut out = b[idx(m)].clone();
    for k in 1..=order {
        let mut next = vec![zero.clone(); b.len()];
        for n in -window..=window {
            let mut acc = zero.clone();
            for (l, a) in alpha.terms() {
                let src = n - l;
                if src.abs() <= window {
                    acc = acc.add(&b[idx(src)].scale(&(a * &sign(i64::from(k - 1) * l))));
                }
            }
            next[idx(n)] = acc;
        }
        b = next;
        let f = gk.poly(k as usize, &ctx).mul(&b[idx(m)]).scale(&sign(m * i64::from(k)));
        out = out.add(&f.mul(&eps_pow(&ctx, k)));
    }
    Ok(out)
}

/// `Θ(ε, ζ) = Σ_k (−1)^k 𝒩_k (εU(ζ))^{2k+1}`, stored by power of ε.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSeries {
    pub order: u32,
    /// `coeffs[n]` multiplies `ε^n`.
    pub coeffs: Vec<LaurentPoly>,
}

impl ThetaSeries {
    /// As a harmonic series in `ζ` (or `ζ^{-1}` when `reflect`).
    fn to_series(&self, ctx: &Ctx, reflect: bool) -> HarmonicSeries {
        let mut out = HarmonicSeries::zero(ctx);
        for (n, c) in self.coeffs.iter().enumerate() {
            let c = if reflect { c.reflect() } else { c.clone() };
            out = out.add(&c.to_series(ctx).mul_poly(&eps_pow(ctx, n as u32), ctx.order()));
        }
        out
    }

    /// `sinh Θ` truncated at the series order, by ε power.
    pub fn sinh(&self) -> Vec<LaurentPoly> {
        let k = self.order as usize;
        let mul = |a: &[LaurentPoly], b: &[LaurentPoly]| {
            let mut out = vec![LaurentPoly::zero(); k + 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate().take(k + 1 - i) {
                    out[i + j] = out[i + j].add(&x.mul(y));
                }
            }
            out
        };
        let sq = mul(&self.coeffs, &self.coeffs);
        let mut power = self.coeffs.clone();
        let mut out = vec![LaurentPoly::zero(); k + 1];
        let mut fact = 1i64;
        let mut n = 1i64;
        while n as usize <= k {
            let c = Gq::from_frac(1, fact);
            for (i, p) in power.iter().enumerate() {
                out[i] = out[i].add(&p.scale(&c));
            }
            power = mul(&power, &sq);
            fact *= (n + 1) * (n + 2);
            n += 2;
        }
        out
    }

    pub fn eval(&self, eps: Complex64, zeta: Complex64) -> Complex64 {
        self.coeffs.iter().enumerate().map(|(n, c)| c.eval(zeta) * eps.powi(n as i32)).sum()
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("eps^{n}*({})", c.render("ζ")));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub fn theta_series(alpha: &LaurentPoly, order: u32) -> ThetaSeries {
    let u = alpha.scale(&Gq::from_frac(1, 2));
    let mut coeffs = vec![LaurentPoly::zero(); order as usize + 1];
    let mut k = 0u32;
    while 2 * k < order {
        let n = 2 * k + 1;
        let c = Gq::real(normalization_constant(k)) * sign(i64::from(k));
        coeffs[n as usize] = u.pow(n).scale(&c);
        k += 1;
    }
    ThetaSeries { order, coeffs }
}

/// `Σ_{n≤K} X^n / n!` for a series without ε⁰ part.
fn exp_series(x: &HarmonicSeries, order: u32) -> HarmonicSeries {
    let ctx = x.ctx();
    let mut out = HarmonicSeries::single(0, MultiPoly::one(ctx));
    let mut term = out.clone();
    for n in 1..=order {
        term = term.mul(x).scale(&Gq::from_frac(1, i64::from(n)));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

fn windowed_closed_form(theta: &HarmonicSeries, m: i64, ctx: &Ctx, window: i64) -> MultiPoly {
    let u = MultiPoly::var(ctx, T);
    let x = theta.mul_poly(&u, ctx.order()).scale(&sign(m));
    let e = exp_series(&x, ctx.order());
    let mut out = MultiPoly::zero(ctx);
    for (j, c) in e.entries() {
        if let Some(a) = amp(ctx, window, m + j) {
            out = out.add(&c.mul(&a));
        }
    }
    out
}

/// `𝒜_m = Σ_j A_{m+j} [z^j] exp((−1)^m Θ(ε, z^{-1}) u)` for even `U`.
pub fn closed_form_amplitude(alpha: &LaurentPoly, m: i64, order: u32, window: i64) -> Result<MultiPoly> {
    if !alpha.is_even() {
        return Err(Error::NotEven);
    }
    check_window(alpha, m, order, window)?;
    let ctx = difference_ctx(window, order)?;
    let theta = theta_series(alpha, order).to_series(&ctx, true);
    Ok(windowed_closed_form(&theta, m, &ctx, window))
}

/// Amplitudes `𝒜_m` for every `|m| ≤ W`, exact only inside the guaranteed
/// reach. Uses the closed form when `U` is even.
fn amplitude_family(alpha: &LaurentPoly, order: u32, window: i64, ctx: &Ctx) -> Vec<MultiPoly> {
    if alpha.is_even() {
        let theta = theta_series(alpha, order).to_series(ctx, true);
        (-window..=window).map(|m| windowed_closed_form(&theta, m, ctx, window)).collect()
    } else {
        let gk = gk_poly(order);
        let hk: Vec<LaurentPoly> = (0..=order).map(|k| ckj_coeffs(alpha, k)).collect();
        (-window..=window).map(|m| windowed_pm(&gk, &hk, m, ctx, window)).collect()
    }
}

/// A difference-equation problem as read from a spec document.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSpec {
    pub alpha: LaurentPoly,
    pub order: u32,
    pub window: i64,
}

impl DifferenceSpec {
    pub fn new(alpha: LaurentPoly, order: u32, window: i64) -> Result<Self> {
        if window < 0 {
            return Err(Error::InvalidSpec("window must be non-negative".into()));
        }
        if guaranteed_reach(&alpha, order, window) < 0 {
            let needed = i64::from(order) * alpha.reach();
            return Err(Error::WindowTooSmall { needed, have: window });
        }
        Ok(Self { alpha, order, window })
    }

    pub fn reach(&self) -> i64 {
        guaranteed_reach(&self.alpha, self.order, self.window)
    }
}

fn report_first(kind: CheckKind, m: i64, lhs: &MultiPoly, rhs: &MultiPoly) -> Option<CheckReport> {
    lhs.first_difference(rhs).map(|(mono, l, r)| CheckReport {
        kind,
        status: CheckStatus::Fail,
        offence: Some(Offence {
            component: 0,
            harmonic: m,
            monomial: lhs.render_monomial(&mono),
            lhs: format!("{l}"),
            rhs: format!("{r}"),
        }),
        seed: None,
        note: None,
    })
}

fn passed(kind: CheckKind, note: Option<String>) -> CheckReport {
    CheckReport { kind, status: CheckStatus::Pass, offence: None, seed: None, note }
}

/// The identities of the difference scheme, for every harmonic in the
/// guaranteed reach:
/// the functional relation of the amplitudes, the difference equation for
/// the resummed expansion, the RG equation of the generating series, and
/// agreement of the resummed amplitudes with the secular coefficients.
pub fn check_difference_identities(alpha: &LaurentPoly, order: u32, window: i64) -> Result<Vec<CheckReport>> {
    let spec = DifferenceSpec::new(alpha.clone(), order, window)?;
    let reach = spec.reach();
    let ctx = difference_ctx(window, order)?;
    let family = amplitude_family(alpha, order, window, &ctx);
    let at = |m: i64| -> MultiPoly {
        if m.abs() <= window {
            family[(m + window) as usize].clone()
        } else {
            MultiPoly::zero(&ctx)
        }
    };
    let source = if alpha.is_even() { "resummed amplitudes" } else { "secular coefficients" };
    let mut reports = Vec::new();

    // 𝒜_m(ε,u,A) = 𝒜_m(ε, u−v, {𝒜_j(ε,v,A)}).
    let v = MultiPoly::var(&ctx, crate::algebra::S);
    let mut bindings = vec![(T, MultiPoly::var(&ctx, T).sub(&v))];
    for (k, a) in family.iter().enumerate() {
        bindings.push((ctx.amp(k), a.substitute(&[(T, v.clone())])?));
    }
    let kind = CheckKind::DifferenceFunctionalRelation;
    let mut fail = None;
    for m in -reach..=reach {
        let rhs = at(m).substitute(&bindings)?;
        if let Some(r) = report_first(kind, m, &at(m), &rhs) {
            fail = Some(r);
            break;
        }
    }
    reports.push(fail.unwrap_or_else(|| passed(kind, Some(source.into()))));

    // (−1)^m (𝒜_m(u+1) − 𝒜_m(u−1)) = ε Σ_l α_l 𝒜_{m−l}(u).
    let kind = CheckKind::DifferenceEquation;
    let u = MultiPoly::var(&ctx, T);
    let one = MultiPoly::one(&ctx);
    let eps = MultiPoly::var(&ctx, EPS);
    let mut fail = None;
    for m in -reach..=reach {
        let a = at(m);
        let lhs = a
            .substitute(&[(T, u.add(&one))])?
            .sub(&a.substitute(&[(T, u.sub(&one))])?)
            .scale(&sign(m));
        let mut rhs = MultiPoly::zero(&ctx);
        for (l, c) in alpha.terms() {
            rhs = rhs.add(&at(m - l).scale(c));
        }
        let rhs = rhs.mul(&eps);
        if let Some(r) = report_first(kind, m, &lhs, &rhs) {
            fail = Some(r);
            break;
        }
    }
    reports.push(fail.unwrap_or_else(|| passed(kind, Some(source.into()))));

    // ∂_u 𝒜(ζ,u) = Θ(ε,ζ) 𝒜(−ζ,u), coefficientwise in ζ.
    let kind = CheckKind::DifferenceRgEquation;
    if alpha.is_even() {
        let theta = theta_series(alpha, order).to_series(&ctx, false);
        let mut fail = None;
        for m in -reach..=reach {
            let lhs = at(m).diff(T);
            let mut rhs = MultiPoly::zero(&ctx);
            for (j, c) in theta.entries() {
                rhs = rhs.add(&c.mul(&at(m - j)).scale(&sign(m - j)));
            }
            if let Some(r) = report_first(kind, m, &lhs, &rhs) {
                fail = Some(r);
                break;
            }
        }
        reports.push(fail.unwrap_or_else(|| passed(kind, None)));
    } else {
        reports.push(CheckReport {
            kind,
            status: CheckStatus::NotApplicable,
            offence: None,
            seed: None,
            note: Some("U is not even".into()),
        });
    }

    // Resummed amplitudes agree with the secular coefficients.
    let kind = CheckKind::DifferenceClosedForm;
    if alpha.is_even() {
        let gk = gk_poly(order);
        let hk: Vec<LaurentPoly> = (0..=order).map(|k| ckj_coeffs(alpha, k)).collect();
        let mut fail = None;
        for m in -reach..=reach {
            let pm = windowed_pm(&gk, &hk, m, &ctx, window);
            if let Some(r) = report_first(kind, m, &at(m), &pm) {
                fail = Some(r);
                break;
            }
        }
        reports.push(fail.unwrap_or_else(|| passed(kind, None)));
    } else {
        reports.push(CheckReport {
            kind,
            status: CheckStatus::NotApplicable,
            offence: None,
            seed: None,
            note: Some("U is not even".into()),
        });
    }
    Ok(reports)
}

/// Pointwise comparison of `Θ(ε, e^{it}) ∈ iℝ` with `|εU(e^{it})| ≤ 1` on a
/// grid of real `t`. Reported only; the two agree when `εU(e^{it})` is
/// itself imaginary.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub samples: usize,
    pub theta_imaginary: bool,
    pub bounded: bool,
    pub max_abs_eps_u: f64,
    pub max_abs_re_theta: f64,
}

pub fn stability(alpha: &LaurentPoly, eps: Complex64, samples: usize) -> StabilityReport {
    let tol = 1e-12;
    let mut max_u: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for k in 0..samples {
        let t = 2.0 * core::f64::consts::PI * k as f64 / samples as f64;
        let w = eps * alpha.eval(Complex64::from_polar(1.0, t)) / 2.0;
        max_u = max_u.max(w.norm());
        max_re = max_re.max(w.asinh().re.abs());
    }
    StabilityReport {
        samples,
        theta_imaginary: max_re <= tol,
        bounded: max_u <= 1.0 + tol,
        max_abs_eps_u: max_u,
        max_abs_re_theta: max_re,
    }
}

/// Text rendering of `𝒜(ζ, t)` in resummed form.
pub fn render_generating_series(alpha: &LaurentPoly, order: u32) -> String {
    format!(
        "𝒜(ζ,t) = exp(Θ(ε,ζ)*t/π)*Σ_even A_m*ζ^m + exp(-Θ(ε,ζ)*t/π)*Σ_odd A_m*ζ^m\nΘ(ε,ζ) = {}",
        theta_series(alpha, order).render()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn cos2() -> LaurentPoly {
        LaurentPoly::new([(2, Gq::from_int(1)), (-2, Gq::from_int(1))])
    }

    #[test]
    fn low_gk() {
        let t = gk_poly(3);
        assert_eq!(t.g[1], vec![rat(0, 1), rat(1, 2)]);
        assert_eq!(t.g[2], vec![rat(0, 1), rat(0, 1), rat(1, 8)]);
        assert_eq!(t.render(3), "-1/48*u + 1/48*u^3");
    }

    #[test]
    fn ckj_examples() {
        assert_eq!(ckj_coeffs(&cos2(), 0), LaurentPoly::one());
        let h2 = ckj_coeffs(&cos2(), 2);
        assert_eq!(h2, cos2().pow(2));
        assert_eq!(h2.coeff(0), Gq::from_int(2));
        let a = LaurentPoly::new([(1, Gq::from_int(3)), (-2, Gq::i())]);
        let h1 = ckj_coeffs(&a, 1);
        for j in -3..=3 {
            assert_eq!(h1.coeff(j), a.coeff(-j));
        }
    }

    #[test]
    fn free_equation_keeps_amplitudes() {
        let p = secular_pm(&LaurentPoly::zero(), 1, 3, 2).unwrap();
        let ctx = difference_ctx(2, 3).unwrap();
        assert_eq!(p, MultiPoly::var(&ctx, ctx.amp(3)));
    }

    #[test]
    fn window_is_enforced() {
        assert!(matches!(secular_pm(&cos2(), 3, 3, 8), Err(Error::WindowTooSmall { .. })));
        assert!(matches!(closed_form_amplitude(&LaurentPoly::monomial(1, Gq::one()), 0, 2, 8), Err(Error::NotEven)));
    }

    #[test]
    fn names() {
        assert_eq!(amplitude_name(-2), "Am2");
        assert_eq!(amplitude_name(3), "A3");
        assert_eq!(cos2().to_string(), "z^2 + z^-2");
    }
}
