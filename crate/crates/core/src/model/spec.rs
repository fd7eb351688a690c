use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{Ctx, HarmonicSeries, MultiPoly, PolyContext, EPS};
use crate::error::{Error, Result};

use super::expr::Expr;

/// Linear part of the unperturbed operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearPart {
    /// `dy/dt = iMy + εV` with `M = diag(m_1..m_n)`.
    Semisimple(Vec<i64>),
    /// `dy/dt = (im·Id + Λ)y + εV` with a single Jordan block of `size`.
    Nilpotent { m: i64, size: usize },
    /// `Π_r (d/dt − im_r)^{n_r} y = εV(y, y', …)`, stored as `(m_r, n_r)`.
    Scalar(Vec<(i64, usize)>),
}

impl LinearPart {
    pub fn class_name(&self) -> &'static str {
        match self {
            LinearPart::Semisimple(_) => "semisimple",
            LinearPart::Nilpotent { .. } => "nilpotent",
            LinearPart::Scalar(_) => "scalar",
        }
    }

    /// Number of bare amplitudes.
    pub fn n_amplitudes(&self) -> usize {
        match self {
            LinearPart::Semisimple(ms) => ms.len(),
            LinearPart::Nilpotent { size, .. } => *size,
            LinearPart::Scalar(f) => f.iter().map(|(_, n)| n).sum(),
        }
    }

    /// Names of the state symbols usable in `V`.
    pub fn state_names(&self) -> Vec<String> {
        match self {
            LinearPart::Scalar(_) => (0..self.n_amplitudes())
                .map(|d| {
                    let mut s = String::from("y");
                    s.extend(core::iter::repeat('\'').take(d));
                    s
                })
                .collect(),
            _ => (1..=self.n_amplitudes()).map(|j| format!("y{j}")).collect(),
        }
    }

    /// Default bare amplitude names: `A1..An`, or `A{r}_{j}` for scalar
    /// equations with more than one factor.
    pub fn default_amplitude_names(&self) -> Vec<String> {
        match self {
            LinearPart::Scalar(f) if f.len() > 1 => f
                .iter()
                .enumerate()
                .flat_map(|(r, (_, n))| (1..=*n).map(move |j| format!("A{}_{}", r + 1, j)))
                .collect(),
            _ => (1..=self.n_amplitudes()).map(|j| format!("A{j}")).collect(),
        }
    }
}

/// A validated ODE specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ODESystemSpec {
    pub linear: LinearPart,
    pub v: Vec<Expr>,
    pub params: Vec<String>,
    pub order: u32,
    pub amplitude_names: Vec<String>,
}

impl ODESystemSpec {
    pub fn new(
        linear: LinearPart,
        v: Vec<Expr>,
        params: Vec<String>,
        order: u32,
        amplitude_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = linear.n_amplitudes();
        if n == 0 {
            return Err(Error::InvalidSpec("empty linear part".into()));
        }
        let want = match &linear {
            LinearPart::Scalar(f) => {
                for (k, (m, nr)) in f.iter().enumerate() {
                    if *nr == 0 {
                        return Err(Error::InvalidSpec("factor multiplicity must be positive".into()));
                    }
                    if f[..k].iter().any(|(m2, _)| m2 == m) {
                        return Err(Error::InvalidSpec(format!("repeated frequency m = {m}")));
                    }
                }
                1
            }
            _ => n,
        };
        if v.len() != want {
            return Err(Error::InvalidSpec(format!("expected {want} components of V, got {}", v.len())));
        }
        let amplitude_names = amplitude_names.unwrap_or_else(|| linear.default_amplitude_names());
        if amplitude_names.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} amplitude names, got {}",
                amplitude_names.len()
            )));
        }
        let spec = Self { linear, v, params, order, amplitude_names };
        spec.table_ctx()?;
        spec.expanded_v()?;
        Ok(spec)
    }

    pub fn class_name(&self) -> &'static str {
        self.linear.class_name()
    }

    pub fn n_amplitudes(&self) -> usize {
        self.linear.n_amplitudes()
    }

    pub fn state_names(&self) -> Vec<String> {
        self.linear.state_names()
    }

    /// Context in which `V` is expanded: states in the amplitude slots.
    pub fn state_ctx(&self) -> Result<Ctx> {
        Ok(PolyContext::new(&self.state_names(), &self.params, self.order)?.shared())
    }

    /// Context of the secular coefficients: bare amplitudes, parameters, ε, t, s.
    pub fn table_ctx(&self) -> Result<Ctx> {
        Ok(PolyContext::new(&self.amplitude_names, &self.params, self.order)?.shared())
    }

    /// Whether `V` depends on e^{it}.
    pub fn is_autonomous(&self) -> bool {
        !self.v.iter().any(Expr::mentions_e)
    }

    /// Each component of `V` as a harmonic series in the state context.
    pub fn expanded_v(&self) -> Result<Vec<HarmonicSeries>> {
        let ctx = self.state_ctx()?;
        self.v.iter().map(|e| e.expand(&ctx)).collect()
    }

    /// Same equation at a different truncation order.
    pub fn with_order(&self, order: u32) -> Self {
        Self { order, ..self.clone() }
    }

    /// The semisimple system rewritten with `ỹ_j = e^{−im_j t} y_j`, whose
    /// linear part is zero.
    pub fn gauge_reduced(&self) -> Result<Self> {
        let ms = match &self.linear {
            LinearPart::Semisimple(ms) => ms.clone(),
            _ => return Err(Error::Unsupported("gauge reduction needs a semisimple spec".into())),
        };
        let names = self.state_names();
        let rotate = |n: &str| {
            let k = names.iter().position(|x| x == n)?;
            Some(Expr::mul(Expr::pow(Expr::E, ms[k]), Expr::var(n)))
        };
        let v = self
            .v
            .iter()
            .zip(&ms)
            .map(|(e, m)| Expr::mul(Expr::pow(Expr::E, -m), e.replace_vars(&rotate)))
            .collect();
        Self::new(
            LinearPart::Semisimple(alloc::vec![0; ms.len()]),
            v,
            self.params.clone(),
            self.order,
            Some(self.amplitude_names.clone()),
        )
    }
}

/// `V(ε, e^{it}, Y_1, …, Y_n)` with each argument a harmonic series in the
/// target context. Parameters are matched by name, ε is carried over.
pub fn compose(v: &HarmonicSeries, args: &[HarmonicSeries], target: &Ctx, order: u32) -> Result<HarmonicSeries> {
    let src = v.ctx();
    if args.len() != src.n_amplitudes() {
        return Err(Error::ContextMismatch);
    }
    let params: Vec<usize> = src
        .param_names()
        .iter()
        .map(|p| target.lookup(p))
        .collect::<Result<_>>()?;
    let mut powers: Vec<Vec<HarmonicSeries>> =
        args.iter().map(|_| alloc::vec![HarmonicSeries::single(0, MultiPoly::one(target))]).collect();
    let mut out = HarmonicSeries::zero(target);
    for (m, poly) in v.entries() {
        for (mono, c) in poly.terms() {
            let eps = mono.exp(EPS);
            if u32::from(eps) > order {
                continue;
            }
            let mut scalar = MultiPoly::constant(target, c.clone()).shift_var(EPS, eps);
            for (k, &pv) in params.iter().enumerate() {
                let e = mono.exp(src.param(k));
                if e > 0 {
                    scalar = scalar.shift_var(pv, e);
                }
            }
            let mut term = HarmonicSeries::single(m, scalar);
            for (j, arg) in args.iter().enumerate() {
                let e = usize::from(mono.exp(src.amp(j)));
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[j];
                while cache.len() <= e {
                    let next = cache.last().unwrap().mul_trunc(arg, order);
                    cache.push(next);
                }
                term = term.mul_trunc(&cache[e], order);
                if term.is_zero() {
                    break;
                }
            }
            out = out.try_add(&term)?;
        }
    }
    Ok(out)
}

/// Coupled oscillators `q̈_j + m_j² q_j = εV_j(q, p)` with `p_j = q̇_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec {
    pub masses: Vec<i64>,
    pub v: Vec<Expr>,
    pub params: Vec<String>,
    pub order: u32,
}

impl OscillatorSpec {
    pub fn q_name(j: usize) -> String {
        format!("q{}", j + 1)
    }

    pub fn p_name(j: usize) -> String {
        format!("p{}", j + 1)
    }

    /// First-order form in `y_{2j−1} = p_j + i m_j q_j`, `y_{2j} = p_j − i m_j q_j`.
    pub fn to_first_order(&self) -> Result<ODESystemSpec> {
        if self.masses.len() != self.v.len() {
            return Err(Error::InvalidSpec("one forcing per oscillator required".into()));
        }
        if let Some(m) = self.masses.iter().find(|m| **m < 1) {
            return Err(Error::InvalidSpec(format!("oscillator frequency {m} is not a positive integer")));
        }
        let n = self.masses.len();
        let y = |k: usize| Expr::var(&format!("y{k}"));
        let subst = |name: &str| {
            (0..n).find_map(|j| {
                let (a, b) = (y(2 * j + 1), y(2 * j + 2));
                if name == Self::q_name(j) {
                    let den = Expr::mul(Expr::mul(Expr::num(2), Expr::I), Expr::num(self.masses[j]));
                    Some(Expr::div(Expr::sub(a, b), den))
                } else if name == Self::p_name(j) {
                    Some(Expr::div(Expr::add(a, b), Expr::num(2)))
                } else {
                    None
                }
            })
        };
        let mut v = Vec::with_capacity(2 * n);
        let mut ms = Vec::with_capacity(2 * n);
        for (j, e) in self.v.iter().enumerate() {
            let r = e.replace_vars(&subst);
            v.push(r.clone());
            v.push(r);
            ms.push(self.masses[j]);
            ms.push(-self.masses[j]);
        }
        ODESystemSpec::new(LinearPart::Semisimple(ms), v, self.params.clone(), self.order, None)
    }

    /// Maps a first-order state back to `(q_j, p_j)` pairs.
    pub fn to_qp(&self, y: &[Complex64]) -> Vec<(Complex64, Complex64)> {
        self.masses
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let (a, b) = (y[2 * j], y[2 * j + 1]);
                ((a - b) / Complex64::new(0.0, 2.0 * *m as f64), (a + b) / 2.0)
            })
            .collect()
    }
}

/// Renormalized-amplitude name for a bare one: `A1 → 𝒜1`, `A → 𝒜`.
pub fn renormalized_name(bare: &str) -> String {
    match bare.strip_prefix('A') {
        Some(rest) => format!("𝒜{rest}"),
        None => format!("𝒜_{bare}"),
    }
}

pub fn renormalized_names(bare: &[String]) -> Vec<String> {
    bare.iter().map(|b| renormalized_name(b)).collect()
}

/// Symbol names with a generic prefix, `prefix1..prefixn`.
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}
