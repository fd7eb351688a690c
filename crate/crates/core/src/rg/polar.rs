use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use super::RGSystem;
use crate::algebra::{MultiPoly, EPS};
use crate::error::{Error, Result};

/// One monomial `ε^a · params · Π R_k^{r_k} · trig(n·θ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolarKey {
    pub eps: u32,
    pub params: Vec<u16>,
    pub r: Vec<i32>,
    pub angle: Vec<i64>,
    /// `sin` when true, `cos` otherwise.
    pub sin: bool,
}

/// Real trigonometric polynomial in `(R_k, θ_k)` with Laurent powers of `R`.
///
/// Keys are canonical: the first nonzero angle coefficient is positive and
/// a zero angle only carries `cos`.
#[derive(Clone, PartialEq)]
pub struct PolarPoly {
    pub n_pairs: usize,
    pub params: Vec<String>,
    terms: BTreeMap<PolarKey, BigRational>,
}

impl PolarPoly {
    pub fn zero(n_pairs: usize, params: &[String]) -> Self {
        Self { n_pairs, params: params.to_vec(), terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolarKey, &BigRational)> {
        self.terms.iter()
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

    /// Adds `c · ε^eps · Π R^r · trig(angle·θ)` after canonicalizing.
    pub fn add_term(&mut self, c: BigRational, eps: u32, params: &[u16], r: &[i32], angle: &[i64], sin: bool) {
        let mut angle = angle.to_vec();
        let mut c = c;
        match angle.iter().find(|a| **a != 0) {
            None if sin => return,
            Some(a) if *a < 0 => {
                angle.iter_mut().for_each(|a| *a = -*a);
                if sin {
                    c = -c;
                }
            }
            _ => {}
        }
        if c.is_zero() {
            return;
        }
        let mut p = params.to_vec();
        p.resize(self.params.len(), 0);
        let key = PolarKey { eps, params: p, r: r.to_vec(), angle, sin };
        let sum = self.terms.remove(&key).map_or(c.clone(), |old| old + &c);
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    /// Builder form of [`add_term`](Self::add_term) with integer fractions.
    pub fn with(mut self, num: i64, den: i64, eps: u32, r: &[i32], angle: &[i64], sin: bool) -> Self {
        let c = BigRational::new(BigInt::from(num), BigInt::from(den));
        self.add_term(c, eps, &[], r, angle, sin);
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.eps, &k.params, &k.r, &k.angle, k.sin);
        }
        out
    }

    pub fn eval(&self, eps: f64, r: &[f64], theta: &[f64], params: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, c) in &self.terms {
            let mut v = c.to_f64().unwrap_or(f64::NAN) * eps.powi(k.eps as i32);
            for (e, p) in k.params.iter().zip(params) {
                v *= p.powi(i32::from(*e));
            }
            for (e, x) in k.r.iter().zip(r) {
                v *= x.powi(*e);
            }
            let phi: f64 = k.angle.iter().zip(theta).map(|(a, th)| *a as f64 * th).sum();
            v *= if k.sin { Float::sin(phi) } else { Float::cos(phi) };
            acc += v;
        }
        acc
    }

    fn r_name(&self, k: usize) -> String {
        if self.n_pairs == 1 {
            "R".into()
        } else {
            format!("R{}", k + 1)
        }
    }

    fn theta_name(&self, k: usize) -> String {
        if self.n_pairs == 1 {
            "θ".into()
        } else {
            format!("θ{}", k + 1)
        }
    }

    fn render_angle(&self, angle: &[i64]) -> String {
        let mut s = String::new();
        for (k, a) in angle.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            let name = self.theta_name(k);
            let mag = a.unsigned_abs();
            if s.is_empty() {
                if *a < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *a < 0 { " - " } else { " + " });
            }
            if mag != 1 {
                s.push_str(&format!("{mag}*"));
            }
            s.push_str(&name);
        }
        s
    }
}

impl fmt::Display for PolarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (n == 0, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            match k.eps {
                0 => {}
                1 => factors.push("eps".into()),
                e => factors.push(format!("eps^{e}")),
            }
            for (p, e) in self.params.iter().zip(&k.params) {
                match e {
                    0 => {}
                    1 => factors.push(p.clone()),
                    e => factors.push(format!("{p}^{e}")),
                }
            }
            for (j, e) in k.r.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.r_name(j)),
                    e => factors.push(format!("{}^{e}", self.r_name(j))),
                }
            }
            if k.angle.iter().any(|a| *a != 0) {
                let trig = if k.sin { "sin" } else { "cos" };
                factors.push(format!("{trig}({})", self.render_angle(&k.angle)));
            }
            let mag = c.abs();
            let unit = mag == BigRational::from_integer(1.into());
            match (factors.is_empty(), unit) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => f.write_str(&factors.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `dR_k/dt` and `dθ_k/dt` for each conjugate pair `(𝒜_{k+}, 𝒜_{k−})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSystem {
    pub pairs: Vec<(usize, usize)>,
    pub params: Vec<String>,
    pub r_dot: Vec<PolarPoly>,
    pub theta_dot: Vec<PolarPoly>,
}

impl PolarSystem {
    /// `(dR/dt, dθ/dt)` at a point.
    pub fn eval(&self, eps: f64, r: &[f64], theta: &[f64], params: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            self.r_dot.iter().map(|p| p.eval(eps, r, theta, params)).collect(),
            self.theta_dot.iter().map(|p| p.eval(eps, r, theta, params)).collect(),
        )
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in 0..self.pairs.len() {
            let p = &self.r_dot[k];
            out.push(format!("d{}/dt = {}", p.r_name(k), p));
            out.push(format!("d{}/dt = {}", p.theta_name(k), self.theta_dot[k]));
        }
        out
    }
}

impl fmt::Display for PolarSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Rewrites the RG field with `𝒜_{k±} = R_k e^{±iθ_k}`.
///
/// Every pair must map into its partner under conjugation combined with the
/// swap of all pairs, and the paired fields may not involve unpaired
/// amplitudes. Parameters are taken to be real.
pub fn polar_transform(rg: &RGSystem, pairs: &[(usize, usize)]) -> Result<PolarSystem> {
    let n = rg.n();
    let mut seen = vec![false; n];
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= n || seen[x] {
                return Err(Error::PairingViolated(format!("amplitude index {} is out of range or repeated", x + 1)));
            }
            seen[x] = true;
        }
    }
    let ctx = &rg.ctx;
    let swap_all = |p: &MultiPoly| {
        pairs.iter().fold(p.clone(), |acc, &(a, b)| acc.swap_vars(ctx.amp(a), ctx.amp(b)))
    };
    let params = ctx.param_names().to_vec();
    let mut r_dot = Vec::new();
    let mut theta_dot = Vec::new();
    for (k, &(plus, minus)) in pairs.iter().enumerate() {
        let f_plus = &rg.field[plus];
        let f_minus = &rg.field[minus];
        for (j, used) in seen.iter().enumerate() {
            if !used && !(f_plus.is_free_of(ctx.amp(j)) && f_minus.is_free_of(ctx.amp(j))) {
                return Err(Error::PairingViolated(format!(
                    "field of {} depends on unpaired {}",
                    ctx.amplitude_names()[plus],
                    ctx.amplitude_names()[j]
                )));
            }
        }
        if swap_all(f_plus).conj() != *f_minus {
            return Err(Error::PairingViolated(format!(
                "{} and {} are not conjugate",
                ctx.amplitude_names()[plus],
                ctx.amplitude_names()[minus]
            )));
        }
        let mut rp = PolarPoly::zero(pairs.len(), &params);
        let mut tp = PolarPoly::zero(pairs.len(), &params);
        for (mono, c) in f_plus.terms() {
            let mut r = vec![0i32; pairs.len()];
            let mut angle = vec![0i64; pairs.len()];
            for (q, &(a, b)) in pairs.iter().enumerate() {
                let (ea, eb) = (mono.exp(ctx.amp(a)), mono.exp(ctx.amp(b)));
                r[q] = i32::from(ea) + i32::from(eb);
                angle[q] = i64::from(ea) - i64::from(eb);
            }
            angle[k] -= 1;
            let pe: Vec<u16> = (0..params.len()).map(|q| mono.exp(ctx.param(q))).collect();
            let eps = u32::from(mono.exp(EPS));
            // Re(c e^{iφ}) = Re c cos φ − Im c sin φ, Im(c e^{iφ}) = Im c cos φ + Re c sin φ.
            rp.add_term(c.re.clone(), eps, &pe, &r, &angle, false);
            rp.add_term(-c.im.clone(), eps, &pe, &r, &angle, true);
            r[k] -= 1;
            tp.add_term(c.im.clone(), eps, &pe, &r, &angle, false);
            tp.add_term(c.re.clone(), eps, &pe, &r, &angle, true);
        }
        r_dot.push(rp);
        theta_dot.push(tp);
    }
    Ok(PolarSystem { pairs: pairs.to_vec(), params, r_dot, theta_dot })
}
