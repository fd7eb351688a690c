use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Index of ε in every exponent vector.
pub const EPS: usize = 0;
/// Index of the time variable t.
pub const T: usize = 1;
/// Index of the auxiliary shift variable s.
pub const S: usize = 2;
/// First amplitude slot.
pub const AMP0: usize = 3;

/// The indeterminates a [`MultiPoly`](super::MultiPoly) ranges over, in
/// storage order: ε, t, s, amplitudes, parameters. Products discard every
/// term of ε-degree above `order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyContext {
    names: Vec<String>,
    n_amp: usize,
    order: u32,
}

pub type Ctx = Arc<PolyContext>;

impl PolyContext {
    pub fn new(amplitudes: &[String], params: &[String], order: u32) -> Result<Self> {
        Self::with_core_names(["eps", "t", "s"], amplitudes, params, order)
    }

    /// Like [`PolyContext::new`] but with custom names for the ε, t, s slots
    /// (the difference scheme renders its time variable as `u = t/π`).
    pub fn with_core_names(
        core: [&str; 3],
        amplitudes: &[String],
        params: &[String],
        order: u32,
    ) -> Result<Self> {
        let mut names: Vec<String> = core.iter().map(|s| s.to_string()).collect();
        names.extend(amplitudes.iter().cloned());
        names.extend(params.iter().cloned());
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(Error::DuplicateSymbol(n.clone()));
            }
        }
        Ok(Self { names, n_amp: amplitudes.len(), order })
    }

    pub fn shared(self) -> Ctx {
        Arc::new(self)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn n_amplitudes(&self) -> usize {
        self.n_amp
    }

    pub fn n_params(&self) -> usize {
        self.names.len() - AMP0 - self.n_amp
    }

    pub fn amp(&self, j: usize) -> usize {
        debug_assert!(j < self.n_amp);
        AMP0 + j
    }

    pub fn param(&self, j: usize) -> usize {
        AMP0 + self.n_amp + j
    }

    pub fn is_amplitude(&self, var: usize) -> bool {
        (AMP0..AMP0 + self.n_amp).contains(&var)
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn amplitude_names(&self) -> &[String] {
        &self.names[AMP0..AMP0 + self.n_amp]
    }

    pub fn param_names(&self) -> &[String] {
        &self.names[AMP0 + self.n_amp..]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// Same layout, different truncation order.
    pub fn with_order(&self, order: u32) -> Self {
        Self { order, ..self.clone() }
    }

    /// Same layout with the amplitude slots renamed.
    pub fn with_amplitude_names(&self, amplitudes: &[String]) -> Result<Self> {
        if amplitudes.len() != self.n_amp {
            return Err(Error::InvalidSpec("amplitude count mismatch".into()));
        }
        let core: Vec<&str> = self.names[..AMP0].iter().map(|s| s.as_str()).collect();
        Self::with_core_names(
            [core[0], core[1], core[2]],
            amplitudes,
            self.param_names(),
            self.order,
        )
    }

    /// Whether polynomials of `other` can be reinterpreted in `self` slot for slot.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.n_amp == other.n_amp && self.names.len() == other.names.len()
    }
}

pub fn same_ctx(a: &Ctx, b: &Ctx) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
