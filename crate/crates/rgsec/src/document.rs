//! TOML spec documents.
//!
//! ```toml
//! name = "ex_cd"
//! class = "semisimple"
//! linear_part = [1, -1]
//! V = ["y1*y2 + E^-1*y2", "y1*y2 + E*y1"]
//! order = 4
//! pairs = [[1, 2]]
//! ```
//!
//! `linear_part` is a frequency list for `semisimple`, `{ m, size }` for
//! `nilpotent`, a list of `[m_r, n_r]` factors for `scalar` and the list of
//! integer frequencies for `oscillator` (forcings in `q1, p1, …`).
//! Difference problems carry `alpha = [[l, "value"], …]` and `window`.

use serde::{Deserialize, Serialize};

use rgsec_core::algebra::{Monomial, PolyContext};
use rgsec_core::difference::{DifferenceSpec, LaurentPoly};
use rgsec_core::model::{parse_expression, parse_poly, LinearPart, ODESystemSpec, OscillatorSpec};
use rgsec_core::Gq;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Semisimple,
    Nilpotent,
    Scalar,
    Oscillator,
    Difference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinearDoc {
    Frequencies(Vec<i64>),
    Factors(Vec<(i64, usize)>),
    Block { m: i64, size: usize },
}

impl LinearDoc {
    pub fn from_linear(linear: &LinearPart) -> Self {
        match linear {
            LinearPart::Semisimple(ms) => LinearDoc::Frequencies(ms.clone()),
            LinearPart::Nilpotent { m, size } => LinearDoc::Block { m: *m, size: *size },
            LinearPart::Scalar(f) => LinearDoc::Factors(f.clone()),
        }
    }
}

/// A coefficient written either as an integer or as an expression string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

/// Defaults for `simulate`; every field can be overridden on the command line.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateDoc {
    pub eps: Option<f64>,
    pub r0: Option<Vec<f64>>,
    pub theta0: Option<Vec<f64>>,
    pub amplitudes: Option<Vec<(f64, f64)>>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub rg_order: Option<u32>,
    pub expansion_order: Option<u32>,
    pub params: Option<Vec<f64>>,
}

/// A published value that the engine does not reproduce, kept next to the
/// engine's value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discrepancy {
    pub quantity: String,
    pub published: String,
    pub engine: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub class: Class,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_part: Option<LinearDoc>,
    #[serde(rename = "V", default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<(i64, Coefficient)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    /// One-based conjugate amplitude pairs for the polar form.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discrepancy: Vec<Discrepancy>,
}

/// A loaded problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Ode { spec: ODESystemSpec, oscillator: Option<OscillatorSpec> },
    Difference(DifferenceSpec),
}

impl Problem {
    pub fn order(&self) -> u32 {
        match self {
            Problem::Ode { spec, .. } => spec.order,
            Problem::Difference(d) => d.order,
        }
    }
}

impl SpecDocument {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Spec(e.to_string()))
    }

    /// Builds the engine input, optionally at a different order.
    pub fn to_problem(&self, order: Option<u32>) -> CliResult<Problem> {
        let order = order.unwrap_or(self.order);
        let exprs = || -> CliResult<Vec<_>> {
            Ok(self.v.iter().map(|s| parse_expression(s)).collect::<Result<_, _>>()?)
        };
        let linear = |want: &str| {
            self.linear_part
                .clone()
                .ok_or_else(|| CliError::Spec(format!("class `{want}` needs `linear_part`")))
        };
        let ode = |lp: LinearPart| -> CliResult<Problem> {
            let spec = ODESystemSpec::new(lp, exprs()?, self.params.clone(), order, self.amplitude_names.clone())?;
            Ok(Problem::Ode { spec, oscillator: None })
        };
        match (self.class, linear(class_name(self.class))) {
            (Class::Difference, _) => {
                let alpha = self.alpha.as_ref().ok_or_else(|| CliError::Spec("difference needs `alpha`".into()))?;
                let window = self.window.ok_or_else(|| CliError::Spec("difference needs `window`".into()))?;
                let mut u = LaurentPoly::zero();
                for (l, c) in alpha {
                    u.add_term(*l, &coefficient(c)?);
                }
                Ok(Problem::Difference(DifferenceSpec::new(u, order, window)?))
            }
            (_, Err(e)) => Err(e),
            (Class::Semisimple, Ok(LinearDoc::Frequencies(ms))) => ode(LinearPart::Semisimple(ms)),
            (Class::Nilpotent, Ok(LinearDoc::Block { m, size })) => ode(LinearPart::Nilpotent { m, size }),
            (Class::Scalar, Ok(LinearDoc::Factors(f))) => ode(LinearPart::Scalar(f)),
            (Class::Oscillator, Ok(LinearDoc::Frequencies(masses))) => {
                let osc = OscillatorSpec { masses, v: exprs()?, params: self.params.clone(), order };
                let mut spec = osc.to_first_order()?;
                if let Some(names) = &self.amplitude_names {
                    spec = ODESystemSpec::new(spec.linear, spec.v, spec.params, order, Some(names.clone()))?;
                }
                Ok(Problem::Ode { spec, oscillator: Some(osc) })
            }
            (class, Ok(lp)) => Err(CliError::Spec(format!(
                "linear_part {lp:?} does not fit class `{}`",
                class_name(class)
            ))),
        }
    }

    /// Zero-based conjugate pairs.
    pub fn zero_based_pairs(&self) -> CliResult<Vec<(usize, usize)>> {
        to_zero_based(&self.pairs)
    }
}

pub fn to_zero_based(pairs: &[(usize, usize)]) -> CliResult<Vec<(usize, usize)>> {
    pairs
        .iter()
        .map(|&(a, b)| match (a.checked_sub(1), b.checked_sub(1)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::Spec("amplitude pairs are one-based".into())),
        })
        .collect()
}

pub fn class_name(c: Class) -> &'static str {
    match c {
        Class::Semisimple => "semisimple",
        Class::Nilpotent => "nilpotent",
        Class::Scalar => "scalar",
        Class::Oscillator => "oscillator",
        Class::Difference => "difference",
    }
}

fn coefficient(c: &Coefficient) -> CliResult<Gq> {
    match c {
        Coefficient::Int(n) => Ok(Gq::from_int(*n)),
        Coefficient::Text(s) => {
            let ctx = PolyContext::new(&[], &[], 0)?.shared();
            let p = parse_poly(&ctx, s)?;
            if p.terms().any(|(m, _)| !m.is_one()) {
                return Err(CliError::Spec(format!("coefficient `{s}` is not a constant")));
            }
            Ok(p.coeff(&Monomial::one(ctx.nvars())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semisimple_document() {
        let doc = SpecDocument::from_toml(
            "class = \"semisimple\"\nlinear_part = [1, -1]\nV = [\"y1*y2 + E^-1*y2\", \"y1*y2 + E*y1\"]\norder = 3\n",
        )
        .unwrap();
        let Problem::Ode { spec, .. } = doc.to_problem(None).unwrap() else { panic!() };
        assert_eq!(spec.linear, LinearPart::Semisimple(vec![1, -1]));
        assert_eq!(spec.order, 3);
    }

    #[test]
    fn shapes_of_linear_part() {
        let nil: SpecDocument =
            toml::from_str("class = \"nilpotent\"\nlinear_part = { m = 0, size = 2 }\nV = [\"y1\", \"y2\"]\norder = 1").unwrap();
        assert_eq!(nil.linear_part, Some(LinearDoc::Block { m: 0, size: 2 }));
        let sc: SpecDocument =
            toml::from_str("class = \"scalar\"\nlinear_part = [[0, 3]]\nV = [\"y*y''\"]\norder = 1").unwrap();
        assert_eq!(sc.linear_part, Some(LinearDoc::Factors(vec![(0, 3)])));
    }

    #[test]
    fn mismatched_class_is_a_spec_error() {
        let doc: SpecDocument =
            toml::from_str("class = \"scalar\"\nlinear_part = [1, -1]\nV = [\"y\"]\norder = 1").unwrap();
        assert!(matches!(doc.to_problem(None), Err(CliError::Spec(_))));
    }

    #[test]
    fn difference_document() {
        let doc = SpecDocument::from_toml(
            "class = \"difference\"\nalpha = [[2, 1], [-2, \"1\"]]\norder = 4\nwindow = 10\n",
        )
        .unwrap();
        let Problem::Difference(d) = doc.to_problem(None).unwrap() else { panic!() };
        assert_eq!(d.alpha.coeff(2), Gq::from_int(1));
        assert_eq!(d.alpha.coeff(-2), Gq::from_int(1));
        assert_eq!(d.reach(), 2);
    }

    #[test]
    fn toml_roundtrip() {
        let doc = SpecDocument::from_toml(
            "class = \"oscillator\"\nlinear_part = [1, 1]\nV = [\"-4*q2*p1\", \"-4*q1*p2\"]\norder = 2\npairs = [[1, 2], [3, 4]]\n",
        )
        .unwrap();
        assert_eq!(SpecDocument::from_toml(&doc.to_toml().unwrap()).unwrap(), doc);
        assert_eq!(doc.zero_based_pairs().unwrap(), vec![(0, 1), (2, 3)]);
    }
}
