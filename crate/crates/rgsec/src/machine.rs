//! JSON machine format. Polynomials are stored in their canonical text form
//! and re-parsed on load; polar fields are stored term by term.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use rgsec_core::algebra::{Ctx, HarmonicSeries, MultiPoly, PolyContext};
use rgsec_core::difference::difference_ctx;
use rgsec_core::model::{parse_poly, LinearPart};
use rgsec_core::perturb::SecularTable;
use rgsec_core::rg::{PolarPoly, PolarSystem, RGSystem, RenormalizedExpansion};
use rgsec_core::verify::{CheckKind, CheckReport, CheckStatus, Offence};

use crate::document::{LinearDoc, Problem, SpecDocument};
use crate::error::{CliError, CliResult};

pub const TABLE_FORMAT: &str = "rgsec.secular_table";
pub const DIFFERENCE_FORMAT: &str = "rgsec.difference_table";
pub const RG_FORMAT: &str = "rgsec.rg_system";
pub const REPORT_FORMAT: &str = "rgsec.check_reports";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicEntry {
    pub m: i64,
    pub poly: String,
}

fn series_entries(s: &HarmonicSeries) -> Vec<HarmonicEntry> {
    s.entries().map(|(m, p)| HarmonicEntry { m, poly: p.to_string() }).collect()
}

fn parse_series(ctx: &Ctx, entries: &[HarmonicEntry]) -> CliResult<HarmonicSeries> {
    let mut out = HarmonicSeries::zero(ctx);
    for e in entries {
        out.add_at(e.m, &parse_poly(ctx, &e.poly)?);
    }
    Ok(out)
}

fn check_format(found: &str, want: &str) -> CliResult<()> {
    if found == want {
        Ok(())
    } else {
        Err(CliError::Spec(format!("expected a `{want}` document, found `{found}`")))
    }
}

/// A secular table with the document that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub format: String,
    pub spec: SpecDocument,
    pub amplitudes: Vec<String>,
    pub params: Vec<String>,
    pub order: u32,
    pub components: Vec<Vec<HarmonicEntry>>,
}

impl TableDoc {
    pub fn new(doc: &SpecDocument, table: &SecularTable) -> Self {
        Self {
            format: TABLE_FORMAT.into(),
            spec: SpecDocument { order: table.order(), ..doc.clone() },
            amplitudes: table.ctx.amplitude_names().to_vec(),
            params: table.ctx.param_names().to_vec(),
            order: table.order(),
            components: table.components.iter().map(series_entries).collect(),
        }
    }

    pub fn to_table(&self) -> CliResult<SecularTable> {
        check_format(&self.format, TABLE_FORMAT)?;
        let Problem::Ode { spec, .. } = self.spec.to_problem(Some(self.order))? else {
            return Err(CliError::Spec("a secular table needs an ODE spec".into()));
        };
        let ctx = spec.table_ctx()?;
        if ctx.amplitude_names() != self.amplitudes.as_slice() || ctx.param_names() != self.params.as_slice() {
            return Err(CliError::Spec("table symbols do not match its spec".into()));
        }
        let comps = self.components.iter().map(|c| parse_series(&ctx, c)).collect::<CliResult<_>>()?;
        Ok(SecularTable::from_parts(spec, ctx, comps)?)
    }
}

/// Secular coefficients `P_m` of a difference problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceDoc {
    pub format: String,
    pub spec: SpecDocument,
    pub window: i64,
    pub reach: i64,
    pub harmonics: Vec<HarmonicEntry>,
}

impl DifferenceDoc {
    pub fn new(doc: &SpecDocument, window: i64, order: u32, reach: i64, pm: &[(i64, MultiPoly)]) -> Self {
        Self {
            format: DIFFERENCE_FORMAT.into(),
            spec: SpecDocument { order, ..doc.clone() },
            window,
            reach,
            harmonics: pm.iter().map(|(m, p)| HarmonicEntry { m: *m, poly: p.to_string() }).collect(),
        }
    }

    pub fn to_coefficients(&self) -> CliResult<Vec<(i64, MultiPoly)>> {
        check_format(&self.format, DIFFERENCE_FORMAT)?;
        let ctx = difference_ctx(self.window, self.spec.order)?;
        self.harmonics.iter().map(|e| Ok((e.m, parse_poly(&ctx, &e.poly)?))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarTermDoc {
    pub coeff: String,
    pub eps: u32,
    pub params: Vec<u16>,
    pub r: Vec<i32>,
    pub angle: Vec<i64>,
    pub sin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarDoc {
    /// One-based.
    pub pairs: Vec<(usize, usize)>,
    pub r_dot: Vec<Vec<PolarTermDoc>>,
    pub theta_dot: Vec<Vec<PolarTermDoc>>,
}

fn polar_terms(p: &PolarPoly) -> Vec<PolarTermDoc> {
    p.terms()
        .map(|(k, c)| PolarTermDoc {
            coeff: c.to_string(),
            eps: k.eps,
            params: k.params.clone(),
            r: k.r.clone(),
            angle: k.angle.clone(),
            sin: k.sin,
        })
        .collect()
}

fn parse_polar(n_pairs: usize, params: &[String], terms: &[PolarTermDoc]) -> CliResult<PolarPoly> {
    let mut p = PolarPoly::zero(n_pairs, params);
    for t in terms {
        let c = BigRational::from_str(&t.coeff).map_err(|e| CliError::Spec(format!("coefficient `{}`: {e}", t.coeff)))?;
        if t.r.len() != n_pairs || t.angle.len() != n_pairs {
            return Err(CliError::Spec("polar term has the wrong number of pairs".into()));
        }
        p.add_term(c, t.eps, &t.params, &t.r, &t.angle, t.sin);
    }
    Ok(p)
}

/// Everything `rg` derives from a table.
#[derive(Debug, Clone, PartialEq)]
pub struct RgOutput {
    pub rg: RGSystem,
    pub polar: Option<PolarSystem>,
    pub expansion: RenormalizedExpansion,
    pub inversion: Vec<MultiPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgDoc {
    pub format: String,
    pub linear_part: LinearDoc,
    pub amplitudes: Vec<String>,
    pub params: Vec<String>,
    pub order: u32,
    pub field: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar: Option<PolarDoc>,
    pub expansion: Vec<Vec<HarmonicEntry>>,
    pub inversion: Vec<String>,
}

impl RgDoc {
    pub fn new(out: &RgOutput) -> Self {
        let ctx = &out.rg.ctx;
        Self {
            format: RG_FORMAT.into(),
            linear_part: LinearDoc::from_linear(&out.rg.linear),
            amplitudes: ctx.amplitude_names().to_vec(),
            params: ctx.param_names().to_vec(),
            order: ctx.order(),
            field: out.rg.field.iter().map(ToString::to_string).collect(),
            polar: out.polar.as_ref().map(|p| PolarDoc {
                pairs: p.pairs.iter().map(|(a, b)| (a + 1, b + 1)).collect(),
                r_dot: p.r_dot.iter().map(polar_terms).collect(),
                theta_dot: p.theta_dot.iter().map(polar_terms).collect(),
            }),
            expansion: out.expansion.components.iter().map(series_entries).collect(),
            inversion: out.inversion.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_output(&self) -> CliResult<RgOutput> {
        check_format(&self.format, RG_FORMAT)?;
        let ctx = PolyContext::new(&self.amplitudes, &self.params, self.order)?.shared();
        let linear = match &self.linear_part {
            LinearDoc::Frequencies(ms) => LinearPart::Semisimple(ms.clone()),
            LinearDoc::Block { m, size } => LinearPart::Nilpotent { m: *m, size: *size },
            LinearDoc::Factors(f) => LinearPart::Scalar(f.clone()),
        };
        let polys = |v: &[String]| v.iter().map(|s| Ok(parse_poly(&ctx, s)?)).collect::<CliResult<Vec<_>>>();
        let rg = RGSystem { ctx: ctx.clone(), linear, field: polys(&self.field)? };
        let polar = match &self.polar {
            None => None,
            Some(p) => {
                let n = p.pairs.len();
                let each = |v: &[Vec<PolarTermDoc>]| {
                    v.iter().map(|t| parse_polar(n, &self.params, t)).collect::<CliResult<Vec<_>>>()
                };
                Some(PolarSystem {
                    pairs: crate::document::to_zero_based(&p.pairs)?,
                    params: self.params.clone(),
                    r_dot: each(&p.r_dot)?,
                    theta_dot: each(&p.theta_dot)?,
                })
            }
        };
        let components = self.expansion.iter().map(|c| parse_series(&ctx, c)).collect::<CliResult<_>>()?;
        Ok(RgOutput {
            rg,
            polar,
            expansion: RenormalizedExpansion { ctx: ctx.clone(), components },
            inversion: polys(&self.inversion)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffenceDoc {
    /// One-based.
    pub component: usize,
    pub harmonic: i64,
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub check: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offence: Option<OffenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportsDoc {
    pub format: String,
    pub reports: Vec<ReportDoc>,
}

impl ReportsDoc {
    pub fn new(reports: &[CheckReport]) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            reports: reports
                .iter()
                .map(|r| ReportDoc {
                    check: r.kind.name().into(),
                    status: r.status.as_str().into(),
                    offence: r.offence.as_ref().map(|o| OffenceDoc {
                        component: o.component + 1,
                        harmonic: o.harmonic,
                        monomial: o.monomial.clone(),
                        lhs: o.lhs.clone(),
                        rhs: o.rhs.clone(),
                    }),
                    seed: r.seed,
                    note: r.note.clone(),
                })
                .collect(),
        }
    }

    pub fn to_reports(&self) -> CliResult<Vec<CheckReport>> {
        check_format(&self.format, REPORT_FORMAT)?;
        self.reports
            .iter()
            .map(|r| {
                let kind = CheckKind::from_name(&r.check)
                    .ok_or_else(|| CliError::Spec(format!("unknown check `{}`", r.check)))?;
                let status = match r.status.as_str() {
                    "PASS" => CheckStatus::Pass,
                    "FAIL" => CheckStatus::Fail,
                    "N/A" => CheckStatus::NotApplicable,
                    s => return Err(CliError::Spec(format!("unknown status `{s}`"))),
                };
                let offence = match &r.offence {
                    None => None,
                    Some(o) => Some(Offence {
                        component: o.component.checked_sub(1).ok_or_else(|| CliError::Spec("components are one-based".into()))?,
                        harmonic: o.harmonic,
                        monomial: o.monomial.clone(),
                        lhs: o.lhs.clone(),
                        rhs: o.rhs.clone(),
                    }),
                };
                Ok(CheckReport { kind, status, offence, seed: r.seed, note: r.note.clone() })
            })
            .collect()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    Ok(serde_json::from_str(text)?)
}
