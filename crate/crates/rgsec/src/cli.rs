//! `rgsec expand | rg | verify | simulate`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rgsec_core::difference::{
    closed_form_amplitude, gk_poly, render_generating_series, secular_pm, stability, DifferenceSpec,
};
use rgsec_core::model::{LinearPart, ODESystemSpec};
use rgsec_core::perturb::{expand, SecularTable};
use rgsec_core::rg::{derive_rg, invert_amplitudes, polar_transform, renormalized_expansion};
use rgsec_core::verify::{random_spec, run_all, CheckReport, RandomClass};

use crate::builtins;
use crate::document::{to_zero_based, Problem, SpecDocument};
use crate::error::{CliError, CliResult};
use crate::machine::{to_json, DifferenceDoc, ReportsDoc, RgDoc, RgOutput, TableDoc};
use crate::simulate::{simulate, write_artifacts, InitialAmplitudes, Simulation, SimulationConfig};

#[derive(Debug, Parser)]
#[command(name = "rgsec", version, about = "Renormalization-group perturbation of ODEs with exact secular coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the secular coefficients P_{j,m}.
    Expand(CommonArgs),
    /// Derive the RG equation, renormalized expansion and inverse amplitudes.
    Rg(RgArgs),
    /// Run the identity checks.
    Verify(VerifyArgs),
    /// Integrate the equation and its RG system and compare.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["spec", "builtin"])))]
pub struct CommonArgs {
    /// Spec document (TOML).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Builtin example.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Truncation order K.
    #[arg(long)]
    pub order: Option<u32>,
    /// Also write the output into this directory.
    #[arg(long, env = "RGSEC_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RgArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// One-based conjugate pairs for the polar form, e.g. `1:2,3:4`.
    #[arg(long, value_parser = parse_pairs)]
    pub polar: Option<Pairs>,
    /// ε for the stability report of a difference problem.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["spec", "builtin", "random", "table"])))]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub builtin: Option<String>,
    /// Random spec of class semisimple, nilpotent or scalar.
    #[arg(long)]
    pub random: Option<String>,
    /// Secular table in machine format.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "RGSEC_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub eps: Option<f64>,
    /// R(0) per conjugate pair.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r0: Option<Vec<f64>>,
    /// θ(0) per conjugate pair.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta0: Option<Vec<f64>>,
    /// Initial amplitudes as complex numbers, e.g. `0.3,0.1+0.2i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub amp: Option<Vec<Complex64>>,
    #[arg(long, value_parser = parse_pairs)]
    pub polar: Option<Pairs>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Parameter values in declaration order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub param: Option<Vec<f64>>,
    /// Order of the renormalized expansion used for reconstruction.
    #[arg(long)]
    pub expansion_order: Option<u32>,
    /// Rerun at this ε and report the deviation ratio.
    #[arg(long)]
    pub compare_eps: Option<f64>,
}

/// One-based amplitude pairs as given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairs(pub Vec<(usize, usize)>);

fn parse_pairs(s: &str) -> Result<Pairs, String> {
    s.split(',')
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| format!("`{p}` is not of the form a:b"))?;
            let a = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
            Ok((a, b))
        })
        .collect::<Result<_, String>>()
        .map(Pairs)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err((text, e)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

type Outcome = Result<String, (String, CliError)>;

fn dispatch(cmd: &Command) -> Outcome {
    let plain = |r: CliResult<String>| r.map_err(|e| (String::new(), e));
    match cmd {
        Command::Expand(a) => plain(cmd_expand(a)),
        Command::Rg(a) => plain(cmd_rg(a)),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => plain(cmd_simulate(a)),
    }
}

fn load_document(spec: &Option<PathBuf>, builtin: &Option<String>) -> CliResult<SpecDocument> {
    match (spec, builtin) {
        (Some(path), None) => SpecDocument::from_toml(&std::fs::read_to_string(path)?),
        (None, Some(name)) => builtins::load(name),
        _ => Err(CliError::Spec("give exactly one of --spec and --builtin".into())),
    }
}

fn doc_label(doc: &SpecDocument) -> String {
    doc.name.clone().unwrap_or_else(|| "spec".into())
}

fn save(dir: &Option<PathBuf>, stem: &str, format: Format, text: &str) -> CliResult<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        let ext = match format {
            Format::Text => "txt",
            Format::Machine => "json",
        };
        std::fs::write(dir.join(format!("{stem}.{ext}")), text)?;
    }
    Ok(())
}

fn coefficient_label(table: &SecularTable, j: usize, m: i64) -> String {
    match table.spec.linear {
        LinearPart::Scalar(_) => format!("P_{{{m}}}"),
        _ => format!("P_{{{},{m}}}", j + 1),
    }
}

pub fn render_table(doc: &SpecDocument, table: &SecularTable) -> String {
    let mut s = String::new();
    writeln!(s, "# {}: {} equation, K = {}", doc_label(doc), table.spec.class_name(), table.order()).unwrap();
    writeln!(s, "# amplitudes: {}", table.ctx.amplitude_names().join(", ")).unwrap();
    for d in &doc.discrepancy {
        writeln!(s, "# discrepancy in {}: published {}; engine {}", d.quantity, d.published, d.engine).unwrap();
    }
    for (j, c) in table.components[..table.primary_components()].iter().enumerate() {
        for (m, p) in c.entries() {
            writeln!(s, "{} = {p}", coefficient_label(table, j, m)).unwrap();
        }
    }
    s
}

fn difference_coefficients(d: &DifferenceSpec) -> CliResult<Vec<(i64, rgsec_core::algebra::MultiPoly)>> {
    let r = d.reach();
    (-r..=r).map(|m| Ok((m, secular_pm(&d.alpha, m, d.order, d.window)?))).collect()
}

pub fn cmd_expand(a: &CommonArgs) -> CliResult<String> {
    let doc = load_document(&a.spec, &a.builtin)?;
    let text = match doc.to_problem(a.order)? {
        Problem::Ode { spec, .. } => {
            let table = expand(&spec)?;
            match a.format {
                Format::Text => render_table(&doc, &table),
                Format::Machine => to_json(&TableDoc::new(&doc, &table))?,
            }
        }
        Problem::Difference(d) => {
            let pm = difference_coefficients(&d)?;
            match a.format {
                Format::Text => {
                    let mut s = String::new();
                    writeln!(s, "# {}: difference equation, K = {}, W = {}", doc_label(&doc), d.order, d.window).unwrap();
                    writeln!(s, "# 2U(z) = {}", d.alpha.render("z")).unwrap();
                    for (m, p) in &pm {
                        writeln!(s, "P_{{{m}}} = {p}").unwrap();
                    }
                    s
                }
                Format::Machine => to_json(&DifferenceDoc::new(&doc, d.window, d.order, d.reach(), &pm))?,
            }
        }
    };
    save(&a.out, &format!("{}.expand", doc_label(&doc)), a.format, &text)?;
    Ok(text)
}

/// Runs the `rg` derivations on a table.
pub fn derive_all(table: &SecularTable, pairs: Option<&[(usize, usize)]>) -> CliResult<RgOutput> {
    let rg = derive_rg(table)?;
    let polar = match pairs {
        Some(p) => Some(polar_transform(&rg, &to_zero_based(p)?)?),
        None => None,
    };
    Ok(RgOutput { polar, expansion: renormalized_expansion(table)?, inversion: invert_amplitudes(table)?, rg })
}

pub fn render_rg(doc: &SpecDocument, out: &RgOutput) -> String {
    let mut s = String::new();
    writeln!(s, "# {}: RG equation, K = {}", doc_label(doc), out.rg.ctx.order()).unwrap();
    for line in out.rg.lines() {
        writeln!(s, "{line}").unwrap();
    }
    if let Some(p) = &out.polar {
        let pairs: Vec<String> = p.pairs.iter().map(|(a, b)| format!("{}:{}", a + 1, b + 1)).collect();
        writeln!(s, "# polar form, pairs {}", pairs.join(",")).unwrap();
        for line in p.lines() {
            writeln!(s, "{line}").unwrap();
        }
    }
    writeln!(s, "# renormalized expansion").unwrap();
    for (j, c) in out.expansion.components.iter().enumerate() {
        writeln!(s, "Y{} = {c}", j + 1).unwrap();
    }
    writeln!(s, "# inverse amplitudes").unwrap();
    let bare: Vec<String> = out.rg.ctx.amplitude_names().iter().map(|n| n.replace('𝒜', "A")).collect();
    for (name, p) in bare.iter().zip(&out.inversion) {
        writeln!(s, "{name} = {p}").unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRgDoc {
    pub format: String,
    pub g: Vec<String>,
    pub theta: String,
    pub generating_series: String,
    pub closed_form: Vec<(i64, String)>,
}

pub fn cmd_rg(a: &RgArgs) -> CliResult<String> {
    let c = &a.common;
    let doc = load_document(&c.spec, &c.builtin)?;
    let text = match doc.to_problem(c.order)? {
        Problem::Ode { spec, .. } => {
            let out = derive_all(&expand(&spec)?, a.polar.as_ref().map(|p| p.0.as_slice()))?;
            match c.format {
                Format::Text => render_rg(&doc, &out),
                Format::Machine => to_json(&RgDoc::new(&out))?,
            }
        }
        Problem::Difference(d) => {
            let g = gk_poly(d.order);
            let theta = rgsec_core::difference::theta_series(&d.alpha, d.order);
            let r = d.reach();
            let closed = if d.alpha.is_even() {
                (-r..=r)
                    .map(|m| Ok((m, closed_form_amplitude(&d.alpha, m, d.order, d.window)?.to_string())))
                    .collect::<CliResult<Vec<_>>>()?
            } else {
                Vec::new()
            };
            let gs: Vec<String> = (0..=d.order as usize).map(|k| g.render(k)).collect();
            match c.format {
                Format::Text => {
                    let mut s = String::new();
                    writeln!(s, "# {}: difference equation, K = {}", doc_label(&doc), d.order).unwrap();
                    for (k, gk) in gs.iter().enumerate() {
                        writeln!(s, "g_{k}(u) = {gk}").unwrap();
                    }
                    writeln!(s, "{}", render_generating_series(&d.alpha, d.order)).unwrap();
                    for (m, p) in &closed {
                        writeln!(s, "𝒜_{{{m}}} = {p}").unwrap();
                    }
                    if let Some(eps) = a.eps {
                        let st = stability(&d.alpha, Complex64::new(eps, 0.0), 256);
                        writeln!(
                            s,
                            "# stability at eps = {eps}: Θ imaginary = {}, |εU| ≤ 1 = {} (max |εU| = {:.6}, max |Re Θ| = {:.3e})",
                            st.theta_imaginary, st.bounded, st.max_abs_eps_u, st.max_abs_re_theta
                        )
                        .unwrap();
                    }
                    s
                }
                Format::Machine => to_json(&DifferenceRgDoc {
                    format: "rgsec.difference_rg".into(),
                    g: gs,
                    theta: theta.render(),
                    generating_series: render_generating_series(&d.alpha, d.order),
                    closed_form: closed,
                })?,
            }
        }
    };
    save(&c.out, &format!("{}.rg", doc_label(&doc)), c.format, &text)?;
    Ok(text)
}

fn ode_reports(spec: &ODESystemSpec) -> CliResult<Vec<CheckReport>> {
    Ok(run_all(&expand(spec)?)?)
}

pub fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let (label, reports, header) = verify_reports(a).map_err(|e| (String::new(), e))?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let text = match a.format {
        Format::Text => {
            let mut s = header;
            for r in &reports {
                writeln!(s, "{r}").unwrap();
            }
            if failed == 0 {
                writeln!(s, "all {} checks passed", reports.len()).unwrap();
            } else {
                writeln!(s, "{failed} of {} checks failed", reports.len()).unwrap();
            }
            s
        }
        Format::Machine => to_json(&ReportsDoc::new(&reports)).map_err(|e| (String::new(), e))?,
    };
    save(&a.out, &format!("{label}.verify"), a.format, &text).map_err(|e| (text.clone(), e))?;
    if failed > 0 {
        Err((text, CliError::VerifyFailed { failed }))
    } else {
        Ok(text)
    }
}

fn verify_reports(a: &VerifyArgs) -> CliResult<(String, Vec<CheckReport>, String)> {
    if let Some(class) = &a.random {
        let cls = RandomClass::from_name(class)
            .ok_or_else(|| CliError::Spec(format!("unknown random class `{class}`")))?;
        let mut spec = random_spec(cls, a.seed)?;
        if let Some(k) = a.order {
            spec = spec.with_order(k);
        }
        let v: Vec<String> = spec.v.iter().map(ToString::to_string).collect();
        let header = format!(
            "# random {} spec, seed {}, K = {}: {:?}, V = [{}]\n",
            class,
            a.seed,
            spec.order,
            spec.linear,
            v.join(", ")
        );
        let reports = ode_reports(&spec)?.into_iter().map(|r| r.with_seed(a.seed)).collect();
        return Ok((format!("random_{class}_{}", a.seed), reports, header));
    }
    if let Some(path) = &a.table {
        let doc: TableDoc = crate::machine::from_json(&std::fs::read_to_string(path)?)?;
        let table = doc.to_table()?;
        let header = format!("# table {}: K = {}\n", path.display(), table.order());
        return Ok(("table".into(), run_all(&table)?, header));
    }
    let doc = load_document(&a.spec, &a.builtin)?;
    let label = doc_label(&doc);
    match doc.to_problem(a.order)? {
        Problem::Ode { spec, .. } => {
            let header = format!("# {label}: K = {}\n", spec.order);
            Ok((label, ode_reports(&spec)?, header))
        }
        Problem::Difference(d) => {
            let header = format!("# {label}: K = {}, W = {}\n", d.order, d.window);
            let reports = rgsec_core::difference::check_difference_identities(&d.alpha, d.order, d.window)?;
            Ok((label, reports, header))
        }
    }
}

/// Resolves command-line overrides against the document's defaults.
pub fn simulation_config(doc: &SpecDocument, spec: &ODESystemSpec, a: &SimulateArgs) -> CliResult<SimulationConfig> {
    let d = doc.simulate.clone().unwrap_or_default();
    let rg_order = a.common.order.or(d.rg_order).unwrap_or(doc.order);
    let expansion_order = a.expansion_order.or(d.expansion_order).unwrap_or(2.min(rg_order));
    let params = a.param.clone().or(d.params).unwrap_or_default();
    if params.len() != spec.params.len() {
        return Err(CliError::Spec(format!(
            "{} needs {} parameter value(s) ({}), got {}",
            doc_label(doc),
            spec.params.len(),
            spec.params.join(", "),
            params.len()
        )));
    }
    let pairs = match &a.polar {
        Some(p) => to_zero_based(&p.0)?,
        None => doc.zero_based_pairs()?,
    };
    let broadcast = |v: Vec<f64>| if v.len() == 1 { vec![v[0]; pairs.len()] } else { v };
    let initial = if let Some(amps) = &a.amp {
        InitialAmplitudes::Complex(amps.clone())
    } else if let (false, Some(r0), Some(theta0)) =
        (pairs.is_empty(), a.r0.clone().or(d.r0), a.theta0.clone().or(d.theta0))
    {
        InitialAmplitudes::Polar { pairs: pairs.clone(), r0: broadcast(r0), theta0: broadcast(theta0) }
    } else if let Some(amps) = d.amplitudes {
        InitialAmplitudes::Complex(amps.iter().map(|(re, im)| Complex64::new(*re, *im)).collect())
    } else {
        return Err(CliError::Spec("no initial amplitudes: give --amp, or --r0/--theta0 with pairs".into()));
    };
    Ok(SimulationConfig {
        eps: a.eps.or(d.eps).unwrap_or(0.1),
        t_end: a.t_end.or(d.t_end).unwrap_or(40.0),
        dt: a.dt.or(d.dt).unwrap_or(0.01),
        rg_order,
        expansion_order,
        params,
        initial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub eps: f64,
    pub y0: Vec<(f64, f64)>,
    pub deviation: f64,
    pub conjugate_deviation: Option<f64>,
    pub artifacts: Vec<String>,
    pub compare_eps: Option<f64>,
    pub compare_deviation: Option<f64>,
    pub ratio: Option<f64>,
}

fn summary(sim: &Simulation, artifacts: &[PathBuf], other: Option<&Simulation>) -> SimulationSummary {
    SimulationSummary {
        eps: sim.config.eps,
        y0: sim.y0.iter().map(|z| (z.re, z.im)).collect(),
        deviation: sim.deviation,
        conjugate_deviation: sim.conjugate_deviation,
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        compare_eps: other.map(|o| o.config.eps),
        compare_deviation: other.map(|o| o.deviation),
        ratio: other.and_then(|o| (o.deviation > 0.0).then(|| sim.deviation / o.deviation)),
    }
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<String> {
    let c = &a.common;
    let doc = load_document(&c.spec, &c.builtin)?;
    let Problem::Ode { spec, .. } = doc.to_problem(c.order)? else {
        return Err(CliError::Spec("simulate needs an ODE spec".into()));
    };
    let cfg = simulation_config(&doc, &spec, a)?;
    let sim = simulate(&spec, &cfg)?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("rgsec-out"));
    let artifacts = write_artifacts(&sim, &dir.join(doc_label(&doc)))?;
    let other = match a.compare_eps {
        Some(e) => Some(simulate(&spec, &SimulationConfig { eps: e, ..cfg.clone() })?),
        None => None,
    };
    let sum = summary(&sim, &artifacts, other.as_ref());
    match c.format {
        Format::Machine => to_json(&sum),
        Format::Text => Ok(render_summary(&doc, &sum, &dir)),
    }
}

fn render_summary(doc: &SpecDocument, s: &SimulationSummary, dir: &Path) -> String {
    let mut out = String::new();
    writeln!(out, "# {}: simulation at eps = {}", doc_label(doc), s.eps).unwrap();
    for (j, (re, im)) in s.y0.iter().enumerate() {
        writeln!(out, "y{}(0) = {re:.6} {} {:.6}i", j + 1, if *im < 0.0 { '-' } else { '+' }, im.abs()).unwrap();
    }
    writeln!(out, "sup |Re y1 - Re Y1| = {:.6e}", s.deviation).unwrap();
    if let Some(c) = s.conjugate_deviation {
        writeln!(out, "sup |y2 - conj(y1)| = {c:.3e}").unwrap();
    }
    if let (Some(e), Some(d), Some(r)) = (s.compare_eps, s.compare_deviation, s.ratio) {
        writeln!(out, "at eps = {e}: sup |Re y1 - Re Y1| = {d:.6e}, ratio = {r:.3}").unwrap();
    }
    writeln!(out, "artifacts in {}:", dir.display()).unwrap();
    for p in &s.artifacts {
        writeln!(out, "  {p}").unwrap();
    }
    out
}
