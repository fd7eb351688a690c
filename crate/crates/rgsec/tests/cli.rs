//! Command-line behaviour: outputs, exit codes and the machine formats.

use std::path::Path;
use std::process::Command;

use rgsec::builtins;
use rgsec::cli::{derive_all, run};
use rgsec::document::Problem;
use rgsec::machine::{from_json, to_json, ReportsDoc, RgDoc, TableDoc};
use rgsec_core::perturb::expand;
use rgsec_core::verify::{corrupt_table, run_all};

const ODE_BUILTINS: [&str; 5] = ["ex_cd", "ex_oscillators", "ex_bt", "ex_third", "ex_scalar1"];

fn rgsec(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("rgsec").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary(args: &[&str], env: &[(&str, &Path)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rgsec"));
    cmd.args(args).env_remove("RGSEC_OUT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn expand_prints_the_table() {
    let (code, out, _) = rgsec(&["expand", "--builtin", "ex_bt", "--order", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# ex_bt: nilpotent equation, K = 1\n# amplitudes: A1, A2\n"));
    assert!(out.contains(
        "P_{1,0} = A1 + t*A2 + 1/2*eps*t^2*A2*beta*mu + 1/2*eps*t^2*A1^2*A2*beta + 1/3*eps*t^3*A1*A2^2*beta + 1/12*eps*t^4*A2^3*beta\n"
    ));
    let (code, out, _) = rgsec(&["expand", "--builtin", "ex_cd"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("P_{1,1} = A1 - 1/3*i*eps^2*t*A1")));
}

#[test]
fn unperturbed_spec_has_only_leading_rows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "z.toml", "class = \"semisimple\"\nlinear_part = [1, -1]\nV = [\"0\", \"0\"]\norder = 3\n");
    let (code, out, _) = rgsec(&["expand", "--spec", &spec]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["P_{1,1} = A1", "P_{2,-1} = A2"]);
}

#[test]
fn rg_text_output() {
    let (code, out, _) = rgsec(&["rg", "--builtin", "ex_cd", "--polar", "1:2"]);
    assert_eq!(code, 0);
    assert!(out.contains("dR/dt = 1/3*eps^4*R^4*sin(θ)\n"));
    assert!(out.contains("dθ/dt = -1/3*eps^2 - eps^2*R^2 - 1/27*eps^4"));
    let (_, out, _) = rgsec(&["rg", "--builtin", "ex_oscillators", "--polar", "1:2,3:4"]);
    assert!(out.contains("14/3*eps^2*R1^2*R2*sin(θ1 - θ2)"));
    let (_, out, _) = rgsec(&["rg", "--builtin", "ex_third"]);
    let line = out.lines().find(|l| l.starts_with("d^3𝒜1/dt^3 = ")).unwrap();
    assert!(line.ends_with("- 48165/32*eps^4*𝒜2*𝒜3^4"));
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = rgsec(&["verify", "--builtin", "ex_cd"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("all 7 checks passed\n"));
    let (code, out, _) = rgsec(&["verify", "--random", "semisimple", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(rgsec(&["verify", "--builtin", "ex_difference"]).0, 0);
}

#[test]
fn corrupted_table_fails_verification() {
    let doc = builtins::load("ex_cd").unwrap();
    let Problem::Ode { spec, .. } = doc.to_problem(None).unwrap() else { unreachable!() };
    let (bad, offence) = corrupt_table(&expand(&spec).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "bad.json", &to_json(&TableDoc::new(&doc, &bad)).unwrap());
    let (code, out, _) = rgsec(&["verify", "--table", &path]);
    assert_eq!(code, 1);
    let place = format!("functional_relation: FAIL at component {}, harmonic {}", offence.component + 1, offence.harmonic);
    assert!(out.contains(&place), "{out}");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let syntax = write_spec(dir.path(), "s.toml", "class = \"semisimple\"\nlinear_part = [1]\nV = [\"y1^\"]\norder = 3\n");
    let (code, _, err) = rgsec(&["expand", "--spec", &syntax]);
    assert_eq!(code, 2);
    assert!(err.contains("syntax error"));
    let shape = write_spec(dir.path(), "t.toml", "class = \"semisimple\"\nlinear_part = [1, 2]\nV = [\"y1\"]\norder = 3\n");
    assert_eq!(rgsec(&["expand", "--spec", &shape]).0, 2);
    assert_eq!(rgsec(&["expand", "--builtin", "nope"]).0, 2);
    assert_eq!(rgsec(&["expand"]).0, 2);
}

#[test]
fn pairing_violations_exit_three() {
    assert_eq!(rgsec(&["rg", "--builtin", "ex_bt", "--polar", "1:2"]).0, 3);
    assert_eq!(rgsec(&["rg", "--builtin", "ex_cd", "--polar", "1:1"]).0, 3);
}

#[test]
fn overflow_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = rgsec(&["simulate", "--builtin", "ex_scalar1", "--amp", "2", "--eps", "1", "--out", out]);
    assert_eq!(code, 4);
    assert!(err.contains("overflow"));
}

#[test]
fn machine_table_round_trips() {
    for name in ODE_BUILTINS {
        let (code, json, _) = rgsec(&["expand", "--builtin", name, "--format", "machine"]);
        assert_eq!(code, 0);
        let doc: TableDoc = from_json(&json).unwrap();
        let table = doc.to_table().unwrap();
        let Problem::Ode { spec, .. } = builtins::load(name).unwrap().to_problem(None).unwrap() else { unreachable!() };
        assert_eq!(table.components, expand(&spec).unwrap().components, "{name}");
        assert_eq!(to_json(&TableDoc::new(&doc.spec, &table)).unwrap(), json, "{name}");
    }
}

#[test]
fn machine_rg_and_reports_round_trip() {
    for name in ODE_BUILTINS {
        let doc = builtins::load(name).unwrap();
        let Problem::Ode { spec, .. } = doc.to_problem(Some(3)).unwrap() else { unreachable!() };
        let table = expand(&spec).unwrap();
        let pairs = (!doc.pairs.is_empty()).then_some(&doc.pairs[..]);
        let out = derive_all(&table, pairs).unwrap();
        let json = to_json(&RgDoc::new(&out)).unwrap();
        let back = from_json::<RgDoc>(&json).unwrap().to_output().unwrap();
        assert_eq!(back.rg.field, out.rg.field, "{name}");
        assert_eq!(back.polar, out.polar, "{name}");
        assert_eq!(back.expansion.components, out.expansion.components, "{name}");
        assert_eq!(back.inversion, out.inversion, "{name}");

        let reports = run_all(&table).unwrap();
        let json = to_json(&ReportsDoc::new(&reports)).unwrap();
        assert_eq!(from_json::<ReportsDoc>(&json).unwrap().to_reports().unwrap(), reports, "{name}");
    }
    let (bad, _) = corrupt_table(&expand(&spec_of("ex_cd")).unwrap()).unwrap();
    let reports = run_all(&bad).unwrap();
    let json = to_json(&ReportsDoc::new(&reports)).unwrap();
    assert_eq!(from_json::<ReportsDoc>(&json).unwrap().to_reports().unwrap(), reports);
}

fn spec_of(name: &str) -> rgsec_core::model::ODESystemSpec {
    match builtins::load(name).unwrap().to_problem(None).unwrap() {
        Problem::Ode { spec, .. } => spec,
        Problem::Difference(_) => unreachable!(),
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["rg", "--builtin", "ex_oscillators", "--polar", "1:2,3:4", "--format", "machine"][..],
        &["expand", "--builtin", "ex_difference"][..],
    ] {
        assert_eq!(binary(args, &[]), binary(args, &[]));
    }
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let sim = |out: &Path| binary(&["simulate", "--builtin", "ex_cd", "--t-end", "5", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(sim(&a).0, 0);
    assert_eq!(sim(&b).0, 0);
    for f in ["direct.csv", "rg.csv", "reconstructed.csv", "fig3_overlay.svg"] {
        let x = std::fs::read(a.join("ex_cd").join(f)).unwrap();
        let y = std::fs::read(b.join("ex_cd").join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = binary(&["expand", "--builtin", "ex_cd"], &[("RGSEC_OUT", dir.path())]);
    assert_eq!(code, 0);
    let saved = std::fs::read_to_string(dir.path().join("ex_cd.expand.txt")).unwrap();
    assert_eq!(saved, stdout);
    let (code, _) = binary(&["verify", "--builtin", "ex_bt", "--format", "machine"], &[("RGSEC_OUT", dir.path())]);
    assert_eq!(code, 0);
    let reports: ReportsDoc = from_json(&std::fs::read_to_string(dir.path().join("ex_bt.verify.json")).unwrap()).unwrap();
    assert_eq!(reports.reports.len(), 7);
}
