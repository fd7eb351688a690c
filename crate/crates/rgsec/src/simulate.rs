//! Direct integration against RG integration plus reconstruction.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use rgsec_core::model::ODESystemSpec;
use rgsec_core::perturb::expand;
use rgsec_core::rg::{derive_rg, polar_transform, renormalized_expansion};

use crate::error::{CliError, CliResult};
use crate::numeric::{
    conjugate_deviation, emit_csv, initial_state, integrate_ode, integrate_polar, integrate_rg, polar_to_amplitudes,
    reconstruct, sup_re_deviation, truncate_expansion, truncate_rg, Trajectory,
};
use crate::svg::{emit_svg, Series};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialAmplitudes {
    /// `𝒜_{k±}(0) = R_k e^{±iθ_k}` for zero-based pairs covering every amplitude.
    Polar { pairs: Vec<(usize, usize)>, r0: Vec<f64>, theta0: Vec<f64> },
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub eps: f64,
    pub t_end: f64,
    pub dt: f64,
    pub rg_order: u32,
    pub expansion_order: u32,
    pub params: Vec<f64>,
    pub initial: InitialAmplitudes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub config: SimulationConfig,
    pub direct: Trajectory,
    /// Polar `(R, θ)` states when integrated in polar form, amplitudes otherwise.
    pub rg: Trajectory,
    pub amplitudes: Trajectory,
    pub reconstructed: Trajectory,
    pub y0: Vec<Complex64>,
    /// `sup_t |Re y_1 − Re Y_1|`.
    pub deviation: f64,
    pub conjugate_deviation: Option<f64>,
}

pub fn simulate(spec: &ODESystemSpec, cfg: &SimulationConfig) -> CliResult<Simulation> {
    let table = expand(&spec.with_order(cfg.rg_order.max(cfg.expansion_order)))?;
    let rg = truncate_rg(&derive_rg(&table)?, cfg.rg_order);
    let n = rg.n();
    let (rg_traj, amplitudes, pairs) = match &cfg.initial {
        InitialAmplitudes::Polar { pairs, r0, theta0 } => {
            if 2 * pairs.len() != n {
                return Err(CliError::Spec(format!("polar integration needs every one of the {n} amplitudes paired")));
            }
            let polar = polar_transform(&rg, pairs)?;
            let traj = integrate_polar(&polar, r0, theta0, cfg.eps, cfg.t_end, cfg.dt, &cfg.params)?;
            let amps = polar_to_amplitudes(&polar, n, &traj)?;
            (traj, amps, pairs.clone())
        }
        InitialAmplitudes::Complex(a0) => {
            let traj = integrate_rg(&rg, a0, cfg.eps, cfg.t_end, cfg.dt, cfg.rg_order, &cfg.params)?;
            (traj.clone(), traj, Vec::new())
        }
    };
    let ren = truncate_expansion(&renormalized_expansion(&table)?, cfg.expansion_order);
    let reconstructed = reconstruct(&ren, &amplitudes, cfg.eps, &cfg.params)?;
    let y0 = initial_state(&table, &amplitudes.states[0], cfg.eps, cfg.expansion_order, &cfg.params)?;
    let direct = integrate_ode(spec, &y0, cfg.eps, cfg.t_end, cfg.dt, &cfg.params)?;
    let deviation = sup_re_deviation(&direct, &reconstructed, 0);
    let conj = (!pairs.is_empty()).then(|| conjugate_deviation(&direct, &pairs));
    Ok(Simulation {
        config: cfg.clone(),
        direct,
        rg: rg_traj,
        amplitudes,
        reconstructed,
        y0,
        deviation,
        conjugate_deviation: conj,
    })
}

/// Writes `direct.csv`, `rg.csv`, `reconstructed.csv` and three figures.
pub fn write_artifacts(sim: &Simulation, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (name, traj) in [("direct.csv", &sim.direct), ("rg.csv", &sim.rg), ("reconstructed.csv", &sim.reconstructed)] {
        let p = dir.join(name);
        emit_csv(traj, &p)?;
        out.push(p);
    }
    let t = sim.direct.times();
    let re = |tr: &Trajectory, j: usize| tr.states.iter().map(|s| s[j].re).collect::<Vec<_>>();
    let im = |tr: &Trajectory, j: usize| tr.states.iter().map(|s| s[j].im).collect::<Vec<_>>();
    let eps = sim.config.eps;

    let p = dir.join("fig1_direct.svg");
    emit_svg(
        &format!("Direct integration, eps = {eps}"),
        "t",
        &[Series::new("Re y1", "red", &t, &re(&sim.direct, 0)), Series::new("Im y1", "blue", &t, &im(&sim.direct, 0))],
        &p,
    )?;
    out.push(p);

    let p = dir.join("fig2_rg.svg");
    let series = match &sim.config.initial {
        InitialAmplitudes::Polar { pairs, .. } => {
            let colors = ["red", "blue", "darkorange", "teal"];
            let mut v = Vec::new();
            for q in 0..pairs.len() {
                let sfx = if pairs.len() == 1 { String::new() } else { (q + 1).to_string() };
                v.push(Series::new(&format!("R{sfx}"), colors[(2 * q) % 4], &t, &re(&sim.rg, 2 * q)));
                v.push(Series::new(&format!("θ{sfx}"), colors[(2 * q + 1) % 4], &t, &re(&sim.rg, 2 * q + 1)));
            }
            v
        }
        InitialAmplitudes::Complex(_) => vec![
            Series::new("Re 𝒜1", "red", &t, &re(&sim.rg, 0)),
            Series::new("Im 𝒜1", "blue", &t, &im(&sim.rg, 0)),
        ],
    };
    emit_svg(&format!("RG integration, eps = {eps}"), "t", &series, &p)?;
    out.push(p);

    let p = dir.join("fig3_overlay.svg");
    emit_svg(
        &format!("Direct vs renormalized expansion, eps = {eps}"),
        "t",
        &[
            Series::new("Re y1 (direct)", "black", &t, &re(&sim.direct, 0)),
            Series::new("Re Y1 (RG)", "red", &t, &re(&sim.reconstructed, 0)),
        ],
        &p,
    )?;
    out.push(p);
    Ok(out)
}
