//! Fixed-step RK4 integration of the original equation and of RG systems,
//! reconstruction through the renormalized expansion, and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use rgsec_core::algebra::{Ctx, MultiPoly, EPS, T};
use rgsec_core::model::{LinearPart, ODESystemSpec};
use rgsec_core::perturb::SecularTable;
use rgsec_core::rg::{PolarSystem, RGSystem, RenormalizedExpansion};
use rgsec_core::verify::characteristic_coefficients;

use crate::error::{CliError, CliResult};

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub system: String,
    pub eps: f64,
    pub params: Vec<f64>,
}

/// States on the uniform grid `t0 + k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Vec<C>>,
    pub meta: Metadata,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn component(&self, j: usize) -> Vec<C> {
        self.states.iter().map(|s| s[j]).collect()
    }

    pub fn last(&self) -> &[C] {
        self.states.last().map_or(&[], Vec::as_slice)
    }
}

/// Number of steps covering `[0, t_end]`.
pub fn step_count(t_end: f64, dt: f64) -> CliResult<usize> {
    if !(dt > 0.0) || !dt.is_finite() || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(CliError::Spec(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}")));
    }
    Ok((t_end / dt).round() as usize)
}

/// Classical fourth-order Runge–Kutta with a fixed step.
pub fn rk4<F>(mut f: F, y0: &[C], t_end: f64, dt: f64) -> CliResult<Vec<Vec<C>>>
where
    F: FnMut(f64, &[C]) -> CliResult<Vec<C>>,
{
    let steps = step_count(t_end, dt)?;
    let axpy = |y: &[C], k: &[C], h: f64| -> Vec<C> { y.iter().zip(k).map(|(a, b)| a + b * h).collect() };
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    if let Some(bad) = y.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Overflow(format!("non-finite initial state {bad}")));
    }
    out.push(y.clone());
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = f(t, &y)?;
        let k2 = f(t + dt / 2.0, &axpy(&y, &k1, dt / 2.0))?;
        let k3 = f(t + dt / 2.0, &axpy(&y, &k2, dt / 2.0))?;
        let k4 = f(t + dt, &axpy(&y, &k3, dt))?;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CliError::Overflow(format!("state left the finite range at t = {}", t + dt)));
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn complex_params(params: &[f64]) -> Vec<C> {
    params.iter().map(|p| C::new(*p, 0.0)).collect()
}

fn check_params(ctx: &Ctx, params: &[f64]) -> CliResult<()> {
    if params.len() == ctx.n_params() {
        Ok(())
    } else {
        Err(CliError::Spec(format!("expected {} parameter values, got {}", ctx.n_params(), params.len())))
    }
}

/// Slot-ordered evaluation point.
pub fn point(ctx: &Ctx, eps: f64, t: f64, amps: &[C], params: &[C]) -> Vec<C> {
    let mut vals = vec![C::new(0.0, 0.0); ctx.nvars()];
    vals[EPS] = C::new(eps, 0.0);
    vals[T] = C::new(t, 0.0);
    for (k, a) in amps.iter().enumerate() {
        vals[ctx.amp(k)] = *a;
    }
    for (k, p) in params.iter().enumerate() {
        vals[ctx.param(k)] = *p;
    }
    vals
}

/// Direct integration of `dy/dt = Ly + εV(ε, e^{it}, y)`; scalar equations
/// are integrated in the derivative slots `(y, y', …, y^{(N−1)})`.
pub fn integrate_ode(
    spec: &ODESystemSpec,
    initial: &[C],
    eps: f64,
    t_end: f64,
    dt: f64,
    params: &[f64],
) -> CliResult<Trajectory> {
    let n = spec.n_amplitudes();
    if initial.len() != n {
        return Err(CliError::Spec(format!("expected {n} initial values, got {}", initial.len())));
    }
    if params.len() != spec.params.len() {
        return Err(CliError::Spec(format!("expected {} parameter values, got {}", spec.params.len(), params.len())));
    }
    let names = spec.state_names();
    let pvals = complex_params(params);
    let v_at = |t: f64, y: &[C]| -> CliResult<Vec<C>> {
        let env = |name: &str| {
            names
                .iter()
                .position(|s| s == name)
                .map(|k| y[k])
                .or_else(|| spec.params.iter().position(|p| p == name).map(|k| pvals[k]))
        };
        spec.v.iter().map(|e| Ok(e.eval(&env, eps, t)?)).collect()
    };
    let im = |m: i64| C::new(0.0, m as f64);
    let states = match &spec.linear {
        LinearPart::Semisimple(ms) => rk4(
            |t, y| {
                let v = v_at(t, y)?;
                Ok(y.iter().zip(ms).zip(v).map(|((yj, m), vj)| im(*m) * yj + vj * eps).collect())
            },
            initial,
            t_end,
            dt,
        )?,
        LinearPart::Nilpotent { m, .. } => rk4(
            |t, y| {
                let v = v_at(t, y)?;
                Ok((0..n)
                    .map(|j| im(*m) * y[j] + y.get(j + 1).copied().unwrap_or_default() + v[j] * eps)
                    .collect())
            },
            initial,
            t_end,
            dt,
        )?,
        LinearPart::Scalar(f) => {
            let c: Vec<C> = characteristic_coefficients(f).iter().map(|g| g.to_complex()).collect();
            rk4(
                |t, y| {
                    let v = v_at(t, y)?;
                    let mut d: Vec<C> = y[1..].to_vec();
                    let lower: C = (0..n).map(|k| c[k] * y[k]).sum();
                    d.push(v[0] * eps - lower);
                    Ok(d)
                },
                initial,
                t_end,
                dt,
            )?
        }
    };
    Ok(Trajectory {
        t0: 0.0,
        dt,
        states,
        meta: Metadata { system: format!("{} equation", spec.class_name()), eps, params: params.to_vec() },
    })
}

/// The RG system with its field truncated at `ε^order`.
pub fn truncate_rg(rg: &RGSystem, order: u32) -> RGSystem {
    RGSystem { field: rg.field.iter().map(|f| f.truncate(order)).collect(), ..rg.clone() }
}

/// Integrates `d𝒜/dt = F(ε, 𝒜)` with the field truncated at `ε^eps_order`.
pub fn integrate_rg(
    rg: &RGSystem,
    initial: &[C],
    eps: f64,
    t_end: f64,
    dt: f64,
    eps_order: u32,
    params: &[f64],
) -> CliResult<Trajectory> {
    if initial.len() != rg.n() {
        return Err(CliError::Spec(format!("expected {} amplitudes, got {}", rg.n(), initial.len())));
    }
    check_params(&rg.ctx, params)?;
    let rg = truncate_rg(rg, eps_order);
    let pvals = complex_params(params);
    let states = rk4(
        |_, a| {
            let vals = point(&rg.ctx, eps, 0.0, a, &pvals);
            Ok(rg.field.iter().map(|f| f.eval(&vals)).collect())
        },
        initial,
        t_end,
        dt,
    )?;
    Ok(Trajectory {
        t0: 0.0,
        dt,
        states,
        meta: Metadata { system: "RG equation".into(), eps, params: params.to_vec() },
    })
}

/// Integrates the polar form; the state is `(R_1, θ_1, R_2, θ_2, …)` stored
/// as real parts.
pub fn integrate_polar(
    polar: &PolarSystem,
    r0: &[f64],
    theta0: &[f64],
    eps: f64,
    t_end: f64,
    dt: f64,
    params: &[f64],
) -> CliResult<Trajectory> {
    let k = polar.pairs.len();
    if r0.len() != k || theta0.len() != k {
        return Err(CliError::Spec(format!("expected {k} values of R(0) and θ(0)")));
    }
    if params.len() != polar.params.len() {
        return Err(CliError::Spec(format!("expected {} parameter values, got {}", polar.params.len(), params.len())));
    }
    let init: Vec<C> = r0.iter().zip(theta0).flat_map(|(r, th)| [C::new(*r, 0.0), C::new(*th, 0.0)]).collect();
    let states = rk4(
        |_, y| {
            let r: Vec<f64> = (0..k).map(|q| y[2 * q].re).collect();
            let th: Vec<f64> = (0..k).map(|q| y[2 * q + 1].re).collect();
            let (dr, dth) = polar.eval(eps, &r, &th, params);
            Ok((0..k).flat_map(|q| [C::new(dr[q], 0.0), C::new(dth[q], 0.0)]).collect())
        },
        &init,
        t_end,
        dt,
    )?;
    Ok(Trajectory {
        t0: 0.0,
        dt,
        states,
        meta: Metadata { system: "polar RG equation".into(), eps, params: params.to_vec() },
    })
}

/// `𝒜_{k±} = R_k e^{±iθ_k}` along a polar trajectory.
pub fn polar_to_amplitudes(polar: &PolarSystem, n: usize, traj: &Trajectory) -> CliResult<Trajectory> {
    if traj.dim() != 2 * polar.pairs.len() {
        return Err(CliError::Spec("polar trajectory has the wrong dimension".into()));
    }
    let states = traj
        .states
        .iter()
        .map(|y| {
            let mut a = vec![C::new(0.0, 0.0); n];
            for (q, &(p, m)) in polar.pairs.iter().enumerate() {
                a[p] = C::from_polar(y[2 * q].re, y[2 * q + 1].re);
                a[m] = a[p].conj();
            }
            a
        })
        .collect();
    Ok(Trajectory {
        t0: traj.t0,
        dt: traj.dt,
        states,
        meta: Metadata { system: "RG amplitudes".into(), ..traj.meta.clone() },
    })
}

/// The renormalized expansion truncated at `ε^order`.
pub fn truncate_expansion(ren: &RenormalizedExpansion, order: u32) -> RenormalizedExpansion {
    RenormalizedExpansion { ctx: ren.ctx.clone(), components: ren.components.iter().map(|c| c.truncate(order)).collect() }
}

/// `Y_j(t) = Σ_m P_{j,m}(ε, 0, 𝒜(t)) e^{imt}` along an amplitude trajectory.
pub fn reconstruct(ren: &RenormalizedExpansion, amplitudes: &Trajectory, eps: f64, params: &[f64]) -> CliResult<Trajectory> {
    if amplitudes.dim() != ren.ctx.n_amplitudes() {
        return Err(CliError::Spec(format!(
            "expansion has {} amplitudes, trajectory has {}",
            ren.ctx.n_amplitudes(),
            amplitudes.dim()
        )));
    }
    check_params(&ren.ctx, params)?;
    let pvals = complex_params(params);
    let states =
        amplitudes.states.iter().enumerate().map(|(k, a)| ren.eval(eps, amplitudes.time(k), a, &pvals)).collect();
    Ok(Trajectory {
        t0: amplitudes.t0,
        dt: amplitudes.dt,
        states,
        meta: Metadata { system: "renormalized expansion".into(), eps, params: params.to_vec() },
    })
}

/// Every table component at `t = 0` with `A = 𝒜(0)`, truncated at `ε^order`:
/// the initial state of the original equation matching the RG trajectory.
pub fn initial_state(table: &SecularTable, amps: &[C], eps: f64, order: u32, params: &[f64]) -> CliResult<Vec<C>> {
    check_params(&table.ctx, params)?;
    let vals = point(&table.ctx, eps, 0.0, amps, &complex_params(params));
    Ok(table
        .components
        .iter()
        .map(|c| c.entries().map(|(_, p): (i64, &MultiPoly)| p.truncate(order).eval(&vals)).sum())
        .collect())
}

/// `sup_t |Re a_j(t) − Re b_j(t)|` over the common grid.
pub fn sup_re_deviation(a: &Trajectory, b: &Trajectory, j: usize) -> f64 {
    a.states.iter().zip(&b.states).map(|(x, y)| (x[j].re - y[j].re).abs()).fold(0.0, f64::max)
}

/// `sup_t |y_b(t) − conj(y_a(t))|` over the given pairs.
pub fn conjugate_deviation(traj: &Trajectory, pairs: &[(usize, usize)]) -> f64 {
    traj.states
        .iter()
        .flat_map(|y| pairs.iter().map(move |&(a, b)| (y[b] - y[a].conj()).norm()))
        .fold(0.0, f64::max)
}

/// CSV with columns `t, re_1, im_1, …`, 17 significant digits, LF endings.
pub fn csv_string(traj: &Trajectory) -> String {
    let mut s = String::from("t");
    for j in 1..=traj.dim() {
        write!(s, ",re_{j},im_{j}").unwrap();
    }
    s.push('\n');
    for (k, y) in traj.states.iter().enumerate() {
        write!(s, "{:.16e}", traj.time(k)).unwrap();
        for z in y {
            write!(s, ",{:.16e},{:.16e}", z.re, z.im).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn emit_csv(traj: &Trajectory, path: &Path) -> CliResult<()> {
    fs::write(path, csv_string(traj))?;
    Ok(())
}
