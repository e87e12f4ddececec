//! Named scenarios: a system, its initial state and an optional input.

use std::io::Write;
use std::sync::Arc;

use super::config::{BoundaryKind, PlateEdge, ScenarioConfig};
use crate::discrete_ops::{Grid1D, StaggeredGrid2D};
use crate::dzektser::{build_dzektser, dzektser_initial, DzektserParams};
use crate::error::{Error, Result};
use crate::interconnect::{couple_piezo, couple_spring, piezo_initial};
use crate::maxwell2d::{build_te, lf_project, maxwell_transposition, te_initial_sl, EmMaterial};
use crate::numerics::integrate;
use crate::phcore::{power_balance, DescriptorPHSystem, PowerBalanceReport, Representation, Trajectory};
use crate::plates::{build_kl_reduced, build_kl_sd, build_kl_sl, build_rm_sd, build_rm_sl, PlateBoundary, PlateDiscretization, PlateMaterial};
use crate::wave1d::{
    build_wave_2d, build_wave_sd, build_wave_sl, build_wave_transposition, wave_1d_initial_sl, wave_2d_initial_sl,
    wave_2d_transposition, MassMode, WaveMaterial,
};

pub const MODELS: [&str; 16] = [
    "wave1d_sd",
    "wave1d_sl",
    "wave2d_sd",
    "wave2d_sl",
    "rm_sd",
    "rm_sl",
    "kl_sd",
    "kl_sl",
    "kl_reduced",
    "maxwell_te_sd",
    "maxwell_te_sl",
    "maxwell_lf_sd",
    "maxwell_lf_sl",
    "dzektser",
    "spring_coupling",
    "piezo",
];

pub const TRAJECTORY_HEADER: [&str; 6] = ["step", "t", "H", "supplied_power", "dissipated_power", "balance_residual"];

pub type InputFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct Scenario {
    pub system: DescriptorPHSystem,
    pub initial: Vec<f64>,
    pub input: Option<InputFn>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("system", &self.system.name)
            .field("dim", &self.system.dim())
            .field("forced", &self.input.is_some())
            .finish()
    }
}

/// A small configuration for `model` with every other key at its default.
pub fn default_config(model: &str, n: usize) -> ScenarioConfig {
    ScenarioConfig {
        model: model.to_string(),
        representation: None,
        n,
        ny: None,
        length: 1.0,
        t_final: 0.1,
        dt: 1e-3,
        record_every: 1,
        mass: MassMode::Lumped,
        material: Default::default(),
        bc: Default::default(),
        output: None,
    }
}

fn repr_of(model: &str) -> Representation {
    if model.ends_with("_sd") {
        Representation::StokesDirac
    } else {
        Representation::StokesLagrange
    }
}

fn plate_material(cfg: &ScenarioConfig) -> PlateMaterial {
    let d = PlateMaterial::default();
    let m = &cfg.material;
    let young = m.young.or(m.e).unwrap_or(d.young);
    let poisson = m.poisson.unwrap_or(d.poisson);
    PlateMaterial {
        rho: m.rho.unwrap_or(d.rho),
        thickness: m.thickness.unwrap_or(d.thickness),
        shear_correction: m.shear_correction.unwrap_or(d.shear_correction),
        shear_modulus: young / (2.0 * (1.0 + poisson)),
        young,
        poisson,
    }
}

fn em_material(cfg: &ScenarioConfig, default_sigma: f64) -> EmMaterial {
    let m = &cfg.material;
    EmMaterial {
        eps0: m.eps0.unwrap_or(1.0),
        mu0: m.mu0.unwrap_or(1.0),
        sigma: m.sigma.unwrap_or(default_sigma).into(),
        current: None,
    }
}

fn grid_2d(cfg: &ScenarioConfig) -> Result<StaggeredGrid2D> {
    let ny = cfg.ny.unwrap_or(cfg.n);
    StaggeredGrid2D::new(cfg.n, ny, cfg.length, cfg.length * ny as f64 / cfg.n as f64)
}

fn forcing(cfg: &ScenarioConfig, columns: usize) -> Option<InputFn> {
    if cfg.bc.kind != BoundaryKind::Forced || columns == 0 {
        return None;
    }
    let (a, w) = (cfg.bc.amplitude, 2.0 * std::f64::consts::PI * cfg.bc.frequency);
    Some(Arc::new(move |t| (0..columns).map(|c| a * (w * t + c as f64).sin()).collect()))
}

pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    let model = cfg.model.as_str();
    let m = &cfg.material;
    let wave = WaveMaterial::uniform(m.rho.unwrap_or(1.0), m.e.unwrap_or(1.0));
    let (system, initial) = match model {
        "wave1d_sd" | "wave1d_sl" => {
            let grid = Grid1D::new(0.0, cfg.length, cfg.n)?;
            let z = wave_1d_initial_sl(&grid);
            if model == "wave1d_sd" {
                let (g, _) = build_wave_transposition(&grid)?;
                (build_wave_sd(&grid, &wave, cfg.mass)?, g.matvec(&z))
            } else {
                (build_wave_sl(&grid, &wave, cfg.mass)?, z)
            }
        }
        "wave2d_sd" | "wave2d_sl" => {
            let grid = grid_2d(cfg)?;
            let z = wave_2d_initial_sl(&grid);
            let repr = repr_of(model);
            let z = if repr == Representation::StokesDirac { wave_2d_transposition(&grid)?.0.matvec(&z) } else { z };
            (build_wave_2d(&grid, &wave, repr)?, z)
        }
        "rm_sd" | "rm_sl" | "kl_sd" | "kl_sl" | "kl_reduced" => {
            let grid = grid_2d(cfg)?;
            let bc = match cfg.bc.plate {
                PlateEdge::Clamped => PlateBoundary::Clamped,
                PlateEdge::Free => PlateBoundary::Free,
            };
            let mat = plate_material(cfg);
            let disc = PlateDiscretization::new(&grid, bc)?;
            let kirchhoff = model.starts_with("kl");
            let z = disc.initial_sl(kirchhoff);
            let sd = |z: &[f64]| -> Result<Vec<f64>> { Ok(disc.transposition()?.0.matvec(z)) };
            match model {
                "rm_sd" => (build_rm_sd(&grid, &mat, bc)?, sd(&z)?),
                "rm_sl" => (build_rm_sl(&grid, &mat, bc)?, z),
                "kl_sd" => (build_kl_sd(&grid, &mat, bc)?, sd(&z)?),
                "kl_sl" => (build_kl_sl(&grid, &mat, bc)?, z),
                _ => (build_kl_reduced(&grid, &mat, bc)?, z[..2 * disc.n_nodes()].to_vec()),
            }
        }
        "maxwell_te_sd" | "maxwell_te_sl" | "maxwell_lf_sd" | "maxwell_lf_sl" => {
            let grid = grid_2d(cfg)?;
            let lf = model.contains("_lf_");
            let repr = repr_of(model);
            let sys = build_te(&grid, &em_material(cfg, if lf { 1.0 } else { 0.0 }), repr)?;
            let mut z = te_initial_sl(&grid);
            if lf {
                z[..grid.n_nodes()].fill(0.0);
            }
            if repr == Representation::StokesDirac {
                z = maxwell_transposition(&grid)?.0.matvec(&z);
            }
            (if lf { lf_project(&sys, repr)? } else { sys }, z)
        }
        "dzektser" => {
            let grid = grid_2d(cfg)?;
            let d = DzektserParams::default();
            let params = DzektserParams { mu: m.mu.unwrap_or(d.mu), a: m.a.unwrap_or(d.a), b: m.b.unwrap_or(d.b) };
            let model = build_dzektser(&grid, params)?;
            let z = dzektser_initial(&grid, &model);
            (model.system, z)
        }
        "spring_coupling" => {
            let grid = Grid1D::new(0.0, cfg.length, cfg.n)?;
            let a = build_wave_sl(&grid, &wave, cfg.mass)?;
            let c = couple_spring(&a, &a, m.k.unwrap_or(1.0), m.gamma.unwrap_or(0.0))?;
            let mut z = wave_1d_initial_sl(&grid);
            z.extend(vec![0.0; a.dim()]);
            (c.system, z)
        }
        "piezo" => {
            let grid = Grid1D::new(0.0, cfg.length, cfg.n)?;
            let c = couple_piezo(&grid, &wave, &em_material(cfg, 0.0), &m.q.unwrap_or(0.1).into())?;
            (c.system, piezo_initial(&grid))
        }
        other => return Err(Error::InvalidParameter(format!("unknown model {other:?}; valid models: {}", MODELS.join(", ")))),
    };
    let input = forcing(cfg, system.n_inputs());
    Ok(Scenario { system, initial, input })
}

/// Integrates a scenario and returns its trajectory (every step recorded)
/// with the per-step power balance.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(Scenario, Trajectory, PowerBalanceReport)> {
    let sc = build_scenario(cfg)?;
    let input = sc.input.clone();
    let f = input.as_ref().map(|f| f.as_ref() as &dyn Fn(f64) -> Vec<f64>);
    let traj = integrate(&sc.system, &sc.initial, f, cfg.t_final, cfg.dt, 1)?;
    let balance = power_balance(&traj, &sc.system)?;
    Ok((sc, traj, balance))
}

/// One row per `record_every` steps, starting with the initial state.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, balance: &PowerBalanceReport, record_every: usize, out: W) -> Result<()> {
    if record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER).map_err(io)?;
    let h0 = traj.hamiltonian.first().copied().unwrap_or(0.0);
    w.write_record(["0".to_string(), "0".to_string(), format!("{h0:.17e}"), "0".into(), "0".into(), "0".into()]).map_err(io)?;
    for (k, s) in traj.steps.iter().enumerate() {
        let step = k + 1;
        if step % record_every != 0 {
            continue;
        }
        w.write_record([
            step.to_string(),
            format!("{:.17e}", step as f64 * traj.dt),
            format!("{:.17e}", s.h_after),
            format!("{:.17e}", balance.supplied[k] + balance.energy_port[k]),
            format!("{:.17e}", balance.dissipated[k]),
            format!("{:.17e}", balance.residual[k]),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(())
}
