use super::system::DescriptorPHSystem;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Per-step energy bookkeeping: `ΔH = dt (supplied + energy_port - dissipated) + residual`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerBalanceReport {
    pub delta_h: Vec<f64>,
    pub supplied: Vec<f64>,
    pub energy_port: Vec<f64>,
    pub dissipated: Vec<f64>,
    pub residual: Vec<f64>,
    pub max_abs_residual: f64,
    /// `max |residual| / max(1, |H₀|)`
    pub max_scaled_residual: f64,
    /// Largest single-step increase of `H`, scaled like the residual.
    pub max_energy_increase: f64,
}

pub fn power_balance(traj: &Trajectory, sys: &DescriptorPHSystem) -> Result<PowerBalanceReport> {
    if traj.is_empty() {
        return Err(Error::DimensionMismatch("empty trajectory".into()));
    }
    if traj.states[0].len() != sys.dim() {
        return Err(Error::DimensionMismatch("trajectory does not belong to this system".into()));
    }
    let dt = traj.dt;
    let n = traj.steps.len();
    let mut rep = PowerBalanceReport {
        delta_h: Vec::with_capacity(n),
        supplied: Vec::with_capacity(n),
        energy_port: Vec::with_capacity(n),
        dissipated: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
        max_abs_residual: 0.0,
        max_scaled_residual: 0.0,
        max_energy_increase: 0.0,
    };
    let scale = traj.hamiltonian[0].abs().max(1.0);
    for s in &traj.steps {
        let dh = s.delta_h();
        let res = dh - dt * (s.supplied + s.energy_port - s.dissipated);
        rep.max_abs_residual = rep.max_abs_residual.max(res.abs());
        rep.max_energy_increase = rep.max_energy_increase.max(dh / scale);
        rep.delta_h.push(dh);
        rep.supplied.push(s.supplied);
        rep.energy_port.push(s.energy_port);
        rep.dissipated.push(s.dissipated);
        rep.residual.push(res);
    }
    rep.max_scaled_residual = rep.max_abs_residual / scale;
    Ok(rep)
}
