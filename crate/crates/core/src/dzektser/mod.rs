//! Seepage with the pseudo-parabolic operator `(1 - μΔ)`:
//!
//! ```text
//! (1 - μΔ) ∂ₜh = aΔh - bΔ²h,    h = 0 on ∂Ω
//! ```
//!
//! The head lives on interior nodes. With the gradient pairing
//! `K = gradᵀ M_E grad` and the lumped nodal mass `M_L`, the system is
//! `M ḣ = -R h` with `M = Q = M_L + μK` and `R = aK + b K M_L⁻¹ K`, so the
//! effort is the head itself. The two parts of `R` are the dissipative ports
//! `(F_∇, E_∇) = (grad h, a grad h)` and `(F_Δ, E_Δ) = (Δh, bΔh)`; on the
//! ports the natural boundary conditions are left in place.

use crate::discrete_ops::{difference_1d, lumped_node_weights_1d, sbp_operators_2d, Grid1D, StaggeredGrid2D};
use crate::error::{Error, Result};
use crate::numerics::SparseMatrix;
use crate::phcore::{DescriptorPHSystem, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DzektserParams {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for DzektserParams {
    fn default() -> Self {
        Self { mu: 0.01, a: 1.0, b: 0.01 }
    }
}

impl DzektserParams {
    pub fn validate(&self) -> Result<()> {
        for (v, what) in [(self.mu, "μ"), (self.a, "a"), (self.b, "b")] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveCoefficient(format!("{what} = {v}")));
            }
        }
        Ok(())
    }
}

/// A Dzektser system together with the pieces that split its dissipation.
#[derive(Clone, Debug)]
pub struct DzektserModel {
    pub system: DescriptorPHSystem,
    pub params: DzektserParams,
    /// `K = gradᵀ M_E grad` on interior nodes.
    pub stiffness: SparseMatrix,
    /// Diagonal of `M_L` on interior nodes.
    pub lumped_mass: Vec<f64>,
    /// Interior node indices in the full grid numbering.
    pub interior: Vec<usize>,
}

impl DzektserModel {
    fn assemble(params: DzektserParams, k: SparseMatrix, ml: Vec<f64>, interior: Vec<usize>, name: &str) -> Result<Self> {
        params.validate()?;
        if interior.is_empty() {
            return Err(Error::InvalidGrid("no interior nodes".into()));
        }
        let m_l = SparseMatrix::from_diag(&ml);
        let inv: Vec<f64> = ml.iter().map(|m| 1.0 / m).collect();
        let mass = m_l.lin_comb(1.0, &k, params.mu).sym_part();
        let bilap = k.matmul(&k.scale_rows(&inv)).sym_part();
        let r = k.lin_comb(params.a, &bilap, params.b).sym_part();
        let n = ml.len();
        let system = DescriptorPHSystem::new(name, mass.clone(), SparseMatrix::zeros(n, n), r, mass)?
            .with_blocks(&[("h", n)])?;
        Ok(Self { system, params, stiffness: k, lumped_mass: ml, interior })
    }

    /// Dissipated power of the two ports at effort `e`: `(a eᵀKe, b |Ke|²_{M_L⁻¹})`.
    pub fn port_powers(&self, e: &[f64]) -> (f64, f64) {
        let ke = self.stiffness.matvec(e);
        let grad = self.params.a * e.iter().zip(&ke).map(|(x, y)| x * y).sum::<f64>();
        let lap = self.params.b * ke.iter().zip(&self.lumped_mass).map(|(y, m)| y * y / m).sum::<f64>();
        (grad, lap)
    }

    /// Interior values of a field sampled at every grid node.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&k| full[k]).collect()
    }
}

pub fn build_dzektser(grid: &StaggeredGrid2D, params: DzektserParams) -> Result<DzektserModel> {
    let ops = sbp_operators_2d(grid)?;
    let grad = &ops.grad.forward;
    let full = grad.transpose().matmul(&grad.scale_rows(&ops.edge_weights));
    let interior = grid.interior_nodes();
    let k = full.select(&interior, &interior).sym_part();
    let ml = interior.iter().map(|&i| ops.node_weights[i]).collect();
    DzektserModel::assemble(params, k, ml, interior, "dzektser")
}

pub fn build_dzektser_1d(grid: &Grid1D, params: DzektserParams) -> Result<DzektserModel> {
    let d = difference_1d(grid);
    let full = d.transpose().matmul(&d.scale(grid.h()));
    let interior = grid.interior_nodes();
    let k = full.select(&interior, &interior).sym_part();
    let w = lumped_node_weights_1d(grid);
    let ml = interior.iter().map(|&i| w[i]).collect();
    DzektserModel::assemble(params, k, ml, interior, "dzektser_1d")
}

/// Smooth interior head for the 2D model.
pub fn dzektser_initial(grid: &StaggeredGrid2D, model: &DzektserModel) -> Vec<f64> {
    use std::f64::consts::PI;
    let full: Vec<f64> = (0..grid.n_nodes())
        .map(|k| {
            let (x, y) = grid.node_xy(k);
            let (s, t) = (x / grid.lx, y / grid.ly);
            (PI * s).sin() * (PI * t).sin() + 0.3 * (3.0 * PI * s).sin() * (2.0 * PI * t).sin()
        })
        .collect();
    model.restrict(&full)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DissipativityReport {
    pub delta_h: Vec<f64>,
    /// Power dissipated through the gradient port at each step midpoint.
    pub grad_port: Vec<f64>,
    /// Power dissipated through the Laplacian port.
    pub laplacian_port: Vec<f64>,
    /// Largest step increase of `H` over `max(1, H₀)`.
    pub max_increase: f64,
    pub min_port_power: f64,
    /// `max |ΔH + dt (grad + laplacian)| / max(1, H₀)`
    pub max_balance_residual: f64,
    pub pass: bool,
}

pub const DISSIPATIVITY_TOL: f64 = 1e-12;

pub fn dissipativity_report(traj: &Trajectory, model: &DzektserModel) -> Result<DissipativityReport> {
    if traj.record_every != 1 || traj.efforts.len() != traj.steps.len() + 1 {
        return Err(Error::DimensionMismatch("dissipativity report needs every step recorded".into()));
    }
    if traj.states.first().map(Vec::len) != Some(model.system.dim()) {
        return Err(Error::DimensionMismatch("trajectory does not belong to this model".into()));
    }
    let scale = traj.hamiltonian[0].abs().max(1.0);
    let n = traj.steps.len();
    let mut rep = DissipativityReport {
        delta_h: Vec::with_capacity(n),
        grad_port: Vec::with_capacity(n),
        laplacian_port: Vec::with_capacity(n),
        max_increase: f64::NEG_INFINITY,
        min_port_power: f64::INFINITY,
        max_balance_residual: 0.0,
        pass: false,
    };
    for (s, e) in traj.steps.iter().zip(&traj.efforts[1..]) {
        let dh = s.delta_h();
        let (g, l) = model.port_powers(e);
        rep.max_increase = rep.max_increase.max(dh / scale);
        rep.min_port_power = rep.min_port_power.min(g).min(l);
        rep.max_balance_residual = rep.max_balance_residual.max((dh + traj.dt * (g + l)).abs() / scale);
        rep.delta_h.push(dh);
        rep.grad_port.push(g);
        rep.laplacian_port.push(l);
    }
    if n == 0 {
        rep.max_increase = 0.0;
        rep.min_port_power = 0.0;
    }
    rep.pass = rep.max_increase <= DISSIPATIVITY_TOL && rep.min_port_power >= -DISSIPATIVITY_TOL;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use crate::phcore::{check_structure, random_probes};

    #[test]
    fn local_limit_has_the_mass_matrix() {
        let g = StaggeredGrid2D::unit_square(5).unwrap();
        let m = build_dzektser(&g, DzektserParams { mu: 0.0, a: 1.0, b: 0.0 }).unwrap();
        assert!(m.system.mass.is_diagonal());
        assert!(check_structure(&m.system).pass);
        let z = &random_probes(m.system.dim(), 1, 3)[0];
        let e = m.system.effort(z).unwrap();
        assert!(e.iter().zip(z).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn both_ports_dissipate() {
        let g = StaggeredGrid2D::new(8, 7, 1.0, 1.0).unwrap();
        let m = build_dzektser(&g, DzektserParams { mu: 0.02, a: 1.0, b: 0.05 }).unwrap();
        assert!(check_structure(&m.system).pass);
        let traj = integrate(&m.system, &dzektser_initial(&g, &m), None, 0.2, 0.005, 1).unwrap();
        let rep = dissipativity_report(&traj, &m).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_balance_residual < 1e-12);
        assert!(rep.grad_port.iter().all(|p| *p > 0.0) && rep.laplacian_port.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn no_damping_conserves() {
        let g = Grid1D::unit(20).unwrap();
        let m = build_dzektser_1d(&g, DzektserParams { mu: 0.1, a: 0.0, b: 0.0 }).unwrap();
        let h0 = m.restrict(&g.nodes().iter().map(|x| x * (1.0 - x)).collect::<Vec<_>>());
        let traj = integrate(&m.system, &h0, None, 1.0, 0.01, 1).unwrap();
        assert!(traj.max_relative_energy_drift() < 1e-12);
    }

    #[test]
    fn constant_head_decays_through_the_boundary_layer() {
        let g = Grid1D::unit(16).unwrap();
        let m = build_dzektser_1d(&g, DzektserParams { mu: 0.05, a: 1.0, b: 0.0 }).unwrap();
        let traj = integrate(&m.system, &vec![1.0; m.system.dim()], None, 0.05, 0.005, 1).unwrap();
        assert!(traj.hamiltonian.windows(2).all(|w| w[1] < w[0]));
    }

    fn decay_rate(params: DzektserParams, mode: f64) -> f64 {
        let g = Grid1D::unit(32).unwrap();
        let m = build_dzektser_1d(&g, params).unwrap();
        let pi = std::f64::consts::PI;
        let h0 = m.restrict(&g.nodes().iter().map(|x| (mode * pi * x).sin()).collect::<Vec<_>>());
        let traj = integrate(&m.system, &h0, None, 0.01, 1e-4, 1).unwrap();
        let rep = dissipativity_report(&traj, &m).unwrap();
        assert!(rep.pass);
        -(traj.hamiltonian.last().unwrap() / traj.hamiltonian[0]).ln() / (2.0 * 0.01)
    }

    #[test]
    fn biharmonic_port_damps_high_modes_faster() {
        let lap = DzektserParams { mu: 0.01, a: 1.0, b: 0.0 };
        let bilap = DzektserParams { mu: 0.01, a: 0.0, b: 1.0 };
        let ratio_lap = decay_rate(lap, 2.0) / decay_rate(lap, 1.0);
        let ratio_bilap = decay_rate(bilap, 2.0) / decay_rate(bilap, 1.0);
        assert!(ratio_bilap > ratio_lap, "{ratio_bilap} vs {ratio_lap}");
        assert!((ratio_bilap / ratio_lap - 4.0).abs() < 0.1);
    }
}
