//! Transverse-electric Maxwell on the staggered grid.
//!
//! `D` and `E` are out-of-plane scalars on nodes, `B` and `H` in-plane fields
//! on edges in the rotated reading of `gradperp` (see [`Operators2D`]). The
//! potential form keeps `A` on nodes with `B = gradperp A`.
//!
//! Inputs come in two labelled groups: `"current"`, one column per node
//! carrying the controlled current density `J_u` through `-M_N`, and
//! `"boundary"`, one column per boundary node carrying the tangential
//! magnetic flux injected at that node. The boundary group is the discrete
//! Poynting port: its supplied power is `Σ E_b u_b`, positive when energy
//! enters the domain.

mod lowfreq;

pub use lowfreq::{lf_project, maxwell_diagram_check, MaxwellDiagramReport};

use std::fmt;
use std::sync::Arc;

use crate::discrete_ops::{sbp_operators_2d, Operators2D, Profile, StaggeredGrid2D};
use crate::error::{Error, Result};
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{m_weighted_adjoint, DescriptorPHSystem, PortKind, Representation, Trajectory};

/// `J_u(t, x, y)`
#[derive(Clone)]
pub struct CurrentDensity(pub Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>);

impl fmt::Debug for CurrentDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CurrentDensity(..)")
    }
}

#[derive(Clone, Debug)]
pub struct EmMaterial {
    pub eps0: f64,
    pub mu0: f64,
    /// Conductivity in `J_r = σ E`.
    pub sigma: Profile,
    pub current: Option<CurrentDensity>,
}

impl Default for EmMaterial {
    fn default() -> Self {
        Self { eps0: 1.0, mu0: 1.0, sigma: 0.0.into(), current: None }
    }
}

impl EmMaterial {
    pub fn conducting(sigma: f64) -> Self {
        Self { sigma: sigma.into(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (v, what) in [(self.eps0, "ε₀"), (self.mu0, "μ₀")] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveCoefficient(format!("{what} = {v}")));
            }
        }
        Ok(())
    }

    fn node_conductivity(&self, grid: &StaggeredGrid2D) -> Result<Vec<f64>> {
        (0..grid.n_nodes())
            .map(|k| {
                let (x, y) = grid.node_xy(k);
                let s = self.sigma.at(x, y);
                if s >= 0.0 && s.is_finite() {
                    Ok(s)
                } else {
                    Err(Error::NonPositiveCoefficient(format!("conductivity {s} at ({x}, {y})")))
                }
            })
            .collect()
    }
}

struct Shared {
    ops: Operators2D,
    m_n: SparseMatrix,
    r: SparseMatrix,
    b: SparseMatrix,
}

/// `R = blkdiag(M_N σ, 0)` and `B = [[-M_N, I_∂], [0, 0]]` for `dim` states.
fn shared(grid: &StaggeredGrid2D, mat: &EmMaterial, dim: usize) -> Result<Shared> {
    mat.validate()?;
    let ops = sbp_operators_2d(grid)?;
    let nn = grid.n_nodes();
    let sigma = mat.node_conductivity(grid)?;
    let m_n = SparseMatrix::from_diag(&ops.node_weights);
    let mut r = Triplets::new(dim, dim);
    for (k, s) in sigma.iter().enumerate() {
        if *s > 0.0 {
            r.push(k, k, ops.node_weights[k] * s);
        }
    }
    let boundary = grid.boundary_nodes();
    let mut b = Triplets::new(dim, nn + boundary.len());
    for k in 0..nn {
        b.push(k, k, -ops.node_weights[k]);
    }
    for (c, k) in boundary.into_iter().enumerate() {
        b.push(k, nn + c, 1.0);
    }
    Ok(Shared { ops, m_n, r: r.build(), b: b.build() })
}

fn input_ports(sh: &Shared, boundary: impl Iterator<Item = PortKind>) -> Vec<PortKind> {
    let nn = sh.m_n.nrows();
    std::iter::repeat(PortKind::Power).take(nn).chain(boundary).collect()
}

/// States `(D on nodes, B on edges)` with
/// `M_N Ḋ = (M_E gradperp)ᵀ H - M_N σ E - M_N J_u + u_∂` and
/// `M_E Ḃ = -M_E gradperp E`.
pub fn build_te_sd(grid: &StaggeredGrid2D, mat: &EmMaterial) -> Result<DescriptorPHSystem> {
    let (nn, ne) = (grid.n_nodes(), grid.n_edges());
    let dim = nn + ne;
    let sh = shared(grid, mat, dim)?;
    let wg = sh.ops.gradperp.weighted_forward();
    let j = SparseMatrix::from_blocks(&[nn, ne], &[nn, ne], &[(0, 1, &wg.transpose()), (1, 0, &wg.scale(-1.0))])?
        .skew_part();
    let m_e = sh.ops.gradperp.mass_out();
    let mass = SparseMatrix::block_diag(&[&sh.m_n, &m_e]);
    let q = SparseMatrix::block_diag(&[&sh.m_n.scale(1.0 / mat.eps0), &m_e.scale(1.0 / mat.mu0)]);
    let nb = sh.b.ncols() - nn;
    let ports = input_ports(&sh, std::iter::repeat(PortKind::Power).take(nb));
    DescriptorPHSystem::new("maxwell_te_sd", mass, j, sh.r.clone(), q)?
        .with_inputs(sh.b.clone(), ports)?
        .with_input_blocks(&[("current", nn), ("boundary", nb)])?
        .with_blocks(&[("D", nn), ("B", ne)])
}

/// States `(D, A)` on nodes with `Q = blkdiag(M_N/ε₀, gradperpᵀ (M_E/μ₀) gradperp)`.
/// Since `Ȧ = -E`, the boundary columns are energy ports on the trace `-A_b`.
pub fn build_te_sl(grid: &StaggeredGrid2D, mat: &EmMaterial) -> Result<DescriptorPHSystem> {
    let nn = grid.n_nodes();
    let dim = 2 * nn;
    let sh = shared(grid, mat, dim)?;
    let gp = &sh.ops.gradperp.forward;
    let inv_mu: Vec<f64> = sh.ops.edge_weights.iter().map(|w| w / mat.mu0).collect();
    let k_curl = gp.transpose().matmul(&gp.scale_rows(&inv_mu)).sym_part();
    let j = SparseMatrix::from_blocks(&[nn, nn], &[nn, nn], &[(0, 1, &sh.m_n), (1, 0, &sh.m_n.scale(-1.0))])?.skew_part();
    let mass = SparseMatrix::block_diag(&[&sh.m_n, &sh.m_n]);
    let q = SparseMatrix::block_diag(&[&sh.m_n.scale(1.0 / mat.eps0), &k_curl]);
    let boundary = grid.boundary_nodes();
    let nb = boundary.len();
    let mut gamma = Triplets::new(nb, dim);
    let mut beta = Triplets::new(nb, dim);
    for (r, &k) in boundary.iter().enumerate() {
        gamma.push(r, nn + k, -1.0);
        for (c, v) in k_curl.row(k) {
            beta.push(r, nn + c, -v);
        }
    }
    let ports = input_ports(&sh, (0..nb).map(|r| PortKind::Energy { trace_row: r }));
    DescriptorPHSystem::new("maxwell_te_sl", mass, j, sh.r.clone(), q)?
        .with_traces(gamma.build(), beta.build())?
        .with_inputs(sh.b.clone(), ports)?
        .with_input_blocks(&[("current", nn), ("boundary", nb)])?
        .with_blocks(&[("D", nn), ("A", nn)])
}

pub fn build_te(grid: &StaggeredGrid2D, mat: &EmMaterial, repr: Representation) -> Result<DescriptorPHSystem> {
    match repr {
        Representation::StokesDirac => build_te_sd(grid, mat),
        Representation::StokesLagrange => build_te_sl(grid, mat),
    }
}

/// `G = blkdiag(I, gradperp)` from `(D, A)` to `(D, B)` and its
/// pairing-weighted adjoint.
pub fn maxwell_transposition(grid: &StaggeredGrid2D) -> Result<(SparseMatrix, SparseMatrix)> {
    let ops = sbp_operators_2d(grid)?;
    let m_n = SparseMatrix::from_diag(&ops.node_weights);
    let g = SparseMatrix::block_diag(&[&SparseMatrix::identity(grid.n_nodes()), &ops.gradperp.forward]);
    let m_sd = SparseMatrix::block_diag(&[&m_n, &ops.gradperp.mass_out()]);
    let m_sl = SparseMatrix::block_diag(&[&m_n, &m_n]);
    let gdag = m_weighted_adjoint(&g, &m_sd, &m_sl)?;
    Ok((g, gdag))
}

/// Cell divergence of the `B` block of an SD state.
pub fn magnetic_divergence(grid: &StaggeredGrid2D, z_sd: &[f64]) -> Result<Vec<f64>> {
    let nn = grid.n_nodes();
    if z_sd.len() != nn + grid.n_edges() {
        return Err(Error::DimensionMismatch(format!("TE state has {} entries", z_sd.len())));
    }
    Ok(sbp_operators_2d(grid)?.flux_div.matvec(&z_sd[nn..]))
}

/// `D` bump off the centre and a smooth potential vanishing on `∂Ω`.
pub fn te_initial_sl(grid: &StaggeredGrid2D) -> Vec<f64> {
    use std::f64::consts::PI;
    let nn = grid.n_nodes();
    let r = 0.2 * grid.lx.min(grid.ly);
    let mut z = Vec::with_capacity(2 * nn);
    for k in 0..nn {
        let (x, y) = grid.node_xy(k);
        let (dx, dy) = (x - 0.35 * grid.lx, y - 0.5 * grid.ly);
        z.push((-(dx * dx + dy * dy) / (r * r)).exp());
    }
    for k in 0..nn {
        let (x, y) = grid.node_xy(k);
        z.push(0.1 * (PI * x / grid.lx).sin() * (2.0 * PI * y / grid.ly).sin());
    }
    z
}

/// [`te_initial_sl`] mapped through `G`, so `div B = 0` exactly.
pub fn te_initial_sd(grid: &StaggeredGrid2D) -> Result<Vec<f64>> {
    let (g, _) = maxwell_transposition(grid)?;
    Ok(g.matvec(&te_initial_sl(grid)))
}

/// Input at time `t`: the material's current density at the nodes, then the
/// boundary flux `g(t, x, y)` at the boundary nodes.
pub fn te_input(
    grid: &StaggeredGrid2D,
    mat: &EmMaterial,
    boundary_flux: Option<Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>>,
) -> impl Fn(f64) -> Vec<f64> {
    let nodes: Vec<(f64, f64)> = (0..grid.n_nodes()).map(|k| grid.node_xy(k)).collect();
    let boundary: Vec<(f64, f64)> = grid.boundary_nodes().into_iter().map(|k| grid.node_xy(k)).collect();
    let current = mat.current.clone();
    move |t| {
        let mut u = Vec::with_capacity(nodes.len() + boundary.len());
        match &current {
            Some(j) => u.extend(nodes.iter().map(|&(x, y)| (j.0)(t, x, y))),
            None => u.resize(nodes.len(), 0.0),
        }
        match &boundary_flux {
            Some(g) => u.extend(boundary.iter().map(|&(x, y)| g(t, x, y))),
            None => u.resize(nodes.len() + boundary.len(), 0.0),
        }
        u
    }
}

/// Per-step power `Σ_c (bᵀ e_mid)_c u_c` over one labelled input group.
pub fn input_group_power(traj: &Trajectory, sys: &DescriptorPHSystem, label: &str) -> Result<Vec<f64>> {
    let cols = sys
        .input_block(label)
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no input group {label:?}", sys.name)))?;
    if traj.record_every != 1 || traj.efforts.len() != traj.steps.len() + 1 {
        return Err(Error::DimensionMismatch("input power needs every step recorded".into()));
    }
    let bt = sys.b.transpose();
    Ok(traj
        .steps
        .iter()
        .zip(&traj.efforts[1..])
        .map(|(s, e)| cols.clone().map(|c| bt.row(c).map(|(i, v)| v * e[i]).sum::<f64>() * s.u_mid[c]).sum())
        .collect())
}

/// Electromagnetic energy entering through `∂Ω` per unit time at each step
/// midpoint; negative when energy leaves.
pub fn poynting_boundary_power(traj: &Trajectory, sys: &DescriptorPHSystem) -> Result<Vec<f64>> {
    input_group_power(traj, sys, "boundary")
}

/// `-∫ J_u E` at each step midpoint.
pub fn controlled_current_power(traj: &Trajectory, sys: &DescriptorPHSystem) -> Result<Vec<f64>> {
    input_group_power(traj, sys, "current")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, MidpointStepper};
    use crate::phcore::{check_structure, intertwining_defect, random_probes, transposition_check};

    fn grid() -> StaggeredGrid2D {
        StaggeredGrid2D::new(7, 6, 1.0, 0.9).unwrap()
    }

    #[test]
    fn pair_is_equivalent() {
        let g = grid();
        let mat = EmMaterial { sigma: Profile::varying(|x, y| x * y), ..EmMaterial::default() };
        let (sd, sl) = (build_te_sd(&g, &mat).unwrap(), build_te_sl(&g, &mat).unwrap());
        assert!(check_structure(&sd).pass && check_structure(&sl).pass);
        let (gm, gdag) = maxwell_transposition(&g).unwrap();
        let rep = transposition_check(&gm, &gdag, &sd, &sl, &random_probes(sl.dim(), 8, 4)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(sl.dim() < sd.dim());
    }

    #[test]
    fn constant_potential_carries_no_field() {
        let g = grid();
        let sl = build_te_sl(&g, &EmMaterial::default()).unwrap();
        let mut z = vec![0.0; g.n_nodes()];
        z.extend(vec![3.0; g.n_nodes()]);
        assert!(sl.effort(&z).unwrap().iter().all(|v| v.abs() < 1e-12));
        let (gm, _) = maxwell_transposition(&g).unwrap();
        assert!(gm.matvec(&z).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn closed_run_conserves_energy_and_divergence() {
        let g = grid();
        let mat = EmMaterial::default();
        let sd = build_te_sd(&g, &mat).unwrap();
        let sl = build_te_sl(&g, &mat).unwrap();
        let traj = integrate(&sd, &te_initial_sd(&g).unwrap(), None, 0.5, 0.01, 1).unwrap();
        assert!(traj.max_relative_energy_drift() < 1e-12);
        for z in &traj.states {
            assert!(magnetic_divergence(&g, z).unwrap().iter().all(|v| v.abs() < 1e-12));
        }
        assert!(poynting_boundary_power(&traj, &sd).unwrap().iter().all(|p| *p == 0.0));
        let sl_traj = integrate(&sl, &te_initial_sl(&g), None, 0.5, 0.01, 1).unwrap();
        let (gm, _) = maxwell_transposition(&g).unwrap();
        assert!(intertwining_defect(&gm, &sl_traj.states, &traj.states).unwrap() < 1e-9);
    }

    #[test]
    fn absorbing_boundary_removes_energy() {
        let g = grid();
        let sd = build_te_sd(&g, &EmMaterial::default()).unwrap();
        let stepper = MidpointStepper::new(&sd, 0.01).unwrap();
        let nn = g.n_nodes();
        let boundary = g.boundary_nodes();
        let mut z = te_initial_sd(&g).unwrap();
        let h0 = sd.hamiltonian(&z);
        for _ in 0..100 {
            let e = sd.effort(&z).unwrap();
            let mut u = vec![0.0; sd.n_inputs()];
            for (c, &k) in boundary.iter().enumerate() {
                u[nn + c] = -e[k];
            }
            let out = stepper.step(&z, &u).unwrap();
            let flux: f64 = boundary.iter().enumerate().map(|(c, &k)| out.e_mid[k] * u[nn + c]).sum();
            let h = sd.hamiltonian(&out.z_next);
            assert!(((h - sd.hamiltonian(&z)) / 0.01 - flux).abs() < 1e-9);
            z = out.z_next;
        }
        assert!(sd.hamiltonian(&z) < 0.9 * h0);
    }
}
