//! The scalar wave equation on a rectangle: displacement and momentum on
//! nodes, strain on edges.

use super::{check_positive, WaveMaterial};
use crate::discrete_ops::{sbp_operators_2d, Operators2D, StaggeredGrid2D};
use crate::error::Result;
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{m_weighted_adjoint, DescriptorPHSystem, PortKind, Representation};

fn boundary_columns(grid: &StaggeredGrid2D, dim: usize, offset: usize) -> SparseMatrix {
    let nodes = grid.boundary_nodes();
    let mut t = Triplets::new(dim, nodes.len());
    for (c, k) in nodes.into_iter().enumerate() {
        t.push(offset + k, c, 1.0);
    }
    t.build()
}

fn coefficients(ops: &Operators2D, mat: &WaveMaterial) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = &ops.grid;
    let mut e = Vec::with_capacity(g.n_edges());
    for k in 0..g.n_edges() {
        let (x, y) = g.edge_xy(k);
        e.push(ops.edge_weights[k] * check_positive(mat.e.at(x, y), "E")?);
    }
    let mut p = Vec::with_capacity(g.n_nodes());
    for k in 0..g.n_nodes() {
        let (x, y) = g.node_xy(k);
        p.push(ops.node_weights[k] / check_positive(mat.rho.at(x, y), "ρ")?);
    }
    Ok((e, p))
}

/// SD: states `(ε on edges, p on nodes)` with `J` built from `M_E grad`.
/// SL: states `(w, p)` on nodes with `Q` holding `gradᵀ M_E E grad`.
/// Both take one traction input per boundary node.
pub fn build_wave_2d(grid: &StaggeredGrid2D, mat: &WaveMaterial, repr: Representation) -> Result<DescriptorPHSystem> {
    mat.require_local()?;
    let ops = sbp_operators_2d(grid)?;
    let (ne, nn) = (grid.n_edges(), grid.n_nodes());
    let (ew, pw) = coefficients(&ops, mat)?;
    let m_n = SparseMatrix::from_diag(&ops.node_weights);
    let q_p = SparseMatrix::from_diag(&pw);
    let grad = &ops.grad.forward;
    match repr {
        Representation::StokesDirac => {
            let dim = ne + nn;
            let wg = ops.grad.weighted_forward();
            let j = SparseMatrix::from_blocks(&[ne, nn], &[ne, nn], &[(0, 1, &wg), (1, 0, &wg.transpose().scale(-1.0))])?
                .skew_part();
            let mass = SparseMatrix::block_diag(&[&ops.grad.mass_out(), &m_n]);
            let q = SparseMatrix::block_diag(&[&SparseMatrix::from_diag(&ew), &q_p]);
            let b = boundary_columns(grid, dim, ne);
            let ports = vec![PortKind::Power; b.ncols()];
            DescriptorPHSystem::new("wave2d_sd", mass, j, SparseMatrix::zeros(dim, dim), q)?
                .with_inputs(b, ports)?
                .with_blocks(&[("eps", ne), ("p", nn)])
        }
        Representation::StokesLagrange => {
            let dim = 2 * nn;
            let k = grad.transpose().matmul(&grad.scale_rows(&ew)).sym_part();
            let j = SparseMatrix::from_blocks(&[nn, nn], &[nn, nn], &[(0, 1, &m_n), (1, 0, &m_n.scale(-1.0))])?.skew_part();
            let mass = SparseMatrix::block_diag(&[&m_n, &m_n]);
            let q = SparseMatrix::block_diag(&[&k, &q_p]);
            let b = boundary_columns(grid, dim, nn);
            let ports = (0..b.ncols()).map(|r| PortKind::Energy { trace_row: r }).collect();
            let nodes = grid.boundary_nodes();
            let mut gamma = Triplets::new(nodes.len(), dim);
            let mut beta = Triplets::new(nodes.len(), dim);
            for (r, &node) in nodes.iter().enumerate() {
                gamma.push(r, node, 1.0);
                for (c, v) in k.row(node) {
                    beta.push(r, c, v);
                }
            }
            DescriptorPHSystem::new("wave2d_sl", mass, j, SparseMatrix::zeros(dim, dim), q)?
                .with_traces(gamma.build(), beta.build())?
                .with_inputs(b, ports)?
                .with_blocks(&[("w", nn), ("p", nn)])
        }
    }
}

/// `G = blkdiag(grad, I)` and its pairing-weighted adjoint.
pub fn wave_2d_transposition(grid: &StaggeredGrid2D) -> Result<(SparseMatrix, SparseMatrix)> {
    let ops = sbp_operators_2d(grid)?;
    let nn = grid.n_nodes();
    let g = SparseMatrix::block_diag(&[&ops.grad.forward, &SparseMatrix::identity(nn)]);
    let m_n = SparseMatrix::from_diag(&ops.node_weights);
    let m_sd = SparseMatrix::block_diag(&[&ops.grad.mass_out(), &m_n]);
    let m_sl = SparseMatrix::block_diag(&[&m_n, &m_n]);
    let gdag = m_weighted_adjoint(&g, &m_sd, &m_sl)?;
    Ok((g, gdag))
}

/// Both systems with the map between them: `(sd, sl, G, G†)`.
pub fn wave_2d_pair(
    grid: &StaggeredGrid2D,
    mat: &WaveMaterial,
) -> Result<(DescriptorPHSystem, DescriptorPHSystem, SparseMatrix, SparseMatrix)> {
    let sd = build_wave_2d(grid, mat, Representation::StokesDirac)?;
    let sl = build_wave_2d(grid, mat, Representation::StokesLagrange)?;
    let (g, gdag) = wave_2d_transposition(grid)?;
    Ok((sd, sl, g, gdag))
}

/// Off-centre Gaussian bump in `w` with a small rotating momentum.
pub fn wave_2d_initial_sl(grid: &StaggeredGrid2D) -> Vec<f64> {
    let nn = grid.n_nodes();
    let mut z = Vec::with_capacity(2 * nn);
    let r = 0.15 * grid.lx.min(grid.ly);
    for k in 0..nn {
        let (x, y) = grid.node_xy(k);
        let (dx, dy) = (x - 0.4 * grid.lx, y - 0.55 * grid.ly);
        z.push((-(dx * dx + dy * dy) / (r * r)).exp());
    }
    for k in 0..nn {
        let (x, y) = grid.node_xy(k);
        z.push(0.2 * (std::f64::consts::PI * x / grid.lx).sin() * (std::f64::consts::PI * y / grid.ly).sin());
    }
    z
}
