//! The 1D wave equation on P1 nodes and P0 elements.

use super::{check_positive, MassMode, WaveMaterial};
use crate::discrete_ops::{assemble_p1_mass, difference_1d, lumped_node_weights_1d, Grid1D};
use crate::error::Result;
use crate::numerics::quadrature::gauss_legendre_unit;
use crate::numerics::{inverse_power_iteration, SparseMatrix, Triplets};
use crate::phcore::{m_weighted_adjoint, DescriptorPHSystem, PortKind};

/// Element means of `E` by 3-point Gauss.
pub(crate) fn element_modulus(grid: &Grid1D, mat: &WaveMaterial) -> Result<Vec<f64>> {
    let (t, w) = gauss_legendre_unit(3);
    let h = grid.h();
    (0..grid.n_cells)
        .map(|e| {
            let x0 = grid.node(e);
            let mean: f64 = (0..3).map(|q| w[q] * mat.e.at(x0 + t[q] * h, 0.0)).sum();
            check_positive(mean, "E")
        })
        .collect()
}

/// `Dᵀ diag(h Ē) D`, the stiffness of the local string.
fn stiffness(grid: &Grid1D, mat: &WaveMaterial) -> Result<SparseMatrix> {
    let d = difference_1d(grid);
    let k: Vec<f64> = element_modulus(grid, mat)?.iter().map(|e| grid.h() * e).collect();
    Ok(d.transpose().matmul(&d.scale_rows(&k)).sym_part())
}

/// Nodal pairing and the `1/ρ`-weighted kinetic block.
pub(crate) fn momentum_blocks(grid: &Grid1D, mat: &WaveMaterial, mode: MassMode) -> Result<(SparseMatrix, SparseMatrix)> {
    match mode {
        MassMode::Lumped => {
            let ml = lumped_node_weights_1d(grid);
            let mut q = Vec::with_capacity(ml.len());
            for (i, m) in ml.iter().enumerate() {
                q.push(m / check_positive(mat.rho.at(grid.node(i), 0.0), "ρ")?);
            }
            Ok((SparseMatrix::from_diag(&ml), SparseMatrix::from_diag(&q)))
        }
        MassMode::Consistent => {
            let rho = mat.rho.clone();
            Ok((
                assemble_p1_mass(grid, &|_| 1.0, false)?,
                assemble_p1_mass(grid, &move |x| 1.0 / rho.at(x, 0.0), false)?.sym_part(),
            ))
        }
    }
}

fn end_inputs(dim: usize, offset: usize, last: usize, ports: [PortKind; 2]) -> (SparseMatrix, Vec<PortKind>) {
    let b = SparseMatrix::from_triplets(dim, 2, &[(offset, 0, 1.0), (offset + last, 1, 1.0)]);
    (b, ports.to_vec())
}

/// States `(ε on elements, p on nodes)`; efforts `(σ, v)`.
pub fn build_wave_sd(grid: &Grid1D, mat: &WaveMaterial, mode: MassMode) -> Result<DescriptorPHSystem> {
    mat.require_local()?;
    let (ne, nn) = (grid.n_cells, grid.n_nodes());
    let h = grid.h();
    let (mp, qp) = momentum_blocks(grid, mat, mode)?;
    let eh: Vec<f64> = element_modulus(grid, mat)?.iter().map(|e| h * e).collect();
    let hd = difference_1d(grid).scale(h);
    let sizes = [ne, nn];
    let he = SparseMatrix::from_diag(&vec![h; ne]);
    let mass = SparseMatrix::block_diag(&[&he, &mp]);
    let q = SparseMatrix::block_diag(&[&SparseMatrix::from_diag(&eh), &qp]);
    let j = SparseMatrix::from_blocks(&sizes, &sizes, &[(0, 1, &hd), (1, 0, &hd.transpose().scale(-1.0))])?.skew_part();
    let r = SparseMatrix::zeros(ne + nn, ne + nn);
    let (b, ports) = end_inputs(ne + nn, ne, nn - 1, [PortKind::Power, PortKind::Power]);
    DescriptorPHSystem::new("wave1d_sd", mass, j, r, q)?.with_inputs(b, ports)?.with_blocks(&[("eps", ne), ("p", nn)])
}

/// States `(w, p)` on nodes. The stiffness sits in `Q`, `J` is the
/// pairing-weighted canonical block. The inputs are energy ports pairing the
/// end tractions with the end displacements.
pub fn build_wave_sl(grid: &Grid1D, mat: &WaveMaterial, mode: MassMode) -> Result<DescriptorPHSystem> {
    mat.require_local()?;
    let nn = grid.n_nodes();
    let (mp, qp) = momentum_blocks(grid, mat, mode)?;
    let k = stiffness(grid, mat)?;
    let sizes = [nn, nn];
    let mass = SparseMatrix::block_diag(&[&mp, &mp]);
    let j = SparseMatrix::from_blocks(&sizes, &sizes, &[(0, 1, &mp), (1, 0, &mp.scale(-1.0))])?.skew_part();
    let q = SparseMatrix::block_diag(&[&k, &qp]);
    let dim = 2 * nn;
    let (b, ports) = end_inputs(dim, nn, nn - 1, [PortKind::Energy { trace_row: 0 }, PortKind::Energy { trace_row: 1 }]);
    let gamma = SparseMatrix::from_triplets(2, dim, &[(0, 0, 1.0), (1, nn - 1, 1.0)]);
    let mut beta = Triplets::new(2, dim);
    for (r, node) in [0, nn - 1].into_iter().enumerate() {
        for (c, v) in k.row(node) {
            beta.push(r, c, v);
        }
    }
    DescriptorPHSystem::new("wave1d_sl", mass, j, SparseMatrix::zeros(dim, dim), q)?
        .with_traces(gamma, beta.build())?
        .with_inputs(b, ports)?
        .with_blocks(&[("w", nn), ("p", nn)])
}

/// `G = blkdiag(D, I)` from SL to SD states and its pairing-weighted adjoint.
pub fn build_wave_transposition(grid: &Grid1D) -> Result<(SparseMatrix, SparseMatrix)> {
    let nn = grid.n_nodes();
    let g = SparseMatrix::block_diag(&[&difference_1d(grid), &SparseMatrix::identity(nn)]);
    let ml = SparseMatrix::from_diag(&lumped_node_weights_1d(grid));
    let m_sd = SparseMatrix::block_diag(&[&SparseMatrix::from_diag(&vec![grid.h(); grid.n_cells]), &ml]);
    let m_sl = SparseMatrix::block_diag(&[&ml, &ml]);
    let gdag = m_weighted_adjoint(&g, &m_sd, &m_sl)?;
    Ok((g, gdag))
}

/// Lowest angular frequency of the string with both ends fixed, from the
/// generalized problem `K v = ω² M_ρ v` on interior nodes.
pub fn fixed_fixed_fundamental(grid: &Grid1D, mat: &WaveMaterial) -> Result<f64> {
    let k = stiffness(grid, mat)?;
    let ml = lumped_node_weights_1d(grid);
    let interior = grid.interior_nodes();
    let mut m = Vec::with_capacity(interior.len());
    for &i in &interior {
        m.push(ml[i] * check_positive(mat.rho.at(grid.node(i), 0.0), "ρ")?);
    }
    let pair = inverse_power_iteration(&k.select(&interior, &interior), &SparseMatrix::from_diag(&m), 0.0, 1e-13, 500)?;
    Ok(pair.value.sqrt())
}

/// `exp(-((x - c)/width)²)` at the nodes.
pub fn gaussian_pulse(grid: &Grid1D, center: f64, width: f64) -> Vec<f64> {
    grid.nodes().iter().map(|x| (-((x - center) / width).powi(2)).exp()).collect()
}

/// Displacement pulse at rest, centred in the interval.
pub fn wave_1d_initial_sl(grid: &Grid1D) -> Vec<f64> {
    let len = grid.b - grid.a;
    let mut z = gaussian_pulse(grid, grid.a + 0.5 * len, 0.1 * len);
    let p: Vec<f64> = grid.nodes().iter().map(|x| (std::f64::consts::PI * (x - grid.a) / len).sin()).collect();
    z.extend(p);
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phcore::{check_structure, legendre_variant, random_probes, transposition_check};

    #[test]
    fn uniform_momentum_energy() {
        let g = Grid1D::unit(10).unwrap();
        let sd = build_wave_sd(&g, &WaveMaterial::uniform(1.0, 1.0), MassMode::Lumped).unwrap();
        let mut z = vec![0.0; g.n_cells];
        z.extend(vec![1.0; g.n_nodes()]);
        assert!((sd.hamiltonian(&z) - 0.5).abs() < 1e-14);
        assert!(check_structure(&sd).pass);
    }

    #[test]
    fn fundamental_frequency_of_unit_string() {
        let g = Grid1D::unit(64).unwrap();
        let w = fixed_fixed_fundamental(&g, &WaveMaterial::uniform(1.0, 1.0)).unwrap();
        assert!((w - std::f64::consts::PI).abs() < 0.01 * std::f64::consts::PI);
    }

    #[test]
    fn rigid_displacement_has_zero_effort() {
        let g = Grid1D::unit(8).unwrap();
        let sl = build_wave_sl(&g, &WaveMaterial::uniform(2.0, 3.0), MassMode::Lumped).unwrap();
        let mut z = vec![1.5; g.n_nodes()];
        z.extend(vec![0.0; g.n_nodes()]);
        let e = sl.effort(&z).unwrap();
        assert!(e.iter().all(|v| v.abs() < 1e-12));
        let minus = legendre_variant(&sl).unwrap();
        assert!((sl.hamiltonian(&z) - minus.hamiltonian(&z)).abs() < 1e-14);
    }

    #[test]
    fn hat_function_energy_is_exact() {
        let g = Grid1D::unit(5).unwrap();
        let sl = build_wave_sl(&g, &WaveMaterial::uniform(1.0, 2.0), MassMode::Lumped).unwrap();
        let mut z = vec![0.0; 2 * g.n_nodes()];
        z[2] = 1.0;
        // ½ ∫ E (w')² over the two elements with slope ±1/h
        let exact = 0.5 * 2.0 * 2.0 * g.h() / (g.h() * g.h());
        assert!((sl.hamiltonian(&z) - exact).abs() < 1e-12);
    }

    #[test]
    fn pair_is_equivalent() {
        let g = Grid1D::new(0.0, 2.0, 12).unwrap();
        let mat = WaveMaterial {
            rho: super::super::Profile::varying(|x, _| 1.0 + 0.3 * x),
            e: super::super::Profile::varying(|x, _| 2.0 + x * x),
            mu: 0.0,
        };
        let sd = build_wave_sd(&g, &mat, MassMode::Lumped).unwrap();
        let sl = build_wave_sl(&g, &mat, MassMode::Lumped).unwrap();
        let (gm, gdag) = build_wave_transposition(&g).unwrap();
        let rep = transposition_check(&gm, &gdag, &sd, &sl, &random_probes(sl.dim(), 10, 3)).unwrap();
        assert!(rep.pass, "{rep:?}");
        let mut linear: Vec<f64> = g.nodes();
        linear.extend(vec![0.0; g.n_nodes()]);
        let a = gm.matvec(&linear);
        assert!(a[..g.n_cells].iter().all(|v| (v - 1.0).abs() < 1e-13));
        let mut rigid = vec![1.0; g.n_nodes()];
        rigid.extend(vec![0.0; g.n_nodes()]);
        assert!(gm.matvec(&rigid).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn consistent_mass_builds() {
        let g = Grid1D::unit(6).unwrap();
        let sd = build_wave_sd(&g, &WaveMaterial::uniform(1.0, 1.0), MassMode::Consistent).unwrap();
        assert!(!sd.mass.is_diagonal());
        assert!(check_structure(&sd).pass);
    }
}
