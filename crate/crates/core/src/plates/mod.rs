//! Reissner-Mindlin and Kirchhoff-Love plates on the staggered grid.
//!
//! Placement: deflection `w` and `p_w` on nodes; rotation `φ`, `p_φ`, the
//! shear strain and the shear force `N` on edges; curvature and bending
//! moments in the tensor space of [`Operators2D`]. Keeping every vector
//! field on edges makes the shear coupling a plain identity, so the
//! Kirchhoff-Love multipliers are uniquely determined.
//!
//! Clamping fixes the dofs located on the boundary: nodes on `∂Ω` and the
//! edges lying along it. The shear strain on those edges is then identically
//! zero and is dropped as well.

mod diagram;

pub use diagram::{plate_diagram_check, DiagramReport};

use crate::discrete_ops::{sbp_operators_2d, Operators2D, StaggeredGrid2D};
use crate::error::{Error, Result};
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{m_weighted_adjoint, DescriptorPHSystem, PortKind};

#[derive(Clone, Debug, PartialEq)]
pub struct PlateMaterial {
    pub rho: f64,
    pub thickness: f64,
    /// Shear correction factor `k`.
    pub shear_correction: f64,
    pub shear_modulus: f64,
    pub young: f64,
    pub poisson: f64,
}

impl Default for PlateMaterial {
    fn default() -> Self {
        let (young, poisson) = (1.0, 0.3);
        Self {
            rho: 1.0,
            thickness: 0.1,
            shear_correction: 5.0 / 6.0,
            shear_modulus: young / (2.0 * (1.0 + poisson)),
            young,
            poisson,
        }
    }
}

impl PlateMaterial {
    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.rho, "density"),
            (self.thickness, "thickness"),
            (self.shear_correction, "shear correction"),
            (self.shear_modulus, "shear modulus"),
            (self.young, "Young's modulus"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveCoefficient(format!("{what} = {v}")));
            }
        }
        if !(self.poisson > -1.0 && self.poisson < 0.5) {
            return Err(Error::InvalidParameter(format!("Poisson ratio {} outside (-1, 0.5)", self.poisson)));
        }
        Ok(())
    }

    /// `D = E h³ / (12 (1 - ν²))`
    pub fn bending_rigidity(&self) -> f64 {
        self.young * self.thickness.powi(3) / (12.0 * (1.0 - self.poisson * self.poisson))
    }

    /// `kGh`
    pub fn shear_stiffness(&self) -> f64 {
        self.shear_correction * self.shear_modulus * self.thickness
    }

    /// Isotropic `𝔻` on `(xx, yy, xy)`: `D [[1, ν, 0], [ν, 1, 0], [0, 0, 1-ν]]`.
    pub fn bending_tensor(&self) -> [[f64; 3]; 3] {
        let (d, nu) = (self.bending_rigidity(), self.poisson);
        [[d, nu * d, 0.0], [nu * d, d, 0.0], [0.0, 0.0, (1.0 - nu) * d]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PlateBoundary {
    #[default]
    Clamped,
    /// Natural conditions with force inputs on boundary nodes and moment
    /// inputs on edges touching the boundary.
    Free,
}

/// Grid operators restricted to the active dofs of a boundary condition.
#[derive(Clone, Debug)]
pub struct PlateDiscretization {
    pub ops: Operators2D,
    pub bc: PlateBoundary,
    /// Active nodes for `w`, `p_w`.
    pub nodes: Vec<usize>,
    /// Active edges for `φ`, `p_φ` and the shear strain.
    pub edges: Vec<usize>,
    pub grad: SparseMatrix,
    pub symgrad: SparseMatrix,
    pub node_weights: Vec<f64>,
    pub edge_weights: Vec<f64>,
}

impl PlateDiscretization {
    pub fn new(grid: &StaggeredGrid2D, bc: PlateBoundary) -> Result<Self> {
        let ops = sbp_operators_2d(grid)?;
        let (nodes, edges) = match bc {
            PlateBoundary::Clamped => (grid.interior_nodes(), grid.interior_edges()),
            PlateBoundary::Free => ((0..grid.n_nodes()).collect(), (0..grid.n_edges()).collect()),
        };
        let grad = ops.grad.forward.select(&edges, &nodes);
        let symgrad = ops.symgrad.forward.select_cols(&edges);
        let node_weights = nodes.iter().map(|&k| ops.node_weights[k]).collect();
        let edge_weights = edges.iter().map(|&e| ops.edge_weights[e]).collect();
        Ok(Self { ops, bc, nodes, edges, grad, symgrad, node_weights, edge_weights })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_tensor(&self) -> usize {
        self.ops.tensor_layout.len()
    }

    fn m_n(&self) -> SparseMatrix {
        SparseMatrix::from_diag(&self.node_weights)
    }

    fn m_e(&self) -> SparseMatrix {
        SparseMatrix::from_diag(&self.edge_weights)
    }

    fn m_t(&self) -> SparseMatrix {
        SparseMatrix::from_diag(&self.ops.tensor_weights)
    }

    /// `M_T 𝔻`, coupling `xx` and `yy` where both live on the same node.
    pub fn bending_block(&self, mat: &PlateMaterial) -> SparseMatrix {
        let d = mat.bending_tensor();
        let g = &self.ops.grid;
        let w = &self.ops.tensor_weights;
        let mut t = Triplets::new(self.n_tensor(), self.n_tensor());
        for j in 0..=g.ny {
            for i in 1..g.nx {
                let a = self.ops.xx_index(i, j);
                t.push(a, a, w[a] * d[0][0]);
                if j > 0 && j < g.ny {
                    let b = self.ops.yy_index(i, j);
                    t.push(a, b, w[a] * d[0][1]);
                    t.push(b, a, w[b] * d[1][0]);
                }
            }
        }
        for j in 1..g.ny {
            for i in 0..=g.nx {
                let b = self.ops.yy_index(i, j);
                t.push(b, b, w[b] * d[1][1]);
            }
        }
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = self.ops.xy_index(i, j);
                t.push(c, c, w[c] * d[2][2]);
            }
        }
        t.build().sym_part()
    }

    fn sd_sizes(&self) -> [usize; 4] {
        [self.n_nodes(), self.n_tensor(), self.n_edges(), self.n_edges()]
    }

    fn sl_sizes(&self) -> [usize; 4] {
        [self.n_nodes(), self.n_nodes(), self.n_edges(), self.n_edges()]
    }

    /// `G` from `(w, p_w, φ, p_φ)` to `(p_w, ε_φ, p_φ, ε_wφ)` and its
    /// pairing-weighted adjoint.
    pub fn transposition(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        let (ni, ei) = (SparseMatrix::identity(self.n_nodes()), SparseMatrix::identity(self.n_edges()));
        let minus = ei.scale(-1.0);
        let g = SparseMatrix::from_blocks(
            &self.sd_sizes(),
            &self.sl_sizes(),
            &[(0, 1, &ni), (1, 2, &self.symgrad), (2, 3, &ei), (3, 0, &self.grad), (3, 2, &minus)],
        )?;
        let m_sd = SparseMatrix::block_diag(&[&self.m_n(), &self.m_t(), &self.m_e(), &self.m_e()]);
        let m_sl = SparseMatrix::block_diag(&[&self.m_n(), &self.m_n(), &self.m_e(), &self.m_e()]);
        let gdag = m_weighted_adjoint(&g, &m_sd, &m_sl)?;
        Ok((g, gdag))
    }

    /// Rows of `p_w` belonging to boundary nodes and of `p_φ` belonging to
    /// edges touching the boundary, for the free plate.
    fn boundary_dofs(&self) -> (Vec<usize>, Vec<usize>) {
        let g = &self.ops.grid;
        if self.bc == PlateBoundary::Clamped {
            return (Vec::new(), Vec::new());
        }
        let nodes = (0..self.n_nodes()).filter(|&r| g.is_boundary_node(self.nodes[r])).collect();
        let edges = (0..self.n_edges()).filter(|&r| g.is_boundary_edge(self.edges[r])).collect();
        (nodes, edges)
    }

    fn inputs(&self, dim: usize, pw_offset: usize, pphi_offset: usize) -> SparseMatrix {
        let (nodes, edges) = self.boundary_dofs();
        let mut t = Triplets::new(dim, nodes.len() + edges.len());
        for (c, &r) in nodes.iter().enumerate() {
            t.push(pw_offset + r, c, 1.0);
        }
        for (c, &r) in edges.iter().enumerate() {
            t.push(pphi_offset + r, nodes.len() + c, 1.0);
        }
        t.build()
    }

    /// Maps a reduced Kirchhoff-Love state `(w, p_w)` to `(w, p_w, grad w, 0)`.
    pub fn lift_reduced(&self, y: &[f64]) -> Vec<f64> {
        let nn = self.n_nodes();
        let mut z = y.to_vec();
        z.extend(self.grad.matvec(&y[..nn]));
        z.extend(vec![0.0; self.n_edges()]);
        z
    }

    /// SL state with a smooth bump vanishing on the boundary and a
    /// momentum field; rotations follow the slope (exactly for
    /// Kirchhoff-Love, at half strength otherwise).
    pub fn initial_sl(&self, kirchhoff: bool) -> Vec<f64> {
        let g = &self.ops.grid;
        let bump = |k: usize| {
            let (x, y) = g.node_xy(k);
            let (sx, sy) = ((std::f64::consts::PI * x / g.lx).sin(), (std::f64::consts::PI * y / g.ly).sin());
            (sx * sy).powi(2) * (1.0 + 0.5 * x / g.lx)
        };
        let w: Vec<f64> = self.nodes.iter().map(|&k| 0.01 * bump(k)).collect();
        let p: Vec<f64> = self.nodes.iter().map(|&k| 0.005 * bump(k) * (g.node_xy(k).1 / g.ly)).collect();
        let slope = self.grad.matvec(&w);
        let mut z = w;
        z.extend(p);
        if kirchhoff {
            z.extend(slope);
            z.extend(vec![0.0; self.n_edges()]);
        } else {
            z.extend(slope.iter().map(|s| 0.5 * s));
            z.extend(slope.iter().map(|s| 1e-4 * s));
        }
        z
    }

    /// `C_SD`: `p_φ = 0` and shear strain `= 0`.
    pub fn kl_sd_constraint(&self) -> SparseMatrix {
        let [a, b, c, d] = self.sd_sizes();
        let ne = self.n_edges();
        let mut t = Triplets::new(2 * ne, a + b + c + d);
        for k in 0..ne {
            t.push(k, a + b + k, 1.0);
            t.push(ne + k, a + b + c + k, 1.0);
        }
        t.build()
    }

    /// `C_SL`: `grad w - φ = 0` and `p_φ = 0`.
    pub fn kl_sl_constraint(&self) -> Result<SparseMatrix> {
        let ne = self.n_edges();
        let sizes = self.sl_sizes();
        let minus = SparseMatrix::identity(ne).scale(-1.0);
        let ident = SparseMatrix::identity(ne);
        Ok(SparseMatrix::from_blocks(&[ne, ne], &sizes, &[(0, 0, &self.grad), (0, 2, &minus), (1, 3, &ident)])?)
    }
}

fn sd_system(disc: &PlateDiscretization, mat: &PlateMaterial, name: &str) -> Result<DescriptorPHSystem> {
    mat.validate()?;
    let sizes = disc.sd_sizes();
    let dim: usize = sizes.iter().sum();
    let (m_n, m_e, m_t) = (disc.m_n(), disc.m_e(), disc.m_t());
    let wgrad = disc.grad.scale_rows(&disc.edge_weights);
    let wsg = disc.symgrad.scale_rows(&disc.ops.tensor_weights);
    let j = SparseMatrix::from_blocks(
        &sizes,
        &sizes,
        &[
            (0, 3, &wgrad.transpose().scale(-1.0)),
            (1, 2, &wsg),
            (2, 1, &wsg.transpose().scale(-1.0)),
            (2, 3, &m_e),
            (3, 0, &wgrad),
            (3, 2, &m_e.scale(-1.0)),
        ],
    )?
    .skew_part();
    let ph = mat.rho * mat.thickness;
    let q = SparseMatrix::block_diag(&[
        &m_n.scale(1.0 / ph),
        &disc.bending_block(mat),
        &m_e.scale(12.0 / (mat.rho * mat.thickness.powi(3))),
        &m_e.scale(mat.shear_stiffness()),
    ]);
    let mass = SparseMatrix::block_diag(&[&m_n, &m_t, &m_e, &m_e]);
    let b = disc.inputs(dim, 0, sizes[0] + sizes[1]);
    let ports = vec![PortKind::Power; b.ncols()];
    DescriptorPHSystem::new(name, mass, j, SparseMatrix::zeros(dim, dim), q)?
        .with_inputs(b, ports)?
        .with_blocks(&[("p_w", sizes[0]), ("eps_phi", sizes[1]), ("p_phi", sizes[2]), ("eps_wphi", sizes[3])])
}

fn sl_system(disc: &PlateDiscretization, mat: &PlateMaterial, name: &str) -> Result<DescriptorPHSystem> {
    mat.validate()?;
    let sizes = disc.sl_sizes();
    let dim: usize = sizes.iter().sum();
    let (m_n, m_e) = (disc.m_n(), disc.m_e());
    let j = SparseMatrix::from_blocks(
        &sizes,
        &sizes,
        &[(0, 1, &m_n), (1, 0, &m_n.scale(-1.0)), (2, 3, &m_e), (3, 2, &m_e.scale(-1.0))],
    )?
    .skew_part();
    let kgh: Vec<f64> = disc.edge_weights.iter().map(|m| m * mat.shear_stiffness()).collect();
    let shear_grad = disc.grad.scale_rows(&kgh);
    let k_ww = disc.grad.transpose().matmul(&shear_grad);
    let k_wphi = shear_grad.transpose().scale(-1.0);
    let k_phiphi = disc.symgrad.transpose().matmul(&disc.bending_block(mat).matmul(&disc.symgrad)).add(&SparseMatrix::from_diag(&kgh));
    let ph = mat.rho * mat.thickness;
    let q = SparseMatrix::from_blocks(
        &sizes,
        &sizes,
        &[
            (0, 0, &k_ww),
            (0, 2, &k_wphi),
            (2, 0, &k_wphi.transpose()),
            (2, 2, &k_phiphi),
            (1, 1, &m_n.scale(1.0 / ph)),
            (3, 3, &m_e.scale(12.0 / (mat.rho * mat.thickness.powi(3)))),
        ],
    )?
    .sym_part();
    let (nodes, edges) = disc.boundary_dofs();
    let b = disc.inputs(dim, sizes[0], sizes[0] + sizes[1] + sizes[2]);
    let ports = (0..b.ncols()).map(|r| PortKind::Energy { trace_row: r }).collect();
    let mut gamma = Triplets::new(b.ncols(), dim);
    let mut beta = Triplets::new(b.ncols(), dim);
    let rows = nodes.iter().copied().chain(edges.iter().map(|&r| sizes[0] + sizes[1] + r));
    for (r, state) in rows.enumerate() {
        gamma.push(r, state, 1.0);
        for (c, v) in q.row(state) {
            beta.push(r, c, v);
        }
    }
    DescriptorPHSystem::new(name, mass_sl(disc), j, SparseMatrix::zeros(dim, dim), q)?
        .with_traces(gamma.build(), beta.build())?
        .with_inputs(b, ports)?
        .with_blocks(&[("w", sizes[0]), ("p_w", sizes[1]), ("phi", sizes[2]), ("p_phi", sizes[3])])
}

fn mass_sl(disc: &PlateDiscretization) -> SparseMatrix {
    SparseMatrix::block_diag(&[&disc.m_n(), &disc.m_n(), &disc.m_e(), &disc.m_e()])
}

/// States `(p_w, ε_φ, p_φ, ε_wφ)`, efforts `(v, σ_φ, ω, N)`.
pub fn build_rm_sd(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DescriptorPHSystem> {
    sd_system(&PlateDiscretization::new(grid, bc)?, mat, "rm_sd")
}

/// States `(w, p_w, φ, p_φ)` with the bending and shear stiffness in `Q`.
pub fn build_rm_sl(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DescriptorPHSystem> {
    sl_system(&PlateDiscretization::new(grid, bc)?, mat, "rm_sl")
}

/// The Reissner-Mindlin SD system with `p_φ` and the shear strain held at
/// zero; `ω` and `N` become multipliers.
pub fn build_kl_sd(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DescriptorPHSystem> {
    let disc = PlateDiscretization::new(grid, bc)?;
    let mut sys = sd_system(&disc, mat, "kl_sd")?;
    sys = sys.with_constraint(disc.kl_sd_constraint())?;
    Ok(sys)
}

/// The Reissner-Mindlin SL system constrained to `φ = grad w`, `p_φ = 0`.
pub fn build_kl_sl(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DescriptorPHSystem> {
    let disc = PlateDiscretization::new(grid, bc)?;
    let c = disc.kl_sl_constraint()?;
    sl_system(&disc, mat, "kl_sl")?.with_constraint(c)
}

/// Kirchhoff-Love in `(w, p_w)` only, with `Q = (Grad grad)ᵀ M_T 𝔻 (Grad grad)`.
pub fn build_kl_reduced(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DescriptorPHSystem> {
    mat.validate()?;
    let disc = PlateDiscretization::new(grid, bc)?;
    let nn = disc.n_nodes();
    let hess = disc.symgrad.matmul(&disc.grad);
    let k = hess.transpose().matmul(&disc.bending_block(mat).matmul(&hess)).sym_part();
    let m_n = disc.m_n();
    let j = SparseMatrix::from_blocks(&[nn, nn], &[nn, nn], &[(0, 1, &m_n), (1, 0, &m_n.scale(-1.0))])?.skew_part();
    let q = SparseMatrix::block_diag(&[&k, &m_n.scale(1.0 / (mat.rho * mat.thickness))]);
    let mass = SparseMatrix::block_diag(&[&m_n, &m_n]);
    DescriptorPHSystem::new("kl_reduced", mass, j, SparseMatrix::zeros(2 * nn, 2 * nn), q)?
        .with_blocks(&[("w", nn), ("p_w", nn)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phcore::{check_structure, random_probes, transposition_check};

    fn grid() -> StaggeredGrid2D {
        StaggeredGrid2D::new(5, 4, 1.0, 0.8).unwrap()
    }

    #[test]
    fn all_forms_are_structured() {
        let mat = PlateMaterial::default();
        for bc in [PlateBoundary::Clamped, PlateBoundary::Free] {
            for sys in [
                build_rm_sd(&grid(), &mat, bc).unwrap(),
                build_rm_sl(&grid(), &mat, bc).unwrap(),
                build_kl_sd(&grid(), &mat, bc).unwrap(),
                build_kl_sl(&grid(), &mat, bc).unwrap(),
                build_kl_reduced(&grid(), &mat, bc).unwrap(),
            ] {
                let d = check_structure(&sys);
                assert!(d.pass, "{} {bc:?}: {d:?}", sys.name);
            }
        }
    }

    #[test]
    fn rm_pair_is_equivalent() {
        let mat = PlateMaterial { poisson: 0.25, ..Default::default() };
        for bc in [PlateBoundary::Clamped, PlateBoundary::Free] {
            let disc = PlateDiscretization::new(&grid(), bc).unwrap();
            let (g, gdag) = disc.transposition().unwrap();
            let sd = build_rm_sd(&grid(), &mat, bc).unwrap();
            let sl = build_rm_sl(&grid(), &mat, bc).unwrap();
            let rep = transposition_check(&g, &gdag, &sd, &sl, &random_probes(sl.dim(), 5, 4)).unwrap();
            assert!(rep.pass, "{bc:?}: {rep:?}");
        }
    }

    #[test]
    fn zero_state_and_rigid_translation() {
        let mat = PlateMaterial::default();
        let sl = build_rm_sl(&grid(), &mat, PlateBoundary::Free).unwrap();
        assert_eq!(sl.hamiltonian(&vec![0.0; sl.dim()]), 0.0);
        let nn = grid().n_nodes();
        let mut z = vec![0.0; sl.dim()];
        z[..nn].iter_mut().for_each(|v| *v = 1.0);
        let e = sl.effort(&z).unwrap();
        assert!(e[..nn].iter().all(|v| v.abs() < 1e-12));
        assert!(e[2 * nn..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn lifted_reduced_state_satisfies_constraint() {
        let disc = PlateDiscretization::new(&grid(), PlateBoundary::Clamped).unwrap();
        let y: Vec<f64> = (0..2 * disc.n_nodes()).map(|k| (k as f64 * 0.37).sin()).collect();
        let z = disc.lift_reduced(&y);
        let c = disc.kl_sl_constraint().unwrap();
        assert!(c.matvec(&z).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn kirchhoff_love_paths_agree() {
        use crate::numerics::integrate;
        use crate::phcore::intertwining_defect;
        let g = StaggeredGrid2D::unit_square(6).unwrap();
        let mat = PlateMaterial::default();
        let disc = PlateDiscretization::new(&g, PlateBoundary::Clamped).unwrap();
        let z0 = disc.initial_sl(true);
        let nn = disc.n_nodes();
        let sl = build_kl_sl(&g, &mat, PlateBoundary::Clamped).unwrap();
        let sd = build_kl_sd(&g, &mat, PlateBoundary::Clamped).unwrap();
        let red = build_kl_reduced(&g, &mat, PlateBoundary::Clamped).unwrap();
        let (gm, _) = disc.transposition().unwrap();
        let dt = 0.05;
        let t_sl = integrate(&sl, &z0, None, 20.0 * dt, dt, 1).unwrap();
        let t_sd = integrate(&sd, &gm.matvec(&z0), None, 20.0 * dt, dt, 1).unwrap();
        let t_red = integrate(&red, &z0[..2 * nn], None, 20.0 * dt, dt, 1).unwrap();
        assert!(intertwining_defect(&gm, &t_sl.states, &t_sd.states).unwrap() < 1e-9);
        let c = sl.constraint.as_ref().unwrap();
        for (z, y) in t_sl.states.iter().zip(&t_red.states) {
            assert!(c.matvec(z).iter().all(|v| v.abs() < 1e-9));
            let scale = y.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
            assert!(z[..2 * nn].iter().zip(y).all(|(a, b)| (a - b).abs() <= 1e-8 * scale));
        }
        assert!(t_sl.max_relative_energy_drift() < 1e-9);
    }
}
