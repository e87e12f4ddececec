//! Summation-by-parts operator pairs.
//!
//! A pair `(F, A, L)` between spaces `U` and `V` with diagonal pairings
//! `M_U`, `M_V` satisfies
//!
//! ```text
//! (F u)ᵀ M_V v = uᵀ M_U (A v) + uᵀ L v
//! ```
//!
//! exactly: `A` rows are `M_U⁻¹ Fᵀ M_V` on interior dofs of `U` and zero on
//! boundary dofs, whose rows of `Fᵀ M_V` form the boundary lift `L`.

use super::grid::{Grid1D, StaggeredGrid2D};
use crate::error::{Error, Result};
use crate::numerics::{SparseMatrix, Triplets};

#[derive(Clone, Debug)]
pub struct SbpPair {
    /// `F : U → V`
    pub forward: SparseMatrix,
    /// `A : V → U`, zero on boundary rows.
    pub adjoint_interior: SparseMatrix,
    /// `L : V → U`, nonzero only on boundary rows.
    pub boundary_lift: SparseMatrix,
    /// Diagonal of `M_U`.
    pub pairing_in: Vec<f64>,
    /// Diagonal of `M_V`.
    pub pairing_out: Vec<f64>,
    pub boundary_in: Vec<bool>,
}

impl SbpPair {
    pub fn by_construction(forward: SparseMatrix, pairing_in: Vec<f64>, pairing_out: Vec<f64>, boundary_in: Vec<bool>) -> Result<Self> {
        let (nv, nu) = forward.shape();
        if pairing_in.len() != nu || pairing_out.len() != nv || boundary_in.len() != nu {
            return Err(Error::DimensionMismatch("SBP pairings do not match the operator".into()));
        }
        if let Some(bad) = pairing_in.iter().chain(&pairing_out).find(|w| !(**w > 0.0)) {
            return Err(Error::NonPositiveCoefficient(format!("pairing weight {bad}")));
        }
        let w = forward.transpose().scale_cols(&pairing_out);
        let mut a = Triplets::with_capacity(nu, nv, w.nnz());
        let mut l = Triplets::new(nu, nv);
        for i in 0..nu {
            for (j, v) in w.row(i) {
                if boundary_in[i] {
                    l.push(i, j, v);
                } else {
                    a.push(i, j, v / pairing_in[i]);
                }
            }
        }
        Ok(Self { forward, adjoint_interior: a.build(), boundary_lift: l.build(), pairing_in, pairing_out, boundary_in })
    }

    pub fn mass_in(&self) -> SparseMatrix {
        SparseMatrix::from_diag(&self.pairing_in)
    }

    pub fn mass_out(&self) -> SparseMatrix {
        SparseMatrix::from_diag(&self.pairing_out)
    }

    /// `M_V F`, the block that enters a skew-symmetric structure matrix.
    pub fn weighted_forward(&self) -> SparseMatrix {
        self.forward.scale_rows(&self.pairing_out)
    }

    /// Relative residual of the summation-by-parts identity for `(u, v)`.
    pub fn identity_residual(&self, u: &[f64], v: &[f64]) -> f64 {
        let fu = self.forward.matvec(u);
        let lhs: f64 = fu.iter().zip(v).zip(&self.pairing_out).map(|((a, b), w)| a * w * b).sum();
        let av = self.adjoint_interior.matvec(v);
        let t1: f64 = u.iter().zip(&av).zip(&self.pairing_in).map(|((a, b), w)| a * w * b).sum();
        let t2 = self.boundary_lift.bilinear(u, v);
        let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(1.0);
        (lhs - t1 - t2).abs() / scale
    }
}

/// `(Dw)ᵢ = (wᵢ₊₁ - wᵢ)/h` from nodes to elements.
pub fn difference_1d(grid: &Grid1D) -> SparseMatrix {
    let n = grid.n_cells;
    let ih = 1.0 / grid.h();
    let mut t = Triplets::with_capacity(n, n + 1, 2 * n);
    for e in 0..n {
        t.push(e, e, -ih);
        t.push(e, e + 1, ih);
    }
    t.build()
}

pub fn lumped_node_weights_1d(grid: &Grid1D) -> Vec<f64> {
    let h = grid.h();
    let mut w = vec![h; grid.n_nodes()];
    w[0] = 0.5 * h;
    w[grid.n_cells] = 0.5 * h;
    w
}

/// Gradient pair on a 1D grid: nodes → elements with element pairing `h I`
/// and lumped nodal pairing. The adjoint is `-∂ₓ` in the interior and the
/// lift picks `(-σ₀, σ_{N-1})` at the two end nodes.
pub fn sbp_gradient_1d(grid: &Grid1D) -> Result<SbpPair> {
    let n = grid.n_nodes();
    let mut boundary = vec![false; n];
    boundary[0] = true;
    boundary[n - 1] = true;
    SbpPair::by_construction(difference_1d(grid), lumped_node_weights_1d(grid), vec![grid.h(); grid.n_cells], boundary)
}

/// The staggered 2D complex.
///
/// Index spaces: nodes `N`, edges `E` (`[x-edges; y-edges]`), cells `C`, and
/// the tensor space `T = [xx on x-interior nodes; yy on y-interior nodes;
/// xy on cells]`.
///
/// Orientation conventions, chosen so every identity below is exact:
/// * `grad u` stores `∂ₓu` on x-edges and `∂ᵧu` on y-edges;
/// * `gradperp a` stores `-∂ₓa` on x-edges and `∂ᵧa` on y-edges. Read as a
///   flux, the x-edge entry is the y-component and the y-edge entry the
///   x-component, so `gradperp a` is the rotated gradient `(∂ᵧa, -∂ₓa)`;
/// * `flux_div` is the cell divergence of such rotated fields, hence
///   `flux_div ∘ gradperp = 0` entry by entry;
/// * `curl2d` is the interior adjoint of `gradperp`, which in the rotated
///   reading is `∂ₓH_y - ∂ᵧH_x`;
/// * `div = -adjoint(grad)`, `tensdiv = -adjoint(symgrad)`.
#[derive(Clone, Debug)]
pub struct Operators2D {
    pub grid: StaggeredGrid2D,
    pub grad: SbpPair,
    pub gradperp: SbpPair,
    pub symgrad: SbpPair,
    pub div: SparseMatrix,
    pub curl2d: SparseMatrix,
    pub tensdiv: SparseMatrix,
    pub flux_div: SparseMatrix,
    /// `div ∘ grad` on interior nodes.
    pub laplacian: SparseMatrix,
    pub node_weights: Vec<f64>,
    pub edge_weights: Vec<f64>,
    pub tensor_weights: Vec<f64>,
    pub cell_weights: Vec<f64>,
    pub tensor_layout: TensorLayout,
}

/// Offsets of the three tensor components inside `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorLayout {
    pub n_xx: usize,
    pub n_yy: usize,
    pub n_xy: usize,
}

impl TensorLayout {
    pub fn len(&self) -> usize {
        self.n_xx + self.n_yy + self.n_xy
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn half_at_ends(k: usize, n: usize) -> f64 {
    if k == 0 || k == n {
        0.5
    } else {
        1.0
    }
}

impl Operators2D {
    pub fn xx_index(&self, i: usize, j: usize) -> usize {
        j * (self.grid.nx - 1) + (i - 1)
    }

    pub fn yy_index(&self, i: usize, j: usize) -> usize {
        self.tensor_layout.n_xx + (j - 1) * (self.grid.nx + 1) + i
    }

    pub fn xy_index(&self, i: usize, j: usize) -> usize {
        self.tensor_layout.n_xx + self.tensor_layout.n_yy + self.grid.cell(i, j)
    }
}

pub fn sbp_operators_2d(grid: &StaggeredGrid2D) -> Result<Operators2D> {
    let g = grid.clone();
    let (nx, ny) = (g.nx, g.ny);
    let (hx, hy) = (g.hx(), g.hy());
    let (ihx, ihy) = (1.0 / hx, 1.0 / hy);
    let area = hx * hy;
    let (nn, ne, nc) = (g.n_nodes(), g.n_edges(), g.n_cells());

    let mut node_weights = vec![0.0; nn];
    for j in 0..=ny {
        for i in 0..=nx {
            node_weights[g.node(i, j)] = area * half_at_ends(i, nx) * half_at_ends(j, ny);
        }
    }
    let mut edge_weights = vec![0.0; ne];
    for j in 0..=ny {
        for i in 0..nx {
            edge_weights[g.xedge(i, j)] = area * half_at_ends(j, ny);
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            edge_weights[g.yedge(i, j)] = area * half_at_ends(i, nx);
        }
    }
    let cell_weights = vec![area; nc];

    let mut grad = Triplets::with_capacity(ne, nn, 2 * ne);
    let mut perp = Triplets::with_capacity(ne, nn, 2 * ne);
    for j in 0..=ny {
        for i in 0..nx {
            let e = g.xedge(i, j);
            grad.push(e, g.node(i, j), -ihx);
            grad.push(e, g.node(i + 1, j), ihx);
            perp.push(e, g.node(i, j), ihx);
            perp.push(e, g.node(i + 1, j), -ihx);
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            let e = g.yedge(i, j);
            grad.push(e, g.node(i, j), -ihy);
            grad.push(e, g.node(i, j + 1), ihy);
            perp.push(e, g.node(i, j), -ihy);
            perp.push(e, g.node(i, j + 1), ihy);
        }
    }
    let node_boundary: Vec<bool> = (0..nn).map(|k| g.is_boundary_node(k)).collect();
    let grad = SbpPair::by_construction(grad.build(), node_weights.clone(), edge_weights.clone(), node_boundary.clone())?;
    let gradperp = SbpPair::by_construction(perp.build(), node_weights.clone(), edge_weights.clone(), node_boundary)?;

    let mut fd = Triplets::with_capacity(nc, ne, 4 * nc);
    for j in 0..ny {
        for i in 0..nx {
            let c = g.cell(i, j);
            fd.push(c, g.yedge(i + 1, j), ihx);
            fd.push(c, g.yedge(i, j), -ihx);
            fd.push(c, g.xedge(i, j + 1), ihy);
            fd.push(c, g.xedge(i, j), -ihy);
        }
    }

    let layout = TensorLayout { n_xx: (nx - 1) * (ny + 1), n_yy: (nx + 1) * (ny - 1), n_xy: nc };
    let nt = layout.len();
    let mut ops = Operators2D {
        grid: g.clone(),
        grad,
        gradperp,
        symgrad: SbpPair {
            forward: SparseMatrix::zeros(0, 0),
            adjoint_interior: SparseMatrix::zeros(0, 0),
            boundary_lift: SparseMatrix::zeros(0, 0),
            pairing_in: Vec::new(),
            pairing_out: Vec::new(),
            boundary_in: Vec::new(),
        },
        div: SparseMatrix::zeros(0, 0),
        curl2d: SparseMatrix::zeros(0, 0),
        tensdiv: SparseMatrix::zeros(0, 0),
        flux_div: fd.build(),
        laplacian: SparseMatrix::zeros(0, 0),
        node_weights,
        edge_weights: edge_weights.clone(),
        tensor_weights: Vec::new(),
        cell_weights,
        tensor_layout: layout,
    };

    let mut tensor_weights = vec![0.0; nt];
    let mut sg = Triplets::with_capacity(nt, ne, 4 * nt);
    for j in 0..=ny {
        for i in 1..nx {
            let r = ops.xx_index(i, j);
            tensor_weights[r] = area * half_at_ends(j, ny);
            sg.push(r, g.xedge(i, j), ihx);
            sg.push(r, g.xedge(i - 1, j), -ihx);
        }
    }
    for j in 1..ny {
        for i in 0..=nx {
            let r = ops.yy_index(i, j);
            tensor_weights[r] = area * half_at_ends(i, nx);
            sg.push(r, g.yedge(i, j), ihy);
            sg.push(r, g.yedge(i, j - 1), -ihy);
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            let r = ops.xy_index(i, j);
            // double weight: the off-diagonal entry appears twice in ε:σ
            tensor_weights[r] = 2.0 * area;
            sg.push(r, g.xedge(i, j + 1), 0.5 * ihy);
            sg.push(r, g.xedge(i, j), -0.5 * ihy);
            sg.push(r, g.yedge(i + 1, j), 0.5 * ihx);
            sg.push(r, g.yedge(i, j), -0.5 * ihx);
        }
    }
    let edge_boundary: Vec<bool> = (0..ne).map(|e| g.is_boundary_edge(e)).collect();
    ops.symgrad = SbpPair::by_construction(sg.build(), edge_weights, tensor_weights.clone(), edge_boundary)?;
    ops.tensor_weights = tensor_weights;
    ops.div = ops.grad.adjoint_interior.scale(-1.0);
    ops.curl2d = ops.gradperp.adjoint_interior.clone();
    ops.tensdiv = ops.symgrad.adjoint_interior.scale(-1.0);
    ops.laplacian = ops.div.matmul(&ops.grad.forward);
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phcore::random_probes;

    #[test]
    fn gradient_1d_identity_on_random_pairs() {
        let g = Grid1D::new(-0.5, 1.5, 37).unwrap();
        let p = sbp_gradient_1d(&g).unwrap();
        let us = random_probes(g.n_nodes(), 100, 1);
        let vs = random_probes(g.n_cells, 100, 2);
        for (u, v) in us.iter().zip(&vs) {
            assert!(p.identity_residual(u, v) <= 1e-14);
        }
    }

    #[test]
    fn boundary_lift_picks_end_values() {
        let g = Grid1D::unit(4).unwrap();
        let p = sbp_gradient_1d(&g).unwrap();
        let sigma = [1.0, 2.0, 3.0, 4.0];
        let l = p.boundary_lift.matvec(&sigma);
        assert_eq!(l, vec![-1.0, 0.0, 0.0, 0.0, 4.0]);
        let a = p.adjoint_interior.matvec(&sigma);
        assert!((a[2] - (2.0 - 3.0) / g.h()).abs() < 1e-12);
    }

    #[test]
    fn gradperp_of_x_is_minus_one_zero() {
        let g = StaggeredGrid2D::new(4, 3, 1.0, 0.75).unwrap();
        let ops = sbp_operators_2d(&g).unwrap();
        let a: Vec<f64> = (0..g.n_nodes()).map(|k| g.node_xy(k).0).collect();
        let b = ops.gradperp.forward.matvec(&a);
        for (e, v) in b.iter().enumerate() {
            let expect = if e < g.n_xedges() { -1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn flux_divergence_of_gradperp_vanishes_exactly() {
        let g = StaggeredGrid2D::new(5, 7, 1.3, 0.7).unwrap();
        let ops = sbp_operators_2d(&g).unwrap();
        assert_eq!(ops.flux_div.matmul(&ops.gradperp.forward).max_abs(), 0.0);
    }

    #[test]
    fn symgrad_of_gradient_is_discrete_hessian() {
        let g = StaggeredGrid2D::unit_square(6).unwrap();
        let ops = sbp_operators_2d(&g).unwrap();
        let w: Vec<f64> = (0..g.n_nodes()).map(|k| {
            let (x, y) = g.node_xy(k);
            x * x + 3.0 * x * y - y * y
        }).collect();
        let hess = ops.symgrad.forward.matvec(&ops.grad.forward.matvec(&w));
        assert!((hess[ops.xx_index(2, 3)] - 2.0).abs() < 1e-10);
        assert!((hess[ops.yy_index(4, 1)] + 2.0).abs() < 1e-10);
        assert!((hess[ops.xy_index(1, 1)] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn laplacian_of_quadratic() {
        let g = StaggeredGrid2D::unit_square(5).unwrap();
        let ops = sbp_operators_2d(&g).unwrap();
        let u: Vec<f64> = (0..g.n_nodes()).map(|k| {
            let (x, y) = g.node_xy(k);
            x * x + y * y
        }).collect();
        let l = ops.laplacian.matvec(&u);
        for k in g.interior_nodes() {
            assert!((l[k] - 4.0).abs() < 1e-9);
        }
        for k in g.boundary_nodes() {
            assert_eq!(l[k], 0.0);
        }
    }
}
