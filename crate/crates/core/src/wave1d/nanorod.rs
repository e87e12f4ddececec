//! Stress of a nonlocal rod from a nodal strain field, either through the
//! exponential kernel (dense) or through `(1 - μ∂ₓₓ)σ = Eε` (sparse).

use super::WaveMaterial;
use crate::discrete_ops::{apply_dirichlet, assemble_kernel_matrix, assemble_p1_mass, assemble_p1_stiffness, Grid1D};
use crate::error::{Error, Result};
use crate::numerics::{solve_linear, DenseMatrix, LinearSolveReport, SparseMatrix};

/// `(M + K^μ) σ = K^E ε` with σ prescribed at both ends.
#[derive(Clone, Debug)]
pub struct ImplicitNanorod {
    pub grid: Grid1D,
    /// `M + K^μ`
    pub operator: SparseMatrix,
    /// `K^E`
    pub load: SparseMatrix,
}

impl ImplicitNanorod {
    pub fn assemble(grid: &Grid1D, mat: &WaveMaterial) -> Result<Self> {
        mat.require_nonlocal()?;
        let m = assemble_p1_mass(grid, &|_| 1.0, false)?;
        let mu = mat.mu;
        let k_mu = assemble_p1_stiffness(grid, &|_| mu)?;
        let e = mat.e.clone();
        let load = assemble_p1_mass(grid, &move |x| e.at(x, 0.0), false)?;
        Ok(Self { grid: grid.clone(), operator: m.add(&k_mu), load })
    }

    pub fn nnz(&self) -> usize {
        self.operator.nnz()
    }

    pub fn solve(&self, eps: &[f64], bc: [f64; 2]) -> Result<(Vec<f64>, LinearSolveReport)> {
        let n = self.grid.n_nodes();
        if eps.len() != n {
            return Err(Error::DimensionMismatch(format!("strain has {} entries, grid has {n} nodes", eps.len())));
        }
        let rhs = self.load.matvec(eps);
        let (a, rhs) = apply_dirichlet(&self.operator, &rhs, &[0, n - 1], &bc)?;
        Ok(solve_linear(&a, &rhs)?)
    }
}

/// `M σ = K^α ε` with the dense kernel matrix.
#[derive(Clone, Debug)]
pub struct ExplicitNanorod {
    pub mass: SparseMatrix,
    pub kernel: DenseMatrix,
}

impl ExplicitNanorod {
    pub fn assemble(grid: &Grid1D, mat: &WaveMaterial) -> Result<Self> {
        mat.require_nonlocal()?;
        let e = mat
            .e
            .constant()
            .ok_or_else(|| Error::InvalidParameter("the kernel formulation needs a uniform modulus".into()))?;
        let kernel = assemble_kernel_matrix(grid, mat.mu, e)?;
        Ok(Self { mass: assemble_p1_mass(grid, &|_| 1.0, false)?, kernel })
    }

    pub fn nnz(&self) -> usize {
        self.kernel.nrows() * self.kernel.ncols()
    }

    pub fn solve(&self, eps: &[f64]) -> Result<(Vec<f64>, LinearSolveReport)> {
        if eps.len() != self.kernel.ncols() {
            return Err(Error::DimensionMismatch("strain length".into()));
        }
        Ok(solve_linear(&self.mass, &self.kernel.matvec(eps))?)
    }
}

/// Implicit solve with boundary stresses `bc = (σ(a), σ(b))`.
pub fn solve_sigma_implicit(grid: &Grid1D, mat: &WaveMaterial, eps: &[f64], bc: [f64; 2]) -> Result<(Vec<f64>, LinearSolveReport)> {
    ImplicitNanorod::assemble(grid, mat)?.solve(eps, bc)
}

pub fn solve_sigma_explicit(grid: &Grid1D, mat: &WaveMaterial, eps: &[f64]) -> Result<(Vec<f64>, LinearSolveReport)> {
    let rod = ExplicitNanorod::assemble(grid, mat)?;
    let d = rod.kernel.symmetry_defect();
    if d > 1e-12 * rod.kernel.max_abs() {
        return Err(Error::QuadratureFailure(format!("kernel symmetry defect {d:.3e}")));
    }
    rod.solve(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_strain_gives_zero_stress() {
        let g = Grid1D::unit(16).unwrap();
        let (s, _) = solve_sigma_explicit(&g, &WaveMaterial::nonlocal(1.0, 1e-3), &vec![0.0; 17]).unwrap();
        assert!(s.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_strain_interior() {
        let g = Grid1D::unit(200).unwrap();
        let mat = WaveMaterial::nonlocal(3.0, 1e-5);
        let (s, _) = solve_sigma_implicit(&g, &mat, &vec![2.0; 201], [6.0, 6.0]).unwrap();
        assert!(s.iter().all(|v| (v - 6.0).abs() < 1e-10));
    }

    #[test]
    fn local_model_is_rejected() {
        let g = Grid1D::unit(4).unwrap();
        assert!(matches!(solve_sigma_implicit(&g, &WaveMaterial::uniform(1.0, 1.0), &[0.0; 5], [0.0; 2]), Err(Error::NonPositiveCoefficient(_))));
    }
}
