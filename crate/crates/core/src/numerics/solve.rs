//! Linear and saddle-point solves on top of [`SparseLu`].

use super::banded::SparseLu;
use super::sparse::{SparseMatrix, Triplets};
use super::NumericsError;

/// Diagnostics of a direct solve.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolveReport {
    pub dim: usize,
    /// Normwise relative residual `‖Ax - b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`.
    pub relative_residual: f64,
    pub refinement_steps: usize,
    pub bandwidth: (usize, usize),
}

pub const RESIDUAL_TOL: f64 = 1e-12;

fn check_residual(rel: f64) -> Result<(), NumericsError> {
    if rel.is_finite() && rel <= RESIDUAL_TOL {
        Ok(())
    } else {
        Err(NumericsError::SolverBreakdown(format!("relative residual {rel:.3e} exceeds {RESIDUAL_TOL:.0e}")))
    }
}

pub fn solve_linear(a: &SparseMatrix, b: &[f64]) -> Result<(Vec<f64>, LinearSolveReport), NumericsError> {
    if a.nrows() != b.len() {
        return Err(NumericsError::DimensionMismatch(format!(
            "matrix has {} rows, rhs has {}",
            a.nrows(),
            b.len()
        )));
    }
    let lu = SparseLu::factor(a)?;
    let (x, rel, steps) = lu.solve(b);
    check_residual(rel)?;
    Ok((x, LinearSolveReport { dim: a.nrows(), relative_residual: rel, refinement_steps: steps, bandwidth: lu.bandwidth() }))
}

/// Factored KKT matrix `[[A, Cᵀ], [C, 0]]`.
#[derive(Clone, Debug)]
pub struct SaddleFactor {
    n: usize,
    m: usize,
    lu: SparseLu,
}

impl SaddleFactor {
    pub fn factor(a: &SparseMatrix, c: &SparseMatrix) -> Result<Self, NumericsError> {
        let (n, m) = (a.nrows(), c.nrows());
        if a.ncols() != n || c.ncols() != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "saddle blocks: A is {}x{}, C is {}x{}",
                n,
                a.ncols(),
                m,
                c.ncols()
            )));
        }
        if m > n {
            return Err(NumericsError::RankDeficientConstraint(format!("{m} constraints on {n} unknowns")));
        }
        let mut t = Triplets::with_capacity(n + m, n + m, a.nnz() + 2 * c.nnz());
        t.push_block(0, 0, a, 1.0);
        t.push_block(0, n, &c.transpose(), 1.0);
        t.push_block(n, 0, c, 1.0);
        let kkt = t.build();
        let lu = SparseLu::factor(&kkt).map_err(|e| match e {
            NumericsError::SingularMatrix { index, pivot } => NumericsError::RankDeficientConstraint(format!(
                "KKT factorization broke down at unknown {index} (pivot {pivot:.3e})"
            )),
            other => other,
        })?;
        Ok(Self { n, m, lu })
    }

    pub fn solve(&self, b: &[f64], d: &[f64]) -> Result<(Vec<f64>, Vec<f64>, LinearSolveReport), NumericsError> {
        if b.len() != self.n || d.len() != self.m {
            return Err(NumericsError::DimensionMismatch("saddle right-hand side".into()));
        }
        let mut rhs = b.to_vec();
        rhs.extend_from_slice(d);
        let (mut x, rel, steps) = self.lu.solve(&rhs);
        check_residual(rel)?;
        let lambda = x.split_off(self.n);
        let report = LinearSolveReport {
            dim: self.n + self.m,
            relative_residual: rel,
            refinement_steps: steps,
            bandwidth: self.lu.bandwidth(),
        };
        Ok((x, lambda, report))
    }
}

/// Solves `A x + Cᵀ λ = b`, `C x = d`.
pub fn solve_saddle(
    a: &SparseMatrix,
    c: &SparseMatrix,
    b: &[f64],
    d: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, LinearSolveReport), NumericsError> {
    SaddleFactor::factor(a, c)?.solve(b, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let (x, rep) = solve_linear(&SparseMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        assert!(rep.relative_residual <= 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(solve_linear(&a, &[1.0, 1.0]), Err(NumericsError::SingularMatrix { .. })));
    }

    #[test]
    fn saddle_examples() {
        let a = SparseMatrix::identity(2);
        let c = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]);
        let (x, l, _) = solve_saddle(&a, &c, &[0.0, 0.0], &[1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1].abs() < 1e-15 && (l[0] + 1.0).abs() < 1e-15);

        // second row reads x₂ + λ = 1 with x₂ = 0
        let c = SparseMatrix::from_triplets(1, 2, &[(0, 1, 1.0)]);
        let (x, l, _) = solve_saddle(&a, &c, &[1.0, 1.0], &[0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1].abs() < 1e-15 && (l[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inactive_constraint_has_zero_multiplier() {
        let a = SparseMatrix::from_diag(&[2.0, 4.0]);
        let c = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]);
        let (x, l, _) = solve_saddle(&a, &c, &[2.0, 4.0], &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15 && l[0].abs() < 1e-15);
    }

    #[test]
    fn dirichlet_laplacian_matches_dense_elimination() {
        let n = 4;
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i, 2.0));
            if i + 1 < n {
                e.push((i, i + 1, -1.0));
                e.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &e);
        let (x, _) = solve_linear(&a, &[1.0; 4]).unwrap();
        // plain Gaussian elimination without pivoting on the dense copy
        let mut d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).chain([1.0]).collect()).collect();
        for k in 0..n {
            for i in k + 1..n {
                let f = d[i][k] / d[k][k];
                for j in k..=n {
                    d[i][j] -= f * d[k][j];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            y[i] = (d[i][n] - (i + 1..n).map(|j| d[i][j] * y[j]).sum::<f64>()) / d[i][i];
        }
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_constraints_are_rank_deficient() {
        let a = SparseMatrix::identity(2);
        let c = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0)]);
        assert!(matches!(
            solve_saddle(&a, &c, &[0.0, 0.0], &[1.0, 2.0]),
            Err(NumericsError::RankDeficientConstraint(_))
        ));
    }
}
