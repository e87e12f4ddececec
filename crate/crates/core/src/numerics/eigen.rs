//! Inverse power iteration for the smallest eigenpair of `K v = λ M v`.

use super::banded::SparseLu;
use super::sparse::SparseMatrix;
use super::NumericsError;

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// `K` and `M` symmetric with `M` positive-definite. Converges to the
/// eigenvalue closest to `shift`.
pub fn inverse_power_iteration(
    k: &SparseMatrix,
    m: &SparseMatrix,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair, NumericsError> {
    let n = k.nrows();
    if k.shape() != (n, n) || m.shape() != (n, n) {
        return Err(NumericsError::DimensionMismatch("eigenproblem matrices".into()));
    }
    let lu = SparseLu::factor(&k.lin_comb(1.0, m, -shift))?;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64).collect();
    normalize(&mut v, m);
    let mut lambda = rayleigh(k, m, &v);
    for it in 1..=max_iter {
        let (mut w, _, _) = lu.solve(&m.matvec(&v));
        normalize(&mut w, m);
        let next = rayleigh(k, m, &w);
        v = w;
        if (next - lambda).abs() <= tol * next.abs().max(1e-300) {
            return Ok(EigenPair { value: next, vector: v, iterations: it });
        }
        lambda = next;
    }
    Err(NumericsError::SolverBreakdown(format!("inverse iteration did not converge in {max_iter} steps")))
}

fn rayleigh(k: &SparseMatrix, m: &SparseMatrix, v: &[f64]) -> f64 {
    k.quad_form(v) / m.quad_form(v)
}

fn normalize(v: &mut [f64], m: &SparseMatrix) {
    let s = m.quad_form(v).sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let k = SparseMatrix::from_diag(&[4.0, 9.0, 1.0]);
        let m = SparseMatrix::from_diag(&[1.0, 1.0, 2.0]);
        let e = inverse_power_iteration(&k, &m, 0.0, 1e-14, 500).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
    }
}
