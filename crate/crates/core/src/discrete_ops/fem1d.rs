//! P1 finite elements on a uniform 1D grid, including the dense matrix of
//! the exponential convolution kernel.

use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_legendre_unit;
use crate::numerics::{DenseMatrix, SparseMatrix, Triplets};

fn element_quadrature(grid: &Grid1D, e: usize) -> impl Iterator<Item = (f64, f64, [f64; 2])> + '_ {
    let (t, w) = gauss_legendre_unit(3);
    let (x0, h) = (grid.node(e), grid.h());
    (0..3).map(move |q| (x0 + t[q] * h, w[q] * h, [1.0 - t[q], t[q]]))
}

fn positive(c: f64, x: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveCoefficient(format!("coefficient {c} at x = {x}")))
    }
}

/// `∫ c φᵢ φⱼ`, or its row sums when `lumped`.
pub fn assemble_p1_mass(grid: &Grid1D, coeff: &dyn Fn(f64) -> f64, lumped: bool) -> Result<SparseMatrix> {
    let n = grid.n_nodes();
    let mut t = Triplets::with_capacity(n, n, 4 * grid.n_cells);
    for e in 0..grid.n_cells {
        let mut local = [[0.0; 2]; 2];
        for (x, w, phi) in element_quadrature(grid, e) {
            let c = coeff(x);
            positive(c, x)?;
            for a in 0..2 {
                for b in 0..2 {
                    local[a][b] += w * c * phi[a] * phi[b];
                }
            }
        }
        for a in 0..2 {
            if lumped {
                t.push(e + a, e + a, local[a][0] + local[a][1]);
            } else {
                for b in 0..2 {
                    t.push(e + a, e + b, local[a][b]);
                }
            }
        }
    }
    Ok(t.build())
}

/// `∫ c φᵢ' φⱼ'`
pub fn assemble_p1_stiffness(grid: &Grid1D, coeff: &dyn Fn(f64) -> f64) -> Result<SparseMatrix> {
    let n = grid.n_nodes();
    let h = grid.h();
    let mut t = Triplets::with_capacity(n, n, 4 * grid.n_cells);
    for e in 0..grid.n_cells {
        let mut k = 0.0;
        for (x, w, _) in element_quadrature(grid, e) {
            let c = coeff(x);
            positive(c, x)?;
            k += w * c / (h * h);
        }
        t.push(e, e, k);
        t.push(e + 1, e + 1, k);
        t.push(e, e + 1, -k);
        t.push(e + 1, e, -k);
    }
    Ok(t.build())
}

/// Green's function of `1 - μ ∂ₓₓ` on the line: `e^{-|x|/√μ} / (2√μ)`.
pub fn kernel_alpha(x: f64, mu: f64) -> f64 {
    let s = mu.sqrt();
    (-x.abs() / s).exp() / (2.0 * s)
}

/// Largest dense dimension accepted before refusing the allocation.
pub const MAX_DENSE_DIM: usize = 16_384;

/// Dense `K[i,j] = ∬ α(|x - x'|) φᵢ(x) E φⱼ(x') dx dx'`.
///
/// Each element is split into `ceil(h/√μ)` subcells carrying a 4-point
/// Gauss rule, so the kernel is resolved when it decays within one element.
/// On subcells that meet the diagonal `x = x'` the square is split into its
/// two triangles, where the integrand is smooth, and each triangle gets an
/// iterated 4-point rule.
pub fn assemble_kernel_matrix(grid: &Grid1D, mu: f64, e_modulus: f64) -> Result<DenseMatrix> {
    if !(mu > 0.0) {
        return Err(Error::NonPositiveCoefficient(format!("nonlocal parameter μ = {mu}")));
    }
    positive(e_modulus, grid.a)?;
    let n = grid.n_nodes();
    if n > MAX_DENSE_DIM {
        return Err(Error::OutOfMemory { bytes: n.saturating_mul(n).saturating_mul(8) });
    }
    let mut k = DenseMatrix::try_zeros(n, n).map_err(|_| Error::OutOfMemory { bytes: n * n * 8 })?;
    let h = grid.h();
    let s = mu.sqrt();
    let m = ((h / s).ceil() as usize).max(1);
    let hs = h / m as f64;
    let (gt, gw) = gauss_legendre_unit(4);

    // Gauss points of one element relative to its left node.
    let mut xi = Vec::with_capacity(4 * m);
    let mut wi = Vec::with_capacity(4 * m);
    for c in 0..m {
        for q in 0..4 {
            xi.push((c as f64 + gt[q]) * hs);
            wi.push(gw[q] * hs);
        }
    }
    let phi = |x: f64| [1.0 - x / h, x / h];
    let pw: Vec<[f64; 2]> = xi.iter().zip(&wi).map(|(&x, &w)| {
        let p = phi(x);
        [w * p[0], w * p[1]]
    }).collect();
    let inv2s = 1.0 / (2.0 * s);

    let mut local_diag = [[0.0; 2]; 2];
    for c1 in 0..m {
        for c2 in 0..m {
            for p in 0..4 {
                let a = 4 * c1 + p;
                if c1 != c2 {
                    for q in 0..4 {
                        let b = 4 * c2 + q;
                        let kv = (-(xi[a] - xi[b]).abs() / s).exp() * inv2s;
                        for r in 0..2 {
                            for t in 0..2 {
                                local_diag[r][t] += kv * pw[a][r] * pw[b][t];
                            }
                        }
                    }
                    continue;
                }
                let (lo, hi) = (c1 as f64 * hs, (c1 + 1) as f64 * hs);
                let x = xi[a];
                for (l, r) in [(lo, x), (x, hi)] {
                    let len = r - l;
                    for q in 0..4 {
                        let xp = l + gt[q] * len;
                        let kv = (-(x - xp).abs() / s).exp() * inv2s;
                        let w = gw[q] * len;
                        let pp = phi(xp);
                        for rr in 0..2 {
                            for tt in 0..2 {
                                local_diag[rr][tt] += kv * pw[a][rr] * w * pp[tt];
                            }
                        }
                    }
                }
            }
        }
    }

    for e1 in 0..grid.n_cells {
        let x1 = grid.node(e1);
        for e2 in 0..grid.n_cells {
            let local = if e1 == e2 {
                local_diag
            } else {
                let d = x1 - grid.node(e2);
                let mut loc = [[0.0; 2]; 2];
                for a in 0..xi.len() {
                    let xa = d + xi[a];
                    for b in 0..xi.len() {
                        let kv = (-(xa - xi[b]).abs() / s).exp();
                        loc[0][0] += kv * pw[a][0] * pw[b][0];
                        loc[0][1] += kv * pw[a][0] * pw[b][1];
                        loc[1][0] += kv * pw[a][1] * pw[b][0];
                        loc[1][1] += kv * pw[a][1] * pw[b][1];
                    }
                }
                for row in loc.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= inv2s;
                    }
                }
                loc
            };
            for r in 0..2 {
                for t in 0..2 {
                    k[(e1 + r, e2 + t)] += e_modulus * local[r][t];
                }
            }
        }
    }

    let defect = k.symmetry_defect() / k.max_abs().max(f64::MIN_POSITIVE);
    if defect > 1e-10 {
        return Err(Error::QuadratureFailure(format!("kernel matrix symmetry defect {defect:.3e}")));
    }
    Ok(k)
}

/// Imposes `x[dofs[k]] = values[k]` by symmetric row and column elimination.
/// The returned system has unit rows on the constrained dofs.
pub fn apply_dirichlet(a: &SparseMatrix, b: &[f64], dofs: &[usize], values: &[f64]) -> Result<(SparseMatrix, Vec<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || dofs.len() != values.len() {
        return Err(Error::DimensionMismatch("Dirichlet elimination inputs".into()));
    }
    let mut fixed = vec![None; n];
    for (&d, &v) in dofs.iter().zip(values) {
        if d >= n {
            return Err(Error::DimensionMismatch(format!("Dirichlet dof {d} out of range")));
        }
        fixed[d] = Some(v);
    }
    let mut rhs = b.to_vec();
    let mut t = Triplets::with_capacity(n, n, a.nnz());
    for i in 0..n {
        if let Some(v) = fixed[i] {
            t.push(i, i, 1.0);
            rhs[i] = v;
            continue;
        }
        for (j, aij) in a.row(i) {
            match fixed[j] {
                Some(v) => rhs[i] -= aij * v,
                None => t.push(i, j, aij),
            }
        }
    }
    Ok((t.build(), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: f64) -> f64 {
        1.0
    }

    #[test]
    fn mass_rows() {
        let g = Grid1D::unit(4).unwrap();
        let m = assemble_p1_mass(&g, &one, false).unwrap();
        let h = g.h();
        assert!((m.get(2, 1) - h / 6.0).abs() < 1e-16);
        assert!((m.get(2, 2) - 4.0 * h / 6.0).abs() < 1e-16);
        let ml = assemble_p1_mass(&g, &one, true).unwrap();
        assert!(ml.is_diagonal());
        assert!((ml.get(0, 0) - h / 2.0).abs() < 1e-16 && (ml.get(2, 2) - h).abs() < 1e-16);
    }

    #[test]
    fn stiffness_rows() {
        let g = Grid1D::unit(4).unwrap();
        let k = assemble_p1_stiffness(&g, &|_| 3.0).unwrap();
        assert!((k.get(1, 1) - 2.0 * 3.0 / g.h()).abs() < 1e-12);
        assert!((k.get(1, 2) + 3.0 / g.h()).abs() < 1e-12);
    }

    #[test]
    fn negative_coefficient_is_rejected() {
        let g = Grid1D::unit(4).unwrap();
        assert!(matches!(assemble_p1_mass(&g, &|_| -1.0, true), Err(Error::NonPositiveCoefficient(_))));
    }

    #[test]
    fn dirichlet_elimination_matches_reduced_solve() {
        let g = Grid1D::unit(6).unwrap();
        let k = assemble_p1_stiffness(&g, &one).unwrap();
        let b = vec![1.0; 7];
        let (a, rhs) = apply_dirichlet(&k, &b, &[0, 6], &[0.5, -0.25]).unwrap();
        assert_eq!(a.symmetry_defect(), 0.0);
        let (x, _) = crate::numerics::solve_linear(&a, &rhs).unwrap();
        let int: Vec<usize> = (1..6).collect();
        let kr = k.select(&int, &int);
        let br: Vec<f64> = int.iter().map(|&i| b[i] - k.get(i, 0) * 0.5 - k.get(i, 6) * -0.25).collect();
        let (xr, _) = crate::numerics::solve_linear(&kr, &br).unwrap();
        for (r, &i) in int.iter().enumerate() {
            assert!((x[i] - xr[r]).abs() < 1e-13);
        }
        assert_eq!(x[0], 0.5);
    }
}
