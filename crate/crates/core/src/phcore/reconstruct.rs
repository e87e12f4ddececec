use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_legendre_unit;

/// Relative change allowed when the quadrature order is doubled.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

fn path_integral(
    s_eval: &dyn Fn(&[f64]) -> Vec<f64>,
    dp_apply: &dyn Fn(&[f64], &[f64]) -> Vec<f64>,
    z: &[f64],
    n: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre_unit(n);
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let zt: Vec<f64> = z.iter().map(|v| t * v).collect();
        let s = s_eval(&zt);
        let dp = dp_apply(&zt, z);
        acc += w * s.iter().zip(&dp).map(|(a, b)| a * b).sum::<f64>();
    }
    acc
}

/// `H(z) = ∫₀¹ ⟨s(τz), δp[τz] z⟩ dτ` by `n_quad`-point Gauss-Legendre.
///
/// `s_eval` is the co-energy map and `dp_apply(x, v)` applies the
/// linearization of the Lagrange map at `x` to `v`. The rule is repeated
/// with `2 n_quad` points; a relative change above 1e-10 is reported as
/// [`Error::QuadratureOrderTooLow`].
pub fn reconstruct_hamiltonian(
    s_eval: &dyn Fn(&[f64]) -> Vec<f64>,
    dp_apply: &dyn Fn(&[f64], &[f64]) -> Vec<f64>,
    z: &[f64],
    n_quad: usize,
) -> Result<f64> {
    if n_quad == 0 {
        return Err(Error::QuadratureFailure("need at least one quadrature point".into()));
    }
    let h = path_integral(s_eval, dp_apply, z, n_quad);
    let h2 = path_integral(s_eval, dp_apply, z, 2 * n_quad);
    if (h - h2).abs() > RECONSTRUCTION_TOL * h2.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureOrderTooLow { n: n_quad, n2: 2 * n_quad, value_n: h, value_2n: h2 });
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_scalar() {
        let s = |x: &[f64]| vec![x[0].powi(3)];
        let dp = |_: &[f64], v: &[f64]| v.to_vec();
        let h = reconstruct_hamiltonian(&s, &dp, &[2.0], 8).unwrap();
        assert!((h - 4.0).abs() < 1e-12);
    }

    #[test]
    fn one_point_rule_is_flagged_for_cubic() {
        let s = |x: &[f64]| vec![x[0].powi(3)];
        let dp = |_: &[f64], v: &[f64]| v.to_vec();
        assert!(matches!(
            reconstruct_hamiltonian(&s, &dp, &[2.0], 1),
            Err(Error::QuadratureOrderTooLow { .. })
        ));
    }
}
