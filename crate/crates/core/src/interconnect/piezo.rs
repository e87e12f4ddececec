//! A bar coupled to a 1D electromagnetic field through a distributed
//! piezoelectric term `∫ q D ε` in the energy.
//!
//! States `(ε, p, D, B)`: strain and displacement field on elements, momentum
//! and magnetic field on nodes. Both halves use the structure of the 1D wave
//! in strain form; the coupling only enters `Q`, so the efforts read
//! `σ = kε + qD` and `E = D/ε₀ + qε`.

use super::CoupledSystem;
use crate::discrete_ops::{difference_1d, Grid1D, Profile};
use crate::error::{Error, Result};
use crate::maxwell2d::EmMaterial;
use crate::numerics::quadrature::gauss_legendre_unit;
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{DescriptorPHSystem, PortKind};
use crate::wave1d::{element_modulus, gaussian_pulse, momentum_blocks, MassMode, WaveMaterial};

fn element_means(grid: &Grid1D, f: &Profile) -> Vec<f64> {
    let (t, w) = gauss_legendre_unit(3);
    (0..grid.n_cells)
        .map(|e| {
            let x0 = grid.node(e);
            (0..3).map(|q| w[q] * f.at(x0 + t[q] * grid.h(), 0.0)).sum()
        })
        .collect()
}

/// Coupled bar and field. The two end tractions of the bar are the inputs;
/// the field is closed. `H` stays positive only while `q² < k/ε₀` on every
/// element.
pub fn couple_piezo(grid: &Grid1D, wave: &WaveMaterial, em: &EmMaterial, q: &Profile) -> Result<CoupledSystem> {
    em.validate()?;
    if wave.mu != 0.0 {
        return Err(Error::InvalidParameter("the piezo bar uses the local law".into()));
    }
    let (ne, nn) = (grid.n_cells, grid.n_nodes());
    let h = grid.h();
    let k = element_modulus(grid, wave)?;
    let qe = element_means(grid, q);
    let sigma = element_means(grid, &em.sigma);
    for e in 0..ne {
        if qe[e] < 0.0 || sigma[e] < 0.0 {
            return Err(Error::NonPositiveCoefficient(format!("coupling {} or conductivity {} on element {e}", qe[e], sigma[e])));
        }
        if qe[e] * qe[e] * em.eps0 >= k[e] {
            return Err(Error::InvalidParameter(format!(
                "coupling {} on element {e} makes the energy indefinite (needs q² < k/ε₀ = {})",
                qe[e],
                k[e] / em.eps0
            )));
        }
    }
    let (mp, qp) = momentum_blocks(grid, wave, MassMode::Lumped)?;
    let ml = mp.diagonal();
    let sizes = [ne, nn, ne, nn];
    let (p0, d0, b0) = (ne, ne + nn, 2 * ne + nn);
    let dim = 2 * (ne + nn);

    let hd = difference_1d(grid).scale(h);
    let hdt = hd.transpose().scale(-1.0);
    let j = SparseMatrix::from_blocks(&sizes, &sizes, &[(0, 1, &hd), (1, 0, &hdt), (2, 3, &hd), (3, 2, &hdt)])?.skew_part();

    let mut qt = Triplets::new(dim, dim);
    for e in 0..ne {
        qt.push(e, e, h * k[e]);
        qt.push(e, d0 + e, h * qe[e]);
        qt.push(d0 + e, e, h * qe[e]);
        qt.push(d0 + e, d0 + e, h / em.eps0);
    }
    qt.push_block(p0, p0, &qp, 1.0);
    for (i, m) in ml.iter().enumerate() {
        qt.push(b0 + i, b0 + i, m / em.mu0);
    }
    let mut r = Triplets::new(dim, dim);
    for (e, s) in sigma.iter().enumerate() {
        r.push(d0 + e, d0 + e, h * s);
    }
    let e_mass = vec![h; ne];
    let mass = SparseMatrix::from_diag(&[e_mass.as_slice(), &ml, &e_mass, &ml].concat());
    let b = SparseMatrix::from_triplets(dim, 2, &[(p0, 0, 1.0), (p0 + nn - 1, 1, 1.0)]);
    let sys = DescriptorPHSystem::new("piezo", mass, j, r.build(), qt.build().sym_part())?
        .with_inputs(b, vec![PortKind::Power; 2])?
        .with_blocks(&[("eps", ne), ("p", nn), ("D", ne), ("B", nn)])?;
    Ok(CoupledSystem::new(sys, ne + nn))
}

/// Strain pulse at rest, uniform electric displacement, magnetic bump.
pub fn piezo_initial(grid: &Grid1D) -> Vec<f64> {
    let len = grid.b - grid.a;
    let mid = grid.midpoints();
    let pulse: Vec<f64> = mid.iter().map(|x| (-((x - grid.a - 0.3 * len) / (0.1 * len)).powi(2)).exp()).collect();
    let mut z = pulse;
    z.extend(vec![0.0; grid.n_nodes()]);
    z.extend(vec![0.05; grid.n_cells]);
    z.extend(gaussian_pulse(grid, grid.a + 0.7 * len, 0.1 * len).iter().map(|v| 0.1 * v));
    z
}

/// Symmetric per-point pattern of the bar's constitutive relation with the
/// coupling as an energy port `(ε, p, χ)`: `[[k, 0, 1], [0, 1/ρ, 0], [1, 0, 0]]`.
pub fn piezo_constitutive_pattern(k: f64, rho: f64) -> [[f64; 3]; 3] {
    [[k, 0.0, 1.0], [0.0, 1.0 / rho, 0.0], [1.0, 0.0, 0.0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use crate::phcore::check_structure;

    fn setup(q: f64) -> (Grid1D, CoupledSystem) {
        let g = Grid1D::unit(40).unwrap();
        let c = couple_piezo(&g, &WaveMaterial::uniform(1.0, 1.0), &EmMaterial::default(), &q.into()).unwrap();
        (g, c)
    }

    #[test]
    fn uncoupled_halves_are_separately_conserved() {
        let (g, c) = setup(0.0);
        assert!(c.separability.is_separable);
        let traj = integrate(&c.system, &piezo_initial(&g), None, 0.5, 1e-3, 50).unwrap();
        let (w0, e0) = c.partial_energies(&traj.states[0]);
        for z in &traj.states {
            let (w, e) = c.partial_energies(z);
            assert!((w - w0).abs() < 1e-12 * w0 && (e - e0).abs() < 1e-12 * e0);
        }
    }

    #[test]
    fn coupling_exchanges_energy() {
        let (g, c) = setup(0.1);
        assert!(!c.separability.is_separable);
        assert_eq!(c.system.q.symmetry_defect(), 0.0);
        assert!(check_structure(&c.system).pass);
        let traj = integrate(&c.system, &piezo_initial(&g), None, 1.0, 1e-3, 10).unwrap();
        assert!(traj.max_relative_energy_drift() < 1e-9);
        let (w0, _) = c.partial_energies(&traj.states[0]);
        let swing = traj.states.iter().map(|z| (c.partial_energies(z).0 - w0).abs()).fold(0.0, f64::max);
        assert!(swing > 1e-4 * w0, "{swing}");

        let (ne, nn) = (g.n_cells, g.n_nodes());
        for z in &traj.states {
            let e = c.system.effort(z).unwrap();
            for el in 0..ne {
                let (eps, d) = (z[el], z[ne + nn + el]);
                assert!((e[el] - eps - 0.1 * d).abs() < 1e-12);
                assert!((e[ne + nn + el] - d - 0.1 * eps).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_coupling_is_rejected() {
        let g = Grid1D::unit(4).unwrap();
        let r = couple_piezo(&g, &WaveMaterial::uniform(1.0, 1.0), &EmMaterial::default(), &1.5.into());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn constitutive_pattern_is_symmetric() {
        let p = piezo_constitutive_pattern(2.0, 0.5);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p[i][j], p[j][i]);
            }
        }
    }
}
