//! Low-frequency approximation: the displacement current is dropped by
//! holding `D = 0`, so the `D` row becomes the algebraic relation
//! `0 = curl H - σ E - J_u` and `E` is the multiplier of the constraint.

use super::{build_te_sd, build_te_sl, maxwell_transposition, EmMaterial};
use crate::discrete_ops::StaggeredGrid2D;
use crate::error::{Error, Result};
use crate::numerics::Triplets;
use crate::phcore::{random_probes, transposition_check, DescriptorPHSystem, Representation, TranspositionReport, PROBE_SEED};

/// Adds `C z = D = 0` to a TE system.
///
/// Where `σ = 0` the electric field is left undetermined, so every node must
/// conduct.
pub fn lf_project(sys: &DescriptorPHSystem, repr: Representation) -> Result<DescriptorPHSystem> {
    let other = match repr {
        Representation::StokesDirac => "B",
        Representation::StokesLagrange => "A",
    };
    let (d, _) = match (sys.block("D"), sys.block(other)) {
        (Some(d), Some(o)) => (d, o),
        _ => return Err(Error::InvalidParameter(format!("{} is not a {repr:?} TE system", sys.name))),
    };
    if sys.constraint.is_some() {
        return Err(Error::InvalidParameter(format!("{} is already constrained", sys.name)));
    }
    let insulating = d.clone().filter(|&k| !(sys.r.get(k, k) > 0.0)).count();
    if insulating > 0 {
        return Err(Error::RankDeficientConstraint(format!(
            "electric field undetermined at {insulating} of {} nodes with zero conductivity",
            d.len()
        )));
    }
    let mut c = Triplets::new(d.len(), sys.dim());
    for (r, k) in d.enumerate() {
        c.push(r, k, 1.0);
    }
    let mut out = sys.clone().with_constraint(c.build())?;
    out.name = sys.name.replace("_te_", "_lf_");
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellDiagramReport {
    pub te: TranspositionReport,
    pub lf: TranspositionReport,
    /// `C_SD G` against `C_SL` after canonical row ordering.
    pub constraint_closure: f64,
    pub pass: bool,
}

/// Transposes the full and the low-frequency pairs and compares projecting
/// after transposing with transposing after projecting.
pub fn maxwell_diagram_check(grid: &StaggeredGrid2D, mat: &EmMaterial) -> Result<MaxwellDiagramReport> {
    let (sd, sl) = (build_te_sd(grid, mat)?, build_te_sl(grid, mat)?);
    let (lf_sd, lf_sl) = (lf_project(&sd, Representation::StokesDirac)?, lf_project(&sl, Representation::StokesLagrange)?);
    let (g, gdag) = maxwell_transposition(grid)?;
    let samples = random_probes(sl.dim(), 10, PROBE_SEED);
    let te = transposition_check(&g, &gdag, &sd, &sl, &samples)?;
    let lf = transposition_check(&g, &gdag, &lf_sd, &lf_sl, &samples)?;
    let constraint_closure = lf.constraint_defect.unwrap_or(f64::INFINITY);
    let pass = te.pass && lf.pass && constraint_closure == 0.0;
    Ok(MaxwellDiagramReport { te, lf, constraint_closure, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete_ops::Profile;
    use crate::numerics::{integrate, solve_linear, SparseMatrix};

    fn grid() -> StaggeredGrid2D {
        StaggeredGrid2D::new(6, 6, 1.0, 1.0).unwrap()
    }

    #[test]
    fn insulator_is_rejected() {
        let sd = build_te_sd(&grid(), &EmMaterial::default()).unwrap();
        assert!(matches!(lf_project(&sd, Representation::StokesDirac), Err(Error::RankDeficientConstraint(_))));
        let mat = EmMaterial { sigma: Profile::varying(|x, _| if x < 0.5 { 1.0 } else { 0.0 }), ..EmMaterial::default() };
        let sl = build_te_sl(&grid(), &mat).unwrap();
        assert!(lf_project(&sl, Representation::StokesLagrange).is_err());
    }

    #[test]
    fn diagram_closes() {
        let rep = maxwell_diagram_check(&grid(), &EmMaterial::conducting(2.0)).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn potential_form_is_a_diffusion() {
        let g = grid();
        let mat = EmMaterial::conducting(1.5);
        let sl = lf_project(&build_te_sl(&g, &mat).unwrap(), Representation::StokesLagrange).unwrap();
        assert_eq!(sl.name, "maxwell_lf_sl");
        let nn = g.n_nodes();
        let mut z = vec![0.0; nn];
        z.extend_from_slice(&super::super::te_initial_sl(&g)[nn..]);
        let dt = 0.01;
        let traj = integrate(&sl, &z, None, 0.1, dt, 1).unwrap();
        assert!(traj.hamiltonian.windows(2).all(|w| w[1] <= w[0] + 1e-15));

        // σ M_N Ȧ = -K A by the midpoint rule
        let k = sl.q.select(&(nn..2 * nn).collect::<Vec<_>>(), &(nn..2 * nn).collect::<Vec<_>>());
        let sm = SparseMatrix::from_diag(&sl.mass.diagonal()[..nn]).scale(1.5);
        let (lhs, rhs) = (sm.lin_comb(1.0, &k, 0.5 * dt), sm.lin_comb(1.0, &k, -0.5 * dt));
        let mut a = z[nn..].to_vec();
        for _ in 0..10 {
            a = solve_linear(&lhs, &rhs.matvec(&a)).unwrap().0;
        }
        let last = traj.last_state();
        let err = a.iter().zip(&last[nn..]).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err < 1e-12, "{err}");
        assert!(last[..nn].iter().all(|d| d.abs() < 1e-13));
    }

    #[test]
    fn zero_field_is_stationary() {
        let g = grid();
        let sd = lf_project(&build_te_sd(&g, &EmMaterial::conducting(1.0)).unwrap(), Representation::StokesDirac).unwrap();
        let traj = integrate(&sd, &vec![0.0; sd.dim()], None, 0.05, 0.01, 1).unwrap();
        assert!(traj.last_state().iter().all(|v| *v == 0.0));
    }
}
