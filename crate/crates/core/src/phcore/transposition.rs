//! Checks that two representations are related by a transposition map
//! `G : SL → SD` with M-weighted adjoint `G† = M_SL⁻¹ Gᵀ M_SD`.
//!
//! With `Ĵ = M⁻¹J`, the identities are `Ĵ_SD = G Ĵ_SL G†` (same for `R`),
//! `Q_SL = Gᵀ Q_SD G`, `G† e_SD(Gα) = e_SL(α)` and `C_SL = C_SD G` up to row
//! order. Together they make the midpoint maps commute with `G`.

use super::system::DescriptorPHSystem;
use crate::error::{Error, Result};
use crate::numerics::SparseMatrix;

pub const TRANSPOSITION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TranspositionReport {
    pub j_defect: f64,
    pub r_defect: f64,
    pub q_defect: f64,
    pub adjoint_defect: f64,
    pub input_defect: f64,
    pub constraint_defect: Option<f64>,
    pub effort_defect: f64,
    pub energy_defect: f64,
    pub pass: bool,
}

impl TranspositionReport {
    pub fn max_defect(&self) -> f64 {
        [
            self.j_defect,
            self.r_defect,
            self.q_defect,
            self.adjoint_defect,
            self.input_defect,
            self.constraint_defect.unwrap_or(0.0),
            self.effort_defect,
            self.energy_defect,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub(crate) fn diag_inverse(m: &SparseMatrix, what: &str) -> Result<Vec<f64>> {
    if !m.is_diagonal() {
        return Err(Error::DimensionMismatch(format!("{what}: transposition needs a diagonal pairing")));
    }
    Ok(m.diagonal().iter().map(|v| 1.0 / v).collect())
}

/// `M_SL⁻¹ Gᵀ M_SD`
pub fn m_weighted_adjoint(g: &SparseMatrix, m_sd: &SparseMatrix, m_sl: &SparseMatrix) -> Result<SparseMatrix> {
    let inv = diag_inverse(m_sl, "SL mass")?;
    Ok(g.transpose().matmul(m_sd).scale_rows(&inv))
}

fn rel(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

fn vec_rel(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / b.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

pub fn transposition_check(
    g: &SparseMatrix,
    gdag: &SparseMatrix,
    sd: &DescriptorPHSystem,
    sl: &DescriptorPHSystem,
    samples: &[Vec<f64>],
) -> Result<TranspositionReport> {
    let (nsd, nsl) = (sd.dim(), sl.dim());
    if g.shape() != (nsd, nsl) || gdag.shape() != (nsl, nsd) {
        return Err(Error::DimensionMismatch(format!(
            "G is {:?} and G† is {:?} for SD dim {nsd}, SL dim {nsl}",
            g.shape(),
            gdag.shape()
        )));
    }
    if sd.n_inputs() != sl.n_inputs() {
        return Err(Error::DimensionMismatch("input counts differ".into()));
    }
    let inv_sd = diag_inverse(&sd.mass, "SD mass")?;
    let inv_sl = diag_inverse(&sl.mass, "SL mass")?;

    let hat = |m: &SparseMatrix, inv: &[f64]| m.scale_rows(inv);
    let pull = |x_sl: &SparseMatrix| g.matmul(x_sl).matmul(gdag);
    let j_defect = rel(&pull(&hat(&sl.j, &inv_sl)), &hat(&sd.j, &inv_sd));
    let r_defect = rel(&pull(&hat(&sl.r, &inv_sl)), &hat(&sd.r, &inv_sd));
    let q_defect = rel(&g.transpose().matmul(&sd.q).matmul(g), &sl.q);
    let adjoint_defect = rel(gdag, &m_weighted_adjoint(g, &sd.mass, &sl.mass)?);
    let input_defect = rel(&g.matmul(&hat(&sl.b, &inv_sl)), &hat(&sd.b, &inv_sd));
    let constraint_defect = match (&sd.constraint, &sl.constraint) {
        (None, None) => None,
        (Some(csd), Some(csl)) => {
            let pulled = csd.matmul(g).canonical_row_order();
            let own = csl.canonical_row_order();
            Some(if pulled.shape() != own.shape() { f64::INFINITY } else { pulled.max_abs_diff(&own) })
        }
        _ => Some(f64::INFINITY),
    };

    let mut effort_defect: f64 = 0.0;
    let mut energy_defect: f64 = 0.0;
    for a in samples {
        if a.len() != nsl {
            return Err(Error::DimensionMismatch("sample length".into()));
        }
        let a_sd = g.matvec(a);
        let e_sd: Vec<f64> = sd.q.matvec(&a_sd).iter().zip(&inv_sd).map(|(v, m)| v * m).collect();
        let e_sl: Vec<f64> = sl.q.matvec(a).iter().zip(&inv_sl).map(|(v, m)| v * m).collect();
        effort_defect = effort_defect.max(vec_rel(&gdag.matvec(&e_sd), &e_sl));
        let (h_sd, h_sl) = (sd.hamiltonian(&a_sd), sl.hamiltonian(a));
        energy_defect = energy_defect.max((h_sd - h_sl).abs() / h_sl.abs().max(1.0));
    }
    let mut report = TranspositionReport {
        j_defect,
        r_defect,
        q_defect,
        adjoint_defect,
        input_defect,
        constraint_defect,
        effort_defect,
        energy_defect,
        pass: false,
    };
    report.pass = report.max_defect() <= TRANSPOSITION_TOL;
    Ok(report)
}

/// `max_k ‖G α_SL[k] - α_SD[k]‖∞ / max(1, ‖α_SD[k]‖∞)`
pub fn intertwining_defect(g: &SparseMatrix, sl_states: &[Vec<f64>], sd_states: &[Vec<f64>]) -> Result<f64> {
    if sl_states.len() != sd_states.len() {
        return Err(Error::DimensionMismatch("trajectories have different lengths".into()));
    }
    Ok(sl_states.iter().zip(sd_states).map(|(a, b)| vec_rel(&g.matvec(a), b)).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_between_equal_systems() {
        let j = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, -1.0)]);
        let i = SparseMatrix::identity(2);
        let sys = DescriptorPHSystem::new("s", i.clone(), j, SparseMatrix::zeros(2, 2), i.clone()).unwrap();
        let rep = transposition_check(&i, &i, &sys, &sys, &[vec![1.0, 2.0]]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_defect(), 0.0);
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let i = SparseMatrix::identity(2);
        let sys = DescriptorPHSystem::new("s", i.clone(), SparseMatrix::zeros(2, 2), SparseMatrix::zeros(2, 2), i)
            .unwrap();
        let g = SparseMatrix::identity(3);
        assert!(matches!(transposition_check(&g, &g, &sys, &sys, &[]), Err(Error::DimensionMismatch(_))));
    }
}
