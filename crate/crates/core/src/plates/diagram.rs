use super::{build_kl_reduced, build_kl_sd, build_kl_sl, build_rm_sd, build_rm_sl, PlateBoundary, PlateDiscretization, PlateMaterial};
use crate::discrete_ops::StaggeredGrid2D;
use crate::error::Result;
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{random_probes, transposition_check, TranspositionReport, PROBE_SEED, TRANSPOSITION_TOL};

/// Closure of the square formed by transposing and constraining.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramReport {
    pub rm: TranspositionReport,
    pub kl: TranspositionReport,
    /// `C_SD G` against `C_SL` after canonical row ordering.
    pub constraint_closure: f64,
    /// Reduced energy against `Pᵀ Q_SL P` with `P y = (w, p_w, grad w, 0)`.
    pub reduction_defect: f64,
    pub pass: bool,
}

impl DiagramReport {
    pub fn max_defect(&self) -> f64 {
        self.rm.max_defect().max(self.kl.max_defect()).max(self.constraint_closure).max(self.reduction_defect)
    }
}

fn lift_matrix(disc: &PlateDiscretization) -> SparseMatrix {
    let (nn, ne) = (disc.n_nodes(), disc.n_edges());
    let mut t = Triplets::new(2 * nn + 2 * ne, 2 * nn);
    for k in 0..2 * nn {
        t.push(k, k, 1.0);
    }
    t.push_block(2 * nn, 0, &disc.grad, 1.0);
    t.build()
}

pub fn plate_diagram_check(grid: &StaggeredGrid2D, mat: &PlateMaterial, bc: PlateBoundary) -> Result<DiagramReport> {
    let disc = PlateDiscretization::new(grid, bc)?;
    let (g, gdag) = disc.transposition()?;
    let (rm_sd, rm_sl) = (build_rm_sd(grid, mat, bc)?, build_rm_sl(grid, mat, bc)?);
    let (kl_sd, kl_sl) = (build_kl_sd(grid, mat, bc)?, build_kl_sl(grid, mat, bc)?);
    let samples = random_probes(rm_sl.dim(), 10, PROBE_SEED);
    let rm = transposition_check(&g, &gdag, &rm_sd, &rm_sl, &samples)?;
    let kl = transposition_check(&g, &gdag, &kl_sd, &kl_sl, &samples)?;

    let pulled = disc.kl_sd_constraint().matmul(&g).canonical_row_order();
    let own = disc.kl_sl_constraint()?.canonical_row_order();
    let constraint_closure = if pulled.shape() == own.shape() { pulled.max_abs_diff(&own) } else { f64::INFINITY };

    let p = lift_matrix(&disc);
    let projected = p.transpose().matmul(&kl_sl.q).matmul(&p);
    let reduced = build_kl_reduced(grid, mat, bc)?;
    let reduction_defect = projected.max_abs_diff(&reduced.q) / reduced.q.max_abs().max(1.0);

    let mut report = DiagramReport { rm, kl, constraint_closure, reduction_defect, pass: false };
    report.pass = report.rm.pass && report.kl.pass && constraint_closure == 0.0 && reduction_defect <= TRANSPOSITION_TOL;
    Ok(report)
}
