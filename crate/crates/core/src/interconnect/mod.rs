//! Coupling of systems through energy ports.
//!
//! Two systems with boundary traces `χ_A`, `χ_B` are stacked and a quadratic
//! potential `φ(χ) = ½ χᵀ W χ` of the selected traces is added to the
//! Hamiltonian, so `Q` gains `Γᵀ W Γ`. The energy ports on the coupled traces
//! are consumed by the coupling and disappear from the input list.

mod piezo;

pub use piezo::{couple_piezo, piezo_constitutive_pattern, piezo_initial};

use crate::error::{Error, Result};
use crate::numerics::{SparseMatrix, Triplets};
use crate::phcore::{random_probes, DescriptorPHSystem, PortKind, StateBlock};

/// Whether the stacked Hamiltonian splits across the two subsystems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeparabilityTag {
    pub is_separable: bool,
    /// Nonzeros of `Q` coupling the blocks `0..split` and `split..`.
    pub cross_block_nnz: usize,
}

impl SeparabilityTag {
    pub fn of(q: &SparseMatrix, split: usize) -> Self {
        let cross_block_nnz = q.triplets().filter(|&(i, j, v)| v != 0.0 && ((i < split) != (j < split))).count();
        Self { is_separable: cross_block_nnz == 0, cross_block_nnz }
    }
}

#[derive(Clone, Debug)]
pub struct CoupledSystem {
    pub system: DescriptorPHSystem,
    /// First state index of the second subsystem.
    pub split: usize,
    pub separability: SeparabilityTag,
}

impl CoupledSystem {
    fn new(system: DescriptorPHSystem, split: usize) -> Self {
        let separability = SeparabilityTag::of(&system.q, split);
        Self { system, split, separability }
    }

    /// Energies of the two subsystems without the coupling term.
    pub fn partial_energies(&self, z: &[f64]) -> (f64, f64) {
        let n = self.system.dim();
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..self.split).collect(), (self.split..n).collect());
        let qa = self.system.q.select(&a, &a);
        let qb = self.system.q.select(&b, &b);
        (0.5 * qa.quad_form(&z[..self.split]), 0.5 * qb.quad_form(&z[self.split..]))
    }
}

/// Trace rows of each subsystem that enter the coupling potential, in the
/// order of the potential's argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledTraces {
    pub a_rows: Vec<usize>,
    pub b_rows: Vec<usize>,
}

fn check_traces(sys: &DescriptorPHSystem, rows: &[usize]) -> Result<()> {
    if let Some(r) = rows.iter().find(|&&r| r >= sys.trace_gamma.nrows()) {
        return Err(Error::TraceUnavailable(format!("{} has no trace row {r}", sys.name)));
    }
    Ok(())
}

fn offset_blocks(blocks: &[StateBlock], prefix: &str, offset: usize) -> Vec<StateBlock> {
    blocks
        .iter()
        .map(|b| StateBlock { label: format!("{prefix}.{}", b.label), range: b.range.start + offset..b.range.end + offset })
        .collect()
}

/// Stacks two systems and adds `Γᵀ W Γ` to `Q`, where `Γ` stacks the chosen
/// trace rows. Ports on those rows are removed; the rest keep their kind.
fn stack_with_potential(
    a: &DescriptorPHSystem,
    b: &DescriptorPHSystem,
    traces: &CoupledTraces,
    w: &[Vec<f64>],
    name: &str,
) -> Result<(DescriptorPHSystem, Vec<Vec<f64>>)> {
    check_traces(a, &traces.a_rows)?;
    check_traces(b, &traces.b_rows)?;
    if a.constraint.is_some() || b.constraint.is_some() {
        return Err(Error::InvalidParameter("coupling of constrained systems".into()));
    }
    let (na, nb) = (a.dim(), b.dim());
    let n = na + nb;
    let nchi = traces.a_rows.len() + traces.b_rows.len();

    let mut gamma = Triplets::new(nchi, n);
    for (r, &row) in traces.a_rows.iter().enumerate() {
        for (c, v) in a.trace_gamma.row(row) {
            gamma.push(r, c, v);
        }
    }
    for (r, &row) in traces.b_rows.iter().enumerate() {
        for (c, v) in b.trace_gamma.row(row) {
            gamma.push(traces.a_rows.len() + r, na + c, v);
        }
    }
    let gamma = gamma.build();
    let mut wt = Triplets::new(nchi, nchi);
    for (i, row) in w.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                wt.push(i, j, v);
            }
        }
    }
    let coupling = gamma.transpose().matmul(&wt.build()).matmul(&gamma);
    let q = SparseMatrix::block_diag(&[&a.q, &b.q]).add(&coupling).sym_part();

    // Remaining ports and traces, renumbered.
    let mut trace_map = Vec::new();
    let mut g_out = Vec::new();
    let mut b_out = Vec::new();
    let mut n_traces = 0;
    for (sys, rows, off) in [(a, &traces.a_rows, 0), (b, &traces.b_rows, na)] {
        let mut map = vec![None; sys.trace_gamma.nrows()];
        for (r, slot) in map.iter_mut().enumerate() {
            if rows.contains(&r) {
                continue;
            }
            for (c, v) in sys.trace_gamma.row(r) {
                g_out.push((n_traces, off + c, v));
            }
            for (c, v) in sys.trace_beta.row(r) {
                b_out.push((n_traces, off + c, v));
            }
            *slot = Some(n_traces);
            n_traces += 1;
        }
        trace_map.push(map);
    }

    let mut cols = Vec::new();
    let mut ports = Vec::new();
    let mut consumed = Vec::new();
    let mut input_blocks: Vec<(String, usize)> = Vec::new();
    for (s, (sys, off, prefix)) in [(a, 0, "a"), (b, na, "b")].into_iter().enumerate() {
        let bt = sys.b.transpose();
        let mut kept = 0;
        for (c, kind) in sys.ports.iter().enumerate() {
            let column: Vec<(usize, f64)> = bt.row(c).map(|(i, v)| (off + i, v)).collect();
            let new_kind = match kind {
                PortKind::Power => Some(PortKind::Power),
                PortKind::Energy { trace_row } => trace_map[s][*trace_row].map(|t| PortKind::Energy { trace_row: t }),
            };
            match new_kind {
                Some(k) => {
                    let j = ports.len();
                    cols.extend(column.into_iter().map(|(i, v)| (i, j, v)));
                    ports.push(k);
                    kept += 1;
                }
                None => {
                    let mut dense = vec![0.0; n];
                    for (i, v) in column {
                        dense[i] = v;
                    }
                    consumed.push(dense);
                }
            }
        }
        input_blocks.push((prefix.to_string(), kept));
    }

    let mut blocks = offset_blocks(&a.blocks, "a", 0);
    blocks.extend(offset_blocks(&b.blocks, "b", na));
    let mut sys = DescriptorPHSystem::new(
        name,
        SparseMatrix::block_diag(&[&a.mass, &b.mass]),
        SparseMatrix::block_diag(&[&a.j, &b.j]),
        SparseMatrix::block_diag(&[&a.r, &b.r]),
        q,
    )?
    .with_traces(SparseMatrix::from_triplets(n_traces, n, &g_out), SparseMatrix::from_triplets(n_traces, n, &b_out))?
    .with_inputs(SparseMatrix::from_triplets(n, ports.len(), &cols), ports)?;
    let labels: Vec<(&str, usize)> = input_blocks.iter().map(|(l, k)| (l.as_str(), *k)).collect();
    sys = sys.with_input_blocks(&labels)?;
    sys.blocks = blocks;
    Ok((sys, consumed))
}

const AFFINITY_TOL: f64 = 1e-9;

/// Recovers `W` from a potential gradient and checks that the gradient is
/// linear and symmetric.
fn quadratic_form_of(grad: &dyn Fn(&[f64]) -> Vec<f64>, dim: usize) -> Result<Vec<Vec<f64>>> {
    let zero = grad(&vec![0.0; dim]);
    if zero.len() != dim {
        return Err(Error::DimensionMismatch(format!("potential gradient has {} entries, expected {dim}", zero.len())));
    }
    let scale = |v: &[f64]| v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if zero.iter().any(|v| v.abs() > AFFINITY_TOL) {
        return Err(Error::NonQuadraticPotential("gradient does not vanish at zero trace".into()));
    }
    let mut w = vec![vec![0.0; dim]; dim];
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        for (i, v) in grad(&e).into_iter().enumerate() {
            w[i][j] = v;
        }
    }
    let wscale = w.iter().map(|r| scale(r)).fold(1.0, f64::max);
    for i in 0..dim {
        for j in 0..i {
            if (w[i][j] - w[j][i]).abs() > AFFINITY_TOL * wscale {
                return Err(Error::NonQuadraticPotential("gradient Jacobian is not symmetric".into()));
            }
        }
    }
    for probe in random_probes(dim, 8, 0xC0DE) {
        for amp in [1e-3, 1.0, 1e3] {
            let x: Vec<f64> = probe.iter().map(|v| amp * v).collect();
            let g = grad(&x);
            let lin: Vec<f64> = w.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
            let err = g.iter().zip(&lin).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if err > AFFINITY_TOL * scale(&lin).max(amp * wscale) {
                return Err(Error::NonQuadraticPotential(format!("gradient is not linear (defect {err:.3e} at scale {amp})")));
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let s = 0.5 * (w[i][j] + w[j][i]);
            w[i][j] = s;
            w[j][i] = s;
        }
    }
    Ok(w)
}

/// Couples through a potential of the selected traces, given by its gradient.
/// Only quadratic potentials are representable.
pub fn couple_potential(
    a: &DescriptorPHSystem,
    b: &DescriptorPHSystem,
    traces: &CoupledTraces,
    grad_potential: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Result<CoupledSystem> {
    let w = quadratic_form_of(grad_potential, traces.a_rows.len() + traces.b_rows.len())?;
    let name = format!("{}+{}", a.name, b.name);
    let (sys, _) = stack_with_potential(a, b, traces, &w, &name)?;
    Ok(CoupledSystem::new(sys, a.dim()))
}

/// Spring of stiffness `k` between the last trace of `a` and the first trace
/// of `b` (for the string, its right and left ends), with a dashpot `γ`
/// acting on the velocity difference of the joined ends.
pub fn couple_spring(a: &DescriptorPHSystem, b: &DescriptorPHSystem, k: f64, gamma: f64) -> Result<CoupledSystem> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::NonPositiveCoefficient(format!("spring stiffness {k}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::NonPositiveCoefficient(format!("damping {gamma}")));
    }
    let last = a
        .trace_gamma
        .nrows()
        .checked_sub(1)
        .ok_or_else(|| Error::TraceUnavailable(format!("{} has no traces", a.name)))?;
    let traces = CoupledTraces { a_rows: vec![last], b_rows: vec![0] };
    let w = vec![vec![k, -k], vec![-k, k]];
    let (mut sys, consumed) = stack_with_potential(a, b, &traces, &w, "spring_coupling")?;
    if gamma > 0.0 {
        let [ca, cb] = consumed.as_slice() else {
            return Err(Error::TraceUnavailable("the coupled ends carry no input columns".into()));
        };
        let d: Vec<(usize, f64)> =
            ca.iter().zip(cb).enumerate().filter(|(_, (x, y))| **x != **y).map(|(i, (x, y))| (i, x - y)).collect();
        let mut t = Triplets::new(sys.dim(), sys.dim());
        for &(i, vi) in &d {
            for &(j, vj) in &d {
                t.push(i, j, gamma * vi * vj);
            }
        }
        sys.r = sys.r.add(&t.build()).sym_part();
    }
    Ok(CoupledSystem::new(sys, a.dim()))
}
