//! Implicit midpoint rule for descriptor systems.
//!
//! Three assemblies of the same scheme:
//! * diagonal `M`, no constraint: `(M - dt/2 A) z⁺ = (M + dt/2 A) z + dt B u`
//!   with `A = (J - R) M⁻¹ Q`;
//! * general `M`: `z⁺` and the midpoint effort are solved jointly, `M` is
//!   never inverted;
//! * constrained: the joint system is bordered by `C z⁺ = 0` and solved as a
//!   saddle problem, which yields the multiplier at the midpoint.

use super::banded::SparseLu;
use super::solve::{SaddleFactor, RESIDUAL_TOL};
use super::sparse::{SparseMatrix, Triplets};
use super::NumericsError;
use crate::error::{Error, Result};
use crate::phcore::{DescriptorPHSystem, PortKind, StepRecord, Trajectory};

#[derive(Clone, Debug)]
pub struct StepOutput {
    pub z_next: Vec<f64>,
    pub e_mid: Vec<f64>,
    pub lambda: Vec<f64>,
    pub relative_residual: f64,
}

#[derive(Clone, Debug)]
enum Kind {
    Reduced { lu: SparseLu, rhs_op: SparseMatrix, minv_q: SparseMatrix },
    Joint { lu: SparseLu, mass: SparseMatrix, q: SparseMatrix },
    Constrained { kkt: SaddleFactor, mass: SparseMatrix, q: SparseMatrix, m: usize },
}

/// Factored midpoint map for a fixed system and step size.
#[derive(Clone, Debug)]
pub struct MidpointStepper {
    dt: f64,
    n: usize,
    b: SparseMatrix,
    kind: Kind,
}

impl MidpointStepper {
    pub fn new(sys: &DescriptorPHSystem, dt: f64) -> std::result::Result<Self, NumericsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NumericsError::DimensionMismatch(format!("time step must be positive, got {dt}")));
        }
        let n = sys.dim();
        let jr = sys.j.sub(&sys.r);
        let kind = match &sys.constraint {
            None if sys.mass.is_diagonal() => {
                let minv: Vec<f64> = sys.mass.diagonal().iter().map(|m| 1.0 / m).collect();
                let minv_q = sys.q.scale_rows(&minv);
                let a = jr.matmul(&minv_q);
                Kind::Reduced {
                    lu: SparseLu::factor(&sys.mass.lin_comb(1.0, &a, -0.5 * dt))?,
                    rhs_op: sys.mass.lin_comb(1.0, &a, 0.5 * dt),
                    minv_q,
                }
            }
            None => {
                // [ M/dt  -(J-R) ] [z⁺]   [ M z/dt + B u ]
                // [ -Q/2    M    ] [e ] = [ Q z/2        ]
                let mut t = Triplets::new(2 * n, 2 * n);
                t.push_block(0, 0, &sys.mass, 1.0 / dt);
                t.push_block(0, n, &jr, -1.0);
                t.push_block(n, 0, &sys.q, -0.5);
                t.push_block(n, n, &sys.mass, 1.0);
                Kind::Joint { lu: SparseLu::factor(&t.build())?, mass: sys.mass.clone(), q: sys.q.clone() }
            }
            Some(c) => {
                // unknowns (e, z⁺), multiplier enters the effort rows:
                // [ -(J-R)  M/dt ] [e ]   [ 0  ]     [ M z/dt + B u ]
                // [  -M     Q/2  ] [z⁺] + [ Cᵀ ] λ = [ -Q z/2       ],   C z⁺ = 0
                let m = c.nrows();
                let mut t = Triplets::new(2 * n, 2 * n);
                t.push_block(0, 0, &jr, -1.0);
                t.push_block(0, n, &sys.mass, 1.0 / dt);
                t.push_block(n, 0, &sys.mass, -1.0);
                t.push_block(n, n, &sys.q, 0.5);
                let mut ct = Triplets::new(m, 2 * n);
                ct.push_block(0, n, c, 1.0);
                Kind::Constrained {
                    kkt: SaddleFactor::factor(&t.build(), &ct.build())?,
                    mass: sys.mass.clone(),
                    q: sys.q.clone(),
                    m,
                }
            }
        };
        Ok(Self { dt, n, b: sys.b.clone(), kind })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, z: &[f64], u_mid: &[f64]) -> std::result::Result<StepOutput, NumericsError> {
        let (n, dt) = (self.n, self.dt);
        if z.len() != n || u_mid.len() != self.b.ncols() {
            return Err(NumericsError::DimensionMismatch(format!(
                "step got state {} / input {}, expected {n} / {}",
                z.len(),
                u_mid.len(),
                self.b.ncols()
            )));
        }
        let bu = if u_mid.is_empty() { vec![0.0; n] } else { self.b.matvec(u_mid) };
        match &self.kind {
            Kind::Reduced { lu, rhs_op, minv_q } => {
                let mut rhs = rhs_op.matvec(z);
                rhs.iter_mut().zip(&bu).for_each(|(r, b)| *r += dt * b);
                let (z_next, rel, _) = lu.solve(&rhs);
                check(rel)?;
                let mid: Vec<f64> = z.iter().zip(&z_next).map(|(a, b)| 0.5 * (a + b)).collect();
                Ok(StepOutput { e_mid: minv_q.matvec(&mid), z_next, lambda: Vec::new(), relative_residual: rel })
            }
            Kind::Joint { lu, mass, q } => {
                let mut rhs = mass.matvec(z);
                rhs.iter_mut().zip(&bu).for_each(|(r, b)| *r = *r / dt + b);
                rhs.extend(q.matvec(z).iter().map(|v| 0.5 * v));
                let (mut x, rel, _) = lu.solve(&rhs);
                check(rel)?;
                let e_mid = x.split_off(n);
                Ok(StepOutput { z_next: x, e_mid, lambda: Vec::new(), relative_residual: rel })
            }
            Kind::Constrained { kkt, mass, q, m } => {
                let mut rhs = mass.matvec(z);
                rhs.iter_mut().zip(&bu).for_each(|(r, b)| *r = *r / dt + b);
                rhs.extend(q.matvec(z).iter().map(|v| -0.5 * v));
                let (mut x, lambda, rep) = kkt.solve(&rhs, &vec![0.0; *m])?;
                let z_next = x.split_off(n);
                Ok(StepOutput { z_next, e_mid: x, lambda, relative_residual: rep.relative_residual })
            }
        }
    }
}

fn check(rel: f64) -> std::result::Result<(), NumericsError> {
    if rel.is_finite() && rel <= RESIDUAL_TOL {
        Ok(())
    } else {
        Err(NumericsError::SolverBreakdown(format!("step residual {rel:.3e}")))
    }
}

/// One midpoint step with input `u_mid = u(t + dt/2)`.
pub fn implicit_midpoint_step(
    sys: &DescriptorPHSystem,
    z: &[f64],
    dt: f64,
    u_mid: &[f64],
) -> std::result::Result<StepOutput, NumericsError> {
    MidpointStepper::new(sys, dt)?.step(z, u_mid)
}

/// Number of steps for a horizon, robust to `t_final/dt` landing just below an integer.
pub fn step_count(t_final: f64, dt: f64) -> usize {
    let r = t_final / dt;
    (r + 1e-9 * r.max(1.0)).floor() as usize
}

/// Integrates from `z0` over `[0, t_final]`, recording every `record_every`
/// steps. `input` is evaluated at step midpoints; `None` means zero input.
pub fn integrate(
    sys: &DescriptorPHSystem,
    z0: &[f64],
    input: Option<&dyn Fn(f64) -> Vec<f64>>,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    if z0.len() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("initial state has {} entries, system {}", z0.len(), sys.dim())));
    }
    if record_every == 0 {
        return Err(Error::DimensionMismatch("record_every must be at least 1".into()));
    }
    let stepper = MidpointStepper::new(sys, dt)?;
    let n_steps = step_count(t_final, dt);
    let m = sys.n_inputs();
    let mut traj = Trajectory { dt, record_every, ..Default::default() };
    let mut z = z0.to_vec();
    let mut h = sys.hamiltonian(&z);
    traj.times.push(0.0);
    traj.efforts.push(sys.effort(&z)?);
    traj.hamiltonian.push(h);
    traj.chi.push(sys.trace_gamma.matvec(&z));
    traj.states.push(z.clone());
    traj.steps.reserve(n_steps);
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let t_mid = t + 0.5 * dt;
        let u = match input {
            Some(f) if m > 0 => {
                let u = f(t_mid);
                if u.len() != m {
                    return Err(Error::DimensionMismatch(format!("input has {} entries, B has {m} columns", u.len())));
                }
                u
            }
            _ => vec![0.0; m],
        };
        let out = stepper.step(&z, &u)?;
        let h_next = sys.hamiltonian(&out.z_next);
        let bte = if m > 0 { sys.b.transpose_matvec(&out.e_mid) } else { Vec::new() };
        let mut supplied = 0.0;
        let mut energy_port = 0.0;
        for (c, kind) in sys.ports.iter().enumerate() {
            match kind {
                PortKind::Power => supplied += bte[c] * u[c],
                PortKind::Energy { trace_row } => {
                    let dchi: f64 = sys
                        .trace_gamma
                        .row(*trace_row)
                        .map(|(j, g)| g * (out.z_next[j] - z[j]))
                        .sum();
                    energy_port += u[c] * dchi / dt;
                }
            }
        }
        let dissipated = sys.r.quad_form(&out.e_mid);
        traj.steps.push(StepRecord { t_mid, u_mid: u, h_before: h, h_after: h_next, supplied, energy_port, dissipated });
        z = out.z_next;
        h = h_next;
        if (k + 1) % record_every == 0 {
            traj.times.push((k + 1) as f64 * dt);
            traj.hamiltonian.push(h);
            traj.chi.push(sys.trace_gamma.matvec(&z));
            traj.states.push(z.clone());
            traj.efforts.push(out.e_mid);
        }
    }
    Ok(traj)
}
