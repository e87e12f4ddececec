//! Descriptor port-Hamiltonian systems and their structural checks.

mod balance;
mod reconstruct;
mod structure;
mod system;
mod trajectory;
mod transposition;

pub use balance::{power_balance, PowerBalanceReport};
pub use reconstruct::{reconstruct_hamiltonian, RECONSTRUCTION_TOL};
pub use structure::{check_structure, gradient_check, legendre_variant, random_probes, StructureDiagnostics, PROBE_COUNT, PROBE_SEED};
pub use system::{DescriptorPHSystem, PortKind, Representation, StateBlock};
pub use trajectory::{StepRecord, Trajectory};
pub use transposition::{intertwining_defect, m_weighted_adjoint, transposition_check, TranspositionReport, TRANSPOSITION_TOL};

/// `½ zᵀ Q z`
pub fn hamiltonian(sys: &DescriptorPHSystem, z: &[f64]) -> f64 {
    sys.hamiltonian(z)
}
