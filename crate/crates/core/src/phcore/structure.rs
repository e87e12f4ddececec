use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::DescriptorPHSystem;
use crate::error::{Error, Result};

pub const PROBE_SEED: u64 = 0x5EED;
pub const PROBE_COUNT: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct StructureDiagnostics {
    /// `max |J + Jᵀ|`
    pub j_skew_defect: f64,
    pub q_sym_defect: f64,
    pub r_sym_defect: f64,
    pub m_sym_defect: f64,
    /// Smallest `zᵀRz / zᵀz` over the probes.
    pub r_min_rayleigh: f64,
    /// Smallest `zᵀMz / zᵀz` over the probes.
    pub m_min_rayleigh: f64,
    pub pass: bool,
}

pub fn random_probes(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Symmetry defects are exact; definiteness is sampled on seeded probes.
/// `R` may have a nontrivial kernel, so its Rayleigh quotients are allowed a
/// rounding-level negative margin.
pub fn check_structure(sys: &DescriptorPHSystem) -> StructureDiagnostics {
    let j_skew_defect = sys.j.skew_defect();
    let q_sym_defect = sys.q.symmetry_defect();
    let r_sym_defect = sys.r.symmetry_defect();
    let m_sym_defect = sys.mass.symmetry_defect();
    let mut r_min = f64::INFINITY;
    let mut m_min = f64::INFINITY;
    for z in random_probes(sys.dim(), PROBE_COUNT, PROBE_SEED) {
        let zz: f64 = z.iter().map(|v| v * v).sum();
        r_min = r_min.min(sys.r.quad_form(&z) / zz);
        m_min = m_min.min(sys.mass.quad_form(&z) / zz);
    }
    let r_tol = 1e-12 * sys.r.max_abs();
    let pass = j_skew_defect == 0.0
        && q_sym_defect == 0.0
        && r_sym_defect == 0.0
        && m_sym_defect == 0.0
        && r_min >= -r_tol
        && m_min > 0.0;
    StructureDiagnostics { j_skew_defect, q_sym_defect, r_sym_defect, m_sym_defect, r_min_rayleigh: r_min, m_min_rayleigh: m_min, pass }
}

/// Worst relative gap between the central difference `(H(z+hd) - H(z-hd))/2h`
/// and `dᵀ M e(z)` over seeded probe pairs `(z, d)`.
pub fn gradient_check(sys: &DescriptorPHSystem, count: usize, h: f64, seed: u64) -> Result<f64> {
    let n = sys.dim();
    let zs = random_probes(n, count, seed);
    let ds = random_probes(n, count, seed ^ 0xD1);
    let mut worst = 0.0f64;
    for (z, d) in zs.iter().zip(&ds) {
        let plus: Vec<f64> = z.iter().zip(d).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = z.iter().zip(d).map(|(a, b)| a - h * b).collect();
        let fd = (sys.hamiltonian(&plus) - sys.hamiltonian(&minus)) / (2.0 * h);
        let me = sys.mass.matvec(&sys.effort(z)?);
        let exact: f64 = me.iter().zip(d).map(|(a, b)| a * b).sum();
        worst = worst.max((fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Same system with the boundary pairing subtracted twice from `Q`, so that
/// `H₊(z) - H₋(z) = (Βz)·(Γz)`.
pub fn legendre_variant(sys: &DescriptorPHSystem) -> Result<DescriptorPHSystem> {
    if !sys.has_traces() {
        return Err(Error::TraceUnavailable(format!("{} has no boundary traces", sys.name)));
    }
    let gb = sys.trace_gamma.transpose().matmul(&sys.trace_beta);
    let pairing = gb.add(&gb.transpose());
    let mut out = sys.clone();
    out.q = sys.q.sub(&pairing).sym_part();
    out.name = format!("{}_legendre", sys.name);
    Ok(out)
}
