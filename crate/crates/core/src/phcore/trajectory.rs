/// Power bookkeeping of one time step, evaluated at the midpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t_mid: f64,
    pub u_mid: Vec<f64>,
    pub h_before: f64,
    pub h_after: f64,
    /// `Σ (bᵀe) u` over power-port columns.
    pub supplied: f64,
    /// `Σ ε Δχ/Δt` over energy-port columns.
    pub energy_port: f64,
    /// `eᵀ R e`
    pub dissipated: f64,
}

impl StepRecord {
    pub fn delta_h(&self) -> f64 {
        self.h_after - self.h_before
    }
}

/// Recorded samples plus a record for every step.
///
/// `efforts[0]` is `M⁻¹Qz₀`; `efforts[k]` for `k ≥ 1` is the midpoint effort
/// of the step that produced sample `k`, which includes constraint forces.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub record_every: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub efforts: Vec<Vec<f64>>,
    pub hamiltonian: Vec<f64>,
    /// `Γz` at each sample.
    pub chi: Vec<Vec<f64>>,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("empty trajectory")
    }

    /// `max |H_k - H_0| / max(|H_0|, tiny)`
    pub fn max_relative_energy_drift(&self) -> f64 {
        let h0 = self.hamiltonian[0];
        let scale = h0.abs().max(f64::MIN_POSITIVE);
        self.hamiltonian.iter().map(|h| (h - h0).abs() / scale).fold(0.0, f64::max)
    }
}
