//! Wave equation builders in both representations, the map between them, and
//! the nonlocal nanorod stress solvers.
//!
//! Boundary inputs are the outward tractions `N·n` at the ends (or at the
//! boundary nodes in 2D), so the supplied power is `Σ v u`; in 1D this is
//! `σ(b) v(b) - σ(a) v(a)` with `u = (-σ(a), σ(b))`.

mod membrane;
mod nanorod;
mod string;

pub use membrane::{build_wave_2d, wave_2d_initial_sl, wave_2d_pair, wave_2d_transposition};
pub use nanorod::{solve_sigma_explicit, solve_sigma_implicit, ExplicitNanorod, ImplicitNanorod};
pub(crate) use string::{element_modulus, momentum_blocks};
pub use string::{
    build_wave_sd, build_wave_sl, build_wave_transposition, fixed_fixed_fundamental, gaussian_pulse, wave_1d_initial_sl,
};

pub use crate::discrete_ops::Profile;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct WaveMaterial {
    pub rho: Profile,
    /// Tension or Young's modulus.
    pub e: Profile,
    /// Nonlocal parameter `μ` (m²); 0 is the local law.
    pub mu: f64,
}

impl WaveMaterial {
    pub fn uniform(rho: f64, e: f64) -> Self {
        Self { rho: rho.into(), e: e.into(), mu: 0.0 }
    }

    pub fn nonlocal(e: f64, mu: f64) -> Self {
        Self { rho: 1.0.into(), e: e.into(), mu }
    }

    fn require_local(&self) -> Result<()> {
        if self.mu != 0.0 {
            return Err(Error::InvalidParameter(format!("wave builders need the local law, got μ = {}", self.mu)));
        }
        Ok(())
    }

    fn require_nonlocal(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::NonPositiveCoefficient(format!("nonlocal parameter μ = {}", self.mu)));
        }
        Ok(())
    }
}

/// Mass matrix used for the nodal fields of the 1D builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MassMode {
    #[default]
    Lumped,
    Consistent,
}

pub(crate) fn check_positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveCoefficient(format!("{what} = {v}")))
    }
}
