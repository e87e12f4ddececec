//! Structure-preserving discretization and simulation of linear descriptor
//! port-Hamiltonian systems, in two dual forms: one where the energy is a
//! function of strain-like variables linked by a differential operator, and
//! one where that operator sits in the energy itself.

pub mod bench_cli;
pub mod error;
pub mod discrete_ops;
pub mod dzektser;
pub mod interconnect;
pub mod maxwell2d;
pub mod numerics;
pub mod plates;
pub mod wave1d;
pub mod phcore;

pub use error::{Error, Result};
