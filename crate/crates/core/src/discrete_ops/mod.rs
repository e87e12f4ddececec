//! Grids, P1 finite elements and summation-by-parts operator pairs.

pub mod fem1d;
pub mod grid;
mod profile;
pub mod sbp;

pub use fem1d::{apply_dirichlet, assemble_kernel_matrix, assemble_p1_mass, assemble_p1_stiffness, kernel_alpha, MAX_DENSE_DIM};
pub use grid::{Grid1D, StaggeredGrid2D};
pub use profile::Profile;
pub use sbp::{difference_1d, lumped_node_weights_1d, sbp_gradient_1d, sbp_operators_2d, Operators2D, SbpPair, TensorLayout};
