//! Planar data on rectangular grids: residuals of the reduced system and
//! the Dirichlet problem for the potential.

mod dirichlet;
mod grid;
mod residual;

pub use dirichlet::{solve_dirichlet, transfinite_blend, PdeSolution, SolverConfig};
pub use grid::{BoundaryData, GridDomain, ScalarField2D};
pub use residual::{recover_uv, residual_first_order, residual_potential};
