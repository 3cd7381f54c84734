//! Torus-invariant special Lagrangian n-folds in ℂⁿ.
//!
//! A pair of planar functions `(u, v)` solving
//!
//! ```text
//! u_x = v_y,    v_x = -P'(w(v² + y²)) u_y,    P(w) = ∏ (w + a_j)
//! ```
//!
//! determines an n-fold invariant under a `U(1)^{n-2}` action. The crate
//! solves the planar problem, lifts solutions to points of ℂⁿ and checks
//! the special Lagrangian conditions numerically.
//!
//! All numerical code is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

// `!(x > y)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod embedding;
mod error;
pub mod export;
pub mod families;
pub mod linalg;
pub mod params;
pub mod pde;
pub mod scalar;
pub mod winding;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Params = params::ReductionParams<f64>;
pub type Branch = params::BranchState<f64>;
pub type Grid = pde::GridDomain<f64>;
pub type Field = pde::ScalarField2D<f64>;
pub type Boundary = pde::BoundaryData<f64>;
pub type Solver = pde::SolverConfig<f64>;
pub type Solution = pde::PdeSolution<f64>;
pub type Sample = embedding::EmbeddedSample<f64>;
pub type Frame = calibration::TangentFrame<f64>;
pub type Trace = winding::LoopTrace<f64>;
