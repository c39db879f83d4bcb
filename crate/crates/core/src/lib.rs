//! Numerical laboratory for the Burgers–Poisson equation
//! `u_t + (u²/2)_x = [G * u]_x` with `G(x) = -½ e^{-|x|}`.

pub mod burgers;
pub mod bv;
pub mod characteristics;
pub mod config;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod preset;
pub mod snapshot;
pub mod solver;

pub use bv::{decompose, sbv_verdict, total_variation, BVDecomposition, JumpRecord};
pub use error::{BpError, Result};
pub use grid::{make_grid, CellProfile, Grid, Trajectory};
pub use kernel::{convolve, KernelField};
pub use preset::{sample_preset, Preset};
pub use snapshot::{format_trajectory, parse_trajectory};
pub use solver::{solve, SolveConfig, SourceIntegrator, Splitting};
