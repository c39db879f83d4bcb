//! Generalized characteristics traced through a computed trajectory.

pub mod bounds;
pub mod checks;
pub mod field;
pub mod fsigma;
pub mod trace;

pub use bounds::{bounds_constants, BoundsInput, BoundsReport};
pub use checks::{cone_base, ConeBase};
pub use field::{detect_shocks, jump_threshold, ShockApex, SolutionField};
pub use fsigma::{f_sigma, FSigmaPoint};
pub use trace::{
    backward_characteristic, forward_characteristic, Characteristic, CurveKind, Direction,
    Origin, Side,
};
