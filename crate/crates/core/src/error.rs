use thiserror::Error;

/// Errors produced by the numerical lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid preset: {0}")]
    InvalidPreset(String),

    #[error("point {x} lies outside the grid [{x_min}, {x_max}]")]
    OutsideGrid { x: f64, x_min: f64, x_max: f64 },

    #[error("profiles live on different grids")]
    GridMismatch,

    #[error("snapshot time {time} does not extend the trajectory (last time {last})")]
    NonIncreasingTime { time: f64, last: f64 },

    #[error("time {0} is not a snapshot of the trajectory")]
    MissingSnapshot(f64),

    #[error("inadmissible jump: u_minus = {u_minus} must exceed u_plus = {u_plus}")]
    InadmissibleJump { u_minus: f64, u_plus: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("non-finite value at t = {time} in cell {cell}")]
    NonFinite { time: f64, cell: usize },

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error for key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, BpError>;

pub(crate) fn invalid(msg: impl Into<String>) -> BpError {
    BpError::InvalidArgument(msg.into())
}
