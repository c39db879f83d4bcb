//! Uniform grids, piecewise-constant profiles and trajectories.
//!
//! A [`CellProfile`] stores cell averages of `u(t, ·)` on a [`Grid`] and
//! represents the function extended by zero outside `[x_min, x_max]`.

use crate::error::{BpError, Result};

/// Relative tolerance (in cells) used to decide that a point sits on an interface.
const INTERFACE_SNAP: f64 = 1e-9;

/// Tolerance used to match a requested time against stored snapshot times.
pub const TIME_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(BpError::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(BpError::InvalidGrid(format!(
                "empty domain: x_min = {x_min} is not below x_max = {x_max}"
            )));
        }
        if n_cells < 2 {
            return Err(BpError::InvalidGrid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_cells,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Left edge of cell `i`, or the interface between cells `i - 1` and `i`.
    pub fn interface(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.center(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let s = (x - self.x_min) / self.dx();
        if s <= 0.0 {
            0
        } else {
            (s.floor() as usize).min(self.n_cells - 1)
        }
    }

    /// Returns `Some(k)` when `x` coincides with interface `k` (0..=n_cells).
    pub fn interface_index(&self, x: f64) -> Option<usize> {
        let s = (x - self.x_min) / self.dx();
        let k = s.round();
        if (s - k).abs() <= INTERFACE_SNAP && k >= 0.0 && k <= self.n_cells as f64 {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_cells == other.n_cells
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.length()
            && (self.x_max - other.x_max).abs() <= 1e-12 * self.length()
    }
}

/// `make_grid` under its contract name.
pub fn make_grid(x_min: f64, x_max: f64, n_cells: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n_cells)
}

/// Cell averages of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellProfile {
    grid: Grid,
    values: Vec<f64>,
}

impl CellProfile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(BpError::InvalidArgument(format!(
                "profile has {} values for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(BpError::NonFinite { time: f64::NAN, cell });
        }
        Ok(CellProfile { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        CellProfile {
            grid,
            values: vec![0.0; grid.n_cells()],
        }
    }

    /// Builds a profile without the finiteness scan; callers check later.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        CellProfile { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    /// Value of the cell with index `i`, zero for ghost indices.
    pub fn value_or_zero(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Σ |u_i| dx.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.dx()
    }

    /// max |u_i|.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Σ u_i dx.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx()
    }

    pub fn scaled(&self, c: f64) -> CellProfile {
        CellProfile::from_raw(self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &CellProfile, b: f64) -> Result<CellProfile> {
        if !self.grid.same_as(&other.grid) {
            return Err(BpError::GridMismatch);
        }
        Ok(CellProfile::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        ))
    }

    /// Left and right limits at `x`. At an interface these are the two
    /// neighbouring cell values (ghost cells read as zero); inside a cell
    /// both equal the cell value.
    pub fn one_sided_limits(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() || !self.grid.contains(x) {
            return Err(BpError::OutsideGrid {
                x,
                x_min: self.grid.x_min(),
                x_max: self.grid.x_max(),
            });
        }
        if let Some(k) = self.grid.interface_index(x) {
            let k = k as isize;
            return Ok((self.value_or_zero(k - 1), self.value_or_zero(k)));
        }
        let v = self.values[self.grid.cell_of(x)];
        Ok((v, v))
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }
}

pub fn l1_norm(p: &CellProfile) -> f64 {
    p.l1_norm()
}

pub fn linf_norm(p: &CellProfile) -> f64 {
    p.linf_norm()
}

pub fn one_sided_limits(p: &CellProfile, x: f64) -> Result<(f64, f64)> {
    p.one_sided_limits(x)
}

/// Time-ordered snapshots of a solution on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    profiles: Vec<CellProfile>,
    u0_l1: f64,
}

impl Trajectory {
    pub fn new(t0: f64, initial: CellProfile) -> Result<Self> {
        if !t0.is_finite() || t0 < 0.0 {
            return Err(BpError::InvalidArgument(format!(
                "initial time must be finite and non-negative, got {t0}"
            )));
        }
        let u0_l1 = initial.l1_norm();
        Ok(Trajectory {
            times: vec![t0],
            profiles: vec![initial],
            u0_l1,
        })
    }

    pub fn push(&mut self, time: f64, profile: CellProfile) -> Result<()> {
        let last = *self.times.last().expect("trajectory is never empty");
        if !time.is_finite() || time <= last {
            return Err(BpError::NonIncreasingTime { time, last });
        }
        if !profile.grid().same_as(self.grid()) {
            return Err(BpError::GridMismatch);
        }
        self.times.push(time);
        self.profiles.push(profile);
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        self.profiles[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn profiles(&self) -> &[CellProfile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn u0_l1(&self) -> f64 {
        self.u0_l1
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn snapshot_index(&self, t: f64) -> Option<usize> {
        let scale = 1.0_f64.max(t.abs());
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= TIME_MATCH_TOL * scale)
    }

    pub fn profile_at(&self, t: f64) -> Result<&CellProfile> {
        self.snapshot_index(t)
            .map(|i| &self.profiles[i])
            .ok_or(BpError::MissingSnapshot(t))
    }

    /// Index `i` with `times[i] <= t <= times[i + 1]`, clamped to the stored range.
    pub fn bracket(&self, t: f64) -> usize {
        let n = self.times.len();
        if n < 2 || t <= self.times[0] {
            return 0;
        }
        let j = self.times.partition_point(|&s| s <= t);
        (j - 1).min(n - 2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CellProfile)> {
        self.times.iter().copied().zip(self.profiles.iter())
    }
}
