//! Space-time view of a trajectory: linear interpolation in time, cell
//! values in space, the source field `[G*u]_x`, and jump detection.

use crate::error::{invalid, Result};
use crate::grid::{CellProfile, Grid, Trajectory};
use crate::kernel::{convolve, KernelField};

pub const THETA_ABS: f64 = 1e-3;
pub const THETA_COEFF: f64 = 0.5;
const TAIL_CELLS: usize = 3;

/// Default jump threshold `max(1e-3, 0.5 √dx)`.
pub fn jump_threshold(dx: f64) -> f64 {
    THETA_ABS.max(THETA_COEFF * dx.sqrt())
}

/// A detected discrete shock.
///
/// Godunov smears a shock over at most a couple of interfaces; consecutive
/// decreasing interfaces are merged into one apex whose position follows
/// from mass balance in the intermediate cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockApex {
    pub position: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// first and last interface index of the cluster
    pub interfaces: (usize, usize),
}

impl ShockApex {
    pub fn speed(&self) -> f64 {
        0.5 * (self.u_minus + self.u_plus)
    }

    pub fn strength(&self) -> f64 {
        self.u_minus - self.u_plus
    }

    /// Points closer than half a cell to the cluster are treated as on it.
    pub fn zone(&self, grid: &Grid) -> (f64, f64) {
        let h = 0.5 * grid.dx();
        (
            grid.interface(self.interfaces.0) - h,
            grid.interface(self.interfaces.1) + h,
        )
    }
}

/// Clusters of decreasing jumps over interfaces `lo..=hi` of a profile given
/// by `value(i)` (zero outside the grid).
fn clusters(
    grid: &Grid,
    value: impl Fn(isize) -> f64,
    lo: usize,
    hi: usize,
    theta: f64,
) -> Vec<ShockApex> {
    let gap = |k: usize| value(k as isize - 1) - value(k as isize);
    let mut out = Vec::new();
    let mut k = lo;
    while k <= hi {
        if gap(k) < theta {
            k += 1;
            continue;
        }
        let mut a = k;
        let mut b = k;
        while b < hi && gap(b + 1) >= theta {
            b += 1;
        }
        // absorb the decaying tail of a moving discrete shock: gaps steeper
        // than a unit slope, at most TAIL_CELLS per side
        let tail = THETA_ABS.max(grid.dx());
        for _ in 0..TAIL_CELLS {
            if a > lo && gap(a - 1) >= tail {
                a -= 1;
            }
            if b < hi && gap(b + 1) >= tail {
                b += 1;
            }
        }
        let u_minus = value(a as isize - 1);
        let u_plus = value(b as isize);
        let strength = u_minus - u_plus;
        let mut pos = grid.interface(a);
        for j in a..b {
            let frac = ((value(j as isize) - u_plus) / strength).clamp(0.0, 1.0);
            pos += grid.dx() * frac;
        }
        let (u_minus, u_plus) = (
            extrapolate(grid, &value, a as isize - 3, -1, pos, theta).unwrap_or(u_minus),
            extrapolate(grid, &value, b as isize + 2, 1, pos, theta).unwrap_or(u_plus),
        );
        out.push(ShockApex {
            position: pos,
            u_minus,
            u_plus,
            interfaces: (a, b),
        });
        k = b + 1;
    }
    out
}

/// Linear extrapolation to `x` from cells `i` and `i + dir`. The cells next
/// to a smeared shock are skipped by the caller, since they under-read the
/// state at the head of a rarefaction ramp. Gives up when the two cells
/// differ by a jump.
fn extrapolate(
    grid: &Grid,
    value: &impl Fn(isize) -> f64,
    i: isize,
    dir: isize,
    x: f64,
    theta: f64,
) -> Option<f64> {
    let n = grid.n_cells() as isize;
    let j = i + dir;
    if i < 0 || j < 0 || i >= n || j >= n {
        return None;
    }
    let (vi, vj) = (value(i), value(j));
    if (vi - vj).abs() >= theta {
        return None;
    }
    let slope = (vi - vj) / (dir as f64 * -grid.dx());
    Some(vi + slope * (x - grid.center(i as usize)))
}

/// All shocks of a profile, sorted by position.
pub fn detect_shocks(p: &CellProfile, theta: f64) -> Vec<ShockApex> {
    let n = p.values().len();
    clusters(p.grid(), |i| p.value_or_zero(i), 0, n, theta)
}

/// Immutable space-time access to a trajectory, with the source field of
/// every snapshot precomputed.
#[derive(Debug, Clone)]
pub struct SolutionField<'a> {
    traj: &'a Trajectory,
    fields: Vec<KernelField>,
    theta: f64,
    max_speed: f64,
    max_spacing: f64,
    source_scale: f64,
}

impl<'a> SolutionField<'a> {
    pub fn new(traj: &'a Trajectory) -> Self {
        let theta = jump_threshold(traj.grid().dx());
        Self::build(traj, theta)
    }

    pub fn with_threshold(traj: &'a Trajectory, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(invalid(format!("jump threshold must be positive, got {theta}")));
        }
        Ok(Self::build(traj, theta))
    }

    fn build(traj: &'a Trajectory, theta: f64) -> Self {
        let fields = traj.profiles().iter().map(convolve).collect();
        let max_speed = traj
            .profiles()
            .iter()
            .map(CellProfile::linf_norm)
            .fold(0.0, f64::max);
        let max_spacing = traj
            .times()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        SolutionField {
            traj,
            fields,
            theta,
            max_speed,
            max_spacing,
            source_scale: 1.0,
        }
    }

    /// Drops the source from the backward ODE, for trajectories computed
    /// with the source switched off.
    pub fn without_source(mut self) -> Self {
        self.source_scale = 0.0;
        self
    }

    pub fn trajectory(&self) -> &'a Trajectory {
        self.traj
    }

    pub fn grid(&self) -> &Grid {
        self.traj.grid()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    /// Largest gap between consecutive snapshots.
    pub fn max_spacing(&self) -> f64 {
        self.max_spacing
    }

    pub fn kernel_fields(&self) -> &[KernelField] {
        &self.fields
    }

    fn weights(&self, s: f64) -> (usize, f64) {
        let times = self.traj.times();
        if times.len() == 1 {
            return (0, 0.0);
        }
        let i = self.traj.bracket(s).min(times.len() - 2);
        let w = ((s - times[i]) / (times[i + 1] - times[i])).clamp(0.0, 1.0);
        (i, w)
    }

    /// Cell value `i` at time `s`; zero outside the grid.
    pub fn cell_value(&self, s: f64, i: isize) -> f64 {
        let (k, w) = self.weights(s);
        let p = self.traj.profiles();
        if w == 0.0 {
            return p[k].value_or_zero(i);
        }
        (1.0 - w) * p[k].value_or_zero(i) + w * p[k + 1].value_or_zero(i)
    }

    /// Whole profile at time `s`, interpolated linearly between snapshots.
    pub fn profile_at_time(&self, s: f64) -> CellProfile {
        let (k, w) = self.weights(s);
        let p = self.traj.profiles();
        if w == 0.0 {
            return p[k].clone();
        }
        if w == 1.0 {
            return p[k + 1].clone();
        }
        p[k].combine(1.0 - w, &p[k + 1], w)
            .expect("snapshots share one grid")
    }

    /// `[G*u(s)]_x` at `x`.
    pub fn source(&self, s: f64, x: f64) -> f64 {
        if self.source_scale == 0.0 {
            return 0.0;
        }
        let (k, w) = self.weights(s);
        if w == 0.0 {
            return self.fields[k].phi_x_at(x);
        }
        (1.0 - w) * self.fields[k].phi_x_at(x) + w * self.fields[k + 1].phi_x_at(x)
    }

    /// Shock whose zone contains `x` at time `s`, if any.
    pub fn shock_near(&self, s: f64, x: f64) -> Option<ShockApex> {
        let g = self.grid();
        let c = g.cell_of(x);
        let lo = c.saturating_sub(3);
        let hi = (c + 4).min(g.n_cells());
        clusters(g, |i| self.cell_value(s, i), lo, hi, self.theta)
            .into_iter()
            .find(|a| {
                let (l, r) = a.zone(g);
                l <= x && x <= r
            })
    }

    /// One-sided states `(u(s,x-), u(s,x+))`. Near a detected shock the
    /// smeared cells are replaced by the states on either side of the
    /// cluster; `x` within a quarter cell of the shock position is the apex.
    pub fn states(&self, s: f64, x: f64) -> (f64, f64) {
        if let Some(a) = self.shock_near(s, x) {
            let d = x - a.position;
            let h = 0.25 * self.grid().dx();
            return if d < -h {
                (a.u_minus, a.u_minus)
            } else if d > h {
                (a.u_plus, a.u_plus)
            } else {
                (a.u_minus, a.u_plus)
            };
        }
        let g = self.grid();
        match g.interface_index(x) {
            Some(k) => (
                self.cell_value(s, k as isize - 1),
                self.cell_value(s, k as isize),
            ),
            None => {
                let v = self.cell_value(s, g.cell_of(x) as isize);
                (v, v)
            }
        }
    }

    /// Shocks of the snapshot at index `k`.
    pub fn snapshot_shocks(&self, k: usize) -> Vec<ShockApex> {
        detect_shocks(&self.traj.profiles()[k], self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(values: &[f64]) -> CellProfile {
        let g = Grid::new(0.0, values.len() as f64, values.len()).unwrap();
        CellProfile::new(g, values.to_vec()).unwrap()
    }

    #[test]
    fn threshold_defaults() {
        assert_eq!(jump_threshold(1e-8), 1e-3);
        assert!((jump_threshold(0.0625) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn sharp_and_smeared_shocks() {
        let p = profile(&[0.0, 1.0, 1.0, 1.0, -1.0, -1.0, 0.0]);
        let s = detect_shocks(&p, 0.3);
        // 0 -> 1 at interface 1 and -1 -> 0 are increasing, only one shock
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].position, 4.0);
        assert_eq!((s[0].u_minus, s[0].u_plus), (1.0, -1.0));

        let p = profile(&[0.0, 1.0, 1.0, 0.5, -1.0, -1.0, 0.0]);
        let s = detect_shocks(&p, 0.3);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].interfaces, (3, 4));
        // half of cell 3 holds the left state: mass balance puts the shock at 3.75
        assert!((s[0].position - 3.75).abs() < 1e-12);
        assert_eq!(s[0].speed(), 0.0);
    }

    #[test]
    fn small_steps_are_not_shocks() {
        let v: Vec<f64> = (0..20).map(|i| 1.0 - 0.05 * i as f64).collect();
        assert!(detect_shocks(&profile(&v), 0.1).is_empty());
    }

    #[test]
    fn field_interpolates_in_time() {
        let g = Grid::new(0.0, 4.0, 4).unwrap();
        let mut tr = Trajectory::new(0.0, CellProfile::zeros(g)).unwrap();
        tr.push(1.0, CellProfile::new(g, vec![2.0, 2.0, 0.0, 0.0]).unwrap())
            .unwrap();
        let f = SolutionField::with_threshold(&tr, 0.5).unwrap();
        assert_eq!(f.cell_value(0.25, 0), 0.5);
        assert_eq!(f.cell_value(0.25, -1), 0.0);
        assert_eq!(f.states(1.0, 2.0), (2.0, 0.0));
        assert_eq!(f.states(1.0, 0.5), (2.0, 2.0));
        // inside the zone of the shock at x = 2 but clearly right of it
        assert_eq!(f.states(1.0, 2.2), (2.0, 0.0));
        assert_eq!(f.states(1.0, 2.4), (0.0, 0.0));
        assert_eq!(f.states(1.0, 1.6), (2.0, 2.0));
        assert_eq!(f.states(1.0, 2.6), (0.0, 0.0));
        assert_eq!(f.max_speed(), 2.0);
        let expected = 0.5 * f.kernel_fields()[1].phi_x_at(1.3);
        assert!((f.source(0.5, 1.3) - expected).abs() < 1e-15);
    }
}
