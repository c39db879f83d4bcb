//! Total length `F_σ(t)` of the cone bases at `σ/2` of all shocks inside the
//! region cut out by two backward characteristics from the final time.

use super::field::{detect_shocks, SolutionField};
use super::trace::Side;
use crate::error::{invalid, BpError, Result};
use crate::grid::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSigmaPoint {
    pub t: f64,
    /// length of the union of cone bases
    pub f: f64,
    /// summed pairwise overlap before merging
    pub overlap: f64,
    pub overlap_flag: bool,
    pub n_jumps: usize,
}

/// `F_σ(t)` for every `t` in `ts`, with the region bounded by the backward
/// characteristics from `(T, z1)` and `(T, z2)`, `T` the last snapshot time.
impl<'a> SolutionField<'a> {
    pub fn f_sigma(&self, sigma: f64, z1: f64, z2: f64, ts: &[f64]) -> Result<Vec<FSigmaPoint>> {
        let traj = self.trajectory();
        let big_t = traj.end_time();
        if ts.is_empty() {
            return Err(invalid("f_sigma needs at least one time"));
        }
        if !(z1 < z2) {
            return Err(invalid(format!("need z1 < z2, got z1={z1}, z2={z2}")));
        }
        let t_min = ts.iter().copied().fold(f64::INFINITY, f64::min);
        if !(sigma > 0.0 && sigma < t_min) {
            return Err(invalid(format!("need 0 < σ < min(ts), got σ={sigma}, min={t_min}")));
        }
        let eps = 1e-12 * big_t.max(1.0);
        if let Some(&t) = ts.iter().find(|&&t| t > big_t + eps) {
            return Err(invalid(format!("time {t} beyond the last snapshot {big_t}")));
        }
        for z in [z1, z2] {
            if let Some(a) = self.shock_near(big_t, z) {
                return Err(BpError::InvalidArgument(format!(
                    "z={z} lies on a jump of u(T) at x={} (u-={}, u+={})",
                    a.position, a.u_minus, a.u_plus
                )));
            }
        }
        let half = 0.5 * sigma;
        let left = self.backward_until(big_t, z1, Side::Minus, half)?;
        let right = self.backward_until(big_t, z2, Side::Plus, half)?;
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            let t = t.min(big_t);
            let (a, b) = (left.position_at(t).unwrap(), right.position_at(t).unwrap());
            let shocks: Vec<_> = detect_shocks(&self.profile_at_time(t), self.theta())
                .into_iter()
                .filter(|s| s.position > a && s.position < b)
                .collect();
            let mut bases = Vec::with_capacity(shocks.len());
            for s in &shocks {
                let c = self.cone_base(t, s.position, half)?;
                bases.push((c.left, c.right));
            }
            let (f, overlap) = merge_length(&mut bases);
            out.push(FSigmaPoint {
                t,
                f,
                overlap,
                overlap_flag: overlap > 0.0,
                n_jumps: shocks.len(),
            });
        }
        Ok(out)
    }
}

pub fn f_sigma(
    traj: &Trajectory,
    sigma: f64,
    z1: f64,
    z2: f64,
    ts: &[f64],
) -> Result<Vec<FSigmaPoint>> {
    SolutionField::new(traj).f_sigma(sigma, z1, z2, ts)
}

/// Length of the union of intervals and the total length counted twice.
fn merge_length(intervals: &mut [(f64, f64)]) -> (f64, f64) {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut sum = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &(l, r) in intervals.iter() {
        let r = r.max(l);
        sum += r - l;
        current = match current {
            Some((cl, cr)) if l <= cr => Some((cl, cr.max(r))),
            Some((cl, cr)) => {
                total += cr - cl;
                Some((l, r))
            }
            None => Some((l, r)),
        };
    }
    if let Some((cl, cr)) = current {
        total += cr - cl;
    }
    (total, sum - total)
}

/// Largest drop `F(t_j) - F(t_{j+1})` beyond an allowance of `2 dx` per
/// jump; non-positive for a non-decreasing series.
pub fn monotonicity_defect(points: &[FSigmaPoint], dx: f64) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let allowance = 2.0 * dx * w[0].n_jumps.max(w[1].n_jumps) as f64;
            w[0].f - w[1].f - allowance
        })
        .fold(f64::MIN, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellProfile, Grid};

    #[test]
    fn interval_merging() {
        let mut v = vec![(2.0, 3.0), (0.0, 1.0), (0.5, 1.5)];
        let (f, o) = merge_length(&mut v);
        assert!((f - 2.5).abs() < 1e-15 && (o - 0.5).abs() < 1e-15);
        assert_eq!(merge_length(&mut []), (0.0, 0.0));
    }

    #[test]
    fn zero_trajectory_has_no_jumps() {
        let g = Grid::new(-10.0, 10.0, 100).unwrap();
        let mut tr = Trajectory::new(0.0, CellProfile::zeros(g)).unwrap();
        for k in 1..=4 {
            tr.push(0.25 * k as f64, CellProfile::zeros(g)).unwrap();
        }
        let pts = f_sigma(&tr, 0.2, -1.0, 1.0, &[0.5, 0.75, 1.0]).unwrap();
        assert!(pts.iter().all(|p| p.f == 0.0 && !p.overlap_flag));
        assert!(monotonicity_defect(&pts, 0.2) <= 0.0);
        assert!(f_sigma(&tr, 0.6, -1.0, 1.0, &[0.5]).is_err());
        assert!(f_sigma(&tr, 0.2, 1.0, -1.0, &[0.5]).is_err());
        assert!(f_sigma(&tr, 0.2, -1.0, 1.0, &[2.0]).is_err());
    }

    #[test]
    fn endpoints_on_a_jump_are_rejected() {
        let g = Grid::new(-10.0, 10.0, 200).unwrap();
        let v: Vec<f64> = g.centers().map(|x| if x.abs() < 1.0 { 1.0 } else { 0.0 }).collect();
        let p = CellProfile::new(g, v).unwrap();
        let mut tr = Trajectory::new(0.0, p.clone()).unwrap();
        tr.push(1.0, p).unwrap();
        let err = f_sigma(&tr, 0.2, -2.0, 1.0, &[0.5]).unwrap_err();
        assert!(err.to_string().contains("jump"), "{err}");
    }
}
