//! Forward and backward characteristics integrated through a trajectory
//! with Heun's method.

use super::field::SolutionField;
use crate::error::{invalid, BpError, Result};
use crate::grid::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Genuine,
    Shock,
}

impl CurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::Genuine => "genuine",
            CurveKind::Shock => "shock",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Minus,
    None,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Origin {
    pub t: f64,
    pub x: f64,
    pub side: Side,
}

/// Sampled curve `s ↦ (ξ(s), v(s))`, stored with increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristic {
    times: Vec<f64>,
    xi: Vec<f64>,
    v: Vec<f64>,
    kinds: Vec<CurveKind>,
    direction: Direction,
    origin: Origin,
}

impl Characteristic {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Kind of each sample.
    pub fn kinds(&self) -> &[CurveKind] {
        &self.kinds
    }

    /// `Shock` once any sample rode a detected jump.
    pub fn kind(&self) -> CurveKind {
        if self.kinds.contains(&CurveKind::Shock) {
            CurveKind::Shock
        } else {
            CurveKind::Genuine
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn covers(&self, s: f64) -> bool {
        let eps = 1e-12 * self.end_time().abs().max(1.0);
        s >= self.start_time() - eps && s <= self.end_time() + eps
    }

    fn interp(&self, data: &[f64], s: f64) -> Option<f64> {
        if !self.covers(s) {
            return None;
        }
        let n = self.times.len();
        if n == 1 {
            return Some(data[0]);
        }
        let j = self.times.partition_point(|&t| t <= s).clamp(1, n - 1);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = ((s - t0) / (t1 - t0)).clamp(0.0, 1.0);
        Some((1.0 - w) * data[j - 1] + w * data[j])
    }

    /// `ξ(s)` by linear interpolation between samples.
    pub fn position_at(&self, s: f64) -> Option<f64> {
        self.interp(&self.xi, s)
    }

    pub fn speed_at(&self, s: f64) -> Option<f64> {
        self.interp(&self.v, s)
    }

    /// Copy displaced by `shift` at the start time, fading to zero at the end.
    #[cfg(test)]
    pub(crate) fn shifted_for_tests(c: &Characteristic, shift: f64) -> Characteristic {
        let (a, b) = (c.start_time(), c.end_time());
        let mut out = c.clone();
        for (x, &s) in out.xi.iter_mut().zip(&c.times) {
            *x += shift * (b - s) / (b - a);
        }
        out
    }
}

/// Integration nodes from `from` to `to` (either direction): every snapshot
/// time in between, each interval halved, and further subdivided so that no
/// step moves more than half a cell.
fn nodes(field: &SolutionField, from: f64, to: f64) -> Vec<f64> {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let mut marks = vec![lo];
    marks.extend(
        field
            .trajectory()
            .times()
            .iter()
            .copied()
            .filter(|&t| t > lo && t < hi),
    );
    marks.push(hi);
    let cap = 0.5 * field.grid().dx() / field.max_speed().max(1e-12);
    let mut out = vec![lo];
    for w in marks.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let m = 2usize.max((len / cap).ceil() as usize);
        for j in 1..=m {
            out.push(if j == m { w[1] } else { w[0] + len * j as f64 / m as f64 });
        }
    }
    if from > to {
        out.reverse();
    }
    out
}

fn check_time(traj: &Trajectory, t: f64) -> Result<()> {
    let eps = 1e-12 * traj.end_time().abs().max(1.0);
    if !(t >= traj.start_time() - eps && t <= traj.end_time() + eps) {
        return Err(invalid(format!(
            "time {t} outside trajectory range [{}, {}]",
            traj.start_time(),
            traj.end_time()
        )));
    }
    Ok(())
}

fn check_inside(field: &SolutionField, x: f64) -> Result<()> {
    let g = field.grid();
    let margin = g.dx();
    if !(x >= g.x_min() + margin && x <= g.x_max() - margin) {
        return Err(BpError::OutsideGrid {
            x,
            x_min: g.x_min(),
            x_max: g.x_max(),
        });
    }
    Ok(())
}

/// Filippov speed law: the mean of the one-sided states, which is the
/// Rankine–Hugoniot speed on a shock and `u` at a continuity point.
fn forward_speed(field: &SolutionField, s: f64, x: f64) -> (f64, bool) {
    match field.shock_near(s, x) {
        Some(a) => (a.speed(), true),
        None => {
            let (l, r) = field.states(s, x);
            (0.5 * (l + r), false)
        }
    }
}

impl<'a> SolutionField<'a> {
    /// Forward characteristic from `(t0, x0)` to `t_end`.
    pub fn forward_until(&self, t0: f64, x0: f64, t_end: f64) -> Result<Characteristic> {
        let traj = self.trajectory();
        check_time(traj, t0)?;
        check_time(traj, t_end)?;
        if t_end < t0 {
            return Err(invalid("forward characteristic needs t_end >= t0"));
        }
        check_inside(self, x0)?;
        let (v0, hit) = forward_speed(self, t0, x0);
        let mut kind = if hit {
            CurveKind::Shock
        } else {
            CurveKind::Genuine
        };
        let mut curve = Characteristic {
            times: vec![t0],
            xi: vec![x0],
            v: vec![v0],
            kinds: vec![kind],
            direction: Direction::Forward,
            origin: Origin {
                t: t0,
                x: x0,
                side: Side::None,
            },
        };
        let ts = nodes(self, t0, t_end);
        let mut x = x0;
        for w in ts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            let (k1, _) = forward_speed(self, a, x);
            let (k2, _) = forward_speed(self, b, x + h * k1);
            x += 0.5 * h * (k1 + k2);
            check_inside(self, x)?;
            let (v, hit) = forward_speed(self, b, x);
            if hit {
                kind = CurveKind::Shock;
            }
            curve.times.push(b);
            curve.xi.push(x);
            curve.v.push(v);
            curve.kinds.push(kind);
        }
        Ok(curve)
    }

    /// Forward characteristic from `(t0, x0)` to the last snapshot.
    pub fn forward(&self, t0: f64, x0: f64) -> Result<Characteristic> {
        self.forward_until(t0, x0, self.trajectory().end_time())
    }

    /// Backward characteristic from `(t, x)` down to `s_min`, solving
    /// `ξ' = v, v' = [G*u]_x(ξ)` with `v(t)` the state on `side`.
    pub fn backward_until(&self, t: f64, x: f64, side: Side, s_min: f64) -> Result<Characteristic> {
        let traj = self.trajectory();
        check_time(traj, t)?;
        check_time(traj, s_min)?;
        if traj.len() < 2 || t <= traj.start_time() {
            return Err(invalid("backward characteristic needs t after the first snapshot"));
        }
        if s_min > t {
            return Err(invalid("backward characteristic needs s_min <= t"));
        }
        check_inside(self, x)?;
        let (um, up) = self.states(t, x);
        let mut v = match side {
            Side::Minus => um,
            Side::Plus => up,
            Side::None => 0.5 * (um + up),
        };
        let mut times = vec![t];
        let mut xs = vec![x];
        let mut vs = vec![v];
        let mut xi = x;
        for w in nodes(self, t, s_min).windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            let (kx1, kv1) = (v, self.source(a, xi));
            let (xp, vp) = (xi + h * kx1, v + h * kv1);
            let (kx2, kv2) = (vp, self.source(b, xp));
            xi += 0.5 * h * (kx1 + kx2);
            v += 0.5 * h * (kv1 + kv2);
            check_inside(self, xi)?;
            times.push(b);
            xs.push(xi);
            vs.push(v);
        }
        times.reverse();
        xs.reverse();
        vs.reverse();
        let n = times.len();
        Ok(Characteristic {
            times,
            xi: xs,
            v: vs,
            kinds: vec![CurveKind::Genuine; n],
            direction: Direction::Backward,
            origin: Origin { t, x, side },
        })
    }

    /// Backward characteristic from `(t, x)` down to the first snapshot.
    pub fn backward(&self, t: f64, x: f64, side: Side) -> Result<Characteristic> {
        self.backward_until(t, x, side, self.trajectory().start_time())
    }

    /// Largest distance, over samples with `s >= s_min`, between `v(s)` and
    /// the states of `u(s, ·)` within one cell of `ξ(s)`. A discrete shock
    /// is only located to within a cell, hence the window.
    pub fn ode_residual(&self, c: &Characteristic, s_min: f64) -> f64 {
        c.times()
            .iter()
            .zip(c.xi().iter().zip(c.v()))
            .filter(|(&s, _)| s >= s_min)
            .map(|(&s, (&x, &v))| self.state_distance(s, x, v))
            .fold(0.0, f64::max)
    }

    fn state_distance(&self, s: f64, x: f64, v: f64) -> f64 {
        let (l, r) = self.states(s, x);
        let c = self.grid().cell_of(x) as isize;
        (c - 1..=c + 1)
            .map(|i| (v - self.cell_value(s, i)).abs())
            .fold((v - l).abs().min((v - r).abs()), f64::min)
    }

    /// Distance between the origin of a backward curve and the forward curve
    /// started from its position at time `s`.
    pub fn round_trip_error(&self, c: &Characteristic, s: f64) -> Result<f64> {
        let o = c.origin();
        let x = c
            .position_at(s)
            .ok_or_else(|| invalid(format!("curve does not cover s={s}")))?;
        let fwd = self.forward_until(s, x, o.t)?;
        Ok((fwd.position_at(o.t).unwrap() - o.x).abs())
    }
}

pub fn forward_characteristic(traj: &Trajectory, t0: f64, x0: f64) -> Result<Characteristic> {
    SolutionField::new(traj).forward(t0, x0)
}

pub fn backward_characteristic(
    traj: &Trajectory,
    t: f64,
    x: f64,
    side: Side,
) -> Result<Characteristic> {
    SolutionField::new(traj).backward(t, x, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellProfile, Grid};
    use crate::preset::Preset;
    use crate::solver::{solve, SolveConfig};

    fn zero_traj() -> Trajectory {
        let g = Grid::new(-10.0, 10.0, 100).unwrap();
        let mut tr = Trajectory::new(0.0, CellProfile::zeros(g)).unwrap();
        for k in 1..=4 {
            tr.push(0.25 * k as f64, CellProfile::zeros(g)).unwrap();
        }
        tr
    }

    #[test]
    fn zero_field_gives_vertical_lines() {
        let tr = zero_traj();
        let f = SolutionField::new(&tr);
        let c = f.forward(0.1, 1.234).unwrap();
        assert!(c.xi().iter().all(|&x| x == 1.234));
        assert_eq!(c.kind(), CurveKind::Genuine);
        assert_eq!(c.end_time(), 1.0);
        let b = f.backward(1.0, -2.5, Side::Minus).unwrap();
        assert!(b.xi().iter().all(|&x| x == -2.5));
        assert!(b.v().iter().all(|&v| v == 0.0));
        assert_eq!(b.start_time(), 0.0);
        assert!(b.times().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b.direction(), Direction::Backward);
    }

    #[test]
    fn rejects_bad_origins() {
        let tr = zero_traj();
        let f = SolutionField::new(&tr);
        assert!(matches!(f.forward(0.0, 50.0), Err(BpError::OutsideGrid { .. })));
        assert!(f.forward(2.0, 0.0).is_err());
        assert!(f.backward(0.0, 0.0, Side::Plus).is_err());
    }

    fn stationary_shock() -> Trajectory {
        let g = Grid::new(-20.0, 20.0, 400).unwrap();
        let mut cfg = SolveConfig::new(
            g,
            Preset::Step {
                a: -3.0,
                x0: 0.0,
                b: 3.0,
                u_left: 1.0,
                u_right: -1.0,
            },
            1.0,
        )
        .with_uniform_snapshots(0.05);
        cfg.source_enabled = false;
        cfg.pad = 5.0;
        solve(&cfg).unwrap()
    }

    #[test]
    fn symmetric_shock_is_stationary() {
        let tr = stationary_shock();
        let f = SolutionField::new(&tr);
        let c = f.forward(0.0, 0.0).unwrap();
        assert_eq!(c.kind(), CurveKind::Shock);
        for (&x, &v) in c.xi().iter().zip(c.v()) {
            assert!(x.abs() < 1e-12 && v.abs() < 1e-12);
        }
        // a genuine curve from the left runs into the shock and stays there
        let c = f.forward(0.0, -0.45).unwrap();
        assert!(c.position_at(0.3).unwrap() > -0.2);
        assert!(c.position_at(1.0).unwrap().abs() < 2.0 * tr.grid().dx());
        assert_eq!(c.kinds()[0], CurveKind::Genuine);
        assert_eq!(c.kind(), CurveKind::Shock);
    }

    #[test]
    fn minimal_and_maximal_curves_of_a_shock() {
        let tr = stationary_shock();
        let f = SolutionField::new(&tr).without_source();
        let lo = f.backward(1.0, 0.0, Side::Minus).unwrap();
        let hi = f.backward(1.0, 0.0, Side::Plus).unwrap();
        assert!((lo.v()[lo.len() - 1] - 1.0).abs() < 1e-9);
        assert!((hi.v()[hi.len() - 1] + 1.0).abs() < 1e-9);
        // without source these are straight lines of slope ±1
        assert!((lo.position_at(0.0).unwrap() + 1.0).abs() < 1e-9);
        assert!((hi.position_at(0.0).unwrap() - 1.0).abs() < 1e-9);
        // away from the shock both sides agree
        let a = f.backward(1.0, -1.55, Side::Minus).unwrap();
        let b = f.backward(1.0, -1.55, Side::Plus).unwrap();
        assert_eq!(a.xi(), b.xi());
        assert!(f.ode_residual(&lo, 0.0) < 1e-9);
    }

    #[test]
    fn interpolation_between_samples() {
        let tr = zero_traj();
        let f = SolutionField::new(&tr);
        let c = f.forward(0.0, 0.0).unwrap();
        assert_eq!(c.position_at(0.33), Some(0.0));
        assert_eq!(c.position_at(1.5), None);
        assert!(c.covers(1.0));
    }
}
