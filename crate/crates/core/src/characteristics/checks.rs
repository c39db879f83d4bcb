//! Numerical checks of the geometric estimates on traced curves.

use super::bounds::{gamma_big, kappa, spreading_factor};
use super::field::SolutionField;
use super::trace::{Characteristic, Direction, Side};
use crate::error::{invalid, BpError, Result};

/// Base `[left, right]` at time `s` of the backward cone from `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeBase {
    pub s: f64,
    pub left: f64,
    pub right: f64,
    pub apex: (f64, f64),
}

impl ConeBase {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

impl<'a> SolutionField<'a> {
    pub fn cone_base(&self, t: f64, x: f64, s: f64) -> Result<ConeBase> {
        if !(0.0 < s && s < t) {
            return Err(invalid(format!("cone base needs 0 < s < t, got s={s}, t={t}")));
        }
        let lo = self.backward_until(t, x, Side::Minus, s)?;
        let hi = self.backward_until(t, x, Side::Plus, s)?;
        Ok(ConeBase {
            s,
            left: lo.position_at(s).unwrap(),
            right: hi.position_at(s).unwrap(),
            apex: (t, x),
        })
    }
}

pub fn cone_base(
    traj: &crate::grid::Trajectory,
    t: f64,
    x: f64,
    s: f64,
) -> Result<ConeBase> {
    SolutionField::new(traj).cone_base(t, x, s)
}

/// Tolerance `scale * factor * (dx + dt)`, optionally amplified by `c_t(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveTolerance {
    pub factor: f64,
    pub scale: f64,
}

impl Default for CurveTolerance {
    fn default() -> Self {
        CurveTolerance {
            factor: 10.0,
            scale: 1.0,
        }
    }
}

impl CurveTolerance {
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn base(&self, field: &SolutionField) -> f64 {
        self.scale * self.factor * (field.grid().dx() + field.max_spacing())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeBoundReport {
    pub base: ConeBase,
    /// `u(t,x-) - u(t,x+)`, zero at a continuity point
    pub jump: f64,
    pub bound: f64,
    pub tol: f64,
    pub satisfied: bool,
}

/// Cone-base width against `c_t(s) (u(t,x-) - u(t,x+))`, with slack
/// `scale * 10 dx * c_t(s)`.
pub fn check_cone_bound(
    field: &SolutionField,
    t: f64,
    x: f64,
    s: f64,
    scale: f64,
) -> Result<ConeBoundReport> {
    let base = field.cone_base(t, x, s)?;
    let (um, up) = field.states(t, x);
    let c = spreading_factor(t, s, field.trajectory().u0_l1());
    let jump = um - up;
    let bound = c * jump;
    let tol = scale * 10.0 * field.grid().dx() * c;
    Ok(ConeBoundReport {
        base,
        jump,
        bound,
        tol,
        satisfied: base.width() <= bound + tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonCrossingReport {
    pub max_overlap: f64,
    pub tol: f64,
    pub satisfied: bool,
    /// indices of the worst pair as passed in
    pub worst_pair: Option<(usize, usize)>,
}

/// Pairwise order preservation over the common time range, with crossing
/// tolerance `2 dx`.
pub fn check_non_crossing(curves: &[Characteristic], dx: f64) -> Result<NonCrossingReport> {
    if curves.is_empty() {
        return Err(invalid("non-crossing check needs at least one curve"));
    }
    let lo = curves.iter().map(|c| c.start_time()).fold(f64::MIN, f64::max);
    let hi = curves.iter().map(|c| c.end_time()).fold(f64::MAX, f64::min);
    if lo > hi {
        return Err(invalid("curves share no common time range"));
    }
    let mut samples: Vec<f64> = curves[0]
        .times()
        .iter()
        .copied()
        .filter(|&s| s >= lo && s <= hi)
        .collect();
    samples.push(lo);
    samples.push(hi);
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    let key = |c: &Characteristic| (c.position_at(hi).unwrap(), c.origin().side);
    let mut order: Vec<usize> = (0..curves.len()).collect();
    order.sort_by(|&a, &b| {
        let (xa, sa) = key(&curves[a]);
        let (xb, sb) = key(&curves[b]);
        xa.total_cmp(&xb).then(sa.cmp(&sb))
    });
    let paths: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| samples.iter().map(|&s| curves[i].position_at(s).unwrap()).collect())
        .collect();
    let mut max_overlap = 0.0_f64;
    let mut worst_pair = None;
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            for (xa, xb) in paths[a].iter().zip(&paths[b]) {
                let o = xa - xb;
                if o > max_overlap {
                    max_overlap = o;
                    worst_pair = Some((order[a], order[b]));
                }
            }
        }
    }
    let tol = 2.0 * dx;
    Ok(NonCrossingReport {
        max_overlap,
        tol,
        satisfied: max_overlap <= tol,
        worst_pair,
    })
}

/// Orders two backward curves from a common time `t`: lower one first.
fn ordered_pair<'c>(
    c1: &'c Characteristic,
    c2: &'c Characteristic,
) -> Result<(&'c Characteristic, &'c Characteristic, f64)> {
    if c1.direction() != Direction::Backward || c2.direction() != Direction::Backward {
        return Err(invalid("expected backward characteristics"));
    }
    let (o1, o2) = (c1.origin(), c2.origin());
    if (o1.t - o2.t).abs() > 1e-9 * o1.t.abs().max(1.0) {
        return Err(BpError::InvalidArgument(format!(
            "curves start from different times {} and {}",
            o1.t, o2.t
        )));
    }
    let t = o1.t;
    if (o1.x, o1.side) <= (o2.x, o2.side) {
        Ok((c1, c2, t))
    } else {
        Ok((c2, c1, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Report {
    /// `max_s [lhs(s) - c_t(s) D(t)] - tol(s)`; non-positive when the
    /// spreading estimate holds everywhere
    pub spreading_margin: f64,
    /// `ξ₂(t0) - ξ₁(t0)`
    pub gap_lhs: f64,
    /// `[x₂ - x₁ + (v₁(t0) - v₂(t0))(t - t0)] / Γ`
    pub gap_rhs: f64,
    pub gap_tol: f64,
    pub satisfied: bool,
}

/// Spreading and gap estimates for two backward curves on `[t0, t]`.
///
/// Tolerance is `tol.base() * c_t(s)` at each sample.
pub fn check_lemma1(
    field: &SolutionField,
    c1: &Characteristic,
    c2: &Characteristic,
    t0: f64,
    tol: &CurveTolerance,
) -> Result<Lemma1Report> {
    let (lo, hi, t) = ordered_pair(c1, c2)?;
    if !(t0 > 0.0 && t0 <= t && lo.covers(t0) && hi.covers(t0)) {
        return Err(invalid(format!("t0={t0} not covered by both curves below t={t}")));
    }
    let u0 = field.trajectory().u0_l1();
    let base = tol.base(field);
    let gap_at = |s: f64| {
        let dv = (hi.speed_at(s).unwrap() - lo.speed_at(s).unwrap()).abs();
        let dx = (hi.position_at(s).unwrap() - lo.position_at(s).unwrap()).abs();
        dv + dx
    };
    let d_t = gap_at(t);
    let mut spreading_margin = f64::MIN;
    for &s in lo.times().iter().filter(|&&s| s >= t0 && s <= t) {
        let c = spreading_factor(t, s, u0);
        let m = gap_at(s) - c * d_t - base * c;
        spreading_margin = spreading_margin.max(m);
    }
    let (x1, x2) = (lo.origin().x, hi.origin().x);
    let (v1, v2) = (lo.speed_at(t0).unwrap(), hi.speed_at(t0).unwrap());
    let gap_lhs = hi.position_at(t0).unwrap() - lo.position_at(t0).unwrap();
    let gap_rhs = (x2 - x1 + (v1 - v2) * (t - t0)) / gamma_big(t0, t, u0);
    let gap_tol = base * spreading_factor(t, t0, u0);
    Ok(Lemma1Report {
        spreading_margin,
        gap_lhs,
        gap_rhs,
        gap_tol,
        satisfied: spreading_margin <= 0.0 && gap_lhs >= gap_rhs - gap_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    /// `ξ₂(σ/2) - ξ₁(σ/2)`
    pub lhs: f64,
    /// `κ (v₁(t) - v₂(t))`
    pub rhs: f64,
    pub kappa: f64,
    pub tol: f64,
    pub satisfied: bool,
}

/// Separation at `σ/2` of two backward curves from a common `t ∈ (σ, T]`.
pub fn check_separation(
    field: &SolutionField,
    c1: &Characteristic,
    c2: &Characteristic,
    sigma: f64,
    big_t: f64,
    tol: &CurveTolerance,
) -> Result<SeparationReport> {
    let (lo, hi, t) = ordered_pair(c1, c2)?;
    if !(sigma > 0.0 && sigma < t && t <= big_t * (1.0 + 1e-12)) {
        return Err(invalid(format!("need 0 < σ < t <= T, got σ={sigma}, t={t}, T={big_t}")));
    }
    let half = 0.5 * sigma;
    let (p1, p2) = match (lo.position_at(half), hi.position_at(half)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(invalid("curves do not reach σ/2")),
    };
    let k = kappa(sigma, big_t, field.trajectory().u0_l1());
    let rhs = k * (lo.speed_at(t).unwrap() - hi.speed_at(t).unwrap());
    let lhs = p2 - p1;
    let tol = tol.base(field);
    Ok(SeparationReport {
        lhs,
        rhs,
        kappa: k,
        tol,
        satisfied: lhs >= rhs - tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellProfile, Grid, Trajectory};

    fn zero_traj() -> Trajectory {
        let g = Grid::new(-10.0, 10.0, 100).unwrap();
        let mut tr = Trajectory::new(0.0, CellProfile::zeros(g)).unwrap();
        for k in 1..=4 {
            tr.push(0.25 * k as f64, CellProfile::zeros(g)).unwrap();
        }
        tr
    }

    #[test]
    fn zero_field_checks_are_degenerate() {
        let tr = zero_traj();
        let f = SolutionField::new(&tr);
        let base = f.cone_base(1.0, 0.3, 0.5).unwrap();
        assert_eq!(base.width(), 0.0);
        let c1 = f.backward(1.0, -1.0, Side::Minus).unwrap();
        let c2 = f.backward(1.0, 2.0, Side::Minus).unwrap();
        let r = check_non_crossing(std::slice::from_ref(&c1), 0.2).unwrap();
        assert_eq!(r.max_overlap, 0.0);
        let r = check_non_crossing(&[c2.clone(), c1.clone()], 0.2).unwrap();
        assert!(r.satisfied && r.max_overlap == 0.0);

        let tol = CurveTolerance::default();
        let r = check_lemma1(&f, &c2, &c1, 0.25, &tol).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.gap_lhs, 3.0);
        // Γ = 1 + L(...) with L = 0 for zero mass
        assert_eq!(r.gap_rhs, 3.0);
        let r = check_lemma1(&f, &c1, &c1, 0.5, &tol).unwrap();
        assert!(r.satisfied && r.gap_lhs == 0.0);

        let r = check_separation(&f, &c1, &c2, 0.5, 1.0, &tol).unwrap();
        assert!(r.satisfied && r.rhs == 0.0);
        assert!(check_non_crossing(&[], 0.1).is_err());
    }

    #[test]
    fn crossing_curves_are_reported() {
        let g = Grid::new(-10.0, 10.0, 200).unwrap();
        // converging speeds: +1 on the left, -1 on the right, source ignored
        let v: Vec<f64> = g.centers().map(|x| if x < 0.0 { 1.0 } else { -1.0 }).collect();
        let p = CellProfile::new(g, v).unwrap();
        let mut tr = Trajectory::new(0.0, p.clone()).unwrap();
        tr.push(1.0, p).unwrap();
        let f = SolutionField::new(&tr).without_source();
        let a = f.forward(0.0, -0.5).unwrap();
        let b = f.forward(0.0, 0.5).unwrap();
        // forward curves meet at the shock, which is allowed
        let r = check_non_crossing(&[a, b], g.dx()).unwrap();
        assert!(r.satisfied, "{r:?}");

        let mut hand = f.backward(1.0, -3.0, Side::Minus).unwrap();
        let other = f.backward(1.0, -3.5, Side::Minus).unwrap();
        // swap order at the start of the range to force a crossing
        hand = Characteristic::shifted_for_tests(&hand, -1.0);
        let r = check_non_crossing(&[hand, other], g.dx()).unwrap();
        assert!(!r.satisfied);
    }

    #[test]
    fn shock_apex_cone() {
        let g = Grid::new(-10.0, 10.0, 200).unwrap();
        let v: Vec<f64> = g.centers().map(|x| if x < 0.0 { 1.0 } else { -1.0 }).collect();
        let p = CellProfile::new(g, v).unwrap();
        let mut tr = Trajectory::new(0.0, p.clone()).unwrap();
        tr.push(1.0, p).unwrap();
        let f = SolutionField::new(&tr).without_source();
        let base = f.cone_base(1.0, 0.0, 0.5).unwrap();
        assert!((base.left + 0.5).abs() < 1e-12 && (base.right - 0.5).abs() < 1e-12);
        let r = check_cone_bound(&f, 1.0, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(r.jump, 2.0);
        assert!(r.satisfied);
        assert!(cone_base(&tr, 1.0, 0.0, 1.5).is_err());
    }
}
