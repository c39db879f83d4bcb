//! Discrete split of `Du` into absolutely continuous, jump and singular parts.

use crate::characteristics::bounds::oleinik_constant;
use crate::characteristics::jump_threshold;
use crate::error::{invalid, BpError, Result};
use crate::grid::{CellProfile, Grid};

/// One atom of the jump part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub position: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub mass: f64,
}

impl JumpRecord {
    /// Downward jumps are the only admissible ones.
    pub fn is_admissible(&self) -> bool {
        self.mass < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BVDecomposition {
    pub total_variation: f64,
    pub ac_mass: f64,
    pub jump_records: Vec<JumpRecord>,
    pub jump_mass: f64,
    pub singular_residual: f64,
}

impl BVDecomposition {
    /// `|tv - (ac + jump + residual)|`.
    pub fn additivity_error(&self) -> f64 {
        (self.total_variation - (self.ac_mass + self.jump_mass + self.singular_residual)).abs()
    }
}

pub fn total_variation(p: &CellProfile) -> f64 {
    p.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Classifies every interface increment exactly once.
///
/// Adjacent jump increments of the same sign are reported as a single record
/// placed at their mass-weighted interface, since a captured shock usually
/// straddles two interfaces.
pub fn decompose(p: &CellProfile, theta: f64, ac_scale: f64) -> Result<BVDecomposition> {
    if !(theta > 0.0) || !(ac_scale > 0.0) {
        return Err(invalid(format!(
            "decompose needs theta > 0 and ac_scale > 0, got {theta} and {ac_scale}"
        )));
    }
    let g = p.grid();
    let dx = g.dx();
    let u = p.values();
    let mut tv = 0.0;
    let mut ac = 0.0;
    let mut jump = 0.0;
    let mut residual = 0.0;
    let mut records: Vec<JumpRecord> = Vec::new();
    // (first interface, weighted position sum, mass) of the record being built
    let mut open: Option<(usize, f64, f64)> = None;
    let mut last_jump = usize::MAX;

    for i in 0..u.len().saturating_sub(1) {
        let d = u[i + 1] - u[i];
        let a = d.abs();
        tv += a;
        if a >= theta {
            jump += a;
            let x = g.interface(i + 1);
            match open {
                Some((_, ref mut wx, ref mut m)) if last_jump + 1 == i && m.signum() == d.signum() => {
                    *wx += a * x;
                    *m += d;
                }
                _ => {
                    if let Some(r) = open.take() {
                        records.push(finish(u, r));
                    }
                    open = Some((i, a * x, d));
                }
            }
            last_jump = i;
        } else if a / dx <= ac_scale {
            ac += a;
        } else {
            residual += a;
        }
    }
    if let Some(r) = open {
        records.push(finish(u, r));
    }
    Ok(BVDecomposition {
        total_variation: tv,
        ac_mass: ac,
        jump_records: records,
        jump_mass: jump,
        singular_residual: residual,
    })
}

fn finish(u: &[f64], (first, wx, mass): (usize, f64, f64)) -> JumpRecord {
    let u_minus = u[first];
    JumpRecord {
        position: wx / mass.abs(),
        u_minus,
        u_plus: u_minus + mass,
        mass,
    }
}

/// `θ = 0.5 √dx` (floored like the shock detector) and `ac_scale = 2 K_t / t`.
pub fn default_thresholds(dx: f64, t: f64, u0_l1: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(invalid(format!("default ac scale needs t > 0, got {t}")));
    }
    Ok((jump_threshold(dx), 2.0 * oleinik_constant(t, u0_l1) / t))
}

pub fn sbv_verdict(d: &BVDecomposition, tol: f64) -> bool {
    d.singular_residual <= tol * d.total_variation.max(1.0)
}

/// Level-`level` Cantor–Vitali iterate on `[a, a + 1]` as exact cell averages,
/// zero to the left and one to the right.
///
/// `a` is the grid interface closest to `centre - 1/2`. Each `3^-level`
/// sub-interval must be a whole number of cells.
pub fn cantor_staircase(grid: &Grid, level: u32) -> Result<CellProfile> {
    if level == 0 || level > 19 {
        return Err(invalid(format!("cantor level must be in 1..=19, got {level}")));
    }
    let dx = grid.dx();
    let sub = 3f64.powi(level as i32);
    let per_sub = 1.0 / (dx * sub);
    let cells = per_sub.round();
    if cells < 1.0 || (per_sub - cells).abs() > 1e-6 * per_sub {
        return Err(BpError::InsufficientResolution(format!(
            "dx = {dx} does not tile 3^-{level} sub-intervals ({per_sub} cells each)"
        )));
    }
    let n_unit = (cells * sub) as usize;
    if n_unit > grid.n_cells() {
        return Err(BpError::InsufficientResolution(format!(
            "grid has {} cells but the unit interval needs {n_unit}",
            grid.n_cells()
        )));
    }
    let first = (grid.n_cells() - n_unit) / 2;
    let cells = cells as usize;
    let step = 0.5f64.powi(level as i32);
    let values = (0..grid.n_cells())
        .map(|i| {
            if i < first {
                0.0
            } else if i >= first + n_unit {
                1.0
            } else {
                let (j, q) = ((i - first) / cells, (i - first) % cells);
                let (left, ramp) = triadic_node(j as u64, level);
                if ramp {
                    left + step * (q as f64 + 0.5) / cells as f64
                } else {
                    left
                }
            }
        })
        .collect();
    CellProfile::new(*grid, values)
}

/// Value of the Cantor function at `j 3^-level` and whether the iterate
/// ramps on the following sub-interval (no digit equal to one).
fn triadic_node(j: u64, level: u32) -> (f64, bool) {
    let mut value = 0.0;
    let mut weight = 0.5;
    for k in (0..level).rev() {
        match (j / 3u64.pow(k)) % 3 {
            0 => {}
            1 => return (value + weight, false),
            _ => value += weight,
        }
        weight *= 0.5;
    }
    (value, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::{cantor_integral, cantor_iterate, sample_preset, Preset};
    use proptest::prelude::*;

    #[test]
    fn variation_of_simple_profiles() {
        let g = Grid::new(-4.0, 4.0, 80).unwrap();
        assert_eq!(total_variation(&CellProfile::zeros(g)), 0.0);
        let b = sample_preset(&g, &Preset::Box { a: -1.0, b: 1.0, height: 1.0 }, 0.0).unwrap();
        assert!((total_variation(&b) - 2.0).abs() < 1e-12);
        let ramp = CellProfile::new(g, (0..80).map(|i| (i as f64).sqrt()).collect()).unwrap();
        assert!((total_variation(&ramp) - 79f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unit_step_is_all_jump() {
        let g = Grid::new(-2.0, 2.0, 40).unwrap();
        let v = (0..40).map(|i| if i < 20 { 1.0 } else { 0.0 }).collect();
        let p = CellProfile::new(g, v).unwrap();
        let d = decompose(&p, 0.1, 1.0).unwrap();
        assert_eq!(d.jump_mass, 1.0);
        assert_eq!(d.ac_mass, 0.0);
        assert_eq!(d.singular_residual, 0.0);
        assert_eq!(d.jump_records.len(), 1);
        let r = d.jump_records[0];
        assert_eq!(r.position, 0.0);
        assert!(r.is_admissible());
        assert_eq!((r.u_minus, r.u_plus), (1.0, 0.0));
        assert!(sbv_verdict(&d, 0.1));
    }

    #[test]
    fn two_interface_shock_is_one_record() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let v = vec![2.0, 2.0, 2.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let p = CellProfile::new(g, v).unwrap();
        let d = decompose(&p, 0.5, 1.0).unwrap();
        assert_eq!(d.jump_records.len(), 1);
        let r = d.jump_records[0];
        assert!((r.position - 0.45).abs() < 1e-12);
        assert_eq!((r.u_minus, r.u_plus, r.mass), (2.0, 0.0, -2.0));
        // an upward jump right after is a separate record
        let v = vec![0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let d = decompose(&CellProfile::new(g, v).unwrap(), 0.5, 1.0).unwrap();
        assert_eq!(d.jump_records.len(), 2);
        assert!(!d.jump_records[0].is_admissible());
    }

    #[test]
    fn smooth_bump_has_no_singular_part() {
        for n in [400, 800, 1600] {
            let g = Grid::new(-4.0, 4.0, n).unwrap();
            let p = sample_preset(&g, &Preset::Bump { center: 0.0, half_width: 1.0, height: 1.0 }, 0.0)
                .unwrap();
            // (1 - r²)² has max slope 16 / (3√3) at r = 1/√3
            let slope = 16.0 / (3.0 * 3f64.sqrt());
            let d = decompose(&p, 0.5 * g.dx().sqrt(), 2.0 * slope).unwrap();
            assert_eq!(d.jump_mass, 0.0);
            assert!(d.singular_residual <= 0.05 * d.total_variation);
            assert!((d.total_variation - 2.0).abs() < 1e-3);
        }
    }

    #[test]
    fn cantor_level_one() {
        let g = Grid::new(0.0, 3.0, 9).unwrap();
        let p = cantor_staircase(&g, 1).unwrap();
        let v = p.values();
        assert_eq!(&v[..3], &[0.0, 0.0, 0.0]);
        assert!((v[3] - 0.25).abs() < 1e-15);
        assert_eq!(v[4], 0.5);
        assert!((v[5] - 0.75).abs() < 1e-15);
        assert_eq!(&v[6..], &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn cantor_level_eight_is_singular() {
        let n = 3usize.pow(8);
        let g = Grid::new(-1.0, 2.0, 3 * n).unwrap();
        let p = cantor_staircase(&g, 8).unwrap();
        let v = p.values();
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
        assert!((total_variation(&p) - 1.0).abs() < 1e-12);
        let d = decompose(&p, 0.5 * g.dx().sqrt(), 2.0).unwrap();
        assert_eq!(d.jump_mass, 0.0);
        assert!(d.ac_mass < 1e-12);
        assert!((d.singular_residual - 1.0).abs() < 1e-12);
        assert!(!sbv_verdict(&d, 0.1));
        // each ramp cell carries 2^-8; its two increments are half that each
        let steps: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 0.0).collect();
        assert_eq!(steps.len(), 512);
        assert!(steps.iter().all(|&s| (s - 2f64.powi(-9)).abs() < 1e-15));
    }

    #[test]
    fn cantor_averages_match_the_integral() {
        for (level, per_sub) in [(1, 5), (3, 4), (5, 1)] {
            let n = 3usize.pow(level) * per_sub;
            let g = Grid::new(0.0, 1.0, n).unwrap();
            let p = cantor_staircase(&g, level).unwrap();
            let h = g.dx();
            for (i, &v) in p.values().iter().enumerate() {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let avg = (cantor_integral(level, b) - cantor_integral(level, a)) / h;
                assert!((v - avg).abs() < 1e-10);
                assert!(cantor_iterate(level, a) - 1e-12 <= v && v <= cantor_iterate(level, b) + 1e-12);
            }
        }
    }

    #[test]
    fn cantor_rejects_misaligned_grids() {
        let g = Grid::new(0.0, 3.0, 100).unwrap();
        assert!(matches!(cantor_staircase(&g, 2), Err(BpError::InsufficientResolution(_))));
        let g = Grid::new(0.0, 0.5, 27).unwrap();
        assert!(matches!(cantor_staircase(&g, 3), Err(BpError::InsufficientResolution(_))));
        let g = Grid::new(0.0, 1.0, 27).unwrap();
        assert!(cantor_staircase(&g, 0).is_err());
        assert!(cantor_staircase(&g, 3).is_ok());
    }

    #[test]
    fn rejects_bad_thresholds() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let p = CellProfile::zeros(g);
        assert!(decompose(&p, 0.0, 1.0).is_err());
        assert!(decompose(&p, 0.1, f64::NAN).is_err());
        assert!(sbv_verdict(&decompose(&p, 0.1, 1.0).unwrap(), 0.0));
    }

    fn profile() -> impl Strategy<Value = CellProfile> {
        prop::collection::vec(-3.0f64..3.0, 2..200)
            .prop_map(|v| CellProfile::new(Grid::new(0.0, 1.0, v.len()).unwrap(), v).unwrap())
    }

    proptest! {
        #[test]
        fn additive_and_nonnegative(p in profile(), theta in 1e-3f64..2.0, ac in 1e-2f64..100.0) {
            let d = decompose(&p, theta, ac).unwrap();
            prop_assert!(d.ac_mass >= 0.0 && d.jump_mass >= 0.0 && d.singular_residual >= 0.0);
            prop_assert!(d.additivity_error() <= 1e-12 * d.total_variation.max(1.0));
            prop_assert_eq!(d.total_variation, total_variation(&p));
            let rec: f64 = d.jump_records.iter().map(|r| r.mass.abs()).sum();
            prop_assert!((rec - d.jump_mass).abs() <= 1e-12 * d.jump_mass.max(1.0));
        }

        #[test]
        fn thresholds_are_monotone(p in profile(), theta in 1e-3f64..1.0, ac in 1e-2f64..50.0, f in 1.0f64..4.0) {
            let base = decompose(&p, theta, ac).unwrap();
            prop_assert!(decompose(&p, theta * f, ac).unwrap().jump_mass <= base.jump_mass);
            prop_assert!(decompose(&p, theta, ac / f).unwrap().ac_mass <= base.ac_mass);
        }
    }
}
