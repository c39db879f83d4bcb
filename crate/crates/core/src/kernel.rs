//! Convolution with the Poisson kernel `G(x) = -½ e^{-|x|}`.
//!
//! For piecewise-constant `u` the integrals of the exponential over each cell
//! are exact. With `L_i = Σ_{j<i} u_j e^{-(i-1-j)dx}` and
//! `R_i = Σ_{j>i} u_j e^{-(j-i-1)dx}`, each obtained by one decayed running
//! sum, the values at cell centers are
//!
//! ```text
//! phi_i   = -½ [ w (L_i + R_i) + 2 (1 - e^{-dx/2}) u_i ]
//! phi_x_i =  ½ w (L_i - R_i),        w = e^{-dx/2} (1 - e^{-dx})
//! ```
//!
//! so `phi_xx - phi = u` holds in the distributional sense.

use crate::error::{BpError, Result};
use crate::grid::{CellProfile, Grid};

/// `G*u` and `[G*u]_x` sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelField {
    grid: Grid,
    phi: Vec<f64>,
    phi_x: Vec<f64>,
}

impl KernelField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_x(&self) -> &[f64] {
        &self.phi_x
    }

    /// `[G*u]_x` at `x`, linearly interpolated between cell centers. Outside
    /// the outermost centers the nearest center value is used.
    pub fn phi_x_at(&self, x: f64) -> f64 {
        interpolate_centers(&self.grid, &self.phi_x, x)
    }
}

pub(crate) fn interpolate_centers(grid: &Grid, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let s = (x - grid.center(0)) / grid.dx();
    if s <= 0.0 {
        return values[0];
    }
    if s >= (n - 1) as f64 {
        return values[n - 1];
    }
    let i = s.floor() as usize;
    let w = s - i as f64;
    (1.0 - w) * values[i] + w * values[i + 1]
}

/// Two-pass O(N) evaluation of `G*u` and `[G*u]_x` at every cell center.
pub fn convolve(p: &CellProfile) -> KernelField {
    let grid = *p.grid();
    let u = p.values();
    let n = u.len();
    let dx = grid.dx();
    let decay = (-dx).exp();
    let half = (-0.5 * dx).exp();
    let w = half * (-(-dx).exp_m1());
    let self_weight = 2.0 * (-(-0.5 * dx).exp_m1());

    let mut left = vec![0.0; n];
    for i in 1..n {
        left[i] = decay * left[i - 1] + u[i - 1];
    }
    let mut right = vec![0.0; n];
    for i in (0..n - 1).rev() {
        right[i] = decay * right[i + 1] + u[i + 1];
    }

    let phi = (0..n)
        .map(|i| -0.5 * (w * (left[i] + right[i]) + self_weight * u[i]))
        .collect();
    let phi_x = (0..n).map(|i| 0.5 * w * (left[i] - right[i])).collect();
    KernelField { grid, phi, phi_x }
}

/// Exact `[G*u]_x(x)` at an arbitrary point, O(N).
pub fn source_at(p: &CellProfile, x: f64) -> f64 {
    let grid = p.grid();
    let dx = grid.dx();
    let mut acc = 0.0;
    for (i, &u) in p.values().iter().enumerate() {
        if u == 0.0 {
            continue;
        }
        let a = grid.interface(i);
        let b = grid.interface(i + 1);
        // ∫_a^b ½ sign(x - y) e^{-|x - y|} dy, with the cell width taken as
        // dx rather than b - a whenever the cell lies on one side of x
        let left_part = if x > a {
            let (hi, width) = if x >= b { (b, dx) } else { (x, x - a) };
            -0.5 * (-(x - hi)).exp() * (-width).exp_m1()
        } else {
            0.0
        };
        let right_part = if x < b {
            let (lo, width) = if x <= a { (a, dx) } else { (x, b - x) };
            0.5 * (-(lo - x)).exp() * (-width).exp_m1()
        } else {
            0.0
        };
        acc += u * (left_part + right_part);
    }
    acc
}

/// Centered second-difference residual `max |D²phi - phi - u|` over the
/// interior cells.
pub fn poisson_residual(p: &CellProfile, k: &KernelField) -> Result<f64> {
    poisson_residual_where(p, k, |_| true)
}

/// Residual restricted to cells at least `margin` cells away from any
/// interface whose increment exceeds `jump_tol`.
pub fn poisson_residual_away_from_jumps(
    p: &CellProfile,
    k: &KernelField,
    margin: usize,
    jump_tol: f64,
) -> Result<f64> {
    let u = p.values();
    let n = u.len();
    let mut near = vec![false; n];
    for i in 0..n - 1 {
        if (u[i + 1] - u[i]).abs() > jump_tol {
            let lo = (i + 1).saturating_sub(margin);
            let hi = (i + margin).min(n - 1);
            near[lo..=hi].iter_mut().for_each(|f| *f = true);
        }
    }
    poisson_residual_where(p, k, |i| !near[i])
}

fn poisson_residual_where(
    p: &CellProfile,
    k: &KernelField,
    keep: impl Fn(usize) -> bool,
) -> Result<f64> {
    if !p.grid().same_as(k.grid()) {
        return Err(BpError::GridMismatch);
    }
    let dx2 = p.dx() * p.dx();
    let phi = k.phi();
    let u = p.values();
    Ok((1..u.len() - 1)
        .filter(|&i| keep(i))
        .map(|i| ((phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / dx2 - phi[i] - u[i]).abs())
        .fold(0.0, f64::max))
}

/// Discrete Lipschitz constant of `[G*u]_x` against `½‖u‖₁ + ‖u‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    pub max_ratio: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Adjacent center pairs suffice: any difference quotient over a longer
/// span is a convex combination of adjacent ones.
pub fn lipschitz_check(p: &CellProfile, k: &KernelField) -> LipschitzReport {
    let dx = p.dx();
    let max_ratio = k
        .phi_x()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / dx)
        .fold(0.0, f64::max);
    let bound = 0.5 * p.l1_norm() + p.linf_norm();
    LipschitzReport {
        max_ratio,
        bound,
        satisfied: max_ratio <= bound + 1e-12 * (1.0 + bound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::{sample_preset, Preset};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(N²) oracle: composite Gauss–Legendre per cell, splitting the
    /// self cell at the center so the kink of the kernel falls on a node edge.
    fn brute_force(p: &CellProfile) -> (Vec<f64>, Vec<f64>) {
        const NODES: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189_1,
            0.478_628_670_499_366_5,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
        ];
        let g = p.grid();
        let gauss = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
            let m = ((b - a) / 0.05).ceil().max(1.0) as usize;
            let h = (b - a) / m as f64;
            (0..m)
                .map(|k| {
                    let lo = a + k as f64 * h;
                    let mid = lo + 0.5 * h;
                    NODES
                        .iter()
                        .zip(WEIGHTS)
                        .map(|(t, w)| w * f(mid + 0.5 * h * t))
                        .sum::<f64>()
                        * 0.5
                        * h
                })
                .sum()
        };
        let n = g.n_cells();
        let mut phi = vec![0.0; n];
        let mut phi_x = vec![0.0; n];
        for i in 0..n {
            let x = g.center(i);
            for (j, &u) in p.values().iter().enumerate() {
                let a = g.interface(j);
                let b = g.interface(j + 1);
                let kern = |y: f64| -0.5 * (-(x - y).abs()).exp();
                let dkern = |y: f64| 0.5 * (x - y).signum() * (-(x - y).abs()).exp();
                if i == j {
                    phi[i] += u * (gauss(a, x, &kern) + gauss(x, b, &kern));
                    phi_x[i] += u * (gauss(a, x, &dkern) + gauss(x, b, &dkern));
                } else {
                    phi[i] += u * gauss(a, b, &kern);
                    phi_x[i] += u * gauss(a, b, &dkern);
                }
            }
        }
        (phi, phi_x)
    }

    fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> CellProfile {
        let g = Grid::new(-6.0, 6.0, n).unwrap();
        let vals = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        CellProfile::new(g, vals).unwrap()
    }

    fn max_rel(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 17, 64, 200] {
            let p = random_profile(&mut rng, n);
            let k = convolve(&p);
            let (phi, phi_x) = brute_force(&p);
            assert!(max_rel(k.phi(), &phi) < 1e-12, "phi n={n}");
            assert!(max_rel(k.phi_x(), &phi_x) < 1e-12, "phi_x n={n}");
        }
    }

    #[test]
    fn zero_profile_gives_zero_field() {
        let p = CellProfile::zeros(Grid::new(0.0, 1.0, 10).unwrap());
        let k = convolve(&p);
        assert!(k.phi().iter().chain(k.phi_x()).all(|&v| v == 0.0));
        assert_eq!(poisson_residual(&p, &k).unwrap(), 0.0);
    }

    #[test]
    fn box_field_is_odd_and_matches_closed_form() {
        // dx = 2/41 puts interfaces on ±1 and a cell center on x = 2
        let g = Grid::new(-11.0, 11.0, 451).unwrap();
        let p = sample_preset(
            &g,
            &Preset::Box {
                a: -1.0,
                b: 1.0,
                height: 1.0,
            },
            0.0,
        )
        .unwrap();
        let k = convolve(&p);
        let mid = g.cell_of(0.0);
        assert!((g.center(mid)).abs() < 1e-12);
        assert!(k.phi_x()[mid].abs() < 1e-14);
        let i2 = g.cell_of(2.0);
        assert!((g.center(i2) - 2.0).abs() < 1e-12);
        let exact = 0.5 * (-2.0f64).exp() * (1.0f64.exp() - (-1.0f64).exp());
        assert!((k.phi_x()[i2] - exact).abs() < 1e-10);
        assert!((exact - 0.159_046_19).abs() < 1e-8);
        assert!((source_at(&p, 2.0) - exact).abs() < 1e-12);
    }

    #[test]
    fn point_evaluation_matches_centers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_profile(&mut rng, 50);
        let k = convolve(&p);
        for i in [0, 7, 25, 49] {
            let x = p.grid().center(i);
            assert!((source_at(&p, x) - k.phi_x()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lipschitz_bound_holds() {
        let g = Grid::new(-10.0, 10.0, 400).unwrap();
        let p = sample_preset(
            &g,
            &Preset::Box {
                a: -1.0,
                b: 1.0,
                height: 1.0,
            },
            0.0,
        )
        .unwrap();
        let r = lipschitz_check(&p, &convolve(&p));
        assert!((r.bound - 2.0).abs() < 1e-12);
        assert!(r.satisfied && r.max_ratio <= 2.0);
        let scaled = p.scaled(-3.0);
        let rs = lipschitz_check(&scaled, &convolve(&scaled));
        assert!((rs.bound - 3.0 * r.bound).abs() < 1e-12);
        assert!((rs.max_ratio - 3.0 * r.max_ratio).abs() < 1e-10);
        let z = CellProfile::zeros(g);
        let rz = lipschitz_check(&z, &convolve(&z));
        assert_eq!((rz.max_ratio, rz.bound), (0.0, 0.0));
        assert!(rz.satisfied);
    }

    #[test]
    fn residual_rejects_mismatched_grids() {
        let a = CellProfile::zeros(Grid::new(0.0, 1.0, 10).unwrap());
        let b = CellProfile::zeros(Grid::new(0.0, 1.0, 11).unwrap());
        assert_eq!(poisson_residual(&a, &convolve(&b)), Err(BpError::GridMismatch));
    }

    #[test]
    fn linear_and_translation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(-20.0, 20.0, 400).unwrap();
        let mut a = vec![0.0; 400];
        let mut b = vec![0.0; 400];
        for i in 150..250 {
            a[i] = rng.gen_range(-1.0..1.0);
            b[i] = rng.gen_range(-1.0..1.0);
        }
        let p = CellProfile::new(g, a.clone()).unwrap();
        let q = CellProfile::new(g, b).unwrap();
        let s = p.combine(2.0, &q, -0.5).unwrap();
        let (kp, kq, ks) = (convolve(&p), convolve(&q), convolve(&s));
        for i in 0..400 {
            let lin = 2.0 * kp.phi_x()[i] - 0.5 * kq.phi_x()[i];
            assert!((ks.phi_x()[i] - lin).abs() < 1e-13);
        }
        let m = 30;
        let mut shifted = vec![0.0; 400];
        shifted[m..].copy_from_slice(&a[..400 - m]);
        let ksh = convolve(&CellProfile::new(g, shifted).unwrap());
        for i in 100..300 {
            assert!((ksh.phi_x()[i + m] - kp.phi_x()[i]).abs() < 1e-13);
            assert!((ksh.phi()[i + m] - kp.phi()[i]).abs() < 1e-13);
        }
    }
}
