//! Independent reference computations for the acceptance and property suites.

#![allow(dead_code)]

use bplab_core::{CellProfile, Grid, Preset, SolveConfig};

/// `∫_a^b e^{-|x-y|} dy` split at `x`, as (left part, right part), each
/// written with `expm1` so that narrow cells keep full precision.
fn exp_pieces(x: f64, a: f64, b: f64) -> (f64, f64) {
    let mut left = 0.0;
    let mut right = 0.0;
    if a < x {
        let hi = b.min(x);
        left = (-(x - hi)).exp() * -(-(hi - a)).exp_m1();
    }
    if b > x {
        let lo = a.max(x);
        right = (-(lo - x)).exp() * -(-(b - lo)).exp_m1();
    }
    (left, right)
}

/// `∫_a^b -½ e^{-|x-y|} dy`.
fn kernel_integral(x: f64, a: f64, b: f64) -> f64 {
    let (l, r) = exp_pieces(x, a, b);
    -0.5 * (l + r)
}

/// `∫_a^b ½ sgn(x-y) e^{-|x-y|} dy`, the x-derivative of the above.
fn kernel_x_integral(x: f64, a: f64, b: f64) -> f64 {
    let (l, r) = exp_pieces(x, a, b);
    0.5 * (l - r)
}

/// O(N²) evaluation of `G*u` and `[G*u]_x` at the cell centres.
pub fn direct_convolution(p: &CellProfile) -> (Vec<f64>, Vec<f64>) {
    let g = p.grid();
    let n = g.n_cells();
    let mut phi = vec![0.0; n];
    let mut phi_x = vec![0.0; n];
    let dx = g.dx();
    // offsets from the centre by index, not by differencing coordinates
    for i in 0..n {
        for (j, &u) in p.values().iter().enumerate() {
            let off = j as f64 - i as f64;
            let (a, b) = ((off - 0.5) * dx, (off + 0.5) * dx);
            phi[i] += u * kernel_integral(0.0, a, b);
            phi_x[i] += u * kernel_x_integral(0.0, a, b);
        }
    }
    (phi, phi_x)
}

/// Cell averages of a smooth function by composite Simpson on each cell.
pub fn simpson_averages(g: &Grid, f: impl Fn(f64) -> f64) -> CellProfile {
    const M: usize = 16;
    let values = (0..g.n_cells())
        .map(|i| {
            let (a, b) = (g.interface(i), g.interface(i + 1));
            let h = (b - a) / M as f64;
            let mut s = f(a) + f(b);
            for k in 1..M {
                s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
            }
            s * h / 3.0 / (b - a)
        })
        .collect();
    CellProfile::new(*g, values).unwrap()
}

/// Pairwise cell averages onto the grid with half as many cells.
pub fn restrict(fine: &CellProfile) -> CellProfile {
    let g = fine.grid();
    let coarse = Grid::new(g.x_min(), g.x_max(), g.n_cells() / 2).unwrap();
    let v = fine.values().chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    CellProfile::new(coarse, v).unwrap()
}

pub fn l1_distance(a: &CellProfile, b: &CellProfile) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * a.dx()
}

/// Least-squares slope of `log2 err` against `-log2 h`.
pub fn observed_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| -h.log2()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

pub const DOMAIN: (f64, f64) = (-25.0, 25.0);

/// The four data of the bound suite, each supported inside `[-3, 3]`.
pub fn suite_presets() -> Vec<Preset> {
    vec![
        Preset::Box { a: -1.0, b: 1.0, height: 1.0 },
        Preset::Bump { center: 0.0, half_width: 1.0, height: 1.0 },
        Preset::Step { a: -2.0, x0: 0.0, b: 2.0, u_left: 1.0, u_right: -0.5 },
        Preset::Sawtooth { a: -3.0, b: 3.0, teeth: 3, height: 1.0 },
    ]
}

/// Two downward jumps closing on each other, merged well before `t = 2`.
pub fn merging_preset() -> Preset {
    Preset::PiecewiseConstant { breaks: vec![-1.5, -0.5, 0.0], values: vec![1.0, 0.5] }
}

pub fn config(preset: Preset, n: usize, t_end: f64, every: f64) -> SolveConfig {
    let g = Grid::new(DOMAIN.0, DOMAIN.1, n).unwrap();
    SolveConfig::new(g, preset, t_end).with_uniform_snapshots(every)
}
