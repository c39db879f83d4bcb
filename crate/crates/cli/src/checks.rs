use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use bplab_core::bv::{decompose, default_thresholds, sbv_verdict};
use bplab_core::characteristics::bounds::{bounds_constants, f_sigma_bound, BoundsInput};
use bplab_core::characteristics::checks::{check_lemma1, check_separation, CurveTolerance};
use bplab_core::characteristics::fsigma::monotonicity_defect;
use bplab_core::characteristics::{Characteristic, Side, SolutionField};
use bplab_core::solver::{
    entropy_check_with, l1_bound_check, linf_bound_check, oleinik_check, BoundCheckReport,
    CheckTolerance, EntropyModel,
};
use bplab_core::Trajectory;

use crate::error::CliResult as Result;

use crate::experiment::FSigmaParams;
use crate::output::OutDir;

/// Residual of the genuine ODE along a backward curve, in units of `dx + dt`.
pub const ODE_CONSTANT: f64 = 5.0;
pub const ENTROPY_KS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
const SBV_TOL: f64 = 0.1;

/// Outcome of one check: its name, whether it passed and a summary line.
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
}

#[derive(Serialize)]
struct BoundRow {
    time: f64,
    lhs: f64,
    rhs: f64,
    margin: f64,
    satisfied: bool,
}

impl From<BoundCheckReport> for BoundRow {
    fn from(r: BoundCheckReport) -> Self {
        BoundRow {
            time: r.time,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            satisfied: r.satisfied,
        }
    }
}

pub fn bound_check(
    name: &'static str,
    traj: &Trajectory,
    t_min: f64,
    tol: &CheckTolerance,
    out: &mut OutDir,
) -> Result<Outcome> {
    let check = match name {
        "l1" => l1_bound_check,
        "linf" => linf_bound_check,
        _ => oleinik_check,
    };
    let mut rows = Vec::new();
    for &t in traj.times().iter().filter(|&&t| t >= t_min && t > 0.0) {
        rows.push(BoundRow::from(check(traj, t, tol)?));
    }
    out.write_csv(&format!("{name}.csv"), &["time", "lhs", "rhs", "margin", "satisfied"], &rows)?;
    let failed: Vec<&BoundRow> = rows.iter().filter(|r| !r.satisfied).collect();
    let summary = match failed.first() {
        None => format!("{} snapshots", rows.len()),
        Some(r) => format!(
            "{} of {} snapshots fail, first at t={} with margin {:.6e}",
            failed.len(),
            rows.len(),
            r.time,
            r.margin
        ),
    };
    Ok(Outcome {
        name,
        passed: failed.is_empty(),
        summary,
    })
}

#[derive(Serialize)]
struct EntropyRow {
    k: f64,
    max_violation: f64,
    tol: f64,
    satisfied: bool,
    worst_time: Option<f64>,
    worst_cell: Option<usize>,
}

pub fn entropy(traj: &Trajectory, model: EntropyModel, tol: &CheckTolerance, out: &mut OutDir) -> Result<Outcome> {
    let mut rows = Vec::new();
    for k in ENTROPY_KS {
        let r = entropy_check_with(traj, &[k], tol, model)?;
        rows.push(EntropyRow {
            k,
            max_violation: r.max_violation,
            tol: r.tol,
            satisfied: r.satisfied,
            worst_time: r.worst.map(|w| w.0),
            worst_cell: r.worst.map(|w| w.1),
        });
    }
    out.write_csv(
        "entropy.csv",
        &["k", "max_violation", "tol", "satisfied", "worst_time", "worst_cell"],
        &rows,
    )?;
    let worst = rows.iter().map(|r| r.max_violation).fold(0.0, f64::max);
    Ok(Outcome {
        name: "entropy",
        passed: rows.iter().all(|r| r.satisfied),
        summary: format!("max violation {worst:.6e}, tol {:.6e}", rows[0].tol),
    })
}

#[derive(Serialize)]
struct BvRow {
    time: f64,
    tv: f64,
    ac: f64,
    jump: f64,
    residual: f64,
    verdict: bool,
}

#[derive(Serialize)]
struct JumpRow {
    time: f64,
    position: f64,
    u_minus: f64,
    u_plus: f64,
    mass: f64,
}

pub fn bv(traj: &Trajectory, t_min: f64, out: &mut OutDir) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut jumps = Vec::new();
    for (t, p) in traj.iter().filter(|(t, _)| *t >= t_min && *t > 0.0) {
        let (theta, ac_scale) = default_thresholds(p.dx(), t, traj.u0_l1())?;
        let d = decompose(p, theta, ac_scale)?;
        rows.push(BvRow {
            time: t,
            tv: d.total_variation,
            ac: d.ac_mass,
            jump: d.jump_mass,
            residual: d.singular_residual,
            verdict: sbv_verdict(&d, SBV_TOL),
        });
        jumps.extend(d.jump_records.iter().map(|r| JumpRow {
            time: t,
            position: r.position,
            u_minus: r.u_minus,
            u_plus: r.u_plus,
            mass: r.mass,
        }));
    }
    out.write_csv("bv.csv", &["time", "tv", "ac", "jump", "residual", "verdict"], &rows)?;
    out.write_csv("jumps.csv", &["time", "position", "u_minus", "u_plus", "mass"], &jumps)?;
    let failed = rows.iter().filter(|r| !r.verdict).count();
    Ok(Outcome {
        name: "bv",
        passed: failed == 0,
        summary: format!("{failed} of {} snapshots carry a singular residual", rows.len()),
    })
}

#[derive(Serialize)]
struct FSigmaRow {
    t: f64,
    #[serde(rename = "F")]
    f: f64,
    overlap_flag: bool,
}

pub fn fsigma(traj: &Trajectory, params: &FSigmaParams, scale: f64, out: &mut OutDir) -> Result<Outcome> {
    let big_t = traj.end_time();
    let times: Vec<f64> = if params.times.is_empty() {
        traj.times().iter().copied().filter(|&t| t > params.sigma).collect()
    } else {
        params.times.clone()
    };
    let field = SolutionField::new(traj);
    let points = field.f_sigma(params.sigma, params.z1, params.z2, &times)?;
    let rows: Vec<FSigmaRow> = points
        .iter()
        .map(|p| FSigmaRow {
            t: p.t,
            f: p.f,
            overlap_flag: p.overlap_flag,
        })
        .collect();
    out.write_csv("fsigma.csv", &["t", "F", "overlap_flag"], &rows)?;
    let report = bounds_constants(BoundsInput {
        t: big_t,
        s: 0.5 * params.sigma,
        t0: 0.5 * params.sigma,
        sigma: params.sigma,
        big_t,
        u0_l1: traj.u0_l1(),
        z1: params.z1,
        z2: params.z2,
    })?;
    out.write("bounds.txt", report.to_key_value().as_bytes())?;
    let dx = traj.grid().dx();
    let defect = monotonicity_defect(&points, scale * dx);
    let bound = f_sigma_bound(params.sigma, big_t, traj.u0_l1(), params.z1, params.z2);
    let max_f = points.iter().map(|p| p.f).fold(0.0, f64::max);
    let passed = defect <= 0.0 && max_f <= bound;
    Ok(Outcome {
        name: "fsigma",
        passed,
        summary: format!("largest decrease beyond allowance {defect:.6e}, max F {max_f:.6e}, bound {bound:.6e}"),
    })
}

#[derive(Serialize)]
struct PairRow {
    pair: usize,
    t: f64,
    x1: f64,
    x2: f64,
    ode_residual: f64,
    ode_tol: f64,
    spreading_margin: f64,
    gap_lhs: f64,
    gap_rhs: f64,
    separation_lhs: f64,
    separation_rhs: f64,
    satisfied: bool,
}

/// Curve samples as `s,xi,v,kind`.
pub fn curve_rows(c: &Characteristic) -> Vec<(f64, f64, f64, &'static str)> {
    (0..c.len())
        .map(|i| (c.times()[i], c.xi()[i], c.v()[i], c.kinds()[i].as_str()))
        .collect()
}

/// Random backward pairs from shared apex times; each pair must satisfy the
/// genuine ODE, the spreading and gap estimates and the separation estimate.
pub fn characteristic_pairs(
    traj: &Trajectory,
    pairs: usize,
    sigma: f64,
    seed: u64,
    scale: f64,
    out: &mut OutDir,
) -> Result<Outcome> {
    let field = SolutionField::new(traj);
    let g = traj.grid();
    let big_t = traj.end_time();
    let times: Vec<f64> = traj.times().iter().copied().filter(|&t| t > 2.0 * sigma).collect();
    if times.is_empty() {
        return Err(crate::error::CliError::Usage(format!(
            "no snapshot after 2σ = {} to start curves from",
            2.0 * sigma
        )));
    }
    let (lo, hi) = interesting_range(traj);
    let tol = CurveTolerance::default().with_scale(scale);
    let unit = g.dx() + field.max_spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(pairs);
    for pair in 0..pairs {
        let t = times[rng.gen_range(0..times.len())];
        let x1 = rng.gen_range(lo..hi);
        let x2 = rng.gen_range(lo..hi);
        let c1 = field.backward(t, x1, Side::Minus)?;
        let c2 = field.backward(t, x2, Side::Plus)?;
        let ode = field.ode_residual(&c1, sigma).max(field.ode_residual(&c2, sigma));
        let ode_tol = scale * ODE_CONSTANT * unit;
        let l = check_lemma1(&field, &c1, &c2, 0.5 * sigma, &tol)?;
        let s = check_separation(&field, &c1, &c2, sigma, big_t, &tol)?;
        rows.push(PairRow {
            pair,
            t,
            x1,
            x2,
            ode_residual: ode,
            ode_tol,
            spreading_margin: l.spreading_margin,
            gap_lhs: l.gap_lhs,
            gap_rhs: l.gap_rhs,
            separation_lhs: s.lhs,
            separation_rhs: s.rhs,
            satisfied: ode <= ode_tol && l.satisfied && s.satisfied,
        });
    }
    out.write_csv(
        "characteristics.csv",
        &[
            "pair", "t", "x1", "x2", "ode_residual", "ode_tol", "spreading_margin", "gap_lhs",
            "gap_rhs", "separation_lhs", "separation_rhs", "satisfied",
        ],
        &rows,
    )?;
    let failed = rows.iter().filter(|r| !r.satisfied).count();
    Ok(Outcome {
        name: "characteristics",
        passed: failed == 0,
        summary: format!("{failed} of {pairs} curve pairs fail"),
    })
}

/// Where the solution is non-zero at the final time, widened by two units
/// and kept two units inside the grid.
fn interesting_range(traj: &Trajectory) -> (f64, f64) {
    let g = traj.grid();
    let last = traj.profiles().last().unwrap();
    let nz: Vec<usize> = (0..g.n_cells()).filter(|&i| last.values()[i].abs() > 1e-6).collect();
    let (a, b) = match (nz.first(), nz.last()) {
        (Some(&i), Some(&j)) => (g.center(i), g.center(j)),
        _ => (-1.0, 1.0),
    };
    let margin = 2.0;
    let lo = (a - margin).max(g.x_min() + margin);
    let hi = (b + margin).min(g.x_max() - margin);
    if lo < hi {
        (lo, hi)
    } else {
        let mid = 0.5 * (g.x_min() + g.x_max());
        (mid - 0.25 * g.length(), mid + 0.25 * g.length())
    }
}
