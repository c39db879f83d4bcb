//! First-order Godunov solver for `u_t + (u²/2)_x = 0` with zero ghost cells.

use crate::error::{BpError, Result};
use crate::grid::CellProfile;

/// Floor on the wave speed so the zero profile gets a finite step.
pub const EPS_SPEED: f64 = 1e-12;

pub const DEFAULT_CFL: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    cfl: f64,
    max_dt: f64,
}

impl SweepOptions {
    pub fn new(cfl: f64, max_dt: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(BpError::InvalidArgument(format!(
                "cfl must lie in (0, 1), got {cfl}"
            )));
        }
        if !(max_dt > 0.0 && max_dt.is_finite()) {
            return Err(BpError::InvalidArgument(format!(
                "max_dt must be positive and finite, got {max_dt}"
            )));
        }
        Ok(SweepOptions { cfl, max_dt })
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn max_dt(&self) -> f64 {
        self.max_dt
    }
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cfl: DEFAULT_CFL,
            max_dt: 0.05,
        }
    }
}

#[inline]
pub fn flux(u: f64) -> f64 {
    0.5 * u * u
}

/// Exact Riemann flux for `f(u) = u²/2`.
#[inline]
pub fn godunov_flux(ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        // rarefaction: minimum of f over [ul, ur]
        if ul > 0.0 {
            flux(ul)
        } else if ur < 0.0 {
            flux(ur)
        } else {
            0.0
        }
    } else if ul + ur >= 0.0 {
        // shock moving right, or stationary (tie goes to the left state)
        flux(ul)
    } else {
        flux(ur)
    }
}

/// Rankine–Hugoniot speed of an admissible jump.
pub fn shock_speed(u_minus: f64, u_plus: f64) -> Result<f64> {
    if !(u_minus > u_plus) {
        return Err(BpError::InadmissibleJump { u_minus, u_plus });
    }
    Ok(0.5 * (u_minus + u_plus))
}

pub fn stable_dt(p: &CellProfile, opts: &SweepOptions) -> f64 {
    let speed = p.linf_norm().max(EPS_SPEED);
    opts.max_dt.min(opts.cfl * p.dx() / speed)
}

/// Largest step for which the Godunov update stays monotone (CFL number 1).
pub fn stability_limit(p: &CellProfile) -> f64 {
    p.dx() / p.linf_norm().max(EPS_SPEED)
}

/// One conservative Godunov update.
pub fn burgers_sweep(p: &CellProfile, dt: f64) -> Result<CellProfile> {
    let bound = stability_limit(p);
    if !(dt >= 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(BpError::UnstableStep { dt, bound });
    }
    Ok(sweep_unchecked(p, dt))
}

pub(crate) fn sweep_unchecked(p: &CellProfile, dt: f64) -> CellProfile {
    let u = p.values();
    let n = u.len();
    let lambda = dt / p.dx();
    // interface k sits between cells k-1 and k; k = 0 and k = n touch the ghosts
    let mut fluxes = Vec::with_capacity(n + 1);
    fluxes.push(godunov_flux(0.0, u[0]));
    fluxes.extend(u.windows(2).map(|w| godunov_flux(w[0], w[1])));
    fluxes.push(godunov_flux(u[n - 1], 0.0));
    let values = u
        .iter()
        .enumerate()
        .map(|(i, v)| v - lambda * (fluxes[i + 1] - fluxes[i]))
        .collect();
    CellProfile::from_raw(*p.grid(), values)
}

/// Crandall–Majda numerical entropy flux for `|u - k|`.
#[inline]
pub fn kruzkov_flux(ul: f64, ur: f64, k: f64) -> f64 {
    godunov_flux(ul.max(k), ur.max(k)) - godunov_flux(ul.min(k), ur.min(k))
}

/// Interface entropy fluxes `Q_{k}` for k = 0..=n, ghost cells zero.
pub fn kruzkov_fluxes(p: &CellProfile, k: f64) -> Vec<f64> {
    let u = p.values();
    let n = u.len();
    let mut q = Vec::with_capacity(n + 1);
    q.push(kruzkov_flux(0.0, u[0], k));
    q.extend(u.windows(2).map(|w| kruzkov_flux(w[0], w[1], k)));
    q.push(kruzkov_flux(u[n - 1], 0.0, k));
    q
}

pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}
