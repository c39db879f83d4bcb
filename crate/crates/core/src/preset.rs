//! Initial data presets, sampled as exact cell averages.
//!
//! Every preset has a closed-form antiderivative, so the average over cell
//! `[x_i, x_{i+1}]` is `(U(x_{i+1}) - U(x_i)) / dx` with no quadrature error.

use crate::error::{BpError, Result};
use crate::grid::{CellProfile, Grid};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Zero,
    /// `height` on `[a, b)`.
    Box { a: f64, b: f64, height: f64 },
    /// `height * (1 - r^2)^2` with `r = (x - center) / half_width`, a C¹ compact bump.
    Bump {
        center: f64,
        half_width: f64,
        height: f64,
    },
    /// `teeth` linear ramps from `-height` up to `height` on `[a, b)`, each
    /// followed by a downward jump.
    Sawtooth {
        a: f64,
        b: f64,
        teeth: usize,
        height: f64,
    },
    /// `u_left` on `[a, x0)`, `u_right` on `[x0, b)`; requires `u_left > u_right`.
    Step {
        a: f64,
        x0: f64,
        b: f64,
        u_left: f64,
        u_right: f64,
    },
    /// `values[k]` on `[breaks[k], breaks[k + 1])`.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    /// `height * (1 - C_level((x - a) / length))` on `[a, a + length)`, a
    /// descending Cantor staircase.
    Cantor {
        a: f64,
        length: f64,
        level: u32,
        height: f64,
    },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::Box { .. } => "box",
            Preset::Bump { .. } => "bump",
            Preset::Sawtooth { .. } => "sawtooth",
            Preset::Step { .. } => "step",
            Preset::PiecewiseConstant { .. } => "piecewise",
            Preset::Cantor { .. } => "cantor",
        }
    }

    /// Closed support interval, `None` for the zero datum.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Preset::Zero => None,
            Preset::Box { a, b, .. } => Some((a, b)),
            Preset::Bump {
                center, half_width, ..
            } => Some((center - half_width, center + half_width)),
            Preset::Sawtooth { a, b, .. } => Some((a, b)),
            Preset::Step { a, b, .. } => Some((a, b)),
            Preset::PiecewiseConstant { ref breaks, .. } => {
                Some((breaks[0], *breaks.last().unwrap()))
            }
            Preset::Cantor { a, length, .. } => Some((a, a + length)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BpError::InvalidPreset(m));
        let all_finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Preset::Zero => Ok(()),
            Preset::Box { a, b, height } => {
                if !all_finite(&[*a, *b, *height]) || a >= b {
                    return bad(format!("box needs finite a < b, got [{a}, {b})"));
                }
                Ok(())
            }
            Preset::Bump {
                center,
                half_width,
                height,
            } => {
                if !all_finite(&[*center, *half_width, *height]) || *half_width <= 0.0 {
                    return bad("bump needs finite parameters and half_width > 0".into());
                }
                Ok(())
            }
            Preset::Sawtooth {
                a,
                b,
                teeth,
                height,
            } => {
                if !all_finite(&[*a, *b, *height]) || a >= b || *teeth == 0 {
                    return bad("sawtooth needs finite a < b and at least one tooth".into());
                }
                Ok(())
            }
            Preset::Step {
                a,
                x0,
                b,
                u_left,
                u_right,
            } => {
                if !all_finite(&[*a, *x0, *b, *u_left, *u_right]) || !(a < x0 && x0 < b) {
                    return bad("step needs finite a < x0 < b".into());
                }
                if u_left <= u_right {
                    return bad(format!(
                        "step must decrease, got u_left = {u_left}, u_right = {u_right}"
                    ));
                }
                Ok(())
            }
            Preset::PiecewiseConstant { breaks, values } => {
                if breaks.len() < 2 || values.len() + 1 != breaks.len() {
                    return bad("piecewise preset needs len(breaks) = len(values) + 1 >= 2".into());
                }
                if !all_finite(breaks) || !all_finite(values) {
                    return bad("piecewise preset has non-finite entries".into());
                }
                if breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("piecewise breaks must increase strictly".into());
                }
                Ok(())
            }
            Preset::Cantor {
                a,
                length,
                level,
                height,
            } => {
                if !all_finite(&[*a, *length, *height]) || *length <= 0.0 {
                    return bad("cantor preset needs finite a, height and length > 0".into());
                }
                if *level > 30 {
                    return bad(format!("cantor level {level} is too deep"));
                }
                Ok(())
            }
        }
    }

    /// Antiderivative `U(x) = ∫_{-∞}^x u`.
    fn antiderivative(&self, x: f64) -> f64 {
        match *self {
            Preset::Zero => 0.0,
            Preset::Box { a, b, height } => height * (x.clamp(a, b) - a),
            Preset::Bump {
                center,
                half_width,
                height,
            } => {
                let r = ((x - center) / half_width).clamp(-1.0, 1.0);
                let prim = |r: f64| r - 2.0 * r.powi(3) / 3.0 + r.powi(5) / 5.0;
                height * half_width * (prim(r) - prim(-1.0))
            }
            Preset::Sawtooth {
                a,
                b,
                teeth,
                height,
            } => {
                let xc = x.clamp(a, b);
                let w = (b - a) / teeth as f64;
                // each full tooth integrates to zero
                let k = (((xc - a) / w).floor() as usize).min(teeth - 1);
                let s = (xc - a - k as f64 * w) / w;
                // ∫_0^s (-h + 2h σ) w dσ
                height * w * (s * s - s)
            }
            Preset::Step {
                a,
                x0,
                b,
                u_left,
                u_right,
            } => {
                u_left * (x.clamp(a, x0) - a) + u_right * (x.clamp(x0, b) - x0)
            }
            Preset::PiecewiseConstant {
                ref breaks,
                ref values,
            } => breaks
                .windows(2)
                .zip(values)
                .map(|(w, v)| v * (x.clamp(w[0], w[1]) - w[0]))
                .sum(),
            Preset::Cantor {
                a,
                length,
                level,
                height,
            } => {
                let s = ((x - a) / length).clamp(0.0, 1.0);
                height * length * (s - cantor_integral(level, s))
            }
        }
    }
}

/// Level-`n` iterate of the Cantor–Vitali function on `[0, 1]`, starting
/// from the identity.
#[cfg(test)]
pub(crate) fn cantor_iterate(level: u32, x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if level == 0 {
        return x;
    }
    if x < 1.0 / 3.0 {
        0.5 * cantor_iterate(level - 1, 3.0 * x)
    } else if x <= 2.0 / 3.0 {
        0.5
    } else {
        0.5 + 0.5 * cantor_iterate(level - 1, 3.0 * x - 2.0)
    }
}

/// `∫_0^x C_level(s) ds` for `x ∈ [0, 1]`, via self-similarity.
pub(crate) fn cantor_integral(level: u32, x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if level == 0 {
        return 0.5 * x * x;
    }
    let third = 1.0 / 3.0;
    // ∫_0^{1/3} C_n = (1/6) ∫_0^1 C_{n-1} = 1/12
    let first = 1.0 / 12.0;
    if x <= third {
        cantor_integral(level - 1, 3.0 * x) / 6.0
    } else if x <= 2.0 * third {
        first + 0.5 * (x - third)
    } else {
        first + 0.5 * third + 0.5 * (x - 2.0 * third) + cantor_integral(level - 1, 3.0 * x - 2.0) / 6.0
    }
}

/// `-ln(eps)` floored at 5 length units.
pub fn default_pad(eps_trunc: f64) -> f64 {
    (-eps_trunc.ln()).max(5.0)
}

pub const DEFAULT_TRUNCATION_EPS: f64 = 1e-8;

/// Samples `preset` as exact cell averages. The support must stay at least
/// `pad` away from both ends of the grid.
pub fn sample_preset(grid: &Grid, preset: &Preset, pad: f64) -> Result<CellProfile> {
    preset.validate()?;
    if !(pad >= 0.0) {
        return Err(BpError::InvalidPreset(format!("padding must be >= 0, got {pad}")));
    }
    if let Some((lo, hi)) = preset.support() {
        if lo < grid.x_min() + pad || hi > grid.x_max() - pad {
            return Err(BpError::InvalidPreset(format!(
                "{} support [{lo}, {hi}] violates padding {pad} inside [{}, {}]",
                preset.name(),
                grid.x_min(),
                grid.x_max()
            )));
        }
    }
    let dx = grid.dx();
    let mut left = preset.antiderivative(grid.interface(0));
    let values = (0..grid.n_cells())
        .map(|i| {
            let right = preset.antiderivative(grid.interface(i + 1));
            let v = (right - left) / dx;
            left = right;
            v
        })
        .collect();
    CellProfile::new(*grid, values)
}
