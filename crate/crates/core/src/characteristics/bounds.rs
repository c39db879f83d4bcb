//! Explicit constants controlling the solution and its characteristics.
//!
//! All of them depend only on times and on `‖u₀‖₁`; none needs a solution.

use crate::error::{invalid, Result};

/// `K_t = 1 + 2t + 2t² + 4t² e^t ‖u₀‖₁`.
pub fn oleinik_constant(t: f64, u0_l1: f64) -> f64 {
    1.0 + 2.0 * t + 2.0 * t * t + 4.0 * t * t * t.exp() * u0_l1
}

/// `M_t = sqrt(2 K_t e^t ‖u₀‖₁) + (e^t ‖u₀‖₁ + 1) √t`.
pub fn growth_rate(t: f64, u0_l1: f64) -> f64 {
    let k = oleinik_constant(t, u0_l1);
    (2.0 * k * t.exp() * u0_l1).sqrt() + (t.exp() * u0_l1 + 1.0) * t.sqrt()
}

/// `c_t(s) = exp{2 M_t (√t - √s)}`, the backward spreading factor.
pub fn spreading_factor(t: f64, s: f64, u0_l1: f64) -> f64 {
    (2.0 * growth_rate(t, u0_l1) * (t.sqrt() - s.sqrt())).exp()
}

/// `sqrt(2 K_t e^t ‖u₀‖₁ / t0) + e^t ‖u₀‖₁`, the Lipschitz constant of
/// `[G*u]_x` on `[t0, t]`.
fn source_lipschitz(t0: f64, t: f64, u0_l1: f64) -> f64 {
    let k = oleinik_constant(t, u0_l1);
    (2.0 * k * t.exp() / t0 * u0_l1).sqrt() + t.exp() * u0_l1
}

/// `γ_{[t0,t]} = L · (e^{K_t} t / t0) · (t - t0)`.
pub fn gamma_small(t0: f64, t: f64, u0_l1: f64) -> f64 {
    if t == t0 {
        return 0.0;
    }
    let k = oleinik_constant(t, u0_l1);
    source_lipschitz(t0, t, u0_l1) * (k.exp() * t / t0) * (t - t0)
}

/// `Γ_{[t0,t]} = 1 + L · (e^{K_t} t / t0) · (t - t0)²`.
pub fn gamma_big(t0: f64, t: f64, u0_l1: f64) -> f64 {
    if t == t0 {
        return 1.0;
    }
    1.0 + gamma_small(t0, t, u0_l1) * (t - t0)
}

/// Separation factor `κ_{[σ,T]}` between distinct genuine characteristics.
pub fn kappa(sigma: f64, big_t: f64, u0_l1: f64) -> f64 {
    let k = oleinik_constant(big_t, u0_l1);
    let lip = (4.0 * k * big_t.exp() / sigma * u0_l1).sqrt() + big_t.exp() * u0_l1;
    let denom = gamma_big(0.5 * sigma, big_t, u0_l1)
        + lip * k.exp() * big_t * (big_t - 0.5 * sigma);
    0.5 * sigma / denom
}

/// Width bound `|A_t| <= |z2 - z1| + 2 sqrt(2 K_T e^T ‖u₀‖₁ / σ) T`.
pub fn region_width_bound(sigma: f64, big_t: f64, u0_l1: f64, z1: f64, z2: f64) -> f64 {
    let k = oleinik_constant(big_t, u0_l1);
    (z2 - z1).abs() + 2.0 * (2.0 * k * big_t.exp() / sigma * u0_l1).sqrt() * big_t
}

/// `M_σ^T`, the bound on `|Du(t)|(A_t)` for `t ∈ [σ, T]`.
pub fn variation_bound(sigma: f64, big_t: f64, u0_l1: f64, z1: f64, z2: f64) -> f64 {
    let k = oleinik_constant(big_t, u0_l1);
    let root = (2.0 * k * big_t.exp() / sigma * u0_l1).sqrt();
    2.0 * root + 2.0 * k / sigma * region_width_bound(sigma, big_t, u0_l1, z1, z2)
}

/// Upper bound `c_T(σ/2) · M_σ^T` on the cone-base functional.
pub fn f_sigma_bound(sigma: f64, big_t: f64, u0_l1: f64, z1: f64, z2: f64) -> f64 {
    spreading_factor(big_t, 0.5 * sigma, u0_l1) * variation_bound(sigma, big_t, u0_l1, z1, z2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsInput {
    pub t: f64,
    pub s: f64,
    pub t0: f64,
    pub sigma: f64,
    pub big_t: f64,
    pub u0_l1: f64,
    pub z1: f64,
    pub z2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub input: BoundsInput,
    pub k_t: f64,
    pub m_t: f64,
    pub c_t_s: f64,
    pub gamma_big: f64,
    pub gamma_small: f64,
    pub kappa: f64,
    pub m_sigma_t: f64,
}

impl BoundsReport {
    /// Flat `key=value` lines, inputs first.
    pub fn to_key_value(&self) -> String {
        let i = &self.input;
        let rows: [(&str, f64); 16] = [
            ("t", i.t),
            ("s", i.s),
            ("t0", i.t0),
            ("sigma", i.sigma),
            ("T", i.big_t),
            ("u0_l1", i.u0_l1),
            ("z1", i.z1),
            ("z2", i.z2),
            ("K_t", self.k_t),
            ("M_t", self.m_t),
            ("c_t_s", self.c_t_s),
            ("Gamma_t0_t", self.gamma_big),
            ("gamma_t0_t", self.gamma_small),
            ("kappa_sigma_T", self.kappa),
            ("M_sigma_T", self.m_sigma_t),
            ("F_sigma_bound", f_sigma_bound(i.sigma, i.big_t, i.u0_l1, i.z1, i.z2)),
        ];
        rows.iter().map(|(k, v)| format!("{k}={v:?}\n")).collect()
    }
}

/// Evaluates every constant for one set of times.
pub fn bounds_constants(input: BoundsInput) -> Result<BoundsReport> {
    let BoundsInput {
        t,
        s,
        t0,
        sigma,
        big_t,
        u0_l1,
        z1,
        z2,
    } = input;
    let all = [t, s, t0, sigma, big_t, u0_l1, z1, z2];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(invalid("bounds inputs must be finite"));
    }
    if !(0.0 < s && s <= t && t <= big_t) {
        return Err(invalid(format!("need 0 < s <= t <= T, got s={s}, t={t}, T={big_t}")));
    }
    if !(0.0 < t0 && t0 <= t) {
        return Err(invalid(format!("need 0 < t0 <= t, got t0={t0}, t={t}")));
    }
    if !(0.0 < sigma && sigma < big_t) {
        return Err(invalid(format!("need 0 < sigma < T, got sigma={sigma}, T={big_t}")));
    }
    if u0_l1 < 0.0 {
        return Err(invalid(format!("‖u₀‖₁ must be >= 0, got {u0_l1}")));
    }
    if z1 > z2 {
        return Err(invalid(format!("need z1 <= z2, got z1={z1}, z2={z2}")));
    }
    Ok(BoundsReport {
        input,
        k_t: oleinik_constant(t, u0_l1),
        m_t: growth_rate(t, u0_l1),
        c_t_s: spreading_factor(t, s, u0_l1),
        gamma_big: gamma_big(t0, t, u0_l1),
        gamma_small: gamma_small(t0, t, u0_l1),
        kappa: kappa(sigma, big_t, u0_l1),
        m_sigma_t: variation_bound(sigma, big_t, u0_l1, z1, z2),
    })
}
