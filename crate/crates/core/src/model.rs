//! The exponential-power density `f(x) = A_d exp(-λ‖x‖^α)` on `R^d` and the
//! closed-form constants and scaling sequences attached to it.
//!
//! Iterated logarithms are written `ln2(n) = ln ln n` and
//! `ln3(n) = ln ln ln n`; they are always nested natural logs.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// `e^e`, the smallest `n` for which `ln ln ln n` is positive.
pub const E_POW_E: f64 = 15.154_262_241_479_262;

/// Parameters `(d, λ, α)` of the density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    d: usize,
    lambda: f64,
    alpha: f64,
}

impl ModelParams {
    pub fn new(d: usize, lambda: f64, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must be >= 2, got {d}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self { d, lambda, alpha })
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `d` as a float.
    #[inline]
    pub fn df(&self) -> f64 {
        self.d as f64
    }

    /// Shape `d/α` of the Gamma law of `λ‖X‖^α`.
    #[inline]
    pub fn shape(&self) -> f64 {
        self.df() / self.alpha
    }

    /// Density at distance `r` from the origin.
    pub fn density_at_radius(&self, r: f64) -> f64 {
        normalizing_constant(self) * (-self.lambda * r.powf(self.alpha)).exp()
    }
}

/// The constants that enter every formula for a fixed parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingConstants {
    pub a_d: f64,
    pub c_d: f64,
    pub theta_d_minus_1: f64,
    pub theta_d: f64,
}

impl ScalingConstants {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            a_d: normalizing_constant(params),
            c_d: limit_constant(params),
            theta_d_minus_1: unit_ball_volume(params.d - 1),
            theta_d: unit_ball_volume(params.d),
        }
    }
}

/// Volume `π^{k/2} / Γ(k/2 + 1)` of the unit ball in `R^k`; `θ_0 = 1`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => {
            let h = k as f64 / 2.0;
            if h + 1.0 < 170.0 {
                PI.powf(h) / gamma(h + 1.0)
            } else {
                (h * PI.ln() - ln_gamma(h + 1.0)).exp()
            }
        }
    }
}

/// Surface area `k θ_k` of the unit sphere `S^{k-1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    k as f64 * unit_ball_volume(k)
}

/// `A_d = α λ^{d/α} Γ(d/2+1) / (d π^{d/2} Γ(d/α))`, so that
/// `A_d exp(-λ‖x‖^α)` integrates to one.
pub fn normalizing_constant(params: &ModelParams) -> f64 {
    let d = params.df();
    let a = params.alpha;
    let shape = params.shape();
    if params.d <= 170 && shape <= 170.0 {
        let direct = a * params.lambda.powf(shape) * half_step_factorial(params.d)
            / (d * PI.powf(d / 2.0) * gamma_exact(shape));
        if direct.is_normal() {
            return direct;
        }
    }
    let log_a = a.ln() + shape * params.lambda.ln() + ln_gamma(d / 2.0 + 1.0)
        - d.ln()
        - d / 2.0 * PI.ln()
        - ln_gamma(shape);
    log_a.exp()
}

/// `Π (k/2)` over `k = m, m-2, ...` down to 2 or 3, so that
/// `Γ(m/2 + 1)` is this product for even `m` and this product times `√π/2`
/// for odd `m`. All factors are exact halves of integers.
fn half_step_product(m: usize) -> f64 {
    (1..=m / 2)
        .map(|j| (m - 2 * (j - 1)) as f64 / 2.0)
        .filter(|&f| f >= 1.0)
        .product()
}

/// `Γ(m/2 + 1)`.
fn half_step_factorial(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        half_step_product(m)
    } else {
        half_step_product(m) * PI.sqrt() / 2.0
    }
}

/// `Γ(x)`, exact for positive integers up to 171.
fn gamma_exact(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=171.0).contains(&x) {
        (1..x as usize).map(|k| k as f64).product()
    } else {
        gamma(x)
    }
}

/// `C_d = α θ_{d-1} (d-1)!/2 · ((d-1)/(2π))^{(d-1)/2}`. Does not depend on λ.
pub fn limit_constant(params: &ModelParams) -> f64 {
    let m = params.d - 1;
    let mf = m as f64;
    let h = mf / 2.0;
    if m <= 170 {
        // θ_m (m/2π)^{m/2} = (m/2)^{m/2} / Γ(m/2 + 1)
        let factorial: f64 = (1..=m).map(|k| k as f64).product();
        let value = if m.is_multiple_of(2) {
            params.alpha * factorial / 2.0 * h.powi(m as i32 / 2) / half_step_product(m)
        } else {
            // (m/2)^{m/2} / (√π/2) = 2 sqrt(m^m / (2^m π))
            let root = (mf.powi(m as i32) / (2f64.powi(m as i32) * PI)).sqrt();
            params.alpha * factorial * root / half_step_product(m)
        };
        if value.is_finite() {
            return value;
        }
    }
    (params.alpha.ln() + ln_gamma(mf + 1.0) - 2f64.ln() + h * h.ln() - ln_gamma(h + 1.0)).exp()
}

/// The constant `c` for which `n I(ρ_n(t), r_n(β)) → c e^{β-t}` when the
/// factor `r_n^d` is carried through exactly. Equals `limit_constant / α^d`;
/// the two coincide only at `α = 1`.
pub fn ball_mass_limit_constant(params: &ModelParams) -> f64 {
    let d = params.df();
    let m = d - 1.0;
    let log_c = unit_ball_volume(params.d - 1).ln()
        + ln_gamma(d / 2.0 + 1.0)
        + ln_gamma((d + 1.0) / 2.0)
        + m / 2.0 * (2.0 * m).ln()
        - d.ln()
        - d / 2.0 * PI.ln()
        - m * params.alpha.ln();
    log_c.exp()
}

fn ln2(op: &'static str, n: f64) -> Result<f64> {
    if !(n > E) || !n.is_finite() {
        return Err(Error::domain(op, format!("need n > e, got {n}")));
    }
    Ok(n.ln().ln())
}

fn ln3(op: &'static str, n: f64) -> Result<f64> {
    if !(n > E_POW_E) || !n.is_finite() {
        return Err(Error::domain(op, format!("need n > e^e, got {n}")));
    }
    Ok(n.ln().ln().ln())
}

/// `(λ^{-1} ln n)^{1-1/α}`, the factor that turns `d_n` into an `O(ln ln n)`
/// quantity.
pub fn radius_scale(params: &ModelParams, n: f64) -> f64 {
    (n.ln() / params.lambda).powf(1.0 - 1.0 / params.alpha)
}

/// `a_n = ln n + (d/α - 1) ln ln n - ln Γ(d/α)`; `λ ρ_n(t)^α = t + a_n`.
pub fn sequence_a(params: &ModelParams, n: f64) -> Result<f64> {
    let l2 = ln2("sequence_a", n)?;
    Ok(n.ln() + (params.shape() - 1.0) * l2 - ln_gamma(params.shape()))
}

/// `ρ_n(t) = ((t + a_n)/λ)^{1/α}`, the radius at the Palm-integral offset `t`.
pub fn rho_sequence(params: &ModelParams, n: f64, t: f64) -> Result<f64> {
    let a = sequence_a(params, n)?;
    if t < -a {
        return Err(Error::domain(
            "rho_sequence",
            format!("t = {t} is below -a_n = {}", -a),
        ));
    }
    Ok(((t + a) / params.lambda).powf(1.0 / params.alpha))
}

fn critical_numerator(op: &'static str, params: &ModelParams, n: f64, beta: f64) -> Result<f64> {
    let l3 = ln3(op, n)?;
    let l2 = n.ln().ln();
    let m = params.df() - 1.0;
    Ok(m * l2 - m / 2.0 * l3 + beta)
}

/// `r_n(β) = [(d-1) ln2 n - ((d-1)/2) ln3 n + β] / (λα (λ^{-1} ln n)^{1-1/α})`.
pub fn critical_radius(params: &ModelParams, n: f64, beta: f64) -> Result<f64> {
    let num = critical_numerator("critical_radius", params, n, beta)?;
    if !(num > 0.0) {
        return Err(Error::domain(
            "critical_radius",
            format!("numerator {num} is not positive at n={n}, beta={beta}"),
        ));
    }
    Ok(num / (params.lambda * params.alpha * radius_scale(params, n)))
}

/// Normalized largest link
/// `T_n = λα(λ^{-1} ln n)^{1-1/α} d_n - (d-1) ln2 n + ((d-1)/2) ln3 n - ln C_d`,
/// whose limit law is the standard Gumbel.
///
/// Feeding `critical_radius(params, n, β)` back in yields `β - ln C_d`.
pub fn gumbel_statistic(params: &ModelParams, n: f64, dn: f64) -> Result<f64> {
    if !(dn >= 0.0) || !dn.is_finite() {
        return Err(Error::domain("gumbel_statistic", format!("d_n = {dn}")));
    }
    let offset = critical_numerator("gumbel_statistic", params, n, 0.0)?;
    let scaled = params.lambda * params.alpha * radius_scale(params, n) * dn;
    Ok(scaled - offset - limit_constant(params).ln())
}

/// Standard Gumbel CDF `exp(-e^{-β})`.
pub fn gumbel_cdf(beta: f64) -> f64 {
    (-(-beta).exp()).exp()
}

/// Inverse of [`gumbel_cdf`] on `(0, 1)`.
pub fn gumbel_quantile(p: f64) -> f64 {
    -(-p.ln()).ln()
}

/// `(λ^{-1} ln n)^{1-1/α} d_n / ln ln n`.
pub fn strong_law_ratio(params: &ModelParams, n: f64, dn: f64) -> Result<f64> {
    if !(n > E_POW_E) || !n.is_finite() {
        return Err(Error::domain(
            "strong_law_ratio",
            format!("need n > e^e, got {n}"),
        ));
    }
    Ok(radius_scale(params, n) * dn / n.ln().ln())
}

/// Interval `[(d-1)/(αλ), d/(αλ)]` bracketing the liminf and limsup of
/// [`strong_law_ratio`].
pub fn strong_law_band(params: &ModelParams) -> (f64, f64) {
    let s = params.alpha * params.lambda;
    ((params.df() - 1.0) / s, params.df() / s)
}

/// `R_n(c) = [λ^{-1}(ln n + ((c+d-α)/α) ln ln n)]^{1/α}`.
pub fn containment_radius(params: &ModelParams, n: f64, c: f64) -> Result<f64> {
    let l2 = ln2("containment_radius", n)?;
    let radicand =
        (n.ln() + (c + params.df() - params.alpha) / params.alpha * l2) / params.lambda;
    if !(radicand > 0.0) {
        return Err(Error::domain(
            "containment_radius",
            format!("radicand {radicand} is not positive"),
        ));
    }
    Ok(radicand.powf(1.0 / params.alpha))
}
