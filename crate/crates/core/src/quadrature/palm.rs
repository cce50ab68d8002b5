//! Expected number of isolated vertices through the Palm integral, plus the
//! closed-form limits it is compared against.

use super::ball::ball_measure;
use super::gauss_kronrod::{Estimate, Integrator, Tolerance};
use crate::error::{Error, Result};
use crate::model::{limit_constant, sequence_a, ModelParams};
use crate::sampler::{ln_radial_density, radial_tail_radius, SamplingMode};

/// Radial mass ignored beyond the truncation radius.
const TAIL_MASS: f64 = 1e-16;
const INITIAL_PANELS: usize = 32;

/// `lim n I(ρ_n(t), r_n(β)) = C_d e^{β-t}`.
pub fn limit_n_i(params: &ModelParams, beta: f64, t: f64) -> f64 {
    limit_constant(params) * (beta - t).exp()
}

/// `g_n(t) = ((t + a_n)/ln n)^{d/α-1} e^{-t}`, the density of the Palm
/// integral after the substitution `s = ρ_n(t)`.
pub fn g_function(params: &ModelParams, n: f64, t: f64) -> Result<f64> {
    let a = sequence_a(params, n)?;
    if t < -a {
        return Err(Error::domain("g_function", format!("t = {t} < -a_n = {}", -a)));
    }
    let exponent = params.shape() - 1.0;
    let base = if exponent == 0.0 { 1.0 } else { ((t + a) / n.ln()).powf(exponent) };
    Ok(base * (-t).exp())
}

/// `E[W(r)]` for `n` points.
///
/// Poisson mode: `n ∫ exp(-n I(s, r)) f_R(s) ds`. Binomial mode:
/// `n ∫ (1 - I(s, r))^{n-1} f_R(s) ds`, exact for a fixed number of points.
/// The radial integral stops where the remaining radial mass is below
/// `1e-16`; that truncation is added to the reported error.
pub fn expected_isolated(
    params: &ModelParams,
    n: f64,
    r: f64,
    mode: SamplingMode,
) -> Result<Estimate> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::domain("expected_isolated", format!("n = {n}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("expected_isolated", format!("r = {r}")));
    }
    let s_max = radial_tail_radius(params, TAIL_MASS);
    let ln_n = n.ln();
    let mut failure = None;
    let mut inner_evals = 0;
    let integrand = |s: f64| -> f64 {
        let ln_f = ln_n + ln_radial_density(params, s);
        if ln_f < -745.0 {
            return 0.0;
        }
        match ball_measure(params, s, r) {
            Ok(m) => {
                let log_keep = match mode {
                    SamplingMode::Poisson => -n * m.value,
                    SamplingMode::Binomial => (n - 1.0) * (-m.value).ln_1p(),
                };
                inner_evals += 1;
                (ln_f + log_keep).exp()
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let breaks: Vec<f64> = (0..=INITIAL_PANELS)
        .map(|k| s_max * k as f64 / INITIAL_PANELS as f64)
        .collect();
    let est = Integrator::new(Tolerance::new(1e-7, 1e-7)).integrate_with_breaks(integrand, &breaks);
    if let Some(e) = failure {
        return Err(e);
    }
    let mut est = est?;
    est.error += n * TAIL_MASS;
    est.evaluations = inner_evals;
    Ok(est)
}
