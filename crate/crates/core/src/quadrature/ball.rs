//! Probability mass `I(ρ, r)` of a ball of radius `r` whose center sits at
//! distance `ρ` from the origin, and its large-`ρ` sandwich bounds.

use serde::Serialize;
use statrs::function::gamma::gamma;

use super::gauss_kronrod::{Estimate, Integrator, Tolerance};
use crate::error::{Error, Result};
use crate::model::{normalizing_constant, unit_ball_volume, ModelParams};

const OUTER_TOL: Tolerance = Tolerance::new(0.0, 1e-11);
const INNER_TOL: Tolerance = Tolerance::new(0.0, 1e-12);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallMass {
    pub value: f64,
    /// `ln value`, finite even when `value` underflows.
    pub ln_value: f64,
    pub abs_err: f64,
}

/// Ball-frame coordinates: a point of `B(ρe, r)` is
/// `(ρ + r t, r u ω)` with `t = -cos φ`, `u = w sin φ`, `ω ∈ S^{d-2}`.
/// The volume element becomes `(d-1) θ_{d-1} r^d sin^d φ w^{d-2} dφ dw`,
/// which is smooth at both ends of `t ∈ [-1, 1]`.
struct BallFrame {
    lambda: f64,
    alpha: f64,
    rho: f64,
    r: f64,
    d: usize,
    /// `λ min_{y ∈ B} ‖y‖^α`, subtracted from every exponent.
    shift: f64,
}

impl BallFrame {
    fn new(params: &ModelParams, rho: f64, r: f64) -> Self {
        let gap = (rho - r).max(0.0);
        Self {
            lambda: params.lambda(),
            alpha: params.alpha(),
            rho,
            r,
            d: params.d(),
            shift: params.lambda() * gap.powf(params.alpha()),
        }
    }

    #[inline]
    fn norm_pow(&self, q: f64) -> f64 {
        if self.alpha == 2.0 {
            q
        } else {
            q.powf(0.5 * self.alpha)
        }
    }

    /// Signed axial coordinate `ρ + r t` for `t = -cos φ`.
    #[inline]
    fn axial(&self, phi: f64) -> f64 {
        // ρ - r cos φ = (ρ - r) + 2 r sin²(φ/2) keeps precision near φ = 0
        let h = (0.5 * phi).sin();
        (self.rho - self.r) + 2.0 * self.r * h * h
    }

    /// Value of `u` (perpendicular offset over r) that raises the exponent by
    /// one unit above its value on the axis at axial coordinate `a`.
    fn perpendicular_scale(&self, a: f64) -> f64 {
        let base = a.abs().powf(self.alpha) + 1.0 / self.lambda;
        let q = base.powf(2.0 / self.alpha) - a * a;
        q.max(0.0).sqrt() / self.r
    }

    fn inner(&self, phi: f64, integrator: &Integrator) -> Result<Estimate> {
        let s = phi.sin();
        if s <= 0.0 {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
            });
        }
        let a = self.axial(phi);
        let a2 = a * a;
        let ru = self.r * s;
        let pw = (self.d - 2) as i32;
        let integrand = |w: f64| {
            let p = ru * w;
            let e = -self.lambda * self.norm_pow(a2 + p * p) + self.shift;
            let jac = if pw == 0 { 1.0 } else { w.powi(pw) };
            jac * e.exp()
        };
        let scale = self.perpendicular_scale(a) / s;
        let mut breaks = vec![0.0];
        for k in [1.0, 4.0, 16.0] {
            let b = scale * k;
            if b < 1.0 && b > *breaks.last().expect("nonempty") {
                breaks.push(b);
            }
        }
        breaks.push(1.0);
        integrator.integrate_with_breaks(integrand, &breaks)
    }

    /// Breakpoints in `φ` around the point of the ball nearest the origin.
    fn outer_breaks(&self) -> Vec<f64> {
        let (t0, a_min) = if self.rho >= self.r {
            (-1.0, self.rho - self.r)
        } else {
            (-self.rho / self.r, 0.0)
        };
        let a1 = (a_min.powf(self.alpha) + 1.0 / self.lambda).powf(1.0 / self.alpha);
        let dt = (a1 - a_min) / self.r;
        let mut ts = vec![-1.0, 1.0];
        if t0 > -1.0 {
            ts.push(t0);
        }
        if dt < 0.5 {
            for k in [1.0, 4.0, 16.0, 64.0] {
                for t in [t0 - k * dt, t0 + k * dt] {
                    if t > -1.0 && t < 1.0 {
                        ts.push(t);
                    }
                }
            }
        }
        let mut phis: Vec<f64> = ts.into_iter().map(|t| (-t).acos()).collect();
        phis.sort_by(f64::total_cmp);
        phis.dedup();
        phis
    }

    fn integrate(&self) -> Result<Estimate> {
        let inner_q = Integrator::new(INNER_TOL);
        let mut failure = None;
        let mut evaluations = 0;
        let d = self.d as i32;
        let outer = |phi: f64| -> f64 {
            match self.inner(phi, &inner_q) {
                Ok(e) => {
                    evaluations += e.evaluations;
                    phi.sin().powi(d) * e.value
                }
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        };
        let est = Integrator::new(OUTER_TOL).integrate_with_breaks(outer, &self.outer_breaks());
        if let Some(err) = failure {
            return Err(err);
        }
        let mut est = est?;
        est.evaluations += evaluations;
        Ok(est)
    }
}

/// `I(ρ, r) = ∫_{B(ρe, r)} f`, by adaptive 2-D quadrature in the ball frame.
pub fn ball_measure(params: &ModelParams, rho: f64, r: f64) -> Result<BallMass> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::domain("ball_measure", format!("rho = {rho}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("ball_measure", format!("r = {r}")));
    }
    let frame = BallFrame::new(params, rho, r);
    let est = frame.integrate()?;
    let m = (params.d() - 1) as f64;
    let ln_prefactor = normalizing_constant(params).ln()
        + params.df() * r.ln()
        + (m * unit_ball_volume(params.d() - 1)).ln()
        - frame.shift;
    let ln_value = ln_prefactor + est.value.ln();
    let value = ln_value.exp().min(1.0);
    let rel = if est.value > 0.0 { est.error / est.value } else { 0.0 };
    Ok(BallMass {
        value,
        ln_value: ln_value.min(0.0),
        abs_err: value * rel,
    })
}

/// Which reading of the printed `w_2` formula to use for `α ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum W2Reading {
    /// `(ρ² - 2rρ)^{α/2-2}`, the form that follows from the Taylor bound.
    #[default]
    Corrected,
    /// `(ρ - 2rρ)^{α/2-2}` as typeset; dimensionally inconsistent and NaN
    /// whenever `2r > 1` with a fractional exponent. Kept for comparison.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallMeasureBounds {
    pub lower: f64,
    pub upper: f64,
    /// `A_d θ_{d-1} 2^{(d-1)/2} r^d exp(-λ(ρ^α - αrρ^{α-1})) (λαrρ^{α-1})^{-(d+1)/2}`.
    pub h: f64,
    pub w1: f64,
    pub w2: f64,
    /// Bound `C_1 / (r ρ^{α-1})` on `|K - Γ((d+1)/2)|`.
    pub e_bound: f64,
    /// `Γ((d+1)/2)`.
    pub gamma_factor: f64,
}

/// `sup_{L>0} |K_d(L) - Γ((d+1)/2)| · L`, doubled and rounded up, for
/// `d = 2..=12`, where
/// `K_d(L) = ∫_0^{2L} e^{-v} v^{(d-1)/2} (1 - v/(2L))^{(d-1)/2} dv`.
/// Produced by `cargo run --release -p lnnd-core --example calibrate_e_bound`.
const E_BOUND_CONSTANTS: [f64; 11] = [
    0.8737, 2.0001, 4.9851, 12.0001, 29.0794, 72.0001, 183.2, 480.001, 1295.49, 3600.01, 10291.9,
];

/// Calibrated `C_1` such that `|E_n| ≤ C_1 / (r ρ^{α-1})`.
pub fn e_bound_constant(params: &ModelParams) -> Result<f64> {
    let d = params.d();
    let kappa = *E_BOUND_CONSTANTS
        .get(d.wrapping_sub(2))
        .ok_or(Error::Uncalibrated(d))?;
    Ok(kappa / (params.lambda() * params.alpha()))
}

/// `K_d(L)` by adaptive quadrature.
pub fn ball_kernel(d: usize, big_l: f64) -> Result<f64> {
    let h = (d as f64 - 1.0) / 2.0;
    let top = 2.0 * big_l;
    let f = |v: f64| {
        let x = (1.0 - v / top).max(0.0);
        (-v + h * v.ln() + h * x.ln()).exp()
    };
    let q = Integrator::new(Tolerance::new(0.0, 1e-13));
    let mut breaks = vec![0.0];
    for b in [1.0, 4.0, 16.0, 64.0] {
        if b < top {
            breaks.push(b);
        }
    }
    breaks.push(top);
    Ok(q.integrate_with_breaks(f, &breaks)?.value)
}

fn w_terms(alpha: f64, rho: f64, r: f64, reading: W2Reading) -> (f64, f64) {
    if alpha <= 2.0 {
        let base = rho * rho - 2.0 * r * rho;
        let w1 = alpha / 2.0 * r * r * base.powf(alpha / 2.0 - 1.0);
        let w2_base = match reading {
            W2Reading::Corrected => base,
            W2Reading::Printed => rho - 2.0 * r * rho,
        };
        let w2 = alpha * (alpha - 2.0) / 2.0 * (r * rho).powi(2) * w2_base.powf(alpha / 2.0 - 2.0);
        (w1, w2)
    } else {
        let base = rho * rho + 2.0 * r * rho;
        let w1 = alpha / 2.0
            * r
            * r
            * base.powf(alpha / 2.0 - 2.0)
            * ((alpha - 1.0) * rho * rho + 2.0 * r * rho);
        (w1, 0.0)
    }
}

/// Lower and upper bounds `e^{-λw_1}(Γ - |E|)H ≤ I(ρ, r) ≤ e^{-λw_2} Γ H`.
pub fn ball_measure_bounds(
    params: &ModelParams,
    rho: f64,
    r: f64,
    reading: W2Reading,
) -> Result<BallMeasureBounds> {
    if !(r > 0.0) || !(rho > 2.0 * r) || !rho.is_finite() {
        return Err(Error::precondition(
            "ball_measure_bounds",
            format!("need rho > 2r > 0, got rho={rho}, r={r}"),
        ));
    }
    let (d, lambda, alpha) = (params.df(), params.lambda(), params.alpha());
    let scale = r * rho.powf(alpha - 1.0);
    let big_l = lambda * alpha * scale;
    let ln_h = normalizing_constant(params).ln()
        + unit_ball_volume(params.d() - 1).ln()
        + (d - 1.0) / 2.0 * std::f64::consts::LN_2
        + d * r.ln()
        - lambda * (rho.powf(alpha) - alpha * scale)
        - (d + 1.0) / 2.0 * big_l.ln();
    let h = ln_h.exp();
    let (w1, w2) = w_terms(alpha, rho, r, reading);
    let e_bound = e_bound_constant(params)? / scale;
    let gamma_factor = gamma((d + 1.0) / 2.0);
    Ok(BallMeasureBounds {
        lower: (-lambda * w1).exp() * (gamma_factor - e_bound) * h,
        upper: (-lambda * w2).exp() * gamma_factor * h,
        h,
        w1,
        w2,
        e_bound,
        gamma_factor,
    })
}
