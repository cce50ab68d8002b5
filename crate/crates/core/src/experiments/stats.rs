//! One-sample KS distance, Poisson dispersion and goodness of fit.

use serde::Serialize;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// Two-sided one-sample Kolmogorov–Smirnov distance between the empirical
/// CDF of `samples` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("KS sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m);
    }
    Ok(d)
}

/// Asymptotic KS critical value `sqrt(-ln(a/2) / (2m))` at significance `a`.
pub fn ks_critical_value(m: usize, significance: f64) -> f64 {
    (-(significance / 2.0).ln() / (2.0 * m as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dispersion {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `variance / mean`; `None` when the mean is zero.
    pub index: Option<f64>,
}

pub fn poisson_dispersion(counts: &[u64]) -> Result<Dispersion> {
    if counts.len() < 2 {
        return Err(Error::precondition(
            "poisson_dispersion",
            format!("need at least 2 counts, got {}", counts.len()),
        ));
    }
    let m = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / m;
    let variance = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (m - 1.0);
    let index = (mean > 0.0).then(|| variance / mean);
    Ok(Dispersion {
        mean,
        variance,
        index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Minimum expected count per chi-square cell.
const MIN_EXPECTED: f64 = 5.0;

fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp()
}

/// Pearson chi-square test of `counts` against `Po(mean)` with a known mean.
///
/// Cells `{0}, {1}, ...` are merged left to right until each expects at least
/// five observations; the last cell absorbs the upper tail. Returns `None`
/// when fewer than two cells remain.
pub fn poisson_gof(counts: &[u64], mean: f64) -> Result<Option<GoodnessOfFit>> {
    if counts.is_empty() {
        return Err(Error::Empty("count sample"));
    }
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::domain("poisson_gof", format!("mean = {mean}")));
    }
    let m = counts.len() as f64;
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0u64; top as usize + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }
    // cells as (observed, expected); expected of the tail cell fixed below
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    let mut covered = 0.0;
    let mut k = 0u64;
    loop {
        let p = poisson_pmf(k, mean);
        acc.0 += observed.get(k as usize).copied().unwrap_or(0) as f64;
        acc.1 += m * p;
        covered += p;
        let remaining = (1.0 - covered).max(0.0) * m;
        if acc.1 >= MIN_EXPECTED && remaining >= MIN_EXPECTED {
            cells.push(acc);
            acc = (0.0, 0.0);
        } else if remaining < MIN_EXPECTED && k >= top {
            break;
        }
        k += 1;
    }
    let tail_observed = acc.0 + observed.iter().skip(k as usize + 1).sum::<u64>() as f64;
    let tail_expected = acc.1 + (1.0 - covered).max(0.0) * m;
    if tail_expected >= MIN_EXPECTED || cells.is_empty() {
        cells.push((tail_observed, tail_expected));
    } else {
        let last = cells.last_mut().expect("nonempty");
        last.0 += tail_observed;
        last.1 += tail_expected;
    }
    if cells.len() < 2 {
        return Ok(None);
    }
    let chi2: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    Ok(Some(GoodnessOfFit {
        chi2,
        dof,
        p_value: gamma_ur(dof as f64 / 2.0, chi2 / 2.0),
    }))
}

/// Sample quantile by linear interpolation between order statistics
/// (type 7); `sorted` must be ascending and nonempty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
