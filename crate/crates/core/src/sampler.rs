//! Point clouds drawn from the exponential-power density.
//!
//! A point is `R·u` with `R^α ~ Gamma(d/α, rate λ)` and `u` uniform on the
//! unit sphere. Every point index owns its own ChaCha stream keyed by the
//! cloud seed, so a cloud is a pure function of `(params, n, mode, seed)`,
//! can be generated in parallel, and the first `k` points of two clouds with
//! the same seed coincide regardless of mode or size.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use std::fmt;
use std::str::FromStr;

use crate::model::ModelParams;

/// Stream reserved for the Poisson point count.
const COUNT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Exactly `n` i.i.d. points.
    Binomial,
    /// `N ~ Po(n)` i.i.d. points.
    Poisson,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Binomial => "binomial",
            SamplingMode::Poisson => "poisson",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binomial" => Ok(SamplingMode::Binomial),
            "poisson" | "poissonized" => Ok(SamplingMode::Poisson),
            other => Err(format!("unknown sampling mode `{other}`")),
        }
    }
}

/// A finite set of points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    mode: SamplingMode,
    requested_n: u64,
    seed: u64,
}

impl PointCloud {
    /// Wraps explicit coordinates; used for hand-built clouds.
    ///
    /// Panics if `coords.len()` is not a multiple of `dim` or a coordinate is
    /// not finite.
    pub fn from_coords(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim), "ragged coordinates");
        assert!(coords.iter().all(|c| c.is_finite()), "non-finite coordinate");
        let n = (coords.len() / dim) as u64;
        Self {
            dim,
            coords,
            mode: SamplingMode::Binomial,
            requested_n: n,
            seed: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn requested_n(&self) -> u64 {
        self.requested_n
    }

    pub fn realized_n(&self) -> u64 {
        self.len() as u64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The cloud restricted to its first `k` points.
    pub fn prefix(&self, k: usize) -> PointCloud {
        let k = k.min(self.len());
        PointCloud {
            dim: self.dim,
            coords: self.coords[..k * self.dim].to_vec(),
            mode: self.mode,
            requested_n: k as u64,
            seed: self.seed,
        }
    }

    /// Euclidean norms of all points.
    pub fn norms(&self) -> Vec<f64> {
        self.points()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// CSV with header `x0,...,x{d-1}`, one row per point, floats in
    /// shortest round-trip form.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record((0..self.dim).map(|k| format!("x{k}")))?;
        for p in self.points() {
            w.write_record(p.iter().map(|x| format!("{x:?}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `P(‖X‖ ≤ r)`: the regularized lower incomplete gamma `P(d/α, λ r^α)`.
pub fn radial_cdf(params: &ModelParams, r: f64) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    if r.is_infinite() {
        return 1.0;
    }
    gamma_lr(params.shape(), params.lambda() * r.powf(params.alpha()))
}

/// `P(‖X‖ > r)`, computed directly so that tiny tails keep their precision.
pub fn radial_survival(params: &ModelParams, r: f64) -> f64 {
    if !(r > 0.0) {
        return 1.0;
    }
    if r.is_infinite() {
        return 0.0;
    }
    gamma_ur(params.shape(), params.lambda() * r.powf(params.alpha()))
}

/// `ln f_R(r)` with `f_R(r) = α λ^{d/α} / Γ(d/α) · r^{d-1} e^{-λ r^α}`.
pub fn ln_radial_density(params: &ModelParams, r: f64) -> f64 {
    if !(r > 0.0) {
        return f64::NEG_INFINITY;
    }
    let shape = params.shape();
    params.alpha().ln() + shape * params.lambda().ln() - ln_gamma(shape)
        + (params.df() - 1.0) * r.ln()
        - params.lambda() * r.powf(params.alpha())
}

pub fn radial_density(params: &ModelParams, r: f64) -> f64 {
    ln_radial_density(params, r).exp()
}

/// Smallest radius (up to bisection precision) with `P(‖X‖ > r) ≤ tail`.
pub fn radial_tail_radius(params: &ModelParams, tail: f64) -> f64 {
    let mut hi = 1.0;
    while radial_survival(params, hi) > tail {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if radial_survival(params, mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}

/// Reusable sampler for the radius and direction of single points.
#[derive(Debug, Clone)]
pub struct PointSampler {
    dim: usize,
    inv_alpha: f64,
    gamma: Gamma<f64>,
}

impl PointSampler {
    pub fn new(params: &ModelParams) -> Self {
        let gamma = Gamma::new(params.shape(), 1.0 / params.lambda())
            .expect("validated params give a valid Gamma law");
        Self {
            dim: params.d(),
            inv_alpha: 1.0 / params.alpha(),
            gamma,
        }
    }

    pub fn radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).powf(self.inv_alpha)
    }

    /// Writes one point into `out` (length `dim`).
    pub fn fill_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let r = self.radius(rng);
        fill_direction(self.dim, rng, out);
        for x in out.iter_mut() {
            *x *= r;
        }
    }
}

/// One radius with density `f_R`.
pub fn sample_radius<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> f64 {
    PointSampler::new(params).radius(rng)
}

fn fill_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R, out: &mut [f64]) {
    debug_assert_eq!(out.len(), dim);
    loop {
        let mut sq = 0.0;
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
            sq += *x * *x;
        }
        if sq > 0.0 {
            let inv = 1.0 / sq.sqrt();
            for x in out.iter_mut() {
                *x *= inv;
            }
            return;
        }
    }
}

/// A uniformly distributed unit vector in `R^dim`.
pub fn sample_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    assert!(dim >= 2, "direction sampling needs dim >= 2");
    let mut v = vec![0.0; dim];
    fill_direction(dim, rng, &mut v);
    v
}

fn base_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG stream owned by point `index` of the cloud with this `seed`.
pub fn point_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = base_rng(seed);
    rng.set_stream(index);
    rng
}

/// Number of points for a cloud: `n` for binomial, a `Po(n)` draw otherwise.
pub fn cloud_size(n: u64, mode: SamplingMode, seed: u64) -> u64 {
    match mode {
        SamplingMode::Binomial => n,
        SamplingMode::Poisson => {
            let mut rng = point_stream(seed, COUNT_STREAM);
            let po = Poisson::new(n as f64).expect("positive mean");
            po.sample(&mut rng) as u64
        }
    }
}

/// Draws a cloud of `n` (binomial) or `N ~ Po(n)` (poisson) points.
pub fn sample_cloud(params: &ModelParams, n: u64, mode: SamplingMode, seed: u64) -> PointCloud {
    assert!(n >= 1, "sample_cloud needs n >= 1");
    let realized = cloud_size(n, mode, seed) as usize;
    let dim = params.d();
    let sampler = PointSampler::new(params);
    let base = base_rng(seed);
    let mut coords = vec![0.0; realized * dim];
    coords
        .par_chunks_mut(dim)
        .with_min_len(1024)
        .enumerate()
        .for_each(|(i, out)| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            sampler.fill_point(&mut rng, out);
        });
    PointCloud {
        dim,
        coords,
        mode,
        requested_n: n,
        seed,
    }
}
