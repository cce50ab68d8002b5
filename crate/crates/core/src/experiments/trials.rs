use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, MIN_N};
use crate::error::{Error, Result};
use crate::geometry::{count_isolated, nn_distances};
use crate::model::{
    containment_radius, critical_radius, gumbel_statistic, strong_law_ratio, ModelParams,
};
use crate::sampler::{sample_cloud, SamplingMode};

/// Outcome of one simulated cloud.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: u64,
    pub trial: u64,
    pub realized_n: u64,
    pub dn: f64,
    pub gumbel_t: f64,
    pub strong_ratio: f64,
    /// `W` at `r_n(β)`, aligned with [`RecordSet::betas`].
    pub isolated: Vec<u64>,
    /// All points lie in `B(0, R_n(c))`.
    pub contained: Option<bool>,
    /// For `c < 0`: some point lies in `B(0, R_n(0)) \ B(0, R_n(c))`.
    pub shell_hit: Option<bool>,
}

/// Records of one experiment in `(n, trial)` order, with the β grid their
/// isolated counts refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSet {
    pub betas: Vec<f64>,
    pub records: Vec<TrialRecord>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cloud seed for trial `trial` at size `n`.
pub fn trial_seed(master_seed: u64, n: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n) ^ trial)
}

fn run_one(cfg: &ExperimentConfig, n: u64, trial: u64) -> Result<TrialRecord> {
    let params = &cfg.params;
    let nf = n as f64;
    let cloud = sample_cloud(params, n, cfg.mode, trial_seed(cfg.master_seed, n, trial));
    let nn = nn_distances(&cloud)?;
    let isolated = cfg
        .betas
        .iter()
        .map(|&b| Ok(count_isolated(&nn, critical_radius(params, nf, b)?) as u64))
        .collect::<Result<Vec<_>>>()?;
    let (contained, shell_hit) = match cfg.containment_c {
        None => (None, None),
        Some(c) => {
            let outer = containment_radius(params, nf, c)?;
            let norms = cloud.norms();
            let contained = norms.iter().all(|&x| x <= outer);
            let shell_hit = if c < 0.0 {
                let shell_outer = containment_radius(params, nf, 0.0)?;
                Some(norms.iter().any(|&x| x > outer && x <= shell_outer))
            } else {
                None
            };
            (Some(contained), shell_hit)
        }
    };
    Ok(TrialRecord {
        n,
        trial,
        realized_n: cloud.realized_n(),
        dn: nn.dn,
        gumbel_t: gumbel_statistic(params, nf, nn.dn)?,
        strong_ratio: strong_law_ratio(params, nf, nn.dn)?,
        isolated,
        contained,
        shell_hit,
    })
}

/// Runs `trials` clouds for every `n`; the result depends only on the config.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<RecordSet> {
    let jobs: Vec<(u64, u64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |j| (n, j)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(n, j)| {
            run_one(cfg, n, j).map_err(|e| Error::Trial {
                n,
                trial: j,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RecordSet {
        betas: cfg.betas.clone(),
        records,
    })
}

/// Doubling grid `16, 32, ...` up to `n_max`, with `n_max` appended when it
/// is not a power of two.
pub fn doubling_grid(n_max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut n = MIN_N;
    while n < n_max {
        grid.push(n);
        n *= 2;
    }
    grid.push(n_max);
    grid
}

/// Strong-law ratio along one nested trajectory: one cloud of `n_max` points
/// and its prefixes at the sizes of [`doubling_grid`].
pub fn strong_law_track(params: &ModelParams, n_max: u64, seed: u64) -> Result<Vec<(u64, f64)>> {
    if n_max < 1 << 10 {
        return Err(Error::precondition(
            "strong_law_track",
            format!("n_max must be at least 1024, got {n_max}"),
        ));
    }
    let cloud = sample_cloud(params, n_max, SamplingMode::Binomial, seed);
    doubling_grid(n_max)
        .into_iter()
        .map(|n| {
            let nn = nn_distances(&cloud.prefix(n as usize))?;
            Ok((n, strong_law_ratio(params, n as f64, nn.dn)?))
        })
        .collect()
}

pub(crate) fn flag_fraction<'a>(
    records: impl IntoIterator<Item = &'a TrialRecord>,
    flag: impl Fn(&TrialRecord) -> Option<bool>,
) -> Result<f64> {
    let (mut hits, mut total) = (0usize, 0usize);
    for r in records {
        match flag(r) {
            Some(true) => hits += 1,
            Some(false) => {}
            None => return Err(Error::MissingContainmentFlags),
        }
        total += 1;
    }
    if total == 0 {
        return Err(Error::Empty("record set"));
    }
    Ok(hits as f64 / total as f64)
}

/// Fraction of trials whose whole cloud lies in `B(0, R_n(c))`.
pub fn containment_fraction(records: &[TrialRecord]) -> Result<f64> {
    flag_fraction(records, |r| r.contained)
}

/// Fraction of trials with a point in the shell `B(0, R_n(0)) \ B(0, R_n(c))`
/// (`c < 0`).
pub fn shell_hit_fraction(records: &[TrialRecord]) -> Result<f64> {
    flag_fraction(records, |r| r.shell_hit)
}
