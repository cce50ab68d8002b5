//! Monte Carlo experiments: repeated clouds, their statistics, and the
//! quadrature oracles they are checked against.

mod config;
mod plots;
mod records;
mod stats;
mod summary;
mod trials;

pub use config::{ConfigFile, ExperimentConfig, CONFIG_SCHEMA, MIN_N};
pub use plots::{PlotData, GUMBEL_CDF_FILE, GUMBEL_ECDF_FILE, STRONG_BAND_FILE, STRONG_RATIO_FILE};
pub use records::{read_records, write_records};
pub use stats::{
    ks_critical_value, ks_statistic, poisson_dispersion, poisson_gof, quantile, Dispersion,
    GoodnessOfFit,
};
pub use summary::{
    summarize, BetaSummary, GateCheck, Gates, Quantiles, SizeSummary, SummaryStats,
    DISPERSION_BAND, GOF_MIN_P, KS_ENVELOPE, MEAN_SE_MULTIPLE, P_EMPTY_TOLERANCE, SUMMARY_SCHEMA,
};
pub use trials::{
    containment_fraction, doubling_grid, run_trials, shell_hit_fraction, strong_law_track,
    trial_seed, RecordSet, TrialRecord,
};

use std::path::{Path, PathBuf};

use crate::error::Result;

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Runs the trials of `cfg` and summarizes them.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(RecordSet, SummaryStats)> {
    let set = run_trials(cfg)?;
    let summary = summarize(&cfg.params, cfg.mode, &set)?;
    Ok((set, summary))
}

/// Writes `records.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, set: &RecordSet, summary: &SummaryStats) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let records = dir.join(RECORDS_FILE);
    let mut buf = Vec::new();
    write_records(set, &mut buf)?;
    std::fs::write(&records, buf)?;
    let json = dir.join(SUMMARY_FILE);
    std::fs::write(&json, summary.to_json())?;
    Ok((records, json))
}
