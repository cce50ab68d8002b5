//! Two-column `x y` text files for external plotting. Blocks within a file
//! are separated by a blank line and introduced by a `#` comment.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::trials::RecordSet;
use crate::error::Result;
use crate::model::{gumbel_cdf, strong_law_band, ModelParams};

pub const GUMBEL_ECDF_FILE: &str = "gumbel_ecdf.txt";
pub const GUMBEL_CDF_FILE: &str = "gumbel_cdf.txt";
pub const STRONG_RATIO_FILE: &str = "strong_ratio.txt";
pub const STRONG_BAND_FILE: &str = "strong_band.txt";

const CDF_GRID_POINTS: usize = 401;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    /// Empirical CDF of `gumbel_T`, one block per `n`.
    pub gumbel_ecdf: String,
    /// `gumbel_cdf` on a grid covering the observed `gumbel_T` range.
    pub gumbel_cdf: String,
    /// `(ln n, strong_ratio)` for every record.
    pub strong_ratio: String,
    /// The two horizontal lines `(d-1)/(αλ)` and `d/(αλ)`.
    pub strong_band: String,
}

impl PlotData {
    pub fn new(params: &ModelParams, set: &RecordSet) -> Self {
        let mut ns: Vec<u64> = set.records.iter().map(|r| r.n).collect();
        ns.dedup();
        let mut gumbel_ecdf = String::new();
        for (k, &n) in ns.iter().enumerate() {
            let mut t: Vec<f64> = set
                .records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.gumbel_t)
                .collect();
            t.sort_by(f64::total_cmp);
            if k > 0 {
                gumbel_ecdf.push('\n');
            }
            writeln!(gumbel_ecdf, "# n={n}").unwrap();
            let m = t.len() as f64;
            for (i, x) in t.iter().enumerate() {
                writeln!(gumbel_ecdf, "{x:?} {:?}", (i as f64 + 1.0) / m).unwrap();
            }
        }

        let (lo, hi) = set
            .records
            .iter()
            .fold((-4.0f64, 8.0f64), |(lo, hi), r| (lo.min(r.gumbel_t), hi.max(r.gumbel_t)));
        let mut gumbel_cdf_text = String::from("# standard Gumbel CDF\n");
        for i in 0..CDF_GRID_POINTS {
            let x = lo + (hi - lo) * i as f64 / (CDF_GRID_POINTS - 1) as f64;
            writeln!(gumbel_cdf_text, "{x:?} {:?}", gumbel_cdf(x)).unwrap();
        }

        let mut strong_ratio = String::from("# ln n, strong_ratio\n");
        for r in &set.records {
            writeln!(strong_ratio, "{:?} {:?}", (r.n as f64).ln(), r.strong_ratio).unwrap();
        }

        let x0 = (*ns.iter().min().unwrap_or(&16) as f64).ln();
        let x1 = (*ns.iter().max().unwrap_or(&16) as f64).ln();
        let (lower, upper) = strong_law_band(params);
        let mut strong_band = String::new();
        for (k, (label, y)) in [("lower (d-1)/(alpha lambda)", lower), ("upper d/(alpha lambda)", upper)]
            .into_iter()
            .enumerate()
        {
            if k > 0 {
                strong_band.push('\n');
            }
            writeln!(strong_band, "# {label}").unwrap();
            writeln!(strong_band, "{x0:?} {y:?}").unwrap();
            writeln!(strong_band, "{x1:?} {y:?}").unwrap();
        }

        Self {
            gumbel_ecdf,
            gumbel_cdf: gumbel_cdf_text,
            strong_ratio,
            strong_band,
        }
    }

    /// Writes the four files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for (name, body) in [
            (GUMBEL_ECDF_FILE, &self.gumbel_ecdf),
            (GUMBEL_CDF_FILE, &self.gumbel_cdf),
            (STRONG_RATIO_FILE, &self.strong_ratio),
            (STRONG_BAND_FILE, &self.strong_band),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            paths.push(path);
        }
        Ok(paths)
    }
}
