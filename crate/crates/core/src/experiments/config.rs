use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{critical_radius, ModelParams};
use crate::sampler::SamplingMode;

/// Smallest admissible `n`: `e^e` rounded up.
pub const MIN_N: u64 = 16;

pub const CONFIG_SCHEMA: u32 = 1;

/// On-disk form of an experiment definition. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: u32,
    pub d: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub n_values: Vec<u64>,
    pub trials: u64,
    pub betas: Vec<f64>,
    pub mode: SamplingMode,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub containment_c: Option<f64>,
    pub out_dir: PathBuf,
}

/// A validated experiment definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub n_values: Vec<u64>,
    pub trials: u64,
    pub betas: Vec<f64>,
    pub mode: SamplingMode,
    pub master_seed: u64,
    pub containment_c: Option<f64>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(
        params: ModelParams,
        n_values: Vec<u64>,
        trials: u64,
        betas: Vec<f64>,
        mode: SamplingMode,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            params,
            n_values,
            trials,
            betas,
            mode,
            master_seed,
            containment_c: None,
            out_dir: PathBuf::from("."),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_containment(mut self, c: f64) -> Result<Self> {
        self.containment_c = Some(c);
        self.validate()?;
        Ok(self)
    }

    pub fn from_file(file: ConfigFile) -> Result<Self> {
        if file.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {CONFIG_SCHEMA})",
                file.schema
            )));
        }
        let params = ModelParams::new(file.d, file.lambda, file.alpha)
            .map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Self {
            params,
            n_values: file.n_values,
            trials: file.trials,
            betas: file.betas,
            mode: file.mode,
            master_seed: file.master_seed,
            containment_c: file.containment_c,
            out_dir: file.out_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            schema: CONFIG_SCHEMA,
            d: self.params.d(),
            alpha: self.params.alpha(),
            lambda: self.params.lambda(),
            n_values: self.n_values.clone(),
            trials: self.trials,
            betas: self.betas.clone(),
            mode: self.mode,
            master_seed: self.master_seed,
            containment_c: self.containment_c,
            out_dir: self.out_dir.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values is empty".into()));
        }
        for &n in &self.n_values {
            if n < MIN_N {
                return Err(Error::Config(format!("n = {n} is below {MIN_N}")));
            }
            for &beta in &self.betas {
                critical_radius(&self.params, n as f64, beta).map_err(|e| {
                    Error::Config(format!("beta = {beta} unusable at n = {n}: {e}"))
                })?;
            }
            if let Some(c) = self.containment_c {
                crate::model::containment_radius(&self.params, n as f64, c).map_err(|e| {
                    Error::Config(format!("containment_c = {c} unusable at n = {n}: {e}"))
                })?;
                if c < 0.0 {
                    crate::model::containment_radius(&self.params, n as f64, 0.0).map_err(
                        |e| Error::Config(format!("shell radius unusable at n = {n}: {e}")),
                    )?;
                }
            }
        }
        if self.betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("betas must be finite".into()));
        }
        let mut sorted = self.betas.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("betas contain duplicates".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"schema":1,"d":2,"alpha":2.0,"lambda":1.0,"n_values":[100],
        "trials":2,"betas":[-1,0,1],"mode":"binomial","master_seed":7,"out_dir":"out"}"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_json(GOOD).unwrap();
        assert_eq!(cfg.trials, 2);
        assert_eq!(cfg.betas, vec![-1.0, 0.0, 1.0]);
        assert_eq!(cfg.containment_c, None);
        let back = serde_json::to_string(&cfg.to_file()).unwrap();
        assert_eq!(ExperimentConfig::from_json(&back).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = GOOD.replace("\"trials\"", "\"trails\"");
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config(_))));
        let extra = GOOD.replace("\"out_dir\"", "\"colour\":1,\"out_dir\"");
        assert!(matches!(ExperimentConfig::from_json(&extra), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_values() {
        for (from, to) in [
            ("\"schema\":1", "\"schema\":2"),
            ("\"trials\":2", "\"trials\":0"),
            ("[100]", "[10]"),
            ("[100]", "[]"),
            ("\"d\":2", "\"d\":1"),
            ("[-1,0,1]", "[-50]"),
            ("[-1,0,1]", "[0,0]"),
            ("\"binomial\"", "\"uniform\""),
        ] {
            let bad = GOOD.replace(from, to);
            assert!(
                matches!(ExperimentConfig::from_json(&bad), Err(Error::Config(_))),
                "{from} -> {to}"
            );
        }
    }
}
