//! Run configuration: defaults, TOML config file, and the
//! `LOGLAB_SEED` environment override.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All knobs of a pipeline run. Flat key/value TOML on disk; CLI flags
/// override file values, and `LOGLAB_SEED` overrides the seed last.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub roots: Vec<PathBuf>,
    pub methods_file: PathBuf,
    pub data_dir: PathBuf,
    pub seed: u64,
    pub mask_ratio: f64,
    pub p2_share: f64,
    /// Route every logged method to both the P2 and FT pools instead of
    /// partitioning by `p2_share`.
    pub both_pools: bool,
    pub receiver_extra: Vec<String>,
    pub exclude_globs: Vec<String>,
    pub split_ratios: [f64; 3],
    /// Worker threads; 0 = one per core.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            roots: Vec::new(),
            methods_file: PathBuf::from("methods.jsonl"),
            data_dir: PathBuf::from("data"),
            seed: 7,
            mask_ratio: 0.15,
            p2_share: 0.5,
            both_pools: false,
            receiver_extra: Vec::new(),
            exclude_globs: Vec::new(),
            split_ratios: [0.8, 0.1, 0.1],
            jobs: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply the `LOGLAB_SEED` environment override.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("LOGLAB_SEED") {
            self.seed = v
                .parse()
                .map_err(|_| Error::Config(format!("LOGLAB_SEED must be an integer, got '{v}'")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mask_ratio > 0.0 && self.mask_ratio < 1.0) {
            return Err(Error::Config(format!("mask_ratio must be in (0,1), got {}", self.mask_ratio)));
        }
        if !(0.0..=1.0).contains(&self.p2_share) {
            return Err(Error::Config(format!("p2_share must be in [0,1], got {}", self.p2_share)));
        }
        let sum: f64 = self.split_ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split_ratios must sum to 1, got {:?}",
                self.split_ratios
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn loads_flat_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loglab.toml");
        std::fs::write(
            &path,
            "seed = 42\nmask_ratio = 0.2\nroots = [\"/tmp/a\"]\nreceiver_extra = [\"audit\"]\n",
        )
        .unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.mask_ratio, 0.2);
        assert_eq!(cfg.receiver_extra, ["audit"]);
        assert_eq!(cfg.p2_share, 0.5); // default preserved
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig { mask_ratio: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        cfg.mask_ratio = 0.15;
        cfg.split_ratios = [0.7, 0.2, 0.2];
        assert!(cfg.validate().is_err());
    }
}
