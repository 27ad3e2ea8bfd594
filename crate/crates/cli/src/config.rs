//! Run configuration: a `key = value` file with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u64,
    /// p-adic precision K.
    pub precision: u32,
    /// Number of Laurent tail terms N.
    pub order: usize,
    /// q-expansion truncation M.
    pub qprec: usize,
    pub windows: Vec<String>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub seed: u64,
    /// 0 uses every core, 1 runs sequentially.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            precision: 64,
            order: 20,
            qprec: 60,
            windows: Vec::new(),
            csv: None,
            json: None,
            seed: 0,
            jobs: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Blank lines and `#` comments are skipped; `window` may repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(ConfigError(format!("line {}: expected key = value", i + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError(format!("line {}: bad value {value:?} for {key}", i + 1));
            match key {
                "p" => cfg.p = value.parse().map_err(|_| bad())?,
                "precision" | "K" => cfg.precision = value.parse().map_err(|_| bad())?,
                "order" | "N" => cfg.order = value.parse().map_err(|_| bad())?,
                "qprec" | "M" => cfg.qprec = value.parse().map_err(|_| bad())?,
                "window" => cfg.windows.push(value.to_string()),
                "windows" => cfg.windows.extend(value.split(',').map(|w| w.trim().to_string()).filter(|w| !w.is_empty())),
                "csv" => cfg.csv = Some(PathBuf::from(value)),
                "json" => cfg.json = Some(PathBuf::from(value)),
                "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
                "jobs" => cfg.jobs = value.parse().map_err(|_| bad())?,
                _ => bail!(ConfigError(format!("line {}: unknown key {key:?}", i + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision == 0 || self.order == 0 || self.qprec == 0 {
            bail!(ConfigError("K, N and M must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::parse("p = 3\n# comment\nK=32\nwindow = inner:0:5\nwindows = outer:1, inner:0:7\n").unwrap();
        assert_eq!(cfg.p, 3);
        assert_eq!(cfg.precision, 32);
        assert_eq!(cfg.windows, vec!["inner:0:5", "outer:1", "inner:0:7"]);
        assert!(cfg.validate().is_ok());
        assert!(RunConfig::parse("K = 0").unwrap().validate().is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("p 2").is_err());
    }
}
