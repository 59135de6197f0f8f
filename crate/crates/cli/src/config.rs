//! Campaign configuration, read from a flat TOML document.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decomposer {
    Svg,
    Dg,
    Rdg,
}

impl Decomposer {
    pub fn name(self) -> &'static str {
        match self {
            Decomposer::Svg => "svg",
            Decomposer::Dg => "dg",
            Decomposer::Rdg => "rdg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Everything needed to reproduce a campaign. Missing keys take the values
/// printed by `svg defaults`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// Benchmark function ids (1..=21).
    pub functions: Vec<u8>,
    pub n: usize,
    pub m: usize,
    pub seeds: Vec<u64>,
    pub decomposers: Vec<Decomposer>,
    /// Run the optimizer after decomposing.
    pub optimize: bool,
    /// Evaluation budget per row, decomposition included.
    pub budget: u64,
    pub out_dir: PathBuf,
    pub format: Format,
    /// Added to every seed.
    pub seed_offset: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Threshold of the additive criterion used by the baselines.
    pub epsilon: f64,
    /// Optimizer generations per group per round-robin turn.
    pub generations: usize,
    /// Record wall-clock time per row. Off by default because timings make
    /// otherwise identical reports differ.
    pub timing: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            functions: (1..=21).collect(),
            n: 100,
            m: 10,
            seeds: (0..10).collect(),
            decomposers: vec![Decomposer::Svg],
            optimize: false,
            budget: 3_000_000,
            out_dir: PathBuf::from("results"),
            format: Format::Csv,
            seed_offset: 0,
            jobs: 0,
            epsilon: 1e-10,
            generations: 50,
            timing: false,
        }
    }
}

impl CampaignConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("campaign config is always serializable")
    }

    /// Structural checks only; a bad function id or an incompatible `n`
    /// fails its own rows instead of the whole campaign.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: &str| Err(CliError::Config(msg.into()));
        if self.seeds.is_empty() {
            return fail("seeds must not be empty");
        }
        if self.functions.is_empty() {
            return fail("functions must not be empty");
        }
        if self.decomposers.is_empty() {
            return fail("decomposers must not be empty");
        }
        if self.budget == 0 {
            return fail("budget must be positive");
        }
        if self.generations == 0 {
            return fail("generations must be positive");
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return fail("epsilon must be finite and non-negative");
        }
        Ok(())
    }

    /// Seeds after applying the offset.
    pub fn effective_seeds(&self) -> Vec<u64> {
        self.seeds.iter().map(|s| s.wrapping_add(self.seed_offset)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = CampaignConfig::default();
        assert_eq!(CampaignConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_document_fills_defaults() {
        let cfg = CampaignConfig::from_toml("functions = [1, 21]\nseeds = [4]\ndecomposers = [\"dg\"]\n").unwrap();
        assert_eq!(cfg.functions, vec![1, 21]);
        assert_eq!(cfg.decomposers, vec![Decomposer::Dg]);
        assert_eq!(cfg.n, 100);
    }

    #[test]
    fn invalid_documents() {
        assert!(CampaignConfig::from_toml("seeds = []").is_err());
        assert!(CampaignConfig::from_toml("budget = 0").is_err());
        assert!(CampaignConfig::from_toml("unknown_key = 1").is_err());
        assert!(CampaignConfig::from_toml("decomposers = [\"dg2\"]").is_err());
    }

    #[test]
    fn offset_applies_to_every_seed() {
        let cfg = CampaignConfig { seeds: vec![0, 5], seed_offset: 100, ..CampaignConfig::default() };
        assert_eq!(cfg.effective_seeds(), vec![100, 105]);
    }
}
