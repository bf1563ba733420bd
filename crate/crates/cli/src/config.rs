//! Experiment configuration: a TOML file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use dirset_core::Error;
use serde::Deserialize;

/// Every parameter a command may read. Nothing numeric is defaulted here;
/// commands report the missing field by name.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub scenario: Option<String>,
    pub specs: Option<Vec<String>>,
    pub k: Option<usize>,
    pub bound: Option<u64>,
    pub ladder: Option<Vec<u64>>,
    pub checkpoints: Option<Vec<u64>>,
    pub epsilon: Option<f64>,
    pub resolution: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub distinct: Option<bool>,
    pub norm: Option<String>,
    /// `exhaustive`, `sampled` or `auto`.
    pub mode: Option<String>,
    /// `grid` or `random`.
    pub probes: Option<String>,
    pub window: Option<usize>,
    pub function: Option<String>,
    pub limit: Option<usize>,
    pub search_bound: Option<u64>,
    /// Open box as `lo:hi` per coordinate.
    #[serde(rename = "box")]
    pub open_box: Option<Vec<String>>,
    pub scan: Option<ScanConfig>,
    pub budget: Option<BudgetConfig>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lo: Option<String>,
    pub hi: Option<String>,
    /// `pair-scan`, `interval-sieve` or `auto`.
    pub method: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub tuples: Option<u64>,
    pub samples: Option<u64>,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("config {}: {}", path.display(), e.message())))
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl ExperimentConfig {
    /// `self` with every field set in `top` replaced.
    pub fn overlaid(mut self, top: ExperimentConfig) -> ExperimentConfig {
        overlay!(self, top; command, scenario, specs, k, bound, ladder, checkpoints, epsilon, resolution, seed,
            workers, out, format, distinct, norm, mode, probes, window, function, limit, search_bound, open_box);
        if let Some(scan) = top.scan {
            let mut base = self.scan.take().unwrap_or_default();
            overlay!(base, scan; lo, hi, method);
            self.scan = Some(base);
        }
        if let Some(budget) = top.budget {
            let mut base = self.budget.take().unwrap_or_default();
            overlay!(base, budget; tuples, samples);
            self.budget = Some(base);
        }
        self
    }
}

/// Missing-field error naming both the flag and the config key.
pub fn missing(field: &str) -> Error {
    Error::Config(format!("missing `{field}`: pass --{} or set `{field}` in the config", field.replace('_', "-")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file: ExperimentConfig = toml::from_str(
            "command = \"cover\"\nbound = 10\nepsilon = 0.1\n[budget]\ntuples = 5\nsamples = 6\n",
        )
        .unwrap();
        let flags = ExperimentConfig {
            bound: Some(20),
            budget: Some(BudgetConfig { tuples: Some(7), samples: None }),
            ..Default::default()
        };
        let c = file.overlaid(flags);
        assert_eq!((c.bound, c.epsilon), (Some(20), Some(0.1)));
        assert_eq!(c.budget, Some(BudgetConfig { tuples: Some(7), samples: Some(6) }));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("epsilonn = 0.1").is_err());
    }
}
