//! Run configuration: built-in defaults, then the file named by
//! `GA_KERNEL_CONFIG`, then command-line flags.

use std::path::Path;

use clap::{Args, ValueEnum};
use ga_kernel_core::derivation::DEFAULT_LND_CAP;
use ga_kernel_core::flow::{required_order, DEFAULT_DETECT_DEGREE, DEFAULT_SERIES_ORDER};
use ga_kernel_core::toric::{DEFAULT_ROOT_BOUND, DEFAULT_SAMPLES};
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "GA_KERNEL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Pretty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub detect_degree: usize,
    pub series_order: usize,
    pub lnd_cap: usize,
    pub root_bound: i64,
    pub trust_fan: bool,
    pub samples: usize,
    pub output: Output,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            detect_degree: DEFAULT_DETECT_DEGREE,
            series_order: DEFAULT_SERIES_ORDER,
            lnd_cap: DEFAULT_LND_CAP,
            root_bound: DEFAULT_ROOT_BOUND,
            trust_fan: false,
            samples: DEFAULT_SAMPLES,
            output: Output::Json,
        }
    }
}

/// Every field optional; shared by the config file and the flags.
#[derive(Debug, Clone, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Largest denominator degree tried when reconstructing a flow [default: 8]
    #[arg(long, global = true)]
    pub detect_degree: Option<usize>,
    /// Number of series coefficients computed, at least 2*detect_degree + 4
    /// [default: 20, or 2*detect_degree + 4 if larger]
    #[arg(long, global = true)]
    pub series_order: Option<usize>,
    /// Iteration cap for the nilpotency test [default: 64]
    #[arg(long, global = true)]
    pub lnd_cap: Option<usize>,
    /// Box bound for root enumeration [default: 5]
    #[arg(long, global = true)]
    pub root_bound: Option<i64>,
    /// Skip the pairwise face check on fan input
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub trust_fan: Option<bool>,
    /// Sample count for the rank >= 3 convexity test [default: 512]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output style [default: json]
    #[arg(long, global = true, value_enum)]
    pub output: Option<Output>,
}

impl Overrides {
    fn apply(&self, c: &mut CliConfig, explicit_order: &mut bool) {
        if let Some(v) = self.detect_degree {
            c.detect_degree = v;
        }
        if let Some(v) = self.series_order {
            c.series_order = v;
            *explicit_order = true;
        }
        if let Some(v) = self.lnd_cap {
            c.lnd_cap = v;
        }
        if let Some(v) = self.root_bound {
            c.root_bound = v;
        }
        if let Some(v) = self.trust_fan {
            c.trust_fan = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = self.output {
            c.output = v;
        }
    }
}

impl CliConfig {
    /// Layers `file` (if any) and then `flags` over the defaults.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut c = CliConfig::default();
        let mut explicit_order = false;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let o: Overrides = serde_json::from_str(&text)
                .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
            o.apply(&mut c, &mut explicit_order);
        }
        flags.apply(&mut c, &mut explicit_order);
        if !explicit_order {
            c.series_order = c.series_order.max(required_order(c.detect_degree));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive =
            [("detect-degree", self.detect_degree), ("lnd-cap", self.lnd_cap), ("samples", self.samples)];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Invalid(format!("{name} must be positive")));
        }
        if self.root_bound < 1 {
            return Err(CliError::Invalid("root-bound must be positive".into()));
        }
        let needed = required_order(self.detect_degree);
        if self.series_order < needed {
            return Err(CliError::Invalid(format!(
                "series-order {} is below 2*detect-degree + 4 = {needed}",
                self.series_order
            )));
        }
        Ok(())
    }
}
