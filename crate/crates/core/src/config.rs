use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::PrecisionPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Md,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(OutputFormat::Md),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("unknown output format {s:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Md => "md",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

pub const MAX_PRECISION_BITS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub precision_bits: u64,
    /// 0 is accepted and turns every search-based check into `Undecided`.
    pub search_radius: u64,
    pub denom_bound: u64,
    pub dimension_cap: usize,
    pub integer_cap_bits: u64,
    pub output_format: OutputFormat,
    pub seed: u64,
    /// Statement groups to run; empty means all.
    pub only: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            precision_bits: 128,
            search_radius: 3,
            denom_bound: 4,
            dimension_cap: 5000,
            integer_cap_bits: 1_000_000,
            output_format: OutputFormat::Md,
            seed: 42,
            only: Vec::new(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits == 0 || self.precision_bits > MAX_PRECISION_BITS {
            return Err(Error::InvalidInput(format!(
                "precision_bits must be in 1..={MAX_PRECISION_BITS}"
            )));
        }
        if self.denom_bound == 0 || self.dimension_cap == 0 || self.integer_cap_bits == 0 {
            return Err(Error::InvalidInput(
                "denom_bound, dimension_cap and integer_cap_bits must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: self.precision_bits,
            max_bits: MAX_PRECISION_BITS,
            integer_cap_bits: self.integer_cap_bits,
        }
    }

    /// The policy used where a check asks for a fixed working precision.
    pub fn policy_at(&self, bits: u64) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: bits.max(self.precision_bits).min(MAX_PRECISION_BITS),
            ..self.policy()
        }
    }

    pub fn selects(&self, group: &str) -> bool {
        self.only.is_empty() || self.only.iter().any(|g| g == group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.policy(), PrecisionPolicy::default());
        let bad = Config {
            precision_bits: 5000,
            ..Config::default()
        };
        assert!(bad.validate().is_err());
        let zero_radius = Config {
            search_radius: 0,
            ..Config::default()
        };
        zero_radius.validate().unwrap();
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
    }
}
