//! Tunable limits shared by the verification and realization code.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Prefix length used when certifying round generators.
    pub prefix_len: usize,
    /// Largest fibre size accepted for user sequences.
    pub count_bound: usize,
    /// Divisors `1..=zero_window` checked for order-0 round generators.
    pub zero_window: u64,
    /// Largest coset transversal enumerated during decomposition.
    pub max_transversal: usize,
    /// Number of density characters.
    pub chars: usize,
    /// Prefix length for numeric realization.
    pub realize_prefix: usize,
    pub eps: f64,
    /// Indices instantiated per omega-multiplicity summand.
    pub truncation: u64,
    pub seed: u64,
    /// Attempts made by `build_characters` before giving up.
    pub retries: u32,
    /// Order cap for pairwise-exhaustive oracle suites.
    pub pair_cap: u64,
    /// Order cap for single-pass oracle suites.
    pub single_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prefix_len: 1000,
            count_bound: 8,
            zero_window: 64,
            max_transversal: crate::closed::DEFAULT_MAX_TRANSVERSAL,
            chars: 4,
            realize_prefix: 2000,
            eps: 0.05,
            truncation: 64,
            seed: 0,
            retries: 3,
            pair_cap: 64,
            single_cap: 256,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.prefix_len == 0 || self.realize_prefix == 0 {
            return bad("prefix lengths must be at least 1");
        }
        if self.count_bound == 0 {
            return bad("count bound must be at least 1");
        }
        if self.zero_window == 0 {
            return bad("zero window must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0, 1)");
        }
        if self.chars == 0 || self.chars > 16 {
            return bad("chars must lie in 1..=16");
        }
        if self.truncation == 0 {
            return bad("truncation must be at least 1");
        }
        if self.retries == 0 {
            return bad("retries must be at least 1");
        }
        Ok(())
    }
}
