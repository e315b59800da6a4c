//! `key = value` run configuration.
//!
//! ```text
//! # the worked example
//! rank = 2
//! subgroup = aa, baaaB
//! separate = b
//! conjugator_bound = 4
//! exponents = 1..36
//! ```
//!
//! Word lists are comma separated; peripheral lists separate peripherals by
//! `;`. Integer lists accept `a..b` (inclusive) or comma-separated values.

use std::path::Path;

use serde::Serialize;

use crate::diagnostics::DichotomyParams;
use crate::error::{Error, Result};
use crate::stallings::SubgroupGraph;
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSampling {
    Exhaustive,
    Sample,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub rank: usize,
    pub subgroup: Vec<Word>,
    /// Element to keep out of the image of the subgroup.
    pub separate: Option<Word>,
    /// Length bound for conjugator searches.
    pub conjugator_bound: usize,
    pub radius: usize,
    pub depth: usize,
    /// Candidates for the least exponent giving an H-filling.
    pub exponents: Vec<u64>,
    /// Fixed filling exponent; skips the exponent sweep.
    pub exponent: Option<u64>,
    /// Multiples of the least H-filling exponent tried for injectivity.
    pub max_multiple: u64,
    pub check_radius: usize,
    pub separation_margin: usize,
    pub shortening_cases: usize,
    pub dichotomy: DichotomyParams,
    /// Explicit peripheral structure; only used by the `delta` command.
    pub peripherals: Vec<Vec<Word>>,
    pub delta_mode: DeltaSampling,
    pub delta_samples: u64,
    pub sweep_exponents: Vec<u64>,
    pub sweep_radii: Vec<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            rank: 2,
            subgroup: Vec::new(),
            separate: None,
            conjugator_bound: 4,
            radius: 2,
            depth: 4,
            exponents: (1..=36).collect(),
            exponent: None,
            max_multiple: 6,
            check_radius: 2,
            separation_margin: 4,
            shortening_cases: 20,
            dichotomy: DichotomyParams {
                local: 1,
                threshold: 2,
                delta: 0.0,
                kernel_search: 2,
            },
            peripherals: Vec::new(),
            delta_mode: DeltaSampling::Exhaustive,
            delta_samples: 100_000,
            sweep_exponents: Vec::new(),
            sweep_radii: Vec::new(),
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value for {key}: {value:?}"))
}

fn words(key: &str, value: &str) -> Result<Vec<Word>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Word>().map_err(|_| bad(key, s)))
        .collect()
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn numbers(key: &str, value: &str) -> Result<Vec<u64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = number(key, a.trim())?;
        let b: u64 = number(key, b.trim())?;
        return Ok((a..=b).collect());
    }
    value.split(',').map(|s| number(key, s.trim())).collect()
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = PipelineConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "rank" => c.rank = number(key, value)?,
                "subgroup" => c.subgroup = words(key, value)?,
                "separate" => c.separate = Some(number(key, value)?),
                "conjugator_bound" => c.conjugator_bound = number(key, value)?,
                "radius" => c.radius = number(key, value)?,
                "depth" => c.depth = number(key, value)?,
                "exponents" => c.exponents = numbers(key, value)?,
                "exponent" => c.exponent = Some(number(key, value)?),
                "max_multiple" => c.max_multiple = number(key, value)?,
                "check_radius" => c.check_radius = number(key, value)?,
                "separation_margin" => c.separation_margin = number(key, value)?,
                "shortening_cases" => c.shortening_cases = number(key, value)?,
                "dichotomy_local" => c.dichotomy.local = number(key, value)?,
                "dichotomy_threshold" => c.dichotomy.threshold = number(key, value)?,
                "dichotomy_delta" => c.dichotomy.delta = number(key, value)?,
                "kernel_search" => c.dichotomy.kernel_search = number(key, value)?,
                "peripherals" => {
                    c.peripherals = value
                        .split(';')
                        .map(|p| words(key, p))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .filter(|p| !p.is_empty())
                        .collect()
                }
                "delta_mode" => {
                    c.delta_mode = match value {
                        "exhaustive" => DeltaSampling::Exhaustive,
                        "sample" => DeltaSampling::Sample,
                        _ => return Err(bad(key, value)),
                    }
                }
                "delta_samples" => c.delta_samples = number(key, value)?,
                "sweep_exponents" => c.sweep_exponents = numbers(key, value)?,
                "sweep_radii" => c.sweep_radii = numbers(key, value)?.into_iter().map(|r| r as usize).collect(),
                _ => return Err(Error::Config(format!("unknown key {key:?}"))),
            }
        }
        c.check_words()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        PipelineConfig::parse(&std::fs::read_to_string(path)?)
    }

    fn check_words(&self) -> Result<()> {
        let all = self
            .subgroup
            .iter()
            .chain(self.separate.iter())
            .chain(self.peripherals.iter().flatten());
        for w in all {
            if w.max_generator().is_some_and(|g| g >= self.rank) {
                return Err(Error::Config(format!("{w} uses a generator beyond rank {}", self.rank)));
            }
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn subgroup_graph(&self) -> SubgroupGraph {
        SubgroupGraph::from_generators(self.rank, &self.subgroup)
    }

    /// The pipeline needs a subgroup and an element outside it.
    pub fn validate_for_pipeline(&self) -> Result<Word> {
        let g = self
            .separate
            .clone()
            .ok_or_else(|| Error::Config("missing key separate".into()))?;
        if self.subgroup_graph().contains(&g) {
            return Err(Error::Precondition(format!(
                "{g} lies in the subgroup; nothing to separate"
            )));
        }
        Ok(g)
    }
}
