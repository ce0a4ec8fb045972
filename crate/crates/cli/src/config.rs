//! Flat run configuration: defaults, then a TOML file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spikegnn::eval::EvalSet;
use spikegnn::graphnet::{NetworkParams, SplitSizes};

use crate::error::{Failure, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    /// `content` and `cites` files.
    #[default]
    Files,
    /// The bundled 24-paper dataset.
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EvalSetName {
    #[default]
    Validation,
    Test,
}

impl From<EvalSetName> for EvalSet {
    fn from(s: EvalSetName) -> Self {
        match s {
            EvalSetName::Validation => EvalSet::Validation,
            EvalSetName::Test => EvalSet::Test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Dataset,
    pub content: Option<PathBuf>,
    pub cites: Option<PathBuf>,

    pub paper_to_paper_w: i32,
    pub train_to_topic_w: i32,
    pub tau: u32,
    pub sim_steps: u32,
    pub delay: u32,
    pub reset_length: u32,
    pub lr: i32,
    pub a_plus: i32,
    pub a_minus: i32,
    pub trace_impulse: i32,
    pub initial_plastic_weight: i32,

    pub split_seed: u64,
    pub train_per_topic: usize,
    pub validation_size: usize,
    pub eval_set: EvalSetName,

    pub bo_seed: u64,
    pub bo_init: usize,
    pub bo_iter: usize,
    /// TOML file of `dimension = [values]`; the default grid when unset.
    pub grid: Option<PathBuf>,

    pub output: Option<PathBuf>,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = NetworkParams::default();
        let s = SplitSizes::default();
        RunConfig {
            dataset: Dataset::Files,
            content: None,
            cites: None,
            paper_to_paper_w: p.paper_to_paper_w,
            train_to_topic_w: p.train_to_topic_w,
            tau: p.tau,
            sim_steps: 14,
            delay: p.delay,
            reset_length: p.reset_length,
            lr: p.lr,
            a_plus: p.a_plus,
            a_minus: p.a_minus,
            trace_impulse: p.trace_impulse,
            initial_plastic_weight: p.initial_plastic_weight,
            split_seed: 0,
            train_per_topic: s.train_per_topic,
            validation_size: s.validation,
            eval_set: EvalSetName::Validation,
            bo_seed: 0,
            bo_init: 5,
            bo_iter: 10,
            grid: None,
            output: None,
            workers: 1,
        }
    }
}

/// Keys that never change a report's contents.
const NON_SEMANTIC: [&str; 2] = ["output", "workers"];

impl RunConfig {
    pub fn params(&self) -> NetworkParams {
        NetworkParams {
            paper_to_paper_w: self.paper_to_paper_w,
            train_to_topic_w: self.train_to_topic_w,
            tau: self.tau,
            sim_steps: self.sim_steps,
            delay: self.delay,
            reset_length: self.reset_length,
            lr: self.lr,
            a_plus: self.a_plus,
            a_minus: self.a_minus,
            trace_impulse: self.trace_impulse,
            initial_plastic_weight: self.initial_plastic_weight,
        }
    }

    pub fn split_sizes(&self) -> SplitSizes {
        SplitSizes::new(self.train_per_topic, self.validation_size)
    }

    /// Every key that affects results, as flat TOML.
    pub fn to_report_toml(&self) -> String {
        let mut table = toml::Table::try_from(self).expect("config serializes");
        for key in NON_SEMANTIC {
            table.remove(key);
        }
        toml::to_string(&table).expect("flat table serializes")
    }

    /// Resolves defaults, the file at `path` (a config file or a report's
    /// `[config]` section) and then `overrides`.
    pub fn resolve(path: Option<&Path>, overrides: toml::Table) -> Result<Self, Failure> {
        let mut table = match path {
            Some(p) => load_table(p)?,
            None => toml::Table::new(),
        };
        for (k, v) in overrides {
            table.insert(k, v);
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Failure::new(Kind::Config, e.message().trim().to_string()))?;
        if cfg.workers == 0 {
            return Err(Failure::new(Kind::Config, "workers must be at least 1"));
        }
        Ok(cfg)
    }
}

fn load_table(path: &Path) -> Result<toml::Table, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(Kind::Io, format!("cannot read config {}: {e}", path.display())))?;
    let body = spikegnn::report::extract_config(&text).unwrap_or(text);
    body.parse::<toml::Table>()
        .map_err(|e| Failure::new(Kind::Config, format!("{}: {}", path.display(), e.message().trim())))
}
