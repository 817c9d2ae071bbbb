//! Experiment configuration and its TOML grammar.
//!
//! ```toml
//! scenario = "nodr_vs_dr"          # r0_vs_r1 | nodr_vs_dr | all-scenarios | [..]
//! fusion = "all-strategies"        # maj wmaj avg pro min max, or a list
//! search = ["forward", "backward"] # forward backward all single_best | all-methods
//! energy = "all-energies"          # sensitivity accuracy fscore
//! energy_on = "validation"         # validation | train
//! validation_fraction = 0.25
//! search_mode = "single_pass"      # single_pass | iterative
//! product_floor = 0.0
//! out_dir = "out"
//!
//! [data]
//! path = "features.csv"            # or a [data.synth] table
//!
//! [cv]
//! k = 10
//! seed = 0
//!
//! [[pool]]
//! kind = "knn"
//! k = 5
//! ```
//!
//! Unknown keys are errors. Relative paths resolve against the directory of
//! the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::LearnerSpec;
use crate::dataio::{Scenario, SynthParams, REFERENCE_PROPORTIONS};
use crate::fusion::{build_combiner, FusionOptions, STRATEGY_NAMES};
use crate::selection::{SearchMode, ENERGY_NAMES, SEARCH_NAMES};

/// A configuration problem, tagged with the offending key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }
}

/// A single name, a list of names, or an `all-*` keyword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NameList {
    One(String),
    Many(Vec<String>),
}

impl NameList {
    fn many(names: &[&str]) -> Self {
        NameList::Many(names.iter().map(|s| s.to_string()).collect())
    }

    /// Expands `all_keyword` and checks every name against `vocabulary`.
    /// Duplicates are dropped, first occurrence kept.
    pub fn expand(&self, key: &str, all_keyword: &str, vocabulary: &[&str]) -> Result<Vec<String>, ConfigError> {
        let raw: Vec<&str> = match self {
            NameList::One(s) => vec![s.as_str()],
            NameList::Many(v) => v.iter().map(String::as_str).collect(),
        };
        let mut out: Vec<String> = Vec::new();
        for name in raw {
            let names: Vec<&str> = if name == all_keyword {
                vocabulary.to_vec()
            } else if vocabulary.contains(&name) {
                vec![name]
            } else {
                return Err(ConfigError::new(
                    key,
                    format!(
                        "unknown value `{name}` (expected one of: {}, {all_keyword})",
                        vocabulary.join(", ")
                    ),
                ));
            };
            for n in names {
                if !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
        }
        if out.is_empty() {
            return Err(ConfigError::new(key, "must name at least one value"));
        }
        Ok(out)
    }
}

/// Grade proportions: a named preset or four explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Proportions {
    Preset(String),
    Values(Vec<f64>),
}

impl Default for Proportions {
    fn default() -> Self {
        Proportions::Preset("reference".into())
    }
}

impl Proportions {
    pub fn resolve(&self) -> Result<[f64; 4], String> {
        match self {
            Proportions::Preset(name) if name == "reference" => Ok(REFERENCE_PROPORTIONS),
            Proportions::Preset(name) => Err(format!("unknown preset `{name}` (expected `reference` or four numbers)")),
            Proportions::Values(v) => <[f64; 4]>::try_from(v.as_slice())
                .map_err(|_| format!("expected four proportions (R0..R3), got {}", v.len())),
        }
    }

    /// Parses `reference` or a comma-separated list of four numbers.
    pub fn parse(text: &str) -> Result<Self, String> {
        if !text.contains(',') {
            return Ok(Proportions::Preset(text.trim().to_string()));
        }
        text.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
            .collect::<Result<Vec<_>, _>>()
            .map(Proportions::Values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub proportions: Proportions,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> usize {
    1200
}

fn default_separation() -> f64 {
    5.0
}

impl SynthConfig {
    pub fn params(&self) -> Result<SynthParams, ConfigError> {
        let proportions = self
            .proportions
            .resolve()
            .map_err(|m| ConfigError::new("data.synth.proportions", m))?;
        let sum: f64 = proportions.iter().sum();
        if proportions.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-6 {
            return Err(ConfigError::new(
                "data.synth.proportions",
                format!("{proportions:?} must be non-negative and sum to 1 (sum is {sum})"),
            ));
        }
        if self.n < 4 {
            return Err(ConfigError::new("data.synth.n", format!("must be at least 4, got {}", self.n)));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(ConfigError::new(
                "data.synth.separation",
                format!("must be non-negative, got {}", self.separation),
            ));
        }
        Ok(SynthParams {
            n: self.n,
            proportions,
            separation: self.separation,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub path: Option<PathBuf>,
    pub synth: Option<SynthConfig>,
}

/// Resolved data source.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Path(PathBuf),
    Synth(SynthParams),
}

impl DataConfig {
    pub fn source(&self) -> Result<DataSource, ConfigError> {
        match (&self.path, &self.synth) {
            (Some(p), None) => Ok(DataSource::Path(p.clone())),
            (None, Some(s)) => Ok(DataSource::Synth(s.params()?)),
            _ => Err(ConfigError::new("data", "set exactly one of `data.path` or `data.synth`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> usize {
    10
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { k: 10, seed: 0 }
    }
}

/// Data on which search energies and weighted-majority weights are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyOn {
    /// A stratified slice held out of each training split; the pool is
    /// trained on the remainder.
    #[default]
    Validation,
    /// The full training split, which the pool is also trained on.
    Train,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    #[serde(default = "default_scenario")]
    pub scenario: NameList,
    pub pool: Vec<LearnerSpec>,
    #[serde(default = "default_fusion")]
    pub fusion: NameList,
    #[serde(default = "default_search")]
    pub search: NameList,
    #[serde(default = "default_energy")]
    pub energy: NameList,
    #[serde(default)]
    pub cv: CvConfig,
    #[serde(default)]
    pub energy_on: EnergyOn,
    #[serde(default = "default_validation_fraction")]
    pub validation_fraction: f64,
    #[serde(default)]
    pub search_mode: SearchMode,
    #[serde(default)]
    pub product_floor: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_scenario() -> NameList {
    NameList::One("nodr_vs_dr".into())
}

fn default_fusion() -> NameList {
    NameList::One("all-strategies".into())
}

fn default_search() -> NameList {
    NameList::many(&["forward", "backward"])
}

fn default_energy() -> NameList {
    NameList::One("all-energies".into())
}

fn default_validation_fraction() -> f64 {
    0.25
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The grid axes of a validated config.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxes {
    pub scenarios: Vec<Scenario>,
    pub strategies: Vec<String>,
    pub searches: Vec<String>,
    pub energies: Vec<String>,
}

const SCENARIO_NAMES: [&str; 2] = ["r0_vs_r1", "nodr_vs_dr"];

impl ExperimentConfig {
    /// Config with the given data and pool and every other key at its default.
    pub fn new(data: DataConfig, pool: Vec<LearnerSpec>) -> Self {
        ExperimentConfig {
            data,
            scenario: default_scenario(),
            pool,
            fusion: default_fusion(),
            search: default_search(),
            energy: default_energy(),
            cv: CvConfig::default(),
            energy_on: EnergyOn::default(),
            validation_fraction: default_validation_fraction(),
            search_mode: SearchMode::default(),
            product_floor: 0.0,
            out_dir: default_out_dir(),
        }
    }

    /// Checks every key and expands the grid axes.
    pub fn validate(&self) -> Result<GridAxes, ConfigError> {
        self.data.source()?;
        if self.pool.is_empty() {
            return Err(ConfigError::new("pool", "the classifier pool is empty"));
        }
        for (i, spec) in self.pool.iter().enumerate() {
            spec.build()
                .map_err(|e| ConfigError::new(format!("pool[{i}]"), e.to_string()))?;
        }
        if self.cv.k < 2 {
            return Err(ConfigError::new("cv.k", format!("must be at least 2, got {}", self.cv.k)));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(ConfigError::new(
                "validation_fraction",
                format!("must lie in (0, 1), got {}", self.validation_fraction),
            ));
        }
        build_combiner("pro", &self.fusion_options()).map_err(|e| ConfigError::new("product_floor", e.to_string()))?;
        let scenarios = self
            .scenario
            .expand("scenario", "all-scenarios", &SCENARIO_NAMES)?
            .iter()
            .map(|s| s.parse().expect("vocabulary checked"))
            .collect();
        Ok(GridAxes {
            scenarios,
            strategies: self.fusion.expand("fusion", "all-strategies", &STRATEGY_NAMES)?,
            searches: self.search.expand("search", "all-methods", &SEARCH_NAMES)?,
            energies: self.energy.expand("energy", "all-energies", &ENERGY_NAMES)?,
        })
    }

    pub fn fusion_options(&self) -> FusionOptions {
        FusionOptions {
            product_floor: self.product_floor,
        }
    }

    /// Makes relative `data.path` and `out_dir` relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = self.data.path.as_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.out_dir.is_relative() {
            self.out_dir = base.join(&self.out_dir);
        }
    }
}

fn parse_override_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies `key=value` with a dotted key (`cv.seed=7`, `pool.0.k=3`).
/// Values are TOML literals; anything that does not parse is a string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let segments: Vec<&str> = key.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ConfigError::new(key, "empty path segment"));
    }
    let mut root = toml::Value::Table(std::mem::take(table));
    let result = set_path(&mut root, key, &segments, parse_override_value(raw.trim()));
    if let toml::Value::Table(t) = root {
        *table = t;
    }
    result
}

fn set_path(node: &mut toml::Value, key: &str, segments: &[&str], value: toml::Value) -> Result<(), ConfigError> {
    let (seg, rest) = segments.split_first().expect("non-empty path");
    let slot = match node {
        toml::Value::Table(t) if rest.is_empty() => {
            t.insert(seg.to_string(), value);
            return Ok(());
        }
        toml::Value::Table(t) => t
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new())),
        toml::Value::Array(a) => {
            let i: usize = seg
                .parse()
                .map_err(|_| ConfigError::new(key, format!("`{seg}` is not an array index")))?;
            let len = a.len();
            a.get_mut(i)
                .ok_or_else(|| ConfigError::new(key, format!("index {i} out of range (length {len})")))?
        }
        _ => return Err(ConfigError::new(key, format!("cannot descend into `{seg}`"))),
    };
    if rest.is_empty() {
        *slot = value;
        Ok(())
    } else {
        set_path(slot, key, rest, value)
    }
}

/// Key named by a serde "unknown field" / "missing field" message.
fn key_from_message(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

/// Parses config text, applies overrides and validates.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| {
        let message = e.to_string();
        ConfigError::new(key_from_message(&message).unwrap_or_else(|| "<file>".into()), message)
    })?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: ExperimentConfig = table.try_into().map_err(|e: toml::de::Error| {
        let message = e.message().to_string();
        ConfigError::new(key_from_message(&message).unwrap_or_else(|| "<file>".into()), message)
    })?;
    config.validate()?;
    Ok(config)
}

/// Reads, overrides, resolves relative paths and validates a config file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text, overrides)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        scenario = "nodr_vs_dr"
        fusion = "avg"
        search = "forward"
        energy = "accuracy"

        [data.synth]
        n = 200
        separation = 3.0

        [cv]
        k = 5
        seed = 1

        [[pool]]
        kind = "knn"
        k = 3

        [[pool]]
        kind = "naive_bayes"
    "#;

    #[test]
    fn parses_and_applies_defaults() {
        let c = parse_config(BASE, &[]).unwrap();
        assert_eq!(c.cv, CvConfig { k: 5, seed: 1 });
        assert_eq!(c.energy_on, EnergyOn::Validation);
        assert_eq!(c.pool.len(), 2);
        assert_eq!(c.pool[0].params.float("k"), Some(3.0));
        match c.data.source().unwrap() {
            DataSource::Synth(p) => {
                assert_eq!(p.n, 200);
                assert_eq!(p.proportions, REFERENCE_PROPORTIONS);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_keywords_expand_to_the_full_vocabulary() {
        let text = BASE
            .replace(r#"fusion = "avg""#, r#"fusion = "all-strategies""#)
            .replace(r#"energy = "accuracy""#, r#"energy = ["all-energies", "accuracy"]"#)
            .replace(r#"search = "forward""#, r#"search = "all-methods""#);
        let axes = parse_config(&text, &[]).unwrap().validate().unwrap();
        assert_eq!(axes.strategies, STRATEGY_NAMES);
        assert_eq!(axes.energies, ENERGY_NAMES);
        assert_eq!(axes.searches, SEARCH_NAMES);
    }

    #[test]
    fn unknown_strategy_names_the_fusion_key() {
        let text = BASE.replace(r#"fusion = "avg""#, r#"fusion = "median""#);
        let err = parse_config(&text, &[]).unwrap_err();
        assert_eq!(err.key, "fusion");
        assert!(err.to_string().contains("median"));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = parse_config(&format!("fusoin = \"avg\"\n{BASE}"), &[]).unwrap_err();
        assert_eq!(err.key, "fusoin");
        let err = parse_config(&BASE.replace("seed = 1", "sed = 1"), &[]).unwrap_err();
        assert_eq!(err.key, "sed");
    }

    #[test]
    fn bad_learner_params_name_the_pool_entry() {
        let err = parse_config(&BASE.replace("k = 3", "k = 0"), &[]).unwrap_err();
        assert_eq!(err.key, "pool[0]");
    }

    #[test]
    fn overrides_use_dotted_paths() {
        let c = parse_config(BASE, &["cv.seed=7".into(), "pool.0.k=9".into(), "energy_on=train".into()]).unwrap();
        assert_eq!(c.cv, CvConfig { k: 5, seed: 7 });
        assert_eq!(c.pool[0].params.float("k"), Some(9.0));
        assert_eq!(c.energy_on, EnergyOn::Train);

        let err = parse_config(BASE, &["cv.k=1".into()]).unwrap_err();
        assert_eq!(err.key, "cv.k");
        let err = parse_config(BASE, &["pool.5.k=1".into()]).unwrap_err();
        assert_eq!(err.key, "pool.5.k");
        assert!(parse_config(BASE, &["novalue".into()]).is_err());
    }

    #[test]
    fn data_source_must_be_unique() {
        let text = BASE.replace("[data.synth]", "[data]\npath = \"x.csv\"\n[data.synth]");
        assert_eq!(parse_config(&text, &[]).unwrap_err().key, "data");
        let text = BASE.replace("separation = 3.0", "proportions = [0.5, 0.5]");
        assert_eq!(parse_config(&text, &[]).unwrap_err().key, "data.synth.proportions");
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut c = parse_config(&BASE.replace("[data.synth]\n        n = 200\n        separation = 3.0", "[data]\npath = \"d.csv\""), &[]).unwrap();
        c.resolve_paths(Path::new("/tmp/exp"));
        assert_eq!(c.data.path.as_deref(), Some(Path::new("/tmp/exp/d.csv")));
        assert_eq!(c.out_dir, Path::new("/tmp/exp/out"));
    }

    #[test]
    fn proportions_parse_from_flags() {
        assert_eq!(Proportions::parse("reference").unwrap().resolve().unwrap(), REFERENCE_PROPORTIONS);
        assert_eq!(
            Proportions::parse("0.25, 0.25,0.25,0.25").unwrap().resolve().unwrap(),
            [0.25; 4]
        );
        assert!(Proportions::parse("0.5,x").is_err());
        assert!(Proportions::parse("uniform").unwrap().resolve().is_err());
    }
}
