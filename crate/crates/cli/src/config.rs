//! JSON configuration of each subcommand. Unknown fields are rejected so a
//! typo fails before any work starts.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Deserializer};
use wectkit::classify::StudyGrid;
use wectkit::{Aggregation, Classifier, CurveMetric, ExperimentSpec, Extension, IntensityModel, ShapeKind};

fn default_model() -> IntensityModel {
    IntensityModel::Uniform
}

fn study_grid() -> usize {
    wectkit::shapes::STUDY_GRID
}

fn study_thresholds() -> usize {
    wectkit::classify::STUDY_THRESHOLDS
}

fn first_angle() -> f64 {
    wectkit::direction::DEFAULT_FIRST_ANGLE
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub shape: ShapeKind,
    #[serde(default = "study_grid")]
    pub n: usize,
    pub distribution: IntensityModel,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub classes: Vec<ClassConfig>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WectConfig {
    pub image: PathBuf,
    pub n_s: usize,
    #[serde(default = "study_thresholds")]
    pub n_v: usize,
    pub extension: Extension,
    pub interval: Option<[f64; 2]>,
    #[serde(default = "first_angle")]
    pub first_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Full,
    Empty,
    Shape(ShapeKind),
}

impl<'de> Deserialize<'de> for Support {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Support, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "full" => Ok(Support::Full),
            "empty" => Ok(Support::Empty),
            other => other.parse().map(Support::Shape).map_err(|_| {
                serde::de::Error::custom(format!("unknown support `{other}`, expected full, empty or a shape"))
            }),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectConfig {
    pub support: Support,
    #[serde(default = "study_grid")]
    pub n: usize,
    pub extension: Extension,
    #[serde(default = "default_model")]
    pub distribution: IntensityModel,
    #[serde(default = "first_angle")]
    pub angle: f64,
    #[serde(default = "study_thresholds")]
    pub n_v: usize,
    pub interval: Option<[f64; 2]>,
    /// Number of sampled images for the empirical mean and std columns.
    pub monte_carlo: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceConfig {
    /// WECT JSON files to compare.
    #[serde(default)]
    pub wects: Vec<PathBuf>,
    /// Or a dataset directory whose images are transformed first.
    pub dataset: Option<PathBuf>,
    pub extension: Option<Extension>,
    pub n_s: Option<usize>,
    #[serde(default = "first_angle")]
    pub first_angle: f64,
    #[serde(default)]
    pub metric: CurveMetric,
    #[serde(default)]
    pub aggregation: Aggregation,
    pub interval: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub specs: Vec<ExperimentSpec>,
    pub grid: Option<StudyGrid>,
}

fn sweep_counts() -> Vec<usize> {
    vec![2, 3, 5, 8, 15, 30]
}

fn all_shapes() -> Vec<ShapeKind> {
    ShapeKind::ALL.to_vec()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "all_shapes")]
    pub shapes: Vec<ShapeKind>,
    #[serde(default = "sweep_counts")]
    pub n_s: Vec<usize>,
    #[serde(default)]
    pub classifier: Classifier,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow::Error::new(SchemaError(format!("{}: {e}", path.display()))))
}

/// A config that failed to parse or validate.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for SchemaError {}

pub fn schema(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(SchemaError(msg.into()))
}

/// `--seed` wins over the config's `seed`; one of them is required.
pub fn pick_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    match flag.or(config) {
        Some(s) => Ok(s),
        None => Err(schema("a seed is required: pass --seed or set \"seed\" in the config")),
    }
}

/// Relative paths in a config are resolved against the config's directory.
pub fn resolve(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(p)
    }
}
