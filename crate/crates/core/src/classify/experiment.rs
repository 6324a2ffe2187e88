//! Seeded two-class experiments: dataset generation, WECT features, an 80/20
//! split, training and test accuracy.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bank::CurveBank;
use super::knn::{vote, KnnParams};
use super::svm::{train_kernel_svm, train_svm, Gamma, Kernel, SvmModel};
use crate::dataset::{generate_class_images, test_counts, DatasetSpec};
use crate::direction::{self, Direction};
use crate::error::{Result, WectError};
use crate::grid::{Extension, SimplicialComplex, WeightedComplex};
use crate::intensity::IntensityModel;
use crate::seed;
use crate::shapes::{generate_support, ShapeKind, ShapeSpec};
use crate::wect::{default_interval, vectorize, Wect, WectEngine};

/// Images per class in the study: 250 images, half from each class.
pub const STUDY_CLASS_SIZE: usize = 125;
pub const STUDY_THRESHOLDS: usize = 91;
pub const STUDY_C: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Svm {
        c: f64,
        #[serde(default)]
        kernel: Kernel,
        #[serde(default)]
        gamma: Gamma,
    },
    Knn(KnnParams),
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::Svm {
            c: STUDY_C,
            kernel: Kernel::default(),
            gamma: Gamma::default(),
        }
    }
}

impl Classifier {
    pub fn name(&self) -> String {
        match self {
            Classifier::Svm {
                kernel: Kernel::Linear, ..
            } => "svm-linear".into(),
            Classifier::Svm {
                kernel: Kernel::Rbf, ..
            } => "svm-rbf".into(),
            Classifier::Knn(p) => format!("knn{}", p.k),
        }
    }
}

fn default_n_v() -> usize {
    STUDY_THRESHOLDS
}

fn default_first_angle() -> f64 {
    direction::DEFAULT_FIRST_ANGLE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub class_a: DatasetSpec,
    pub class_b: DatasetSpec,
    pub n_s: usize,
    #[serde(default = "default_n_v")]
    pub n_v: usize,
    /// Threshold interval; defaults to [`default_interval`] of the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default = "default_first_angle")]
    pub first_angle: f64,
    pub extension: Extension,
    #[serde(default)]
    pub classifier: Classifier,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Same-shape study pair: `U(0,1)` against `model` on the study grid.
    /// Class seeds depend on the run seed, the slot and the class, so classes
    /// recur unchanged across pairs, extensions and direction counts.
    pub fn study_pair(
        shape: ShapeKind,
        model: IntensityModel,
        extension: Extension,
        n_s: usize,
        classifier: Classifier,
        seed: u64,
    ) -> ExperimentSpec {
        Self::cross_pair(
            (shape, IntensityModel::Uniform),
            (shape, model),
            extension,
            n_s,
            classifier,
            seed,
        )
    }

    /// Pair of arbitrary study classes.
    pub fn cross_pair(
        a: (ShapeKind, IntensityModel),
        b: (ShapeKind, IntensityModel),
        extension: Extension,
        n_s: usize,
        classifier: Classifier,
        seed: u64,
    ) -> ExperimentSpec {
        ExperimentSpec {
            class_a: study_class(0, a.0, a.1, seed),
            class_b: study_class(1, b.0, b.1, seed),
            n_s,
            n_v: STUDY_THRESHOLDS,
            interval: None,
            first_angle: direction::DEFAULT_FIRST_ANGLE,
            extension,
            classifier,
            seed,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.class_a.shape.n
    }

    pub fn interval(&self) -> (f64, f64) {
        match self.interval {
            Some([a, b]) => (a, b),
            None => default_interval(self.grid_size()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_a.shape.n != self.class_b.shape.n {
            return Err(WectError::Mismatch(format!(
                "classes use grids of size {} and {}",
                self.class_a.shape.n, self.class_b.shape.n
            )));
        }
        if self.n_s == 0 {
            return Err(WectError::NoDirections);
        }
        if self.n_v < 2 {
            return Err(WectError::TooFewSamples(self.n_v));
        }
        let (a, b) = self.interval();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(WectError::DegenerateInterval(a, b));
        }
        self.class_a.model.validate()?;
        self.class_b.model.validate()?;
        let sizes = [self.class_a.count, self.class_b.count];
        if sizes.contains(&0) {
            return Err(WectError::TooFewImages { min: 1, found: 0 });
        }
        let tests = test_counts(&sizes);
        let train = [sizes[0] - tests[0], sizes[1] - tests[1]];
        if train.contains(&0) {
            return Err(WectError::SingleClass);
        }
        match self.classifier {
            Classifier::Svm { c, .. } if !(c > 0.0 && c.is_finite()) => {
                Err(WectError::BadClassifier(format!("C must be positive, got {c}")))
            }
            Classifier::Knn(p) => p.validate(train[0] + train[1]).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Stable 64-bit FNV-1a digest of the JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in json.bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn label(&self) -> String {
        format!(
            "{} {} vs {} {} ({}, n_s={}, {})",
            self.class_a.shape.kind,
            self.class_a.model,
            self.class_b.shape.kind,
            self.class_b.model,
            self.extension,
            self.n_s,
            self.classifier.name()
        )
    }
}

fn study_class(slot: u64, shape: ShapeKind, model: IntensityModel, seed: u64) -> DatasetSpec {
    let shape_id = ShapeKind::ALL.iter().position(|&k| k == shape).unwrap_or(0) as u64;
    let model_json = serde_json::to_string(&model).expect("model serializes");
    let model_id = model_json.bytes().fold(0u64, |h, b| seed::derive(h, &[u64::from(b)]));
    DatasetSpec {
        shape: ShapeSpec::study(shape),
        model,
        count: STUDY_CLASS_SIZE,
        seed: seed::derive(seed, &[slot, shape_id, model_id]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec_hash: String,
    pub label: String,
    pub seed: u64,
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub n_train: usize,
    /// `confusion[true][predicted]`.
    pub confusion: [[usize; 2]; 2],
}

/// Per-image features of one class: sampled WECT vectors for the SVM, whole
/// WECTs for KNN.
#[derive(Debug)]
pub enum ClassFeatures {
    Vectors(Vec<Vec<f64>>),
    Wects(Vec<Wect>),
}

impl ClassFeatures {
    pub fn len(&self) -> usize {
        match self {
            ClassFeatures::Vectors(v) => v.len(),
            ClassFeatures::Wects(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Recently computed class features, keyed by dataset, extension, directions
/// and (for vectors) sampling.
#[derive(Debug)]
pub struct FeatureCache {
    capacity: usize,
    entries: VecDeque<(String, Arc<ClassFeatures>)>,
}

impl Default for FeatureCache {
    fn default() -> Self {
        FeatureCache::new(8)
    }
}

impl FeatureCache {
    pub fn new(capacity: usize) -> FeatureCache {
        FeatureCache {
            capacity,
            entries: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get_or_compute(
        &mut self,
        key: String,
        compute: impl FnOnce() -> Result<ClassFeatures>,
    ) -> Result<Arc<ClassFeatures>> {
        if let Some((_, v)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(v.clone());
        }
        let v = Arc::new(compute()?);
        if self.capacity > 0 {
            if self.entries.len() == self.capacity {
                self.entries.pop_front();
            }
            self.entries.push_back((key, v.clone()));
        }
        Ok(v)
    }
}

/// WECTs of every image of a class.
pub fn class_wects(spec: &DatasetSpec, extension: Extension, directions: &[Direction]) -> Result<Vec<Wect>> {
    let mask = generate_support(&spec.shape)?;
    let complex = Arc::new(SimplicialComplex::from_mask(mask.n(), mask.cells())?);
    let engine = WectEngine::new(complex.clone(), directions)?;
    let images = generate_class_images(spec)?;
    images
        .par_iter()
        .map(|image| {
            let k = WeightedComplex::from_image(complex.clone(), image)?.extend(extension);
            let mut w = engine.wect(&k)?;
            w.n = Some(image.n());
            Ok(w)
        })
        .collect()
}

fn class_features(spec: &ExperimentSpec, class: &DatasetSpec, directions: &[Direction]) -> Result<ClassFeatures> {
    let wects = class_wects(class, spec.extension, directions)?;
    Ok(match spec.classifier {
        Classifier::Svm { .. } => {
            let (t_min, t_max) = spec.interval();
            ClassFeatures::Vectors(
                wects
                    .par_iter()
                    .map(|w| vectorize(w, spec.n_v, t_min, t_max).map(|v| v.values))
                    .collect::<Result<_>>()?,
            )
        }
        Classifier::Knn(_) => ClassFeatures::Wects(wects),
    })
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_experiment_cached(spec, &mut FeatureCache::new(0))
}

pub fn run_experiment_cached(spec: &ExperimentSpec, cache: &mut FeatureCache) -> Result<ExperimentResult> {
    spec.validate()?;
    let directions = direction::equally_spaced(spec.n_s, spec.first_angle)?;
    let mut features = Vec::with_capacity(2);
    for class in [&spec.class_a, &spec.class_b] {
        let key = match spec.classifier {
            Classifier::Svm { .. } => serde_json::to_string(&(
                class,
                spec.extension,
                spec.n_s,
                spec.first_angle,
                spec.n_v,
                spec.interval(),
            ))?,
            Classifier::Knn(_) => serde_json::to_string(&(class, spec.extension, spec.n_s, spec.first_angle, "wect"))?,
        };
        features.push(cache.get_or_compute(key, || class_features(spec, class, &directions))?);
    }
    let tests = test_counts(&[spec.class_a.count, spec.class_b.count]);
    let cuts = [features[0].len() - tests[0], features[1].len() - tests[1]];
    let mut train_labels = vec![0; cuts[0]];
    train_labels.resize(cuts[0] + cuts[1], 1);
    let mut test_labels = vec![0; tests[0]];
    test_labels.resize(tests[0] + tests[1], 1);

    let predictions: Vec<usize> = match (&*features[0], &*features[1], spec.classifier) {
        (ClassFeatures::Vectors(a), ClassFeatures::Vectors(b), Classifier::Svm { c, kernel, gamma }) => {
            let x_train: Vec<Vec<f64>> = a[..cuts[0]].iter().chain(&b[..cuts[1]]).cloned().collect();
            let x_test: Vec<&Vec<f64>> = a[cuts[0]..].iter().chain(&b[cuts[1]..]).collect();
            let model = match kernel {
                Kernel::Linear => {
                    SvmModel::Linear(train_svm(&x_train, &train_labels, c, seed::derive(spec.seed, &[2]))?)
                }
                Kernel::Rbf => SvmModel::Kernel(train_kernel_svm(&x_train, &train_labels, c, gamma)?),
            };
            x_test.par_iter().map(|x| model.predict(x)).collect()
        }
        (ClassFeatures::Wects(a), ClassFeatures::Wects(b), Classifier::Knn(params)) => {
            let (t_min, t_max) = spec.interval();
            let all: Vec<&Wect> = a[..cuts[0]]
                .iter()
                .chain(&b[..cuts[1]])
                .chain(&a[cuts[0]..])
                .chain(&b[cuts[1]..])
                .collect();
            let bank = CurveBank::new(&all, params.metric, params.aggregation, t_min, t_max)?;
            let n_train = train_labels.len();
            (0..test_labels.len())
                .into_par_iter()
                .map(|q| {
                    let d: Vec<f64> = (0..n_train).map(|i| bank.distance(n_train + q, i)).collect();
                    vote(&d, &train_labels, params.k)
                })
                .collect()
        }
        _ => unreachable!("features are computed for the spec's classifier"),
    };

    let mut confusion = [[0usize; 2]; 2];
    for (&t, &p) in test_labels.iter().zip(&predictions) {
        confusion[t][p] += 1;
    }
    let correct = confusion[0][0] + confusion[1][1];
    Ok(ExperimentResult {
        spec_hash: spec.hash(),
        label: spec.label(),
        seed: spec.seed,
        accuracy: correct as f64 / test_labels.len() as f64,
        correct,
        total: test_labels.len(),
        n_train: train_labels.len(),
        confusion,
    })
}

/// Runs experiments in order, sharing class features between neighbours.
pub fn run_experiments(specs: &[ExperimentSpec]) -> Result<Vec<ExperimentResult>> {
    let mut cache = FeatureCache::new(40);
    specs.iter().map(|s| run_experiment_cached(s, &mut cache)).collect()
}

/// `U(0,1)` against `N(0.5, 0.25)` with the average extension for each
/// direction count; everything but `n_s` is held fixed.
pub fn direction_sweep(
    shape: ShapeKind,
    classifier: Classifier,
    directions: &[usize],
    seed: u64,
) -> Result<Vec<(usize, ExperimentResult)>> {
    if directions.is_empty() {
        return Err(WectError::NoDirections);
    }
    let mut cache = FeatureCache::new(2);
    directions
        .iter()
        .map(|&n_s| {
            let spec = ExperimentSpec::study_pair(
                shape,
                IntensityModel::normal(0.25),
                Extension::Avg,
                n_s,
                classifier,
                seed,
            );
            Ok((n_s, run_experiment_cached(&spec, &mut cache)?))
        })
        .collect()
}

/// Grid of same-shape study pairs: each shape, each model against `U(0,1)`,
/// each extension and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyGrid {
    #[serde(default = "all_shapes")]
    pub shapes: Vec<ShapeKind>,
    #[serde(default = "study_models")]
    pub models: Vec<IntensityModel>,
    #[serde(default = "both_extensions")]
    pub extensions: Vec<Extension>,
    #[serde(default = "study_directions")]
    pub n_s: usize,
    #[serde(default)]
    pub classifier: Classifier,
    pub seeds: Vec<u64>,
}

fn all_shapes() -> Vec<ShapeKind> {
    ShapeKind::ALL.to_vec()
}

fn study_models() -> Vec<IntensityModel> {
    IntensityModel::STUDY.to_vec()
}

fn both_extensions() -> Vec<Extension> {
    vec![Extension::Max, Extension::Avg]
}

fn study_directions() -> usize {
    15
}

impl StudyGrid {
    /// Specs ordered so that pairs sharing class features are adjacent.
    pub fn specs(&self) -> Vec<ExperimentSpec> {
        let mut out = Vec::new();
        for &seed in &self.seeds {
            for &shape in &self.shapes {
                for &extension in &self.extensions {
                    for &model in &self.models {
                        out.push(ExperimentSpec::study_pair(
                            shape,
                            model,
                            extension,
                            self.n_s,
                            self.classifier,
                            seed,
                        ));
                    }
                }
            }
        }
        out
    }
}
