//! Binary classification of images from their WECTs.

mod bank;
mod experiment;
mod knn;
mod svm;

pub use bank::CurveBank;
pub use experiment::{
    class_wects, direction_sweep, run_experiment, run_experiment_cached, run_experiments, ClassFeatures, Classifier,
    ExperimentResult, ExperimentSpec, FeatureCache, StudyGrid, STUDY_C, STUDY_CLASS_SIZE, STUDY_THRESHOLDS,
};
pub use knn::{knn_classify, vote, KnnParams};
pub use svm::{train_kernel_svm, train_svm, Gamma, Kernel, KernelSvm, LinearSvm, SvmModel};
