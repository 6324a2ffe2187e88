//! Weighted Euler characteristic transforms of grayscale images.
//!
//! An odd `n x n` image is triangulated (each pixel a vertex, each unit square
//! split along its top-left to bottom-right diagonal), vertex intensities are
//! extended to edges and triangles by max, min or average, and the weighted
//! Euler characteristic of every lower-star sublevel complex is recorded as a
//! step function of the threshold, one per direction.
//!
//! ```
//! use std::sync::Arc;
//! use wectkit::{compute_wect, Extension, Image, SimplicialComplex, WeightedComplex};
//!
//! let image = Image::filled(5, 1.0).unwrap();
//! let complex = Arc::new(SimplicialComplex::full_grid(5).unwrap());
//! let k = WeightedComplex::from_image(complex, &image).unwrap().extend(Extension::Avg);
//! let wect = compute_wect(&k, 4).unwrap();
//! // constant weight 1 recovers the Euler characteristic of the square
//! assert_eq!(wect.curves[0].terminal_value(), 1.0);
//! ```

pub mod classify;
pub mod dataset;
pub mod direction;
pub mod error;
mod exact;
pub mod expectation;
pub mod grid;
pub mod intensity;
pub mod io;
pub mod metrics;
pub mod seed;
pub mod shapes;
pub mod step;
pub mod wect;

pub use classify::{Classifier, ExperimentResult, ExperimentSpec};
pub use dataset::{generate_dataset, Dataset, DatasetSpec, Manifest};
pub use direction::{equally_spaced, Direction};
pub use error::{Result, WectError};
pub use expectation::{expected_wec_avg, expected_wec_order_stat, expected_wecf, monte_carlo_wecf_mean};
pub use grid::{
    euler_characteristic, extend_weights, triangulate, weighted_euler_characteristic, Extension, Image, Point, Simplex,
    SimplicialComplex, WeightedComplex,
};
pub use intensity::IntensityModel;
pub use metrics::{
    calibrated_vectorized_distance, curve_distance, distance_matrix, vectorized_distance, wect_distance, Aggregation,
    CurveMetric,
};
pub use shapes::{generate_support, Mask, ShapeKind, ShapeSpec};
pub use step::StepFunction;
pub use wect::{
    compute_wecf, compute_wect, compute_wect_along, default_interval, thresholds, vectorize, FiltrationPlan,
    VectorizedWect, Wect, WectEngine,
};
