//! Closed-form expected weighted Euler characteristics and expected WECFs,
//! plus Monte-Carlo estimates to check them against.
//!
//! With i.i.d. vertex intensities, linearity of expectation turns the weighted
//! Euler characteristic of any sublevel complex into
//! `sum_i (-1)^i c_i |K_i(t)|`, where `c_i` is the expected weight of an
//! `i`-simplex:
//!
//! * average extension, any law with mean `mu`: `c_i = mu`;
//! * maximum extension, `U(0,1)`: `c_i = (i + 1) / (i + 2)` (mean of the largest
//!   of `i + 1` uniforms);
//! * minimum extension, `U(0,1)`: `c_i = 1 / (i + 2)`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{image_seed, sample_intensities};
use crate::direction::Direction;
use crate::error::{Result, WectError};
use crate::grid::{Extension, SimplicialComplex, WeightedComplex};
use crate::intensity::IntensityModel;
use crate::shapes::{generate_support, ShapeSpec};
use crate::step::StepFunction;
use crate::wect::FiltrationPlan;

/// Expected weight of a vertex, edge and triangle.
pub fn expected_weights(extension: Extension, model: IntensityModel) -> Result<[f64; 3]> {
    let model = model.validate()?;
    if let IntensityModel::Constant { value } = model {
        return Ok([value; 3]);
    }
    match extension {
        Extension::Avg => {
            let mu = model
                .mean()
                .ok_or_else(|| WectError::UnsupportedModel("expected average extension", model.label()))?;
            Ok([mu; 3])
        }
        Extension::Max | Extension::Min => {
            if model != IntensityModel::Uniform {
                return Err(WectError::UnsupportedModel(
                    "order-statistic expectation",
                    model.label(),
                ));
            }
            Ok(if extension == Extension::Max {
                [1.0 / 2.0, 2.0 / 3.0, 3.0 / 4.0]
            } else {
                [1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0]
            })
        }
    }
}

/// `E[chi_w]` under the average extension: half the Euler characteristic.
pub fn expected_wec_avg(complex: &SimplicialComplex) -> f64 {
    0.5 * complex.euler_characteristic() as f64
}

/// `E[chi_w]` under the maximum or minimum extension with `U(0,1)` intensities.
pub fn expected_wec_order_stat(
    complex: &SimplicialComplex,
    extension: Extension,
    model: IntensityModel,
) -> Result<f64> {
    if extension == Extension::Avg {
        return Err(WectError::UnsupportedModel(
            "order-statistic expectation of avg",
            model.label(),
        ));
    }
    let c = expected_weights(extension, model)?;
    let [k0, k1, k2] = complex.counts().map(|k| k as f64);
    Ok(c[0] * k0 - c[1] * k1 + c[2] * k2)
}

/// Expected WECF in direction `s`: breakpoints at the distinct heights of the
/// lower-star filtration, values `sum_i (-1)^i c_i |K_i(t)|`.
pub fn expected_wecf(
    complex: &Arc<SimplicialComplex>,
    s: Direction,
    extension: Extension,
    model: IntensityModel,
) -> Result<StepFunction> {
    let coeff = expected_weights(extension, model)?;
    Ok(FiltrationPlan::new(complex.clone(), s).count_curve(coeff))
}

/// Pointwise mean and sample standard deviation of sampled WECFs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub thresholds: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n_images: usize,
}

/// Samples `n_images` images of `shape` under `model`, computes their WECFs in
/// direction `s` and summarizes them at `thresholds`.
pub fn monte_carlo_wecf_mean(
    shape: &ShapeSpec,
    model: IntensityModel,
    extension: Extension,
    s: Direction,
    n_images: usize,
    seed: u64,
    thresholds: &[f64],
) -> Result<CurveSummary> {
    if n_images < 2 {
        return Err(WectError::TooFewImages {
            min: 2,
            found: n_images,
        });
    }
    let mask = generate_support(shape)?;
    let complex = Arc::new(SimplicialComplex::from_mask(mask.n(), mask.cells())?);
    let plan = FiltrationPlan::new(complex.clone(), s);
    let samples: Vec<Vec<f64>> = (0..n_images)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let image = sample_intensities(&mask, model, image_seed(seed, i))?;
            let k = WeightedComplex::from_image(complex.clone(), &image)?.extend(extension);
            Ok(plan.wecf(&k)?.sample(thresholds))
        })
        .collect::<Result<_>>()?;
    Ok(summarize(thresholds.to_vec(), &samples))
}

fn summarize(thresholds: Vec<f64>, samples: &[Vec<f64>]) -> CurveSummary {
    let m = samples.len() as f64;
    let cols = thresholds.len();
    let mut mean = vec![0.0; cols];
    for row in samples {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m);
    let mut var = vec![0.0; cols];
    for row in samples {
        for ((acc, v), mu) in var.iter_mut().zip(row).zip(&mean) {
            *acc += (v - mu) * (v - mu);
        }
    }
    let std = var.into_iter().map(|v| (v / (m - 1.0)).sqrt()).collect();
    CurveSummary {
        thresholds,
        mean,
        std,
        n_images: samples.len(),
    }
}
