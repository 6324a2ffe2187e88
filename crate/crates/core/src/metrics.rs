//! Distances between WECFs and between whole transforms.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::step::StepFunction;
use crate::wect::{VectorizedWect, Wect};

/// Metric on step functions over a finite threshold interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "p")]
#[derive(Default)]
pub enum CurveMetric {
    #[default]
    L2,
    Lp(f64),
    Sup,
}

impl CurveMetric {
    pub fn validate(self) -> Result<CurveMetric> {
        match self {
            CurveMetric::Lp(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(WectError::BadMetric(format!("L^p needs finite p >= 1, got {p}")))
            }
            m => Ok(m),
        }
    }
}

/// How per-direction distances are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// `(2 pi / n_s) * sum_s rho(W_s, W'_s)`, a quadrature of the integral over the circle.
    #[default]
    Integral,
    /// `max_s rho(W_s, W'_s)`.
    Max,
}

/// Visits the pieces `[a, b)` of `[t_min, t_max]` on which both `f` and `g`
/// are constant, passing `(length, f - g)`.
fn for_each_piece(f: &StepFunction, g: &StepFunction, t_min: f64, t_max: f64, mut visit: impl FnMut(f64, f64)) {
    let (fs, gs) = (f.steps(), g.steps());
    let mut i = fs.partition_point(|s| s.0 <= t_min);
    let mut j = gs.partition_point(|s| s.0 <= t_min);
    let mut fv = if i > 0 { fs[i - 1].1 } else { 0.0 };
    let mut gv = if j > 0 { gs[j - 1].1 } else { 0.0 };
    let mut a = t_min;
    loop {
        let next_f = fs.get(i).map_or(f64::INFINITY, |s| s.0);
        let next_g = gs.get(j).map_or(f64::INFINITY, |s| s.0);
        let b = next_f.min(next_g).min(t_max);
        visit(b - a, fv - gv);
        if b >= t_max {
            break;
        }
        if next_f == b {
            fv = fs[i].1;
            i += 1;
        }
        if next_g == b {
            gv = gs[j].1;
            j += 1;
        }
        a = b;
    }
}

/// Exact distance between two step functions restricted to `[t_min, t_max]`.
pub fn curve_distance(f: &StepFunction, g: &StepFunction, metric: CurveMetric, t_min: f64, t_max: f64) -> Result<f64> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(WectError::DegenerateInterval(t_min, t_max));
    }
    let metric = metric.validate()?;
    let mut acc = 0.0;
    match metric {
        CurveMetric::L2 => {
            for_each_piece(f, g, t_min, t_max, |len, d| acc += d * d * len);
            Ok(acc.sqrt())
        }
        CurveMetric::Lp(p) => {
            for_each_piece(f, g, t_min, t_max, |len, d| acc += d.abs().powf(p) * len);
            Ok(acc.powf(1.0 / p))
        }
        CurveMetric::Sup => {
            for_each_piece(f, g, t_min, t_max, |len, d| {
                if len > 0.0 {
                    acc = f64::max(acc, d.abs());
                }
            });
            Ok(acc)
        }
    }
}

/// Distance between two WECTs sampled along the same directions.
pub fn wect_distance(
    w: &Wect,
    w2: &Wect,
    metric: CurveMetric,
    aggregation: Aggregation,
    t_min: f64,
    t_max: f64,
) -> Result<f64> {
    w.check_same_directions(w2)?;
    let mut per_direction = w
        .curves
        .iter()
        .zip(&w2.curves)
        .map(|(a, b)| curve_distance(a, b, metric, t_min, t_max));
    match aggregation {
        Aggregation::Integral => {
            let total = per_direction.try_fold(0.0, |acc, d| d.map(|d| acc + d))?;
            Ok(TAU / w.n_s() as f64 * total)
        }
        Aggregation::Max => per_direction.try_fold(0.0, |acc: f64, d| d.map(|d| acc.max(d))),
    }
}

/// Sum over directions of the Euclidean norm of the row difference.
pub fn vectorized_distance(v: &VectorizedWect, v2: &VectorizedWect) -> Result<f64> {
    v.check_compatible(v2)?;
    Ok(v.rows().zip(v2.rows()).map(|(a, b)| row_norm_sq(a, b).sqrt()).sum())
}

/// [`vectorized_distance`] rescaled to approximate the integral-aggregated L2
/// WECT distance: each squared row norm is multiplied by the threshold spacing
/// and the sum over directions by the angular spacing `2 pi / n_s`.
pub fn calibrated_vectorized_distance(v: &VectorizedWect, v2: &VectorizedWect) -> Result<f64> {
    v.check_compatible(v2)?;
    let dt = v.spacing();
    let sum: f64 = v
        .rows()
        .zip(v2.rows())
        .map(|(a, b)| (row_norm_sq(a, b) * dt).sqrt())
        .sum();
    Ok(TAU / v.n_s as f64 * sum)
}

fn row_norm_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Symmetric matrix of pairwise WECT distances.
pub fn distance_matrix(
    wects: &[Wect],
    metric: CurveMetric,
    aggregation: Aggregation,
    t_min: f64,
    t_max: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = wects.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = wect_distance(&wects[i], &wects[j], metric, aggregation, t_min, t_max)?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}
