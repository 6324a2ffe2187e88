//! Exact pairwise WECT distances for many transforms at once.
//!
//! Every curve of a direction is re-expressed on the union of all breakpoints
//! of that direction inside `[t_min, t_max]`. On each piece of that common
//! partition all curves are constant, so a distance becomes a weighted sum over
//! dense vectors, equal to [`crate::metrics::wect_distance`].

use std::f64::consts::TAU;

use crate::error::{Result, WectError};
use crate::metrics::{Aggregation, CurveMetric};
use crate::wect::Wect;

pub struct CurveBank {
    /// Piece lengths, per direction.
    widths: Vec<Vec<f64>>,
    /// `values[item][direction][piece]`.
    values: Vec<Vec<Vec<f64>>>,
    metric: CurveMetric,
    aggregation: Aggregation,
}

impl CurveBank {
    pub fn new(
        wects: &[&Wect],
        metric: CurveMetric,
        aggregation: Aggregation,
        t_min: f64,
        t_max: f64,
    ) -> Result<CurveBank> {
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(WectError::DegenerateInterval(t_min, t_max));
        }
        let metric = metric.validate()?;
        let first = wects.first().ok_or(WectError::EmptyTrainingSet)?;
        for w in wects {
            first.check_same_directions(w)?;
        }
        let n_s = first.n_s();
        let mut widths = Vec::with_capacity(n_s);
        let mut values = vec![Vec::with_capacity(n_s); wects.len()];
        for d in 0..n_s {
            let mut cuts: Vec<f64> = wects
                .iter()
                .flat_map(|w| w.curves[d].heights())
                .filter(|&h| h > t_min && h < t_max)
                .collect();
            cuts.push(t_min);
            cuts.push(t_max);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            widths.push(cuts.windows(2).map(|p| p[1] - p[0]).collect::<Vec<f64>>());
            let starts = &cuts[..cuts.len() - 1];
            for (item, w) in wects.iter().enumerate() {
                values[item].push(w.curves[d].sample(starts));
            }
        }
        Ok(CurveBank {
            widths,
            values,
            metric,
            aggregation,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let per_direction = self
            .widths
            .iter()
            .zip(&self.values[a])
            .zip(&self.values[b])
            .map(|((w, f), g)| piece_distance(self.metric, w, f, g));
        match self.aggregation {
            Aggregation::Integral => TAU / self.widths.len() as f64 * per_direction.sum::<f64>(),
            Aggregation::Max => per_direction.fold(0.0, f64::max),
        }
    }
}

fn piece_distance(metric: CurveMetric, widths: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let diffs = widths.iter().zip(f).zip(g).map(|((&w, a), b)| (w, a - b));
    match metric {
        CurveMetric::L2 => diffs.map(|(w, d)| w * d * d).sum::<f64>().sqrt(),
        CurveMetric::Lp(p) => diffs.map(|(w, d)| w * d.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        CurveMetric::Sup => diffs.filter(|(w, _)| *w > 0.0).fold(0.0, |m, (_, d)| m.max(d.abs())),
    }
}
