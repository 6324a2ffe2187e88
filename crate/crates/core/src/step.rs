//! Exact piecewise-constant functions of a real threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};

/// A right-continuous step function stored as `(height, value)` breakpoints.
///
/// The function is 0 below the first height, equals the value of pair `i` on
/// `[h_i, h_{i+1})` and keeps the last value from the last height onwards.
/// Heights are strictly increasing and no breakpoint repeats the value before
/// it (the implicit value before the first breakpoint is 0).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct StepFunction {
    steps: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn zero() -> StepFunction {
        StepFunction::default()
    }

    /// Builds a step function from breakpoints with strictly increasing,
    /// finite heights, dropping breakpoints that do not change the value.
    pub fn new(steps: Vec<(f64, f64)>) -> Result<StepFunction> {
        for w in steps.windows(2) {
            if w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less) {
                return Err(WectError::Parse(format!(
                    "step heights must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if steps.iter().any(|(h, v)| !h.is_finite() || !v.is_finite()) {
            return Err(WectError::Parse("step function contains non-finite values".into()));
        }
        Ok(StepFunction::canonical(steps))
    }

    /// Drops breakpoints whose value equals the previous value. Heights must
    /// already be increasing.
    pub(crate) fn canonical(steps: Vec<(f64, f64)>) -> StepFunction {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(steps.len());
        let mut last = 0.0;
        for (h, v) in steps {
            if v != last {
                out.push((h, v));
                last = v;
            }
        }
        StepFunction { steps: out }
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.0)
    }

    /// Value at `t`; a threshold equal to a breakpoint height takes the
    /// breakpoint's value.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.steps.partition_point(|&(h, _)| h <= t);
        if idx == 0 {
            0.0
        } else {
            self.steps[idx - 1].1
        }
    }

    /// Value for all sufficiently large thresholds.
    pub fn terminal_value(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.1)
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        let mut heights: Vec<f64> = self.heights().chain(other.heights()).collect();
        heights.sort_by(f64::total_cmp);
        heights.dedup();
        StepFunction::canonical(heights.into_iter().map(|h| (h, self.eval(h) - other.eval(h))).collect())
    }

    /// Samples the function at each threshold.
    pub fn sample(&self, thresholds: &[f64]) -> Vec<f64> {
        thresholds.iter().map(|&t| self.eval(t)).collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for StepFunction {
    type Error = WectError;

    fn try_from(steps: Vec<(f64, f64)>) -> Result<StepFunction> {
        StepFunction::new(steps)
    }
}

impl From<StepFunction> for Vec<(f64, f64)> {
    fn from(f: StepFunction) -> Vec<(f64, f64)> {
        f.steps
    }
}
