//! Lower-star height filtrations and the weighted Euler characteristic
//! transform.
//!
//! For a direction `s`, every simplex enters the filtration at
//! `H_s(sigma) = max_{v in sigma} v . s`. Sorting simplices by `H_s` and
//! keeping a running alternating sum of weights gives the weighted Euler
//! characteristic function (WECF) exactly; one breakpoint is emitted per
//! distinct height.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction::{self, Direction};
use crate::error::{Result, WectError};
use crate::exact::Fixed;
use crate::grid::{Extension, SimplicialComplex, WeightedComplex};
use crate::step::StepFunction;

/// `H_s` for every simplex of `complex`, indexed by simplex id.
pub fn height_filter(complex: &SimplicialComplex, s: Direction) -> Vec<f64> {
    let vh: Vec<f64> = complex.vertices().iter().map(|&p| s.height(p)).collect();
    complex
        .simplices()
        .map(|sigma| {
            sigma
                .vertices()
                .iter()
                .map(|&v| vh[v as usize])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Simplices of one complex sorted by their height in one direction, grouped
/// by distinct height. Reusable for every weighting of the same complex.
#[derive(Debug, Clone)]
pub struct FiltrationPlan {
    complex: Arc<SimplicialComplex>,
    direction: Direction,
    order: Vec<u32>,
    /// `(height, end)`: simplices `order[prev_end..end]` enter at `height`.
    groups: Vec<(f64, u32)>,
}

impl FiltrationPlan {
    pub fn new(complex: Arc<SimplicialComplex>, direction: Direction) -> FiltrationPlan {
        let heights = height_filter(&complex, direction);
        let mut order: Vec<u32> = (0..heights.len() as u32).collect();
        // ties broken by id; the exact accumulator makes the result independent of it
        order.sort_unstable_by(|&a, &b| heights[a as usize].total_cmp(&heights[b as usize]).then(a.cmp(&b)));
        let mut groups: Vec<(f64, u32)> = Vec::new();
        for (i, &id) in order.iter().enumerate() {
            let h = heights[id as usize];
            match groups.last_mut() {
                Some(last) if last.0 == h => last.1 = i as u32 + 1,
                _ => groups.push((h, i as u32 + 1)),
            }
        }
        FiltrationPlan {
            complex,
            direction,
            order,
            groups,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Distinct filtration heights in increasing order.
    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.groups.iter().map(|g| g.0)
    }

    fn check(&self, complex: &WeightedComplex) -> Result<()> {
        let same = Arc::ptr_eq(&self.complex, complex.shared_complex()) || *self.complex == **complex.shared_complex();
        if same {
            Ok(())
        } else {
            Err(WectError::Mismatch(
                "complex differs from the one the plan was built for".into(),
            ))
        }
    }

    /// WECF of `complex` in this plan's direction.
    pub fn wecf(&self, complex: &WeightedComplex) -> Result<StepFunction> {
        self.check(complex)?;
        Ok(self.wecf_signed(&complex.signed_weights()?))
    }

    /// WECF from precomputed `(-1)^dim * weight` values indexed by simplex id.
    pub(crate) fn wecf_signed(&self, signed: &[Fixed]) -> StepFunction {
        let mut steps = Vec::with_capacity(self.groups.len());
        let mut chi = Fixed::ZERO;
        let mut start = 0usize;
        for &(h, end) in &self.groups {
            let end = end as usize;
            for &id in &self.order[start..end] {
                chi += signed[id as usize];
            }
            steps.push((h, chi.to_f64()));
            start = end;
        }
        StepFunction::canonical(steps)
    }

    /// Step function with value `sum_{H(sigma) <= t} coeff[dim sigma] * (-1)^dim`.
    /// Simplices are counted per dimension and the coefficients applied once
    /// per step, so the only rounding is in that final combination.
    pub(crate) fn count_curve(&self, coeff: [f64; 3]) -> StepFunction {
        let [nv, ne, _] = self.complex.counts();
        let mut counts = [0i64; 3];
        let mut steps = Vec::with_capacity(self.groups.len());
        let mut start = 0usize;
        for &(h, end) in &self.groups {
            let end = end as usize;
            for &id in &self.order[start..end] {
                let id = id as usize;
                counts[if id < nv {
                    0
                } else if id < nv + ne {
                    1
                } else {
                    2
                }] += 1;
            }
            let v = coeff[0] * counts[0] as f64 - coeff[1] * counts[1] as f64 + coeff[2] * counts[2] as f64;
            steps.push((h, v));
            start = end;
        }
        StepFunction::canonical(steps)
    }
}

/// Exact WECF of an extended weighted complex in direction `s`.
pub fn compute_wecf(complex: &WeightedComplex, s: Direction) -> Result<StepFunction> {
    let signed = complex.signed_weights()?;
    Ok(FiltrationPlan::new(complex.shared_complex().clone(), s).wecf_signed(&signed))
}

/// A family of WECFs, one per direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wect {
    pub directions: Vec<Direction>,
    pub curves: Vec<StepFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<Extension>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl Wect {
    pub fn new(directions: Vec<Direction>, curves: Vec<StepFunction>) -> Result<Wect> {
        if directions.len() != curves.len() {
            return Err(WectError::Mismatch(format!(
                "{} directions but {} curves",
                directions.len(),
                curves.len()
            )));
        }
        if directions.is_empty() {
            return Err(WectError::NoDirections);
        }
        Ok(Wect {
            directions,
            curves,
            extension: None,
            n: None,
        })
    }

    pub fn n_s(&self) -> usize {
        self.directions.len()
    }

    /// Checks that `other` was sampled along the same directions.
    pub fn check_same_directions(&self, other: &Wect) -> Result<()> {
        let same = self.directions.len() == other.directions.len()
            && self
                .directions
                .iter()
                .zip(&other.directions)
                .all(|(a, b)| (a.angle() - b.angle()).abs() < 1e-12);
        if same {
            Ok(())
        } else {
            Err(WectError::Mismatch("WECTs use different directions".into()))
        }
    }
}

/// WECT over `n_s` equally spaced directions starting at `(0, 1)`.
pub fn compute_wect(complex: &WeightedComplex, n_s: usize) -> Result<Wect> {
    compute_wect_along(
        complex,
        &direction::equally_spaced(n_s, direction::DEFAULT_FIRST_ANGLE)?,
    )
}

/// WECT over an explicit list of directions, computed in parallel and
/// assembled in the given order.
pub fn compute_wect_along(complex: &WeightedComplex, directions: &[Direction]) -> Result<Wect> {
    if directions.is_empty() {
        return Err(WectError::NoDirections);
    }
    let signed = complex.signed_weights()?;
    let curves = directions
        .par_iter()
        .map(|&s| FiltrationPlan::new(complex.shared_complex().clone(), s).wecf_signed(&signed))
        .collect();
    let mut wect = Wect::new(directions.to_vec(), curves)?;
    wect.extension = complex.extension();
    Ok(wect)
}

/// Precomputed plans for a fixed complex and direction set; computes WECTs of
/// many weightings of the same complex without re-sorting.
#[derive(Debug, Clone)]
pub struct WectEngine {
    plans: Vec<FiltrationPlan>,
}

impl WectEngine {
    pub fn new(complex: Arc<SimplicialComplex>, directions: &[Direction]) -> Result<WectEngine> {
        if directions.is_empty() {
            return Err(WectError::NoDirections);
        }
        Ok(WectEngine {
            plans: directions
                .iter()
                .map(|&s| FiltrationPlan::new(complex.clone(), s))
                .collect(),
        })
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.plans.iter().map(|p| p.direction).collect()
    }

    pub fn plans(&self) -> &[FiltrationPlan] {
        &self.plans
    }

    pub fn wect(&self, complex: &WeightedComplex) -> Result<Wect> {
        self.plans[0].check(complex)?;
        let signed = complex.signed_weights()?;
        let curves = self.plans.iter().map(|p| p.wecf_signed(&signed)).collect();
        let mut wect = Wect::new(self.directions(), curves)?;
        wect.extension = complex.extension();
        Ok(wect)
    }
}

/// `n_v` equally spaced thresholds from `t_min` to `t_max` inclusive.
pub fn thresholds(n_v: usize, t_min: f64, t_max: f64) -> Result<Vec<f64>> {
    if n_v < 2 {
        return Err(WectError::TooFewSamples(n_v));
    }
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(WectError::DegenerateInterval(t_min, t_max));
    }
    let span = t_max - t_min;
    let last = (n_v - 1) as f64;
    Ok((0..n_v)
        .map(|j| {
            if j + 1 == n_v {
                t_max
            } else {
                t_min + j as f64 * span / last
            }
        })
        .collect())
}

/// Default sampling interval `[-m, m]` for an `n x n` grid with
/// `m = floor((n - 1) / sqrt 2)`, at least 1 (45 for `n = 65`).
pub fn default_interval(n: usize) -> (f64, f64) {
    let m = ((n.saturating_sub(1)) as f64 / std::f64::consts::SQRT_2)
        .floor()
        .max(1.0);
    (-m, m)
}

/// A WECT sampled at `n_v` thresholds per direction, rows concatenated in
/// direction order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorizedWect {
    pub n_s: usize,
    pub n_v: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub values: Vec<f64>,
}

impl VectorizedWect {
    pub fn row(&self, d: usize) -> &[f64] {
        &self.values[d * self.n_v..(d + 1) * self.n_v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_v)
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_v - 1) as f64
    }

    pub fn check_compatible(&self, other: &VectorizedWect) -> Result<()> {
        if self.n_s != other.n_s || self.n_v != other.n_v || self.t_min != other.t_min || self.t_max != other.t_max {
            return Err(WectError::Mismatch(format!(
                "vectorizations differ: ({}, {}, [{}, {}]) vs ({}, {}, [{}, {}])",
                self.n_s, self.n_v, self.t_min, self.t_max, other.n_s, other.n_v, other.t_min, other.t_max
            )));
        }
        Ok(())
    }
}

pub fn vectorize(wect: &Wect, n_v: usize, t_min: f64, t_max: f64) -> Result<VectorizedWect> {
    let ts = thresholds(n_v, t_min, t_max)?;
    let values = wect.curves.iter().flat_map(|c| c.sample(&ts)).collect();
    Ok(VectorizedWect {
        n_s: wect.n_s(),
        n_v,
        t_min,
        t_max,
        values,
    })
}
