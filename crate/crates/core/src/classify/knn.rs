//! K-nearest-neighbour classification under the WECT distance.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::metrics::{wect_distance, Aggregation, CurveMetric};
use crate::wect::Wect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    #[serde(default)]
    pub metric: CurveMetric,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl KnnParams {
    pub fn validate(self, train_size: usize) -> Result<KnnParams> {
        self.metric.validate()?;
        if train_size == 0 {
            return Err(WectError::EmptyTrainingSet);
        }
        if self.k == 0 || self.k.is_multiple_of(2) {
            return Err(WectError::BadClassifier(format!("K must be odd, got {}", self.k)));
        }
        if self.k > train_size {
            return Err(WectError::BadClassifier(format!(
                "K = {} exceeds the training size {train_size}",
                self.k
            )));
        }
        Ok(self)
    }
}

/// Majority label among the `k` smallest distances; equal distances go to the
/// lower training index, and a tied vote to the class of the nearest voter.
pub fn vote(distances: &[f64], labels: &[usize], k: usize) -> usize {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    let nearest = &order[..k.min(order.len())];
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; classes];
    for &i in nearest {
        counts[labels[i]] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0);
    nearest
        .iter()
        .map(|&i| labels[i])
        .find(|&l| counts[l] == top)
        .unwrap_or(0)
}

/// Label of `query` by majority among its `K` nearest training WECTs under
/// [`wect_distance`] on `[t_min, t_max]`.
pub fn knn_classify(
    train: &[Wect],
    labels: &[usize],
    query: &Wect,
    params: KnnParams,
    t_min: f64,
    t_max: f64,
) -> Result<usize> {
    let params = params.validate(train.len())?;
    if labels.len() != train.len() {
        return Err(WectError::Mismatch(format!(
            "{} WECTs but {} labels",
            train.len(),
            labels.len()
        )));
    }
    let distances = train
        .iter()
        .map(|w| wect_distance(w, query, params.metric, params.aggregation, t_min, t_max))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vote(&distances, labels, params.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::Direction;
    use crate::step::StepFunction;

    fn wect(level: f64) -> Wect {
        let curve = StepFunction::new(vec![(0.0, level)]).unwrap();
        Wect::new(vec![Direction::from_angle(0.0)], vec![curve]).unwrap()
    }

    fn params(k: usize) -> KnnParams {
        KnnParams {
            k,
            metric: CurveMetric::L2,
            aggregation: Aggregation::Integral,
        }
    }

    #[test]
    fn query_equal_to_a_training_item() {
        let train: Vec<Wect> = [0.0, 5.0, 9.0].iter().map(|&v| wect(v)).collect();
        let labels = [0, 1, 0];
        assert_eq!(
            knn_classify(&train, &labels, &wect(5.0), params(1), -1.0, 1.0).unwrap(),
            1
        );
    }

    #[test]
    fn three_against_two() {
        let levels = [1.0, 2.0, 3.0, 4.0, 5.0, 50.0];
        let train: Vec<Wect> = levels.iter().map(|&v| wect(v)).collect();
        let labels = [1, 0, 1, 0, 1, 0];
        assert_eq!(
            knn_classify(&train, &labels, &wect(0.0), params(5), -1.0, 1.0).unwrap(),
            1
        );
        let labels = [0, 1, 0, 1, 0, 1];
        assert_eq!(
            knn_classify(&train, &labels, &wect(0.0), params(5), -1.0, 1.0).unwrap(),
            0
        );
    }

    #[test]
    fn ties_prefer_lower_index() {
        assert_eq!(vote(&[1.0, 1.0, 2.0], &[1, 0, 0], 1), 1);
        assert_eq!(vote(&[1.0, 1.0, 2.0], &[0, 1, 1], 1), 0);
    }

    #[test]
    fn rejects_bad_k() {
        let train = vec![wect(0.0), wect(1.0)];
        assert!(knn_classify(&train, &[0, 1], &wect(0.0), params(2), -1.0, 1.0).is_err());
        assert!(knn_classify(&train, &[0, 1], &wect(0.0), params(3), -1.0, 1.0).is_err());
        assert!(matches!(
            knn_classify(&[], &[], &wect(0.0), params(1), -1.0, 1.0),
            Err(WectError::EmptyTrainingSet)
        ));
    }
}
