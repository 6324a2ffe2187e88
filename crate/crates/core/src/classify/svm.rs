//! Soft-margin support vector machines for two classes.
//!
//! Labels are class indices `0` and `1`; class `1` is the positive side of the
//! decision function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::seed;

/// Width of the RBF kernel `exp(-gamma |x - x'|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Gamma {
    /// `1 / (p * var(X))` over all entries of the training matrix.
    #[default]
    Scale,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    #[default]
    Rbf,
}

/// `sign(w . x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) > 0.0)
    }
}

/// `sign(sum_i coef_i K(sv_i, x) - rho)` with an RBF kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSvm {
    pub support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
    pub gamma: f64,
}

impl KernelSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * rbf(self.gamma, sv, x))
            .sum::<f64>()
            - self.rho
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SvmModel {
    Linear(LinearSvm),
    Kernel(KernelSvm),
}

impl SvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        match self {
            SvmModel::Linear(m) => m.decision(x),
            SvmModel::Kernel(m) => m.decision(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) > 0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Validates the training data and returns labels as `-1.0` / `+1.0`.
fn check(features: &[Vec<f64>], labels: &[usize], c: f64) -> Result<Vec<f64>> {
    if features.is_empty() {
        return Err(WectError::EmptyTrainingSet);
    }
    if features.len() != labels.len() {
        return Err(WectError::Mismatch(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(WectError::BadClassifier(format!("C must be positive, got {c}")));
    }
    let p = features[0].len();
    for row in features {
        if row.len() != p {
            return Err(WectError::Mismatch("feature rows differ in length".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(WectError::BadClassifier("features must be finite".into()));
        }
    }
    if let Some(&l) = labels.iter().find(|&&l| l > 1) {
        return Err(WectError::BadClassifier(format!("label {l} is not 0 or 1")));
    }
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(WectError::SingleClass);
    }
    Ok(labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect())
}

/// Linear soft-margin SVM minimizing `sum_i hinge_i + ||w||^2 / (2C)` by
/// stochastic subgradient descent (step `1 / (lambda t)`, iterate averaged over
/// the second half of a fixed budget of `max(20 m, 10^4)` steps).
///
/// The bias is not regularized: `w` is learned on mean-centred features and
/// `b` is then the midpoint of the interval minimizing the training hinge loss.
pub fn train_svm(features: &[Vec<f64>], labels: &[usize], c: f64, seed: u64) -> Result<LinearSvm> {
    let y = check(features, labels, c)?;
    let m = features.len();
    let p = features[0].len();
    let mut mean = vec![0.0; p];
    for row in features {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let x: Vec<Vec<f64>> = features
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(v, mu)| v - mu).collect())
        .collect();

    let lambda = 1.0 / (c * m as f64);
    let steps = (20 * m).max(10_000);
    let mut rng = seed::rng(seed);
    // w = scale * v keeps the shrink step O(1)
    let mut v = vec![0.0; p];
    let mut scale = 1.0;
    let mut avg = vec![0.0; p];
    let mut averaged = 0usize;
    for t in 1..=steps {
        let i = rng.random_range(0..m);
        let eta = 1.0 / (lambda * t as f64);
        let margin = y[i] * scale * dot(&v, &x[i]);
        if t == 1 {
            scale = 1.0;
            v.iter_mut().for_each(|w| *w = 0.0);
        } else {
            scale *= 1.0 - 1.0 / t as f64;
        }
        if margin < 1.0 {
            let step = eta * y[i] / scale;
            for (w, xi) in v.iter_mut().zip(&x[i]) {
                *w += step * xi;
            }
        }
        if scale < 1e-100 {
            v.iter_mut().for_each(|w| *w *= scale);
            scale = 1.0;
        }
        if 2 * t > steps {
            for (a, w) in avg.iter_mut().zip(&v) {
                *a += scale * w;
            }
            averaged += 1;
        }
    }
    let w: Vec<f64> = avg.into_iter().map(|a| a / averaged as f64).collect();
    let scores: Vec<f64> = x.iter().map(|xi| dot(&w, xi)).collect();
    let b_centred = best_bias(&scores, &y);
    Ok(LinearSvm {
        b: b_centred - dot(&w, &mean),
        w,
    })
}

/// Midpoint of the set of `b` minimizing `sum_i max(0, 1 - y_i (s_i + b))`.
///
/// The loss is convex and piecewise linear with kinks at `y_i - s_i`; its
/// slope starts at minus the number of positives and rises by one at every
/// kink, so the minimizers lie between the `P`-th and `(P + 1)`-th kink.
fn best_bias(scores: &[f64], y: &[f64]) -> f64 {
    let mut kinks: Vec<f64> = scores.iter().zip(y).map(|(s, yi)| yi - s).collect();
    kinks.sort_by(f64::total_cmp);
    let positives = y.iter().filter(|&&v| v > 0.0).count();
    0.5 * (kinks[positives - 1] + kinks[positives])
}

/// RBF-kernel soft-margin SVM solved in the dual by sequential minimal
/// optimization with second-order working-set selection (stopping tolerance
/// `1e-3` on the maximal KKT violation).
pub fn train_kernel_svm(features: &[Vec<f64>], labels: &[usize], c: f64, gamma: Gamma) -> Result<KernelSvm> {
    let y = check(features, labels, c)?;
    let gamma = match gamma {
        Gamma::Value(g) if g > 0.0 && g.is_finite() => g,
        Gamma::Value(g) => return Err(WectError::BadClassifier(format!("gamma must be positive, got {g}"))),
        Gamma::Scale => scale_gamma(features),
    };
    let m = features.len();
    let mut q = vec![0.0; m * m];
    for i in 0..m {
        q[i * m + i] = 1.0;
        for j in 0..i {
            let v = y[i] * y[j] * rbf(gamma, &features[i], &features[j]);
            q[i * m + j] = v;
            q[j * m + i] = v;
        }
    }
    let (alpha, rho) = smo(&q, &y, c, 1e-3);
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for i in 0..m {
        if alpha[i] > 0.0 {
            support.push(features[i].clone());
            coef.push(alpha[i] * y[i]);
        }
    }
    Ok(KernelSvm {
        support,
        coef,
        rho,
        gamma,
    })
}

fn scale_gamma(features: &[Vec<f64>]) -> f64 {
    let p = features[0].len();
    let count = (features.len() * p) as f64;
    let mean = features.iter().flatten().sum::<f64>() / count;
    let var = features.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
    if var > 0.0 {
        1.0 / (p as f64 * var)
    } else {
        1.0
    }
}

/// Dual solver for `min 1/2 a'Qa - e'a`, `0 <= a <= C`, `y'a = 0`.
/// Returns `(alpha, rho)`.
fn smo(q: &[f64], y: &[f64], c: f64, eps: f64) -> (Vec<f64>, f64) {
    const TAU: f64 = 1e-12;
    const MAX_ITER: usize = 10_000_000;
    let m = y.len();
    let mut alpha = vec![0.0; m];
    let mut grad = vec![-1.0; m];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    for _ in 0..MAX_ITER {
        // i: maximal violating index in I_up
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..m {
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && -y[t] * grad[t] >= g_max {
                g_max = -y[t] * grad[t];
                i = t;
            }
        }
        if i == usize::MAX {
            break;
        }
        let qi = &q[i * m..(i + 1) * m];
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..m {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let yg = y[t] * grad[t];
            g_max2 = g_max2.max(yg);
            let grad_diff = g_max + yg;
            if grad_diff > 0.0 {
                let mut quad = 1.0 + q[t * m + t] - 2.0 * y[i] * y[t] * qi[t];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        if g_max + g_max2 < eps || j == usize::MAX {
            break;
        }
        let qj = &q[j * m..(j + 1) * m];
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let mut quad = qi[i] + qj[j] + 2.0 * qi[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = qi[i] + qj[j] - 2.0 * qi[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = sum;
                }
                if ai < 0.0 {
                    ai = 0.0;
                    aj = sum;
                }
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..m {
            grad[t] += qi[t] * di + qj[t] * dj;
        }
    }
    // rho from free variables, else midpoint of the feasible range
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..m {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        0.5 * (ub + lb)
    };
    (alpha, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn train_accuracy(predict: impl Fn(&[f64]) -> usize, x: &[Vec<f64>], y: &[usize]) -> f64 {
        x.iter().zip(y).filter(|(xi, &yi)| predict(xi) == yi).count() as f64 / y.len() as f64
    }

    #[test]
    fn two_separable_points() {
        let x = vec![vec![0.0, 1.0], vec![2.0, -1.0]];
        let y = vec![0, 1];
        let lin = train_svm(&x, &y, 20.0, 1).unwrap();
        assert_eq!(train_accuracy(|v| lin.predict(v), &x, &y), 1.0);
        let rbf = train_kernel_svm(&x, &y, 20.0, Gamma::Scale).unwrap();
        assert_eq!(train_accuracy(|v| rbf.predict(v), &x, &y), 1.0);
    }

    #[test]
    fn errors() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(train_svm(&x, &[1, 1], 1.0, 0), Err(WectError::SingleClass)));
        assert!(matches!(
            train_kernel_svm(&x, &[0, 0], 1.0, Gamma::Scale),
            Err(WectError::SingleClass)
        ));
        assert!(matches!(train_svm(&[], &[], 1.0, 0), Err(WectError::EmptyTrainingSet)));
        assert!(train_svm(&x, &[0, 1], 0.0, 0).is_err());
        assert!(train_svm(&[vec![f64::NAN], vec![1.0]], &[0, 1], 1.0, 0).is_err());
        assert!(train_svm(&x, &[0, 2], 1.0, 0).is_err());
    }

    /// Best separating direction over a fine angle grid: maximizes the gap
    /// between the classes' projections.
    fn grid_search_margin(x: &[Vec<f64>], y: &[usize]) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..36_000 {
            let a = k as f64 * std::f64::consts::TAU / 36_000.0;
            let (c, s) = (a.cos(), a.sin());
            let proj = |v: &Vec<f64>| c * v[0] + s * v[1];
            let lo1 = x
                .iter()
                .zip(y)
                .filter(|p| *p.1 == 1)
                .map(|p| proj(p.0))
                .fold(f64::INFINITY, f64::min);
            let hi0 = x
                .iter()
                .zip(y)
                .filter(|p| *p.1 == 0)
                .map(|p| proj(p.0))
                .fold(f64::NEG_INFINITY, f64::max);
            if lo1 - hi0 > best.0 {
                best = (lo1 - hi0, a);
            }
        }
        best
    }

    fn primal(x: &[Vec<f64>], y: &[usize], c: f64, w: &[f64], b: f64) -> f64 {
        let hinge: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, &yi)| {
                let s = if yi == 1 { 1.0 } else { -1.0 };
                (1.0 - s * (dot(w, xi) + b)).max(0.0)
            })
            .sum();
        0.5 * dot(w, w) + c * hinge
    }

    /// Minimum of the primal objective over a polar grid of `w` and a grid of `b`.
    fn grid_search_primal(x: &[Vec<f64>], y: &[usize], c: f64) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..720 {
            let a = k as f64 * std::f64::consts::TAU / 720.0;
            for r in 0..=200 {
                let norm = r as f64 * 0.02;
                let w = [norm * a.cos(), norm * a.sin()];
                for bi in -400..=400 {
                    best = best.min(primal(x, y, c, &w, bi as f64 * 0.02));
                }
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_hyperplane_search_on_six_points() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.5, 2.0],
            vec![3.0, 1.0],
            vec![3.5, 3.0],
            vec![2.5, 2.5],
        ];
        let y = vec![0, 0, 0, 1, 1, 1];
        let (gap, _) = grid_search_margin(&x, &y);
        assert!(gap > 0.0, "grid search must find a separating line");
        for c in [1e-3, 1e-1, 20.0] {
            let lin = train_svm(&x, &y, c, 3).unwrap();
            assert_eq!(train_accuracy(|v| lin.predict(v), &x, &y), 1.0, "C={c}");
        }
        // the primal objective is close to the best one found by brute force
        for c in [0.1, 1.0, 20.0] {
            let lin = train_svm(&x, &y, c, 3).unwrap();
            let found = primal(&x, &y, c, &lin.w, lin.b);
            let best = grid_search_primal(&x, &y, c);
            assert!(found <= best * 1.02 + 1e-9, "C={c}: {found} vs {best}");
        }
        let rbf = train_kernel_svm(&x, &y, 20.0, Gamma::Value(0.1)).unwrap();
        assert_eq!(train_accuracy(|v| rbf.predict(v), &x, &y), 1.0);
        // small C shrinks the weights
        let small = train_svm(&x, &y, 1e-3, 3).unwrap();
        let big = train_svm(&x, &y, 20.0, 3).unwrap();
        assert!(dot(&small.w, &small.w) < dot(&big.w, &big.w));
    }

    #[test]
    fn kernel_solution_satisfies_kkt() {
        let mut rng = seed::rng(8);
        let x: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let y: Vec<usize> = x.iter().map(|v| usize::from(v[0] * v[0] + v[1] * v[1] > 0.5)).collect();
        let model = train_kernel_svm(&x, &y, 20.0, Gamma::Value(5.0)).unwrap();
        // sum alpha_i y_i = 0
        assert!(model.coef.iter().sum::<f64>().abs() < 1e-9);
        assert!(model.coef.iter().all(|c| c.abs() <= 20.0 + 1e-12));
        assert!(train_accuracy(|v| model.predict(v), &x, &y) > 0.95);
    }

    #[test]
    fn random_labels_give_chance_accuracy() {
        let mut rng = seed::rng(21);
        let mut draw = |n: usize| -> (Vec<Vec<f64>>, Vec<usize>) {
            let x = (0..n).map(|_| (0..10).map(|_| rng.random::<f64>()).collect()).collect();
            let y = (0..n).map(|_| rng.random_range(0..2)).collect();
            (x, y)
        };
        let (xt, yt) = draw(200);
        let (xs, ys) = draw(50);
        let lin = train_svm(&xt, &yt, 20.0, 4).unwrap();
        let acc = train_accuracy(|v| lin.predict(v), &xs, &ys);
        assert!((0.3..=0.7).contains(&acc), "{acc}");
        let rbf = train_kernel_svm(&xt, &yt, 20.0, Gamma::Scale).unwrap();
        let acc = train_accuracy(|v| rbf.predict(v), &xs, &ys);
        assert!((0.3..=0.7).contains(&acc), "{acc}");
    }

    #[test]
    fn best_bias_centres_the_gap() {
        // scores of negatives at most -1, positives at least 3: any b in [-2, 0] is loss-free
        let b = best_bias(&[-1.0, -3.0, 3.0, 4.0], &[-1.0, -1.0, 1.0, 1.0]);
        assert!((b + 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_under_seed() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        let y = vec![0, 0, 1, 1];
        assert_eq!(train_svm(&x, &y, 20.0, 5).unwrap(), train_svm(&x, &y, 20.0, 5).unwrap());
    }
}
