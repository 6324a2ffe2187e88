//! Pixel-intensity distributions on `(0, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};

/// Serialized as `{"kind": "uniform"}`, `{"kind": "truncated_normal", "mean":
/// 0.5, "sd": 0.17}` or `{"kind": "constant", "value": 0.4}`; a label accepted
/// by [`FromStr`] (`"uniform"`, `"N(0.5,0.17)"`) deserializes too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "ModelRepr")]
pub enum IntensityModel {
    /// `U(0, 1)` on `(0, 1]`.
    Uniform,
    /// `N(mean, sd)` conditioned on `(0, 1]`, sampled by rejection.
    TruncatedNormal { mean: f64, sd: f64 },
    /// Every pixel takes the same value.
    Constant { value: f64 },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModelRepr {
    Label(String),
    Tagged(Tagged),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Tagged {
    Uniform,
    TruncatedNormal { mean: f64, sd: f64 },
    Constant { value: f64 },
}

impl TryFrom<ModelRepr> for IntensityModel {
    type Error = WectError;

    fn try_from(r: ModelRepr) -> Result<IntensityModel> {
        match r {
            ModelRepr::Label(s) => s.parse(),
            ModelRepr::Tagged(Tagged::Uniform) => Ok(IntensityModel::Uniform),
            ModelRepr::Tagged(Tagged::TruncatedNormal { mean, sd }) => {
                IntensityModel::TruncatedNormal { mean, sd }.validate()
            }
            ModelRepr::Tagged(Tagged::Constant { value }) => IntensityModel::Constant { value }.validate(),
        }
    }
}

impl IntensityModel {
    /// The uniform law and the three truncated normals `N(0.5, sd)`,
    /// `sd in {0.17, 0.25, 0.5}`, in that order.
    pub const STUDY: [IntensityModel; 4] = [
        IntensityModel::Uniform,
        IntensityModel::normal(0.17),
        IntensityModel::normal(0.25),
        IntensityModel::normal(0.5),
    ];

    pub const fn normal(sd: f64) -> IntensityModel {
        IntensityModel::TruncatedNormal { mean: 0.5, sd }
    }

    pub fn validate(self) -> Result<IntensityModel> {
        match self {
            IntensityModel::TruncatedNormal { mean, sd } => {
                if !(sd > 0.0 && sd.is_finite()) {
                    return Err(WectError::BadModel(format!(
                        "standard deviation must be positive, got {sd}"
                    )));
                }
                if !(0.0..=1.0).contains(&mean) {
                    return Err(WectError::BadModel(format!("mean {mean} is outside [0, 1]")));
                }
            }
            IntensityModel::Constant { value } if !(value > 0.0 && value <= 1.0) => {
                return Err(WectError::BadModel(format!("constant {value} is outside (0, 1]")));
            }
            _ => {}
        }
        Ok(self)
    }

    /// Mean of the (truncated) law. Truncation to `(0, 1]` keeps the mean of a
    /// normal centred at 0.5.
    pub fn mean(self) -> Option<f64> {
        match self {
            IntensityModel::Uniform => Some(0.5),
            IntensityModel::TruncatedNormal { mean: 0.5, .. } => Some(0.5),
            IntensityModel::TruncatedNormal { .. } => None,
            IntensityModel::Constant { value } => Some(value),
        }
    }

    /// Short label such as `U(0,1)` or `N(0.5,0.17)`.
    pub fn label(self) -> String {
        self.to_string()
    }

    /// Draws one intensity in `(0, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            // random::<f64>() is in [0, 1)
            IntensityModel::Uniform => 1.0 - rng.random::<f64>(),
            IntensityModel::TruncatedNormal { mean, sd } => {
                let normal = Normal::new(mean, sd).expect("validated model");
                loop {
                    let x = normal.sample(rng);
                    if x > 0.0 && x <= 1.0 {
                        return x;
                    }
                }
            }
            IntensityModel::Constant { value } => value,
        }
    }
}

impl fmt::Display for IntensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntensityModel::Uniform => write!(f, "U(0,1)"),
            IntensityModel::TruncatedNormal { mean, sd } => write!(f, "N({mean},{sd})"),
            IntensityModel::Constant { value } => write!(f, "C({value})"),
        }
    }
}

impl FromStr for IntensityModel {
    type Err = WectError;

    /// Accepts `uniform`, `U(0,1)`, `normal:0.17`, `N(0.5,0.17)` and
    /// `constant:0.4`.
    fn from_str(s: &str) -> Result<IntensityModel> {
        let bad = || WectError::BadModel(format!("cannot parse intensity model `{s}`"));
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let model = if t == "uniform" || t == "u(0,1)" {
            IntensityModel::Uniform
        } else if let Some(sd) = t.strip_prefix("normal:") {
            IntensityModel::normal(num(sd)?)
        } else if let Some(v) = t.strip_prefix("constant:") {
            IntensityModel::Constant { value: num(v)? }
        } else if let Some(inner) = t.strip_prefix("n(").and_then(|r| r.strip_suffix(')')) {
            let (m, sd) = inner.split_once(',').ok_or_else(bad)?;
            IntensityModel::TruncatedNormal {
                mean: num(m)?,
                sd: num(sd)?,
            }
        } else {
            return Err(bad());
        };
        model.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn parsing_round_trips_labels() {
        for m in IntensityModel::STUDY {
            assert_eq!(m.label().parse::<IntensityModel>().unwrap(), m);
        }
        assert_eq!(
            "normal:0.25".parse::<IntensityModel>().unwrap(),
            IntensityModel::normal(0.25)
        );
        assert!("normal:0".parse::<IntensityModel>().is_err());
        assert!("normal:-1".parse::<IntensityModel>().is_err());
        assert!("gamma".parse::<IntensityModel>().is_err());
    }

    #[test]
    fn draws_stay_in_support() {
        let mut rng = seed::rng(3);
        for m in IntensityModel::STUDY {
            for _ in 0..10_000 {
                let x = m.sample(&mut rng);
                assert!(x > 0.0 && x <= 1.0);
            }
        }
    }

    #[test]
    fn uniform_mean_is_one_half() {
        let mut rng = seed::rng(11);
        let n = 100_000;
        let mean = (0..n).map(|_| IntensityModel::Uniform.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn narrow_normal_is_rarely_truncated() {
        let normal = Normal::new(0.5, 0.17).unwrap();
        let mut rng = seed::rng(5);
        let n = 100_000;
        let inside = (0..n).filter(|_| (0.0..1.0).contains(&normal.sample(&mut rng))).count();
        assert!(inside as f64 / n as f64 >= 0.99);
    }

    #[test]
    fn deserializes_from_tags_and_labels() {
        let tagged: IntensityModel =
            serde_json::from_str(r#"{"kind":"truncated_normal","mean":0.5,"sd":0.17}"#).unwrap();
        let label: IntensityModel = serde_json::from_str(r#""N(0.5,0.17)""#).unwrap();
        assert_eq!(tagged, IntensityModel::normal(0.17));
        assert_eq!(label, tagged);
        let json = serde_json::to_string(&IntensityModel::Uniform).unwrap();
        assert_eq!(json, r#"{"kind":"uniform"}"#);
        assert_eq!(
            serde_json::from_str::<IntensityModel>(&json).unwrap(),
            IntensityModel::Uniform
        );
        assert!(serde_json::from_str::<IntensityModel>(r#"{"kind":"truncated_normal","mean":0.5,"sd":-1}"#).is_err());
        assert!(serde_json::from_str::<IntensityModel>(r#""gamma""#).is_err());
    }
}
