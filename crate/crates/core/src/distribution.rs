//! Activity duration distributions.

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal, Triangular, Uniform};
use serde::{Deserialize, Serialize};

/// Duration model of one activity.
///
/// Serialized as an object tagged by `type`, e.g.
/// `{"type": "normal", "mean": 5, "sd": 0.4}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DurationDistribution {
    Deterministic {
        value: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Triangular {
        min: f64,
        mode: f64,
        max: f64,
    },
    Uniform {
        min: f64,
        max: f64,
    },
    /// Beta with shape `(alpha, beta)` rescaled onto `[min, max]`.
    Beta {
        min: f64,
        max: f64,
        alpha: f64,
        beta: f64,
    },
    /// `high` with probability `p_high`, else `low`.
    TwoPoint {
        low: f64,
        high: f64,
        p_high: f64,
    },
}

/// How a distribution is collapsed to a single planning value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Determinize {
    #[default]
    Mean,
    Mode,
}

impl DurationDistribution {
    pub const KINDS: [&'static str; 6] = [
        "deterministic",
        "normal",
        "triangular",
        "uniform",
        "beta",
        "two_point",
    ];

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Deterministic { .. } => "deterministic",
            Self::Normal { .. } => "normal",
            Self::Triangular { .. } => "triangular",
            Self::Uniform { .. } => "uniform",
            Self::Beta { .. } => "beta",
            Self::TwoPoint { .. } => "two_point",
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic { value } => value,
            Self::Normal { mean, .. } => mean,
            Self::Triangular { min, mode, max } => (min + mode + max) / 3.0,
            Self::Uniform { min, max } => 0.5 * (min + max),
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } => min + (max - min) * alpha / (alpha + beta),
            Self::TwoPoint { low, high, p_high } => low + p_high * (high - low),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Deterministic { .. } => 0.0,
            Self::Normal { sd, .. } => sd * sd,
            Self::Triangular { min, mode, max } => {
                (min * min + mode * mode + max * max - min * mode - min * max - mode * max) / 18.0
            }
            Self::Uniform { min, max } => (max - min).powi(2) / 12.0,
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } => {
                let s = alpha + beta;
                (max - min).powi(2) * alpha * beta / (s * s * (s + 1.0))
            }
            Self::TwoPoint { low, high, p_high } => (high - low).powi(2) * p_high * (1.0 - p_high),
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Most likely value. Kinds without a unique mode (uniform, flat beta,
    /// balanced two-point) fall back to the mean.
    pub fn mode(&self) -> f64 {
        match *self {
            Self::Deterministic { value } => value,
            Self::Normal { mean, .. } => mean,
            Self::Triangular { mode, .. } => mode,
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } if alpha > 1.0 && beta > 1.0 => {
                min + (max - min) * (alpha - 1.0) / (alpha + beta - 2.0)
            }
            Self::TwoPoint { low, high, p_high } if p_high != 0.5 => {
                if p_high > 0.5 {
                    high
                } else {
                    low
                }
            }
            _ => self.mean(),
        }
    }

    pub fn planning_value(&self, how: Determinize) -> f64 {
        match how {
            Determinize::Mean => self.mean(),
            Determinize::Mode => self.mode(),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Deterministic { .. })
    }

    /// Parameter problems, one message per violated constraint.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let finite = |name: &str, v: f64, out: &mut Vec<String>| {
            if !v.is_finite() {
                out.push(format!("{name} must be finite (got {v})"));
            }
        };
        match *self {
            Self::Deterministic { value } => {
                finite("value", value, &mut out);
                if value < 0.0 {
                    out.push(format!("value must be >= 0 (got {value})"));
                }
            }
            Self::Normal { mean, sd } => {
                finite("mean", mean, &mut out);
                finite("sd", sd, &mut out);
                if sd < 0.0 {
                    out.push(format!("sd must be >= 0 (got {sd})"));
                }
            }
            Self::Triangular { min, mode, max } => {
                for (n, v) in [("min", min), ("mode", mode), ("max", max)] {
                    finite(n, v, &mut out);
                }
                if !(min <= mode && mode <= max) {
                    out.push(format!(
                        "need min <= mode <= max (got {min}, {mode}, {max})"
                    ));
                } else if min >= max {
                    out.push(format!("need min < max (got {min}, {max})"));
                }
            }
            Self::Uniform { min, max } => {
                finite("min", min, &mut out);
                finite("max", max, &mut out);
                if min >= max {
                    out.push(format!("need min < max (got {min}, {max})"));
                }
            }
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } => {
                for (n, v) in [("min", min), ("max", max), ("alpha", alpha), ("beta", beta)] {
                    finite(n, v, &mut out);
                }
                if min >= max {
                    out.push(format!("need min < max (got {min}, {max})"));
                }
                if alpha <= 0.0 {
                    out.push(format!("alpha must be > 0 (got {alpha})"));
                }
                if beta <= 0.0 {
                    out.push(format!("beta must be > 0 (got {beta})"));
                }
            }
            Self::TwoPoint { low, high, p_high } => {
                finite("low", low, &mut out);
                finite("high", high, &mut out);
                if low > high {
                    out.push(format!("need low <= high (got {low}, {high})"));
                }
                if !(0.0..=1.0).contains(&p_high) {
                    out.push(format!("p_high must lie in [0, 1] (got {p_high})"));
                }
            }
        }
        out
    }

    /// Image of the distribution under `x -> center + scale * (x - mean)`.
    ///
    /// Every kind is closed under positive affine maps, and the sampler draws
    /// the mapped variate from exactly the same uniforms as the original, so
    /// transformed activities stay coupled to their base stream.
    pub fn affine(&self, center: f64, scale: f64) -> Self {
        let mu = self.mean();
        let map = |x: f64| center + scale * (x - mu);
        match *self {
            Self::Deterministic { .. } => Self::Deterministic { value: center },
            Self::Normal { sd, .. } => Self::Normal {
                mean: center,
                sd: scale * sd,
            },
            Self::Triangular { min, mode, max } => Self::Triangular {
                min: map(min),
                mode: map(mode),
                max: map(max),
            },
            Self::Uniform { min, max } => Self::Uniform {
                min: map(min),
                max: map(max),
            },
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } => Self::Beta {
                min: map(min),
                max: map(max),
                alpha,
                beta,
            },
            Self::TwoPoint { low, high, p_high } => Self::TwoPoint {
                low: map(low),
                high: map(high),
                p_high,
            },
        }
    }

    /// Builds the sampler for this distribution. Fails on invalid parameters.
    pub fn sampler(&self) -> Result<Sampler, String> {
        if let Some(v) = self.violations().into_iter().next() {
            return Err(v);
        }
        let inner = match *self {
            Self::Deterministic { value } => SamplerKind::Constant(value),
            Self::Normal { mean, sd } => {
                SamplerKind::Normal(Normal::new(mean, sd).map_err(|e| e.to_string())?)
            }
            Self::Triangular { min, mode, max } => {
                SamplerKind::Triangular(Triangular::new(min, max, mode).map_err(|e| e.to_string())?)
            }
            Self::Uniform { min, max } => {
                SamplerKind::Uniform(Uniform::new(min, max).map_err(|e| e.to_string())?)
            }
            Self::Beta {
                min,
                max,
                alpha,
                beta,
            } => SamplerKind::Beta {
                min,
                width: max - min,
                beta: Beta::new(alpha, beta).map_err(|e| e.to_string())?,
            },
            Self::TwoPoint { low, high, p_high } => SamplerKind::TwoPoint { low, high, p_high },
        };
        Ok(Sampler(inner))
    }
}

/// Pre-built variate generator for one distribution.
#[derive(Clone, Debug)]
pub struct Sampler(SamplerKind);

#[derive(Clone, Debug)]
enum SamplerKind {
    Constant(f64),
    Normal(Normal<f64>),
    Triangular(Triangular<f64>),
    Uniform(Uniform<f64>),
    Beta {
        min: f64,
        width: f64,
        beta: Beta<f64>,
    },
    TwoPoint {
        low: f64,
        high: f64,
        p_high: f64,
    },
}

impl Sampler {
    /// One raw variate, not yet checked for sign.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Constant(v) => *v,
            SamplerKind::Normal(d) => d.sample(rng),
            SamplerKind::Triangular(d) => d.sample(rng),
            SamplerKind::Uniform(d) => d.sample(rng),
            SamplerKind::Beta { min, width, beta } => min + width * beta.sample(rng),
            SamplerKind::TwoPoint { low, high, p_high } => {
                if rng.random::<f64>() < *p_high {
                    *high
                } else {
                    *low
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.0, SamplerKind::Constant(_))
    }
}
