//! Serializable descriptors for the distributions experiments run on.

use std::fmt;
use std::str::FromStr;

use profilekit::dist::{
    discretize, make_histogram, make_power_law, make_uniform, mixture, ContinuousModel, PowerLawSupport, TAIL_CUTOFF,
};
use profilekit::{DiscreteDistribution, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    PointMass,
    Uniform { k: u64 },
    /// `k = None` is the truncated infinite support.
    PowerLaw { alpha: f64, k: Option<u64> },
    Gaussian { mean: f64, sigma: f64 },
    Laplace { mean: f64, scale: f64 },
    Exponential { rate: f64 },
    Histogram { sizes: Vec<u64>, masses: Vec<f64> },
    Mixture { components: Vec<FamilySpec>, weights: Vec<f64> },
    HistogramInstance { t: u64, n: u64 },
    Explicit { probs: Vec<f64> },
}

impl FamilySpec {
    pub fn build(&self) -> Result<DiscreteDistribution> {
        match self {
            FamilySpec::PointMass => Ok(DiscreteDistribution::point_mass()),
            FamilySpec::Uniform { k } => make_uniform(*k),
            FamilySpec::PowerLaw { alpha, k } => make_power_law(
                *alpha,
                match k {
                    Some(k) => PowerLawSupport::Finite(*k),
                    None => PowerLawSupport::Infinite,
                },
            ),
            FamilySpec::Gaussian { mean, sigma } => discretize(&ContinuousModel::gaussian(*mean, *sigma)?, TAIL_CUTOFF),
            FamilySpec::Laplace { mean, scale } => discretize(&ContinuousModel::laplace(*mean, *scale)?, TAIL_CUTOFF),
            FamilySpec::Exponential { rate } => discretize(&ContinuousModel::exponential(*rate)?, TAIL_CUTOFF),
            FamilySpec::Histogram { sizes, masses } => make_histogram(sizes, masses),
            FamilySpec::Mixture { components, weights } => {
                let built = components.iter().map(FamilySpec::build).collect::<Result<Vec<_>>>()?;
                mixture(&built, weights)
            }
            FamilySpec::HistogramInstance { t, n } => profilekit::dist::histogram_lower_bound_instance(*t, *n),
            FamilySpec::Explicit { probs } => DiscreteDistribution::from_probs(probs),
        }
    }

    /// Standard deviation of the underlying continuous model, for shape bounds.
    pub fn continuous_sigma(&self) -> Option<f64> {
        match *self {
            FamilySpec::Gaussian { sigma, .. } => Some(sigma),
            FamilySpec::Laplace { scale, .. } => Some(scale * std::f64::consts::SQRT_2),
            FamilySpec::Exponential { rate } => Some(1.0 / rate),
            _ => None,
        }
    }

    /// Component standard deviations when every component is a continuous model.
    pub fn mixture_sigmas(&self) -> Option<Vec<f64>> {
        match self {
            FamilySpec::Mixture { components, .. } => components.iter().map(FamilySpec::continuous_sigma).collect(),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::PointMass => write!(f, "point"),
            FamilySpec::Uniform { k } => write!(f, "uniform:{k}"),
            FamilySpec::PowerLaw { alpha, k: Some(k) } => write!(f, "power-law:{alpha}:{k}"),
            FamilySpec::PowerLaw { alpha, k: None } => write!(f, "power-law:{alpha}:inf"),
            FamilySpec::Gaussian { mean, sigma } => write!(f, "gaussian:{mean}:{sigma}"),
            FamilySpec::Laplace { mean, scale } => write!(f, "laplace:{mean}:{scale}"),
            FamilySpec::Exponential { rate } => write!(f, "exponential:{rate}"),
            FamilySpec::Histogram { sizes, masses } => {
                write!(f, "histogram:{}:{}", join(sizes), join(masses))
            }
            FamilySpec::Mixture { components, weights } => {
                write!(f, "mixture[")?;
                for (i, (c, w)) in components.iter().zip(weights).enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{w}*{c}")?;
                }
                write!(f, "]")
            }
            FamilySpec::HistogramInstance { t, n } => write!(f, "hist-instance:{t}:{n}"),
            FamilySpec::Explicit { probs } => write!(f, "probs:{}", join(probs)),
        }
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad list entry '{x}'")))
        .collect()
}

/// Compact `name:arg:arg` form used on the command line; mixtures need JSON.
impl FromStr for FamilySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> std::result::Result<f64, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("'{s}': missing argument {i}"))?
                .parse::<f64>()
                .map_err(|e| format!("'{s}': {e}"))
        };
        let int = |i: usize| -> std::result::Result<u64, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("'{s}': missing argument {i}"))?
                .parse::<u64>()
                .map_err(|e| format!("'{s}': {e}"))
        };
        let arity = |k: usize| {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(format!("'{s}': expected {k} argument(s)"))
            }
        };
        match parts[0] {
            "point" => arity(0).map(|_| FamilySpec::PointMass),
            "uniform" => arity(1).and_then(|_| Ok(FamilySpec::Uniform { k: int(1)? })),
            "power-law" => {
                arity(2)?;
                let k = match parts[2] {
                    "inf" => None,
                    _ => Some(int(2)?),
                };
                Ok(FamilySpec::PowerLaw { alpha: num(1)?, k })
            }
            "gaussian" => arity(2).and_then(|_| Ok(FamilySpec::Gaussian { mean: num(1)?, sigma: num(2)? })),
            "laplace" => arity(2).and_then(|_| Ok(FamilySpec::Laplace { mean: num(1)?, scale: num(2)? })),
            "exponential" => arity(1).and_then(|_| Ok(FamilySpec::Exponential { rate: num(1)? })),
            "histogram" => {
                arity(2)?;
                Ok(FamilySpec::Histogram {
                    sizes: list(parts[1])?,
                    masses: list(parts[2])?,
                })
            }
            "hist-instance" => arity(2).and_then(|_| Ok(FamilySpec::HistogramInstance { t: int(1)?, n: int(2)? })),
            "probs" => arity(1).and_then(|_| Ok(FamilySpec::Explicit { probs: list(parts[1])? })),
            other => Err(format!("unknown family '{other}'")),
        }
    }
}
