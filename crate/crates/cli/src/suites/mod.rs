//! Monte Carlo and exact verification suites.

mod compression;
mod concentration;
mod family;
mod inference;
mod proxy;

use std::time::Instant;

use profilekit::dist::Sampler;
use profilekit::numeric::{derive_seed, mix64};
use profilekit::{profile_of, DiscreteDistribution};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::family::FamilySpec;
use crate::report::SuiteReport;

pub use compression::{entropy_limit_cases, entropy_vs_code_length, random_profile, run_compression_suite};
pub use concentration::{run_concentration_suite, window_violation_rate};
pub use family::{distinct_values, histogram_lower_target, run_family_suite};
pub use inference::{adversarial_dimension, far_from_uniform, run_inference_suite, ESTIMATORS};
pub use proxy::{hamming_perturbation, l1_perturbation, run_proxy_suite, scaled_gap};

pub fn run_suite(config: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    match config.suite {
        Suite::Concentration => run_concentration_suite(config),
        Suite::Proxy => run_proxy_suite(config),
        Suite::Family => run_family_suite(config),
        Suite::Compression => run_compression_suite(config),
        Suite::Inference => run_inference_suite(config),
    }
}

/// Content key of a family: FNV-1a of its compact form, then mixed.
pub fn family_key(f: &FamilySpec) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in f.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(h)
}

pub(crate) fn trial_seed(config: &ExperimentConfig, key: u64, n: u64, trial: u64) -> u64 {
    derive_seed(config.seed, &[config.suite.id(), key, n, trial])
}

pub(crate) fn families_or(config: &ExperimentConfig, default: impl FnOnce() -> Vec<FamilySpec>) -> Vec<FamilySpec> {
    if config.families.is_empty() {
        default()
    } else {
        config.families.clone()
    }
}

/// `D_n` for each trial, drawn in parallel and returned in trial order.
pub fn dimension_samples(p: &DiscreteDistribution, n: u64, seeds: &[u64]) -> Vec<f64> {
    seeds
        .par_iter()
        .map(|&s| profile_of(Sampler::new(p, s).sample(n)).dimension() as f64)
        .collect()
}

/// Sample mean and variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    /// `√((m₄ − s⁴)/T)`.
    pub se_variance: f64,
}

impl SampleMoments {
    pub fn of(xs: &[f64]) -> Self {
        let t = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / t;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / t;
        let variance = if xs.len() > 1 { m2 * t / (t - 1.0) } else { 0.0 };
        SampleMoments {
            count: xs.len(),
            mean,
            variance,
            se_mean: (variance / t).sqrt(),
            se_variance: ((m4 - m2 * m2).max(0.0) / t).sqrt(),
        }
    }
}

/// Standard error of a Bernoulli frequency with success probability `b` over `trials`.
pub fn frequency_se(b: f64, trials: usize) -> f64 {
    let b = b.clamp(0.0, 1.0);
    (b * (1.0 - b) / trials as f64).sqrt()
}

pub(crate) fn finish(config: &ExperimentConfig, started: Instant, records: Vec<crate::report::CaseRecord>) -> SuiteReport {
    SuiteReport::new(config.suite.name(), config.seed, records, started.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_known_data() {
        let m = SampleMoments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((m.se_mean - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(SampleMoments::of(&[7.0]).variance, 0.0);
    }

    #[test]
    fn keys_are_content_based() {
        let a = FamilySpec::Uniform { k: 10 };
        assert_eq!(family_key(&a), family_key(&FamilySpec::Uniform { k: 10 }));
        assert_ne!(family_key(&a), family_key(&FamilySpec::Uniform { k: 11 }));
    }

    #[test]
    fn dimension_samples_are_seeded() {
        let p = profilekit::dist::make_uniform(50).unwrap();
        let a = dimension_samples(&p, 200, &[1, 2, 3]);
        assert_eq!(a, dimension_samples(&p, 200, &[1, 2, 3]));
        assert_eq!(a[1..], dimension_samples(&p, 200, &[2, 3])[..]);
    }
}
