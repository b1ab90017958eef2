//! Workloads shared by the criterion benches in `benches/`.

use profilekit::dist::{make_power_law, make_uniform, PowerLawSupport, Sampler};
use profilekit::{profile_of, DiscreteDistribution, Profile};

/// Uniform and power-law sources, by name.
pub fn sources() -> Vec<(&'static str, DiscreteDistribution)> {
    vec![
        ("uniform-1k", make_uniform(1_000).expect("k ≥ 1")),
        ("zipf-1.2-100k", make_power_law(1.2, PowerLawSupport::Finite(100_000)).expect("valid")),
    ]
}

pub fn sample(p: &DiscreteDistribution, n: u64, seed: u64) -> Vec<i64> {
    Sampler::new(p, seed).sample(n)
}

pub fn sample_profile(p: &DiscreteDistribution, n: u64, seed: u64) -> Profile {
    profile_of(sample(p, n, seed))
}

/// Symbol `s` repeated `s` times, `s = 1, 2, …`, cut at length `n`.
/// Keeps about `√(2n)` distinct multiplicities live.
pub fn staircase(n: u64) -> Vec<u64> {
    (1u64..).flat_map(|s| std::iter::repeat_n(s, s as usize)).take(n as usize).collect()
}
