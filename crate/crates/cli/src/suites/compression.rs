use std::collections::BTreeMap;
use std::time::Instant;

use profilekit::codec::size_budget_bits;
use profilekit::dist::{make_uniform, Sampler};
use profilekit::oracle::profile_distribution_exact;
use profilekit::{decode_block, encode_block, encoded_size_bits, profile_of, DiscreteDistribution, Profile, SeqEncoderState};
use rand::Rng;

use super::{families_or, family_key, finish, trial_seed};
use crate::config::ExperimentConfig;
use crate::family::FamilySpec;
use crate::report::{CaseRecord, Claim, SuiteReport};

/// Largest sample size for the exact entropy-limit check.
pub const ENTROPY_LIMIT_MAX_N: u64 = 10;

pub fn default_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::Uniform { k: 100 },
        FamilySpec::PowerLaw {
            alpha: 1.5,
            k: Some(1_000),
        },
        FamilySpec::Gaussian { mean: 0.0, sigma: 30.0 },
    ]
}

/// Small distributions the exact oracle can enumerate.
pub fn entropy_limit_cases() -> Vec<(String, DiscreteDistribution)> {
    let mut v: Vec<(String, DiscreteDistribution)> = (1..=4)
        .map(|k| (format!("uniform:{k}"), make_uniform(k).expect("k ≥ 1")))
        .collect();
    for probs in [vec![0.7, 0.3], vec![0.5, 0.3, 0.2]] {
        let name = FamilySpec::Explicit { probs: probs.clone() }.to_string();
        v.push((name, DiscreteDistribution::from_probs(&probs).expect("valid")));
    }
    v
}

/// `(H(Φⁿ), E[encoded length])`, both in nats.
pub fn entropy_vs_code_length(p: &DiscreteDistribution, n: u64) -> profilekit::Result<(f64, f64)> {
    let law = profile_distribution_exact(p, n)?;
    let mean_bits: f64 = law
        .entries
        .iter()
        .map(|(f, q)| q * encoded_size_bits(f) as f64)
        .sum();
    Ok((law.entropy(), mean_bits * std::f64::consts::LN_2))
}

/// A profile of size at most `n_max`, mixing sparse, dense and staircase shapes.
pub fn random_profile<R: Rng>(rng: &mut R, n_max: u64) -> Profile {
    let n = if n_max == 0 {
        0
    } else {
        // log-uniform in [1, n_max], with some empties
        if rng.random_bool(0.01) {
            0
        } else {
            ((n_max as f64).ln() * rng.random::<f64>()).exp().round().clamp(1.0, n_max as f64) as u64
        }
    };
    let mut pairs: BTreeMap<u64, u64> = BTreeMap::new();
    let mut left = n;
    match rng.random_range(0..3) {
        0 => {
            let mut mu = 1;
            while left >= mu {
                *pairs.entry(mu).or_default() += 1;
                left -= mu;
                mu += rng.random_range(1..=2);
            }
        }
        1 => {
            while left > 0 {
                let mu = rng.random_range(1..=left.min(8));
                let phi = rng.random_range(1..=left / mu);
                *pairs.entry(mu).or_default() += phi;
                left -= mu * phi;
            }
        }
        _ => {
            while left > 0 {
                let mu = rng.random_range(1..=left);
                *pairs.entry(mu).or_default() += 1;
                left -= mu;
            }
        }
    }
    if left > 0 {
        *pairs.entry(left).or_default() += 1;
    }
    Profile::from_pairs(n, pairs.into_iter().collect()).expect("pairs sum to n")
}

/// Per sample: block round trip, size budget, and streaming encoder against
/// the batch profile. Failures are counted per (family, n) cell.
pub fn run_compression_suite(config: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let mut records = Vec::new();
    for f in families_or(config, default_families) {
        let key = family_key(&f);
        let p = match f.build() {
            Ok(p) => p,
            Err(e) => {
                for &n in &config.n_grid {
                    records.push(CaseRecord::error(Claim::CodecRoundTrip, &f, n, &e));
                }
                continue;
            }
        };
        for &n in &config.n_grid {
            let (mut round_trip, mut oversize, mut stream) = (0u64, 0u64, 0u64);
            let mut worst_fill = 0.0f64;
            for t in 0..config.trials {
                let sample = Sampler::new(&p, trial_seed(config, key, n, t)).sample(n);
                let batch = profile_of(sample.iter().copied());
                let block = encode_block(&batch);
                if decode_block(block.as_bytes()).as_ref() != Ok(&batch) {
                    round_trip += 1;
                }
                let budget = size_budget_bits(&batch);
                worst_fill = worst_fill.max(block.size_bits() as f64 / budget as f64);
                if block.size_bits() > budget {
                    oversize += 1;
                }
                let mut enc: SeqEncoderState<i64> = SeqEncoderState::new();
                for &x in &sample {
                    enc.feed_symbol(x);
                }
                let (streamed, bytes) = enc.finalize();
                if streamed != batch || bytes != block {
                    stream += 1;
                }
            }
            records.push(CaseRecord::at_most(Claim::CodecRoundTrip, &f, n, round_trip as f64, 0.0, 0.0));
            records.push(
                CaseRecord::at_most(Claim::CodecSize, &f, n, oversize as f64, 0.0, 0.0)
                    .with_detail(format!("max size/budget={worst_fill:.4}")),
            );
            records.push(CaseRecord::at_most(Claim::StreamBatch, &f, n, stream as f64, 0.0, 0.0));
        }
    }
    let top = config.n_grid.last().copied().unwrap_or(0).min(ENTROPY_LIMIT_MAX_N);
    for (name, p) in entropy_limit_cases() {
        for n in 1..=top {
            records.push(match entropy_vs_code_length(&p, n) {
                Ok((h, len)) => CaseRecord::at_most(Claim::EntropyLimit, &name, n, h, len + 1.0, 0.0),
                Err(e) => CaseRecord::error(Claim::EntropyLimit, &name, n, e),
            });
        }
    }
    Ok(finish(config, started, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_profiles_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2_000 {
            let f = random_profile(&mut rng, 5_000);
            assert!(f.len() <= 5_000);
            assert_eq!(decode_block(encode_block(&f).as_bytes()).unwrap(), f);
        }
        assert!(random_profile(&mut rng, 0).is_empty());
    }

    #[test]
    fn entropy_limit_small_case() {
        // one symbol: a single profile, zero entropy
        let (h, len) = entropy_vs_code_length(&make_uniform(1).unwrap(), 5).unwrap();
        assert_eq!(h, 0.0);
        assert!(len > 0.0);
    }

    #[test]
    fn small_suite_passes() {
        let mut cfg = ExperimentConfig::default_for(Suite::Compression);
        cfg.n_grid = vec![4, 500];
        cfg.trials = 5;
        let r = run_compression_suite(&cfg).unwrap();
        assert_eq!(r.total, 3 * 2 * 3 + 6 * 10);
        assert_eq!(r.passed, r.total, "{:?}", r.failures().collect::<Vec<_>>());
    }
}
