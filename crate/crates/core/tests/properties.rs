use profilekit::dist::{make_uniform, DiscreteDistribution, Sampler};
use profilekit::estimate::{class_masses, collision_statistic, Estimator, SampleCounts};
use profilekit::oracle::{dimension_moments_exact, profile_distribution_exact};
use profilekit::profile::max_dimension_bound;
use profilekit::proxy::{hs_scale_upper, hs_value, nesting_ratio};
use profilekit::{decode_block, encode_block, encoded_size_bits, profile_of, Profile, SeqEncoderState};
use proptest::prelude::*;

fn probs(max_k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 1..=max_k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #[test]
    fn block_round_trip(seq in prop::collection::vec(0u16..300, 0..2_000)) {
        let f = profile_of(seq.iter().copied());
        let block = encode_block(&f);
        prop_assert_eq!(block.size_bits(), encoded_size_bits(&f));
        prop_assert_eq!(decode_block(block.as_bytes()).unwrap(), f);
    }

    #[test]
    fn stream_matches_batch(seq in prop::collection::vec(0u8..40, 0..3_000)) {
        let mut enc = SeqEncoderState::<u8>::new();
        for &x in &seq {
            enc.feed_symbol(x);
        }
        let batch = profile_of(seq.iter().copied());
        let (streamed, bytes) = enc.finalize();
        prop_assert_eq!(bytes, encode_block(&batch));
        prop_assert_eq!(streamed, batch);
    }

    #[test]
    fn dimension_within_triangular_bound(seq in prop::collection::vec(0u32..1_000, 1..5_000)) {
        let f = profile_of(seq.iter().copied());
        prop_assert!(f.dimension() as u64 <= max_dimension_bound(f.len(), None));
        prop_assert!(((f.dimension() * (f.dimension() + 1)) / 2) as u64 <= f.len());
    }

    #[test]
    fn nested_pairs_are_monotone(p in probs(60), b in prop::sample::select(vec![5u32, 7, 9])) {
        let p = DiscreteDistribution::from_probs(&p).unwrap();
        let (m, n) = (1u64 << b, 1u64 << (2 * b));
        prop_assert_eq!(nesting_ratio(m, n), Some(1u64 << ((b - 1) / 2)));
        prop_assert!(hs_value(&p, n).unwrap() >= hs_value(&p, m).unwrap());
        prop_assert!(hs_scale_upper(1.0, m, n).unwrap() >= 1.0);
    }

    #[test]
    fn exact_variance_below_mean(p in probs(3), n in 1u64..9) {
        let p = DiscreteDistribution::from_probs(&p).unwrap();
        let (mean, var) = dimension_moments_exact(&p, n).unwrap();
        prop_assert!(var <= mean);
    }

    #[test]
    fn exact_collision_mean(p in probs(3), n in 2u64..8) {
        let p = DiscreteDistribution::from_probs(&p).unwrap();
        let k = p.support_size();
        let law = profile_distribution_exact(&p, n).unwrap();
        let mean: f64 = law.entries.iter().map(|(f, q)| q * collision_statistic(f, k).unwrap()).sum();
        let target = k as f64 * p.collision_probability();
        prop_assert!((mean - target).abs() <= 1e-12 * target);
    }

    #[test]
    fn oracle_beats_natural_estimators(k in 2u64..200, n in 10u64..2_000, seed in any::<u64>()) {
        let p = make_uniform(k).unwrap();
        let counts = SampleCounts::from_labels(&Sampler::new(&p, seed).sample(n));
        let cm = class_masses(&p, &counts).unwrap();
        let best = cm.oracle().1;
        let profile: Profile = counts.profile();
        for est in [Estimator::Empirical, Estimator::GoodTuring, Estimator::Dirichlet { beta: 0.5 }, Estimator::JamesStein] {
            prop_assert!(cm.kl(&est.fit(&profile, Some(k)).unwrap()) >= best - 1e-12);
        }
    }
}
