use profilekit::profile_of;
use profilekit_bench::{sample_profile, sources, staircase};

#[test]
fn staircase_dimension() {
    let seq = staircase(55);
    // 1 + 2 + … + 10 = 55: multiplicities 1..=10 once each
    let f = profile_of(seq.iter().copied());
    assert_eq!(f.dimension(), 10);
    assert_eq!(f.distinct_symbols(), 10);
    assert_eq!(staircase(4), vec![1, 2, 2, 3]);
}

#[test]
fn sources_sample_full_length() {
    for (_, p) in sources() {
        assert_eq!(sample_profile(&p, 1_000, 7).len(), 1_000);
    }
}
