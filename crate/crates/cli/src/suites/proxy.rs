use std::time::Instant;

use profilekit::dist::{l1_distance, mixture, weighted_hamming};
use profilekit::proxy::{en, hs_scale_upper, hs_value, nesting_ratio};
use profilekit::{DiscreteDistribution, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{families_or, family_key, finish, trial_seed};
use crate::config::ExperimentConfig;
use crate::corpus::corpus;
use crate::pinned::{LIPSCHITZ_HAMMING_C, LIPSCHITZ_L1_C, SANDWICH_C_HI, SANDWICH_C_LO};
use crate::report::{CaseRecord, Claim, SuiteReport};

/// Largest support the perturbation probes expand symbol by symbol.
pub const PERTURB_SUPPORT_LIMIT: u64 = 100_000;

/// Smallest `m` used in monotonicity and scaling pairs.
pub const SCALING_MIN_M: u64 = 32;

/// Pairs symbols in a random subset of mass about `target/2` and moves each
/// pair's mass onto one of them; `h_W(p, q) ≤ target` up to one symbol.
pub fn hamming_perturbation<R: Rng>(p: &DiscreteDistribution, target: f64, rng: &mut R) -> Result<DiscreteDistribution> {
    let labels = p.labels()?;
    let mut probs = p.probs()?;
    let mut order: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    order.shuffle(rng);
    let mut chosen = Vec::new();
    let mut mass = 0.0;
    for i in order {
        if mass + probs[i] > target / 2.0 {
            continue;
        }
        mass += probs[i];
        chosen.push(i);
    }
    for pair in chosen.chunks_exact(2) {
        probs[pair[0]] += probs[pair[1]];
        probs[pair[1]] = 0.0;
    }
    DiscreteDistribution::from_labeled(&labels, &probs)
}

/// `(1 − ε/2)·p + (ε/2)·δ_x` for a random support label `x`; `ℓ₁(p, q) ≤ ε`.
pub fn l1_perturbation<R: Rng>(p: &DiscreteDistribution, eps: f64, rng: &mut R) -> Result<DiscreteDistribution> {
    let k = p.support_size();
    let x = p.offset() + rng.random_range(0..k) as i64;
    let spike = DiscreteDistribution::from_labeled(&[x], &[1.0])?;
    mixture(&[p.clone(), spike], &[1.0 - eps / 2.0, eps / 2.0])
}

/// `min_{c ∈ [1/3, 3]} |a − c·b|`.
pub fn scaled_gap(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return a.abs();
    }
    let c = (a / b).clamp(1.0 / 3.0, 3.0);
    (a - c * b).abs()
}

/// `E_n`-vs-`H^S` sandwich, monotonicity on grid pairs, scaling on pairs
/// with an integer nesting ratio, and Lipschitz probes under random
/// perturbations.
pub fn run_proxy_suite(config: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let mut records = Vec::new();
    for f in families_or(config, corpus) {
        let key = family_key(&f);
        let p = match f.build() {
            Ok(p) => p,
            Err(e) => {
                for &n in &config.n_grid {
                    records.push(CaseRecord::error(Claim::ProxySandwich, &f, n, &e));
                }
                continue;
            }
        };
        let mut hs_at = Vec::with_capacity(config.n_grid.len());
        for &n in &config.n_grid {
            let (hs, e_n) = match (hs_value(&p, n), en(&p, n, config.tolerances.en_tolerance)) {
                (Ok(h), Ok(e)) => (h, e.value),
                (Err(e), _) | (_, Err(e)) => {
                    records.push(CaseRecord::error(Claim::ProxySandwich, &f, n, e));
                    continue;
                }
            };
            hs_at.push((n, hs));
            let ratio = e_n / hs;
            let detail = format!("E_n={e_n:.6} H^S={hs:.6}");
            let ln_n = (n as f64).ln();
            records.push(
                CaseRecord::at_least(Claim::ProxySandwich, &f, n, ratio, SANDWICH_C_LO / ln_n.sqrt(), 0.0)
                    .with_detail(detail.clone()),
            );
            records.push(CaseRecord::at_most(Claim::ProxySandwich, &f, n, ratio, SANDWICH_C_HI, 0.0).with_detail(detail));

            if p.support_size() <= PERTURB_SUPPORT_LIMIT {
                for t in 0..config.trials {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config, key, n, t));
                    records.push(lipschitz_probe(&f, &p, n, hs, &mut rng));
                }
            }
        }
        for (i, &(m, hs_m)) in hs_at.iter().enumerate() {
            if m < SCALING_MIN_M {
                continue;
            }
            for &(n, hs_n) in &hs_at[i + 1..] {
                let detail = format!("m={m} H^S_m={hs_m:.6}");
                records.push(CaseRecord::at_least(Claim::ProxyMonotone, &f, n, hs_n, hs_m, 0.0).with_detail(detail.clone()));
                // the scaling bound needs nested intervals
                if nesting_ratio(m, n).is_none() {
                    continue;
                }
                match hs_scale_upper(hs_m, m, n) {
                    Ok(upper) => {
                        records.push(CaseRecord::at_most(Claim::ProxyScaling, &f, n, hs_n, upper, 0.0).with_detail(detail))
                    }
                    Err(e) => records.push(CaseRecord::error(Claim::ProxyScaling, &f, n, e)),
                }
            }
        }
    }
    Ok(finish(config, started, records))
}

/// Even trials perturb in weighted Hamming distance, odd trials in `ℓ₁`;
/// the target distance is log-uniform in `[1/n, 1/2]`.
fn lipschitz_probe(f: &crate::family::FamilySpec, p: &DiscreteDistribution, n: u64, hs_p: f64, rng: &mut ChaCha8Rng) -> CaseRecord {
    let nf = n as f64;
    let hamming = rng.random_bool(0.5);
    let eps = (nf.ln() * rng.random::<f64>()).exp() / nf;
    let eps = eps.clamp(1.0 / nf, 0.5);
    let claim = if hamming { Claim::LipschitzHamming } else { Claim::LipschitzL1 };
    let q = if hamming {
        hamming_perturbation(p, eps, rng)
    } else {
        l1_perturbation(p, eps, rng)
    };
    let q = match q {
        Ok(q) => q,
        Err(e) => return CaseRecord::error(claim, f, n, e),
    };
    let hs_q = match hs_value(&q, n) {
        Ok(h) => h,
        Err(e) => return CaseRecord::error(claim, f, n, e),
    };
    if hamming {
        let d = weighted_hamming(p, &q).max(1.0 / nf);
        CaseRecord::at_most(claim, f, n, (hs_p - hs_q).abs(), LIPSCHITZ_HAMMING_C * (d * nf).sqrt(), 0.0)
            .with_detail(format!("h_W={d:.3e}"))
    } else {
        let d = l1_distance(p, &q);
        CaseRecord::at_most(claim, f, n, scaled_gap(hs_p, hs_q), LIPSCHITZ_L1_C * (d * nf).powf(2.0 / 3.0), 0.0)
            .with_detail(format!("l1={d:.3e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;
    use crate::family::FamilySpec;

    #[test]
    fn perturbations_respect_their_budget() {
        let p = DiscreteDistribution::from_probs(&[0.4, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for eps in [0.05, 0.2, 0.5] {
            let q = hamming_perturbation(&p, eps, &mut rng).unwrap();
            assert!(weighted_hamming(&p, &q) <= eps + 1e-12);
            let q = l1_perturbation(&p, eps, &mut rng).unwrap();
            assert!(l1_distance(&p, &q) <= eps + 1e-12);
        }
    }

    #[test]
    fn scaled_gap_examples() {
        assert_eq!(scaled_gap(2.0, 1.0), 0.0);
        assert_eq!(scaled_gap(4.0, 1.0), 1.0);
        assert!((scaled_gap(1.0, 6.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_small_grid() {
        let mut cfg = ExperimentConfig::default_for(Suite::Proxy);
        cfg.families = vec![FamilySpec::Uniform { k: 100 }];
        cfg.n_grid = vec![32, 64, 1024];
        cfg.trials = 2;
        let r = run_proxy_suite(&cfg).unwrap();
        // 3·(2 sandwich + 2 probes) + 3 monotone pairs + scaling on (32, 1024) only
        assert_eq!(r.total, 16);
        assert!(r.records.iter().all(|x| x.relation != crate::report::Relation::Error));
        assert_eq!(r.records.iter().filter(|x| x.claim == Claim::ProxyScaling).count(), 1);
    }

    #[test]
    fn empty_grid_gives_empty_report() {
        let mut cfg = ExperimentConfig::default_for(Suite::Proxy);
        cfg.n_grid.clear();
        let r = run_proxy_suite(&cfg).unwrap();
        assert_eq!(r.total, 0);
    }
}
