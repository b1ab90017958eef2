use std::time::Instant;

use profilekit::dist::{adversarial_index_range, excess_loss_adversarial_instance, make_histogram, make_uniform, Sampler};
use profilekit::estimate::{
    class_masses, collision_statistic, collision_tester, entropy_decomposition_check, local_extremum_check, Estimator,
    SampleCounts,
};
use profilekit::{profile_of, DiscreteDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{families_or, family_key, finish, frequency_se, trial_seed, SampleMoments};
use crate::config::ExperimentConfig;
use crate::family::FamilySpec;
use crate::pinned::{ADVERSARIAL_C, ROC_SAMPLE_FACTOR};
use crate::report::{CaseRecord, Claim, SuiteReport};

pub const ESTIMATORS: [Estimator; 5] = [
    Estimator::Empirical,
    Estimator::GoodTuring,
    Estimator::Dirichlet { beta: 0.5 },
    Estimator::Dirichlet { beta: 1.0 },
    Estimator::JamesStein,
];

/// Alphabet and distance of the uniformity-testing ROC.
pub const ROC_ALPHABET: u64 = 100;
pub const ROC_EPSILON: f64 = 0.5;

/// Agreement rate the local-extremum probe must reach.
pub const LOCAL_EXTREMUM_AGREEMENT: f64 = 0.95;

pub fn default_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::Uniform { k: 1_000 },
        FamilySpec::PowerLaw {
            alpha: 1.0,
            k: Some(1_000),
        },
        FamilySpec::PowerLaw {
            alpha: 2.0,
            k: Some(1_000),
        },
        FamilySpec::Gaussian { mean: 0.0, sigma: 30.0 },
        FamilySpec::Histogram {
            sizes: vec![10, 100, 1_000],
            masses: vec![0.5, 0.3, 0.2],
        },
    ]
}

/// Uniform on the first half of `0..k` at `(1+ε)/k`, the second half at `(1−ε)/k`.
pub fn far_from_uniform(k: u64, eps: f64) -> profilekit::Result<DiscreteDistribution> {
    let half = k / 2;
    make_histogram(&[half, k - half], &[half as f64 * (1.0 + eps) / k as f64, (k - half) as f64 * (1.0 - eps) / k as f64])
}

/// Outcome of one sampled instance against every estimator.
struct TrialLosses {
    dn_over_n: f64,
    /// `KL(p, q) − KL(p, oracle)` per estimator.
    excess: Vec<f64>,
    violations: usize,
    residual: Option<f64>,
}

fn trial_losses(p: &DiscreteDistribution, n: u64, seed: u64, slack: f64) -> profilekit::Result<TrialLosses> {
    let sample = Sampler::new(p, seed).sample(n);
    let counts = SampleCounts::from_labels(&sample);
    let cm = class_masses(p, &counts)?;
    let (_, best) = cm.oracle();
    let profile = counts.profile();
    let mut excess = Vec::with_capacity(ESTIMATORS.len());
    let mut violations = 0;
    for est in ESTIMATORS {
        let kl = cm.kl(&est.fit(&profile, Some(cm.alphabet))?);
        if kl < best - slack {
            violations += 1;
        }
        excess.push(kl - best);
    }
    let residual = if p.support_size() <= 100_000 {
        let q = Estimator::Dirichlet { beta: 0.5 }.fit(&profile, Some(cm.alphabet))?;
        Some(entropy_decomposition_check(p, &q.materialize(&counts, p)?)?.abs())
    } else {
        None
    };
    Ok(TrialLosses {
        dn_over_n: profile.dimension() as f64 / n as f64,
        excess,
        violations,
        residual,
    })
}

/// Oracle dominance and excess-loss curves, adversarial instances, the
/// collision identity, the uniformity ROC and the local-extremum probe.
pub fn run_inference_suite(config: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let z = config.tolerances.standard_errors;
    let slack = config.tolerances.kl_slack;
    let mut records = Vec::new();
    for f in families_or(config, default_families) {
        let key = family_key(&f);
        let p = match f.build() {
            Ok(p) => p,
            Err(e) => {
                for &n in &config.n_grid {
                    records.push(CaseRecord::error(Claim::OracleDominance, &f, n, &e));
                }
                continue;
            }
        };
        for &n in &config.n_grid {
            let trials: profilekit::Result<Vec<TrialLosses>> = (0..config.trials)
                .into_par_iter()
                .map(|t| trial_losses(&p, n, trial_seed(config, key, n, t), slack))
                .collect();
            let trials = match trials {
                Ok(t) => t,
                Err(e) => {
                    records.push(CaseRecord::error(Claim::OracleDominance, &f, n, e));
                    continue;
                }
            };
            let violations: usize = trials.iter().map(|t| t.violations).sum();
            records.push(
                CaseRecord::at_most(Claim::OracleDominance, &f, n, violations as f64, 0.0, 0.0)
                    .with_detail(format!("comparisons={}", trials.len() * ESTIMATORS.len())),
            );
            let residual = trials.iter().filter_map(|t| t.residual).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
            if let Some(r) = residual {
                records.push(CaseRecord::at_most(Claim::EntropyDecomposition, &f, n, r, 1e-10, 0.0));
            }
            let dn = trials.iter().map(|t| t.dn_over_n).sum::<f64>() / trials.len() as f64;
            for (i, est) in ESTIMATORS.iter().enumerate() {
                let finite: Vec<f64> = trials.iter().map(|t| t.excess[i]).filter(|x| x.is_finite()).collect();
                let infinite = trials.len() - finite.len();
                let mean = if finite.is_empty() { 0.0 } else { finite.iter().sum::<f64>() / finite.len() as f64 };
                records.push(
                    CaseRecord::at_least(Claim::ExcessLossCurve, &f, n, mean, 0.0, slack).with_detail(format!(
                        "estimator={} mean_D_n/n={dn:.6} infinite={infinite}",
                        est.name()
                    )),
                );
            }
        }
    }
    for &n in &config.n_grid {
        adversarial(config, n, &mut records);
        collision_mean(config, n, z, &mut records);
        roc(config, n, z, &mut records);
    }
    if !config.n_grid.is_empty() {
        records.push(local_extremum(config));
    }
    Ok(finish(config, started, records))
}

/// Largest target dimension `⌈s² ln n⌉` whose groups `s..=2s`, all flipped,
/// carry at most 0.9 of the mass; `None` when even `s = 1` does not fit.
pub fn adversarial_dimension(n: u64) -> Option<u64> {
    let nf = n as f64;
    let ln_n = nf.ln();
    let mass = |s: u64| -> f64 {
        (s..=2 * s)
            .map(|i| {
                let fi = i as f64;
                (fi * ln_n).floor() * (fi * fi * ln_n * ln_n + fi * ln_n) / nf
            })
            .sum()
    };
    let mut s = 0;
    while mass(s + 1) <= 0.9 {
        s += 1;
    }
    (s > 0).then(|| ((s * s) as f64 * ln_n).ceil() as u64)
}

fn adversarial(config: &ExperimentConfig, n: u64, out: &mut Vec<CaseRecord>) {
    let Some(d) = adversarial_dimension(n) else {
        return;
    };
    let label = format!("adversarial:D={d}");
    let Ok(range) = adversarial_index_range(d, n) else {
        return;
    };
    let flips = (range.end() - range.start() + 1) as usize;
    let key = 0xad5e_5a41;
    let per_trial: profilekit::Result<Vec<Vec<f64>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config, key, n, t));
            let coins: Vec<bool> = (0..flips).map(|_| rng.random_bool(0.5)).collect();
            let p = excess_loss_adversarial_instance(d, n, &coins)?;
            let sample = Sampler::new(&p, rng.random()).sample(n);
            let counts = SampleCounts::from_labels(&sample);
            let cm = class_masses(&p, &counts)?;
            let (_, best) = cm.oracle();
            ESTIMATORS[1..]
                .iter()
                .map(|e| Ok(cm.kl(&e.fit(&counts.profile(), Some(cm.alphabet))?) - best))
                .collect()
        })
        .collect();
    let per_trial = match per_trial {
        Ok(v) => v,
        Err(e) => {
            out.push(CaseRecord::error(Claim::AdversarialExcess, &label, n, e));
            return;
        }
    };
    let bound = ADVERSARIAL_C * d as f64 / n as f64;
    for (i, est) in ESTIMATORS[1..].iter().enumerate() {
        let mean = per_trial.iter().map(|v| v[i]).sum::<f64>() / per_trial.len() as f64;
        out.push(
            CaseRecord::at_least(Claim::AdversarialExcess, &label, n, mean, bound, 0.0)
                .with_detail(format!("estimator={} D/n={:.6e}", est.name(), d as f64 / n as f64)),
        );
    }
}

fn collision_mean(config: &ExperimentConfig, n: u64, z: f64, out: &mut Vec<CaseRecord>) {
    for f in [
        FamilySpec::Uniform { k: 50 },
        FamilySpec::PowerLaw { alpha: 1.0, k: Some(50) },
    ] {
        let p = f.build().expect("fixed family");
        let k = p.support_size();
        let key = family_key(&f) ^ 0xc011;
        let ts: Vec<f64> = (0..config.trials)
            .into_par_iter()
            .map(|t| collision_statistic(&profile_of(Sampler::new(&p, trial_seed(config, key, n, t)).sample(n)), k))
            .collect::<profilekit::Result<_>>()
            .unwrap_or_default();
        if ts.is_empty() {
            out.push(CaseRecord::error(Claim::CollisionMean, &f, n, "collision statistic needs n ≥ 2"));
            continue;
        }
        let m = SampleMoments::of(&ts);
        let target = k as f64 * p.collision_probability();
        out.push(CaseRecord::within(Claim::CollisionMean, &f, n, m.mean, target, z * m.se_mean));
    }
}

fn roc(config: &ExperimentConfig, n: u64, z: f64, out: &mut Vec<CaseRecord>) {
    let k = ROC_ALPHABET;
    let null = make_uniform(k).expect("k ≥ 1");
    let alt = far_from_uniform(k, ROC_EPSILON).expect("valid histogram");
    let rate = |p: &DiscreteDistribution, key: u64| -> f64 {
        let rejects = (0..config.trials)
            .into_par_iter()
            .filter(|&t| {
                let f = profile_of(Sampler::new(p, trial_seed(config, key, n, t)).sample(n));
                collision_tester(&f, k, ROC_EPSILON).map(|o| o.reject).unwrap_or(false)
            })
            .count();
        rejects as f64 / config.trials as f64
    };
    let trials = config.trials as usize;
    let label = format!("uniform:{k}");
    out.push(
        CaseRecord::at_most(Claim::UniformityRoc, &label, n, rate(&null, 0x0), 1.0 / 3.0, z * frequency_se(1.0 / 3.0, trials))
            .with_detail("null"),
    );
    let needed = ROC_SAMPLE_FACTOR * (k as f64).sqrt() / (ROC_EPSILON * ROC_EPSILON);
    let power = rate(&alt, 0x1);
    let bound = if n as f64 >= needed { 2.0 / 3.0 } else { 0.0 };
    out.push(
        CaseRecord::at_least(Claim::UniformityRoc, format!("far:{k}:{ROC_EPSILON}"), n, power, bound, z * frequency_se(bound, trials))
            .with_detail(format!("alternative, separation expected from n={needed:.0}")),
    );
}

fn local_extremum(config: &ExperimentConfig) -> CaseRecord {
    let key = 0x10ca1;
    let results: Vec<Option<(bool, bool)>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(config, key, 0, t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(2..=5u64);
            let n = rng.random_range(2..=8u64);
            let f = profile_of(Sampler::new(&make_uniform(k).ok()?, rng.random()).sample(n));
            let r = local_extremum_check(&f, k, seed).ok()?;
            Some((r.tie, r.agrees))
        })
        .collect();
    let probed: Vec<(bool, bool)> = results.into_iter().flatten().collect();
    // T = 1 carries no prediction
    let decided: Vec<bool> = probed.iter().filter(|r| !r.0).map(|r| r.1).collect();
    let ties = probed.len() - decided.len();
    let agree = decided.iter().filter(|&&a| a).count();
    let rate = if decided.is_empty() { 1.0 } else { agree as f64 / decided.len() as f64 };
    CaseRecord::at_least(Claim::LocalExtremum, "uniform:2..5", 8, rate, LOCAL_EXTREMUM_AGREEMENT, 0.0)
        .with_detail(format!("profiles={} ties={ties}", decided.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    #[test]
    fn far_distribution_distance() {
        let p = far_from_uniform(100, 0.5).unwrap();
        let u = make_uniform(100).unwrap();
        assert!((profilekit::dist::l1_distance(&p, &u) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn adversarial_dimension_is_feasible() {
        assert_eq!(adversarial_dimension(1_000), None);
        for n in [10_000u64, 100_000, 1_000_000] {
            let d = adversarial_dimension(n).unwrap();
            let range = adversarial_index_range(d, n).unwrap();
            let flips = vec![true; range.clone().count()];
            excess_loss_adversarial_instance(d, n, &flips).unwrap();
        }
    }

    #[test]
    fn small_run_is_deterministic() {
        let mut cfg = ExperimentConfig::default_for(Suite::Inference);
        cfg.families = vec![FamilySpec::Uniform { k: 20 }];
        cfg.n_grid = vec![50];
        cfg.trials = 10;
        let a = run_inference_suite(&cfg).unwrap();
        let b = run_inference_suite(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records[0].claim, Claim::OracleDominance);
        assert_eq!(a.records[0].statistic, 0.0);
    }
}
