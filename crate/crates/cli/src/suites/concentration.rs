use std::time::Instant;

use profilekit::proxy::en;

use super::{dimension_samples, families_or, family_key, finish, frequency_se, trial_seed, SampleMoments};
use crate::config::ExperimentConfig;
use crate::family::FamilySpec;
use crate::report::{CaseRecord, Claim, SuiteReport};

pub const TAIL_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn default_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::PointMass,
        FamilySpec::Uniform { k: 100 },
        FamilySpec::PowerLaw {
            alpha: 1.5,
            k: Some(1_000),
        },
        FamilySpec::Gaussian { mean: 0.0, sigma: 30.0 },
        FamilySpec::Exponential { rate: 0.1 },
    ]
}

/// Fraction of `xs` outside `[E/2 − 4 ln n, 2E + 3 ln n]`.
pub fn window_violation_rate(xs: &[f64], e_n: f64, n: u64) -> f64 {
    let ln_n = (n as f64).ln();
    let (lo, hi) = (e_n / 2.0 - 4.0 * ln_n, 2.0 * e_n + 3.0 * ln_n);
    xs.iter().filter(|&&d| d < lo || d > hi).count() as f64 / xs.len() as f64
}

/// Window frequency, variance and the two exponential tails of `D_n`.
pub fn run_concentration_suite(config: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let z = config.tolerances.standard_errors;
    let mut records = Vec::new();
    for f in families_or(config, default_families) {
        let key = family_key(&f);
        let p = match f.build() {
            Ok(p) => p,
            Err(e) => {
                for &n in &config.n_grid {
                    records.push(CaseRecord::error(Claim::ConcentrationWindow, &f, n, &e));
                }
                continue;
            }
        };
        for &n in &config.n_grid {
            let e_n = match en(&p, n, config.tolerances.en_tolerance) {
                Ok(r) => r.value,
                Err(e) => {
                    records.push(CaseRecord::error(Claim::ConcentrationWindow, &f, n, e));
                    continue;
                }
            };
            let seeds: Vec<u64> = (0..config.trials).map(|t| trial_seed(config, key, n, t)).collect();
            let d = dimension_samples(&p, n, &seeds);
            let trials = d.len();
            let nf = n as f64;

            let bound = (6.0 / nf.sqrt()).min(1.0);
            let rate = window_violation_rate(&d, e_n, n);
            records.push(
                CaseRecord::at_most(Claim::ConcentrationWindow, &f, n, rate, bound, z * frequency_se(bound, trials))
                    .with_detail(format!("E_n={e_n:.6}")),
            );

            let m = SampleMoments::of(&d);
            records.push(
                CaseRecord::at_most(Claim::DimensionVariance, &f, n, m.variance, m.mean, z * m.se_variance)
                    .with_detail(format!("mean={:.6} se_var={:.6}", m.mean, m.se_variance)),
            );

            for gamma in TAIL_GAMMAS {
                let upper = (3.0 * nf.sqrt() * (-gamma.min(gamma * gamma) * e_n / 3.0).exp()).min(1.0);
                let freq = d.iter().filter(|&&x| x >= (1.0 + gamma) * e_n).count() as f64 / trials as f64;
                records.push(
                    CaseRecord::at_most(Claim::UpperTail, &f, n, freq, upper, z * frequency_se(upper, trials))
                        .with_detail(format!("gamma={gamma}")),
                );
                if gamma < 1.0 {
                    let lower = (3.0 * nf.sqrt() * (-gamma * gamma * e_n / 2.0).exp()).min(1.0);
                    let freq = d.iter().filter(|&&x| x <= (1.0 - gamma) * e_n).count() as f64 / trials as f64;
                    records.push(
                        CaseRecord::at_most(Claim::LowerTail, &f, n, freq, lower, z * frequency_se(lower, trials))
                            .with_detail(format!("gamma={gamma}")),
                    );
                }
            }
        }
    }
    Ok(finish(config, started, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    #[test]
    fn point_mass_always_inside() {
        let mut cfg = ExperimentConfig::default_for(Suite::Concentration);
        cfg.families = vec![FamilySpec::PointMass];
        cfg.n_grid = vec![100];
        cfg.trials = 20;
        let r = run_concentration_suite(&cfg).unwrap();
        assert_eq!(r.passed, r.total);
        let window = &r.records[0];
        assert_eq!(window.claim, Claim::ConcentrationWindow);
        assert_eq!(window.statistic, 0.0);
    }

    #[test]
    fn violation_rate_counts_both_sides() {
        // n = e: window is [E/2 − 4, 2E + 3]
        let n = 3u64;
        let ln = 3f64.ln();
        let xs = [10.0 / 2.0 - 4.0 * ln - 0.1, 5.0, 2.0 * 10.0 + 3.0 * ln + 0.1, 20.0];
        assert_eq!(window_violation_rate(&xs, 10.0, n), 0.5);
    }
}
