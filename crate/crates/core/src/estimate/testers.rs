use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dist::{make_uniform, DiscreteDistribution};
use crate::error::{invalid, Error, Result};
use crate::oracle::profile_probability;
use crate::profile::Profile;

/// `T(φ) = |X|·(Σ_μ φ_μ μ² − n)/(n² − n)`.
pub fn collision_statistic(profile: &Profile, alphabet: u64) -> Result<f64> {
    let n = profile.len();
    if n < 2 {
        return Err(invalid("collision statistic needs n ≥ 2"));
    }
    let sq: u128 = profile
        .pairs()
        .iter()
        .map(|&(mu, phi)| phi as u128 * mu as u128 * mu as u128)
        .sum();
    let nf = n as f64;
    Ok(alphabet as f64 * (sq - n as u128) as f64 / (nf * nf - nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionOutcome {
    pub t: f64,
    pub threshold: f64,
    /// True rejects uniformity.
    pub reject: bool,
}

/// Rejects uniformity iff `T ≥ 1 + 3ε²/4`.
pub fn collision_tester(profile: &Profile, alphabet: u64, epsilon: f64) -> Result<CollisionOutcome> {
    let t = collision_statistic(profile, alphabet)?;
    let threshold = 1.0 + 3.0 * epsilon * epsilon / 4.0;
    Ok(CollisionOutcome {
        t,
        threshold,
        reject: t >= threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PmlTestBranch {
    MaxMultiplicity,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmlTestOutcome {
    pub reject: bool,
    pub branch: PmlTestBranch,
    /// `3·max{1, n/|X|}·ln|X|`.
    pub multiplicity_threshold: f64,
    /// `3ε/(4√|X|)`.
    pub distance_threshold: f64,
    /// `‖P_φ − u_X‖₂`, when the second branch ran.
    pub distance: Option<f64>,
}

/// Two-branch uniformity tester built on a profile maximum likelihood solver.
pub fn pml_uniformity_tester<F>(profile: &Profile, alphabet: u64, epsilon: f64, pml_solver: F) -> Result<PmlTestOutcome>
where
    F: FnOnce(&Profile) -> Result<DiscreteDistribution>,
{
    if alphabet < 2 {
        return Err(invalid("uniformity testing needs |X| ≥ 2"));
    }
    let n = profile.len() as f64;
    let k = alphabet as f64;
    let multiplicity_threshold = 3.0 * (n / k).max(1.0) * k.ln();
    let distance_threshold = 3.0 * epsilon / (4.0 * k.sqrt());
    if profile.max_multiplicity() as f64 >= multiplicity_threshold {
        return Ok(PmlTestOutcome {
            reject: true,
            branch: PmlTestBranch::MaxMultiplicity,
            multiplicity_threshold,
            distance_threshold,
            distance: None,
        });
    }
    let pml = pml_solver(profile)?;
    let mut probs = pml.probs()?;
    probs.sort_by(|a, b| b.total_cmp(a));
    let width = probs.len().max(alphabet as usize);
    let u = 1.0 / k;
    let distance = (0..width)
        .map(|i| {
            let a = probs.get(i).copied().unwrap_or(0.0);
            let b = if i < alphabet as usize { u } else { 0.0 };
            (a - b) * (a - b)
        })
        .sum::<f64>()
        .sqrt();
    Ok(PmlTestOutcome {
        reject: distance >= distance_threshold,
        branch: PmlTestBranch::Distance,
        multiplicity_threshold,
        distance_threshold,
        distance: Some(distance),
    })
}

/// Result of probing the profile likelihood around the uniform distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalExtremum {
    pub t: f64,
    /// `T = 1` exactly; the second-order term vanishes and `T` predicts nothing.
    pub tie: bool,
    /// `T > 1` predicts a local minimum at uniform.
    pub predicted_min: bool,
    /// Directions with positive (resp. negative) second difference.
    pub convex_directions: usize,
    pub concave_directions: usize,
    pub observed_min: bool,
    pub agrees: bool,
}

/// Probe directions and central-difference step.
pub const PROBE_DIRECTIONS: usize = 32;
pub const PROBE_STEP: f64 = 1e-4;

/// Signs `f(u + hv) + f(u − hv) − 2f(u)` for random zero-sum unit `v`, where
/// `f` is the probability of `profile` and `u` is uniform over `alphabet`.
pub fn local_extremum_check(profile: &Profile, alphabet: u64, seed: u64) -> Result<LocalExtremum> {
    if profile.dimension() == 1 && profile.distinct_symbols() == 1 {
        return Err(invalid("constant sequences are excluded"));
    }
    if alphabet < 2 || profile.distinct_symbols() > alphabet {
        return Err(invalid("alphabet must cover the observed symbols"));
    }
    let t = collision_statistic(profile, alphabet)?;
    let n = profile.len() as u128;
    let sq: u128 = profile.pairs().iter().map(|&(mu, phi)| phi as u128 * mu as u128 * mu as u128).sum();
    let tie = alphabet as u128 * (sq - n) == n * n - n;
    let k = alphabet as usize;
    let u = 1.0 / k as f64;
    let centre = profile_probability(&make_uniform(alphabet)?, profile)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut convex, mut concave) = (0, 0);
    for _ in 0..PROBE_DIRECTIONS {
        let mut v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let mean = v.iter().sum::<f64>() / k as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let at = |sign: f64| -> Result<f64> {
            let probs: Vec<f64> = v.iter().map(|x| u + sign * PROBE_STEP * x).collect();
            let total: f64 = probs.iter().sum();
            let probs: Vec<f64> = probs.iter().map(|x| x / total).collect();
            profile_probability(&DiscreteDistribution::from_probs(&probs)?, profile)
        };
        let second = at(1.0)? + at(-1.0)? - 2.0 * centre;
        if second > 0.0 {
            convex += 1;
        } else if second < 0.0 {
            concave += 1;
        }
    }
    let predicted_min = t > 1.0;
    let observed_min = convex > concave;
    Ok(LocalExtremum {
        t,
        tie,
        predicted_min,
        convex_directions: convex,
        concave_directions: concave,
        observed_min,
        agrees: predicted_min == observed_min,
    })
}

/// Lower median.
pub fn median_boost(estimates: &[f64]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::InvalidParameter("median of no estimates".into()));
    }
    let mut v = estimates.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v[(v.len() - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Sampler;
    use crate::oracle::{pml_brute, profile_distribution_exact};
    use crate::profile::profile_of;

    fn pf(n: u64, pairs: &[(u64, u64)]) -> Profile {
        Profile::from_pairs(n, pairs.to_vec()).unwrap()
    }

    #[test]
    fn collision_examples() {
        let distinct = pf(5, &[(1, 5)]);
        let o = collision_tester(&distinct, 10, 0.5).unwrap();
        assert_eq!(o.t, 0.0);
        assert!(!o.reject);
        assert_eq!(collision_statistic(&pf(2, &[(2, 1)]), 10).unwrap(), 10.0);
        assert!(collision_statistic(&pf(1, &[(1, 1)]), 10).is_err());
        assert_eq!(o.threshold, 1.0 + 3.0 * 0.25 / 4.0);
    }

    #[test]
    fn collision_mean_is_exact() {
        // E[T] = k·Σp², checked on the exact profile law
        for p in [
            make_uniform(4).unwrap(),
            DiscreteDistribution::from_probs(&[0.6, 0.2, 0.1, 0.1]).unwrap(),
        ] {
            let k = p.support_size();
            let d = profile_distribution_exact(&p, 8).unwrap();
            let mean: f64 = d
                .entries
                .iter()
                .map(|(f, q)| q * collision_statistic(f, k).unwrap())
                .sum();
            assert!((mean - k as f64 * p.collision_probability()).abs() < 1e-12);
        }
    }

    #[test]
    fn pml_tester_branches() {
        let point = pf(50, &[(50, 1)]);
        let o = pml_uniformity_tester(&point, 100, 0.5, |_| unreachable!()).unwrap();
        assert!(o.reject);
        assert_eq!(o.branch, PmlTestBranch::MaxMultiplicity);
        assert!((o.multiplicity_threshold - 3.0 * 100f64.ln()).abs() < 1e-12);

        let f = pf(4, &[(1, 4)]);
        let o = pml_uniformity_tester(&f, 4, 2.0, |f| Ok(pml_brute(f, 4, 1.0 / 40.0)?.distribution)).unwrap();
        assert_eq!(o.branch, PmlTestBranch::Distance);
        assert!((o.distance_threshold - 3.0 * 2.0 / 8.0).abs() < 1e-15);
        assert!(!o.reject);
    }

    #[test]
    fn local_extremum_probe() {
        let distinct = pf(4, &[(1, 4)]);
        let r = local_extremum_check(&distinct, 5, 1).unwrap();
        assert!(r.t < 1.0 && !r.observed_min && r.agrees, "{r:?}");
        let heavy = pf(6, &[(1, 1), (5, 1)]);
        let r = local_extremum_check(&heavy, 4, 1).unwrap();
        assert!(r.t > 1.0 && r.observed_min && r.agrees, "{r:?}");
        // every direction shares one sign
        assert!(r.convex_directions == PROBE_DIRECTIONS);
        assert!(local_extremum_check(&pf(3, &[(3, 1)]), 4, 1).is_err());
        // 3·(1 + 4 − 3)/(9 − 3) = 1
        let r = local_extremum_check(&pf(3, &[(1, 1), (2, 1)]), 3, 1).unwrap();
        assert!(r.tie && r.t == 1.0);
        assert!(!local_extremum_check(&heavy, 4, 1).unwrap().tie);
    }

    #[test]
    fn probe_agrees_on_random_profiles() {
        let p = make_uniform(5).unwrap();
        let mut s = Sampler::new(&p, 11);
        let mut checked = 0;
        for _ in 0..30 {
            let f = profile_of(s.sample(7));
            let Ok(r) = local_extremum_check(&f, 5, 3) else { continue };
            if !r.tie {
                assert!(r.agrees, "{f:?} {r:?}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_boost(&[3.5]).unwrap(), 3.5);
        assert_eq!(median_boost(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median_boost(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert!(median_boost(&[]).is_err());
    }

    #[test]
    fn median_boosting_reduces_failures() {
        // per-copy failure 0.1; t = 4⌈ln(1/β)/ln(1/0.2)⌉ copies
        let beta: f64 = 0.01;
        let t = 4 * ((1.0 / beta).ln() / 5f64.ln()).ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 20_000;
        let mut failures = 0;
        for _ in 0..trials {
            let est: Vec<f64> = (0..t)
                .map(|_| if rng.random::<f64>() < 0.1 { 10.0 } else { 0.0 })
                .collect();
            if median_boost(&est).unwrap() > 1.0 {
                failures += 1;
            }
        }
        let rate = failures as f64 / trials as f64;
        let se = (beta * (1.0 - beta) / trials as f64).sqrt();
        assert!(rate <= beta + 3.0 * se, "{rate}");
    }
}
