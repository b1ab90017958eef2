//! Sweep that fixed the constants in `profilekit_cli::pinned`.
//!
//! Prints the observed extreme of each normalized quantity. The pinned
//! values are these extremes rounded outward; rerunning this is a way to
//! audit them, not to retune them.
//!
//! ```text
//! cargo run --release -p profilekit-cli --example derive_constants
//! ```

use profilekit::dist::{adversarial_index_range, excess_loss_adversarial_instance, moments, Sampler};
use profilekit::estimate::{class_masses, SampleCounts};
use profilekit::dist::{l1_distance, weighted_hamming};
use profilekit::proxy::{en, histogram_bound, hs_value, log_concave_bound, mixture_bound, EN_DEFAULT_TOL};
use profilekit_cli::corpus::corpus;
use profilekit_cli::suites::{adversarial_dimension, hamming_perturbation, histogram_lower_target, l1_perturbation, scaled_gap, ESTIMATORS};
use profilekit_cli::FamilySpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let families = corpus();
    let built: Vec<_> = families.iter().map(|f| f.build()).collect::<Result<_, _>>()?;

    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (f, p) in families.iter().zip(&built) {
        for n in [1_000u64, 10_000, 100_000] {
            let r = en(p, n, EN_DEFAULT_TOL)?.value / hs_value(p, n)?;
            let scaled = r * (n as f64).ln().sqrt();
            if scaled < lo {
                lo = scaled;
                println!("  sandwich low  {scaled:.4} at {f} n={n}");
            }
            if r > hi {
                hi = r;
                println!("  sandwich high {r:.4} at {f} n={n}");
            }
        }
    }
    println!("sandwich: min ratio·√ln n = {lo:.5}, max ratio = {hi:.5}");

    let mut gauss: f64 = 0.0;
    for sigma in [10.0, 100.0, 1_000.0, 10_000.0] {
        let n = 1_000_000u64;
        let p = FamilySpec::Gaussian { mean: 0.0, sigma }.build()?;
        let ln_n = (n as f64).ln();
        let r = hs_value(&p, n)? / log_concave_bound(sigma, n)?.shape_factor;
        gauss = gauss.max(r / ln_n).max(1.0 / (r * ln_n));
        println!("  gaussian σ={sigma}: H^S/(1+min) = {r:.4}");
    }
    let (mut lc, mut mix, mut hup, mut hlow) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for (f, p) in families.iter().zip(&built) {
        for n in [10_000u64, 1_000_000] {
            let hs = hs_value(p, n)?;
            let ln_n = (n as f64).ln();
            if f.continuous_sigma().is_some() {
                let sigma = moments(p).1.sqrt();
                lc = lc.max(hs / (ln_n * log_concave_bound(sigma, n)?.shape_factor));
                if let FamilySpec::Gaussian { sigma, .. } = f {
                    let r = hs / log_concave_bound(*sigma, n)?.shape_factor;
                    gauss = gauss.max(r / ln_n).max(1.0 / (r * ln_n));
                }
            }
            if let Some(s) = f.mixture_sigmas() {
                mix = mix.max(hs / (ln_n * mixture_bound(&s, n)?.shape_factor));
            }
            if matches!(f, FamilySpec::Uniform { .. } | FamilySpec::Histogram { .. }) {
                let t = profilekit_cli::suites::distinct_values(p);
                hup = hup.max(hs / (ln_n * histogram_bound(t, n)?));
            }
            if let FamilySpec::HistogramInstance { t, n: own } = f {
                if *own == n {
                    let r = hs / histogram_lower_target(*t, n);
                    println!("  histogram instance t={t} n={n}: H^S/target = {r:.4}");
                    hlow = hlow.min(r);
                }
            }
        }
    }
    println!("gaussian C = {gauss:.4}");
    println!("log-concave C = {lc:.4}, mixture C = {mix:.4}, histogram upper C = {hup:.4}, histogram lower c = {hlow:.4}");

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut ham, mut l1) = (0.0f64, 0.0f64);
    for p in built.iter().filter(|p| p.support_size() <= 100_000) {
        for n in [1_000u64, 10_000, 100_000] {
            let nf = n as f64;
            let hs_p = hs_value(p, n)?;
            for _ in 0..16 {
                let eps = ((nf.ln() * rng.random::<f64>()).exp() / nf).clamp(1.0 / nf, 0.5);
                let q = hamming_perturbation(p, eps, &mut rng)?;
                let d = weighted_hamming(p, &q).max(1.0 / nf);
                ham = ham.max((hs_p - hs_value(&q, n)?).abs() / (d * nf).sqrt());
                let q = l1_perturbation(p, eps, &mut rng)?;
                let d = l1_distance(p, &q);
                l1 = l1.max(scaled_gap(hs_p, hs_value(&q, n)?) / (d * nf).powf(2.0 / 3.0));
            }
        }
    }
    println!("lipschitz: hamming C = {ham:.4}, l1 C = {l1:.4}");

    for n in [10_000u64, 100_000, 1_000_000] {
        let d = adversarial_dimension(n).expect("feasible");
        let flips = adversarial_index_range(d, n)?.count();
        let mut sums = vec![0.0; ESTIMATORS.len() - 1];
        let trials = 100;
        for _ in 0..trials {
            let coins: Vec<bool> = (0..flips).map(|_| rng.random_bool(0.5)).collect();
            let p = excess_loss_adversarial_instance(d, n, &coins)?;
            let counts = SampleCounts::from_labels(&Sampler::new(&p, rng.random()).sample(n));
            let cm = class_masses(&p, &counts)?;
            let best = cm.oracle().1;
            for (s, e) in sums.iter_mut().zip(&ESTIMATORS[1..]) {
                *s += cm.kl(&e.fit(&counts.profile(), Some(cm.alphabet))?) - best;
            }
        }
        let scaled: Vec<String> = sums
            .iter()
            .zip(&ESTIMATORS[1..])
            .map(|(s, e)| format!("{}={:.4}", e.name(), s / trials as f64 * n as f64 / d as f64))
            .collect();
        println!("adversarial n={n} D={d}: mean excess·n/D {}", scaled.join(" "));
    }
    Ok(())
}
