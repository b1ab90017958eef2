//! The fixed 60-distribution corpus used by the proxy and family suites.

use crate::family::FamilySpec;

pub const CORPUS_SIZE: usize = 60;

fn gaussian(mean: f64, sigma: f64) -> FamilySpec {
    FamilySpec::Gaussian { mean, sigma }
}

/// Point mass, uniforms, finite and truncated power laws, discretized
/// continuous models, histograms, mixtures, lower-bound instances and two
/// small explicit vectors. Order is stable; suites key seeds on the index.
pub fn corpus() -> Vec<FamilySpec> {
    let mut c = vec![FamilySpec::PointMass];
    for k in [2, 10, 100, 1_000, 10_000, 100_000] {
        c.push(FamilySpec::Uniform { k });
    }
    for alpha in [0.3, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0] {
        for k in [100, 10_000] {
            c.push(FamilySpec::PowerLaw { alpha, k: Some(k) });
        }
    }
    for alpha in [1.5, 3.0, 4.0] {
        c.push(FamilySpec::PowerLaw { alpha, k: None });
    }
    for sigma in [0.5, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1_000.0] {
        c.push(gaussian(0.0, sigma));
    }
    for scale in [1.0, 10.0, 100.0] {
        c.push(FamilySpec::Laplace { mean: 0.0, scale });
    }
    for rate in [0.01, 0.1, 1.0] {
        c.push(FamilySpec::Exponential { rate });
    }
    let histograms: [(&[u64], &[f64]); 6] = [
        (&[1, 99], &[0.5, 0.5]),
        (&[10, 1_000], &[0.9, 0.1]),
        (&[5, 50, 500], &[0.5, 0.3, 0.2]),
        (&[1, 10, 100, 1_000, 10_000], &[0.2; 5]),
        (&[3, 30, 300, 3_000, 30_000], &[0.4, 0.3, 0.15, 0.1, 0.05]),
        (&[2, 4, 8, 16, 32, 64, 128, 256], &[0.125; 8]),
    ];
    for (sizes, masses) in histograms {
        c.push(FamilySpec::Histogram {
            sizes: sizes.to_vec(),
            masses: masses.to_vec(),
        });
    }
    let mixtures: [(&[(f64, f64)], &[f64]); 6] = [
        (&[(0.0, 1.0), (20.0, 1.0)], &[0.5, 0.5]),
        (&[(0.0, 3.0), (100.0, 30.0)], &[0.3, 0.7]),
        (&[(0.0, 10.0), (5.0, 100.0)], &[0.5, 0.5]),
        (&[(0.0, 1.0), (50.0, 5.0), (200.0, 25.0)], &[0.2, 0.3, 0.5]),
        (&[(0.0, 300.0), (2_000.0, 30.0)], &[0.9, 0.1]),
        (&[(0.0, 2.0), (10.0, 2.0), (20.0, 2.0), (30.0, 2.0)], &[0.25; 4]),
    ];
    for (parts, weights) in mixtures {
        c.push(FamilySpec::Mixture {
            components: parts.iter().map(|&(m, s)| gaussian(m, s)).collect(),
            weights: weights.to_vec(),
        });
    }
    for n in [10_000, 1_000_000] {
        for t in [1, 2, 8, 32] {
            c.push(FamilySpec::HistogramInstance { t, n });
        }
    }
    c.push(FamilySpec::Explicit { probs: vec![0.7, 0.3] });
    c.push(FamilySpec::Explicit {
        probs: vec![0.5, 0.3, 0.2],
    });
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_builds() {
        let c = corpus();
        assert_eq!(c.len(), CORPUS_SIZE);
        for f in &c {
            let p = f.build().unwrap_or_else(|e| panic!("{f}: {e}"));
            let mass: f64 = p.runs().iter().map(|r| r.prob * r.len as f64).sum();
            assert!((mass - 1.0).abs() < 1e-9, "{f}: {mass}");
        }
        let mut names: Vec<String> = c.iter().map(|f| f.to_string()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CORPUS_SIZE);
    }
}
