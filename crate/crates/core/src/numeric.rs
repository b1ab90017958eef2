//! Small numerical helpers shared across modules.

use statrs::function::gamma::ln_gamma;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// ln(k!) via log-gamma; exact summation below 32 keeps small cases tight.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 32 {
        (2..=k).map(|i| (i as f64).ln()).sum()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Table of ln(i!) for i in 0..=n.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    t.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        t.push(acc);
    }
    t
}

/// ln Pr(Poi(lambda) = i).
pub fn poisson_ln_pmf(lambda: f64, i: u64) -> f64 {
    if lambda == 0.0 {
        return if i == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -lambda + i as f64 * lambda.ln() - ln_factorial(i)
}

/// Binomial coefficient saturating at `u128::MAX`.
pub fn binomial_saturating(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by i + 1 at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed derived from a master seed and a path of indices.
///
/// Each component is folded in sequence, so appending cases or trials never
/// changes the seeds of existing ones.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |acc, &c| mix64(acc ^ mix64(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0e16, 1.0, -1.0e16];
        xs.extend(std::iter::repeat_n(1.0, 9));
        assert_eq!(compensated_sum(xs), 10.0);
    }

    #[test]
    fn ln_factorial_matches_table() {
        let t = ln_factorial_table(60);
        for k in 0..=60u64 {
            assert!((ln_factorial(k) - t[k as usize]).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_saturating(5, 2), 10);
        assert_eq!(binomial_saturating(10, 0), 1);
        assert_eq!(binomial_saturating(3, 4), 0);
        assert_eq!(binomial_saturating(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial_saturating(400, 200), u128::MAX);
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let s: f64 = (0..200).map(|i| poisson_ln_pmf(20.0, i).exp()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((poisson_ln_pmf(1.0, 1).exp() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a = derive_seed(7, &[1, 2, 3]);
        assert_eq!(a, derive_seed(7, &[1, 2, 3]));
        assert_ne!(a, derive_seed(7, &[1, 2, 4]));
        assert_ne!(a, derive_seed(8, &[1, 2, 3]));
    }
}
