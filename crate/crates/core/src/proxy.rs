//! The interval-partition shape proxy `H^S_n(p)` and the Poissonized
//! expected profile dimension `E_n(p)`.
//!
//! The unit interval is cut into `I_j = ((j−1)²·ln n/n, j²·ln n/n]` for
//! `j = 1..=⌈√(n/ln n)⌉`, and
//!
//! ```text
//! H^S_n(p) = Σ_j min{ #{x : p_x ∈ I_j}, j·ln n }
//! E_n(p)   = Σ_{i=1}^{n} (1 − Π_x (1 − Pr(Poi(n·p_x) = i)))
//! ```
//!
//! All logarithms are natural.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::error::{invalid, Error, Result};
use crate::numeric::{poisson_ln_pmf, CompensatedSum};

/// Largest `n` accepted by [`en`] (one accumulator slot per index).
pub const EN_MAX_N: u64 = 50_000_000;

/// Default window half-width, in Poisson standard deviations, for [`en`].
pub const EN_WINDOW_SIGMAS: f64 = 12.0;

/// Default truncation tolerance for [`en`].
pub const EN_DEFAULT_TOL: f64 = 1e-9;

/// Upper end `j²·ln n / n` of interval `I_j`.
///
/// Every boundary comparison and every construction that places a
/// probability on a boundary goes through this one expression.
pub fn interval_upper(j: u64, n: u64) -> f64 {
    let jf = j as f64;
    jf * jf * (n as f64).ln() / n as f64
}

/// Index of the topmost interval, `⌈√(n/ln n)⌉`.
pub fn j_max(n: u64) -> u64 {
    let nf = n as f64;
    ((nf / nf.ln()).sqrt().ceil() as u64).max(1)
}

/// The `j` with `p ∈ I_j`; boundary values belong to the lower interval.
pub fn interval_index(p: f64, n: u64) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("probability {p} must lie in (0, 1]")));
    }
    if n < 2 {
        return Err(invalid(format!("sample size {n} must be at least 2")));
    }
    let nf = n as f64;
    let guess = (p * nf / nf.ln()).sqrt().ceil();
    let top = j_max(n);
    let mut j = (guess as u64).clamp(1, top);
    while j > 1 && p <= interval_upper(j - 1, n) {
        j -= 1;
    }
    while j < top && p > interval_upper(j, n) {
        j += 1;
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsTerm {
    pub j: u64,
    /// Number of probabilities inside `I_j`.
    pub count: u64,
    /// `j·ln n`.
    pub cap: f64,
    pub term: f64,
}

/// Per-interval decomposition of `H^S_n(p)`; only populated intervals are listed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsReport {
    pub n: u64,
    pub j_max: u64,
    pub terms: Vec<HsTerm>,
    pub total: f64,
    /// Set for `n < 3`, where `ln n ≤ 1` and the partition is not meaningful.
    pub degenerate: bool,
}

pub fn hs(p: &DiscreteDistribution, n: u64) -> Result<HsReport> {
    if n < 2 {
        return Err(invalid(format!("sample size {n} must be at least 2")));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for r in p.runs() {
        if r.prob > 0.0 {
            *counts.entry(interval_index(r.prob, n)?).or_insert(0) += r.len;
        }
    }
    let ln_n = (n as f64).ln();
    let mut total = CompensatedSum::new();
    let terms = counts
        .into_iter()
        .map(|(j, count)| {
            let cap = j as f64 * ln_n;
            let term = (count as f64).min(cap);
            total.add(term);
            HsTerm { j, count, cap, term }
        })
        .collect();
    Ok(HsReport {
        n,
        j_max: j_max(n),
        terms,
        total: total.value(),
        degenerate: n < 3,
    })
}

/// Shorthand for `hs(p, n)?.total`.
pub fn hs_value(p: &DiscreteDistribution, n: u64) -> Result<f64> {
    Ok(hs(p, n)?.total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnReport {
    pub n: u64,
    pub value: f64,
    /// Upper bound on the mass discarded by windowing.
    pub truncation_error_bound: f64,
    /// Half-width of the retained window around each `n·p_x`, in `√(n·p_x + 1)` units.
    pub window_sigmas: f64,
    /// Smallest and largest index `i` that received any contribution.
    pub index_range: (u64, u64),
}

struct EnPass {
    value: f64,
    truncation: f64,
    lo: u64,
    hi: u64,
}

fn en_pass(p: &DiscreteDistribution, n: u64, sigmas: f64) -> EnPass {
    let nf = n as f64;
    let mut acc = vec![0.0f64; n as usize + 1];
    let mut truncation = CompensatedSum::new();
    let (mut lo_min, mut hi_max) = (u64::MAX, 0u64);
    for r in p.runs() {
        if r.prob <= 0.0 {
            continue;
        }
        let count = r.len as f64;
        let lambda = nf * r.prob;
        let half = sigmas * (lambda + 1.0).sqrt();
        let lo = ((lambda - half).floor().max(1.0) as u64).min(n);
        let hi = ((lambda + half).ceil() as u64).clamp(lo, n);
        lo_min = lo_min.min(lo);
        hi_max = hi_max.max(hi);
        let ln_lambda = lambda.ln();
        let mut lp = poisson_ln_pmf(lambda, lo);
        for i in lo..=hi {
            if i > lo {
                if (i - lo).is_multiple_of(256) {
                    lp = poisson_ln_pmf(lambda, i);
                } else {
                    lp += ln_lambda - (i as f64).ln();
                }
            }
            let a = lp.exp();
            if a > 0.0 {
                acc[i as usize] += count * (-a).ln_1p();
            }
        }
        // upper tail: pmf decays at least geometrically with ratio λ/(hi+2)
        if hi < n {
            let ratio = lambda / (hi as f64 + 2.0);
            truncation.add(count * poisson_ln_pmf(lambda, hi + 1).exp() / (1.0 - ratio));
        }
        // lower tail: pmf increases up to the mode, so Σ_{i<lo} ≤ (lo−1)·pmf(lo−1)
        if lo > 1 {
            truncation.add(count * (lo - 1) as f64 * poisson_ln_pmf(lambda, lo - 1).exp());
        }
    }
    let mut value = CompensatedSum::new();
    for &s in &acc[1..] {
        if s != 0.0 {
            value.add(-s.exp_m1());
        }
    }
    EnPass {
        value: value.value(),
        truncation: truncation.value(),
        lo: if lo_min == u64::MAX { 0 } else { lo_min },
        hi: hi_max,
    }
}

/// `E_n(p)` with a certified truncation bound at most `tol`.
///
/// The window starts at [`EN_WINDOW_SIGMAS`] and doubles (up to 8×) until
/// the discarded Poisson mass is below `tol`.
pub fn en(p: &DiscreteDistribution, n: u64, tol: f64) -> Result<EnReport> {
    if n == 0 {
        return Err(invalid("E_n needs n ≥ 1"));
    }
    if n > EN_MAX_N {
        return Err(Error::SizeGuard {
            what: "n for E_n",
            actual: n as u128,
            limit: EN_MAX_N as u128,
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance {tol} must be positive")));
    }
    let mut sigmas = EN_WINDOW_SIGMAS;
    loop {
        let pass = en_pass(p, n, sigmas);
        let resolution = f64::EPSILON * pass.value.max(1.0);
        if tol < resolution {
            return Err(Error::Tolerance {
                requested: tol,
                achievable: resolution,
            });
        }
        if pass.truncation <= tol {
            return Ok(EnReport {
                n,
                value: pass.value,
                truncation_error_bound: pass.truncation,
                window_sigmas: sigmas,
                index_range: (pass.lo, pass.hi),
            });
        }
        if sigmas >= 8.0 * EN_WINDOW_SIGMAS {
            return Err(Error::Tolerance {
                requested: tol,
                achievable: pass.truncation,
            });
        }
        sigmas *= 2.0;
    }
}

/// `√((n ln n)/(m ln m))·hs_m`, an upper predictor for `H^S_n` from `H^S_m`.
pub fn hs_scale_upper(hs_m: f64, m: u64, n: u64) -> Result<f64> {
    if m < 16 || n < m {
        return Err(invalid(format!("need n ≥ m ≥ 16 (got m={m}, n={n})")));
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(((nf * nf.ln()) / (mf * mf.ln())).sqrt() * hs_m)
}

/// `r = √((n/m)·(ln m/ln n))` when it is an integer, i.e. when every interval
/// at `m` is the union of `r` consecutive intervals at `n`.
pub fn nesting_ratio(m: u64, n: u64) -> Option<u64> {
    if m < 2 || n < m {
        return None;
    }
    let (mf, nf) = (m as f64, n as f64);
    let r = ((nf / mf) * (mf.ln() / nf.ln())).sqrt();
    let rounded = r.round();
    ((r - rounded).abs() <= 1e-9 * rounded).then_some(rounded as u64)
}

/// `U_n^k(α)` for the power-law bound; `k = None` is an infinite support.
pub fn power_law_u(alpha: f64, k: Option<u64>, n: u64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("power {alpha} must be ≥ 0")));
    }
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    // 1/ln k, with k = ∞ giving 0 and k = 1 giving +∞
    let inv_ln_k = match k {
        None => 0.0,
        Some(0) => return Err(invalid("support size must be positive")),
        Some(1) => f64::INFINITY,
        Some(k) => 1.0 / (k as f64).ln(),
    };
    if alpha >= 1.0 + inv_ln_k {
        Ok(nf.powf(1.0 / (1.0 + alpha)))
    } else if alpha >= 1.0 {
        Ok((nf / ln_n).powf(1.0 / (1.0 + alpha)))
    } else {
        let Some(k) = k else {
            return Err(invalid(format!(
                "power {alpha} < 1 requires a finite support"
            )));
        };
        let kf = k as f64;
        let root = nf.sqrt();
        Ok(root * (kf / root).min((root / kf).powf((1.0 - alpha) / (1.0 + alpha))))
    }
}

/// `7 ln n + e²·min{k, U_n^k(α)}`.
pub fn power_law_bound(alpha: f64, k: Option<u64>, n: u64) -> Result<f64> {
    let u = power_law_u(alpha, k, n)?;
    let capped = match k {
        Some(k) => u.min(k as f64),
        None => u,
    };
    Ok(7.0 * (n as f64).ln() + std::f64::consts::E.powi(2) * capped)
}

/// A bound of the form `O(ln n)·shape_factor` with an unspecified constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeBound {
    pub shape_factor: f64,
    pub log_factor: f64,
}

/// `(1 + min{σ, n/σ})` and `ln n` for log-concave distributions of standard deviation `σ`.
pub fn log_concave_bound(sigma: f64, n: u64) -> Result<ShapeBound> {
    if !(sigma >= 0.0 && sigma.is_finite()) || n < 2 {
        return Err(invalid("need σ ≥ 0 and n ≥ 2"));
    }
    let nf = n as f64;
    let ratio = if sigma == 0.0 { f64::INFINITY } else { nf / sigma };
    Ok(ShapeBound {
        shape_factor: 1.0 + sigma.min(ratio),
        log_factor: nf.ln(),
    })
}

/// `(1 + min{Σσ_i, max_i n/σ_i})` and `ln n` for mixtures of log-concave components.
pub fn mixture_bound(sigmas: &[f64], n: u64) -> Result<ShapeBound> {
    if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) || n < 2 {
        return Err(invalid("need at least one σ > 0 and n ≥ 2"));
    }
    let nf = n as f64;
    let sum: f64 = sigmas.iter().sum();
    let widest = sigmas.iter().map(|s| nf / s).fold(0.0, f64::max);
    Ok(ShapeBound {
        shape_factor: 1.0 + sum.min(widest),
        log_factor: nf.ln(),
    })
}

/// `min{(n t²)^{1/3}, √n}` for `t`-histograms.
pub fn histogram_bound(t: u64, n: u64) -> Result<f64> {
    if t == 0 || n == 0 {
        return Err(invalid("need t ≥ 1 and n ≥ 1"));
    }
    let nf = n as f64;
    Ok((nf * (t as f64).powi(2)).cbrt().min(nf.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{make_power_law, make_uniform, PowerLawSupport};

    #[test]
    fn interval_index_examples() {
        // ln 100 / 100 ≈ 0.04605, 4·ln 100 / 100 ≈ 0.18421
        assert_eq!(interval_index(0.1, 100).unwrap(), 2);
        assert_eq!(interval_index(1e-300, 100).unwrap(), 1);
        assert_eq!(interval_index(1.0, 100).unwrap(), j_max(100));
        assert!(interval_index(0.0, 100).is_err());
    }

    #[test]
    fn boundaries_go_low() {
        for n in [100u64, 1000, 12345, 1_000_000] {
            for j in 1..j_max(n) {
                let b = interval_upper(j, n);
                assert_eq!(interval_index(b, n).unwrap(), j, "n={n} j={j}");
                let above = f64::from_bits(b.to_bits() + 1);
                assert_eq!(interval_index(above, n).unwrap(), j + 1, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn hs_examples() {
        let point = DiscreteDistribution::point_mass();
        assert_eq!(hs_value(&point, 100).unwrap(), 1.0);
        let u10 = make_uniform(10).unwrap();
        assert!((hs_value(&u10, 100).unwrap() - 2.0 * 100f64.ln()).abs() < 1e-12);
        assert_eq!(hs_value(&make_uniform(3).unwrap(), 100).unwrap(), 3.0);
        assert!(hs(&u10, 2).unwrap().degenerate);
        assert!(hs(&u10, 1).is_err());
    }

    #[test]
    fn hs_report_structure() {
        let p = make_power_law(1.0, PowerLawSupport::Finite(500)).unwrap();
        let r = hs(&p, 10_000).unwrap();
        let counted: u64 = r.terms.iter().map(|t| t.count).sum();
        assert_eq!(counted, 500);
        assert!(r.terms.iter().all(|t| t.j >= 1 && t.j <= r.j_max));
        let s: f64 = r.terms.iter().map(|t| t.term).sum();
        assert!((s - r.total).abs() < 1e-9);
    }

    #[test]
    fn en_point_mass() {
        let point = DiscreteDistribution::point_mass();
        let r = en(&point, 1, 1e-12).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-15);
        // one factor: Pr(1 ≤ Poi(n) ≤ n)
        let n = 50u64;
        let direct: f64 = (1..=n).map(|i| poisson_ln_pmf(n as f64, i).exp()).sum();
        let r = en(&point, n, 1e-12).unwrap();
        assert!((r.value - direct).abs() < 1e-12);
        assert!(r.truncation_error_bound <= 1e-12);
    }

    #[test]
    fn en_brute_force_small() {
        // full (unwindowed) product formula as the oracle
        let p = DiscreteDistribution::from_probs(&[0.5, 0.3, 0.2]).unwrap();
        for n in [5u64, 20, 80] {
            let probs = p.probs().unwrap();
            let brute: f64 = (1..=n)
                .map(|i| {
                    1.0 - probs
                        .iter()
                        .map(|&q| 1.0 - poisson_ln_pmf(n as f64 * q, i).exp())
                        .product::<f64>()
                })
                .sum();
            let r = en(&p, n, 1e-12).unwrap();
            assert!((r.value - brute).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn en_tolerance_errors() {
        let p = make_uniform(4).unwrap();
        assert!(en(&p, 100, 0.0).is_err());
        assert!(matches!(en(&p, 100, 1e-40), Err(Error::Tolerance { .. })));
    }

    #[test]
    fn scale_predictor() {
        assert_eq!(hs_scale_upper(5.0, 100, 100).unwrap(), 5.0);
        let f = hs_scale_upper(1.0, 100, 400).unwrap();
        assert!((f - 2.281).abs() < 1e-3, "{f}");
        assert!(hs_scale_upper(1.0, 10, 400).is_err());
        assert_eq!(nesting_ratio(32, 1024), Some(4));
        assert_eq!(nesting_ratio(128, 1 << 14), Some(8));
        assert_eq!(nesting_ratio(500, 500), Some(1));
        assert_eq!(nesting_ratio(1_000, 10_000), None);
    }

    #[test]
    fn power_law_branches() {
        let n = 1_000_000u64;
        let nf = n as f64;
        assert!((power_law_u(2.0, None, n).unwrap() - nf.cbrt()).abs() < 1e-9);
        for k in [10u64, 1000, 100_000] {
            let u = power_law_u(0.0, Some(k), n).unwrap();
            let want = (k as f64).min(nf / k as f64);
            assert!((u - want).abs() < 1e-9 * want, "k={k}");
        }
        // 1 ≤ α < 1 + 1/ln k
        let k = 1000u64;
        let u = power_law_u(1.1, Some(k), n).unwrap();
        assert!((u - (nf / nf.ln()).powf(1.0 / 2.1)).abs() < 1e-9);
        assert!(power_law_u(0.5, None, n).is_err());
    }

    #[test]
    fn shape_bounds() {
        let n = 10_000u64;
        let b = log_concave_bound(100.0, n).unwrap();
        assert_eq!(b.shape_factor, 101.0);
        assert!((log_concave_bound(1e-9, n).unwrap().shape_factor - 1.0).abs() < 1e-8);
        let single = mixture_bound(&[30.0], n).unwrap();
        assert_eq!(single.shape_factor, log_concave_bound(30.0, n).unwrap().shape_factor);
        let two = mixture_bound(&[30.0, 30.0], n).unwrap();
        assert_eq!(two.shape_factor, 1.0 + 60.0f64.min(n as f64 / 30.0));
        assert!((histogram_bound(1, 1_000_000).unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(histogram_bound(100, 10_000).unwrap(), 100.0);
    }
}
