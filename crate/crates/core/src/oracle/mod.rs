//! Exact ground truth by enumeration, for small `n` and small supports.
//!
//! Sequences are never enumerated: a count vector `(c_1, …, c_k)` with
//! `Σc = n` has multinomial probability `n!/Πc_x!·Πp_x^{c_x}`, and its profile
//! is the multiset of nonzero counts.

mod partitions;

pub use partitions::{ln_biguint, partition_count, partition_counts};

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::error::{invalid, Error, Result};
use crate::numeric::{binomial_saturating, ln_factorial_table, CompensatedSum};
use crate::profile::Profile;

/// Largest number of count vectors (or assignments) enumerated.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Largest number of grid candidates scanned by [`pml_brute`].
pub const PML_CANDIDATE_LIMIT: usize = 2_000_000;

/// Exact law of the profile `φ(Xⁿ)` for `Xⁿ ~ p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDistribution {
    pub n: u64,
    pub alphabet_size: u64,
    pub entries: BTreeMap<Profile, f64>,
}

impl ProfileDistribution {
    pub fn probability(&self, profile: &Profile) -> f64 {
        self.entries.get(profile).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().copied().collect::<CompensatedSum>().value()
    }

    /// `H(Φⁿ)` in nats.
    pub fn entropy(&self) -> f64 {
        self.entries
            .values()
            .filter(|&&q| q > 0.0)
            .map(|&q| -q * q.ln())
            .collect::<CompensatedSum>()
            .value()
    }

    /// `(E[D_n], Var(D_n))`.
    pub fn dimension_moments(&self) -> (f64, f64) {
        let mut m1 = CompensatedSum::new();
        let mut m2 = CompensatedSum::new();
        for (profile, &q) in &self.entries {
            let d = profile.dimension() as f64;
            m1.add(q * d);
            m2.add(q * d * d);
        }
        let mean = m1.value();
        (mean, (m2.value() - mean * mean).max(0.0))
    }

    /// Fewest profiles whose total probability reaches `1 − δ`.
    pub fn typical_cardinality(&self, delta: f64) -> Result<u64> {
        if !(0.0..1.0).contains(&delta) {
            return Err(invalid(format!("δ = {delta} must lie in [0, 1)")));
        }
        let mut probs: Vec<f64> = self.entries.values().copied().filter(|&q| q > 0.0).collect();
        if delta == 0.0 {
            return Ok(probs.len() as u64);
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        let target = 1.0 - delta;
        let mut acc = CompensatedSum::new();
        for (i, q) in probs.iter().enumerate() {
            acc.add(*q);
            if acc.value() >= target {
                return Ok(i as u64 + 1);
            }
        }
        Ok(probs.len() as u64)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            profile: &'a Profile,
            dimension: usize,
            probability: f64,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            n: u64,
            alphabet_size: u64,
            entropy: f64,
            entries: Vec<Entry<'a>>,
        }
        let out = Out {
            n: self.n,
            alphabet_size: self.alphabet_size,
            entropy: self.entropy(),
            entries: self
                .entries
                .iter()
                .map(|(profile, &probability)| Entry {
                    profile,
                    dimension: profile.dimension(),
                    probability,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("serializable")
    }
}

fn positive_probs(p: &DiscreteDistribution) -> Result<Vec<f64>> {
    if p.support_size() > ENUMERATION_LIMIT as u64 {
        return Err(Error::SizeGuard {
            what: "support size",
            actual: p.support_size() as u128,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(p.probs()?.into_iter().filter(|&q| q > 0.0).collect())
}

struct Enumerator<'a> {
    ln_p: &'a [f64],
    ln_fact: &'a [f64],
    counts: Vec<u64>,
    out: HashMap<Vec<u64>, CompensatedSum>,
}

impl Enumerator<'_> {
    fn walk(&mut self, x: usize, left: u64, ln_w: f64) {
        let last = x + 1 == self.ln_p.len();
        let lo = if last { left } else { 0 };
        for c in lo..=left {
            self.counts[x] = c;
            let w = ln_w + c as f64 * self.ln_p[x] - self.ln_fact[c as usize];
            if last {
                let mut key: Vec<u64> = self.counts.iter().copied().filter(|&c| c > 0).collect();
                key.sort_unstable();
                self.out.entry(key).or_default().add(w.exp());
            } else {
                self.walk(x + 1, left - c, w);
            }
        }
        self.counts[x] = 0;
    }
}

/// Exact [`ProfileDistribution`] by enumerating all `C(n+k−1, k−1)` count vectors.
pub fn profile_distribution_exact(p: &DiscreteDistribution, n: u64) -> Result<ProfileDistribution> {
    let probs = positive_probs(p)?;
    let k = probs.len() as u64;
    let vectors = binomial_saturating(n + k - 1, k - 1);
    if vectors > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            what: "count vectors C(n+k−1, k−1)",
            actual: vectors,
            limit: ENUMERATION_LIMIT,
        });
    }
    let ln_fact = ln_factorial_table(n as usize);
    let ln_p: Vec<f64> = probs.iter().map(|q| q.ln()).collect();
    let mut e = Enumerator {
        ln_p: &ln_p,
        ln_fact: &ln_fact,
        counts: vec![0; probs.len()],
        out: HashMap::new(),
    };
    e.walk(0, n, ln_fact[n as usize]);
    let entries = e
        .out
        .into_iter()
        .map(|(counts, mass)| (Profile::from_multiplicities(counts), mass.value()))
        .collect();
    Ok(ProfileDistribution {
        n,
        alphabet_size: p.support_size(),
        entries,
    })
}

pub fn profile_entropy_exact(p: &DiscreteDistribution, n: u64) -> Result<f64> {
    Ok(profile_distribution_exact(p, n)?.entropy())
}

pub fn dimension_moments_exact(p: &DiscreteDistribution, n: u64) -> Result<(f64, f64)> {
    Ok(profile_distribution_exact(p, n)?.dimension_moments())
}

pub fn typical_cardinality(p: &DiscreteDistribution, n: u64, delta: f64) -> Result<u64> {
    profile_distribution_exact(p, n)?.typical_cardinality(delta)
}

/// `Pr(φ(Xⁿ) = profile)` read off the full enumeration.
pub fn profile_probability_enumerated(p: &DiscreteDistribution, profile: &Profile) -> Result<f64> {
    Ok(profile_distribution_exact(p, profile.len())?.probability(profile))
}

/// Number of ways to hand the multiplicities of `profile` (padded with zeros) to `k` symbols.
fn assignment_count(profile: &Profile, k: u64) -> u128 {
    let m = profile.distinct_symbols();
    if m > k {
        return 0;
    }
    // k!/((k−m)!·Πφ!) as a product of binomials
    let mut total: u128 = 1;
    let mut free = k;
    for &(_, phi) in profile.pairs() {
        total = total.saturating_mul(binomial_saturating(free, phi));
        free -= phi;
    }
    total
}

struct Assigner<'a> {
    ln_p: &'a [f64],
    /// Distinct values (0 first) and how many of each remain.
    values: Vec<u64>,
    remaining: Vec<u64>,
    sum: CompensatedSum,
}

impl Assigner<'_> {
    fn walk(&mut self, x: usize, ln_w: f64) {
        if x == self.ln_p.len() {
            self.sum.add(ln_w.exp());
            return;
        }
        for v in 0..self.values.len() {
            if self.remaining[v] == 0 {
                continue;
            }
            let mu = self.values[v];
            let term = if mu == 0 { 0.0 } else { mu as f64 * self.ln_p[x] };
            self.remaining[v] -= 1;
            self.walk(x + 1, ln_w + term);
            self.remaining[v] += 1;
        }
    }
}

/// `Pr(φ(Xⁿ) = profile)` by summing over assignments of multiplicities to symbols.
///
/// Independent of [`profile_distribution_exact`]; the two agree to rounding.
pub fn profile_probability(p: &DiscreteDistribution, profile: &Profile) -> Result<f64> {
    let probs = positive_probs(p)?;
    let k = probs.len() as u64;
    let m = profile.distinct_symbols();
    if m > k {
        return Ok(0.0);
    }
    let ways = assignment_count(profile, k);
    if ways > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            what: "multiplicity assignments",
            actual: ways,
            limit: ENUMERATION_LIMIT,
        });
    }
    let n = profile.len();
    let ln_fact = ln_factorial_table(n as usize);
    let mut coeff = ln_fact[n as usize];
    for &(mu, phi) in profile.pairs() {
        coeff -= phi as f64 * ln_fact[mu as usize];
    }
    let mut values = vec![0];
    let mut remaining = vec![k - m];
    for &(mu, phi) in profile.pairs() {
        values.push(mu);
        remaining.push(phi);
    }
    let ln_p: Vec<f64> = probs.iter().map(|q| q.ln()).collect();
    let mut a = Assigner {
        ln_p: &ln_p,
        values,
        remaining,
        sum: CompensatedSum::new(),
    };
    a.walk(0, coeff);
    Ok(a.sum.value())
}

/// Outcome of [`pml_brute`].
#[derive(Debug, Clone, PartialEq)]
pub struct PmlResult {
    /// Maximizer, probabilities sorted in decreasing order on labels `0..`.
    pub distribution: DiscreteDistribution,
    pub probability: f64,
    pub candidates: usize,
}

/// Partitions of `total` into exactly `parts` positive parts, each vector non-increasing.
fn partitions_into(total: u64, parts: usize, cap: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let hi = cap.min(total.saturating_sub(parts as u64 - 1));
    let lo = total.div_ceil(parts as u64);
    for v in (lo..=hi).rev() {
        prefix.push(v);
        partitions_into(total - v, parts - 1, v, prefix, out);
        prefix.pop();
    }
}

/// Profile maximum likelihood over the simplex grid with spacing `grid`, support at most `support_cap`.
///
/// Candidates are non-increasing vectors `(a_1/G, …, a_k/G)` with `G = round(1/grid)`.
/// Ties within a relative `1e−12` go to the smaller support, then to the
/// lexicographically smaller vector.
pub fn pml_brute(profile: &Profile, support_cap: usize, grid: f64) -> Result<PmlResult> {
    if profile.is_empty() {
        return Err(invalid("PML of the empty profile is undefined"));
    }
    if profile.len() > 10 || support_cap == 0 || support_cap > 8 {
        return Err(invalid("pml_brute needs n ≤ 10 and 1 ≤ K ≤ 8"));
    }
    if !(grid > 0.0 && grid <= 1.0) {
        return Err(invalid(format!("grid spacing {grid} must lie in (0, 1]")));
    }
    let cells = (1.0 / grid).round() as u64;
    let mut candidates = Vec::new();
    for k in 1..=support_cap {
        let before = candidates.len();
        partitions_into(cells, k, cells, &mut Vec::new(), &mut candidates);
        // within one support size, lexicographically increasing
        candidates[before..].reverse();
        if candidates.len() > PML_CANDIDATE_LIMIT {
            return Err(Error::SizeGuard {
                what: "PML grid candidates",
                actual: candidates.len() as u128,
                limit: PML_CANDIDATE_LIMIT as u128,
            });
        }
    }
    let mut best: Option<(f64, &Vec<u64>)> = None;
    for c in &candidates {
        let probs: Vec<f64> = c.iter().map(|&a| a as f64 / cells as f64).collect();
        let q = profile_probability(&DiscreteDistribution::from_probs(&probs)?, profile)?;
        let better = match best {
            None => true,
            Some((b, _)) => q > b * (1.0 + 1e-12) && q > b,
        };
        if better {
            best = Some((q, c));
        }
    }
    let (probability, c) = best.expect("at least one candidate");
    let probs: Vec<f64> = c.iter().map(|&a| a as f64 / cells as f64).collect();
    Ok(PmlResult {
        distribution: DiscreteDistribution::from_probs(&probs)?,
        probability,
        candidates: candidates.len(),
    })
}
