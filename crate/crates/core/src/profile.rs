//! Sample profiles: the multiset of symbol multiplicities of a sequence.
//!
//! A [`Profile`] is stored sparsely as sorted `(multiplicity, prevalence)`
//! pairs, so lengths up to `u64::MAX` are representable without a dense
//! prevalence vector. [`MultiProfile`] generalizes this to tuples of
//! sequences, where each symbol's multiplicity is a vector of counts.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::binomial_saturating;

/// Largest length for which [`Profile::prevalence_vector`] materializes.
pub const DENSE_VIEW_LIMIT: u64 = 1_000_000;

/// Profile of a single sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct Profile {
    n: u64,
    pairs: Vec<(u64, u64)>,
}

#[derive(Deserialize)]
struct RawProfile {
    n: u64,
    pairs: Vec<(u64, u64)>,
}

impl TryFrom<RawProfile> for Profile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Profile::from_pairs(raw.n, raw.pairs)
    }
}

impl Profile {
    /// The empty profile of length zero.
    pub fn empty() -> Self {
        Profile {
            n: 0,
            pairs: Vec::new(),
        }
    }

    /// Builds a profile from explicit pairs, validating every invariant.
    pub fn from_pairs(n: u64, pairs: Vec<(u64, u64)>) -> Result<Self> {
        let mut total: u128 = 0;
        let mut prev = 0u64;
        for &(mu, phi) in &pairs {
            if mu <= prev {
                return Err(Error::InvalidProfile(format!(
                    "multiplicities must be strictly increasing and positive (saw {mu} after {prev})"
                )));
            }
            if phi == 0 {
                return Err(Error::InvalidProfile(format!(
                    "prevalence of multiplicity {mu} is zero"
                )));
            }
            total += mu as u128 * phi as u128;
            prev = mu;
        }
        if total != n as u128 {
            return Err(Error::InvalidProfile(format!(
                "sum of multiplicity*prevalence is {total}, expected {n}"
            )));
        }
        Ok(Profile { n, pairs })
    }

    /// Profile from per-symbol multiplicities; zero counts are ignored.
    pub fn from_multiplicities<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut tree: BTreeMap<u64, u64> = BTreeMap::new();
        let mut n = 0u64;
        for c in counts {
            if c > 0 {
                *tree.entry(c).or_insert(0) += 1;
                n += c;
            }
        }
        Profile {
            n,
            pairs: tree.into_iter().collect(),
        }
    }

    /// Sample length `n = Σ μ·φ_μ`.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// Number of distinct multiplicities.
    pub fn dimension(&self) -> usize {
        self.pairs.len()
    }

    /// Number of distinct symbols observed, `Σ φ_μ`.
    pub fn distinct_symbols(&self) -> u64 {
        self.pairs.iter().map(|&(_, phi)| phi).sum()
    }

    /// Prevalence of multiplicity `mu` (zero when absent).
    pub fn prevalence(&self, mu: u64) -> u64 {
        self.pairs
            .binary_search_by_key(&mu, |&(m, _)| m)
            .map(|i| self.pairs[i].1)
            .unwrap_or(0)
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.pairs.last().map(|&(mu, _)| mu).unwrap_or(0)
    }

    /// Multiplicities as a multiset, sorted descending.
    pub fn multiplicities_desc(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.distinct_symbols() as usize);
        for &(mu, phi) in self.pairs.iter().rev() {
            out.extend(std::iter::repeat_n(mu, phi as usize));
        }
        out
    }

    /// Dense view `v[μ] = φ_μ` for `μ in 0..=n`; `None` above [`DENSE_VIEW_LIMIT`].
    pub fn prevalence_vector(&self) -> Option<Vec<u64>> {
        if self.n > DENSE_VIEW_LIMIT {
            return None;
        }
        let mut v = vec![0u64; self.n as usize + 1];
        for &(mu, phi) in &self.pairs {
            v[mu as usize] = phi;
        }
        Some(v)
    }

    /// Canonical JSON form `{"n": .., "pairs": [[mu, phi], ..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidProfile(e.to_string()))
    }
}

/// Profile of a sequence of hashable symbols.
pub fn profile_of<T, I>(sequence: I) -> Profile
where
    T: Hash + Eq,
    I: IntoIterator<Item = T>,
{
    let mut counts: HashMap<T, u64> = HashMap::new();
    for s in sequence {
        *counts.entry(s).or_insert(0) += 1;
    }
    Profile::from_multiplicities(counts.into_values())
}

/// Number of pairs of a profile.
pub fn dimension(profile: &Profile) -> usize {
    profile.dimension()
}

/// `⌊(√(8n+1) − 1)/2⌋`, the largest `D` with `1 + 2 + … + D ≤ n`.
pub fn triangular_root(n: u64) -> u64 {
    let mut d = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    // repair float rounding in either direction
    while d > 0 && d as u128 * (d as u128 + 1) / 2 > n as u128 {
        d -= 1;
    }
    while (d as u128 + 1) * (d as u128 + 2) / 2 <= n as u128 {
        d += 1;
    }
    d
}

/// Upper bound on the dimension of any length-`n` profile.
pub fn max_dimension_bound(n: u64, alphabet_size: Option<u64>) -> u64 {
    let d = triangular_root(n);
    match alphabet_size {
        Some(k) => d.min(k),
        None => d,
    }
}

/// Profile of a tuple of sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiProfile {
    lengths: Vec<u64>,
    entries: BTreeMap<Vec<u64>, u64>,
}

impl MultiProfile {
    pub fn d(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// Multiplicity vectors with their prevalences, sorted lexicographically.
    pub fn entries(&self) -> &BTreeMap<Vec<u64>, u64> {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    /// Collapses a one-sequence multi-profile into a [`Profile`].
    pub fn to_profile(&self) -> Option<Profile> {
        if self.d() != 1 {
            return None;
        }
        let pairs = self.entries.iter().map(|(v, &phi)| (v[0], phi)).collect();
        Some(Profile {
            n: self.lengths[0],
            pairs,
        })
    }
}

/// Multi-dimensional profile of a tuple of sequences.
pub fn multi_profile_of<T, S>(sequences: &[S]) -> Result<MultiProfile>
where
    T: Hash + Eq + Clone,
    S: AsRef<[T]>,
{
    let d = sequences.len();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "at least one sequence is required".into(),
        ));
    }
    let mut counts: HashMap<T, Vec<u64>> = HashMap::new();
    let mut lengths = Vec::with_capacity(d);
    for (i, seq) in sequences.iter().enumerate() {
        let seq = seq.as_ref();
        lengths.push(seq.len() as u64);
        for s in seq {
            counts.entry(s.clone()).or_insert_with(|| vec![0; d])[i] += 1;
        }
    }
    let mut entries = BTreeMap::new();
    for v in counts.into_values() {
        *entries.entry(v).or_insert(0) += 1;
    }
    Ok(MultiProfile { lengths, entries })
}

/// Certificate for the multi-dimensional dimension bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiDimensionBound {
    /// Largest `r ≥ 1` with `Σ n_i ≥ d·C(d+r−1, d+1)`.
    pub r: u64,
    /// `C(d+r, d) − 1`.
    pub bound: u128,
}

pub fn multi_dimension_bound(lengths: &[u64], d: usize) -> Result<MultiDimensionBound> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if lengths.len() != d {
        return Err(Error::InvalidParameter(format!(
            "expected {d} lengths, got {}",
            lengths.len()
        )));
    }
    let total: u128 = lengths.iter().map(|&x| x as u128).sum();
    let d64 = d as u64;
    let holds = |r: u64| {
        let c = binomial_saturating(d64 + r - 1, d64 + 1);
        c.checked_mul(d as u128).is_some_and(|need| total >= need)
    };
    // r = 1 always holds since C(d, d+1) = 0
    let mut r = 1u64;
    while holds(r + 1) {
        r += 1;
    }
    Ok(MultiDimensionBound {
        r,
        bound: binomial_saturating(d64 + r, d64).saturating_sub(1),
    })
}
