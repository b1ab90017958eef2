//! Natural estimators and their losses.
//!
//! A natural estimator gives every symbol seen `μ` times the same
//! probability `q_μ`. Losses against a known `p` are computed per
//! multiplicity class: with `P_μ` the true mass of the symbols seen `μ`
//! times,
//!
//! ```text
//! KL(p ‖ q) = −H(p) − Σ_μ P_μ ln q_μ
//! ```
//!
//! which needs no iteration over unseen symbols and so works for supports
//! with `n²` filler symbols.

mod testers;

pub use testers::{
    collision_statistic, collision_tester, local_extremum_check, median_boost, pml_uniformity_tester,
    CollisionOutcome, LocalExtremum, PmlTestBranch, PmlTestOutcome,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::{DiscreteDistribution, Run};
use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;
use crate::profile::Profile;

/// Tolerance on `Σ_μ φ_μ q_μ = 1`.
pub const ESTIMATE_MASS_TOLERANCE: f64 = 1e-9;

/// Labelled multiplicities of a sample.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SampleCounts {
    n: u64,
    counts: BTreeMap<i64, u64>,
}

impl SampleCounts {
    pub fn from_labels(labels: &[i64]) -> Self {
        let mut counts = BTreeMap::new();
        for &x in labels {
            *counts.entry(x).or_insert(0) += 1;
        }
        SampleCounts {
            n: labels.len() as u64,
            counts,
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn count(&self, label: i64) -> u64 {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn profile(&self) -> Profile {
        Profile::from_multiplicities(self.counts.values().copied())
    }
}

/// Per-class probabilities of a natural estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalEstimate {
    pub n: u64,
    /// Declared alphabet size; `None` means unseen symbols are unaccounted for.
    pub alphabet: Option<u64>,
    /// `μ → q_μ`; contains 0 when the alphabet is known and some symbol is unseen.
    pub per_class: BTreeMap<u64, f64>,
    /// `μ → φ_μ`, with `φ_0 = |X| − distinct observed` when the alphabet is known.
    pub prevalence: BTreeMap<u64, u64>,
}

impl NaturalEstimate {
    fn new(n: u64, alphabet: Option<u64>, per_class: BTreeMap<u64, f64>, prevalence: BTreeMap<u64, u64>) -> Result<Self> {
        let e = NaturalEstimate {
            n,
            alphabet,
            per_class,
            prevalence,
        };
        let mass = e.total_mass();
        if (mass - 1.0).abs() > ESTIMATE_MASS_TOLERANCE || e.per_class.values().any(|&q| !(q >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "natural estimate has mass {mass}"
            )));
        }
        Ok(e)
    }

    /// Floor `1/n⁴` used for unseen symbols when the alphabet is unknown.
    pub fn unseen_floor(&self) -> f64 {
        let nf = (self.n.max(1)) as f64;
        1.0 / nf.powi(4)
    }

    /// Probability of one symbol seen `mu` times.
    pub fn q(&self, mu: u64) -> f64 {
        match self.per_class.get(&mu) {
            Some(&q) => q,
            None if mu == 0 && self.alphabet.is_none() => self.unseen_floor(),
            None => 0.0,
        }
    }

    /// `Σ_μ φ_μ q_μ` over the listed classes.
    pub fn total_mass(&self) -> f64 {
        self.per_class
            .iter()
            .map(|(mu, q)| self.prevalence.get(mu).copied().unwrap_or(0) as f64 * q)
            .collect::<CompensatedSum>()
            .value()
    }

    /// `−Σ_μ φ_μ q_μ ln q_μ`; with an unknown alphabet only seen symbols count.
    pub fn entropy(&self) -> f64 {
        self.per_class
            .iter()
            .filter(|(_, &q)| q > 0.0)
            .map(|(mu, &q)| -(self.prevalence.get(mu).copied().unwrap_or(0) as f64) * q * q.ln())
            .collect::<CompensatedSum>()
            .value()
    }

    /// The estimate as a distribution over the labels of `p`.
    pub fn materialize(&self, sample: &SampleCounts, p: &DiscreteDistribution) -> Result<DiscreteDistribution> {
        check_labels(sample, p)?;
        let runs = p
            .labels()?
            .into_iter()
            .map(|x| Run {
                prob: self.q(sample.count(x)),
                len: 1,
            })
            .collect();
        DiscreteDistribution::from_runs(p.offset(), runs)
    }
}

fn prevalence_with_unseen(profile: &Profile, alphabet: Option<u64>) -> Result<BTreeMap<u64, u64>> {
    let mut prevalence: BTreeMap<u64, u64> = profile.pairs().iter().copied().collect();
    if let Some(k) = alphabet {
        let seen = profile.distinct_symbols();
        if seen > k {
            return Err(invalid(format!(
                "{seen} distinct symbols observed but alphabet has {k}"
            )));
        }
        if k > seen {
            prevalence.insert(0, k - seen);
        }
    }
    Ok(prevalence)
}

/// `q_μ = μ/n`; unseen symbols get 0.
pub fn empirical(profile: &Profile, alphabet: Option<u64>) -> Result<NaturalEstimate> {
    let n = profile.len();
    if n == 0 {
        return Err(invalid("empirical estimate needs n ≥ 1"));
    }
    let prevalence = prevalence_with_unseen(profile, alphabet)?;
    let per_class = prevalence
        .keys()
        .map(|&mu| (mu, mu as f64 / n as f64))
        .collect();
    NaturalEstimate::new(n, alphabet, per_class, prevalence)
}

/// Good–Turing variant: class mass `(μ+1)φ_{μ+1}/n`, or `μφ_μ/n` when
/// `φ_{μ+1} = 0`; unseen class mass `φ_1/n` when the alphabet is known;
/// masses renormalized and split evenly within each class.
pub fn good_turing(profile: &Profile, alphabet: Option<u64>) -> Result<NaturalEstimate> {
    let n = profile.len();
    if n == 0 {
        return Err(invalid("Good–Turing needs n ≥ 1"));
    }
    let nf = n as f64;
    let prevalence = prevalence_with_unseen(profile, alphabet)?;
    let mut masses: BTreeMap<u64, f64> = BTreeMap::new();
    for &(mu, phi) in profile.pairs() {
        let next = profile.prevalence(mu + 1);
        let m = if next > 0 {
            (mu + 1) as f64 * next as f64 / nf
        } else {
            mu as f64 * phi as f64 / nf
        };
        masses.insert(mu, m);
    }
    if prevalence.contains_key(&0) {
        masses.insert(0, profile.prevalence(1) as f64 / nf);
    }
    let total: f64 = masses.values().copied().collect::<CompensatedSum>().value();
    let per_class = masses
        .into_iter()
        .map(|(mu, m)| (mu, m / total / prevalence[&mu] as f64))
        .collect();
    NaturalEstimate::new(n, alphabet, per_class, prevalence)
}

/// Add-`β` estimator `q_μ = (μ + β)/(n + β|X|)`.
pub fn dirichlet(profile: &Profile, beta: f64, alphabet: u64) -> Result<NaturalEstimate> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(invalid(format!("β = {beta} must be ≥ 0")));
    }
    let n = profile.len();
    let denom = n as f64 + beta * alphabet as f64;
    if denom <= 0.0 {
        return Err(invalid("Dirichlet estimate needs n ≥ 1 or β > 0"));
    }
    let prevalence = prevalence_with_unseen(profile, Some(alphabet))?;
    let per_class = prevalence
        .keys()
        .map(|&mu| (mu, (mu as f64 + beta) / denom))
        .collect();
    NaturalEstimate::new(n, Some(alphabet), per_class, prevalence)
}

/// Shrinkage intensity `λ̂ = clamp((1 − Σq̂²)/((n−1)·Σ(1/|X| − q̂_x)²), 0, 1)`.
pub fn james_stein_intensity(profile: &Profile, alphabet: u64) -> Result<f64> {
    let n = profile.len();
    let prevalence = prevalence_with_unseen(profile, Some(alphabet))?;
    if n <= 1 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let u = 1.0 / alphabet as f64;
    let mut sq = CompensatedSum::new();
    let mut dev = CompensatedSum::new();
    for (&mu, &phi) in &prevalence {
        let q = mu as f64 / nf;
        sq.add(phi as f64 * q * q);
        dev.add(phi as f64 * (u - q) * (u - q));
    }
    let dev = dev.value();
    if dev <= 0.0 {
        return Ok(0.0);
    }
    Ok(((1.0 - sq.value()) / ((nf - 1.0) * dev)).clamp(0.0, 1.0))
}

/// `λ̂·uniform + (1 − λ̂)·empirical`.
pub fn james_stein(profile: &Profile, alphabet: u64) -> Result<NaturalEstimate> {
    let n = profile.len();
    if n == 0 {
        return Err(invalid("James–Stein needs n ≥ 1"));
    }
    let lambda = james_stein_intensity(profile, alphabet)?;
    let prevalence = prevalence_with_unseen(profile, Some(alphabet))?;
    let u = 1.0 / alphabet as f64;
    let per_class = prevalence
        .keys()
        .map(|&mu| (mu, lambda * u + (1.0 - lambda) * mu as f64 / n as f64))
        .collect();
    NaturalEstimate::new(n, Some(alphabet), per_class, prevalence)
}

/// A natural estimator selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Estimator {
    Empirical,
    GoodTuring,
    Dirichlet { beta: f64 },
    JamesStein,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Empirical => "empirical",
            Estimator::GoodTuring => "good_turing",
            Estimator::Dirichlet { .. } => "dirichlet",
            Estimator::JamesStein => "james_stein",
        }
    }

    pub fn fit(&self, profile: &Profile, alphabet: Option<u64>) -> Result<NaturalEstimate> {
        let need = |a: Option<u64>| a.ok_or_else(|| invalid(format!("{} needs the alphabet size", self.name())));
        match *self {
            Estimator::Empirical => empirical(profile, alphabet),
            Estimator::GoodTuring => good_turing(profile, alphabet),
            Estimator::Dirichlet { beta } => dirichlet(profile, beta, need(alphabet)?),
            Estimator::JamesStein => james_stein(profile, need(alphabet)?),
        }
    }
}

/// `H(p)` in nats.
pub fn entropy(p: &DiscreteDistribution) -> f64 {
    p.runs()
        .iter()
        .filter(|r| r.prob > 0.0)
        .map(|r| -(r.len as f64) * r.prob * r.prob.ln())
        .collect::<CompensatedSum>()
        .value()
}

/// `ℓ_H(p, q) = |H(p) − H(q)|`.
pub fn entropy_gap(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    (entropy(p) - entropy(q)).abs()
}

fn aligned_pair(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<(Vec<f64>, Vec<f64>)> {
    let lo = p.offset().min(q.offset());
    let hi = p.last_label().max(q.last_label());
    let width = (hi - lo + 1) as u64;
    if width > crate::dist::EXPANSION_LIMIT {
        return Err(Error::SizeGuard {
            what: "aligned support",
            actual: width as u128,
            limit: crate::dist::EXPANSION_LIMIT as u128,
        });
    }
    Ok((lo..=hi).map(|x| (p.prob_of(x), q.prob_of(x))).unzip())
}

/// `(H(q) − H(p)) − (KL(p‖q) + Σ_x (p_x − q_x) ln q_x)`; zero up to rounding when `q` has full support.
pub fn entropy_decomposition_check(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let (ps, qs) = aligned_pair(p, q)?;
    if qs.iter().any(|&x| x <= 0.0) {
        return Err(invalid("decomposition needs q_x > 0 everywhere"));
    }
    let mut kl = CompensatedSum::new();
    let mut cross = CompensatedSum::new();
    for (&a, &b) in ps.iter().zip(&qs) {
        if a > 0.0 {
            kl.add(a * (a / b).ln());
        }
        cross.add((a - b) * b.ln());
    }
    Ok((entropy(q) - entropy(p)) - (kl.value() + cross.value()))
}

/// True per-class masses of a sample under `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMasses {
    pub n: u64,
    pub alphabet: u64,
    /// `μ → (φ_μ, P_μ)`, including the unseen class when nonempty.
    pub classes: BTreeMap<u64, (u64, f64)>,
    pub entropy: f64,
}

fn check_labels(sample: &SampleCounts, p: &DiscreteDistribution) -> Result<()> {
    let (Some((&first, _)), Some((&last, _))) = (sample.counts.first_key_value(), sample.counts.last_key_value()) else {
        return Ok(());
    };
    if first < p.offset() || last > p.last_label() {
        return Err(invalid(format!(
            "sample labels {first}..={last} fall outside the support {}..={}",
            p.offset(),
            p.last_label()
        )));
    }
    Ok(())
}

pub fn class_masses(p: &DiscreteDistribution, sample: &SampleCounts) -> Result<ClassMasses> {
    check_labels(sample, p)?;
    let mut acc: BTreeMap<u64, (u64, CompensatedSum)> = BTreeMap::new();
    let mut seen_mass = CompensatedSum::new();
    for (&x, &c) in &sample.counts {
        let px = p.prob_of(x);
        let slot = acc.entry(c).or_insert((0, CompensatedSum::new()));
        slot.0 += 1;
        slot.1.add(px);
        seen_mass.add(px);
    }
    let k = p.support_size();
    let seen = sample.counts.len() as u64;
    let mut classes: BTreeMap<u64, (u64, f64)> = acc.into_iter().map(|(mu, (phi, m))| (mu, (phi, m.value()))).collect();
    if k > seen {
        classes.insert(0, (k - seen, (1.0 - seen_mass.value()).max(0.0)));
    }
    Ok(ClassMasses {
        n: sample.n,
        alphabet: k,
        classes,
        entropy: entropy(p),
    })
}

impl ClassMasses {
    /// `KL(p ‖ q)`; infinite when `q` puts zero on a class with positive mass.
    pub fn kl(&self, q: &NaturalEstimate) -> f64 {
        let mut cross = CompensatedSum::new();
        for (&mu, &(_, mass)) in &self.classes {
            if mass <= 0.0 {
                continue;
            }
            let qm = q.q(mu);
            if qm <= 0.0 {
                return f64::INFINITY;
            }
            cross.add(mass * qm.ln());
        }
        (-self.entropy - cross.value()).max(0.0)
    }

    /// Best natural estimate `q_μ = P_μ/φ_μ` and its loss.
    pub fn oracle(&self) -> (NaturalEstimate, f64) {
        let mut cross = CompensatedSum::new();
        let mut per_class = BTreeMap::new();
        let mut prevalence = BTreeMap::new();
        for (&mu, &(phi, mass)) in &self.classes {
            per_class.insert(mu, mass / phi as f64);
            prevalence.insert(mu, phi);
            if mass > 0.0 {
                cross.add(mass * (mass / phi as f64).ln());
            }
        }
        let est = NaturalEstimate {
            n: self.n,
            alphabet: Some(self.alphabet),
            per_class,
            prevalence,
        };
        (est, (-self.entropy - cross.value()).max(0.0))
    }
}

/// Best natural estimator for this sample given the true `p`, and its KL loss.
pub fn best_natural_oracle(p: &DiscreteDistribution, sample: &SampleCounts) -> Result<(NaturalEstimate, f64)> {
    Ok(class_masses(p, sample)?.oracle())
}

/// Losses of one estimate against the truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    pub estimator: String,
    pub kl: f64,
    pub l1: f64,
    pub entropy_gap: f64,
    pub excess_kl: f64,
}

/// `Σ_x |p_x − q_x|` without visiting unseen symbols one by one.
fn l1_natural(p: &DiscreteDistribution, sample: &SampleCounts, q: &NaturalEstimate) -> f64 {
    let q0 = q.q(0);
    let mut all_unseen = CompensatedSum::new();
    for r in p.runs() {
        all_unseen.add(r.len as f64 * (r.prob - q0).abs());
    }
    let mut seen = CompensatedSum::new();
    for (&x, &c) in &sample.counts {
        let px = p.prob_of(x);
        seen.add((px - q.q(c)).abs());
        seen.add(-(px - q0).abs());
    }
    (all_unseen.value() + seen.value()).max(0.0)
}

pub fn loss_report(
    p: &DiscreteDistribution,
    sample: &SampleCounts,
    estimator: &Estimator,
) -> Result<LossReport> {
    let cm = class_masses(p, sample)?;
    let q = estimator.fit(&sample.profile(), Some(cm.alphabet))?;
    let (_, min_kl) = cm.oracle();
    let kl = cm.kl(&q);
    Ok(LossReport {
        estimator: estimator.name().to_string(),
        kl,
        l1: l1_natural(p, sample, &q),
        entropy_gap: (cm.entropy - q.entropy()).abs(),
        excess_kl: kl - min_kl,
    })
}

/// `KL(p, estimator(sample)) − min_{natural} KL`.
pub fn excess_loss(p: &DiscreteDistribution, sample: &SampleCounts, estimator: &Estimator) -> Result<f64> {
    Ok(loss_report(p, sample, estimator)?.excess_kl)
}
