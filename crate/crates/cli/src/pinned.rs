//! Constants for bounds stated only up to an unspecified factor.
//!
//! Each was fixed once from the sweep in `examples/derive_constants.rs`
//! (observed extreme, rounded outward) and is not retuned afterwards.

/// `E_n/H^S_n ≥ SANDWICH_C_LO/√(ln n)`.
pub const SANDWICH_C_LO: f64 = 0.76;
/// `E_n/H^S_n ≤ SANDWICH_C_HI`.
pub const SANDWICH_C_HI: f64 = 2.1;
/// Discretized Gaussians: `H^S/(1 + min{σ, n/σ}) ∈ [1/(C ln n), C ln n]`.
pub const GAUSSIAN_C: f64 = 0.77;
/// `H^S ≤ C·ln n·(1 + min{σ, n/σ})` for discretized log-concave models.
pub const LOG_CONCAVE_C: f64 = 1.1;
/// `H^S ≤ C·ln n·(1 + min{Σσ_i, max n/σ_i})` for mixtures.
pub const MIXTURE_C: f64 = 0.85;
/// `H^S ≤ C·ln n·min{(n t²)^{1/3}, √n}` for `t`-histograms.
pub const HISTOGRAM_UPPER_C: f64 = 0.19;
/// Lower-bound instances: `H^S ≥ c·min{(n t² ln n)^{1/3}, √n}`.
pub const HISTOGRAM_LOWER_C: f64 = 0.13;
/// `|H^S(p) − H^S(q)| ≤ C·√(h_W(p,q)·n)`.
pub const LIPSCHITZ_HAMMING_C: f64 = 4.6;
/// `min_{c∈[1/3,3]} |H^S(p) − c·H^S(q)| ≤ C·(ℓ₁(p,q)·n)^{2/3}`. The sweep never saw a
/// nonzero gap, so this is a nominal positive value.
pub const LIPSCHITZ_L1_C: f64 = 0.1;
/// Mean excess loss on adversarial instances `≥ c·D/n`.
pub const ADVERSARIAL_C: f64 = 100.0;
/// The collision tester is expected to separate once `n ≥ C·√k/ε²`.
pub const ROC_SAMPLE_FACTOR: f64 = 16.0;
