//! Sample profiles and what can be learned from them.
//!
//! * [`profile`]: profiles and multi-profiles of sequences, dimension bounds.
//! * [`dist`]: run-length discrete distributions, structured families,
//!   discretized continuous models, seeded sampling.
//! * [`proxy`]: the interval-partition shape proxy `H^S_n` and `E_n`.
//! * [`oracle`]: exact profile distributions and entropies for small cases.
//! * [`codec`]: the PRFL block codec and the streaming tree encoder.
//! * [`estimate`]: natural estimators, KL losses, uniformity testers.

pub mod codec;
pub mod dist;
pub mod error;
pub mod estimate;
pub mod numeric;
pub mod oracle;
pub mod profile;
pub mod proxy;

pub use codec::{decode_block, encode_block, encoded_size_bits, DecodeError, EncodedProfile, SeqEncoderState};
pub use dist::{DiscreteDistribution, Run};
pub use error::{Error, Result};
pub use profile::{profile_of, MultiProfile, Profile};
