//! Profile compression.
//!
//! PRFL v1 layout:
//!
//! ```text
//! 50 52 46 4C | 01 | varint n | varint D | D × (varint Δμ, varint φ)
//! ```
//!
//! Varints are unsigned LEB128 in their shortest form. `Δμ` is the gap to
//! the previous multiplicity (the first is measured from 0) and is always
//! at least 1, so every profile has exactly one encoding.

mod avl;
mod seq;

pub use avl::ProbeTree;
pub use seq::SeqEncoderState;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{max_dimension_bound, Profile};

pub const MAGIC: [u8; 4] = *b"PRFL";
pub const VERSION: u8 = 1;
/// Magic plus version.
pub const HEADER_BYTES: usize = 5;

/// Why a byte stream is not a PRFL v1 profile.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("stream shorter than the 5-byte header")]
    TruncatedHeader,
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("varint truncated at byte {offset}")]
    TruncatedVarint { offset: usize },
    #[error("varint at byte {offset} exceeds 64 bits")]
    VarintOverflow { offset: usize },
    #[error("varint at byte {offset} is not in shortest form")]
    NonCanonicalVarint { offset: usize },
    #[error("dimension {dimension} impossible for n = {n}")]
    DimensionTooLarge { n: u64, dimension: u64 },
    #[error("multiplicity gap of zero at pair {index}")]
    NonIncreasingMultiplicity { index: u64 },
    #[error("prevalence zero at pair {index}")]
    ZeroPrevalence { index: u64 },
    #[error("pairs sum to {actual}, header declares n = {declared}")]
    SumMismatch { declared: u64, actual: u128 },
    #[error("{count} trailing bytes after the last pair")]
    TrailingBytes { count: usize },
}

impl DecodeError {
    /// Stable numeric code, distinct per variant.
    pub fn code(&self) -> u8 {
        match self {
            DecodeError::TruncatedHeader => 1,
            DecodeError::BadMagic(_) => 2,
            DecodeError::UnsupportedVersion(_) => 3,
            DecodeError::TruncatedVarint { .. } => 4,
            DecodeError::VarintOverflow { .. } => 5,
            DecodeError::NonCanonicalVarint { .. } => 6,
            DecodeError::DimensionTooLarge { .. } => 7,
            DecodeError::NonIncreasingMultiplicity { .. } => 8,
            DecodeError::ZeroPrevalence { .. } => 9,
            DecodeError::SumMismatch { .. } => 10,
            DecodeError::TrailingBytes { .. } => 11,
        }
    }
}

/// A PRFL v1 byte stream produced by [`encode_block`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodedProfile {
    bytes: Vec<u8>,
}

impl EncodedProfile {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn size_bits(&self) -> u64 {
        8 * self.bytes.len() as u64
    }

    pub fn decode(&self) -> Result<Profile, DecodeError> {
        decode_block(&self.bytes)
    }
}

pub fn varint_len(mut v: u64) -> usize {
    let mut len = 1;
    while v >= 0x80 {
        v >>= 7;
        len += 1;
    }
    len
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8 & 0x7f) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn varint(&mut self) -> Result<u64, DecodeError> {
        let start = self.pos;
        let mut value: u64 = 0;
        let mut shift = 0u32;
        loop {
            let Some(&b) = self.bytes.get(self.pos) else {
                return Err(DecodeError::TruncatedVarint { offset: start });
            };
            self.pos += 1;
            let low = (b & 0x7f) as u64;
            if shift == 63 && low > 1 || shift > 63 {
                return Err(DecodeError::VarintOverflow { offset: start });
            }
            value |= low << shift;
            if b & 0x80 == 0 {
                if b == 0 && self.pos - start > 1 {
                    return Err(DecodeError::NonCanonicalVarint { offset: start });
                }
                return Ok(value);
            }
            shift += 7;
        }
    }
}

pub fn encode_block(profile: &Profile) -> EncodedProfile {
    let mut bytes = Vec::with_capacity(encoded_size_bits(profile) as usize / 8);
    bytes.extend_from_slice(&MAGIC);
    bytes.push(VERSION);
    put_varint(&mut bytes, profile.len());
    put_varint(&mut bytes, profile.dimension() as u64);
    let mut prev = 0;
    for &(mu, phi) in profile.pairs() {
        put_varint(&mut bytes, mu - prev);
        put_varint(&mut bytes, phi);
        prev = mu;
    }
    EncodedProfile { bytes }
}

pub fn decode_block(bytes: &[u8]) -> Result<Profile, DecodeError> {
    if bytes.len() < HEADER_BYTES {
        return Err(DecodeError::TruncatedHeader);
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
    if magic != MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::UnsupportedVersion(bytes[4]));
    }
    let mut r = Reader {
        bytes,
        pos: HEADER_BYTES,
    };
    let n = r.varint()?;
    let dimension = r.varint()?;
    if dimension > max_dimension_bound(n, None) {
        return Err(DecodeError::DimensionTooLarge { n, dimension });
    }
    let mut pairs = Vec::with_capacity(dimension as usize);
    let mut mu: u64 = 0;
    let mut total: u128 = 0;
    for index in 0..dimension {
        let offset = r.pos;
        let delta = r.varint()?;
        if delta == 0 {
            return Err(DecodeError::NonIncreasingMultiplicity { index });
        }
        mu = mu
            .checked_add(delta)
            .ok_or(DecodeError::VarintOverflow { offset })?;
        let phi = r.varint()?;
        if phi == 0 {
            return Err(DecodeError::ZeroPrevalence { index });
        }
        total += mu as u128 * phi as u128;
        pairs.push((mu, phi));
    }
    if total != n as u128 {
        return Err(DecodeError::SumMismatch {
            declared: n,
            actual: total,
        });
    }
    if r.pos != bytes.len() {
        return Err(DecodeError::TrailingBytes {
            count: bytes.len() - r.pos,
        });
    }
    Ok(Profile::from_pairs(n, pairs).expect("decoder enforces the profile invariants"))
}

/// Length of `encode_block(profile)` in bits, without encoding.
pub fn encoded_size_bits(profile: &Profile) -> u64 {
    let mut bytes = HEADER_BYTES + varint_len(profile.len()) + varint_len(profile.dimension() as u64);
    let mut prev = 0;
    for &(mu, phi) in profile.pairs() {
        bytes += varint_len(mu - prev) + varint_len(phi);
        prev = mu;
    }
    8 * bytes as u64
}

/// `2·D·⌈log₂(n+1)⌉ + 128`, the payload budget checked against [`encoded_size_bits`].
pub fn size_budget_bits(profile: &Profile) -> u64 {
    let width = 64 - profile.len().leading_zeros() as u64;
    2 * profile.dimension() as u64 * width + 128
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pf(n: u64, pairs: &[(u64, u64)]) -> Profile {
        Profile::from_pairs(n, pairs.to_vec()).unwrap()
    }

    #[test]
    fn empty_profile_is_header_only() {
        let e = encode_block(&Profile::empty());
        assert_eq!(e.as_bytes(), &[0x50, 0x52, 0x46, 0x4c, 0x01, 0x00, 0x00]);
        assert_eq!(e.decode().unwrap(), Profile::empty());
        assert_eq!(encoded_size_bits(&Profile::empty()), 56);
    }

    #[test]
    fn known_bytes() {
        let p = pf(5, &[(1, 1), (2, 2)]);
        let e = encode_block(&p);
        assert_eq!(e.as_bytes(), &[0x50, 0x52, 0x46, 0x4c, 0x01, 5, 2, 1, 1, 1, 2]);
        assert_eq!(decode_block(e.as_bytes()).unwrap(), p);
        let big = pf(300, &[(300, 1)]);
        assert_eq!(&encode_block(&big).as_bytes()[5..], &[0xac, 0x02, 1, 0xac, 0x02, 1]);
    }

    #[test]
    fn each_failure_has_its_own_code() {
        let ok = encode_block(&pf(5, &[(1, 1), (2, 2)])).into_bytes();
        let mut cases: Vec<(Vec<u8>, u8)> = vec![
            (vec![], 1),
            (b"PRFM\x01\x00\x00".to_vec(), 2),
            (b"PRFL\x02\x00\x00".to_vec(), 3),
            (ok[..ok.len() - 1].to_vec(), 4),
            ([&ok[..5], &[0xff; 10][..], &[0x01]].concat(), 5),
            ([&ok[..5], &[0x85, 0x00][..], &ok[6..]].concat(), 6),
            (b"PRFL\x01\x02\x05".to_vec(), 7),
            ([&ok[..7], &[0, 1][..], &ok[9..]].concat(), 8),
            ([&ok[..8], &[0][..], &ok[9..]].concat(), 9),
            ([&ok[..5], &[6][..], &ok[6..]].concat(), 10),
            ([&ok[..], &[0][..]].concat(), 11),
        ];
        for (bytes, code) in cases.drain(..) {
            let err = decode_block(&bytes).unwrap_err();
            assert_eq!(err.code(), code, "{bytes:02x?} → {err}");
        }
    }

    fn arb_profile() -> impl Strategy<Value = Profile> {
        prop::collection::btree_map(1u64..5000, 1u64..50, 0..40).prop_map(|m| {
            let n = m.iter().map(|(mu, phi)| mu * phi).sum();
            Profile::from_pairs(n, m.into_iter().collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip(p in arb_profile()) {
            let e = encode_block(&p);
            prop_assert_eq!(e.size_bits(), encoded_size_bits(&p));
            prop_assert_eq!(e.decode().unwrap(), p);
        }

        #[test]
        fn within_budget(p in arb_profile()) {
            prop_assert!(encoded_size_bits(&p) <= size_budget_bits(&p));
        }

        #[test]
        fn garbage_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
            let mut framed = b"PRFL\x01".to_vec();
            framed.extend(bytes);
            if let Ok(p) = decode_block(&framed) {
                prop_assert_eq!(encode_block(&p).into_bytes(), framed);
            }
        }
    }
}
