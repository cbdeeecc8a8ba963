//! Deterministic, randomly-accessible pseudorandomness.
//!
//! Two primitives live here: a keyed counter-based generator whose i-th
//! output is a pure function of `(key, stream_label, i)`, and a keyed
//! public permutation over `{0..n-1}` evaluable per index in constant
//! time and memory. Both parties of the protocol derive identical values
//! from the shared key without exchanging any stream state.
//!
//! The generator is a Threefry-style 2x64 block function. It is not
//! cryptographically secure; the contract is statistical quality plus
//! exact random access.

use crate::error::{Error, Result};

const KEY_PARITY: u64 = 0x1BD1_1BDA_A9FC_1A22;
const ROTATIONS: [u32; 8] = [16, 42, 12, 31, 16, 32, 24, 21];
const BLOCK_ROUNDS: usize = 20;

// Domain tags keep key derivation, permutation keying and raw streams
// from ever sharing a counter block.
const TAG_CHUNK_KEY: u64 = 0x6368_756e_6b6b_6579; // "chunkkey"
const TAG_PERM_KEY: u64 = 0x7065_726d_5f6b_6579; // "perm_key"

/// Threefry-2x64 block: maps a 128-bit counter to 128 pseudorandom bits
/// under a 128-bit key.
fn block(key: u128, c0: u64, c1: u64) -> (u64, u64) {
    let ks = [
        key as u64,
        (key >> 64) as u64,
        (key as u64) ^ ((key >> 64) as u64) ^ KEY_PARITY,
    ];
    let mut x0 = c0.wrapping_add(ks[0]);
    let mut x1 = c1.wrapping_add(ks[1]);
    for r in 0..BLOCK_ROUNDS {
        x0 = x0.wrapping_add(x1);
        x1 = x1.rotate_left(ROTATIONS[r % 8]) ^ x0;
        if (r + 1) % 4 == 0 {
            let s = (r + 1) / 4;
            x0 = x0.wrapping_add(ks[s % 3]);
            x1 = x1.wrapping_add(ks[(s + 1) % 3]).wrapping_add(s as u64);
        }
    }
    (x0, x1)
}

/// Feistel round mixer: one multiplicative hash, keeping the top 32 bits
/// where the avalanche is strongest. Halves are at most 32 bits wide.
#[inline(always)]
fn round_mix(z: u64) -> u64 {
    z.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32
}

/// A keyed stream identifier. Distinct `(key, stream_label)` pairs yield
/// statistically independent streams; the same pair yields identical
/// streams in every process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorKey {
    pub key: u128,
    pub stream_label: u32,
}

impl GeneratorKey {
    pub fn new(key: u128, stream_label: u32) -> Self {
        Self { key, stream_label }
    }

    /// Derives the stream key for one chunk of a partitioned vector.
    /// `stream_label` 0 carries candidate coordinates, 1 carries arrival
    /// times; decode touches only label 0.
    pub fn for_chunk(master_key: u128, chunk_index: u32, stream_label: u32) -> Self {
        let (lo, hi) = block(master_key, chunk_index as u64, TAG_CHUNK_KEY);
        Self {
            key: (lo as u128) | ((hi as u128) << 64),
            stream_label,
        }
    }
}

/// Derives the public permutation key from the shared master key.
pub fn derive_perm_key(master_key: u128) -> u128 {
    let (lo, hi) = block(master_key, 0, TAG_PERM_KEY);
    (lo as u128) | ((hi as u128) << 64)
}

/// 64 uniform bits at position `index` of the keyed stream. Total
/// function; random access equals sequential generation.
pub fn uniform_at(key: GeneratorKey, index: u64) -> u64 {
    block(key.key, index, key.stream_label as u64).0
}

/// Uniform double in `[0, 1)` at stream position `index`, formed from the
/// top 53 bits so the value is exactly representable and strictly below 1.
pub fn uniform_f64_at(key: GeneratorKey, index: u64) -> f64 {
    (uniform_at(key, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unit-rate exponential at stream position `index`, by inverse CDF.
pub fn exponential_at(key: GeneratorKey, index: u64) -> f64 {
    -(1.0 - uniform_f64_at(key, index)).ln()
}

/// A validated discrete distribution over `{0..k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    masses: Vec<f64>,
}

impl DiscreteDist {
    /// Masses must be non-negative and sum to 1 within 1e-12.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::BadDistribution {
                reason: "empty support".into(),
            });
        }
        if let Some(bad) = masses.iter().find(|&&p| !(p >= 0.0) || p > 1.0) {
            return Err(Error::BadDistribution {
                reason: format!("mass {bad} outside [0, 1]"),
            });
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadDistribution {
                reason: format!("masses sum to {total}, not 1"),
            });
        }
        Ok(Self { masses })
    }

    pub fn support_size(&self) -> u16 {
        self.masses.len() as u16
    }

    pub fn mass(&self, symbol: u16) -> f64 {
        self.masses[symbol as usize]
    }

    /// Smallest symbol whose cumulative mass exceeds `u`.
    pub fn quantile(&self, u: f64) -> u16 {
        let mut cum = 0.0;
        for (sym, &p) in self.masses.iter().enumerate() {
            cum += p;
            if u < cum {
                return sym as u16;
            }
        }
        (self.masses.len() - 1) as u16
    }
}

/// One inverse-CDF draw from `dist` using exactly one [`uniform_at`] call.
/// Deterministic in `(dist, key, index)`.
pub fn gen_from(dist: &DiscreteDist, key: GeneratorKey, index: u64) -> u16 {
    dist.quantile(uniform_f64_at(key, index))
}

/// A keyed bijection on `{0..n-1}`: a balanced Feistel network over the
/// smallest even-width binary domain covering `n`, restricted to `[0, n)`
/// by cycle-walking. Forward and inverse both run per index in O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSpec {
    domain_size: u64,
    perm_key: u128,
    rounds: u32,
    half_bits: u32,
    round_keys: Vec<u64>,
}

pub const DEFAULT_FEISTEL_ROUNDS: u32 = 8;

impl PermutationSpec {
    pub fn new(domain_size: u64, perm_key: u128, rounds: u32) -> Self {
        assert!(rounds >= 1, "Feistel network needs at least one round");
        // Smallest even bit width whose range covers the domain.
        let needed = if domain_size <= 1 {
            2
        } else {
            64 - (domain_size - 1).leading_zeros()
        };
        let half_bits = needed.div_ceil(2);
        let round_keys = (0..rounds)
            .map(|r| block(perm_key, r as u64, TAG_PERM_KEY).0)
            .collect();
        Self {
            domain_size,
            perm_key,
            rounds,
            half_bits,
            round_keys,
        }
    }

    pub fn domain_size(&self) -> u64 {
        self.domain_size
    }

    pub fn perm_key(&self) -> u128 {
        self.perm_key
    }

    fn half_mask(&self) -> u64 {
        (1u64 << self.half_bits) - 1
    }

    #[inline]
    fn feistel(&self, x: u64) -> u64 {
        let mask = self.half_mask();
        let mut left = x >> self.half_bits;
        let mut right = x & mask;
        for &rk in &self.round_keys {
            let (l, r2) = (right, left ^ (round_mix(right ^ rk) & mask));
            left = l;
            right = r2;
        }
        (left << self.half_bits) | right
    }

    #[inline]
    fn feistel_inv(&self, y: u64) -> u64 {
        let mask = self.half_mask();
        let mut left = y >> self.half_bits;
        let mut right = y & mask;
        for &rk in self.round_keys.iter().rev() {
            let (l, r2) = (right ^ (round_mix(left ^ rk) & mask), left);
            left = l;
            right = r2;
        }
        (left << self.half_bits) | right
    }
}

/// Image of `i` under the keyed public permutation.
pub fn permute(spec: &PermutationSpec, i: u64) -> Result<u64> {
    if i >= spec.domain_size {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: spec.domain_size,
        });
    }
    let mut y = spec.feistel(i);
    while y >= spec.domain_size {
        y = spec.feistel(y);
    }
    Ok(y)
}

/// Preimage of `y`; inverse of [`permute`].
pub fn permute_inv(spec: &PermutationSpec, y: u64) -> Result<u64> {
    if y >= spec.domain_size {
        return Err(Error::IndexOutOfRange {
            index: y,
            n: spec.domain_size,
        });
    }
    let mut x = spec.feistel_inv(y);
    while x >= spec.domain_size {
        x = spec.feistel_inv(x);
    }
    Ok(x)
}

/// Renders a 128-bit key as 32 lowercase hex characters.
pub fn key_to_hex(key: u128) -> String {
    format!("{key:032x}")
}

/// Parses a key rendered by [`key_to_hex`].
pub fn key_from_hex(s: &str) -> Result<u128> {
    if s.len() != 32 {
        return Err(Error::BadConfig {
            reason: format!("key must be 32 hex characters, got {}", s.len()),
        });
    }
    u128::from_str_radix(s, 16).map_err(|e| Error::BadConfig {
        reason: format!("invalid hex key: {e}"),
    })
}
