//! Compressed randomized response for high-dimensional sparse vectors.
//!
//! A vector of length `n` over a small alphabet, differing from a shared
//! reference at only `d` coordinates, is published under metric
//! differential privacy at a wire cost proportional to `eps * d` instead
//! of `n`. The encoder simulates randomized response through shared
//! randomness: the permuted coordinate domain is split into chunks, each
//! chunk runs an exponential race over candidate draws both parties can
//! regenerate, and only the per-chunk winner indices travel. Decoding any
//! single coordinate is a constant-time generator lookup, and the decoded
//! vector is distributed exactly as plain randomized response applied to
//! the input.
//!
//! Modules follow the pipeline: [`prng`] (keyed counter-based generation
//! and the public permutation), [`rr`] (the randomized-response
//! mechanism itself), [`race`] (per-chunk exact sampling), [`chunker`]
//! (full-vector encode/decode), [`codec`] (the wire format) and [`apps`]
//! (graph, rating and SNP pipelines with unbiased estimators).

pub mod apps;
pub mod chunker;
pub mod codec;
pub mod error;
pub mod prng;
pub mod race;
pub mod rr;

pub use chunker::{
    decode_all, decode_at, derive_chunk_count, encode, encode_with_stats, EncodeStats,
    EncodedMessage, PublicContext,
};
pub use codec::{deserialize, serialize, wire_cost_bits};
pub use error::{Error, Result};
pub use rr::{PrivacyConfig, ReferenceVector, SparseVector};
