//! Full-vector encode and decode: permute, partition into chunks, race
//! each chunk, and reassemble coordinates on demand.
//!
//! Encoding permutes every non-trivial index through the shared public
//! permutation, splits the permuted domain into `m` contiguous chunks of
//! stride `s = ceil(n / m)`, and runs one exponential race per chunk. The
//! message is the list of winner indices; any coordinate of the noisy
//! vector is recoverable from its chunk's winner alone, in constant time.
//!
//! The chunk count `m` is derived from the number of non-trivial entries
//! (`m = ceil(beta * eps * d)`), so the message shape itself reveals `d`
//! (a node degree, a rating count). That is inherent to the scheme;
//! callers who consider `d` sensitive must pad it upstream.

use crate::error::{Error, Result};
use crate::prng::{derive_perm_key, permute, PermutationSpec, DEFAULT_FEISTEL_ROUNDS};
use crate::race::{race_encode, race_decode, ChunkEntry, ChunkSpec};
use crate::rr::{PrivacyConfig, ReferenceVector, SparseVector};

/// Everything encoder and decoder share: the master key, the public
/// permutation, the reference vector and the chunk layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicContext {
    master_key: u128,
    perm: PermutationSpec,
    reference: ReferenceVector,
    m: u32,
    s: u64,
}

impl PublicContext {
    /// Builds a context with an explicit chunk count. The permutation key
    /// is derived from the master key.
    pub fn new(
        master_key: u128,
        reference: ReferenceVector,
        cfg: &PrivacyConfig,
        m: u32,
    ) -> Result<Self> {
        let perm_key = derive_perm_key(master_key);
        Self::from_parts(master_key, perm_key, reference, cfg, m)
    }

    /// Builds a context with an independently supplied permutation key
    /// (the deserialization path; the wire header carries both keys).
    pub fn from_parts(
        master_key: u128,
        perm_key: u128,
        reference: ReferenceVector,
        cfg: &PrivacyConfig,
        m: u32,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadConfig {
                reason: "chunk count m must be at least 1".into(),
            });
        }
        if cfg.k != reference.k() {
            return Err(Error::ContextMismatch {
                reason: format!(
                    "config k={} but reference k={}",
                    cfg.k,
                    reference.k()
                ),
            });
        }
        let n = reference.n();
        let s = n.div_ceil(m as u64);
        let perm = PermutationSpec::new(n, perm_key, DEFAULT_FEISTEL_ROUNDS);
        Ok(Self {
            master_key,
            perm,
            reference,
            m,
            s,
        })
    }

    /// Convenience constructor sizing the chunk count for one vector.
    pub fn for_vector(
        master_key: u128,
        reference: ReferenceVector,
        cfg: &PrivacyConfig,
        vector: &SparseVector,
    ) -> Result<Self> {
        let m = derive_chunk_count(vector.d(), cfg);
        Self::new(master_key, reference, cfg, m)
    }

    pub fn master_key(&self) -> u128 {
        self.master_key
    }

    pub fn perm(&self) -> &PermutationSpec {
        &self.perm
    }

    pub fn reference(&self) -> &ReferenceVector {
        &self.reference
    }

    pub fn n(&self) -> u64 {
        self.reference.n()
    }

    pub fn k(&self) -> u16 {
        self.reference.k()
    }

    /// Number of chunks.
    pub fn chunk_count(&self) -> u32 {
        self.m
    }

    /// Chunk stride `s = ceil(n / m)`; also the counter stride of the
    /// per-chunk coordinate streams.
    pub fn chunk_stride(&self) -> u64 {
        self.s
    }
}

/// The transmitted message: one winner index per chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedMessage {
    winners: Vec<u64>,
}

impl EncodedMessage {
    pub fn new(winners: Vec<u64>) -> Result<Self> {
        if winners.is_empty() {
            return Err(Error::BadVector {
                reason: "a message holds at least one chunk".into(),
            });
        }
        if winners.iter().any(|&k| k == 0) {
            return Err(Error::BadVector {
                reason: "winner indices are 1-based".into(),
            });
        }
        Ok(Self { winners })
    }

    pub fn winners(&self) -> &[u64] {
        &self.winners
    }

    pub fn chunk_count(&self) -> u32 {
        self.winners.len() as u32
    }
}

/// Per-encode instrumentation for benchmarks.
#[derive(Debug, Clone, Copy, Default)]
pub struct EncodeStats {
    /// Candidates examined across all chunk races.
    pub draws_total: u64,
    /// Largest number of non-trivial entries landing in one chunk.
    pub max_chunk_entries: usize,
}

/// Chunk count for a vector with `d` non-trivial entries:
/// `max(1, ceil(beta * eps * d))`.
pub fn derive_chunk_count(d: usize, cfg: &PrivacyConfig) -> u32 {
    let raw = (cfg.beta * cfg.epsilon * d as f64).ceil();
    if raw < 1.0 {
        return 1;
    }
    debug_assert!(raw < u32::MAX as f64, "chunk count overflow");
    raw as u32
}

/// Encodes a sparse vector into one winner index per chunk.
pub fn encode(
    vector: &SparseVector,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
) -> Result<EncodedMessage> {
    encode_with_stats(vector, cfg, ctx).map(|(msg, _)| msg)
}

/// [`encode`] plus draw-count and chunk-balance instrumentation.
pub fn encode_with_stats(
    vector: &SparseVector,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
) -> Result<(EncodedMessage, EncodeStats)> {
    if vector.n() != ctx.n() {
        return Err(Error::DimensionMismatch {
            vector_n: vector.n(),
            context_n: ctx.n(),
        });
    }
    vector.validate_against(ctx.reference())?;
    if cfg.k != ctx.k() {
        return Err(Error::ContextMismatch {
            reason: format!("config k={} but context k={}", cfg.k, ctx.k()),
        });
    }

    let m = ctx.chunk_count() as usize;
    let s = ctx.chunk_stride();
    let mut per_chunk: Vec<Vec<ChunkEntry>> = vec![Vec::new(); m];
    for &(index, value) in vector.entries() {
        let y = permute(ctx.perm(), index)?;
        let (q, r) = (y / s, y % s);
        per_chunk[q as usize].push(ChunkEntry {
            offset: r,
            value,
            reference: ctx.reference().value_at(index)?,
        });
    }

    let mut stats = EncodeStats::default();
    let mut winners = Vec::with_capacity(m);
    for (q, entries) in per_chunk.into_iter().enumerate() {
        stats.max_chunk_entries = stats.max_chunk_entries.max(entries.len());
        let chunk = ChunkSpec::new(q as u32, s, entries)?;
        let outcome = race_encode(&chunk, cfg, ctx);
        stats.draws_total += outcome.draws_examined;
        winners.push(outcome.winner);
    }
    Ok((EncodedMessage::new(winners)?, stats))
}

/// Decodes the noisy value of coordinate `index`. Constant time: one
/// permutation evaluation, one division and one generator call.
pub fn decode_at(
    msg: &EncodedMessage,
    ctx: &PublicContext,
    cfg: &PrivacyConfig,
    index: u64,
) -> Result<u16> {
    if index >= ctx.n() {
        return Err(Error::IndexOutOfRange {
            index,
            n: ctx.n(),
        });
    }
    if msg.chunk_count() != ctx.chunk_count() {
        return Err(Error::ContextMismatch {
            reason: format!(
                "message has {} chunks but context expects {}",
                msg.chunk_count(),
                ctx.chunk_count()
            ),
        });
    }
    let y = permute(ctx.perm(), index)?;
    let s = ctx.chunk_stride();
    let (q, r) = (y / s, y % s);
    let ref_value = ctx.reference().value_at(index)?;
    race_decode(q as u32, msg.winners()[q as usize], r, ref_value, cfg, ctx)
}

/// Decodes every coordinate; element-wise [`decode_at`].
pub fn decode_all(msg: &EncodedMessage, ctx: &PublicContext, cfg: &PrivacyConfig) -> Result<Vec<u16>> {
    (0..ctx.n()).map(|i| decode_at(msg, ctx, cfg, i)).collect()
}
