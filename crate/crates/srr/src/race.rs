//! Per-chunk exact simulation of randomized response through a
//! shared-randomness exponential race.
//!
//! Encoder and decoder both see an infinite candidate sequence drawn from
//! the proposal distribution Q (randomized response applied to the
//! reference values). Candidate j carries the j-th arrival time `T_j` of a
//! unit-rate Poisson process and the score `T_j / (dP/dQ)(Z_j)`, where P
//! is randomized response applied to the true values. The encoder
//! transmits only the index `K` of the minimum-score candidate; the
//! induced draw `Z_K` is distributed exactly as P.
//!
//! Two facts keep the search finite and the winner correct:
//! the density ratio never exceeds `e^(eps * d')` for a chunk with `d'`
//! non-trivial entries, and arrival times increase, so once the current
//! best score drops to `T_(j+1) / e^(eps * d')` no later candidate can
//! beat it. Candidates are generated in arrival order, which makes a
//! sequential scan with a running minimum sufficient.
//!
//! Only the `d'` entry offsets of a candidate are ever generated; the
//! remaining coordinates contribute ratio factors of exactly 1 and are
//! regenerated on demand by [`race_decode`].

use crate::chunker::PublicContext;
use crate::error::{Error, Result};
use crate::prng::{exponential_at, uniform_f64_at, GeneratorKey};
use crate::rr::{rr_quantile, PrivacyConfig, EPSILON_CLAMP};

/// Stream label carrying candidate coordinate draws; decode reads only this.
pub const STREAM_COORDS: u32 = 0;
/// Stream label carrying arrival-time interarrivals; encoder-only.
pub const STREAM_ARRIVALS: u32 = 1;

/// One non-trivial coordinate of a chunk: its offset within the chunk,
/// the input value and the reference value at that coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkEntry {
    pub offset: u64,
    pub value: u16,
    pub reference: u16,
}

/// The slice of the permuted input vector handled by one race.
/// `chunk_size` is the global stride `s`; the trailing chunk keeps the
/// full stride even when it is logically shorter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkSpec {
    pub chunk_index: u32,
    pub chunk_size: u64,
    pub entries: Vec<ChunkEntry>,
}

impl ChunkSpec {
    pub fn new(chunk_index: u32, chunk_size: u64, entries: Vec<ChunkEntry>) -> Result<Self> {
        if entries.len() as u64 > chunk_size {
            return Err(Error::BadVector {
                reason: format!(
                    "chunk {chunk_index} holds {} entries but has size {chunk_size}",
                    entries.len()
                ),
            });
        }
        let mut offsets: Vec<u64> = entries.iter().map(|e| e.offset).collect();
        offsets.sort_unstable();
        for w in offsets.windows(2) {
            if w[0] == w[1] {
                return Err(Error::BadVector {
                    reason: format!("duplicate offset {} in chunk {chunk_index}", w[0]),
                });
            }
        }
        for e in &entries {
            if e.offset >= chunk_size {
                return Err(Error::IndexOutOfRange {
                    index: e.offset,
                    n: chunk_size,
                });
            }
            if e.value == e.reference {
                return Err(Error::TrivialEntry {
                    index: e.offset,
                    value: e.value,
                });
            }
        }
        Ok(Self {
            chunk_index,
            chunk_size,
            entries,
        })
    }

    pub fn d_prime(&self) -> usize {
        self.entries.len()
    }
}

/// Result of one race: the transmitted winner index (1-based), how many
/// candidates were examined before the stopping rule fired, and the
/// winning score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceOutcome {
    pub winner: u64,
    pub draws_examined: u64,
    pub winner_score: f64,
}

/// Diagnostics recorded by [`race_encode_traced`].
#[derive(Debug, Clone, Default)]
pub struct RaceTrace {
    /// Symbols the winning candidate carried at the entry offsets,
    /// in entry order.
    pub winner_draws: Vec<u16>,
    /// Score of every examined candidate, in arrival order.
    pub scores: Vec<f64>,
    /// `T_(j+1) / e^(eps*d')` at the moment the race stopped.
    pub stop_bound: f64,
}

/// Runs the race for one chunk and returns the winner index.
///
/// The race aborts (panics) after `1e6 * e^(eps*d')` candidates; the
/// stopping rule makes that unreachable unless the implementation is
/// broken, so hitting it is a bug, not a data condition.
pub fn race_encode(chunk: &ChunkSpec, cfg: &PrivacyConfig, ctx: &PublicContext) -> RaceOutcome {
    run_race(chunk, cfg, ctx, None)
}

/// [`race_encode`] plus per-candidate diagnostics.
pub fn race_encode_traced(
    chunk: &ChunkSpec,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
) -> (RaceOutcome, RaceTrace) {
    let mut trace = RaceTrace::default();
    let outcome = run_race(chunk, cfg, ctx, Some(&mut trace));
    (outcome, trace)
}

fn run_race(
    chunk: &ChunkSpec,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
    mut trace: Option<&mut RaceTrace>,
) -> RaceOutcome {
    let d_prime = chunk.entries.len();
    let eps = cfg.epsilon.min(EPSILON_CLAMP);
    let e_pos = eps.exp();
    let e_neg = (-eps).exp();
    let sup_ratio = (eps * d_prime as f64).exp();
    let ceiling = (1e6 * sup_ratio).min(1e18) as u64;

    let coord_key = GeneratorKey::for_chunk(ctx.master_key(), chunk.chunk_index, STREAM_COORDS);
    let time_key = GeneratorKey::for_chunk(ctx.master_key(), chunk.chunk_index, STREAM_ARRIVALS);

    let mut best_score = f64::INFINITY;
    let mut best_index = 0u64;
    let mut scratch: Vec<u16> = vec![0; d_prime];
    let mut best_draws: Vec<u16> = vec![0; d_prime];

    let mut arrival = exponential_at(time_key, 0);
    let mut j = 1u64;
    loop {
        // Candidate j: generate only the entry offsets, at the counters
        // the decoder will use (stride * j + offset).
        let mut ratio = 1.0;
        for (slot, entry) in scratch.iter_mut().zip(&chunk.entries) {
            let counter = chunk
                .chunk_size
                .checked_mul(j)
                .and_then(|base| base.checked_add(entry.offset))
                .expect("race counter overflowed u64");
            let z = rr_quantile(uniform_f64_at(coord_key, counter), entry.reference, cfg);
            if z == entry.value {
                ratio *= e_pos;
            } else if z == entry.reference {
                ratio *= e_neg;
            }
            *slot = z;
        }
        let score = arrival / ratio;
        if score < best_score {
            best_score = score;
            best_index = j;
            best_draws.copy_from_slice(&scratch);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.scores.push(score);
        }

        let next_arrival = arrival + exponential_at(time_key, j);
        if best_score <= next_arrival / sup_ratio {
            if let Some(t) = trace.as_deref_mut() {
                t.stop_bound = next_arrival / sup_ratio;
                t.winner_draws = best_draws.clone();
            }
            return RaceOutcome {
                winner: best_index,
                draws_examined: j,
                winner_score: best_score,
            };
        }
        assert!(
            j < ceiling,
            "race for chunk {} exceeded the draw ceiling ({ceiling}) at eps={eps}, d'={d_prime}; \
             the stopping rule is broken",
            chunk.chunk_index
        );
        arrival = next_arrival;
        j += 1;
    }
}

/// Regenerates one coordinate of a chunk's winning draw: the offset-`r`
/// symbol of candidate `winner`, drawn from the reporting distribution of
/// `ref_value`. Constant time; touches only the coordinate stream.
pub fn race_decode(
    chunk_index: u32,
    winner: u64,
    offset: u64,
    ref_value: u16,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
) -> Result<u16> {
    if winner == 0 {
        return Err(Error::WireFormat {
            reason: "winner index must be at least 1".into(),
        });
    }
    if offset >= ctx.chunk_stride() {
        return Err(Error::IndexOutOfRange {
            index: offset,
            n: ctx.chunk_stride(),
        });
    }
    if ref_value >= cfg.k {
        return Err(Error::SymbolOutOfAlphabet {
            symbol: ref_value,
            k: cfg.k,
        });
    }
    let coord_key = GeneratorKey::for_chunk(ctx.master_key(), chunk_index, STREAM_COORDS);
    let counter = ctx
        .chunk_stride()
        .checked_mul(winner)
        .and_then(|base| base.checked_add(offset))
        .ok_or_else(|| Error::WireFormat {
            reason: format!("decode counter overflow: stride={} K={winner}", ctx.chunk_stride()),
        })?;
    Ok(rr_quantile(uniform_f64_at(coord_key, counter), ref_value, cfg))
}
