//! Bit-exact serialization of encoded messages.
//!
//! Winner indices are written as Elias-delta codes, concatenated MSB-first
//! and zero-padded to a byte boundary, behind a fixed 75-byte header:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SRR1"
//! 4       1     version (1)
//! 5       8     n, u64 LE
//! 13      2     k, u16 LE
//! 15      4     m, u32 LE
//! 19      8     epsilon, f64 LE
//! 27      8     alpha, f64 LE
//! 35      8     beta, f64 LE
//! 43      16    master key, u128 LE
//! 59      16    permutation key, u128 LE
//! 75      ...   payload: delta(K_1) .. delta(K_m), zero-padded
//! ```
//!
//! Everything needed to decode travels in the file except the reference
//! vector, which both parties hold beforehand. The payload bit count
//! (header excluded) is the communication metric reported everywhere.

use crate::chunker::{EncodedMessage, PublicContext};
use crate::error::{Error, Result};
use crate::rr::{PrivacyConfig, ReferenceVector};

pub const WIRE_MAGIC: [u8; 4] = *b"SRR1";
pub const WIRE_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 75;

/// MSB-first bit sink backed by a byte vector.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        let slot = (self.bit_len / 8) as usize;
        if slot == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[slot] |= 0x80 >> (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for shift in (0..width).rev() {
            self.push_bit((value >> shift) & 1 == 1);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Consumes the writer, returning the zero-padded bytes and the exact
    /// bit count written.
    pub fn finish(self) -> (Vec<u8>, u64) {
        (self.bytes, self.bit_len)
    }
}

/// MSB-first bit source over a byte slice.
#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let slot = (self.pos / 8) as usize;
        if slot >= self.bytes.len() {
            return Err(Error::BitstreamUnderrun);
        }
        let bit = self.bytes[slot] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Ok(value)
    }

    pub fn bits_consumed(&self) -> u64 {
        self.pos
    }
}

/// Appends the Elias-delta code of `value` (which must be at least 1).
pub fn delta_encode(value: u64, sink: &mut BitWriter) -> Result<()> {
    if value == 0 {
        return Err(Error::WireFormat {
            reason: "delta code is undefined for 0".into(),
        });
    }
    let len = 64 - value.leading_zeros(); // bit length of value
    let len_len = 32 - len.leading_zeros(); // bit length of the length
    for _ in 0..len_len - 1 {
        sink.push_bit(false);
    }
    sink.push_bits(len as u64, len_len);
    sink.push_bits(value & !(1u64 << (len - 1)), len - 1);
    Ok(())
}

/// Reads one Elias-delta code; the exact inverse of [`delta_encode`].
pub fn delta_decode(source: &mut BitReader<'_>) -> Result<u64> {
    let mut zeros = 0u32;
    while !source.read_bit()? {
        zeros += 1;
        if zeros > 6 {
            // The length field of a u64 never needs more than 7 bits.
            return Err(Error::WireFormat {
                reason: "delta code length prefix too long".into(),
            });
        }
    }
    let len = (1u64 << zeros) | source.read_bits(zeros)?;
    let low = source.read_bits(len as u32 - 1)?;
    Ok((1u64 << (len - 1)) | low)
}

/// Exact bit length of the delta code:
/// `floor(log2 K) + 2 * floor(log2(floor(log2 K) + 1)) + 1`.
pub fn delta_code_len(value: u64) -> Result<u32> {
    if value == 0 {
        return Err(Error::WireFormat {
            reason: "delta code is undefined for 0".into(),
        });
    }
    let f = 63 - value.leading_zeros();
    let g = 31 - (f + 1).leading_zeros();
    Ok(f + 2 * g + 1)
}

/// Payload cost of a message in bits, excluding the header (shared setup
/// is not counted, only the transmitted winner indices).
pub fn wire_cost_bits(msg: &EncodedMessage) -> u64 {
    msg.winners()
        .iter()
        .map(|&k| delta_code_len(k).expect("winners are nonzero") as u64)
        .sum()
}

/// Serializes a message with its context and configuration into the wire
/// format above.
pub fn serialize(msg: &EncodedMessage, ctx: &PublicContext, cfg: &PrivacyConfig) -> Result<Vec<u8>> {
    if msg.chunk_count() != ctx.chunk_count() {
        return Err(Error::ContextMismatch {
            reason: format!(
                "message has {} chunks but context expects {}",
                msg.chunk_count(),
                ctx.chunk_count()
            ),
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + msg.winners().len());
    out.extend_from_slice(&WIRE_MAGIC);
    out.push(WIRE_VERSION);
    out.extend_from_slice(&ctx.n().to_le_bytes());
    out.extend_from_slice(&ctx.k().to_le_bytes());
    out.extend_from_slice(&ctx.chunk_count().to_le_bytes());
    out.extend_from_slice(&cfg.epsilon.to_le_bytes());
    out.extend_from_slice(&cfg.alpha.to_le_bytes());
    out.extend_from_slice(&cfg.beta.to_le_bytes());
    out.extend_from_slice(&ctx.master_key().to_le_bytes());
    out.extend_from_slice(&ctx.perm().perm_key().to_le_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);

    let mut payload = BitWriter::new();
    for &k in msg.winners() {
        delta_encode(k, &mut payload)?;
    }
    let (bytes, _) = payload.finish();
    out.extend_from_slice(&bytes);
    Ok(out)
}

/// The fixed-size header fields of a wire message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireHeader {
    pub n: u64,
    pub k: u16,
    pub m: u32,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub master_key: u128,
    pub perm_key: u128,
}

/// Validates the magic and version and reads the header fields without
/// touching the payload.
pub fn wire_header(bytes: &[u8]) -> Result<WireHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::WireFormat {
            reason: format!("file too short: {} bytes", bytes.len()),
        });
    }
    if bytes[0..4] != WIRE_MAGIC {
        return Err(Error::WireFormat {
            reason: "bad magic".into(),
        });
    }
    if bytes[4] != WIRE_VERSION {
        return Err(Error::WireFormat {
            reason: format!("unsupported version {}", bytes[4]),
        });
    }
    fn take<const W: usize>(bytes: &[u8], start: usize) -> [u8; W] {
        bytes[start..start + W].try_into().expect("sized header field")
    }
    Ok(WireHeader {
        n: u64::from_le_bytes(take(bytes, 5)),
        k: u16::from_le_bytes(take(bytes, 13)),
        m: u32::from_le_bytes(take(bytes, 15)),
        epsilon: f64::from_le_bytes(take(bytes, 19)),
        alpha: f64::from_le_bytes(take(bytes, 27)),
        beta: f64::from_le_bytes(take(bytes, 35)),
        master_key: u128::from_le_bytes(take(bytes, 43)),
        perm_key: u128::from_le_bytes(take(bytes, 59)),
    })
}

/// Parses a wire message. The reference vector is the one piece of state
/// the format deliberately omits; it must match the header's `n` and `k`.
pub fn deserialize(
    bytes: &[u8],
    reference: ReferenceVector,
) -> Result<(EncodedMessage, PublicContext, PrivacyConfig)> {
    let header = wire_header(bytes)?;
    let cfg = PrivacyConfig::new(header.epsilon, header.k, header.alpha, header.beta)?;
    if reference.n() != header.n || reference.k() != header.k {
        return Err(Error::ContextMismatch {
            reason: format!(
                "header says n={}, k={} but reference has n={}, k={}",
                header.n,
                header.k,
                reference.n(),
                reference.k()
            ),
        });
    }
    let m = header.m;
    let ctx = PublicContext::from_parts(header.master_key, header.perm_key, reference, &cfg, m)?;

    let payload = &bytes[HEADER_LEN..];
    let mut reader = BitReader::new(payload);
    let mut winners = Vec::with_capacity(m as usize);
    for _ in 0..m {
        winners.push(delta_decode(&mut reader)?);
    }
    // Nothing but zero padding may follow the last code.
    let consumed = reader.bits_consumed();
    if payload.len() as u64 != consumed.div_ceil(8) {
        return Err(Error::WireFormat {
            reason: "trailing bytes after payload".into(),
        });
    }
    for bit_pos in consumed..(payload.len() as u64 * 8) {
        let byte = payload[(bit_pos / 8) as usize];
        if byte & (0x80 >> (bit_pos % 8)) != 0 {
            return Err(Error::WireFormat {
                reason: "nonzero padding bits".into(),
            });
        }
    }
    Ok((EncodedMessage::new(winners)?, ctx, cfg))
}
