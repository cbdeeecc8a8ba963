//! CLI-side file formats and key/seed plumbing.

use std::path::Path;

use srr::error::{Error, Result};
use srr::prng::{uniform_at, GeneratorKey};
use srr::rr::ReferenceVector;

/// Default seed for key derivation when neither `--key` nor `SRR_SEED`
/// is given.
pub const DEFAULT_SEED: u64 = 0x5152_5253;

/// Derives a 128-bit master key from a seed and a run index.
pub fn key_from_seed(seed: u64, run: u64) -> u128 {
    let k = GeneratorKey::new((seed as u128) << 64 | 0x6b65_79, 0x4b45);
    let lo = uniform_at(k, 2 * run);
    let hi = uniform_at(k, 2 * run + 1);
    (lo as u128) | ((hi as u128) << 64)
}

/// The seed used when `--key` is absent: `SRR_SEED` if set, else the
/// built-in default.
pub fn default_seed() -> Result<u64> {
    match std::env::var("SRR_SEED") {
        Ok(v) => v.parse().map_err(|_| Error::BadConfig {
            reason: format!("SRR_SEED must be an unsigned integer, got {v:?}"),
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Parses a reference-vector file: a header `n k`, then either a single
/// line `const <value>` or `n` whitespace-separated symbols.
pub fn parse_reference(path: &Path) -> Result<ReferenceVector> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.display().to_string(),
        line,
        reason,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header line \"n k\"".into()))?;
    let mut it = header.split_whitespace();
    let (n, k): (u64, u16) = match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => (
            a.parse()
                .map_err(|_| parse_err(header_no, format!("invalid length: {a:?}")))?,
            b.parse()
                .map_err(|_| parse_err(header_no, format!("invalid alphabet size: {b:?}")))?,
        ),
        _ => return Err(parse_err(header_no, format!("expected \"n k\", got {header:?}"))),
    };

    let (body_no, body) = lines
        .next()
        .ok_or_else(|| parse_err(header_no, "missing reference body".into()))?;
    let mut tokens: Vec<&str> = body.split_whitespace().collect();
    if tokens.first() == Some(&"const") {
        if tokens.len() != 2 {
            return Err(parse_err(body_no, "expected \"const <value>\"".into()));
        }
        let value: u16 = tokens[1]
            .parse()
            .map_err(|_| parse_err(body_no, format!("invalid symbol: {:?}", tokens[1])))?;
        return ReferenceVector::constant(n, k, value);
    }
    // Dense form: n symbols across the remaining lines.
    let mut values: Vec<u16> = Vec::with_capacity(n as usize);
    let mut push_all = |tokens: &[&str], line: usize| -> Result<()> {
        for t in tokens {
            values.push(
                t.parse()
                    .map_err(|_| parse_err(line, format!("invalid symbol: {t:?}")))?,
            );
        }
        Ok(())
    };
    push_all(&tokens, body_no)?;
    for (line_no, line) in lines {
        tokens = line.split_whitespace().collect();
        push_all(&tokens, line_no)?;
    }
    if values.len() as u64 != n {
        return Err(parse_err(
            body_no,
            format!("dense reference needs {n} symbols, found {}", values.len()),
        ));
    }
    ReferenceVector::dense(k, values)
}

/// Splits a comma-separated numeric grid; rejects empty grids.
pub fn parse_grid<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::BadConfig {
            reason: format!("{what} grid is empty"),
        });
    }
    items
        .into_iter()
        .map(|s| {
            s.parse().map_err(|_| Error::BadConfig {
                reason: format!("invalid {what} grid entry: {s:?}"),
            })
        })
        .collect()
}
