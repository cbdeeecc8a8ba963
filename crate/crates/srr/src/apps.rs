//! Application pipelines: adjacency-list publication with triangle
//! counting, common-item estimation between two users, and synthetic SNP
//! vectors, plus the file ingestion they need.
//!
//! Estimators work on decoded noisy data through the standard
//! randomized-response inversion, so they are unbiased as long as the
//! underlying encodings use independent randomness. The classic
//! uncompressed pipeline is provided as the comparison baseline; since
//! decoding reproduces the randomized-response distribution exactly, both
//! pipelines induce the same estimator law at equal budget.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::chunker::{decode_at, encode, EncodedMessage, PublicContext};
use crate::error::{Error, Result};
use crate::prng::GeneratorKey;
use crate::rr::{sample_rr, PrivacyConfig, ReferenceVector, SparseVector};

/// Stream label for the uncompressed baseline, disjoint from the chunk
/// streams used by the race.
const STREAM_CLASSIC: u32 = 2;

/// An undirected graph given by `node_count` and edges `(u, v)` with
/// `u < v`, no self-loops, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListGraph {
    node_count: u64,
    edges: Vec<(u64, u64)>,
}

impl EdgeListGraph {
    pub fn new(node_count: u64, raw_edges: Vec<(u64, u64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (a, b) in raw_edges {
            if a == b {
                return Err(Error::BadVector {
                    reason: format!("self-loop at node {a}"),
                });
            }
            if a >= node_count || b >= node_count {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    n: node_count,
                });
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::BadVector {
                    reason: format!("duplicate edge ({}, {})", e.0, e.1),
                });
            }
            edges.push(e);
        }
        Ok(Self { node_count, edges })
    }

    /// The complete graph on `n` nodes.
    pub fn complete(n: u64) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self {
            node_count: n,
            edges,
        }
    }

    pub fn node_count(&self) -> u64 {
        self.node_count
    }

    pub fn edges(&self) -> &[(u64, u64)] {
        &self.edges
    }

    /// Neighbors of `u` with indices strictly below `u`, ascending.
    pub fn lower_neighbors(&self, u: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if b == u {
                    Some(a)
                } else if a == u && b < u {
                    Some(b)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Exact triangle count, for measuring estimator error.
    pub fn triangle_count(&self) -> u64 {
        let set: HashSet<(u64, u64)> = self.edges.iter().copied().collect();
        let mut count = 0;
        for u in 0..self.node_count {
            for v in (u + 1)..self.node_count {
                if !set.contains(&(u, v)) {
                    continue;
                }
                for w in (v + 1)..self.node_count {
                    if set.contains(&(v, w)) && set.contains(&(u, w)) {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// Per-location variant frequencies for synthetic SNP generation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    freqs: Vec<f64>,
}

impl FrequencyTable {
    /// Accepts any frequencies in `[0, 1)`; apply [`Self::retain_rare`]
    /// to enforce the rare-variant retention window.
    pub fn from_frequencies(freqs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = freqs.iter().find(|&&p| !(0.0..1.0).contains(&p)) {
            return Err(Error::BadVector {
                reason: format!("frequency {bad} outside [0, 1)"),
            });
        }
        Ok(Self { freqs })
    }

    /// Keeps only locations with frequency in `(1e-4, 1e-2)`: common
    /// variations are published by plain randomized response instead, and
    /// this window is where compression pays off.
    pub fn retain_rare(self) -> Self {
        Self {
            freqs: self
                .freqs
                .into_iter()
                .filter(|&p| p > 1e-4 && p < 1e-2)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }
}

/// Unbiased inversion of one binary randomized-response report:
/// `(1{z != c} - q) / (p - q)` with `p = e^eps/(e^eps+1)`,
/// `q = 1/(e^eps+1)`. Its expectation is the true indicator `1{v != c}`.
pub fn debias_bit(z: u16, c: u16, cfg: &PrivacyConfig) -> Result<f64> {
    if cfg.k != 2 {
        return Err(Error::BadConfig {
            reason: format!("debiasing requires k=2, got k={}", cfg.k),
        });
    }
    if cfg.epsilon == 0.0 {
        return Err(Error::BadConfig {
            reason: "estimators need epsilon > 0 (inversion denominator vanishes)".into(),
        });
    }
    if z > 1 || c > 1 {
        return Err(Error::SymbolOutOfAlphabet {
            symbol: z.max(c),
            k: 2,
        });
    }
    let e = cfg.epsilon.exp();
    let q = 1.0 / (e + 1.0);
    let p_minus_q = (e - 1.0) / (e + 1.0);
    let indicator = if z != c { 1.0 } else { 0.0 };
    Ok((indicator - q) / p_minus_q)
}

fn check_pair_context(a: &PublicContext, b: &PublicContext) -> Result<()> {
    if a.n() != b.n() || a.k() != b.k() || a.reference() != b.reference() {
        return Err(Error::ContextMismatch {
            reason: "common-item messages must share n, k and the reference vector".into(),
        });
    }
    if a.master_key() == b.master_key() {
        return Err(Error::ContextMismatch {
            reason: "the two encodings must use independent randomness (identical master keys)"
                .into(),
        });
    }
    Ok(())
}

/// Shared core of the common-items estimator: sums the product of the
/// debiased bits of both users over every coordinate.
fn common_items_from(
    bit_a: impl Fn(u64) -> Result<u16>,
    bit_b: impl Fn(u64) -> Result<u16>,
    reference: &ReferenceVector,
    cfg: &PrivacyConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..reference.n() {
        let c = reference.value_at(i)?;
        total += debias_bit(bit_a(i)?, c, cfg)? * debias_bit(bit_b(i)?, c, cfg)?;
    }
    Ok(total)
}

/// Unbiased estimate of `|{i : v_A[i] = v_B[i] = 1}|` from two encoded
/// binary vectors with all-zero-style references.
pub fn common_items(
    msg_a: &EncodedMessage,
    ctx_a: &PublicContext,
    msg_b: &EncodedMessage,
    ctx_b: &PublicContext,
    cfg: &PrivacyConfig,
) -> Result<f64> {
    check_pair_context(ctx_a, ctx_b)?;
    common_items_from(
        |i| decode_at(msg_a, ctx_a, cfg, i),
        |i| decode_at(msg_b, ctx_b, cfg, i),
        ctx_a.reference(),
        cfg,
    )
}

/// Baseline variant of [`common_items`] over two dense noisy vectors.
pub fn common_items_dense(
    za: &[u16],
    zb: &[u16],
    reference: &ReferenceVector,
    cfg: &PrivacyConfig,
) -> Result<f64> {
    if za.len() as u64 != reference.n() || zb.len() as u64 != reference.n() {
        return Err(Error::LengthMismatch {
            left: za.len(),
            right: zb.len(),
        });
    }
    common_items_from(
        |i| Ok(za[i as usize]),
        |i| Ok(zb[i as usize]),
        reference,
        cfg,
    )
}

/// Encodes node `u`'s connections to lower-indexed nodes as a length-`u`
/// binary vector against the all-zero reference. Publishing only the
/// lower half covers every undirected edge exactly once across nodes.
pub fn publish_adjacency(
    graph: &EdgeListGraph,
    u: u64,
    cfg: &PrivacyConfig,
    ctx: &PublicContext,
) -> Result<EncodedMessage> {
    if u >= graph.node_count() {
        return Err(Error::IndexOutOfRange {
            index: u,
            n: graph.node_count(),
        });
    }
    if ctx.n() != u {
        return Err(Error::ContextMismatch {
            reason: format!("node {u} needs a context with n={u}, got n={}", ctx.n()),
        });
    }
    let entries: Vec<(u64, u16)> = graph.lower_neighbors(u).into_iter().map(|v| (v, 1)).collect();
    let vector = SparseVector::new(u, 2, entries)?;
    encode(&vector, cfg, ctx)
}

/// Builds one publication context per node for [`publish_adjacency`];
/// node `u`'s chunk count is sized for its lower degree, and every node
/// gets an independent master key derived from `base_key`.
pub fn adjacency_contexts(
    graph: &EdgeListGraph,
    cfg: &PrivacyConfig,
    base_key: u128,
) -> Result<Vec<PublicContext>> {
    (0..graph.node_count())
        .map(|u| {
            let reference = ReferenceVector::constant(u, 2, 0)?;
            let d = graph.lower_neighbors(u).len();
            let m = crate::chunker::derive_chunk_count(d, cfg);
            PublicContext::new(per_node_key(base_key, u), reference, cfg, m)
        })
        .collect()
}

fn per_node_key(base_key: u128, node: u64) -> u128 {
    let k = GeneratorKey::new(base_key, STREAM_CLASSIC + 1);
    let lo = crate::prng::uniform_at(k, 2 * node);
    let hi = crate::prng::uniform_at(k, 2 * node + 1);
    (lo as u128) | ((hi as u128) << 64)
}

fn triangle_estimate_from(
    edge_bit: impl Fn(u64, u64) -> Result<u16>,
    node_count: u64,
    cfg: &PrivacyConfig,
) -> Result<f64> {
    // Debias the full upper triangle once, then sum over triples.
    let n = node_count as usize;
    let mut e_hat = vec![0.0f64; n * n];
    for v in 0..node_count {
        for u in 0..v {
            let z = edge_bit(u, v)?;
            let val = debias_bit(z, 0, cfg)?;
            e_hat[(u * node_count + v) as usize] = val;
        }
    }
    let at = |u: u64, v: u64| e_hat[(u * node_count + v) as usize];
    let mut total = 0.0;
    for u in 0..node_count {
        for v in (u + 1)..node_count {
            let uv = at(u, v);
            for w in (v + 1)..node_count {
                total += uv * at(v, w) * at(u, w);
            }
        }
    }
    Ok(total)
}

/// Unbiased triangle-count estimate from one adjacency message per node.
/// Distinct edges are perturbed independently, so the product of three
/// debiased edges is unbiased for each triple.
pub fn triangle_estimate(
    messages: &[EncodedMessage],
    contexts: &[PublicContext],
    cfg: &PrivacyConfig,
) -> Result<f64> {
    if messages.len() != contexts.len() {
        return Err(Error::LengthMismatch {
            left: messages.len(),
            right: contexts.len(),
        });
    }
    let node_count = messages.len() as u64;
    triangle_estimate_from(
        |u, v| decode_at(&messages[v as usize], &contexts[v as usize], cfg, u),
        node_count,
        cfg,
    )
}

/// Baseline variant of [`triangle_estimate`]: `rows[v]` is node `v`'s
/// dense noisy lower-adjacency row of length `v`.
pub fn triangle_estimate_dense(rows: &[Vec<u16>], cfg: &PrivacyConfig) -> Result<f64> {
    for (v, row) in rows.iter().enumerate() {
        if row.len() != v {
            return Err(Error::LengthMismatch {
                left: row.len(),
                right: v,
            });
        }
    }
    triangle_estimate_from(
        |u, v| Ok(rows[v as usize][u as usize]),
        rows.len() as u64,
        cfg,
    )
}

/// Applies plain randomized response to every coordinate of a sparse
/// vector; the uncompressed baseline pipeline.
pub fn classic_rr(
    vector: &SparseVector,
    reference: &ReferenceVector,
    cfg: &PrivacyConfig,
    master_key: u128,
) -> Result<Vec<u16>> {
    vector.validate_against(reference)?;
    let key = GeneratorKey::new(master_key, STREAM_CLASSIC);
    let mut entry_iter = vector.entries().iter().peekable();
    let mut out = Vec::with_capacity(vector.n() as usize);
    for i in 0..vector.n() {
        let true_value = match entry_iter.peek() {
            Some(&&(index, value)) if index == i => {
                entry_iter.next();
                value
            }
            _ => reference.value_at(i)?,
        };
        out.push(sample_rr(true_value, cfg, key, i)?);
    }
    Ok(out)
}

/// Draws a synthetic SNP vector: an independent Bernoulli per location,
/// with the 1s stored as entries. Deterministic in `seed`.
pub fn synth_snp(table: &FrequencyTable, seed: u64) -> SparseVector {
    let key = GeneratorKey::new(seed as u128, STREAM_CLASSIC + 2);
    let entries: Vec<(u64, u16)> = table
        .frequencies()
        .iter()
        .enumerate()
        .filter_map(|(loc, &p)| {
            if crate::prng::uniform_f64_at(key, loc as u64) < p {
                Some((loc as u64, 1))
            } else {
                None
            }
        })
        .collect();
    SparseVector::new(table.len() as u64, 2, entries).expect("entries are sorted and in range")
}

/// Converts a rating vector to rated/unrated form: every entry becomes a
/// 1 against an all-zero reference, matching a distance that counts items
/// rated by only one side.
pub fn binarize(vector: &SparseVector) -> SparseVector {
    let entries = vector.entries().iter().map(|&(i, _)| (i, 1)).collect();
    SparseVector::new(vector.n(), 2, entries).expect("indices unchanged")
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_field<T: std::str::FromStr>(
    token: &str,
    path: &Path,
    line: usize,
    what: &str,
) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        path: path.display().to_string(),
        line,
        reason: format!("invalid {what}: {token:?}"),
    })
}

/// Parses a sparse rating vector: a header line `n k`, then one
/// `index value` pair per line. Entries may appear in any order; blank
/// lines and `#` comments are skipped.
pub fn ingest_ratings(path: &Path) -> Result<SparseVector> {
    let text = read_to_string(path)?;
    let mut lines = numbered_lines(&text);
    let (header_no, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        line: 1,
        reason: "missing header line \"n k\"".into(),
    })?;
    let mut it = header.split_whitespace();
    let (n, k) = match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => (
            parse_field::<u64>(a, path, header_no, "vector length")?,
            parse_field::<u16>(b, path, header_no, "alphabet size")?,
        ),
        _ => {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: header_no,
                reason: format!("expected header \"n k\", got {header:?}"),
            })
        }
    };
    let mut entries = Vec::new();
    for (line_no, line) in lines {
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => entries.push((
                parse_field::<u64>(a, path, line_no, "index")?,
                parse_field::<u16>(b, path, line_no, "value")?,
            )),
            _ => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_no,
                    reason: format!("expected \"index value\", got {line:?}"),
                })
            }
        }
    }
    entries.sort_unstable_by_key(|&(i, _)| i);
    SparseVector::new(n, k, entries).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        reason: e.to_string(),
    })
}

/// Parses an undirected edge list: a header line `N`, then one `u v`
/// pair per line. Self-loops and duplicates are rejected with their line
/// number.
pub fn ingest_edges(path: &Path) -> Result<EdgeListGraph> {
    let text = read_to_string(path)?;
    let mut lines = numbered_lines(&text);
    let (header_no, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        line: 1,
        reason: "missing header line \"N\"".into(),
    })?;
    let node_count: u64 = parse_field(header.trim(), path, header_no, "node count")?;
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (
                parse_field::<u64>(a, path, line_no, "node")?,
                parse_field::<u64>(b, path, line_no, "node")?,
            ),
            _ => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_no,
                    reason: format!("expected \"u v\", got {line:?}"),
                })
            }
        };
        if a == b {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                reason: format!("self-loop at node {a}"),
            });
        }
        if a >= node_count || b >= node_count {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                reason: format!("node id out of range: {}", a.max(b)),
            });
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                reason: format!("duplicate edge ({a}, {b})"),
            });
        }
        edges.push((a, b));
    }
    EdgeListGraph::new(node_count, edges)
}

/// Parses one frequency per line for [`synth_snp`].
pub fn ingest_frequencies(path: &Path) -> Result<FrequencyTable> {
    let text = read_to_string(path)?;
    let mut freqs = Vec::new();
    for (line_no, line) in numbered_lines(&text) {
        let p: f64 = parse_field(line.trim(), path, line_no, "frequency")?;
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                reason: format!("frequency {p} outside [0, 1)"),
            });
        }
        freqs.push(p);
    }
    FrequencyTable::from_frequencies(freqs)
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn cfg(epsilon: f64) -> PrivacyConfig {
        PrivacyConfig::new(epsilon, 2, 2.0, 2.0).unwrap()
    }

    #[test]
    fn debias_noiseless_limit() {
        let c = cfg(50.0);
        assert!(debias_bit(0, 0, &c).unwrap().abs() < 1e-15);
        assert!((debias_bit(1, 0, &c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn debias_agreeing_report_value() {
        let c = cfg(1.0);
        let expected = -1.0 / (1f64.exp() - 1.0);
        assert!((debias_bit(0, 0, &c).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn debias_rejects_bad_config() {
        let c3 = PrivacyConfig::new(1.0, 3, 2.0, 2.0).unwrap();
        assert!(debias_bit(0, 0, &c3).is_err());
        let c0 = cfg(0.0);
        assert!(debias_bit(0, 0, &c0).is_err());
    }

    #[test]
    fn graph_construction_and_lower_neighbors() {
        let g = EdgeListGraph::new(6, vec![(0, 1), (5, 2), (3, 4)]).unwrap();
        assert_eq!(g.lower_neighbors(5), vec![2]);
        assert_eq!(g.lower_neighbors(0), Vec::<u64>::new());
        assert!(EdgeListGraph::new(3, vec![(1, 1)]).is_err());
        assert!(EdgeListGraph::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(EdgeListGraph::new(3, vec![(0, 3)]).is_err());
    }

    #[test]
    fn complete_graph_triangles() {
        assert_eq!(EdgeListGraph::complete(6).triangle_count(), 20);
        assert_eq!(EdgeListGraph::complete(3).triangle_count(), 1);
        let path = EdgeListGraph::new(7, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.triangle_count(), 0);
    }

    #[test]
    fn star_center_publishes_full_degree() {
        let n = 8u64;
        let edges: Vec<(u64, u64)> = (0..n - 1).map(|u| (u, n - 1)).collect();
        let g = EdgeListGraph::new(n, edges).unwrap();
        assert_eq!(g.lower_neighbors(n - 1).len() as u64, n - 1);
    }

    #[test]
    fn path_graph_node5_has_entry_4() {
        let edges: Vec<(u64, u64)> = (0..9).map(|u| (u, u + 1)).collect();
        let g = EdgeListGraph::new(10, edges).unwrap();
        assert_eq!(g.lower_neighbors(5), vec![4]);
    }

    #[test]
    fn adjacency_publication_shapes() {
        let c = cfg(1.0);
        let g = EdgeListGraph::complete(4);
        let ctxs = adjacency_contexts(&g, &c, 0xbeef).unwrap();
        // Node 0 has no lower neighbors: d = 0, one chunk.
        let msg0 = publish_adjacency(&g, 0, &c, &ctxs[0]).unwrap();
        assert_eq!(msg0.chunk_count(), 1);
        // Node 3 has 3 lower neighbors.
        let msg3 = publish_adjacency(&g, 3, &c, &ctxs[3]).unwrap();
        assert_eq!(msg3.chunk_count(), 6);
        // Wrong context length is rejected.
        assert!(publish_adjacency(&g, 3, &c, &ctxs[2]).is_err());
    }

    #[test]
    fn lower_triangular_covers_each_edge_once() {
        let g = EdgeListGraph::complete(7);
        let mut covered = HashSet::new();
        for u in 0..7 {
            for v in g.lower_neighbors(u) {
                assert!(covered.insert((v, u)));
            }
        }
        assert_eq!(covered.len(), g.edges().len());
    }

    #[test]
    fn common_items_rejects_mismatch_and_shared_keys() {
        let c = cfg(1.0);
        let reference = ReferenceVector::constant(10, 2, 0).unwrap();
        let v = SparseVector::new(10, 2, vec![(1, 1)]).unwrap();
        let ctx_a = PublicContext::for_vector(1, reference.clone(), &c, &v).unwrap();
        let ctx_b = PublicContext::for_vector(2, reference.clone(), &c, &v).unwrap();
        let msg_a = encode(&v, &c, &ctx_a).unwrap();
        let msg_b = encode(&v, &c, &ctx_b).unwrap();
        assert!(common_items(&msg_a, &ctx_a, &msg_b, &ctx_b, &c).is_ok());
        // Identical master keys must be rejected.
        assert!(common_items(&msg_a, &ctx_a, &msg_a, &ctx_a, &c).is_err());
    }

    #[test]
    fn synth_snp_degenerate_and_deterministic() {
        let zeros = FrequencyTable::from_frequencies(vec![0.0; 100]).unwrap();
        assert_eq!(synth_snp(&zeros, 1).d(), 0);
        let table = FrequencyTable::from_frequencies(vec![0.5; 64]).unwrap();
        assert_eq!(synth_snp(&table, 9), synth_snp(&table, 9));
    }

    #[test]
    fn retain_rare_window() {
        let t = FrequencyTable::from_frequencies(vec![0.0, 5e-5, 2e-4, 5e-3, 1e-2, 0.5])
            .unwrap()
            .retain_rare();
        assert_eq!(t.frequencies(), &[2e-4, 5e-3]);
    }

    #[test]
    fn binarize_flattens_values() {
        let v = SparseVector::new(10, 5, vec![(2, 3), (7, 4)]).unwrap();
        let b = binarize(&v);
        assert_eq!(b.k(), 2);
        assert_eq!(b.entries(), &[(2, 1), (7, 1)]);
    }

    #[test]
    fn classic_rr_is_deterministic_and_sized() {
        let c = cfg(1.0);
        let reference = ReferenceVector::constant(20, 2, 0).unwrap();
        let v = SparseVector::new(20, 2, vec![(4, 1)]).unwrap();
        let a = classic_rr(&v, &reference, &c, 5).unwrap();
        let b = classic_rr(&v, &reference, &c, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
    }

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let mut path = std::env::temp_dir();
        path.push(format!("srr-apps-test-{}-{name}", std::process::id()));
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn ingest_ratings_happy_path_and_errors() {
        let ok = write_temp("ratings-ok", "20 5\n17 4\n3 1\n");
        let v = ingest_ratings(&ok).unwrap();
        assert_eq!(v.n(), 20);
        assert_eq!(v.k(), 5);
        assert_eq!(v.entries(), &[(3, 1), (17, 4)]);
        fs::remove_file(ok).unwrap();

        let bad = write_temp("ratings-bad", "20 5\n17 4\nnot a line\n");
        let err = ingest_ratings(&bad).unwrap_err().to_string();
        assert!(err.contains(":3:"), "error should carry the line number: {err}");
        fs::remove_file(bad).unwrap();
    }

    #[test]
    fn ingest_edges_happy_path_and_duplicate() {
        let ok = write_temp("edges-ok", "8\n3 7\n0 1\n");
        let g = ingest_edges(&ok).unwrap();
        assert_eq!(g.edges(), &[(3, 7), (0, 1)]);
        fs::remove_file(ok).unwrap();

        let dup = write_temp("edges-dup", "8\n3 7\n7 3\n");
        let err = ingest_edges(&dup).unwrap_err().to_string();
        assert!(err.contains(":3:") && err.contains("duplicate"), "{err}");
        fs::remove_file(dup).unwrap();
    }

    #[test]
    fn ingest_frequencies_rejects_out_of_range() {
        let ok = write_temp("freq-ok", "0.001\n0.0005\n");
        assert_eq!(ingest_frequencies(&ok).unwrap().len(), 2);
        fs::remove_file(ok).unwrap();

        let bad = write_temp("freq-bad", "0.001\n1.5\n");
        assert!(ingest_frequencies(&bad).is_err());
        fs::remove_file(bad).unwrap();
    }
}
