//! Application experiments: run an estimation pipeline end to end, with
//! the compressed mechanism and the classic uncompressed baseline, and
//! report estimates, errors and wire cost as JSON.

use serde_json::json;
use srr::apps::{
    adjacency_contexts, classic_rr, common_items, common_items_dense, publish_adjacency,
    synth_snp, triangle_estimate, triangle_estimate_dense, EdgeListGraph, FrequencyTable,
};
use srr::chunker::{encode, encode_with_stats, PublicContext};
use srr::codec::wire_cost_bits;
use srr::error::{Error, Result};
use srr::rr::{PrivacyConfig, ReferenceVector, SparseVector};

use crate::files::key_from_seed;

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn mean_abs_error(values: &[f64], truth: f64) -> f64 {
    values.iter().map(|v| (v - truth).abs()).sum::<f64>() / values.len() as f64
}

/// Two synthetic users with a known item overlap, estimated `runs` times
/// under both pipelines.
pub fn common_items_experiment(
    n: u64,
    overlap: u64,
    epsilon: f64,
    runs: u64,
    seed_a: u64,
    seed_b: u64,
) -> Result<serde_json::Value> {
    if seed_a == seed_b {
        return Err(Error::BadConfig {
            reason: "the two users must use independent randomness: --seed-a equals --seed-b"
                .into(),
        });
    }
    if n < 3 * overlap {
        return Err(Error::BadConfig {
            reason: format!("need n >= 3*overlap, got n={n}, overlap={overlap}"),
        });
    }
    let cfg = PrivacyConfig::new(epsilon, 2, 2.0, 2.0)?;
    let reference = ReferenceVector::constant(n, 2, 0)?;
    // A holds items [0, 2*overlap), B holds [overlap, 3*overlap).
    let va = SparseVector::new(n, 2, (0..2 * overlap).map(|i| (i, 1)).collect())?;
    let vb = SparseVector::new(n, 2, (overlap..3 * overlap).map(|i| (i, 1)).collect())?;

    let mut compressed = Vec::new();
    let mut classic = Vec::new();
    let mut bits = Vec::new();
    for r in 0..runs {
        let ctx_a =
            PublicContext::for_vector(key_from_seed(seed_a, r), reference.clone(), &cfg, &va)?;
        let ctx_b =
            PublicContext::for_vector(key_from_seed(seed_b, r), reference.clone(), &cfg, &vb)?;
        let msg_a = encode(&va, &cfg, &ctx_a)?;
        let msg_b = encode(&vb, &cfg, &ctx_b)?;
        bits.push((wire_cost_bits(&msg_a) + wire_cost_bits(&msg_b)) as f64);
        compressed.push(common_items(&msg_a, &ctx_a, &msg_b, &ctx_b, &cfg)?);

        let za = classic_rr(&va, &reference, &cfg, key_from_seed(seed_a ^ 0xc1a5, r))?;
        let zb = classic_rr(&vb, &reference, &cfg, key_from_seed(seed_b ^ 0xc1a5, r))?;
        classic.push(common_items_dense(&za, &zb, &reference, &cfg)?);
    }
    let (cm, cs) = mean_std(&compressed);
    let (km, ks) = mean_std(&classic);
    let (bm, _) = mean_std(&bits);
    Ok(json!({
        "task": "common-items",
        "n": n,
        "true_overlap": overlap,
        "epsilon": epsilon,
        "runs": runs,
        "compressed": {
            "mean_estimate": cm,
            "std": cs,
            "mean_abs_error": mean_abs_error(&compressed, overlap as f64),
            "mean_upload_bits": bm,
        },
        "classic_rr": {
            "mean_estimate": km,
            "std": ks,
            "mean_abs_error": mean_abs_error(&classic, overlap as f64),
            "upload_bits": 2 * n,
        },
    }))
}

/// Triangle counting on a graph: every node publishes its lower-index
/// adjacency vector, the server decodes and estimates.
pub fn triangles_experiment(
    graph: &EdgeListGraph,
    epsilon: f64,
    runs: u64,
    seed: u64,
) -> Result<serde_json::Value> {
    let cfg = PrivacyConfig::new(epsilon, 2, 2.0, 2.0)?;
    let n = graph.node_count();
    let truth = graph.triangle_count() as f64;

    let mut compressed = Vec::new();
    let mut classic = Vec::new();
    let mut bits = Vec::new();
    for r in 0..runs {
        let ctxs = adjacency_contexts(graph, &cfg, key_from_seed(seed, r))?;
        let mut msgs = Vec::with_capacity(n as usize);
        let mut total_bits = 0u64;
        for u in 0..n {
            let msg = publish_adjacency(graph, u, &cfg, &ctxs[u as usize])?;
            total_bits += wire_cost_bits(&msg);
            msgs.push(msg);
        }
        bits.push(total_bits as f64);
        compressed.push(triangle_estimate(&msgs, &ctxs, &cfg)?);

        let rows: Vec<Vec<u16>> = (0..n)
            .map(|u| {
                let entries: Vec<(u64, u16)> = graph
                    .lower_neighbors(u)
                    .into_iter()
                    .map(|v| (v, 1))
                    .collect();
                let vec_u = SparseVector::new(u, 2, entries)?;
                let ref_u = ReferenceVector::constant(u, 2, 0)?;
                classic_rr(&vec_u, &ref_u, &cfg, key_from_seed(seed ^ 0x7121, r * n + u))
            })
            .collect::<Result<_>>()?;
        classic.push(triangle_estimate_dense(&rows, &cfg)?);
    }
    let (cm, cs) = mean_std(&compressed);
    let (km, ks) = mean_std(&classic);
    let (bm, _) = mean_std(&bits);
    let l2 = |xs: &[f64]| {
        (xs.iter().map(|x| (x - truth).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
    };
    Ok(json!({
        "task": "triangles",
        "nodes": n,
        "edges": graph.edges().len(),
        "true_triangles": truth,
        "epsilon": epsilon,
        "runs": runs,
        "compressed": {
            "mean_estimate": cm,
            "std": cs,
            "l2_error": l2(&compressed),
            "mean_upload_bits_total": bm,
        },
        "classic_rr": {
            "mean_estimate": km,
            "std": ks,
            "l2_error": l2(&classic),
            "upload_bits_total": n * (n.saturating_sub(1)) / 2,
        },
    }))
}

/// Synthetic SNP publication: draw one sparse variant vector per user
/// from the frequency table and encode it.
pub fn snp_experiment(
    table: &FrequencyTable,
    users: u64,
    epsilon: f64,
    seed: u64,
) -> Result<serde_json::Value> {
    let cfg = PrivacyConfig::new(epsilon, 2, 2.0, 2.0)?;
    let n = table.len() as u64;
    let reference = ReferenceVector::constant(n, 2, 0)?;
    let mut ds = Vec::new();
    let mut bits = Vec::new();
    let mut encode_ns = Vec::new();
    for u in 0..users {
        let vector = synth_snp(table, seed.wrapping_add(u));
        let ctx = PublicContext::for_vector(
            key_from_seed(seed ^ 0x5eed, u),
            reference.clone(),
            &cfg,
            &vector,
        )?;
        let start = std::time::Instant::now();
        let (msg, _) = encode_with_stats(&vector, &cfg, &ctx)?;
        encode_ns.push(start.elapsed().as_nanos() as f64);
        ds.push(vector.d() as f64);
        bits.push(wire_cost_bits(&msg) as f64);
    }
    let (dm, dstd) = mean_std(&ds);
    let (bm, bstd) = mean_std(&bits);
    let (tm, _) = mean_std(&encode_ns);
    Ok(json!({
        "task": "snp",
        "locations": n,
        "users": users,
        "epsilon": epsilon,
        "mean_d": dm,
        "std_d": dstd,
        "mean_upload_bits": bm,
        "std_upload_bits": bstd,
        "mean_encode_ns": tm,
        "naive_rr_bits": n,
    }))
}
