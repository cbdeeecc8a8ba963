//! Parameter sweeps: encode synthetic vectors over (d, epsilon, beta)
//! grids, record wire and runtime measurements, and summarize.

use std::time::Instant;

use serde::Serialize;
use srr::chunker::{encode_with_stats, PublicContext};
use srr::codec::wire_cost_bits;
use srr::error::{Error, Result};
use srr::prng::{uniform_at, GeneratorKey};
use srr::rr::{PrivacyConfig, ReferenceVector, SparseVector};

use crate::files::key_from_seed;

/// One measured encode run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub run_id: u64,
    pub n: u64,
    pub d: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub payload_bits: u64,
    pub encode_ns: u64,
    pub draws_total: u64,
    pub max_chunk_entries: usize,
}

pub const CSV_HEADER: &str =
    "run_id,n,d,epsilon,alpha,beta,payload_bits,encode_ns,draws_total,max_chunk_entries";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.n,
            self.d,
            self.epsilon,
            self.alpha,
            self.beta,
            self.payload_bits,
            self.encode_ns,
            self.draws_total,
            self.max_chunk_entries
        )
    }
}

/// Aggregate over the repeats of one grid point.
#[derive(Debug, Serialize)]
pub struct BenchSummary {
    pub n: u64,
    pub d: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub repeats: u64,
    pub payload_bits_mean: f64,
    pub payload_bits_std: f64,
    pub encode_ns_mean: f64,
    pub encode_ns_std: f64,
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub n: u64,
    pub d_grid: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub alpha: f64,
    pub repeats: u64,
    pub seed: u64,
}

fn synth_vector(n: u64, d: usize, seed_key: GeneratorKey) -> SparseVector {
    // Distinct random indices via rejection on a keyed stream.
    let mut picked = std::collections::BTreeSet::new();
    let mut counter = 0u64;
    while picked.len() < d {
        picked.insert(uniform_at(seed_key, counter) % n);
        counter += 1;
    }
    let entries: Vec<(u64, u16)> = picked.into_iter().map(|i| (i, 1)).collect();
    SparseVector::new(n, 2, entries).expect("synthetic entries are valid")
}

fn run_one(plan: &BenchPlan, run_id: u64, d: usize, epsilon: f64, beta: f64) -> Result<BenchRecord> {
    let cfg = PrivacyConfig::new(epsilon, 2, plan.alpha, beta)?;
    if d as u64 > plan.n {
        return Err(Error::BadConfig {
            reason: format!("d={d} exceeds n={}", plan.n),
        });
    }
    let vector = synth_vector(
        plan.n,
        d,
        GeneratorKey::new(key_from_seed(plan.seed, run_id), 0xda7a),
    );
    let reference = ReferenceVector::constant(plan.n, 2, 0)?;
    let ctx = PublicContext::for_vector(
        key_from_seed(plan.seed ^ 0xeeee, run_id),
        reference,
        &cfg,
        &vector,
    )?;
    let start = Instant::now();
    let (msg, stats) = encode_with_stats(&vector, &cfg, &ctx)?;
    let encode_ns = start.elapsed().as_nanos() as u64;
    Ok(BenchRecord {
        run_id,
        n: plan.n,
        d,
        epsilon,
        alpha: plan.alpha,
        beta,
        payload_bits: wire_cost_bits(&msg),
        encode_ns,
        draws_total: stats.draws_total,
        max_chunk_entries: stats.max_chunk_entries,
    })
}

/// Runs the full grid, `repeats` times per point, on `jobs` worker
/// threads; records come back sorted by run id.
pub fn run(plan: &BenchPlan, jobs: usize) -> Result<Vec<BenchRecord>> {
    let mut specs = Vec::new();
    let mut run_id = 0u64;
    for &d in &plan.d_grid {
        for &epsilon in &plan.epsilon_grid {
            for &beta in &plan.beta_grid {
                for _ in 0..plan.repeats {
                    specs.push((run_id, d, epsilon, beta));
                    run_id += 1;
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::BadConfig {
            reason: format!("cannot build worker pool: {e}"),
        })?;
    let mut records = pool.install(|| {
        use rayon::prelude::*;
        specs
            .par_iter()
            .map(|&(id, d, eps, beta)| run_one(plan, id, d, eps, beta))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| r.run_id);
    Ok(records)
}

/// Per-grid-point means and standard deviations, in grid order.
pub fn summarize(plan: &BenchPlan, records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut out = Vec::new();
    for &d in &plan.d_grid {
        for &epsilon in &plan.epsilon_grid {
            for &beta in &plan.beta_grid {
                let group: Vec<&BenchRecord> = records
                    .iter()
                    .filter(|r| r.d == d && r.epsilon == epsilon && r.beta == beta)
                    .collect();
                if group.is_empty() {
                    continue;
                }
                let (bits_mean, bits_std) =
                    mean_std(group.iter().map(|r| r.payload_bits as f64));
                let (ns_mean, ns_std) = mean_std(group.iter().map(|r| r.encode_ns as f64));
                out.push(BenchSummary {
                    n: plan.n,
                    d,
                    epsilon,
                    alpha: plan.alpha,
                    beta,
                    repeats: group.len() as u64,
                    payload_bits_mean: bits_mean,
                    payload_bits_std: bits_std,
                    encode_ns_mean: ns_mean,
                    encode_ns_std: ns_std,
                });
            }
        }
    }
    out
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
