//! `srr` — encode, decode, benchmark and experiment with compressed
//! randomized response on sparse vector files.
//!
//! Exit codes: 0 success, 2 parse error (files or flags), 3 invalid
//! configuration, 4 index out of bounds.

mod bench;
mod experiment;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use srr::apps::{ingest_edges, ingest_frequencies, ingest_ratings, EdgeListGraph};
use srr::chunker::{decode_all, decode_at, encode_with_stats, PublicContext};
use srr::codec::{deserialize, serialize, wire_cost_bits, wire_header};
use srr::error::Error;
use srr::prng::{key_from_hex, key_to_hex};
use srr::rr::{PrivacyConfig, ReferenceVector};

use files::{default_seed, key_from_seed, parse_grid, parse_reference};

#[derive(Parser)]
#[command(name = "srr", version, about = "Compressed randomized response for sparse vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a sparse vector file into a .srr message
    Encode(EncodeArgs),
    /// Decode coordinates of a .srr message
    Decode(DecodeArgs),
    /// Sweep (d, epsilon, beta) grids and write per-run measurements as CSV
    Bench(BenchArgs),
    /// Run an application pipeline and print a JSON report
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Sparse vector file: header "n k", then "index value" lines
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Reference vector file (default: all-zero reference)
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Privacy budget (0 is accepted and yields uniform reporting)
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// 32-hex-character master key; derived from a seed when omitted
    #[arg(long, value_name = "HEX32")]
    key: Option<String>,
    /// Output path (default: input path with .srr appended)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// A .srr message file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Reference vector file (default: all-zero reference)
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Decode a single coordinate
    #[arg(long, conflicts_with = "all")]
    index: Option<u64>,
    /// Decode the whole vector, one symbol per line
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Comma-separated d grid, e.g. "100,200,500"
    #[arg(long, value_name = "LIST")]
    d: String,
    /// Comma-separated epsilon grid, e.g. "0.2,0.8,1.4,2.0"
    #[arg(long = "epsilon-grid", value_name = "LIST")]
    epsilon_grid: String,
    /// Comma-separated beta grid
    #[arg(long = "beta-grid", value_name = "LIST", default_value = "2")]
    beta_grid: String,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    repeats: u64,
    /// CSV output path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Worker threads for the repeats
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Base seed for synthetic data and keys (default: SRR_SEED or built-in)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: common-items, triangles, snp
    #[arg(long)]
    task: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long)]
    seed: Option<u64>,

    // common-items flags
    #[arg(long, default_value_t = 50)]
    n: u64,
    #[arg(long, default_value_t = 10)]
    overlap: u64,
    #[arg(long = "seed-a")]
    seed_a: Option<u64>,
    #[arg(long = "seed-b")]
    seed_b: Option<u64>,

    // triangles flags
    /// Use the complete graph on this many nodes
    #[arg(long, value_name = "N", conflicts_with = "edges")]
    complete: Option<u64>,
    /// Edge list file: header "N", then "u v" lines
    #[arg(long, value_name = "FILE")]
    edges: Option<PathBuf>,

    // snp flags
    /// Frequency file: one decimal frequency per line
    #[arg(long, value_name = "FILE")]
    frequencies: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    users: u64,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Io { .. } => 2,
        Error::IndexOutOfRange { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn resolve_key(key_flag: Option<&str>) -> Result<u128, Error> {
    match key_flag {
        Some(hex) => key_from_hex(hex),
        None => {
            let seed = default_seed()?;
            let key = key_from_seed(seed, 0);
            eprintln!(
                "warning: no --key supplied; derived key {} from seed {seed}",
                key_to_hex(key)
            );
            Ok(key)
        }
    }
}

fn cmd_encode(args: EncodeArgs) -> Result<(), Error> {
    let vector = ingest_ratings(&args.input)?;
    let reference = match &args.reference {
        Some(path) => parse_reference(path)?,
        None => ReferenceVector::constant(vector.n(), vector.k(), 0)?,
    };
    let cfg = PrivacyConfig::new(args.epsilon, vector.k(), args.alpha, args.beta)?;
    let master_key = resolve_key(args.key.as_deref())?;
    let ctx = PublicContext::for_vector(master_key, reference, &cfg, &vector)?;

    let (msg, _) = encode_with_stats(&vector, &cfg, &ctx)?;
    let bytes = serialize(&msg, &ctx, &cfg)?;

    let out = args.out.unwrap_or_else(|| {
        let mut p = args.input.clone().into_os_string();
        p.push(".srr");
        PathBuf::from(p)
    });
    std::fs::write(&out, &bytes).map_err(|source| Error::Io {
        path: out.display().to_string(),
        source,
    })?;
    println!(
        "{}",
        json!({
            "d": vector.d(),
            "m": ctx.chunk_count(),
            "payload_bits": wire_cost_bits(&msg),
        })
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), Error> {
    let bytes = std::fs::read(&args.input).map_err(|source| Error::Io {
        path: args.input.display().to_string(),
        source,
    })?;
    let header = wire_header(&bytes)?;
    let reference = match &args.reference {
        Some(path) => parse_reference(path)?,
        None => ReferenceVector::constant(header.n, header.k, 0)?,
    };
    let (msg, ctx, cfg) = deserialize(&bytes, reference)?;
    match (args.index, args.all) {
        (Some(i), false) => {
            println!("{}", decode_at(&msg, &ctx, &cfg, i)?);
            Ok(())
        }
        (None, true) => {
            let mut out = String::new();
            for symbol in decode_all(&msg, &ctx, &cfg)? {
                out.push_str(&symbol.to_string());
                out.push('\n');
            }
            print!("{out}");
            Ok(())
        }
        _ => Err(Error::BadConfig {
            reason: "exactly one of --index or --all is required".into(),
        }),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let plan = bench::BenchPlan {
        n: args.n,
        d_grid: parse_grid(&args.d, "d")?,
        epsilon_grid: parse_grid(&args.epsilon_grid, "epsilon")?,
        beta_grid: parse_grid(&args.beta_grid, "beta")?,
        alpha: args.alpha,
        repeats: args.repeats,
        seed: match args.seed {
            Some(s) => s,
            None => default_seed()?,
        },
    };
    let records = bench::run(&plan, args.jobs.max(1))?;

    let mut csv = String::from(bench::CSV_HEADER);
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    std::fs::write(&args.out, csv).map_err(|source| Error::Io {
        path: args.out.display().to_string(),
        source,
    })?;

    let summary = bench::summarize(&plan, &records);
    println!(
        "{}",
        json!({
            "runs": records.len(),
            "csv": args.out.display().to_string(),
            "summary": summary,
        })
    );
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), Error> {
    let seed = match args.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    let report = match args.task.as_str() {
        "common-items" => {
            let seed_a = args.seed_a.unwrap_or(seed);
            let seed_b = args.seed_b.unwrap_or(seed.wrapping_add(1));
            experiment::common_items_experiment(
                args.n,
                args.overlap,
                args.epsilon,
                args.runs,
                seed_a,
                seed_b,
            )?
        }
        "triangles" => {
            let graph = match (&args.complete, &args.edges) {
                (Some(n), None) => EdgeListGraph::complete(*n),
                (None, Some(path)) => ingest_edges(path)?,
                _ => {
                    return Err(Error::BadConfig {
                        reason: "triangles needs exactly one of --complete or --edges".into(),
                    })
                }
            };
            experiment::triangles_experiment(&graph, args.epsilon, args.runs, seed)?
        }
        "snp" => {
            let path = args.frequencies.as_ref().ok_or_else(|| Error::BadConfig {
                reason: "snp needs --frequencies".into(),
            })?;
            let table = ingest_frequencies(path)?.retain_rare();
            experiment::snp_experiment(&table, args.users, args.epsilon, seed)?
        }
        other => {
            return Err(Error::BadConfig {
                reason: format!("unknown task {other:?} (use common-items, triangles or snp)"),
            })
        }
    };
    println!("{report}");
    Ok(())
}
