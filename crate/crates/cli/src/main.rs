//! Command-line harness: generate traces, replay them under a selection
//! policy, compare run logs, and recompute metrics.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed input, 3 internal
//! invariant violation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use streamkv_core::harness::{
    parse_run_log, render_comparison_csv, render_metrics_csv, replay, verify_run_log,
    write_replay_outputs,
};
use streamkv_core::relevance::ScoringFunction;
use streamkv_core::selection::{SelectionConfig, Strategy};
use streamkv_core::spatial::MemoryConfig;
use streamkv_core::streaming::StreamConfig;
use streamkv_core::trace::{generate_trace, Trace, TrajectoryConfig, TrajectoryKind};
use streamkv_core::Error;

#[derive(Parser)]
#[command(
    name = "streamkv",
    version,
    about = "Bounded-memory streaming KV-cache retrieval harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::parse(s).ok_or_else(|| {
        format!("unknown strategy '{s}' (expected segment|topk|random|uniform|window|prob)")
    })
}

fn parse_scoring(s: &str) -> Result<ScoringFunction, String> {
    ScoringFunction::parse(s)
        .ok_or_else(|| format!("unknown scoring function '{s}' (expected dot|cosine|negl2)"))
}

fn parse_kind(s: &str) -> Result<TrajectoryKind, String> {
    TrajectoryKind::parse(s)
        .ok_or_else(|| format!("unknown trajectory '{s}' (expected loop|backforth|walk|revisit)"))
}

fn parse_extent(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("extent '{s}' must be three comma-separated numbers"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad extent component '{part}': {e}"))?;
    }
    Ok(out)
}

/// Policy flags shared by `replay`.
#[derive(Args)]
struct PolicyArgs {
    /// Attended frames per query, anchor included.
    #[arg(long, default_value_t = 48)]
    budget: usize,
    /// Segment threshold coefficient.
    #[arg(long = "w-thre", default_value_t = 0.3)]
    w_thre: f64,
    /// Merge segments separated by fewer than this many frames.
    #[arg(long = "merge-gap", default_value_t = 3)]
    merge_gap: usize,
    /// Frames between compression events.
    #[arg(long = "compress-interval", default_value_t = 200)]
    compress_interval: u64,
    /// Fraction removed from over-represented regions.
    #[arg(long = "deletion-ratio", default_value_t = 0.5)]
    deletion_ratio: f64,
    /// Position grid divisions per axis.
    #[arg(long = "grid-k", default_value_t = 3)]
    grid_k: usize,
    /// Azimuth direction bins.
    #[arg(long = "dir-bins", default_value_t = 4)]
    dir_bins: usize,
    /// Relevance scoring function.
    #[arg(long, default_value = "dot", value_parser = parse_scoring)]
    scoring: ScoringFunction,
    /// Selection strategy.
    #[arg(long, default_value = "segment", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Seed for the stochastic selection baselines.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PolicyArgs {
    fn stream_config(&self, layers: usize) -> StreamConfig {
        StreamConfig {
            selection: SelectionConfig {
                budget: self.budget,
                threshold_coeff: self.w_thre,
                merge_gap: self.merge_gap,
                seed: self.seed,
            },
            memory: MemoryConfig {
                grid_divisions: self.grid_k,
                direction_bins: self.dir_bins,
                compress_interval: self.compress_interval,
                deletion_ratio: self.deletion_ratio,
            },
            scoring: self.scoring,
            strategy: self.strategy,
            layers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic camera-trajectory trace.
    Gen {
        /// Trajectory shape.
        #[arg(long, default_value = "loop", value_parser = parse_kind)]
        kind: TrajectoryKind,
        /// Number of frames.
        #[arg(long, default_value_t = 300)]
        frames: usize,
        /// Scene extent as "x,y,z".
        #[arg(long, default_value = "10,3,10", value_parser = parse_extent)]
        extent: [f64; 3],
        /// Isotropic descriptor noise scale.
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        /// Generator seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Attention heads per frame.
        #[arg(long, default_value_t = 2)]
        heads: usize,
        /// Dimensions per head.
        #[arg(long = "head-dim", default_value_t = 16)]
        head_dim: usize,
        /// Leading special tokens per head (echoed in the header).
        #[arg(long, default_value_t = 5)]
        special: usize,
        /// Aggregator layers.
        #[arg(long, default_value_t = 4)]
        layers: usize,
        /// Payload bytes per frame per layer.
        #[arg(long = "payload-bytes", default_value_t = 256)]
        payload_bytes: u32,
        /// Output trace path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a trace and write run_log.jsonl, metrics.csv, occupancy.csv.
    Replay {
        /// Input trace path.
        #[arg(long)]
        trace: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Tabulate the stored metrics of several run logs over one trace.
    Compare {
        /// Run log paths (two or more).
        #[arg(long = "logs", num_args = 1.., required = true)]
        logs: Vec<PathBuf>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute metrics for a stored run log and verify the stored summary.
    Stats {
        /// Run log path.
        #[arg(long)]
        log: PathBuf,
        /// Trace the log was produced from.
        #[arg(long)]
        trace: PathBuf,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) => 1,
        Error::MalformedTrace { .. }
        | Error::MalformedLog { .. }
        | Error::TraceHashMismatch(_)
        | Error::ShapeMismatch(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> streamkv_core::Result<()> {
    match cli.command {
        Command::Gen {
            kind,
            frames,
            extent,
            noise,
            seed,
            heads,
            head_dim,
            special,
            layers,
            payload_bytes,
            out,
        } => {
            let cfg = TrajectoryConfig {
                kind,
                frames,
                extent,
                noise_sigma: noise,
                seed,
                heads,
                head_dim,
                special_tokens: special,
                layers,
                payload_bytes,
            };
            let trace = generate_trace(&cfg)?;
            trace.save(&out)?;
            println!(
                "wrote {} ({} frames, hash {})",
                out.display(),
                trace.header.frame_count,
                &trace.header.trace_hash[..12]
            );
        }
        Command::Replay { trace, out, policy } => {
            let trace = Trace::load(&trace)?;
            let cfg = policy.stream_config(trace.header.layers);
            cfg.validate()?;
            let artifacts = replay(&trace, &cfg)?;
            let files = write_replay_outputs(&out, &artifacts)?;
            let summary = &artifacts.metrics.summary;
            println!(
                "{}: {} frames, recall {:.3}, coverage {:.3}, peak live {}, {} events",
                summary.strategy,
                summary.frames,
                summary.mean_recall,
                summary.mean_coverage,
                summary.peak_live,
                summary.compression_events
            );
            for file in files {
                println!("wrote {}", file.display());
            }
        }
        Command::Compare { logs, out } => {
            let mut summaries = Vec::with_capacity(logs.len());
            for path in &logs {
                let parsed = parse_run_log(&fs::read_to_string(path)?)?;
                summaries.push(parsed.summary);
            }
            let csv = render_comparison_csv(&summaries)?;
            match out {
                Some(path) => {
                    fs::write(&path, &csv)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
        }
        Command::Stats { log, trace, out } => {
            let parsed = parse_run_log(&fs::read_to_string(&log)?)?;
            let trace = Trace::load(&trace)?;
            let recomputed = verify_run_log(&trace, &parsed)?;
            let csv = render_metrics_csv(&recomputed.summary);
            match out {
                Some(path) => {
                    fs::write(&path, &csv)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems (including --help/--version) print through clap;
            // help output is not an error.
            let is_help = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
