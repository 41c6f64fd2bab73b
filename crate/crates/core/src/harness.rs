//! Replay orchestration and file artifacts: the JSON-Lines run log, the
//! metrics CSV, the comparison CSV, and the region-occupancy CSV.
//!
//! A run log is one header line (config echo), one line per frame, and one
//! summary line. Everything is serialized with stable field order, so two
//! replays of the same (trace, config, seed) produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::metrics::{compute_metrics, MetricsReport, MetricsSummary};
use crate::spatial::RegionKey;
use crate::streaming::{run_stream, FrameLog, StreamConfig, StreamReport};
use crate::trace::Trace;
use crate::{Error, Result};

pub const RUN_LOG_VERSION: u32 = 1;

/// Column order shared by the metrics CSV and the comparison CSV, frozen by
/// a golden-file test.
pub const METRICS_CSV_COLUMNS: [&str; 13] = [
    "strategy",
    "scoring",
    "budget",
    "frames",
    "trace_hash",
    "mean_recall",
    "mean_coverage",
    "frames_with_segments",
    "peak_live",
    "peak_payload_bytes",
    "final_live",
    "compression_events",
    "tombstoned_total",
];

/// A replay's in-memory outcome: the stream report plus computed metrics.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: StreamReport,
    pub metrics: MetricsReport,
}

/// Run a trace under a config and compute its metrics.
pub fn replay(trace: &Trace, cfg: &StreamConfig) -> Result<RunArtifacts> {
    let report = run_stream(trace, cfg)?;
    let metrics = compute_metrics(trace, cfg, &report.frames)?;
    Ok(RunArtifacts { report, metrics })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum LogLine {
    Header {
        version: u32,
        strategy: String,
        trace_hash: String,
        config: StreamConfig,
    },
    Frame {
        #[serde(flatten)]
        log: FrameLog,
    },
    Summary {
        peak_live: usize,
        peak_payload_bytes: u64,
        metrics: MetricsSummary,
    },
}

/// Serialize a run to its JSON-Lines log.
pub fn render_run_log(artifacts: &RunArtifacts) -> String {
    let report = &artifacts.report;
    let mut lines = Vec::with_capacity(report.frames.len() + 2);
    lines.push(
        serde_json::to_string(&LogLine::Header {
            version: RUN_LOG_VERSION,
            strategy: report.strategy_tag.clone(),
            trace_hash: report.trace_hash.clone(),
            config: report.config.clone(),
        })
        .expect("header serializes"),
    );
    for log in &report.frames {
        lines.push(
            serde_json::to_string(&LogLine::Frame { log: log.clone() }).expect("frame serializes"),
        );
    }
    lines.push(
        serde_json::to_string(&LogLine::Summary {
            peak_live: report.peak_live,
            peak_payload_bytes: report.final_stats.peak_payload_bytes,
            metrics: artifacts.metrics.summary.clone(),
        })
        .expect("summary serializes"),
    );
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// A run log read back from disk.
#[derive(Debug, Clone)]
pub struct ParsedRunLog {
    pub config: StreamConfig,
    pub strategy: String,
    pub trace_hash: String,
    pub frames: Vec<FrameLog>,
    pub peak_live: usize,
    pub peak_payload_bytes: u64,
    pub summary: MetricsSummary,
}

pub fn parse_run_log(text: &str) -> Result<ParsedRunLog> {
    let mut header: Option<(u32, String, String, StreamConfig)> = None;
    let mut frames = Vec::new();
    let mut summary: Option<(usize, u64, MetricsSummary)> = None;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let parsed: LogLine = serde_json::from_str(line).map_err(|e| Error::MalformedLog {
            line: lineno,
            msg: e.to_string(),
        })?;
        match parsed {
            LogLine::Header {
                version,
                strategy,
                trace_hash,
                config,
            } => {
                if version != RUN_LOG_VERSION {
                    return Err(Error::MalformedLog {
                        line: lineno,
                        msg: format!("unsupported run log version {version}"),
                    });
                }
                if header.is_some() {
                    return Err(Error::MalformedLog {
                        line: lineno,
                        msg: "duplicate header line".to_string(),
                    });
                }
                header = Some((version, strategy, trace_hash, config));
            }
            LogLine::Frame { log } => frames.push(log),
            LogLine::Summary {
                peak_live,
                peak_payload_bytes,
                metrics,
            } => summary = Some((peak_live, peak_payload_bytes, metrics)),
        }
    }
    let (_, strategy, trace_hash, config) = header.ok_or(Error::MalformedLog {
        line: 1,
        msg: "missing header line".to_string(),
    })?;
    let (peak_live, peak_payload_bytes, summary) = summary.ok_or(Error::MalformedLog {
        line: frames.len() + 1,
        msg: "missing summary line".to_string(),
    })?;
    Ok(ParsedRunLog {
        config,
        strategy,
        trace_hash,
        frames,
        peak_live,
        peak_payload_bytes,
        summary,
    })
}

fn summary_record(summary: &MetricsSummary) -> Vec<String> {
    vec![
        summary.strategy.clone(),
        summary.scoring.clone(),
        summary.budget.to_string(),
        summary.frames.to_string(),
        summary.trace_hash.clone(),
        summary.mean_recall.to_string(),
        summary.mean_coverage.to_string(),
        summary.frames_with_segments.to_string(),
        summary.peak_live.to_string(),
        summary.peak_payload_bytes.to_string(),
        summary.final_live.to_string(),
        summary.compression_events.to_string(),
        summary.tombstoned_total.to_string(),
    ]
}

fn write_csv(rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(METRICS_CSV_COLUMNS)
        .expect("csv header writes");
    for row in rows {
        writer.write_record(&row).expect("csv row writes");
    }
    String::from_utf8(writer.into_inner().expect("csv flushes")).expect("csv is utf-8")
}

/// One-row CSV for a single run.
pub fn render_metrics_csv(summary: &MetricsSummary) -> String {
    write_csv(vec![summary_record(summary)])
}

/// One row per run log, in input order. All logs must share a trace hash.
pub fn render_comparison_csv(summaries: &[MetricsSummary]) -> Result<String> {
    if let Some(first) = summaries.first() {
        for s in summaries {
            if s.trace_hash != first.trace_hash {
                return Err(Error::TraceHashMismatch(format!(
                    "run for strategy {} hashes {}, expected {}",
                    s.strategy, s.trace_hash, first.trace_hash
                )));
            }
        }
    }
    Ok(write_csv(summaries.iter().map(summary_record).collect()))
}

/// Region-occupancy histogram: one row per occupied region.
pub fn render_occupancy_csv(occupancy: &[(RegionKey, usize)]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["ix", "iy", "iz", "dir_bin", "count"])
        .expect("csv header writes");
    for (key, count) in occupancy {
        writer
            .write_record([
                key.ix.to_string(),
                key.iy.to_string(),
                key.iz.to_string(),
                key.dir_bin.to_string(),
                count.to_string(),
            ])
            .expect("csv row writes");
    }
    String::from_utf8(writer.into_inner().expect("csv flushes")).expect("csv is utf-8")
}

/// File names written by `write_replay_outputs`.
pub const RUN_LOG_FILE: &str = "run_log.jsonl";
pub const METRICS_FILE: &str = "metrics.csv";
pub const OCCUPANCY_FILE: &str = "occupancy.csv";

/// Write the run log, metrics CSV and occupancy CSV into a directory.
pub fn write_replay_outputs(dir: &Path, artifacts: &RunArtifacts) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let run_log = dir.join(RUN_LOG_FILE);
    let metrics = dir.join(METRICS_FILE);
    let occupancy = dir.join(OCCUPANCY_FILE);
    fs::write(&run_log, render_run_log(artifacts))?;
    fs::write(&metrics, render_metrics_csv(&artifacts.metrics.summary))?;
    fs::write(
        &occupancy,
        render_occupancy_csv(&artifacts.report.final_occupancy),
    )?;
    Ok(vec![run_log, metrics, occupancy])
}

/// Recompute metrics for a stored run log against its trace and check they
/// match the stored summary exactly.
pub fn verify_run_log(trace: &Trace, parsed: &ParsedRunLog) -> Result<MetricsReport> {
    if parsed.trace_hash != trace.header.trace_hash {
        return Err(Error::TraceHashMismatch(format!(
            "log ran on {}, trace is {}",
            parsed.trace_hash, trace.header.trace_hash
        )));
    }
    let recomputed = compute_metrics(trace, &parsed.config, &parsed.frames)?;
    if recomputed.summary != parsed.summary {
        return Err(Error::Invariant(
            "recomputed metrics differ from the stored summary".to_string(),
        ));
    }
    Ok(recomputed)
}
