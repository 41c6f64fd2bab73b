//! Ground-truth pose oracle and replay metrics.
//!
//! Metrics are pure functions of a trace and the per-frame run logs: the
//! live set is reconstructed by replaying insertions and the logged
//! compression events, so recomputing metrics from a stored run log yields
//! exactly the values stored at replay time.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::relevance::{score, FrameDescriptor};
use crate::selection::{adaptive_threshold, identify_segments};
use crate::spatial::PoseMeta;
use crate::streaming::{FrameLog, StreamConfig};
use crate::trace::Trace;
use crate::{Error, Result};

/// Oracle position kernel width as a fraction of the trace's position
/// bounding-box diagonal.
const ORACLE_SIGMA_FRACTION: f64 = 0.25;
/// Sharpness of the direction-alignment factor.
const ORACLE_DIR_EXPONENT: f64 = 2.0;

/// Ground-truth geometric relevance between two camera poses: a Gaussian in
/// position distance times a clamped-cosine power in direction separation.
/// Symmetric, 1 at identical poses, monotone nonincreasing in both distance
/// and angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricOracle {
    pub position_sigma: f64,
    pub direction_exponent: f64,
}

impl GeometricOracle {
    pub fn new(position_sigma: f64, direction_exponent: f64) -> Self {
        Self {
            position_sigma,
            direction_exponent,
        }
    }

    /// Width derived from the spread of the given positions.
    pub fn from_positions(positions: &[[f64; 3]]) -> Self {
        let mut diag = 0.0;
        if let Some(first) = positions.first() {
            let mut min = *first;
            let mut max = *first;
            for p in positions.iter().skip(1) {
                for i in 0..3 {
                    min[i] = min[i].min(p[i]);
                    max[i] = max[i].max(p[i]);
                }
            }
            diag = (0..3).map(|i| (max[i] - min[i]).powi(2)).sum::<f64>().sqrt();
        }
        Self::new((ORACLE_SIGMA_FRACTION * diag).max(1e-9), ORACLE_DIR_EXPONENT)
    }

    pub fn for_trace(trace: &Trace) -> Self {
        let positions: Vec<[f64; 3]> = trace.frames.iter().map(|f| f.position).collect();
        Self::from_positions(&positions)
    }

    pub fn relevance(&self, a: &PoseMeta, b: &PoseMeta) -> f64 {
        let d2: f64 = (0..3).map(|i| (a.position[i] - b.position[i]).powi(2)).sum();
        let positional = if d2 == 0.0 {
            1.0
        } else {
            (-d2 / (2.0 * self.position_sigma * self.position_sigma)).exp()
        };
        // Directions are unit only up to rounding; make self-relevance exact.
        let cos: f64 = if a.direction == b.direction {
            1.0
        } else {
            (0..3)
                .map(|i| a.direction[i] * b.direction[i])
                .sum::<f64>()
                .clamp(-1.0, 1.0)
        };
        positional * cos.max(0.0).powf(self.direction_exponent)
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rank correlation needs paired samples");
    let ra = ranks(a);
    let rb = ranks(b);
    pearson(&ra, &rb)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite values"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Live-count movement of one compression event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionDelta {
    pub trigger_frame: u64,
    pub live_before: usize,
    pub live_after: usize,
    pub tombstoned: usize,
}

/// Per-query metric values.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMetrics {
    pub frame_id: u64,
    /// Live history size at selection time.
    pub history: usize,
    /// Overlap between the attended set and the oracle's top frames.
    pub recall: Option<f64>,
    /// Detected segments hit by the selection over segments detected.
    pub coverage: Option<f64>,
    pub segments: usize,
}

/// Aggregates of one run. Ratios are means over the frames where the metric
/// is defined; a run where it is never defined reports 1.0 (vacuous).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub strategy: String,
    pub scoring: String,
    pub budget: usize,
    pub frames: usize,
    pub trace_hash: String,
    pub mean_recall: f64,
    pub mean_coverage: f64,
    pub frames_with_segments: usize,
    pub peak_live: usize,
    pub peak_payload_bytes: u64,
    pub final_live: usize,
    pub compression_events: usize,
    pub tombstoned_total: usize,
    pub live_timeline: Vec<usize>,
    pub compression_deltas: Vec<CompressionDelta>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub summary: MetricsSummary,
    pub per_frame: Vec<FrameMetrics>,
}

fn mean_or_vacuous(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

/// Compute all metrics for a run from its trace and frame logs.
pub fn compute_metrics(
    trace: &Trace,
    cfg: &StreamConfig,
    logs: &[FrameLog],
) -> Result<MetricsReport> {
    let mut descriptors: BTreeMap<u64, FrameDescriptor> = BTreeMap::new();
    let mut poses: BTreeMap<u64, PoseMeta> = BTreeMap::new();
    let mut sizes: BTreeMap<u64, u64> = BTreeMap::new();
    for frame in &trace.frames {
        descriptors.insert(frame.frame_id, trace.descriptor(frame)?);
        poses.insert(frame.frame_id, frame.pose()?);
        sizes.insert(frame.frame_id, frame.payload_total());
    }
    let oracle = GeometricOracle::for_trace(trace);

    let mut live: Vec<u64> = Vec::new();
    let mut live_bytes = 0u64;
    let mut peak_live = 0usize;
    let mut peak_bytes = 0u64;
    let mut per_frame = Vec::with_capacity(logs.len());
    let mut timeline = Vec::with_capacity(logs.len());
    let mut deltas = Vec::new();

    for log in logs {
        let id = log.frame_id;
        let query_pose = poses
            .get(&id)
            .ok_or_else(|| Error::InvalidArgument(format!("log frame {id} not in trace")))?;
        let query_desc = &descriptors[&id];

        // Recall against the oracle's preferred frames among the live pool.
        let recall = if live.is_empty() {
            None
        } else {
            let target = cfg.selection.budget.min(live.len());
            let mut ranked: Vec<u64> = live.clone();
            ranked.sort_by(|&x, &y| {
                let rx = oracle.relevance(query_pose, &poses[&x]);
                let ry = oracle.relevance(query_pose, &poses[&y]);
                ry.partial_cmp(&rx).expect("finite oracle").then(y.cmp(&x))
            });
            ranked.truncate(target);
            let attended = log.selection.attended_ids();
            let hits = ranked.iter().filter(|id| attended.contains(id)).count();
            Some(hits as f64 / target as f64)
        };

        // Coverage of detected segments over the non-anchor candidates,
        // strategy-independent.
        let candidates: Vec<u64> = live.iter().skip(1).copied().collect();
        let (segments, coverage) = if candidates.is_empty() {
            (0, None)
        } else {
            let scores: Vec<f64> = candidates
                .iter()
                .map(|cid| score(&query_desc.query, &descriptors[cid].key, cfg.scoring))
                .collect::<Result<_>>()?;
            let tau = adaptive_threshold(&scores, cfg.selection.threshold_coeff)?;
            let segs = identify_segments(&scores, tau, cfg.selection.merge_gap);
            if segs.is_empty() {
                (0, None)
            } else {
                let hit = segs
                    .iter()
                    .filter(|seg| {
                        candidates[seg.start..=seg.end]
                            .iter()
                            .any(|cid| log.selection.selected_ids.binary_search(cid).is_ok())
                    })
                    .count();
                (segs.len(), Some(hit as f64 / segs.len() as f64))
            }
        };

        per_frame.push(FrameMetrics {
            frame_id: id,
            history: live.len(),
            recall,
            coverage,
            segments,
        });

        // Apply this frame's state changes: insertion, then compression.
        live.push(id);
        live_bytes += sizes[&id];
        peak_live = peak_live.max(live.len());
        peak_bytes = peak_bytes.max(live_bytes);
        if let Some(report) = &log.compression {
            let before = live.len();
            for victim in &report.tombstoned_ids {
                live_bytes -= sizes[victim];
            }
            live.retain(|f| report.tombstoned_ids.binary_search(f).is_err());
            deltas.push(CompressionDelta {
                trigger_frame: report.trigger_frame,
                live_before: before,
                live_after: live.len(),
                tombstoned: report.tombstoned_ids.len(),
            });
        }
        timeline.push(live.len());
    }

    let summary = MetricsSummary {
        strategy: cfg.strategy.tag().to_string(),
        scoring: cfg.scoring.tag().to_string(),
        budget: cfg.selection.budget,
        frames: logs.len(),
        trace_hash: trace.header.trace_hash.clone(),
        mean_recall: mean_or_vacuous(per_frame.iter().filter_map(|f| f.recall)),
        mean_coverage: mean_or_vacuous(per_frame.iter().filter_map(|f| f.coverage)),
        frames_with_segments: per_frame.iter().filter(|f| f.coverage.is_some()).count(),
        peak_live,
        peak_payload_bytes: peak_bytes,
        final_live: live.len(),
        compression_events: deltas.len(),
        tombstoned_total: deltas.iter().map(|d| d.tombstoned).sum(),
        live_timeline: timeline,
        compression_deltas: deltas,
    };
    Ok(MetricsReport { summary, per_frame })
}
