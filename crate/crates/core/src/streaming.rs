//! Per-frame orchestration: descriptor pooling, query-driven selection,
//! per-layer KV gather, pose recording, and periodic compression.
//!
//! Ordering within a frame: the selection for frame `t` sees only frames
//! before `t`; the frame's own entry is inserted after its gather; a
//! compression event due at `t` runs last, after the insertion, so the
//! just-processed frame is itself a compression candidate and selections
//! from `t + 1` onward observe the fully applied event. The trigger counts
//! frames processed before the current one.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::kv_store::{CacheStats, KvEntry, KvStore};
use crate::relevance::{pool_descriptor, profile, FrameDescriptor, ScoringFunction, TokenBlock};
use crate::selection::{
    adaptive_threshold, identify_segments, select, SelectionConfig, SelectionResult, Strategy,
};
use crate::spatial::{
    compress, should_compress, CompressionReport, MemoryConfig, PoseMeta, RegionKey, SpatialMemory,
};
use crate::trace::{synth_payload, Trace};
use crate::{Error, Result};

/// Everything one stream run needs: selection policy, memory policy, scoring
/// function, and the per-frame layer count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub selection: SelectionConfig,
    pub memory: MemoryConfig,
    pub scoring: ScoringFunction,
    pub strategy: Strategy,
    pub layers: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            selection: SelectionConfig::default(),
            memory: MemoryConfig::default(),
            scoring: ScoringFunction::RawDot,
            strategy: Strategy::SegmentSampling,
            layers: 24,
        }
    }
}

impl StreamConfig {
    pub fn validate(&self) -> Result<()> {
        self.selection.validate()?;
        self.memory.validate()?;
        if self.layers < 1 {
            return Err(Error::InvalidConfig("layer count must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// One frame's worth of stream input.
#[derive(Debug, Clone)]
pub struct FrameInput {
    pub descriptor: FrameDescriptor,
    pub pose: PoseMeta,
    pub payloads: Vec<Vec<u8>>,
}

impl FrameInput {
    pub fn new(descriptor: FrameDescriptor, pose: PoseMeta, payloads: Vec<Vec<u8>>) -> Result<Self> {
        if descriptor.frame_id != pose.frame_id {
            return Err(Error::InvalidArgument(format!(
                "descriptor frame {} and pose frame {} disagree",
                descriptor.frame_id, pose.frame_id
            )));
        }
        Ok(Self {
            descriptor,
            pose,
            payloads,
        })
    }

    /// Pool a raw token block into the frame's descriptors.
    pub fn from_tokens(block: &TokenBlock, pose: PoseMeta, payloads: Vec<Vec<u8>>) -> Result<Self> {
        Self::new(pool_descriptor(block)?, pose, payloads)
    }

    pub fn frame_id(&self) -> u64 {
        self.descriptor.frame_id
    }
}

/// Threshold, segment count and score range of a frame's candidate history
/// (live frames excluding the anchor), logged for every strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceSummary {
    pub threshold: Option<f64>,
    pub segments: usize,
    pub min_score: Option<f64>,
    pub max_score: Option<f64>,
}

/// One log record per processed frame, in stream order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameLog {
    pub frame_id: u64,
    pub selection: SelectionResult,
    pub relevance: RelevanceSummary,
    pub compression: Option<CompressionReport>,
    pub live_after: usize,
    pub payload_bytes_after: u64,
    /// XOR-fold of the per-layer gather checksums for this frame's context.
    pub context_digest: u64,
}

/// Live count and payload bytes after each frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorySample {
    pub frame_id: u64,
    pub live: usize,
    pub payload_bytes: u64,
}

/// Full outcome of a stream run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub strategy_tag: String,
    pub config: StreamConfig,
    pub trace_hash: String,
    pub frames: Vec<FrameLog>,
    pub timeline: Vec<MemorySample>,
    /// Largest live count ever observed (within-frame, before compression).
    pub peak_live: usize,
    pub final_stats: CacheStats,
    /// Live frames per occupied region at end of stream.
    pub final_occupancy: Vec<(RegionKey, usize)>,
}

/// Deterministic checksum standing in for attention over the gathered
/// context: a hash over the layer tag, the ascending (id, payload) pairs,
/// and the query frame's own payload. Input order does not matter.
pub fn attention_replay(selected: &[(u64, &[u8])], query_payload: &[u8], layer: usize) -> u64 {
    let mut pairs: Vec<(u64, &[u8])> = selected.to_vec();
    pairs.sort_by_key(|&(id, _)| id);
    let mut hasher = Sha256::new();
    hasher.update((layer as u64).to_le_bytes());
    hasher.update((pairs.len() as u64).to_le_bytes());
    for (id, payload) in pairs {
        hasher.update(id.to_le_bytes());
        hasher.update((payload.len() as u64).to_le_bytes());
        hasher.update(payload);
    }
    hasher.update((query_payload.len() as u64).to_le_bytes());
    hasher.update(query_payload);
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields 32 bytes"))
}

/// Streaming state: the KV store, the spatial memory, and the frame counter.
#[derive(Debug, Clone)]
pub struct StreamEngine {
    cfg: StreamConfig,
    store: KvStore,
    memory: SpatialMemory,
    frames_seen: u64,
    peak_live: usize,
    descriptor_shape: Option<(usize, usize)>,
}

impl StreamEngine {
    pub fn new(cfg: StreamConfig) -> Result<Self> {
        cfg.validate()?;
        let memory = SpatialMemory::new(cfg.memory.clone())?;
        let store = KvStore::new(cfg.layers);
        Ok(Self {
            cfg,
            store,
            memory,
            frames_seen: 0,
            peak_live: 0,
            descriptor_shape: None,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.cfg
    }

    pub fn store(&self) -> &KvStore {
        &self.store
    }

    pub fn memory(&self) -> &SpatialMemory {
        &self.memory
    }

    pub fn frames_seen(&self) -> u64 {
        self.frames_seen
    }

    pub fn peak_live(&self) -> usize {
        self.peak_live
    }

    pub fn final_occupancy(&self) -> Vec<(RegionKey, usize)> {
        self.memory.occupancy(&self.store.live_ids())
    }

    fn check_shape(&mut self, descriptor: &FrameDescriptor) -> Result<()> {
        let shape = (descriptor.heads(), descriptor.head_dim());
        match self.descriptor_shape {
            None => {
                self.descriptor_shape = Some(shape);
                Ok(())
            }
            Some(expected) if expected == shape => Ok(()),
            Some(expected) => Err(Error::ShapeMismatch(format!(
                "frame {} descriptor is {}x{}, stream is {}x{}",
                descriptor.frame_id, shape.0, shape.1, expected.0, expected.1
            ))),
        }
    }

    /// Process one frame end to end and return its log record.
    pub fn process_frame(&mut self, input: FrameInput) -> Result<FrameLog> {
        let frame_id = input.frame_id();
        self.check_shape(&input.descriptor)?;
        if input.payloads.len() != self.cfg.layers {
            return Err(Error::ShapeMismatch(format!(
                "frame {frame_id} carries {} payloads, stream has {} layers",
                input.payloads.len(),
                self.cfg.layers
            )));
        }
        // Trigger is decided by the number of frames processed before this one.
        let trigger = should_compress(self.frames_seen, &self.cfg.memory);

        // Relevance profile over the live history, then selection.
        let live = self.store.live_ids();
        let history: Vec<&FrameDescriptor> = live
            .iter()
            .map(|&id| self.store.descriptor(id).expect("live ids are present"))
            .collect();
        let prof = profile(&input.descriptor, &history, self.cfg.scoring)?;
        let selection = select(self.cfg.strategy, &prof, &self.cfg.selection);
        let relevance = summarize_relevance(&prof, &self.cfg.selection);

        // Gather the attended context at every layer; the id set must be the
        // one chosen at selection time for each of them.
        let attended = selection.attended_ids();
        let mut context_digest = 0u64;
        for layer in 0..self.cfg.layers {
            let payloads = self.store.gather(&attended, layer)?;
            if payloads.len() != attended.len() {
                return Err(Error::Invariant(format!(
                    "layer {layer} gathered {} payloads for {} selected frames",
                    payloads.len(),
                    attended.len()
                )));
            }
            let pairs: Vec<(u64, &[u8])> = attended.iter().copied().zip(payloads).collect();
            context_digest ^= attention_replay(&pairs, &input.payloads[layer], layer);
        }

        // Insert this frame, then record its pose region.
        self.store.insert(KvEntry::new(
            frame_id,
            input.payloads,
            input.descriptor,
            input.pose.clone(),
        ))?;
        self.memory.record(&input.pose);
        self.frames_seen += 1;
        self.peak_live = self.peak_live.max(self.store.live_len());

        let compression = if trigger {
            let keyed = self.memory.keyed_frames(&self.store.live_ids())?;
            let report = compress(&keyed, self.store.anchor_id(), frame_id, &self.cfg.memory);
            self.store.tombstone(&report.tombstoned_ids)?;
            Some(report)
        } else {
            None
        };

        Ok(FrameLog {
            frame_id,
            selection,
            relevance,
            compression,
            live_after: self.store.live_len(),
            payload_bytes_after: self.store.stats().payload_bytes,
            context_digest,
        })
    }
}

/// Threshold/segment diagnostics over the candidate (non-anchor) scores,
/// strategy-independent.
fn summarize_relevance(
    prof: &crate::relevance::RelevanceProfile,
    cfg: &SelectionConfig,
) -> RelevanceSummary {
    let candidates: Vec<f64> = prof.scores.iter().skip(1).map(|&(_, s)| s).collect();
    if candidates.is_empty() {
        return RelevanceSummary {
            threshold: None,
            segments: 0,
            min_score: None,
            max_score: None,
        };
    }
    let tau = adaptive_threshold(&candidates, cfg.threshold_coeff).expect("non-empty finite scores");
    let segments = identify_segments(&candidates, tau, cfg.merge_gap).len();
    RelevanceSummary {
        threshold: Some(tau),
        segments,
        min_score: candidates.iter().copied().reduce(f64::min),
        max_score: candidates.iter().copied().reduce(f64::max),
    }
}

/// Replay a parsed trace under the given configuration.
pub fn run_stream(trace: &Trace, cfg: &StreamConfig) -> Result<StreamReport> {
    if cfg.layers != trace.header.layers {
        return Err(Error::ShapeMismatch(format!(
            "config has {} layers, trace header has {}",
            cfg.layers, trace.header.layers
        )));
    }
    let mut engine = StreamEngine::new(cfg.clone())?;
    let mut frames = Vec::with_capacity(trace.frames.len());
    let mut timeline = Vec::with_capacity(trace.frames.len());
    for frame in &trace.frames {
        let payloads: Vec<Vec<u8>> = frame
            .payload_sizes
            .iter()
            .enumerate()
            .map(|(layer, &len)| synth_payload(frame.frame_id, layer, len as usize))
            .collect();
        let input = FrameInput::new(trace.descriptor(frame)?, frame.pose()?, payloads)?;
        let log = engine.process_frame(input)?;
        timeline.push(MemorySample {
            frame_id: log.frame_id,
            live: log.live_after,
            payload_bytes: log.payload_bytes_after,
        });
        frames.push(log);
    }
    Ok(StreamReport {
        strategy_tag: cfg.strategy.tag().to_string(),
        config: cfg.clone(),
        trace_hash: trace.header.trace_hash.clone(),
        frames,
        timeline,
        peak_live: engine.peak_live(),
        final_stats: engine.store().stats().clone(),
        final_occupancy: engine.final_occupancy(),
    })
}
