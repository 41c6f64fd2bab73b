//! Pose-indexed spatial memory and periodic region compression.
//!
//! Each frame's estimated camera position and optical-axis direction place it
//! in one of `K^3 * D` regions: a uniform position grid over the grow-only
//! bounding box of all observed positions, crossed with `D` azimuth bins.
//! Region keys are computed once at insertion, against the box as of that
//! frame, and never reassigned. Every `interval` frames, regions holding more
//! than the mean number of compressible frames are thinned to a fixed
//! fraction, keeping frames evenly spaced in temporal order; the anchor frame
//! is always kept.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::selection::{tolerant_floor, uniform_subset};
use crate::{Error, Result};

/// Estimated camera pose of one frame. The direction is unit length;
/// construction normalizes it and rejects zero or non-finite input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseMeta {
    pub frame_id: u64,
    pub position: [f64; 3],
    pub direction: [f64; 3],
}

impl PoseMeta {
    pub fn new(frame_id: u64, position: [f64; 3], direction: [f64; 3]) -> Result<Self> {
        if !position.iter().all(|v| v.is_finite()) || !direction.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pose for frame {frame_id} must be finite"
            )));
        }
        let norm = (direction[0] * direction[0]
            + direction[1] * direction[1]
            + direction[2] * direction[2])
            .sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "zero direction vector for frame {frame_id}"
            )));
        }
        Ok(Self {
            frame_id,
            position,
            direction: [
                direction[0] / norm,
                direction[1] / norm,
                direction[2] / norm,
            ],
        })
    }
}

/// Axis-aligned box over all observed camera positions. Grow-only: it
/// expands to contain each new position and never shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoundingBox {
    pub fn from_point(p: [f64; 3]) -> Self {
        Self { min: p, max: p }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    /// Euclidean diagonal length — the scene diameter.
    pub fn diagonal(&self) -> f64 {
        (0..3)
            .map(|i| (self.max[i] - self.min[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Component-wise min/max expansion of the box to contain `p`.
pub fn update_bbox(bbox: &BoundingBox, p: [f64; 3]) -> BoundingBox {
    let mut out = *bbox;
    for i in 0..3 {
        out.min[i] = out.min[i].min(p[i]);
        out.max[i] = out.max[i].max(p[i]);
    }
    out
}

/// Grid and compression parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryConfig {
    /// Position grid divisions per axis (K).
    pub grid_divisions: usize,
    /// Azimuth bins (D).
    pub direction_bins: usize,
    /// Frames between compression events.
    pub compress_interval: u64,
    /// Fraction of an over-represented region removed per event.
    pub deletion_ratio: f64,
}

impl Default for MemoryConfig {
    fn default() -> Self {
        Self {
            grid_divisions: 3,
            direction_bins: 4,
            compress_interval: 200,
            deletion_ratio: 0.5,
        }
    }
}

impl MemoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_divisions < 1 {
            return Err(Error::InvalidConfig("grid divisions must be >= 1".to_string()));
        }
        if self.direction_bins < 1 {
            return Err(Error::InvalidConfig("direction bins must be >= 1".to_string()));
        }
        if self.compress_interval < 1 {
            return Err(Error::InvalidConfig(
                "compression interval must be >= 1".to_string(),
            ));
        }
        if !(0.0..1.0).contains(&self.deletion_ratio) {
            return Err(Error::InvalidConfig(
                "deletion ratio must be in [0, 1)".to_string(),
            ));
        }
        Ok(())
    }
}

/// Composite region index: position cell plus azimuth bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegionKey {
    pub ix: u32,
    pub iy: u32,
    pub iz: u32,
    pub dir_bin: u32,
}

/// Place a pose in the grid. The cell size is the scene diameter over K; a
/// degenerate box maps every position to cell (0, 0, 0). Floor indices are
/// clamped into `[0, K-1]` (the floor lands exactly on K at the box corner).
pub fn assign_region(pose: &PoseMeta, bbox: &BoundingBox, cfg: &MemoryConfig) -> RegionKey {
    let k = cfg.grid_divisions as u32;
    let cell = bbox.diagonal() / cfg.grid_divisions as f64;
    let spatial = |axis: usize| -> u32 {
        if cell > 0.0 {
            let idx = ((pose.position[axis] - bbox.min[axis]) / cell).floor() as i64;
            idx.clamp(0, (k - 1) as i64) as u32
        } else {
            0
        }
    };
    let d = cfg.direction_bins as u32;
    let azimuth = pose.direction[2].atan2(pose.direction[0]);
    let bin = ((azimuth + std::f64::consts::PI) / (std::f64::consts::TAU / cfg.direction_bins as f64))
        .floor() as i64;
    RegionKey {
        ix: spatial(0),
        iy: spatial(1),
        iz: spatial(2),
        dir_bin: bin.clamp(0, (d - 1) as i64) as u32,
    }
}

/// True when a compression event is due: a positive multiple of the interval
/// of frames has been processed.
pub fn should_compress(frames_processed: u64, cfg: &MemoryConfig) -> bool {
    frames_processed > 0 && frames_processed % cfg.compress_interval == 0
}

/// One thinned region in a compression report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinnedRegion {
    pub region: RegionKey,
    pub before: usize,
    pub after: usize,
}

/// Outcome of one compression event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub trigger_frame: u64,
    /// Mean compressible-frame count over occupied regions.
    pub mean_occupancy: f64,
    pub thinned_regions: Vec<ThinnedRegion>,
    /// Ascending frame ids released by this event.
    pub tombstoned_ids: Vec<u64>,
}

impl CompressionReport {
    pub fn empty(trigger_frame: u64) -> Self {
        Self {
            trigger_frame,
            mean_occupancy: 0.0,
            thinned_regions: Vec::new(),
            tombstoned_ids: Vec::new(),
        }
    }
}

/// Thin over-represented regions. `live` holds every live frame with its
/// frozen region key; the anchor is excluded from compressible counts and is
/// never tombstoned. Regions with strictly more compressible frames than the
/// mean retain `floor((1 - deletion_ratio) * count)` frames, evenly spaced in
/// frame-id order; the rest are reported for tombstoning. Other regions are
/// untouched.
pub fn compress(
    live: &[(u64, RegionKey)],
    anchor_id: Option<u64>,
    trigger_frame: u64,
    cfg: &MemoryConfig,
) -> CompressionReport {
    let mut regions: BTreeMap<RegionKey, Vec<u64>> = BTreeMap::new();
    for &(id, key) in live {
        if Some(id) == anchor_id {
            continue;
        }
        regions.entry(key).or_default().push(id);
    }
    if regions.is_empty() {
        return CompressionReport::empty(trigger_frame);
    }
    for frames in regions.values_mut() {
        frames.sort_unstable();
    }

    let occupied = regions.len();
    let total: usize = regions.values().map(Vec::len).sum();
    let mean = total as f64 / occupied as f64;

    let mut thinned = Vec::new();
    let mut tombstoned = Vec::new();
    for (key, frames) in &regions {
        // Strict `count > mean`, compared exactly in integers.
        if frames.len() * occupied <= total {
            continue;
        }
        let keep = tolerant_floor((1.0 - cfg.deletion_ratio) * frames.len() as f64).max(0) as usize;
        let kept: Vec<usize> = uniform_subset(frames.len(), keep);
        let mut kept_mark = vec![false; frames.len()];
        for p in kept {
            kept_mark[p] = true;
        }
        for (i, &id) in frames.iter().enumerate() {
            if !kept_mark[i] {
                tombstoned.push(id);
            }
        }
        thinned.push(ThinnedRegion {
            region: *key,
            before: frames.len(),
            after: keep,
        });
    }
    tombstoned.sort_unstable();
    CompressionReport {
        trigger_frame,
        mean_occupancy: mean,
        thinned_regions: thinned,
        tombstoned_ids: tombstoned,
    }
}

/// Stateful organizer: the grow-only box plus the frozen region key of every
/// frame ever recorded. Keys survive tombstoning so indices stay stable.
#[derive(Debug, Clone)]
pub struct SpatialMemory {
    cfg: MemoryConfig,
    bbox: Option<BoundingBox>,
    keys: BTreeMap<u64, RegionKey>,
}

impl SpatialMemory {
    pub fn new(cfg: MemoryConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            bbox: None,
            keys: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &MemoryConfig {
        &self.cfg
    }

    pub fn bbox(&self) -> Option<&BoundingBox> {
        self.bbox.as_ref()
    }

    /// Expand the box to the pose, assign its region against the updated box,
    /// and freeze the key.
    pub fn record(&mut self, pose: &PoseMeta) -> RegionKey {
        let bbox = match self.bbox {
            Some(ref b) => update_bbox(b, pose.position),
            None => BoundingBox::from_point(pose.position),
        };
        self.bbox = Some(bbox);
        let key = assign_region(pose, &bbox, &self.cfg);
        self.keys.insert(pose.frame_id, key);
        key
    }

    pub fn region_of(&self, frame_id: u64) -> Option<RegionKey> {
        self.keys.get(&frame_id).copied()
    }

    /// The frozen keys of the given frames, in input order.
    pub fn keyed_frames(&self, ids: &[u64]) -> Result<Vec<(u64, RegionKey)>> {
        ids.iter()
            .map(|&id| {
                self.keys
                    .get(&id)
                    .map(|&k| (id, k))
                    .ok_or(Error::UnknownFrame(id))
            })
            .collect()
    }

    /// Live-frame count per occupied region, in key order.
    pub fn occupancy(&self, live_ids: &[u64]) -> Vec<(RegionKey, usize)> {
        let mut counts: BTreeMap<RegionKey, usize> = BTreeMap::new();
        for id in live_ids {
            if let Some(key) = self.keys.get(id) {
                *counts.entry(*key).or_default() += 1;
            }
        }
        counts.into_iter().collect()
    }
}
