//! Synthetic camera-trajectory traces and their line-delimited file format.
//!
//! A trace is one JSON header line followed by one JSON object per frame:
//! pose (position and optical-axis direction) plus the frame's pooled query
//! and key descriptors as flat row-major `heads * head_dim` arrays, and the
//! per-layer payload sizes. Payload contents are not stored; they are
//! synthesized deterministically from `(frame_id, layer)` at replay time.
//!
//! Descriptors are a fixed seeded random projection of a smooth pose
//! embedding (random Fourier features of position plus a weighted direction
//! term), with optional isotropic noise. Inner products between descriptors
//! therefore track geometric proximity, which is what makes dot-product
//! relevance against the pose oracle meaningful on these streams.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::relevance::{FrameDescriptor, HeadVectors};
use crate::rng::{sub_rng, SubStream};
use crate::spatial::{BoundingBox, PoseMeta};
use crate::{Error, Result};

pub const TRACE_VERSION: u32 = 1;

/// Frames per revolution of the loop trajectory.
const LOOP_PERIOD: f64 = 64.0;
/// Outer loop radius as a fraction of the smaller horizontal extent.
const LOOP_OUTER_FRACTION: f64 = 0.40;
/// Inner (final) radius as a fraction of the outer radius. The loop spirals
/// inward on a square-root schedule so revisit relevance decays smoothly.
const LOOP_INNER_RATIO: f64 = 0.25;
/// Half-period of the back-and-forth sweep, in frames.
const SWEEP_HALF_PERIOD: usize = 50;
/// Random-walk step scale as a fraction of the extent diagonal.
const WALK_STEP_FRACTION: f64 = 0.02;
/// Room layout for the revisit trajectory.
const ROOM_DWELL: usize = 40;
const ROOM_TRAVEL: usize = 10;
const ROOM_OFFSET_FRACTION: f64 = 0.30;
const ROOM_ORBIT_FRACTION: f64 = 0.06;

/// Width of the descriptor position kernel as a fraction of the position
/// bounding-box diagonal.
const KERNEL_WIDTH_FRACTION: f64 = 0.075;
/// Weight of the direction term in the pose embedding.
const DIRECTION_WEIGHT: f64 = 0.40;

/// Camera path shapes for the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    /// Inward spiral in the horizontal plane; revisits the same bearing once
    /// per revolution at slowly shrinking radius.
    Loop,
    /// Straight segment swept forward and backward.
    #[serde(rename = "backforth")]
    BackAndForth,
    /// Reflected Gaussian random walk.
    #[serde(rename = "walk")]
    RandomWalk,
    /// Four rooms visited cyclically with short transits, revisit-heavy.
    #[serde(rename = "revisit")]
    RoomRevisit,
}

impl TrajectoryKind {
    pub const ALL: [TrajectoryKind; 4] = [
        TrajectoryKind::Loop,
        TrajectoryKind::BackAndForth,
        TrajectoryKind::RandomWalk,
        TrajectoryKind::RoomRevisit,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            TrajectoryKind::Loop => "loop",
            TrajectoryKind::BackAndForth => "backforth",
            TrajectoryKind::RandomWalk => "walk",
            TrajectoryKind::RoomRevisit => "revisit",
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

/// Generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub kind: TrajectoryKind,
    pub frames: usize,
    pub extent: [f64; 3],
    pub noise_sigma: f64,
    pub seed: u64,
    pub heads: usize,
    pub head_dim: usize,
    pub special_tokens: usize,
    pub layers: usize,
    pub payload_bytes: u32,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            kind: TrajectoryKind::Loop,
            frames: 300,
            extent: [10.0, 3.0, 10.0],
            noise_sigma: 0.02,
            seed: 7,
            heads: 2,
            head_dim: 16,
            special_tokens: 5,
            layers: 4,
            payload_bytes: 256,
        }
    }
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames < 1 {
            return Err(Error::InvalidConfig("frame count must be >= 1".to_string()));
        }
        if !self.extent.iter().all(|&e| e.is_finite() && e > 0.0) {
            return Err(Error::InvalidConfig(
                "scene extent must be positive on every axis".to_string(),
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig("noise sigma must be >= 0".to_string()));
        }
        if self.heads < 1 || self.head_dim < 1 || self.layers < 1 {
            return Err(Error::InvalidConfig(
                "heads, head_dim and layers must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// First line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub heads: usize,
    pub head_dim: usize,
    pub special_tokens: usize,
    pub layers: usize,
    pub payload_bytes: u32,
    pub frame_count: usize,
    pub trace_hash: String,
}

/// One frame line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub frame_id: u64,
    pub position: [f64; 3],
    pub direction: [f64; 3],
    pub q_bar: Vec<f64>,
    pub k_bar: Vec<f64>,
    pub payload_sizes: Vec<u32>,
}

/// A fully parsed trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub frames: Vec<TraceFrame>,
}

impl TraceFrame {
    pub fn descriptor_with(&self, heads: usize, head_dim: usize) -> Result<FrameDescriptor> {
        FrameDescriptor::new(
            self.frame_id,
            HeadVectors::new(heads, head_dim, self.q_bar.clone())?,
            HeadVectors::new(heads, head_dim, self.k_bar.clone())?,
        )
    }

    pub fn pose(&self) -> Result<PoseMeta> {
        PoseMeta::new(self.frame_id, self.position, self.direction)
    }
}

impl Trace {
    /// Hash over the serialized frame lines; pins the content so replays and
    /// comparisons can verify they ran the same stream.
    pub fn compute_hash(frames: &[TraceFrame]) -> String {
        let mut hasher = Sha256::new();
        for frame in frames {
            hasher.update(serde_json::to_string(frame).expect("trace frames serialize").as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn serialize(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        for frame in &self.frames {
            out.push('\n');
            out.push_str(&serde_json::to_string(frame).expect("frame serializes"));
        }
        out.push('\n');
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.serialize())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Trace> {
        let mut lines = text.lines().enumerate();
        let (_, header_line) = lines.next().ok_or(Error::MalformedTrace {
            line: 1,
            msg: "empty file".to_string(),
        })?;
        let header: TraceHeader =
            serde_json::from_str(header_line).map_err(|e| Error::MalformedTrace {
                line: 1,
                msg: e.to_string(),
            })?;
        if header.version != TRACE_VERSION {
            return Err(Error::MalformedTrace {
                line: 1,
                msg: format!("unsupported version {}", header.version),
            });
        }
        let mut frames = Vec::with_capacity(header.frame_count);
        let mut prev_id: Option<u64> = None;
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let frame: TraceFrame =
                serde_json::from_str(line).map_err(|e| Error::MalformedTrace {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            let bad = |msg: String| Error::MalformedTrace { line: lineno, msg };
            if let Some(p) = prev_id {
                if frame.frame_id <= p {
                    return Err(bad(format!(
                        "frame id {} not above previous {}",
                        frame.frame_id, p
                    )));
                }
            }
            let dim = header.heads * header.head_dim;
            if frame.q_bar.len() != dim || frame.k_bar.len() != dim {
                return Err(bad(format!(
                    "descriptor length {} / {} does not match {}x{}",
                    frame.q_bar.len(),
                    frame.k_bar.len(),
                    header.heads,
                    header.head_dim
                )));
            }
            if frame.payload_sizes.len() != header.layers {
                return Err(bad(format!(
                    "{} payload sizes for {} layers",
                    frame.payload_sizes.len(),
                    header.layers
                )));
            }
            frame.pose().map_err(|e| bad(e.to_string()))?;
            if !frame
                .q_bar
                .iter()
                .chain(frame.k_bar.iter())
                .all(|v| v.is_finite())
            {
                return Err(bad("descriptors must be finite".to_string()));
            }
            prev_id = Some(frame.frame_id);
            frames.push(frame);
        }
        if frames.len() != header.frame_count {
            return Err(Error::MalformedTrace {
                line: frames.len() + 1,
                msg: format!(
                    "header declares {} frames, file holds {}",
                    header.frame_count,
                    frames.len()
                ),
            });
        }
        let hash = Trace::compute_hash(&frames);
        if hash != header.trace_hash {
            return Err(Error::TraceHashMismatch(format!(
                "header says {}, content hashes to {hash}",
                header.trace_hash
            )));
        }
        Ok(Trace { header, frames })
    }

    pub fn load(path: &Path) -> Result<Trace> {
        Trace::parse(&fs::read_to_string(path)?)
    }

    pub fn poses(&self) -> Result<Vec<PoseMeta>> {
        self.frames.iter().map(TraceFrame::pose).collect()
    }
}

impl TraceFrame {
    pub fn payload_total(&self) -> u64 {
        self.payload_sizes.iter().map(|&s| s as u64).sum()
    }
}

/// Descriptor accessor bound to a trace's header shape.
impl Trace {
    pub fn descriptor(&self, frame: &TraceFrame) -> Result<FrameDescriptor> {
        frame.descriptor_with(self.header.heads, self.header.head_dim)
    }
}

/// Synthesize the payload bytes for `(frame_id, layer)`. Pure function of
/// its arguments, so any replay of the same trace sees identical bytes.
pub fn synth_payload(frame_id: u64, layer: usize, len: usize) -> Vec<u8> {
    let mut rng = sub_rng(frame_id, SubStream::Payload, layer as u64);
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    out
}

fn camera_poses(cfg: &TrajectoryConfig) -> Vec<([f64; 3], [f64; 3])> {
    let center = [cfg.extent[0] / 2.0, cfg.extent[1] / 2.0, cfg.extent[2] / 2.0];
    let n = cfg.frames;
    let mut rng = sub_rng(cfg.seed, SubStream::Trajectory, 0);
    match cfg.kind {
        TrajectoryKind::Loop => {
            let outer = LOOP_OUTER_FRACTION * cfg.extent[0].min(cfg.extent[2]);
            let inner = LOOP_INNER_RATIO * outer;
            (0..n)
                .map(|t| {
                    let progress = if n > 1 { t as f64 / (n - 1) as f64 } else { 0.0 };
                    let radius = inner + (outer - inner) * (1.0 - progress).sqrt();
                    let angle = TAU * t as f64 / LOOP_PERIOD;
                    let position = [
                        center[0] + radius * angle.cos(),
                        center[1],
                        center[2] + radius * angle.sin(),
                    ];
                    let direction = [-angle.sin(), 0.0, angle.cos()];
                    (position, direction)
                })
                .collect()
        }
        TrajectoryKind::BackAndForth => {
            let half = LOOP_OUTER_FRACTION * cfg.extent[0];
            (0..n)
                .map(|t| {
                    let phase = t % (2 * SWEEP_HALF_PERIOD);
                    let (offset, sign) = if phase < SWEEP_HALF_PERIOD {
                        (phase, 1.0)
                    } else {
                        (2 * SWEEP_HALF_PERIOD - phase, -1.0)
                    };
                    let u = offset as f64 / SWEEP_HALF_PERIOD as f64;
                    let position = [center[0] - half + 2.0 * half * u, center[1], center[2]];
                    (position, [sign, 0.0, 0.0])
                })
                .collect()
        }
        TrajectoryKind::RandomWalk => {
            let step = WALK_STEP_FRACTION
                * (cfg.extent[0].powi(2) + cfg.extent[1].powi(2) + cfg.extent[2].powi(2)).sqrt();
            let lo: Vec<f64> = cfg.extent.iter().map(|e| 0.05 * e).collect();
            let hi: Vec<f64> = cfg.extent.iter().map(|e| 0.95 * e).collect();
            let mut position = center;
            let mut direction = [1.0, 0.0, 0.0];
            (0..n)
                .map(|_| {
                    let mut delta = [0.0; 3];
                    for (i, d) in delta.iter_mut().enumerate() {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        *d = g * step;
                        position[i] += *d;
                        if position[i] < lo[i] {
                            position[i] = 2.0 * lo[i] - position[i];
                            *d = -*d;
                        }
                        if position[i] > hi[i] {
                            position[i] = 2.0 * hi[i] - position[i];
                            *d = -*d;
                        }
                    }
                    let norm = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
                    if norm > 1e-12 {
                        direction = [delta[0] / norm, delta[1] / norm, delta[2] / norm];
                    }
                    (position, direction)
                })
                .collect()
        }
        TrajectoryKind::RoomRevisit => {
            let dx = ROOM_OFFSET_FRACTION * cfg.extent[0];
            let dz = ROOM_OFFSET_FRACTION * cfg.extent[2];
            let rooms = [
                [center[0] - dx, center[1], center[2] - dz],
                [center[0] + dx, center[1], center[2] - dz],
                [center[0] + dx, center[1], center[2] + dz],
                [center[0] - dx, center[1], center[2] + dz],
            ];
            let orbit = ROOM_ORBIT_FRACTION * cfg.extent[0].min(cfg.extent[2]);
            let visit_len = ROOM_DWELL + ROOM_TRAVEL;
            let jitter = 0.01 * cfg.extent[0].min(cfg.extent[2]);
            (0..n)
                .map(|t| {
                    let visit = t / visit_len;
                    let phase = t % visit_len;
                    let room = rooms[visit % rooms.len()];
                    let next_room = rooms[(visit + 1) % rooms.len()];
                    let jx: f64 = StandardNormal.sample(&mut rng);
                    let jz: f64 = StandardNormal.sample(&mut rng);
                    if phase < ROOM_DWELL {
                        let angle = TAU * phase as f64 / ROOM_DWELL as f64;
                        let position = [
                            room[0] + orbit * angle.cos() + jitter * jx,
                            room[1],
                            room[2] + orbit * angle.sin() + jitter * jz,
                        ];
                        (position, [angle.cos(), 0.0, angle.sin()])
                    } else {
                        let u = (phase - ROOM_DWELL) as f64 / ROOM_TRAVEL as f64;
                        let position = [
                            room[0] + (next_room[0] - room[0]) * u + jitter * jx,
                            room[1],
                            room[2] + (next_room[2] - room[2]) * u + jitter * jz,
                        ];
                        let heading = [next_room[0] - room[0], 0.0, next_room[2] - room[2]];
                        let norm = (heading[0] * heading[0] + heading[2] * heading[2]).sqrt();
                        (position, [heading[0] / norm, 0.0, heading[2] / norm])
                    }
                })
                .collect()
        }
    }
}

/// The smooth pose embedding: Gaussian radial-basis features of position
/// over seeded random centers, plus the weighted direction vector. Feature
/// dots approximate a Gaussian position kernel times direction alignment,
/// and since every feature is nonnegative the far field scores near zero
/// instead of oscillating around it.
struct PoseEmbedding {
    centers: Vec<[f64; 3]>,
    sigma: f64,
}

impl PoseEmbedding {
    fn new(count: usize, bbox: &BoundingBox, sigma: f64, rng: &mut impl Rng) -> Self {
        let centers = (0..count)
            .map(|_| {
                let mut c = [0.0; 3];
                for (i, v) in c.iter_mut().enumerate() {
                    *v = bbox.min[i] + (bbox.max[i] - bbox.min[i]) * rng.random::<f64>();
                }
                c
            })
            .collect();
        Self { centers, sigma }
    }

    fn features(&self, position: [f64; 3]) -> Vec<f64> {
        let denom = 2.0 * self.sigma * self.sigma;
        self.centers
            .iter()
            .map(|c| {
                let d2: f64 = (0..3).map(|i| (position[i] - c[i]).powi(2)).sum();
                (-d2 / denom).exp()
            })
            .collect()
    }
}

/// Orthonormalize the columns of a `rows x cols` seeded Gaussian matrix
/// (modified Gram-Schmidt), so projecting through it preserves embedding
/// inner products exactly. Columns beyond `rows` stay as normalized
/// Gaussians — only reachable for degenerate descriptor shapes.
fn random_projection(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = (0..cols)
        .map(|_| {
            (0..rows)
                .map(|_| StandardNormal.sample(rng))
                .collect::<Vec<f64>>()
        })
        .collect();
    for i in 0..cols {
        for j in 0..i.min(rows) {
            let dot: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
            for r in 0..rows {
                columns[i][r] -= dot * columns[j][r];
            }
        }
        let norm: f64 = columns[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in columns[i].iter_mut() {
                *v /= norm;
            }
        }
    }
    columns
}

/// Generate a fully reproducible synthetic trace.
pub fn generate_trace(cfg: &TrajectoryConfig) -> Result<Trace> {
    cfg.validate()?;
    let poses = camera_poses(cfg);
    let mut bbox = BoundingBox::from_point(poses[0].0);
    for (p, _) in poses.iter().skip(1) {
        bbox = crate::spatial::update_bbox(&bbox, *p);
    }
    let diag = bbox.diagonal().max(1e-9);
    let sigma = KERNEL_WIDTH_FRACTION * diag;

    let out_dim = cfg.heads * cfg.head_dim;
    let feature_count = out_dim.saturating_sub(3).max(1);
    let in_dim = feature_count + 3;
    let mut proj_rng = sub_rng(cfg.seed, SubStream::Projection, 0);
    let embedding = PoseEmbedding::new(feature_count, &bbox, sigma, &mut proj_rng);
    let projection = random_projection(out_dim, in_dim, &mut proj_rng);

    // Scale position features so the mean self inner product is one; keeps
    // score magnitudes comparable across scenes and feature counts.
    let raw_features: Vec<Vec<f64>> = poses.iter().map(|(p, _)| embedding.features(*p)).collect();
    let mean_self: f64 = raw_features
        .iter()
        .map(|f| f.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / poses.len() as f64;
    let gain = 1.0 / mean_self.max(1e-12).sqrt();

    let mut frames = Vec::with_capacity(cfg.frames);
    for (t, &(position, direction)) in poses.iter().enumerate() {
        let mut phi: Vec<f64> = raw_features[t].iter().map(|v| v * gain).collect();
        for d in direction {
            phi.push(DIRECTION_WEIGHT * d);
        }
        let mut q_bar = vec![0.0; out_dim];
        let mut k_bar = vec![0.0; out_dim];
        for (column, &x) in projection.iter().zip(&phi) {
            for (r, &c) in column.iter().enumerate() {
                q_bar[r] += c * x;
            }
        }
        k_bar.copy_from_slice(&q_bar);
        if cfg.noise_sigma > 0.0 {
            let mut noise_rng = sub_rng(cfg.seed, SubStream::Noise, t as u64);
            for v in q_bar.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut noise_rng);
                *v += g * cfg.noise_sigma;
            }
            for v in k_bar.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut noise_rng);
                *v += g * cfg.noise_sigma;
            }
        }
        frames.push(TraceFrame {
            frame_id: t as u64,
            position,
            direction,
            q_bar,
            k_bar,
            payload_sizes: vec![cfg.payload_bytes; cfg.layers],
        });
    }

    let header = TraceHeader {
        version: TRACE_VERSION,
        heads: cfg.heads,
        head_dim: cfg.head_dim,
        special_tokens: cfg.special_tokens,
        layers: cfg.layers,
        payload_bytes: cfg.payload_bytes,
        frame_count: cfg.frames,
        trace_hash: Trace::compute_hash(&frames),
    };
    Ok(Trace { header, frames })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = TrajectoryConfig::default();
        let a = generate_trace(&cfg).unwrap().serialize();
        let b = generate_trace(&cfg).unwrap().serialize();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(a, generate_trace(&other).unwrap().serialize());
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = TrajectoryConfig {
            frames: 40,
            ..TrajectoryConfig::default()
        };
        let trace = generate_trace(&cfg).unwrap();
        let text = trace.serialize();
        let parsed = Trace::parse(&text).unwrap();
        assert_eq!(parsed, trace);
        assert_eq!(parsed.serialize(), text);
    }

    #[test]
    fn identical_poses_without_noise_share_descriptors() {
        // Back-and-forth passes re-visit the same (position, direction) pose
        // exactly once per full period.
        let cfg = TrajectoryConfig {
            kind: TrajectoryKind::BackAndForth,
            frames: 120,
            noise_sigma: 0.0,
            ..TrajectoryConfig::default()
        };
        let trace = generate_trace(&cfg).unwrap();
        let (a, b) = (&trace.frames[3], &trace.frames[103]);
        assert_eq!(a.position, b.position);
        assert_eq!(a.direction, b.direction);
        assert_eq!(a.q_bar, b.q_bar);
        assert_eq!(a.k_bar, b.k_bar);
    }

    #[test]
    fn tampered_content_fails_hash_check() {
        let trace = generate_trace(&TrajectoryConfig {
            frames: 5,
            ..TrajectoryConfig::default()
        })
        .unwrap();
        let text = trace.serialize();
        let tampered = text.replacen("\"frame_id\":2", "\"frame_id\":3", 1);
        assert!(matches!(
            Trace::parse(&tampered),
            Err(Error::TraceHashMismatch(_) | Error::MalformedTrace { .. })
        ));
    }

    #[test]
    fn malformed_line_reports_position() {
        let trace = generate_trace(&TrajectoryConfig {
            frames: 3,
            ..TrajectoryConfig::default()
        })
        .unwrap();
        let mut lines: Vec<String> = trace.serialize().lines().map(str::to_string).collect();
        lines[2] = "{not json".to_string();
        match Trace::parse(&lines.join("\n")) {
            Err(Error::MalformedTrace { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed trace, got {other:?}"),
        }
    }

    #[test]
    fn payload_synthesis_is_pure() {
        assert_eq!(synth_payload(3, 1, 32), synth_payload(3, 1, 32));
        assert_ne!(synth_payload(3, 1, 32), synth_payload(3, 2, 32));
        assert_ne!(synth_payload(3, 1, 32), synth_payload(4, 1, 32));
        assert_eq!(synth_payload(0, 0, 0), Vec::<u8>::new());
    }

    #[test]
    fn zero_extent_rejected() {
        let cfg = TrajectoryConfig {
            extent: [0.0, 1.0, 1.0],
            ..TrajectoryConfig::default()
        };
        assert!(generate_trace(&cfg).is_err());
    }

    #[test]
    fn poses_stay_inside_extent() {
        for kind in TrajectoryKind::ALL {
            let cfg = TrajectoryConfig {
                kind,
                frames: 400,
                ..TrajectoryConfig::default()
            };
            let trace = generate_trace(&cfg).unwrap();
            for frame in &trace.frames {
                for (axis, &p) in frame.position.iter().enumerate() {
                    assert!(
                        (-0.1..=cfg.extent[axis] + 0.1).contains(&p),
                        "{kind:?} axis {axis}: {p}"
                    );
                }
            }
        }
    }
}
