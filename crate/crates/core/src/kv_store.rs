//! Per-frame, per-layer opaque KV payload store with tombstone semantics.
//!
//! Payloads are never interpreted: the cache policy is decoupled from any
//! model. Tombstoning releases a frame's payloads while keeping its pose and
//! key descriptor, so frame indices stay stable for the lifetime of the
//! stream. Byte accounting is exact and the payload peak is monotone.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::relevance::FrameDescriptor;
use crate::spatial::PoseMeta;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryState {
    Live,
    Tombstoned,
}

/// One cached frame: its per-layer payloads plus retrieval metadata.
/// Tombstoned entries have empty payloads but keep descriptor and pose.
#[derive(Debug, Clone)]
pub struct KvEntry {
    pub frame_id: u64,
    pub layers: Vec<Vec<u8>>,
    pub state: EntryState,
    pub descriptor: FrameDescriptor,
    pub pose: PoseMeta,
}

impl KvEntry {
    pub fn new(
        frame_id: u64,
        layers: Vec<Vec<u8>>,
        descriptor: FrameDescriptor,
        pose: PoseMeta,
    ) -> Self {
        Self {
            frame_id,
            layers,
            state: EntryState::Live,
            descriptor,
            pose,
        }
    }

    pub fn payload_bytes(&self) -> u64 {
        self.layers.iter().map(|l| l.len() as u64).sum()
    }
}

/// Store-wide accounting. `payload_bytes` counts live entries only;
/// `peak_payload_bytes` never decreases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub live_count: usize,
    pub tombstoned_count: usize,
    pub payload_bytes: u64,
    pub peak_payload_bytes: u64,
}

/// Append-only store keyed by frame id. Ids must arrive strictly increasing
/// and are never reused; the first id ever inserted is the anchor and cannot
/// be tombstoned. Single writer; reads see a consistent snapshot between
/// mutations.
#[derive(Debug, Clone)]
pub struct KvStore {
    layers: usize,
    entries: BTreeMap<u64, KvEntry>,
    anchor: Option<u64>,
    stats: CacheStats,
}

impl KvStore {
    pub fn new(layers: usize) -> Self {
        Self {
            layers,
            entries: BTreeMap::new(),
            anchor: None,
            stats: CacheStats::default(),
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layers
    }

    pub fn anchor_id(&self) -> Option<u64> {
        self.anchor
    }

    pub fn stats(&self) -> &CacheStats {
        &self.stats
    }

    pub fn contains(&self, frame_id: u64) -> bool {
        self.entries.contains_key(&frame_id)
    }

    pub fn is_live(&self, frame_id: u64) -> bool {
        self.entries
            .get(&frame_id)
            .is_some_and(|e| e.state == EntryState::Live)
    }

    /// Metadata survives tombstoning.
    pub fn descriptor(&self, frame_id: u64) -> Option<&FrameDescriptor> {
        self.entries.get(&frame_id).map(|e| &e.descriptor)
    }

    pub fn pose(&self, frame_id: u64) -> Option<&PoseMeta> {
        self.entries.get(&frame_id).map(|e| &e.pose)
    }

    pub fn live_ids(&self) -> Vec<u64> {
        self.entries
            .values()
            .filter(|e| e.state == EntryState::Live)
            .map(|e| e.frame_id)
            .collect()
    }

    pub fn live_len(&self) -> usize {
        self.stats.live_count
    }

    /// Insert a live entry with exactly one payload per layer. The id must
    /// exceed every id ever inserted.
    pub fn insert(&mut self, entry: KvEntry) -> Result<()> {
        if entry.state != EntryState::Live {
            return Err(Error::InvalidArgument(
                "only live entries can be inserted".to_string(),
            ));
        }
        if entry.layers.len() != self.layers {
            return Err(Error::ShapeMismatch(format!(
                "entry for frame {} has {} layer payloads, store holds {}",
                entry.frame_id,
                entry.layers.len(),
                self.layers
            )));
        }
        if entry.descriptor.frame_id != entry.frame_id || entry.pose.frame_id != entry.frame_id {
            return Err(Error::InvalidArgument(format!(
                "metadata frame ids disagree with entry id {}",
                entry.frame_id
            )));
        }
        if let Some((&newest, _)) = self.entries.last_key_value() {
            if entry.frame_id == newest {
                return Err(Error::DuplicateFrame(entry.frame_id));
            }
            if entry.frame_id < newest {
                return Err(Error::OutOfOrderFrame {
                    got: entry.frame_id,
                    newest,
                });
            }
        }
        if self.anchor.is_none() {
            self.anchor = Some(entry.frame_id);
        }
        self.stats.live_count += 1;
        self.stats.payload_bytes += entry.payload_bytes();
        self.stats.peak_payload_bytes = self.stats.peak_payload_bytes.max(self.stats.payload_bytes);
        self.entries.insert(entry.frame_id, entry);
        Ok(())
    }

    /// Payloads of the given frames at one layer, in ascending id order.
    /// Input order does not matter; duplicates are collapsed. Any tombstoned
    /// or unknown id is an error — it signals a selection-layer bug.
    pub fn gather(&self, ids: &[u64], layer: usize) -> Result<Vec<&[u8]>> {
        if layer >= self.layers {
            return Err(Error::LayerOutOfRange {
                layer,
                layers: self.layers,
            });
        }
        let mut sorted: Vec<u64> = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = Vec::with_capacity(sorted.len());
        for id in sorted {
            let entry = self.entries.get(&id).ok_or(Error::UnknownFrame(id))?;
            if entry.state != EntryState::Live {
                return Err(Error::Tombstoned(id));
            }
            out.push(entry.layers[layer].as_slice());
        }
        Ok(out)
    }

    /// Release the payloads of the given live, non-anchor frames. The whole
    /// call is rejected — with no state change — if any id is unknown,
    /// already tombstoned, or the anchor. Returns the bytes freed.
    pub fn tombstone(&mut self, ids: &[u64]) -> Result<u64> {
        for &id in ids {
            if Some(id) == self.anchor {
                return Err(Error::AnchorProtected(id));
            }
            let entry = self.entries.get(&id).ok_or(Error::UnknownFrame(id))?;
            if entry.state != EntryState::Live {
                return Err(Error::Tombstoned(id));
            }
        }
        let mut unique: Vec<u64> = ids.to_vec();
        unique.sort_unstable();
        unique.dedup();
        let mut freed = 0u64;
        for id in unique {
            let entry = self.entries.get_mut(&id).expect("validated above");
            freed += entry.payload_bytes();
            for layer in &mut entry.layers {
                *layer = Vec::new();
            }
            entry.state = EntryState::Tombstoned;
            self.stats.live_count -= 1;
            self.stats.tombstoned_count += 1;
        }
        self.stats.payload_bytes -= freed;
        Ok(freed)
    }

    /// Independent byte recount over live entries, for accounting checks.
    pub fn recount_payload_bytes(&self) -> u64 {
        self.entries
            .values()
            .filter(|e| e.state == EntryState::Live)
            .map(KvEntry::payload_bytes)
            .sum()
    }
}
