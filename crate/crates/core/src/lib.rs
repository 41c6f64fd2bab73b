//! Bounded-memory streaming KV-cache retrieval and compression engine.
//!
//! A streaming frame processor keeps an append-only cache of opaque per-layer
//! KV payloads, one entry per video frame. Each incoming frame selects which
//! cached frames to attend to under a fixed budget, driven by the relevance
//! between its pooled query descriptor and the cached key descriptors.
//! Selection diversity comes from segment sampling over the relevance profile;
//! long-term growth is bounded by a pose-indexed spatial memory that
//! periodically thins over-populated regions via tombstoning.
//!
//! Crate layout follows the pipeline:
//!
//! - [`relevance`] — frame descriptors and query/key scoring
//! - [`selection`] — segment sampling plus five baseline selection policies
//! - [`spatial`] — pose-indexed regions and periodic compression
//! - [`kv_store`] — per-frame per-layer payload store with tombstones
//! - [`streaming`] — the per-frame orchestration loop
//! - [`trace`] — synthetic trace generation and the line-delimited format
//! - [`metrics`] — geometric oracle, recall and coverage metrics
//! - [`harness`] — replay-to-files, run-log parsing, comparison CSV

pub mod harness;
pub mod kv_store;
pub mod metrics;
pub mod relevance;
pub mod rng;
pub mod selection;
pub mod spatial;
pub mod streaming;
pub mod trace;

mod error;

pub use error::{Error, Result};
