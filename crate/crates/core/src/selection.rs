//! Frame selection under a fixed budget.
//!
//! Segment sampling decomposes selection into four steps: an adaptive
//! threshold over the relevance scores, identification of contiguous
//! above-threshold segments (with close segments merged), proportional quota
//! allocation by segment peak, and evenly spaced within-segment sampling,
//! followed by a final budget adjustment. Five baseline policies (top-k,
//! random, uniform, sliding window, probabilistic) share the same budget and
//! anchor-reservation contract.
//!
//! Conventions used throughout:
//! - the anchor (earliest live frame) is always attended and never counted
//!   among the selected frames;
//! - score ties break toward the more recent frame (larger id);
//! - "exceeds the threshold" is strict, so a zero-variance profile yields no
//!   segments and selection degrades to plain top-k by score.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::relevance::RelevanceProfile;
use crate::rng::{sub_rng, SubStream};
use crate::{Error, Result};

/// Budget and segment parameters for one selection policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Total attended frames per query, anchor included.
    pub budget: usize,
    /// Threshold coefficient: tau = mean + coeff * population std dev.
    pub threshold_coeff: f64,
    /// Segments separated by fewer than this many frames are merged.
    pub merge_gap: usize,
    /// Seed for the random and probabilistic baselines.
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            budget: 48,
            threshold_coeff: 0.3,
            merge_gap: 3,
            seed: 0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::InvalidConfig("budget must be >= 1".to_string()));
        }
        if !self.threshold_coeff.is_finite() {
            return Err(Error::InvalidConfig(
                "threshold coefficient must be finite".to_string(),
            ));
        }
        Ok(())
    }
}

/// Selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[serde(rename = "segment")]
    SegmentSampling,
    TopK,
    Random,
    Uniform,
    #[serde(rename = "window")]
    SlidingWindow,
    #[serde(rename = "prob")]
    Probabilistic,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::SegmentSampling,
        Strategy::TopK,
        Strategy::Random,
        Strategy::Uniform,
        Strategy::SlidingWindow,
        Strategy::Probabilistic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::SegmentSampling => "segment",
            Strategy::TopK => "topk",
            Strategy::Random => "random",
            Strategy::Uniform => "uniform",
            Strategy::SlidingWindow => "window",
            Strategy::Probabilistic => "prob",
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        Strategy::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

/// A maximal above-threshold run of history positions, after merging.
/// Indices are positions into the candidate score list, not frame ids.
/// A merged span may contain below-threshold positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub peak_index: usize,
    pub peak_score: f64,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..=self.end).contains(&index)
    }
}

/// Outcome of one selection: the reserved anchor plus the selected set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Earliest live frame; `None` only when the history is empty.
    pub anchor_id: Option<u64>,
    /// Ascending frame ids, anchor excluded.
    pub selected_ids: Vec<u64>,
    pub strategy_tag: String,
    /// Segments detected by this strategy (zero for baselines).
    pub segments_detected: usize,
    /// Adaptive threshold, when the segment pipeline ran.
    pub threshold: Option<f64>,
    /// Detected segment spans as (first_frame_id, last_frame_id).
    pub segment_spans: Vec<(u64, u64)>,
    /// Per-segment quotas, parallel to `segment_spans`.
    pub quotas: Vec<usize>,
}

impl SelectionResult {
    /// Anchor plus selected, ascending — the attended context.
    pub fn attended_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.anchor_id.iter().copied().collect();
        ids.extend(&self.selected_ids);
        ids.sort_unstable();
        ids
    }

    pub fn attended_len(&self) -> usize {
        self.anchor_id.iter().len() + self.selected_ids.len()
    }
}

/// Absolute tolerance for floors of nominally exact floating-point products
/// (e.g. `10 * 0.6 / 1.0` evaluating just below 6).
pub const FLOOR_TOLERANCE: f64 = 1e-9;

/// Floor with [`FLOOR_TOLERANCE`] absorbed.
pub fn tolerant_floor(x: f64) -> i64 {
    (x + FLOOR_TOLERANCE).floor() as i64
}

/// Shift added to min-subtracted scores before normalizing them into the
/// probabilistic baseline's sampling distribution.
pub const PROBABILISTIC_SHIFT: f64 = 1e-6;

/// Adaptive threshold: mean plus `threshold_coeff` population standard
/// deviations of the scores.
pub fn adaptive_threshold(scores: &[f64], threshold_coeff: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    if !scores.iter().all(|s| s.is_finite()) {
        return Err(Error::InvalidArgument("scores must be finite".to_string()));
    }
    let n = scores.len() as f64;
    let mut mean = 0.0;
    for &s in scores {
        mean += s;
    }
    mean /= n;
    let mut var = 0.0;
    for &s in scores {
        let d = s - mean;
        var += d * d;
    }
    var /= n;
    Ok(mean + threshold_coeff * var.sqrt())
}

/// Maximal runs of positions with score strictly above `tau`; runs separated
/// by fewer than `merge_gap` below-threshold positions are merged, with the
/// peak recomputed over the merged span (ties toward the larger index).
pub fn identify_segments(scores: &[f64], tau: f64, merge_gap: usize) -> Vec<Segment> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > tau {
            if run_start.is_none() {
                run_start = Some(i);
            }
        } else if let Some(start) = run_start.take() {
            spans.push((start, i - 1));
        }
    }
    if let Some(start) = run_start {
        spans.push((start, scores.len() - 1));
    }

    let mut merged: Vec<(usize, usize)> = Vec::new();
    for span in spans {
        if let Some(last) = merged.last_mut() {
            if span.0 - last.1 - 1 < merge_gap {
                last.1 = span.1;
                continue;
            }
        }
        merged.push(span);
    }

    merged
        .into_iter()
        .map(|(start, end)| {
            let mut peak = start;
            for i in start..=end {
                if scores[i] >= scores[peak] {
                    peak = i;
                }
            }
            Segment {
                start,
                end,
                peak_index: peak,
                peak_score: scores[peak],
            }
        })
        .collect()
}

/// Per-segment quotas: floors of the budget split proportionally to peak
/// scores, clamped to `[1, segment length]`. When the peak sum is not
/// positive (possible under negative-L2 scoring) the raw shares are equal.
pub fn allocate_quotas(segments: &[Segment], budget: usize) -> Result<Vec<usize>> {
    if segments.is_empty() {
        return Err(Error::InvalidArgument(
            "quota allocation needs at least one segment".to_string(),
        ));
    }
    if budget < 1 {
        return Err(Error::InvalidArgument(
            "quota allocation needs budget >= 1".to_string(),
        ));
    }
    let total: f64 = segments.iter().map(|s| s.peak_score).sum();
    Ok(segments
        .iter()
        .map(|seg| {
            let raw = if total > 0.0 {
                tolerant_floor(budget as f64 * seg.peak_score / total)
            } else {
                (budget / segments.len()) as i64
            };
            raw.clamp(1, seg.len() as i64) as usize
        })
        .collect())
}

/// Evenly spaced positions into a sorted set of `len` items: position
/// `round(j * (len-1) / (n-1))` for `j = 0..n`, the first item alone when
/// `n == 1`, duplicates after rounding resolved by advancing to the next
/// unused position. Deterministic; no RNG involved.
pub fn uniform_subset(len: usize, n: usize) -> Vec<usize> {
    if n == 0 || len == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![0];
    }
    if n >= len {
        return (0..len).collect();
    }
    let mut taken = vec![false; len];
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let ideal = (j as f64 * (len - 1) as f64 / (n - 1) as f64).round() as usize;
        let mut p = ideal.min(len - 1);
        while p < len && taken[p] {
            p += 1;
        }
        if p == len {
            p = 0;
            while taken[p] {
                p += 1;
            }
        }
        taken[p] = true;
        out.push(p);
    }
    out.sort_unstable();
    out
}

/// Sample `quota` positions from a segment: always its peak, plus evenly
/// spaced picks over the remaining members in ascending order.
pub fn sample_within_segment(seg: &Segment, quota: usize) -> Result<Vec<usize>> {
    if quota < 1 || quota > seg.len() {
        return Err(Error::InvalidArgument(format!(
            "quota {quota} outside [1, {}] for segment [{}..{}]",
            seg.len(),
            seg.start,
            seg.end
        )));
    }
    let others: Vec<usize> = (seg.start..=seg.end)
        .filter(|&i| i != seg.peak_index)
        .collect();
    let mut picked = vec![seg.peak_index];
    for p in uniform_subset(others.len(), quota - 1) {
        picked.push(others[p]);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Top `n` positions by score, ties toward the larger index, returned in
/// ascending index order.
fn top_by_score<I: IntoIterator<Item = usize>>(candidates: I, scores: &[f64], n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = candidates.into_iter().collect();
    v.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores are finite")
            .then(b.cmp(&a))
    });
    v.truncate(n);
    v.sort_unstable();
    v
}

/// Reconcile a sampled set with the budget: truncate to the highest-scoring
/// `budget` positions when over, top up with the highest-scoring unsampled
/// positions when under. The result always has `min(budget, len)` positions.
pub fn adjust_budget(sampled: &BTreeSet<usize>, scores: &[f64], budget: usize) -> BTreeSet<usize> {
    let target = budget.min(scores.len());
    match sampled.len() {
        n if n > target => top_by_score(sampled.iter().copied(), scores, target)
            .into_iter()
            .collect(),
        n if n < target => {
            let extra = top_by_score(
                (0..scores.len()).filter(|i| !sampled.contains(i)),
                scores,
                target - n,
            );
            sampled.iter().copied().chain(extra).collect()
        }
        _ => sampled.clone(),
    }
}

/// The anchor entry and the remaining candidates of a profile.
struct SplitProfile<'a> {
    anchor_id: u64,
    candidate_ids: Vec<u64>,
    candidate_scores: Vec<f64>,
    profile: &'a RelevanceProfile,
}

fn split_anchor(profile: &RelevanceProfile) -> Option<SplitProfile<'_>> {
    let (anchor_id, _) = *profile.scores.first()?;
    let mut candidate_ids = Vec::with_capacity(profile.len() - 1);
    let mut candidate_scores = Vec::with_capacity(profile.len() - 1);
    for &(id, s) in &profile.scores[1..] {
        candidate_ids.push(id);
        candidate_scores.push(s);
    }
    Some(SplitProfile {
        anchor_id,
        candidate_ids,
        candidate_scores,
        profile,
    })
}

fn empty_result(profile: &RelevanceProfile, strategy: Strategy) -> SelectionResult {
    debug_assert!(profile.is_empty());
    SelectionResult {
        anchor_id: None,
        selected_ids: Vec::new(),
        strategy_tag: strategy.tag().to_string(),
        segments_detected: 0,
        threshold: None,
        segment_spans: Vec::new(),
        quotas: Vec::new(),
    }
}

fn result_from_positions(
    split: &SplitProfile<'_>,
    strategy: Strategy,
    positions: Vec<usize>,
) -> SelectionResult {
    SelectionResult {
        anchor_id: Some(split.anchor_id),
        selected_ids: positions.iter().map(|&p| split.candidate_ids[p]).collect(),
        strategy_tag: strategy.tag().to_string(),
        segments_detected: 0,
        threshold: None,
        segment_spans: Vec::new(),
        quotas: Vec::new(),
    }
}

/// Segment sampling: reserve the anchor, then fill the remaining budget from
/// above-threshold segments in proportion to their peaks, adjusting to hit
/// the budget exactly. Short-circuits to "take everything" when the live
/// history fits the budget, and to plain top-k when no segment is detected.
pub fn segment_sampling(profile: &RelevanceProfile, cfg: &SelectionConfig) -> SelectionResult {
    let Some(split) = split_anchor(profile) else {
        return empty_result(profile, Strategy::SegmentSampling);
    };
    let n_sel = cfg.budget.saturating_sub(1);
    let candidates = split.candidate_scores.len();
    if candidates <= n_sel {
        return result_from_positions(&split, Strategy::SegmentSampling, (0..candidates).collect());
    }
    if n_sel == 0 {
        return result_from_positions(&split, Strategy::SegmentSampling, Vec::new());
    }

    let scores = &split.candidate_scores;
    let tau = adaptive_threshold(scores, cfg.threshold_coeff)
        .expect("candidate scores are non-empty and finite");
    let segments = identify_segments(scores, tau, cfg.merge_gap);

    let (sampled, quotas) = if segments.is_empty() {
        (BTreeSet::new(), Vec::new())
    } else {
        let quotas =
            allocate_quotas(&segments, n_sel).expect("segments non-empty and n_sel >= 1");
        let mut sampled = BTreeSet::new();
        for (seg, &quota) in segments.iter().zip(&quotas) {
            sampled.extend(
                sample_within_segment(seg, quota).expect("quota clamped to segment length"),
            );
        }
        (sampled, quotas)
    };
    let positions = adjust_budget(&sampled, scores, n_sel);

    let mut result = result_from_positions(&split, Strategy::SegmentSampling, positions.into_iter().collect());
    result.segments_detected = segments.len();
    result.threshold = Some(tau);
    result.segment_spans = segments
        .iter()
        .map(|s| (split.candidate_ids[s.start], split.candidate_ids[s.end]))
        .collect();
    result.quotas = quotas;
    result
}

fn weighted_sample_without_replacement(
    weights: &[f64],
    n: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut pool: Vec<(usize, f64)> = weights.iter().copied().enumerate().collect();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n.min(weights.len()) {
        let total: f64 = pool.iter().map(|&(_, w)| w).sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = pool.len() - 1;
        for (i, &(_, w)) in pool.iter().enumerate() {
            if u < w {
                chosen = i;
                break;
            }
            u -= w;
        }
        out.push(pool.remove(chosen).0);
    }
    out.sort_unstable();
    out
}

/// The five comparison policies. All reserve the anchor and return exactly
/// `min(budget, live history)` attended frames, like segment sampling.
pub fn baseline_select(
    strategy: Strategy,
    profile: &RelevanceProfile,
    cfg: &SelectionConfig,
) -> SelectionResult {
    let Some(split) = split_anchor(profile) else {
        return empty_result(profile, strategy);
    };
    let candidates = split.candidate_scores.len();
    let n_sel = cfg.budget.saturating_sub(1).min(candidates);
    let scores = &split.candidate_scores;

    let positions: Vec<usize> = match strategy {
        Strategy::SegmentSampling => {
            return segment_sampling(profile, cfg);
        }
        Strategy::TopK => top_by_score(0..candidates, scores, n_sel),
        Strategy::Random => {
            let mut rng = sub_rng(cfg.seed, SubStream::Selection, split.profile.query_frame_id);
            let mut pool: Vec<usize> = (0..candidates).collect();
            for i in 0..n_sel {
                let j = rng.random_range(i..candidates);
                pool.swap(i, j);
            }
            pool.truncate(n_sel);
            pool.sort_unstable();
            pool
        }
        Strategy::Uniform => uniform_subset(candidates, n_sel),
        Strategy::SlidingWindow => (candidates - n_sel..candidates).collect(),
        Strategy::Probabilistic => {
            let mut rng = sub_rng(cfg.seed, SubStream::Selection, split.profile.query_frame_id);
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let weights: Vec<f64> = scores.iter().map(|s| s - min + PROBABILISTIC_SHIFT).collect();
            weighted_sample_without_replacement(&weights, n_sel, &mut rng)
        }
    };
    result_from_positions(&split, strategy, positions)
}

/// Dispatch a strategy over a profile.
pub fn select(strategy: Strategy, profile: &RelevanceProfile, cfg: &SelectionConfig) -> SelectionResult {
    match strategy {
        Strategy::SegmentSampling => segment_sampling(profile, cfg),
        _ => baseline_select(strategy, profile, cfg),
    }
}
