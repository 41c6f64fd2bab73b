//! Frame-level descriptors and query/key relevance scoring.
//!
//! A frame's token block (per-head query and key projections) is mean-pooled
//! over its patch positions into one query descriptor and one key descriptor.
//! Relevance between a query frame and a cached history frame is a multi-head
//! similarity between the query descriptor and the cached key descriptor,
//! under one of three interchangeable scoring functions.
//!
//! All sums iterate heads in the outer loop and vector dimensions in the
//! inner loop, in index order. This fixes the floating-point accumulation
//! order, so batch and pairwise evaluations agree to the last bit.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-head vectors in row-major layout: entry `(h, j)` lives at
/// `data[h * head_dim + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadVectors {
    pub heads: usize,
    pub head_dim: usize,
    pub data: Vec<f64>,
}

impl HeadVectors {
    pub fn new(heads: usize, head_dim: usize, data: Vec<f64>) -> Result<Self> {
        if heads == 0 || head_dim == 0 {
            return Err(Error::ShapeMismatch(format!(
                "head vectors need heads >= 1 and head_dim >= 1, got {heads}x{head_dim}"
            )));
        }
        if data.len() != heads * head_dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for {}x{} head vectors, got {}",
                heads * head_dim,
                heads,
                head_dim,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "head vectors must be finite".to_string(),
            ));
        }
        Ok(Self {
            heads,
            head_dim,
            data,
        })
    }

    pub fn row(&self, head: usize) -> &[f64] {
        &self.data[head * self.head_dim..(head + 1) * self.head_dim]
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.heads == other.heads && self.head_dim == other.head_dim
    }
}

/// Raw per-frame token projections: `heads x tokens x head_dim` tensors for
/// the query and key paths, sharing one layout. The first `special_tokens`
/// positions of every head are camera/register tokens and carry no
/// frame-specific visual content; pooling skips them.
#[derive(Debug, Clone)]
pub struct TokenBlock {
    pub frame_id: u64,
    pub heads: usize,
    pub tokens: usize,
    pub head_dim: usize,
    pub special_tokens: usize,
    /// Query projection, row-major `[head][token][dim]`.
    pub queries: Vec<f64>,
    /// Key projection, same layout as `queries`.
    pub keys: Vec<f64>,
}

impl TokenBlock {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        frame_id: u64,
        heads: usize,
        tokens: usize,
        head_dim: usize,
        special_tokens: usize,
        queries: Vec<f64>,
        keys: Vec<f64>,
    ) -> Result<Self> {
        if heads == 0 || head_dim == 0 || tokens == 0 {
            return Err(Error::ShapeMismatch(format!(
                "token block needs heads, tokens and head_dim >= 1, got {heads}x{tokens}x{head_dim}"
            )));
        }
        if tokens <= special_tokens {
            return Err(Error::NoPatchTokens {
                frame_id,
                tokens,
                special: special_tokens,
            });
        }
        let expected = heads * tokens * head_dim;
        if queries.len() != expected || keys.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "token block expects {} entries per projection, got {} queries / {} keys",
                expected,
                queries.len(),
                keys.len()
            )));
        }
        if !queries.iter().chain(keys.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "token block entries must be finite".to_string(),
            ));
        }
        Ok(Self {
            frame_id,
            heads,
            tokens,
            head_dim,
            special_tokens,
            queries,
            keys,
        })
    }

    fn entry(&self, tensor: &[f64], head: usize, token: usize, dim: usize) -> f64 {
        tensor[(head * self.tokens + token) * self.head_dim + dim]
    }
}

/// Pooled per-frame summary: one query vector and one key vector per head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDescriptor {
    pub frame_id: u64,
    pub query: HeadVectors,
    pub key: HeadVectors,
}

impl FrameDescriptor {
    pub fn new(frame_id: u64, query: HeadVectors, key: HeadVectors) -> Result<Self> {
        if !query.same_shape(&key) {
            return Err(Error::ShapeMismatch(format!(
                "query is {}x{} but key is {}x{}",
                query.heads, query.head_dim, key.heads, key.head_dim
            )));
        }
        Ok(Self {
            frame_id,
            query,
            key,
        })
    }

    pub fn heads(&self) -> usize {
        self.query.heads
    }

    pub fn head_dim(&self) -> usize {
        self.query.head_dim
    }
}

/// Mean-pool the patch tokens of a block into frame-level descriptors.
/// Special tokens (indices below `special_tokens`) are never read.
pub fn pool_descriptor(block: &TokenBlock) -> Result<FrameDescriptor> {
    if block.tokens <= block.special_tokens {
        return Err(Error::NoPatchTokens {
            frame_id: block.frame_id,
            tokens: block.tokens,
            special: block.special_tokens,
        });
    }
    let patches = (block.tokens - block.special_tokens) as f64;
    let pool = |tensor: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(block.heads * block.head_dim);
        for h in 0..block.heads {
            for j in 0..block.head_dim {
                let mut acc = 0.0;
                for p in block.special_tokens..block.tokens {
                    acc += block.entry(tensor, h, p, j);
                }
                out.push(acc / patches);
            }
        }
        out
    };
    FrameDescriptor::new(
        block.frame_id,
        HeadVectors::new(block.heads, block.head_dim, pool(&block.queries))?,
        HeadVectors::new(block.heads, block.head_dim, pool(&block.keys))?,
    )
}

/// Relevance scoring functions between a query and a key descriptor.
///
/// The attention scale `1/sqrt(head_dim)` is deliberately not a variant:
/// it is frame-independent and preserves relative rankings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringFunction {
    /// Head-averaged inner product; keeps direction and magnitude.
    #[serde(rename = "dot")]
    RawDot,
    /// Head-summed inner product over the head-summed norms; keeps direction
    /// only. Defined as 0 when either descriptor has zero norm.
    Cosine,
    /// Negative root-mean-square distance across heads; 0 iff equal.
    #[serde(rename = "negl2")]
    NegL2,
}

impl ScoringFunction {
    pub fn tag(self) -> &'static str {
        match self {
            ScoringFunction::RawDot => "dot",
            ScoringFunction::Cosine => "cosine",
            ScoringFunction::NegL2 => "negl2",
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "dot" => Some(ScoringFunction::RawDot),
            "cosine" => Some(ScoringFunction::Cosine),
            "negl2" => Some(ScoringFunction::NegL2),
            _ => None,
        }
    }
}

/// Score a query descriptor against a key descriptor.
pub fn score(query: &HeadVectors, key: &HeadVectors, f: ScoringFunction) -> Result<f64> {
    if !query.same_shape(key) {
        return Err(Error::ShapeMismatch(format!(
            "query is {}x{} but key is {}x{}",
            query.heads, query.head_dim, key.heads, key.head_dim
        )));
    }
    let heads = query.heads as f64;
    match f {
        ScoringFunction::RawDot => {
            let mut acc = 0.0;
            for h in 0..query.heads {
                let (q, k) = (query.row(h), key.row(h));
                for j in 0..query.head_dim {
                    acc += q[j] * k[j];
                }
            }
            Ok(acc / heads)
        }
        ScoringFunction::Cosine => {
            let mut dot = 0.0;
            let mut qq = 0.0;
            let mut kk = 0.0;
            for h in 0..query.heads {
                let (q, k) = (query.row(h), key.row(h));
                for j in 0..query.head_dim {
                    dot += q[j] * k[j];
                    qq += q[j] * q[j];
                    kk += k[j] * k[j];
                }
            }
            if qq == 0.0 || kk == 0.0 {
                return Ok(0.0);
            }
            Ok(dot / (qq.sqrt() * kk.sqrt()))
        }
        ScoringFunction::NegL2 => {
            let mut acc = 0.0;
            for h in 0..query.heads {
                let (q, k) = (query.row(h), key.row(h));
                for j in 0..query.head_dim {
                    let d = q[j] - k[j];
                    acc += d * d;
                }
            }
            Ok(-(acc / heads).sqrt())
        }
    }
}

/// One score per live history frame, in history order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceProfile {
    pub query_frame_id: u64,
    /// `(history_frame_id, score)` with strictly increasing ids.
    pub scores: Vec<(u64, f64)>,
    pub scoring: ScoringFunction,
}

impl RelevanceProfile {
    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }
}

/// Score the query's descriptor against every live history key descriptor.
/// History must be sorted by frame id and strictly precede the query.
pub fn profile(
    query: &FrameDescriptor,
    history: &[&FrameDescriptor],
    f: ScoringFunction,
) -> Result<RelevanceProfile> {
    let mut scores = Vec::with_capacity(history.len());
    let mut prev: Option<u64> = None;
    for frame in history {
        if let Some(p) = prev {
            if frame.frame_id <= p {
                return Err(Error::InvalidArgument(format!(
                    "history ids must be strictly increasing: {} after {}",
                    frame.frame_id, p
                )));
            }
        }
        if frame.frame_id >= query.frame_id {
            return Err(Error::InvalidArgument(format!(
                "history frame {} does not precede query {}",
                frame.frame_id, query.frame_id
            )));
        }
        prev = Some(frame.frame_id);
        scores.push((frame.frame_id, score(&query.query, &frame.key, f)?));
    }
    Ok(RelevanceProfile {
        query_frame_id: query.frame_id,
        scores,
        scoring: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv(heads: usize, dim: usize, data: &[f64]) -> HeadVectors {
        HeadVectors::new(heads, dim, data.to_vec()).unwrap()
    }

    fn desc(id: u64, q: &[f64], k: &[f64]) -> FrameDescriptor {
        FrameDescriptor::new(id, hv(1, q.len(), q), hv(1, k.len(), k)).unwrap()
    }

    #[test]
    fn pool_of_identical_tokens_is_the_token() {
        let v = [1.5, -2.0, 0.25];
        let mut tokens = Vec::new();
        tokens.extend_from_slice(&v);
        tokens.extend_from_slice(&v);
        let block = TokenBlock::new(3, 1, 2, 3, 0, tokens.clone(), tokens).unwrap();
        let d = pool_descriptor(&block).unwrap();
        assert_eq!(d.query.data, v.to_vec());
        assert_eq!(d.key.data, v.to_vec());
    }

    #[test]
    fn pool_skips_special_tokens() {
        // H=1, s=2, P=4, d=2: patch tokens (1,0) and (3,0) -> mean (2,0).
        let queries = vec![
            9.0, 9.0, // special
            -9.0, -9.0, // special
            1.0, 0.0, // patch
            3.0, 0.0, // patch
        ];
        let block = TokenBlock::new(0, 1, 4, 2, 2, queries.clone(), queries).unwrap();
        let d = pool_descriptor(&block).unwrap();
        assert_eq!(d.query.data, vec![2.0, 0.0]);
    }

    #[test]
    fn pool_singleton_patch_is_identity() {
        // s = P-1: one patch token.
        let queries = vec![5.0, 5.0, 5.0, 7.0, -1.0, 2.0];
        let block = TokenBlock::new(1, 1, 2, 3, 1, queries.clone(), queries).unwrap();
        let d = pool_descriptor(&block).unwrap();
        assert_eq!(d.query.data, vec![7.0, -1.0, 2.0]);
    }

    #[test]
    fn no_patch_tokens_is_rejected() {
        let queries = vec![0.0; 4];
        assert!(matches!(
            TokenBlock::new(0, 1, 2, 2, 2, queries.clone(), queries),
            Err(Error::NoPatchTokens { .. })
        ));
    }

    #[test]
    fn pool_is_permutation_invariant_over_patch_order() {
        let a = vec![0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = vec![0.0, 0.0, 5.0, 6.0, 1.0, 2.0, 3.0, 4.0];
        let da = pool_descriptor(&TokenBlock::new(0, 1, 4, 2, 1, a.clone(), a).unwrap()).unwrap();
        let db = pool_descriptor(&TokenBlock::new(0, 1, 4, 2, 1, b.clone(), b).unwrap()).unwrap();
        assert_eq!(da.query.data, db.query.data);
    }

    #[test]
    fn identity_scores() {
        // q = k with squared norm 4.
        let q = hv(1, 2, &[2.0, 0.0]);
        assert_eq!(score(&q, &q, ScoringFunction::RawDot).unwrap(), 4.0);
        assert_eq!(score(&q, &q, ScoringFunction::Cosine).unwrap(), 1.0);
        assert_eq!(score(&q, &q, ScoringFunction::NegL2).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_scores() {
        let q = hv(1, 2, &[1.0, 0.0]);
        let k = hv(1, 2, &[0.0, 3.0]);
        assert_eq!(score(&q, &k, ScoringFunction::RawDot).unwrap(), 0.0);
        assert_eq!(score(&q, &k, ScoringFunction::Cosine).unwrap(), 0.0);
    }

    #[test]
    fn raw_dot_averages_heads() {
        // Head dots 1.0 and 3.0 -> (1 + 3) / 2 = 2.
        let q = hv(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let k = hv(2, 2, &[1.0, 5.0, 2.0, 1.0]);
        assert_eq!(score(&q, &k, ScoringFunction::RawDot).unwrap(), 2.0);
    }

    #[test]
    fn cosine_zero_norm_is_zero() {
        let z = hv(1, 2, &[0.0, 0.0]);
        let k = hv(1, 2, &[1.0, 1.0]);
        assert_eq!(score(&z, &k, ScoringFunction::Cosine).unwrap(), 0.0);
        assert_eq!(score(&k, &z, ScoringFunction::Cosine).unwrap(), 0.0);
    }

    #[test]
    fn cosine_is_head_summed_not_head_averaged() {
        // Two heads: q = (1,0),(0,2); k = (1,0),(0,1).
        // dot = 1 + 2 = 3, |q| = sqrt(5), |k| = sqrt(2).
        let q = hv(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let k = hv(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let got = score(&q, &k, ScoringFunction::Cosine).unwrap();
        assert!((got - 3.0 / (5.0_f64.sqrt() * 2.0_f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn neg_l2_is_rms_over_heads() {
        let q = hv(2, 1, &[0.0, 0.0]);
        let k = hv(2, 1, &[3.0, 4.0]);
        // -sqrt((9 + 16) / 2)
        let got = score(&q, &k, ScoringFunction::NegL2).unwrap();
        assert!((got + (12.5_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_history_gives_empty_profile() {
        let q = desc(5, &[1.0], &[1.0]);
        let p = profile(&q, &[], ScoringFunction::RawDot).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.query_frame_id, 5);
    }

    #[test]
    fn single_identical_frame_profile() {
        let q = desc(3, &[1.0, 2.0], &[1.0, 2.0]);
        let h = desc(0, &[1.0, 2.0], &[1.0, 2.0]);
        let p = profile(&q, &[&h], ScoringFunction::RawDot).unwrap();
        assert_eq!(p.scores, vec![(0, 5.0)]);
    }

    #[test]
    fn profile_matches_pairwise_scores() {
        let q = desc(10, &[0.5, -1.0, 2.0], &[0.0, 0.0, 0.0]);
        let h: Vec<FrameDescriptor> = vec![
            desc(1, &[9.0, 9.0, 9.0], &[1.0, 0.0, 0.5]),
            desc(4, &[9.0, 9.0, 9.0], &[-2.0, 1.0, 0.25]),
            desc(7, &[9.0, 9.0, 9.0], &[0.0, 3.0, -1.0]),
        ];
        let refs: Vec<&FrameDescriptor> = h.iter().collect();
        for f in [
            ScoringFunction::RawDot,
            ScoringFunction::Cosine,
            ScoringFunction::NegL2,
        ] {
            let p = profile(&q, &refs, f).unwrap();
            for (i, frame) in h.iter().enumerate() {
                assert_eq!(p.scores[i].0, frame.frame_id);
                assert_eq!(p.scores[i].1, score(&q.query, &frame.key, f).unwrap());
            }
        }
    }

    #[test]
    fn profile_rejects_unsorted_or_future_history() {
        let q = desc(10, &[1.0], &[1.0]);
        let a = desc(4, &[1.0], &[1.0]);
        let b = desc(2, &[1.0], &[1.0]);
        assert!(profile(&q, &[&a, &b], ScoringFunction::RawDot).is_err());
        let late = desc(10, &[1.0], &[1.0]);
        assert!(profile(&q, &[&late], ScoringFunction::RawDot).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-100.0f64..100.0, len)
        }

        proptest! {
            #[test]
            fn cosine_invariant_under_positive_scaling(
                q in vec_strategy(6),
                k in vec_strategy(6),
                exp in -8i32..8,
            ) {
                // Powers of two keep the rescaling exact in IEEE arithmetic.
                let alpha = (2.0f64).powi(exp);
                let qh = hv(2, 3, &q);
                let kh = hv(2, 3, &k);
                let scaled: Vec<f64> = k.iter().map(|v| v * alpha).collect();
                let kh2 = hv(2, 3, &scaled);
                let a = score(&qh, &kh, ScoringFunction::Cosine).unwrap();
                let b = score(&qh, &kh2, ScoringFunction::Cosine).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }

            #[test]
            fn raw_dot_linear_in_key_scale(
                q in vec_strategy(6),
                k in vec_strategy(6),
                exp in -8i32..8,
            ) {
                let alpha = (2.0f64).powi(exp);
                let qh = hv(2, 3, &q);
                let kh = hv(2, 3, &k);
                let scaled: Vec<f64> = k.iter().map(|v| v * alpha).collect();
                let kh2 = hv(2, 3, &scaled);
                let a = score(&qh, &kh, ScoringFunction::RawDot).unwrap();
                let b = score(&qh, &kh2, ScoringFunction::RawDot).unwrap();
                prop_assert_eq!(alpha * a, b);
            }

            #[test]
            fn neg_l2_nonpositive_and_zero_iff_equal(
                q in vec_strategy(6),
                k in vec_strategy(6),
            ) {
                let qh = hv(2, 3, &q);
                let kh = hv(2, 3, &k);
                let s = score(&qh, &kh, ScoringFunction::NegL2).unwrap();
                prop_assert!(s <= 0.0);
                prop_assert_eq!(s == 0.0, q == k);
            }

            #[test]
            fn pool_never_reads_special_tokens(
                patch in vec_strategy(8),
                junk_a in vec_strategy(4),
                junk_b in vec_strategy(4),
            ) {
                // Same patches under different special-token contents.
                let mut a = junk_a.clone();
                a.extend_from_slice(&patch);
                let mut b = junk_b.clone();
                b.extend_from_slice(&patch);
                let block_a = TokenBlock::new(0, 1, 6, 2, 2, a.clone(), a).unwrap();
                let block_b = TokenBlock::new(0, 1, 6, 2, 2, b.clone(), b).unwrap();
                prop_assert_eq!(
                    pool_descriptor(&block_a).unwrap().query.data,
                    pool_descriptor(&block_b).unwrap().query.data
                );
            }
        }
    }
}
