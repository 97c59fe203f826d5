//! Comparison matchers: time-augmented clustering and plain per-window
//! rank pooling matching.

mod kmeans;

use serde::{Deserialize, Serialize};

pub use kmeans::{kmeans, KMeansParams, KMeansResult};

use crate::error::{Error, Result};
use crate::matcher::{gram_matrix, rank_order, ActionUnit, CandidatePair, GramMatrix};
use crate::preprocess::SmoothingConfig;
use crate::rankpool::{encode_segments, encode_span, RankPoolConfig, SegmentationConfig};
use crate::scalar::{dot, Real};
use crate::seqio::FeatureSequence;

pub const DEFAULT_COSINE_THRESH: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k: usize,
    /// Weight of the appended window-start coordinate.
    pub beta: f64,
    /// Contiguous runs must cover more than this many window starts.
    pub min_cluster_frames: usize,
    pub window: usize,
    pub cosine_thresh: f64,
    pub top_k: usize,
    pub seed: u64,
    pub smoothing: SmoothingConfig,
    /// Pooling used to re-encode whole action units.
    pub unit_pooling: RankPoolConfig,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k: 10,
            beta: 0.001,
            min_cluster_frames: 60,
            window: 61,
            cosine_thresh: DEFAULT_COSINE_THRESH,
            top_k: 100,
            seed: 0,
            smoothing: SmoothingConfig::Tvm,
            unit_pooling: RankPoolConfig::default(),
        }
    }
}

impl ClusterConfig {
    /// Settings for short videos (a few hundred frames).
    pub fn short_videos() -> Self {
        Self {
            window: 21,
            min_cluster_frames: 20,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k = {} must be at least 2", self.k)));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::Config("beta must be nonnegative".into()));
        }
        if self.min_cluster_frames < 1 {
            return Err(Error::Config("min_cluster_frames must be at least 1".into()));
        }
        if self.top_k < 1 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        SegmentationConfig {
            window: self.window,
            stride: 1,
        }
        .validate()?;
        self.smoothing.validate()?;
        self.unit_pooling.validate()
    }
}

/// Splits a video into temporally coherent clusters of similar dynamics.
///
/// Every stride-1 window is encoded with approximate rank pooling, extended
/// with `beta * start_frame` and clustered with k-means. Each cluster's
/// members are cut into maximal runs of consecutive start frames; runs with
/// more than `min_cluster_frames` starts become action units covering their
/// windows.
pub fn cluster_segments<T: Real>(x: &FeatureSequence<T>, cfg: &ClusterConfig) -> Result<Vec<ActionUnit>> {
    cfg.validate()?;
    if x.n_frames() < cfg.window {
        return Ok(Vec::new());
    }
    let seg = SegmentationConfig {
        window: cfg.window,
        stride: 1,
    };
    let enc = encode_segments(x, &seg, &cfg.smoothing, &RankPoolConfig::approximate())?;
    let beta = T::of(cfg.beta);
    let points: Vec<Vec<T>> = enc
        .iter()
        .map(|e| {
            let mut p = e.w.clone();
            p.push(beta * T::of(e.start_frame as f64));
            p
        })
        .collect();
    let result = kmeans(
        &points,
        &KMeansParams {
            k: cfg.k,
            seed: cfg.seed,
            ..KMeansParams::default()
        },
    );

    let mut units = Vec::new();
    for cluster in 0..result.centroids.len() {
        let starts: Vec<u32> = enc
            .iter()
            .zip(&result.labels)
            .filter(|(_, &l)| l == cluster)
            .map(|(e, _)| e.start_frame)
            .collect();
        for run in contiguous_runs(&starts) {
            let (first, last) = (run[0], run[run.len() - 1]);
            if run.len() > cfg.min_cluster_frames {
                units.push(ActionUnit::new(x.video_id(), first, last + cfg.window as u32 - 1));
            }
        }
    }
    units.sort_by_key(|u| (u.start_frame, u.end_frame));
    Ok(units)
}

/// Maximal runs of consecutive integers in an ascending list.
fn contiguous_runs(sorted: &[u32]) -> impl Iterator<Item = &[u32]> {
    sorted.chunk_by(|a, b| b == &(a + 1))
}

/// Matches cluster units of two videos by cosine similarity of their
/// rank-pooled encodings.
pub fn cluster_match<T: Real>(
    xa: &FeatureSequence<T>,
    xb: &FeatureSequence<T>,
    cfg: &ClusterConfig,
) -> Result<Vec<CandidatePair>> {
    let units_a = cluster_segments(xa, cfg)?;
    let units_b = cluster_segments(xb, cfg)?;
    let encode = |x: &FeatureSequence<T>, units: &[ActionUnit]| -> Result<Vec<Vec<T>>> {
        units
            .iter()
            .map(|u| {
                encode_span(
                    x,
                    u.start_frame as usize,
                    u.end_frame as usize,
                    &cfg.smoothing,
                    &cfg.unit_pooling,
                )
                .map(|e| e.w)
            })
            .collect()
    };
    let wa = encode(xa, &units_a)?;
    let wb = encode(xb, &units_b)?;
    let mut out = Vec::new();
    for (ua, va) in units_a.iter().zip(&wa) {
        for (ub, vb) in units_b.iter().zip(&wb) {
            let sim = dot(va, vb).as_f64();
            if sim > cfg.cosine_thresh {
                out.push(CandidatePair {
                    unit_a: ua.clone(),
                    unit_b: ub.clone(),
                    score: sim,
                    run_length: 1,
                    origin: None,
                });
            }
        }
    }
    out.sort_by(rank_order);
    out.truncate(cfg.top_k);
    Ok(out)
}

/// Every gram cell above `cosine_thresh` as a single-segment candidate.
pub fn plain_match_gram<T: Real>(g: &GramMatrix<T>, cosine_thresh: f64, top_k: usize) -> Vec<CandidatePair> {
    let thresh = T::of(cosine_thresh);
    let mut out = Vec::new();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let v = g.get(i, j);
            if v > thresh {
                let (sa, ea) = g.span_a(i);
                let (sb, eb) = g.span_b(j);
                out.push(CandidatePair {
                    unit_a: ActionUnit::new(&g.video_a, sa, ea),
                    unit_b: ActionUnit::new(&g.video_b, sb, eb),
                    score: v.as_f64(),
                    run_length: 1,
                    origin: Some((i, j)),
                });
            }
        }
    }
    out.sort_by(rank_order);
    out.truncate(top_k);
    out
}

/// Plain rank pooling matching: stride-1 windows, no temporal consistency.
pub fn plain_match<T: Real>(
    xa: &FeatureSequence<T>,
    xb: &FeatureSequence<T>,
    seg: &SegmentationConfig,
    smooth: &SmoothingConfig,
    rp: &RankPoolConfig,
    cosine_thresh: f64,
    top_k: usize,
) -> Result<Vec<CandidatePair>> {
    let seg = SegmentationConfig { stride: 1, ..*seg };
    let wa = encode_segments(xa, &seg, smooth, rp)?;
    let wb = encode_segments(xb, &seg, smooth, rp)?;
    let g = gram_matrix(&wa, &wb)?.with_ids(xa.video_id(), xb.video_id());
    Ok(plain_match_gram(&g, cosine_thresh, top_k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_split_on_gaps() {
        let runs: Vec<&[u32]> = contiguous_runs(&[1, 2, 3, 7, 8, 10]).collect();
        assert_eq!(runs, vec![&[1, 2, 3][..], &[7, 8], &[10]]);
        assert_eq!(contiguous_runs(&[]).count(), 0);
    }

    #[test]
    fn short_video_yields_nothing() {
        let x = FeatureSequence::new("v", 1, (0..30).map(|t| t as f64).collect()).unwrap();
        assert!(cluster_segments(&x, &ClusterConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn constant_video_does_not_crash() {
        let x = FeatureSequence::new("v", 2, [1.0, 2.0].repeat(200)).unwrap();
        let units = cluster_segments(&x, &ClusterConfig::short_videos()).unwrap();
        for u in &units {
            assert!(u.end_frame as usize <= 200);
        }
    }

    #[test]
    fn plain_threshold_above_one_is_empty() {
        let g = GramMatrix::from_rows(&[vec![1.0, 0.5], vec![0.3, 1.0]]);
        assert!(plain_match_gram(&g, 1.1, 10).is_empty());
        let all = plain_match_gram(&g, 0.2, 10);
        assert_eq!(all.len(), 4);
        assert_eq!(plain_match_gram(&g, 0.3, 10).len(), 3);
    }

    #[test]
    fn config_validation() {
        assert!(ClusterConfig {
            k: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ClusterConfig {
            beta: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ClusterConfig::short_videos().validate().is_ok());
    }
}
