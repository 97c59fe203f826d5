//! Action matching: gram matrix, adaptive threshold, temporally consistent
//! diagonal scan, run extraction, scoring, suppression and top-K selection.

mod gram;
mod nms;
mod scan;

use serde::{Deserialize, Serialize};

pub use gram::{adaptive_threshold, gram_matrix, GramMatrix};
pub use nms::{nms, rank_order, redundant};
pub use scan::{consistency_scan, extract_runs, score_candidate, CandidateGraph};

use crate::error::{Error, Result};
use crate::preprocess::SmoothingConfig;
use crate::rankpool::{encode_segments, RankPoolConfig, SegmentationConfig};
use crate::scalar::Real;
use crate::seqio::FeatureSequence;

/// A contiguous frame interval of one video (1-based, inclusive).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionUnit {
    pub video_id: String,
    pub start_frame: u32,
    pub end_frame: u32,
}

impl ActionUnit {
    pub fn new(video_id: impl Into<String>, start_frame: u32, end_frame: u32) -> Self {
        debug_assert!(start_frame >= 1 && end_frame >= start_frame);
        Self {
            video_id: video_id.into(),
            start_frame,
            end_frame,
        }
    }

    pub fn len(&self) -> u32 {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A matched pair of action units with its matching score.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub unit_a: ActionUnit,
    pub unit_b: ActionUnit,
    pub score: f64,
    /// Number of matched segments along the run.
    pub run_length: usize,
    /// First gram cell `(row, col)` of the run, when the pair came from a gram matrix.
    pub origin: Option<(usize, usize)>,
}

impl CandidatePair {
    /// The same match seen from the other video.
    pub fn swapped(&self) -> Self {
        Self {
            unit_a: self.unit_b.clone(),
            unit_b: self.unit_a.clone(),
            score: self.score,
            run_length: self.run_length,
            origin: self.origin.map(|(i, j)| (j, i)),
        }
    }
}

/// One line of a detections file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub video_a: String,
    pub video_b: String,
    pub a_start: u32,
    pub a_end: u32,
    pub b_start: u32,
    pub b_end: u32,
    pub score: f64,
    pub run_length: usize,
}

impl From<&CandidatePair> for Detection {
    fn from(c: &CandidatePair) -> Self {
        Self {
            video_a: c.unit_a.video_id.clone(),
            video_b: c.unit_b.video_id.clone(),
            a_start: c.unit_a.start_frame,
            a_end: c.unit_a.end_frame,
            b_start: c.unit_b.start_frame,
            b_end: c.unit_b.end_frame,
            score: c.score,
            run_length: c.run_length,
        }
    }
}

impl From<&Detection> for CandidatePair {
    fn from(d: &Detection) -> Self {
        Self {
            unit_a: ActionUnit::new(&d.video_a, d.a_start, d.a_end),
            unit_b: ActionUnit::new(&d.video_b, d.b_start, d.b_end),
            score: d.score,
            run_length: d.run_length,
            origin: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    /// Minimum number of consecutive matched segments `L`.
    pub min_run: usize,
    pub top_k: usize,
    pub nms_iou: f64,
    /// Fixed threshold replacing the adaptive one.
    pub threshold_override: Option<f64>,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            min_run: 10,
            top_k: 100,
            nms_iou: 0.5,
            threshold_override: None,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_run < 2 {
            return Err(Error::Config(format!(
                "minimum run length L = {} must be at least 2",
                self.min_run
            )));
        }
        if self.top_k < 1 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        if !(self.nms_iou > 0.0 && self.nms_iou <= 1.0) {
            return Err(Error::Config(format!("nms_iou {} must lie in (0, 1]", self.nms_iou)));
        }
        Ok(())
    }
}

/// Runs threshold, scan, extraction, suppression and top-K on a gram matrix.
pub fn match_gram<T: Real>(g: &GramMatrix<T>, cfg: &MatchConfig) -> Result<Vec<CandidatePair>> {
    cfg.validate()?;
    Ok(scan_gram(
        g,
        cfg.threshold_override,
        cfg.min_run,
        Some(cfg.nms_iou),
        cfg.top_k,
    ))
}

/// Threshold, scan, extraction, optional suppression and top-K without
/// config validation; accepts `min_run = 1` and `nms_iou = None`.
pub fn scan_gram<T: Real>(
    g: &GramMatrix<T>,
    threshold_override: Option<f64>,
    min_run: usize,
    nms_iou: Option<f64>,
    top_k: usize,
) -> Vec<CandidatePair> {
    let threshold = match threshold_override {
        Some(t) => Some(T::of(t)),
        None => adaptive_threshold(g),
    };
    let Some(threshold) = threshold else {
        return Vec::new();
    };
    let graph = consistency_scan(g, threshold, min_run);
    let runs = extract_runs(&graph, g, min_run);
    let mut kept = match nms_iou {
        Some(iou) => nms(runs, iou),
        None => {
            let mut runs = runs;
            runs.sort_by(rank_order);
            runs
        }
    };
    kept.truncate(top_k);
    kept
}

/// Full pipeline for one video pair.
pub fn match_pair<T: Real>(
    xa: &FeatureSequence<T>,
    xb: &FeatureSequence<T>,
    seg: &SegmentationConfig,
    smooth: &SmoothingConfig,
    rp: &RankPoolConfig,
    cfg: &MatchConfig,
) -> Result<Vec<CandidatePair>> {
    cfg.validate()?;
    let wa = encode_segments(xa, seg, smooth, rp)?;
    let wb = encode_segments(xb, seg, smooth, rp)?;
    let g = gram_matrix(&wa, &wb)?.with_ids(xa.video_id(), xb.video_id());
    match_gram(&g, cfg)
}
