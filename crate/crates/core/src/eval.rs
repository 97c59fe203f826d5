//! Ground-truth pairing and precision / recall / F1 of candidate pairs.
//!
//! A candidate is correct for a ground-truth pair when both of its units
//! reach the IoU threshold against the corresponding ground-truth units.
//! Each ground-truth pair is claimed by at most one candidate (the best
//! ranked); later candidates that only re-detect claimed pairs are dropped
//! from the precision denominator, while candidates matching nothing count
//! against it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcher::{rank_order, ActionUnit, CandidatePair};
use crate::seqio::Annotation;

pub const DEFAULT_IOU: f64 = 0.5;

/// `|a ∩ b| / |a ∪ b|` over inclusive frame ranges; 0 when disjoint.
pub fn interval_iou(a: &ActionUnit, b: &ActionUnit) -> f64 {
    let lo = a.start_frame.max(b.start_frame);
    let hi = a.end_frame.min(b.end_frame);
    if lo > hi {
        return 0.0;
    }
    let inter = (hi - lo + 1) as f64;
    let union = (a.len() + b.len()) as f64 - inter;
    inter / union
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtPair {
    pub label: String,
    pub unit_a: ActionUnit,
    pub unit_b: ActionUnit,
}

/// Ground-truth pairs of one video pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GtPairs {
    pub pairs: Vec<GtPair>,
    /// The video pair has nothing to detect and is left out of evaluation.
    pub skip: bool,
}

fn unit_of(a: &Annotation) -> ActionUnit {
    ActionUnit::new(&a.video_id, a.start_frame, a.end_frame)
}

/// Same-label cross product of the two videos' annotations (`N_a x N_b` per label).
///
/// The pair is skipped when it yields no ground-truth pair or holds only a
/// single action unit across both videos.
pub fn gt_pairs(annots_a: &[Annotation], annots_b: &[Annotation]) -> GtPairs {
    let mut pairs = Vec::new();
    for a in annots_a {
        for b in annots_b.iter().filter(|b| b.label == a.label) {
            pairs.push(GtPair {
                label: a.label.clone(),
                unit_a: unit_of(a),
                unit_b: unit_of(b),
            });
        }
    }
    let skip = pairs.is_empty() || annots_a.len() + annots_b.len() <= 1;
    GtPairs { pairs, skip }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelRecall {
    pub gt_pairs: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Candidates counted in the precision denominator (after dedup).
    pub n_candidates: usize,
    /// Candidates dropped as re-detections of an already claimed pair.
    pub n_redundant: usize,
    pub n_gt_pairs: usize,
    pub n_correct: usize,
    pub precision: f64,
    /// Zero when `skipped`; recall is undefined without ground truth.
    pub recall: f64,
    pub f1: f64,
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_label: BTreeMap<String, LabelRecall>,
}

impl EvalReport {
    /// Builds a report from raw counts.
    pub fn from_counts(n_candidates: usize, n_gt_pairs: usize, n_correct: usize) -> Self {
        let precision = if n_candidates > 0 {
            100.0 * n_correct as f64 / n_candidates as f64
        } else {
            0.0
        };
        let recall = if n_gt_pairs > 0 {
            100.0 * n_correct as f64 / n_gt_pairs as f64
        } else {
            0.0
        };
        Self {
            n_candidates,
            n_redundant: 0,
            n_gt_pairs,
            n_correct,
            precision,
            recall,
            f1: f1_score(precision, recall),
            skipped: n_gt_pairs == 0,
            per_label: BTreeMap::new(),
        }
    }
}

/// `2PR / (P + R)`, or 0 when `P + R = 0`.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Scores one video pair's candidates against its ground-truth pairs.
pub fn evaluate(cands: &[CandidatePair], gt: &[GtPair], iou_thresh: f64) -> EvalReport {
    let mut ranked: Vec<&CandidatePair> = cands.iter().collect();
    ranked.sort_by(|x, y| rank_order(x, y));

    let mut claimed = vec![false; gt.len()];
    let (mut counted, mut redundant, mut correct) = (0, 0, 0);
    for c in ranked {
        // (gt index, min-side IoU) of every ground-truth pair this candidate hits
        let hits: Vec<(usize, f64)> = gt
            .iter()
            .enumerate()
            .filter_map(|(k, p)| {
                let ia = interval_iou(&c.unit_a, &p.unit_a);
                let ib = interval_iou(&c.unit_b, &p.unit_b);
                (ia >= iou_thresh && ib >= iou_thresh).then_some((k, ia.min(ib)))
            })
            .collect();
        if hits.is_empty() {
            counted += 1;
            continue;
        }
        let best = hits.iter().filter(|(k, _)| !claimed[*k]).max_by(|x, y| {
            x.1.total_cmp(&y.1).then_with(|| {
                let (px, py) = (&gt[x.0], &gt[y.0]);
                (py.unit_a.start_frame, py.unit_b.start_frame).cmp(&(px.unit_a.start_frame, px.unit_b.start_frame))
            })
        });
        match best {
            Some(&(k, _)) => {
                claimed[k] = true;
                counted += 1;
                correct += 1;
            }
            None => redundant += 1,
        }
    }

    let mut report = EvalReport::from_counts(counted, gt.len(), correct);
    report.n_redundant = redundant;
    for (p, &hit) in gt.iter().zip(&claimed) {
        let entry = report.per_label.entry(p.label.clone()).or_default();
        entry.gt_pairs += 1;
        entry.correct += hit as usize;
    }
    report
}

/// Micro-average: sums counts over non-skipped reports and recomputes rates.
pub fn aggregate(reports: &[EvalReport]) -> Result<EvalReport> {
    let live: Vec<&EvalReport> = reports.iter().filter(|r| !r.skipped).collect();
    if live.is_empty() {
        return Err(Error::NothingToAggregate);
    }
    let sum = |f: fn(&EvalReport) -> usize| live.iter().map(|r| f(r)).sum::<usize>();
    let mut out = EvalReport::from_counts(sum(|r| r.n_candidates), sum(|r| r.n_gt_pairs), sum(|r| r.n_correct));
    out.n_redundant = sum(|r| r.n_redundant);
    for r in &live {
        for (label, lr) in &r.per_label {
            let e = out.per_label.entry(label.clone()).or_default();
            e.gt_pairs += lr.gt_pairs;
            e.correct += lr.correct;
        }
    }
    Ok(out)
}
