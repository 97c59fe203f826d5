use std::cmp::Ordering;

use super::CandidatePair;
use crate::eval::interval_iou;

/// Deterministic ranking: score descending, then earlier starts on side a,
/// then side b, then earlier ends.
pub fn rank_order(x: &CandidatePair, y: &CandidatePair) -> Ordering {
    y.score
        .total_cmp(&x.score)
        .then(x.unit_a.start_frame.cmp(&y.unit_a.start_frame))
        .then(x.unit_b.start_frame.cmp(&y.unit_b.start_frame))
        .then(x.unit_a.end_frame.cmp(&y.unit_a.end_frame))
        .then(x.unit_b.end_frame.cmp(&y.unit_b.end_frame))
}

/// Two pairs are redundant when both sides overlap by more than `iou_thresh`.
pub fn redundant(x: &CandidatePair, y: &CandidatePair, iou_thresh: f64) -> bool {
    interval_iou(&x.unit_a, &y.unit_a) > iou_thresh && interval_iou(&x.unit_b, &y.unit_b) > iou_thresh
}

/// Greedy non-maximum suppression in [`rank_order`].
pub fn nms(mut cands: Vec<CandidatePair>, iou_thresh: f64) -> Vec<CandidatePair> {
    cands.sort_by(rank_order);
    let mut kept: Vec<CandidatePair> = Vec::with_capacity(cands.len());
    for c in cands {
        if !kept.iter().any(|k| redundant(k, &c, iou_thresh)) {
            kept.push(c);
        }
    }
    kept
}
