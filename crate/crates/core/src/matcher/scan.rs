//! Temporally consistent matching over a gram matrix.

use std::collections::BTreeMap;

use super::{ActionUnit, CandidatePair, GramMatrix};
use crate::scalar::Real;

/// Sparse candidate detection graph: gram cells covered by at least one
/// length-`L` diagonal window whose every cell exceeds the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGraph<T> {
    pub rows: usize,
    pub cols: usize,
    cells: BTreeMap<(usize, usize), T>,
}

impl<T: Real> CandidateGraph<T> {
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.cells.get(&(i, j)).copied()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells.contains_key(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Marked cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.cells.iter().map(|(&(i, j), &v)| (i, j, v))
    }
}

/// Candidate generation with temporal consistency.
///
/// For every start row `i`, `C_0` holds the columns `j` with `G[i][j] > T`;
/// each later offset `k < L` intersects `C_0` with `C_k - k`, the columns
/// whose diagonal successor `G[i+k][j+k]` also exceeds `T`. Survivors mark
/// the `L` cells `(i+k, j+k)` in the graph.
pub fn consistency_scan<T: Real>(g: &GramMatrix<T>, threshold: T, min_run: usize) -> CandidateGraph<T> {
    let mut cells = BTreeMap::new();
    let (rows, cols) = (g.rows(), g.cols());
    if min_run == 0 || rows < min_run || cols < min_run {
        return CandidateGraph { rows, cols, cells };
    }
    for i in 0..=rows - min_run {
        let mut c0: Vec<usize> = (0..=cols - min_run).filter(|&j| g.get(i, j) > threshold).collect();
        for k in 1..min_run {
            if c0.is_empty() {
                break;
            }
            c0.retain(|&j| g.get(i + k, j + k) > threshold);
        }
        for &j in &c0 {
            for k in 0..min_run {
                cells.insert((i + k, j + k), g.get(i + k, j + k));
            }
        }
    }
    CandidateGraph { rows, cols, cells }
}

/// Turns every maximal diagonal run of marked cells (length `>= L`) into a
/// candidate pair spanning the covered segments' frames.
pub fn extract_runs<T: Real>(graph: &CandidateGraph<T>, g: &GramMatrix<T>, min_run: usize) -> Vec<CandidatePair> {
    let mut out = Vec::new();
    for (i, j, _) in graph.cells() {
        if i > 0 && j > 0 && graph.contains(i - 1, j - 1) {
            continue;
        }
        let mut len = 1;
        while graph.contains(i + len, j + len) {
            len += 1;
        }
        if len < min_run {
            continue;
        }
        let mut cand = CandidatePair {
            unit_a: ActionUnit::new(&g.video_a, g.span_a(i).0, g.span_a(i + len - 1).1),
            unit_b: ActionUnit::new(&g.video_b, g.span_b(j).0, g.span_b(j + len - 1).1),
            score: 0.0,
            run_length: len,
            origin: Some((i, j)),
        };
        cand.score = score_candidate(&cand, g);
        out.push(cand);
    }
    out
}

/// Sum of gram entries along the candidate's diagonal run.
///
/// # Panics
/// If the candidate carries no gram origin or its run leaves the matrix.
pub fn score_candidate<T: Real>(c: &CandidatePair, g: &GramMatrix<T>) -> f64 {
    let (i, j) = c.origin.expect("candidate has no gram origin");
    (0..c.run_length)
        .fold(T::zero(), |acc, k| acc + g.get(i + k, j + k))
        .as_f64()
}
