use crate::error::{Error, Result};
use crate::rankpool::SegmentEncoding;
use crate::scalar::{dot, Real};

/// Pairwise inner products between the segment encodings of two videos.
///
/// Row `i` is segment `i` of video a, column `j` segment `j` of video b
/// (both 0-based here; frame spans stay 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    pub video_a: String,
    pub video_b: String,
    rows: usize,
    cols: usize,
    values: Vec<T>,
    spans_a: Vec<(u32, u32)>,
    spans_b: Vec<(u32, u32)>,
}

impl<T: Real> GramMatrix<T> {
    /// Builds a matrix from raw values and the segment spans of each side.
    pub fn from_parts(values: Vec<T>, spans_a: Vec<(u32, u32)>, spans_b: Vec<(u32, u32)>) -> Result<Self> {
        let (rows, cols) = (spans_a.len(), spans_b.len());
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        Ok(Self {
            video_a: String::new(),
            video_b: String::new(),
            rows,
            cols,
            values,
            spans_a,
            spans_b,
        })
    }

    /// Matrix over unit-length segments at consecutive frames; handy for tests.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged gram rows");
        let spans = |n: usize| (1..=n as u32).map(|k| (k, k)).collect();
        Self::from_parts(rows.concat(), spans(rows.len()), spans(cols)).unwrap()
    }

    pub fn with_ids(mut self, video_a: impl Into<String>, video_b: impl Into<String>) -> Self {
        self.video_a = video_a.into();
        self.video_b = video_b.into();
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn span_a(&self, i: usize) -> (u32, u32) {
        self.spans_a[i]
    }

    pub fn span_b(&self, j: usize) -> (u32, u32) {
        self.spans_b[j]
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                values.push(self.get(i, j));
            }
        }
        Self {
            video_a: self.video_b.clone(),
            video_b: self.video_a.clone(),
            rows: self.cols,
            cols: self.rows,
            values,
            spans_a: self.spans_b.clone(),
            spans_b: self.spans_a.clone(),
        }
    }

    /// Elementwise mean of grams over the same segments (multi-feature fusion).
    pub fn average(grams: &[GramMatrix<T>]) -> Result<Self> {
        let first = grams
            .first()
            .ok_or_else(|| Error::Config("nothing to average".into()))?;
        for g in &grams[1..] {
            if g.spans_a != first.spans_a || g.spans_b != first.spans_b {
                return Err(Error::Config(
                    "fused gram matrices must cover identical segments".into(),
                ));
            }
        }
        let n = T::of(grams.len() as f64);
        let values = (0..first.values.len())
            .map(|k| grams.iter().fold(T::zero(), |acc, g| acc + g.values[k]) / n)
            .collect();
        Ok(Self {
            values,
            ..first.clone()
        })
    }
}

/// `G[i][j] = w_i^a . w_j^b`.
pub fn gram_matrix<T: Real>(wa: &[SegmentEncoding<T>], wb: &[SegmentEncoding<T>]) -> Result<GramMatrix<T>> {
    let dim = wa.first().or(wb.first()).map_or(0, |e| e.w.len());
    if let Some(bad) = wa.iter().chain(wb).find(|e| e.w.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.w.len(),
        });
    }
    let mut values = Vec::with_capacity(wa.len() * wb.len());
    for a in wa {
        values.extend(wb.iter().map(|b| dot(&a.w, &b.w)));
    }
    let spans = |w: &[SegmentEncoding<T>]| w.iter().map(|e| (e.start_frame, e.end_frame)).collect();
    GramMatrix::from_parts(values, spans(wa), spans(wb))
}

/// `T = mean(G) + std(G)` (population), or `None` when `T <= 0`.
///
/// Sums are exact in fixed point, so `G` and its transpose get the same bits.
pub fn adaptive_threshold<T: Real>(g: &GramMatrix<T>) -> Option<T> {
    if g.is_empty() {
        return None;
    }
    let n = g.values.len() as f64;
    let mean = order_free_sum(g.values.iter().map(|x| x.as_f64())) / n;
    let var = order_free_sum(g.values.iter().map(|x| (x.as_f64() - mean).powi(2))) / n;
    let t = mean + var.sqrt();
    (t > 0.0).then(|| T::of(t))
}

/// Sum whose result does not depend on the iteration order: every term is
/// rounded onto a common power-of-two grid 2^62 times finer than the
/// largest magnitude and accumulated exactly in `i128`.
fn order_free_sum(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let shift = (62 - max.log2().ceil() as i32).clamp(-1000, 1000);
    let scale = 2.0_f64.powi(shift);
    let total: i128 = values.map(|x| (x * scale).round() as i128).sum();
    total as f64 / scale
}
