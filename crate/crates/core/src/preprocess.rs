//! Smoothing and unit normalization ahead of rank pooling.
//!
//! Frames are passed as row-major slices (`frames.len() == n * dim`) so the
//! same code serves whole videos and individual windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{normalize_in_place, Real};

/// Default ARMA weight on the previous smoothed value.
pub const DEFAULT_ARMA_ALPHA: f64 = 0.9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SmoothingConfig {
    /// Time varying mean, `m_t = (1/t) sum_{tau <= t} x_tau`.
    #[default]
    Tvm,
    /// `m_t = alpha * m_{t-1} + (1 - alpha) * x_t` with `m_0 = x_1`.
    Arma { alpha: f64 },
}

impl SmoothingConfig {
    pub fn arma_default() -> Self {
        SmoothingConfig::Arma {
            alpha: DEFAULT_ARMA_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SmoothingConfig::Tvm => Ok(()),
            SmoothingConfig::Arma { alpha } if alpha > 0.0 && alpha < 1.0 => Ok(()),
            SmoothingConfig::Arma { alpha } => Err(Error::Config(format!("ARMA alpha {alpha} must lie in (0, 1)"))),
        }
    }

    /// Smooths then unit-normalizes `frames`.
    pub fn apply<T: Real>(&self, frames: &[T], dim: usize) -> Result<SmoothedSequence<T>> {
        let means = match *self {
            SmoothingConfig::Tvm => time_varying_mean(frames, dim),
            SmoothingConfig::Arma { alpha } => arma_smooth(frames, dim, alpha)?,
        };
        Ok(unit_normalize(means, dim))
    }
}

/// Unit-norm (or all-zero) smoothed frame vectors `v_1..v_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSequence<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SmoothedSequence<T> {
    /// Wraps vectors that are already unit-norm or zero.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == dim), "ragged rows");
        Self {
            dim,
            data: rows.concat(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Vector `v_t` for 1-based `t`.
    pub fn vector(&self, t: usize) -> &[T] {
        &self.data[(t - 1) * self.dim..t * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + DoubleEndedIterator {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn reversed(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.rows().rev() {
            data.extend_from_slice(row);
        }
        Self { dim: self.dim, data }
    }

    /// True when every `v_t` equals `v_1` to within [`Real::degenerate_tol`].
    pub fn is_constant(&self) -> bool {
        let Some(first) = self.rows().next() else {
            return true;
        };
        let tol = T::degenerate_tol();
        self.rows()
            .skip(1)
            .all(|row| row.iter().zip(first).all(|(&a, &b)| (a - b).abs() <= tol))
    }
}

pub fn time_varying_mean<T: Real>(frames: &[T], dim: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(frames.len());
    let mut sum = vec![T::zero(); dim];
    for (t, row) in frames.chunks_exact(dim).enumerate() {
        let count = T::of((t + 1) as f64);
        for (s, &x) in sum.iter_mut().zip(row) {
            *s += x;
            out.push(*s / count);
        }
    }
    out
}

pub fn arma_smooth<T: Real>(frames: &[T], dim: usize, alpha: f64) -> Result<Vec<T>> {
    SmoothingConfig::Arma { alpha }.validate()?;
    let b = T::one() - T::of(alpha);
    let mut out = Vec::with_capacity(frames.len());
    let mut prev: Vec<T> = frames[..dim.min(frames.len())].to_vec();
    for row in frames.chunks_exact(dim) {
        for (m, &x) in prev.iter_mut().zip(row) {
            // alpha * m + (1 - alpha) * x, exact when x == m
            *m += b * (x - *m);
            out.push(*m);
        }
    }
    Ok(out)
}

/// `v_t = m_t / ||m_t||`; zero vectors stay zero.
pub fn unit_normalize<T: Real>(mut means: Vec<T>, dim: usize) -> SmoothedSequence<T> {
    for row in means.chunks_exact_mut(dim) {
        normalize_in_place(row);
    }
    SmoothedSequence { dim, data: means }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tvm_examples() {
        assert_eq!(time_varying_mean(&[2.0, 4.0], 1), vec![2.0, 3.0]);
        assert_eq!(time_varying_mean(&[0.0, 3.0, 6.0], 1), vec![0.0, 1.5, 3.0]);
        assert_eq!(
            time_varying_mean(&[5.0, -1.0, 5.0, -1.0], 2),
            vec![5.0, -1.0, 5.0, -1.0]
        );
    }

    #[test]
    fn arma_examples() {
        assert_eq!(arma_smooth(&[0.0, 4.0], 1, 0.5).unwrap(), vec![0.0, 2.0]);
        let m: Vec<f64> = arma_smooth(&[0.0, 10.0], 1, 0.9).unwrap();
        assert_eq!(m[0], 0.0);
        assert!((m[1] - 1.0).abs() < 1e-12);
        assert_eq!(arma_smooth(&[3.0, 3.0, 3.0], 1, 0.3).unwrap(), vec![3.0, 3.0, 3.0]);
        assert!(arma_smooth(&[1.0f64], 1, 1.0).is_err());
        assert!(arma_smooth(&[1.0f64], 1, 0.0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let v = unit_normalize(vec![3.0, 4.0, 0.0, 0.0], 2);
        assert_eq!(v.vector(1), &[0.6, 0.8]);
        assert_eq!(v.vector(2), &[0.0, 0.0]);
        assert_eq!(v.len(), 2);
    }

    fn frames_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
        (1usize..5, 1usize..12).prop_flat_map(|(dim, n)| (Just(dim), prop::collection::vec(-10.0f64..10.0, dim * n)))
    }

    proptest! {
        #[test]
        fn norms_are_zero_or_one((dim, x) in frames_strategy(), alpha in 0.01f64..0.99) {
            for cfg in [SmoothingConfig::Tvm, SmoothingConfig::Arma { alpha }] {
                let v = cfg.apply(&x, dim).unwrap();
                for row in v.rows() {
                    let n = row.iter().map(|a| a * a).sum::<f64>().sqrt();
                    prop_assert!(n.abs() < 1e-6 || (n - 1.0).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn positive_scale_invariance((dim, x) in frames_strategy(), c in 1e-3f64..1e3, alpha in 0.01f64..0.99) {
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            for cfg in [SmoothingConfig::Tvm, SmoothingConfig::Arma { alpha }] {
                let a = cfg.apply(&x, dim).unwrap();
                let b = cfg.apply(&scaled, dim).unwrap();
                for (p, q) in a.rows().flatten().zip(b.rows().flatten()) {
                    prop_assert!((p - q).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn tvm_prefix_consistent((dim, x) in frames_strategy(), cut in 1usize..12) {
            let n = x.len() / dim;
            let t = cut.min(n);
            let full = time_varying_mean(&x, dim);
            let prefix = time_varying_mean(&x[..t * dim], dim);
            prop_assert_eq!(&full[..t * dim], &prefix[..]);
        }

        #[test]
        fn arma_within_coordinate_hull((dim, x) in frames_strategy(), alpha in 0.01f64..0.99) {
            let m = arma_smooth(&x, dim, alpha).unwrap();
            for (t, row) in m.chunks_exact(dim).enumerate() {
                for d in 0..dim {
                    let seen = (0..=t).map(|s| x[s * dim + d]);
                    let lo = seen.clone().fold(f64::INFINITY, f64::min);
                    let hi = seen.fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(row[d] >= lo - 1e-9 && row[d] <= hi + 1e-9);
                }
            }
        }
    }
}
