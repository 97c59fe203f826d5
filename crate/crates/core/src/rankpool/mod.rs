//! Temporal encoding of video segments by rank pooling.
//!
//! A segment's frames are smoothed (restarting at the segment's first frame),
//! unit-normalized, pooled into one vector and L2-normalized:
//!
//! ```text
//! X -> M -> V (v_t = m_t / ||m_t||) -> w -> w* = w / ||w||
//! ```

mod encoding_file;
mod solver;

use serde::{Deserialize, Serialize};

pub use encoding_file::{decode_encodings, encode_encodings, read_encodings, write_encodings};
pub use solver::{RankObjective, Solution};

use crate::error::{Error, Result};
use crate::preprocess::{SmoothedSequence, SmoothingConfig};
use crate::scalar::{normalize_in_place, Real};
use crate::seqio::FeatureSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPoolMethod {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPoolConfig {
    pub method: RankPoolMethod,
    /// Loss weight `C` of the exact objective.
    pub c: f64,
    /// Insensitivity margin of the exact objective.
    pub epsilon: f64,
    pub solver_tol: f64,
    pub max_iters: usize,
}

impl Default for RankPoolConfig {
    fn default() -> Self {
        Self {
            method: RankPoolMethod::Exact,
            c: 1.0,
            epsilon: 0.1,
            solver_tol: 1e-6,
            max_iters: 10_000,
        }
    }
}

impl RankPoolConfig {
    pub fn approximate() -> Self {
        Self {
            method: RankPoolMethod::Approximate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.solver_tol.is_nan() || self.solver_tol <= 0.0 {
            return Err(Error::Config("solver_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if self.method == RankPoolMethod::Exact {
            if !(self.c > 0.0 && self.c.is_finite()) {
                return Err(Error::Config(format!("C = {} must be positive", self.c)));
            }
            if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
                return Err(Error::Config(format!("epsilon = {} must be nonnegative", self.epsilon)));
            }
        }
        Ok(())
    }

    /// Pools one smoothed segment into a raw (unnormalized) vector.
    pub fn pool<T: Real>(&self, v: &SmoothedSequence<T>) -> Result<Vec<T>> {
        match self.method {
            RankPoolMethod::Exact => rank_pool_exact(v, self.c, self.epsilon, self.solver_tol, self.max_iters),
            RankPoolMethod::Approximate => rank_pool_approx(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub window: usize,
    pub stride: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self { window: 61, stride: 10 }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::Config(format!("window {} must be at least 2", self.window)));
        }
        if self.stride < 1 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Inclusive 1-based frame spans of the windows over an `n_frames` video.
    ///
    /// Windows that would run past the end are dropped; a video shorter than
    /// one window yields the single span `[1, n_frames]`.
    pub fn spans(&self, n_frames: usize) -> Vec<(usize, usize)> {
        if n_frames < self.window {
            return vec![(1, n_frames)];
        }
        (1..=n_frames - self.window + 1)
            .step_by(self.stride)
            .map(|s| (s, s + self.window - 1))
            .collect()
    }
}

/// Unit-norm (or zero) pooled vector of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentEncoding<T> {
    pub start_frame: u32,
    pub end_frame: u32,
    pub w: Vec<T>,
}

impl<T: Real> SegmentEncoding<T> {
    pub fn n_frames(&self) -> usize {
        (self.end_frame - self.start_frame + 1) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|x| x.is_zero())
    }
}

/// Minimizer of the rank pooling objective for `v` (see [`RankObjective`]).
pub fn rank_pool_exact<T: Real>(
    v: &SmoothedSequence<T>,
    c: f64,
    epsilon: f64,
    solver_tol: f64,
    max_iters: usize,
) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(Error::DegenerateSegment { frames: 0 });
    }
    Ok(RankObjective::new(v, c, epsilon).minimize(solver_tol, max_iters)?.w)
}

/// Closed-form approximation `w = sum_t (2t - J - 1) v_t`.
pub fn rank_pool_approx<T: Real>(v: &SmoothedSequence<T>) -> Result<Vec<T>> {
    let j = v.len();
    if j < 2 {
        return Err(Error::DegenerateSegment { frames: j });
    }
    let mut w = vec![T::zero(); v.dim()];
    for (t, row) in v.rows().enumerate() {
        let coef = T::of((2 * (t + 1)) as f64 - j as f64 - 1.0);
        w.iter_mut().zip(row).for_each(|(wi, &x)| *wi += coef * x);
    }
    Ok(w)
}

/// Encodes one frame span of `x` (1-based, inclusive).
pub fn encode_span<T: Real>(
    x: &FeatureSequence<T>,
    start: usize,
    end: usize,
    smooth: &SmoothingConfig,
    rp: &RankPoolConfig,
) -> Result<SegmentEncoding<T>> {
    let v = smooth.apply(x.frames(start, end), x.dim())?;
    let w = if v.is_constant() {
        // all frames point the same way: no temporal evolution to encode
        vec![T::zero(); x.dim()]
    } else {
        let mut w = rp.pool(&v)?;
        normalize_in_place(&mut w);
        w
    };
    Ok(SegmentEncoding {
        start_frame: start as u32,
        end_frame: end as u32,
        w,
    })
}

/// Slides a window over `x` and encodes every segment, ordered by start frame.
pub fn encode_segments<T: Real>(
    x: &FeatureSequence<T>,
    seg: &SegmentationConfig,
    smooth: &SmoothingConfig,
    rp: &RankPoolConfig,
) -> Result<Vec<SegmentEncoding<T>>> {
    seg.validate()?;
    smooth.validate()?;
    rp.validate()?;
    if x.n_frames() < 2 {
        return Err(Error::TooShort { n_frames: x.n_frames() });
    }
    seg.spans(x.n_frames())
        .into_iter()
        .map(|(s, e)| encode_span(x, s, e, smooth, rp))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn approx_coefficients() {
        let v = SmoothedSequence::from_rows(&[basis(2, 0), basis(2, 1)]);
        assert_eq!(rank_pool_approx(&v).unwrap(), vec![-1.0, 1.0]);
        let v = SmoothedSequence::from_rows(&[basis(3, 0), basis(3, 1), basis(3, 2)]);
        assert_eq!(rank_pool_approx(&v).unwrap(), vec![-2.0, 0.0, 2.0]);
        let c = vec![0.6, 0.8];
        let v = SmoothedSequence::from_rows(&[c.clone(), c.clone(), c.clone(), c]);
        assert_eq!(rank_pool_approx(&v).unwrap(), vec![0.0, 0.0]);
        let single = SmoothedSequence::from_rows(&[basis(2, 0)]);
        assert!(matches!(
            rank_pool_approx(&single),
            Err(Error::DegenerateSegment { frames: 1 })
        ));
    }

    #[test]
    fn tiny_c_gives_near_zero_w() {
        let v = SmoothedSequence::from_rows(&[vec![0.6, 0.8], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let w = rank_pool_exact(&v, 1e-12, 0.1, 1e-6, 10_000).unwrap();
        assert!(w.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-6);
    }

    #[test]
    fn window_starts() {
        let seg = SegmentationConfig { window: 61, stride: 10 };
        let starts: Vec<_> = seg.spans(100).iter().map(|s| s.0).collect();
        assert_eq!(starts, vec![1, 11, 21, 31]);
        assert_eq!(seg.spans(30), vec![(1, 30)]);
        assert_eq!(seg.spans(61), vec![(1, 61)]);
    }

    #[test]
    fn too_short_and_bad_config() {
        let x = FeatureSequence::new("v", 2, vec![1.0, 2.0]).unwrap();
        let err = encode_segments(
            &x,
            &SegmentationConfig::default(),
            &SmoothingConfig::Tvm,
            &RankPoolConfig::default(),
        );
        assert!(matches!(err, Err(Error::TooShort { n_frames: 1 })));
        let x = FeatureSequence::new("v", 1, vec![1.0, 2.0, 3.0]).unwrap();
        let seg = SegmentationConfig { window: 1, stride: 1 };
        assert!(encode_segments(&x, &seg, &SmoothingConfig::Tvm, &RankPoolConfig::default()).is_err());
        let bad = SmoothingConfig::Arma { alpha: 1.5 };
        assert!(encode_segments(&x, &SegmentationConfig::default(), &bad, &RankPoolConfig::default()).is_err());
    }

    #[test]
    fn constant_video_encodes_to_zero() {
        let x = FeatureSequence::new("v", 2, [0.3, -0.1].repeat(20)).unwrap();
        let seg = SegmentationConfig { window: 5, stride: 3 };
        for rp in [RankPoolConfig::default(), RankPoolConfig::approximate()] {
            let enc = encode_segments(&x, &seg, &SmoothingConfig::Tvm, &rp).unwrap();
            assert!(enc.iter().all(SegmentEncoding::is_zero));
        }
    }

    #[test]
    fn encodings_are_unit_norm_and_scale_invariant() {
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|t| {
                let t = t as f64;
                vec![1.0 + 0.1 * t, (0.2 * t).sin(), 0.5 - 0.01 * t]
            })
            .collect();
        let x = FeatureSequence::from_rows("v", &rows).unwrap();
        let seg = SegmentationConfig { window: 61, stride: 10 };
        let a = encode_segments(&x, &seg, &SmoothingConfig::Tvm, &RankPoolConfig::default()).unwrap();
        let b = encode_segments(&x.scaled(3.0), &seg, &SmoothingConfig::Tvm, &RankPoolConfig::default()).unwrap();
        assert_eq!(a.len(), 4);
        for (ea, eb) in a.iter().zip(&b) {
            let n = ea.w.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-6);
            assert_eq!((ea.start_frame, ea.end_frame), (eb.start_frame, eb.end_frame));
            for (p, q) in ea.w.iter().zip(&eb.w) {
                assert!((p - q).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let rows: Vec<Vec<f32>> = (0..40).map(|t| vec![1.0, t as f32 * 0.05]).collect();
        let x = FeatureSequence::from_rows("v", &rows).unwrap();
        let seg = SegmentationConfig { window: 21, stride: 5 };
        let enc = encode_segments(&x, &seg, &SmoothingConfig::Tvm, &RankPoolConfig::default()).unwrap();
        assert_eq!(enc.len(), 4);
        for e in &enc {
            let n = e.w.iter().map(|x| x * x).sum::<f32>().sqrt();
            assert!((n - 1.0).abs() < 1e-5);
        }
    }
}
