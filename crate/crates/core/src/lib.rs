//! Unsupervised action detection by action matching.
//!
//! Given per-frame features of two videos, every sliding window is encoded by
//! rank pooling, the two sets of encodings are compared in a gram matrix, and
//! diagonal runs of at least `L` above-threshold cells become candidate pairs
//! of matching action units. Candidates are suppressed, ranked and scored
//! against annotated ground truth.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the default `f64` working precision.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod matcher;
pub mod preprocess;
pub mod rankpool;
pub mod scalar;
pub mod seqio;

pub use error::{Error, Result};
pub use eval::{aggregate, evaluate, gt_pairs, interval_iou, EvalReport, GtPair, GtPairs};
pub use matcher::{
    adaptive_threshold, consistency_scan, extract_runs, gram_matrix, match_gram, match_pair, nms, score_candidate,
    ActionUnit, CandidatePair, Detection, GramMatrix, MatchConfig,
};
pub use preprocess::{SmoothedSequence, SmoothingConfig};
pub use rankpool::{encode_segments, RankPoolConfig, RankPoolMethod, SegmentEncoding, SegmentationConfig};
pub use scalar::Real;
pub use seqio::{Annotation, FeatureFormat, FeatureSequence, SynthConfig};

/// Working precision of the CLI and the default pipeline.
pub type Scalar = f64;

pub type Features = seqio::FeatureSequence<Scalar>;
pub type Features32 = seqio::FeatureSequence<f32>;
pub type Smoothed = preprocess::SmoothedSequence<Scalar>;
pub type Encoding = rankpool::SegmentEncoding<Scalar>;
pub type Encoding32 = rankpool::SegmentEncoding<f32>;
pub type Gram = matcher::GramMatrix<Scalar>;
pub type Gram32 = matcher::GramMatrix<f32>;
