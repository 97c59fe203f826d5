//! Feature sequences, annotations and their on-disk formats.
//!
//! Binary feature files (`AMF1`):
//!
//! ```text
//! offset 0   b"AMF1"
//! offset 4   u32 LE   n_frames
//! offset 8   u32 LE   dim
//! offset 12  n_frames * dim f32 LE, row-major
//! ```
//!
//! CSV feature files hold one frame per line, comma separated, no header.
//! Annotation files are JSON lines with `video_id`, `label`, `start_frame`
//! and `end_frame` (1-based, inclusive).
//!
//! Frame indices are 1-based and inclusive everywhere in this crate.

mod annotation;
mod features;
pub mod synth;

pub use annotation::{overlap_warnings, read_annotations, write_annotations, Annotation};
pub use features::{read_features, write_features, FeatureFormat, FeatureSequence};
pub use synth::{synth_generate, SynthConfig, SynthDataset};
