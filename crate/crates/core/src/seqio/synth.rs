//! Synthetic video pairs with planted matching actions.
//!
//! Each class `c` owns a fixed unit `base_c` and unit `direction_c`. A planted
//! segment of class `c` starting at frame `s` emits
//! `x_t = base_c + (t - s + 1) * direction_c + noise_level * N(0, I)`;
//! background frames are `noise_level * N(0, I)`. Two planted segments of the
//! same class therefore share their temporal evolution, which is exactly what
//! a linear ranking function recovers.
//!
//! Randomness comes from a single ChaCha8 stream (`rand_chacha::ChaCha8Rng`)
//! seeded with `SynthConfig::seed`; Gaussian draws use the ziggurat sampler of
//! `rand_distr::StandardNormal`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{annotation::sort_annotations, Annotation, FeatureSequence};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub dim: usize,
    pub n_pairs: usize,
    pub frames_per_video: usize,
    pub planted_segments_per_video: usize,
    /// Inclusive `(min, max)` planted segment length in frames.
    pub planted_length_range: (usize, usize),
    /// Number of distinct action classes to draw from.
    pub n_classes: usize,
    pub noise_level: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            dim: 16,
            n_pairs: 20,
            frames_per_video: 400,
            planted_segments_per_video: 3,
            planted_length_range: (60, 90),
            n_classes: 3,
            noise_level: 0.05,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.planted_length_range;
        if self.dim == 0 || self.frames_per_video == 0 {
            return Err(Error::Config("dim and frames_per_video must be positive".into()));
        }
        if lo < 2 || lo > hi {
            return Err(Error::Config(format!(
                "planted_length_range ({lo}, {hi}) must satisfy 2 <= min <= max"
            )));
        }
        if self.planted_segments_per_video > 0 && self.n_classes == 0 {
            return Err(Error::Config("n_classes must be positive".into()));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::Config("noise_level must be a finite nonnegative number".into()));
        }
        if self.planted_segments_per_video * hi > self.frames_per_video {
            return Err(Error::Config(format!(
                "{} planted segments of up to {hi} frames cannot fit in {} frames without overlap",
                self.planted_segments_per_video, self.frames_per_video
            )));
        }
        Ok(())
    }

    /// Shortest planted segment a matcher with these settings can report:
    /// `L` consecutive windows of `window` frames at `stride`.
    pub fn min_detectable_length(window: usize, stride: usize, min_run: usize) -> usize {
        (min_run.max(1) - 1) * stride + window
    }
}

/// Videos are listed pair by pair: `videos[2p]` and `videos[2p + 1]` form pair `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset<T> {
    pub videos: Vec<FeatureSequence<T>>,
    pub annotations: Vec<Annotation>,
    pub pairs: Vec<(String, String)>,
}

struct ClassDynamics {
    base: Vec<f64>,
    direction: Vec<f64>,
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn synth_generate<T: Real>(cfg: &SynthConfig) -> Result<SynthDataset<T>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let classes: Vec<ClassDynamics> = (0..cfg.n_classes)
        .map(|_| ClassDynamics {
            base: random_unit(&mut rng, cfg.dim),
            direction: random_unit(&mut rng, cfg.dim),
        })
        .collect();

    let mut videos = Vec::with_capacity(2 * cfg.n_pairs);
    let mut annotations = Vec::new();
    let mut pairs = Vec::with_capacity(cfg.n_pairs);
    for p in 0..cfg.n_pairs {
        let ids = [format!("p{p:03}a"), format!("p{p:03}b")];
        for id in &ids {
            let (video, anns) = generate_video(cfg, &classes, id, &mut rng)?;
            videos.push(video);
            annotations.extend(anns);
        }
        let [a, b] = ids;
        pairs.push((a, b));
    }
    sort_annotations(&mut annotations);
    Ok(SynthDataset {
        videos,
        annotations,
        pairs,
    })
}

fn generate_video<T: Real>(
    cfg: &SynthConfig,
    classes: &[ClassDynamics],
    video_id: &str,
    rng: &mut ChaCha8Rng,
) -> Result<(FeatureSequence<T>, Vec<Annotation>)> {
    let k = cfg.planted_segments_per_video;
    let (lo, hi) = cfg.planted_length_range;
    let lengths: Vec<usize> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
    let free = cfg.frames_per_video - lengths.iter().sum::<usize>();

    // k + 1 gaps summing to `free`, from k sorted cut points.
    let mut cuts: Vec<usize> = (0..k).map(|_| rng.random_range(0..=free)).collect();
    cuts.sort_unstable();
    let mut order: Vec<usize> = (0..cfg.n_classes).collect();
    order.shuffle(rng);

    // (start frame, length, class), 1-based start
    let mut planted = Vec::with_capacity(k);
    let mut cursor = 1;
    let mut prev_cut = 0;
    for (s, (&len, &cut)) in lengths.iter().zip(&cuts).enumerate() {
        cursor += cut - prev_cut;
        prev_cut = cut;
        planted.push((cursor, len, order[s % order.len()]));
        cursor += len;
    }

    let dim = cfg.dim;
    let mut data = Vec::with_capacity(cfg.frames_per_video * dim);
    let mut segment = planted.iter().peekable();
    for t in 1..=cfg.frames_per_video {
        while segment.peek().is_some_and(|&&(s, len, _)| t >= s + len) {
            segment.next();
        }
        let active = segment.peek().filter(|&&&(s, _, _)| t >= s);
        for d in 0..dim {
            let noise: f64 = rng.sample(StandardNormal);
            let mut x = cfg.noise_level * noise;
            if let Some(&&(s, _, c)) = active {
                let tau = (t - s + 1) as f64;
                x += classes[c].base[d] + tau * classes[c].direction[d];
            }
            data.push(T::of(x));
        }
    }

    let anns = planted
        .iter()
        .map(|&(s, len, c)| Annotation {
            video_id: video_id.to_string(),
            label: format!("class{c}"),
            start_frame: s as u32,
            end_frame: (s + len - 1) as u32,
        })
        .collect();
    Ok((FeatureSequence::new(video_id, dim, data)?, anns))
}
