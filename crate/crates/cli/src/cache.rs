//! On-disk cache of segment encodings keyed by input digest and encoding
//! settings. Entries store full f64 values so cached and fresh runs agree
//! bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use actmatch_core::rankpool::SegmentEncoding;
use actmatch_core::{encode_segments, seqio::read_features, FeatureFormat};
use anyhow::Context;
use log::{debug, warn};

use crate::config::EncodingSettings;
use crate::output::{atomic_write, sha256_bytes, sha256_file};

const MAGIC: &[u8; 4] = b"AMC1";
pub const CACHE_ENV: &str = "ACTMATCH_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("actmatch-cache"))
}

pub struct EncodingCache {
    dir: Option<PathBuf>,
}

impl EncodingCache {
    pub fn new(enabled: bool) -> Self {
        Self {
            dir: enabled.then(cache_dir),
        }
    }

    /// Encodings of `path`, from the cache when possible.
    pub fn encode(
        &self,
        path: &Path,
        format: FeatureFormat,
        settings: &EncodingSettings,
    ) -> anyhow::Result<Vec<SegmentEncoding<f64>>> {
        let Some(dir) = &self.dir else {
            return compute(path, format, settings);
        };
        let key_src = format!(
            "{}\n{:?}\n{}",
            sha256_file(path)?,
            format,
            serde_json::to_string(settings)?
        );
        let entry = dir.join(format!("{}.amc", sha256_bytes(key_src.as_bytes())));
        if let Ok(bytes) = fs::read(&entry) {
            match decode(&bytes) {
                Some(enc) => {
                    debug!("cache hit {}", entry.display());
                    return Ok(enc);
                }
                None => warn!("ignoring corrupt cache entry {}", entry.display()),
            }
        }
        let enc = compute(path, format, settings)?;
        if let Err(e) = fs::create_dir_all(dir)
            .with_context(|| format!("creating cache dir {}", dir.display()))
            .and_then(|()| atomic_write(&entry, &encode(&enc)))
        {
            warn!("could not store cache entry: {e:#}");
        }
        Ok(enc)
    }
}

fn compute(path: &Path, format: FeatureFormat, s: &EncodingSettings) -> anyhow::Result<Vec<SegmentEncoding<f64>>> {
    let x = read_features::<f64>(path, format)?;
    Ok(encode_segments(&x, &s.segmentation, &s.smoothing, &s.pooling)?)
}

fn encode(enc: &[SegmentEncoding<f64>]) -> Vec<u8> {
    let dim = enc.first().map_or(0, |e| e.w.len());
    let mut out = Vec::with_capacity(12 + enc.len() * (8 + 8 * dim));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(enc.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for e in enc {
        out.extend_from_slice(&e.start_frame.to_le_bytes());
        out.extend_from_slice(&e.end_frame.to_le_bytes());
        for x in &e.w {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn decode(bytes: &[u8]) -> Option<Vec<SegmentEncoding<f64>>> {
    let rest = bytes.strip_prefix(MAGIC)?;
    let u32_at = |b: &[u8], at: usize| -> Option<u32> { Some(u32::from_le_bytes(b.get(at..at + 4)?.try_into().ok()?)) };
    let count = u32_at(rest, 0)? as usize;
    let dim = u32_at(rest, 4)? as usize;
    let rec = 8 + 8 * dim;
    let body = &rest[8..];
    if body.len() != count.checked_mul(rec)? {
        return None;
    }
    body.chunks_exact(rec)
        .map(|r| {
            let w = r[8..]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            Some(SegmentEncoding {
                start_frame: u32_at(r, 0)?,
                end_frame: u32_at(r, 4)?,
                w,
            })
        })
        .collect()
}
