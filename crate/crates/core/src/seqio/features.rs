use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) const FEATURE_MAGIC: &[u8; 4] = b"AMF1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureFormat {
    Binary,
    Csv,
}

impl FeatureFormat {
    /// Guesses the format from a file extension: `.csv` is CSV, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FeatureFormat::Csv,
            _ => FeatureFormat::Binary,
        }
    }
}

impl FromStr for FeatureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "bin" => Ok(FeatureFormat::Binary),
            "csv" => Ok(FeatureFormat::Csv),
            other => Err(Error::Config(format!("unknown feature format {other:?}"))),
        }
    }
}

/// Per-frame descriptors of one video; row `t - 1` holds frame `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence<T> {
    video_id: String,
    n_frames: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> FeatureSequence<T> {
    /// Builds a sequence from row-major data, checking shape and finiteness.
    pub fn new(video_id: impl Into<String>, dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("feature dimension must be at least 1".into()));
        }
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.len() % dim,
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite value at frame {}, column {}",
                pos / dim + 1,
                pos % dim + 1
            )));
        }
        Ok(Self {
            video_id: video_id.into(),
            n_frames: data.len() / dim,
            dim,
            data,
        })
    }

    /// Builds a sequence from per-frame rows.
    pub fn from_rows(video_id: impl Into<String>, rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((t, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::RaggedRow {
                line: t + 1,
                expected: dim,
                found: row.len(),
            });
        }
        Self::new(video_id, dim, rows.concat())
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn set_video_id(&mut self, id: impl Into<String>) {
        self.video_id = id.into();
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Descriptor of frame `t` (1-based).
    pub fn frame(&self, t: usize) -> &[T] {
        assert!(t >= 1 && t <= self.n_frames, "frame {t} out of range");
        &self.data[(t - 1) * self.dim..t * self.dim]
    }

    /// Row-major slice of frames `start..=end` (1-based, inclusive).
    pub fn frames(&self, start: usize, end: usize) -> &[T] {
        assert!(start >= 1 && start <= end && end <= self.n_frames);
        &self.data[(start - 1) * self.dim..end * self.dim]
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            data: self.data.iter().map(|&x| x * c).collect(),
            ..self.clone()
        }
    }

    /// Converts to another scalar type (`f32` storage to `f64` compute and back).
    pub fn cast<U: Real>(&self) -> FeatureSequence<U> {
        FeatureSequence {
            video_id: self.video_id.clone(),
            n_frames: self.n_frames,
            dim: self.dim,
            data: self.data.iter().map(|&x| U::of(x.as_f64())).collect(),
        }
    }
}

fn video_id_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a feature file. The video id is the file stem.
pub fn read_features<T: Real>(path: &Path, format: FeatureFormat) -> Result<FeatureSequence<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let id = video_id_from_path(path);
    match format {
        FeatureFormat::Binary => decode_binary(&bytes, id),
        FeatureFormat::Csv => {
            let text = String::from_utf8_lossy(&bytes);
            decode_csv(&text, id)
        }
    }
}

pub fn write_features<T: Real>(seq: &FeatureSequence<T>, path: &Path, format: FeatureFormat) -> Result<()> {
    let bytes = match format {
        FeatureFormat::Binary => encode_binary(seq),
        FeatureFormat::Csv => encode_csv(seq).into_bytes(),
    };
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn encode_binary<T: Real>(seq: &FeatureSequence<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * seq.data.len());
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&(seq.n_frames as u32).to_le_bytes());
    out.extend_from_slice(&(seq.dim as u32).to_le_bytes());
    for &x in &seq.data {
        out.extend_from_slice(&(x.as_f64() as f32).to_le_bytes());
    }
    out
}

pub(crate) fn decode_binary<T: Real>(bytes: &[u8], video_id: String) -> Result<FeatureSequence<T>> {
    if bytes.len() < 4 || &bytes[..4] != FEATURE_MAGIC {
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(FEATURE_MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::MalformedHeader {
            offset: bytes.len(),
            reason: format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len()),
        });
    }
    let n_frames = read_u32(bytes, 4) as usize;
    let dim = read_u32(bytes, 8) as usize;
    if n_frames == 0 {
        return Err(Error::MalformedHeader {
            offset: 4,
            reason: "n_frames is 0".into(),
        });
    }
    if dim == 0 {
        return Err(Error::MalformedHeader {
            offset: 8,
            reason: "dim is 0".into(),
        });
    }
    let expected = n_frames
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::MalformedHeader {
            offset: 4,
            reason: format!("payload size {n_frames} x {dim} overflows"),
        })?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            offset: bytes.len(),
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::TrailingBytes {
            offset: HEADER_LEN + expected,
            extra: payload.len() - expected,
        });
    }
    let mut data = Vec::with_capacity(n_frames * dim);
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let x = f32::from_le_bytes(chunk.try_into().unwrap());
        if !x.is_finite() {
            return Err(Error::NonFiniteBinary {
                offset: HEADER_LEN + 4 * k,
            });
        }
        data.push(T::of(x as f64));
    }
    Ok(FeatureSequence {
        video_id,
        n_frames,
        dim,
        data,
    })
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn encode_csv<T: Real>(seq: &FeatureSequence<T>) -> String {
    let mut out = String::new();
    for row in seq.data.chunks_exact(seq.dim) {
        let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn decode_csv<T: Real>(text: &str, video_id: String) -> Result<FeatureSequence<T>> {
    let mut data = Vec::new();
    let mut dim = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (col, token) in line.split(',').enumerate() {
            let token = token.trim();
            let x: f64 = token.parse().map_err(|_| Error::CsvParse {
                line: line_no,
                column: col + 1,
                token: token.to_string(),
            })?;
            if !x.is_finite() {
                return Err(Error::NonFiniteCsv {
                    line: line_no,
                    column: col + 1,
                });
            }
            data.push(T::of(x));
            count += 1;
        }
        match dim {
            None => dim = Some(count),
            Some(d) if d != count => {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: d,
                    found: count,
                })
            }
            _ => {}
        }
    }
    let dim = dim.ok_or(Error::Empty)?;
    FeatureSequence::new(video_id, dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_small() {
        let seq = FeatureSequence::<f32>::new("v", 3, vec![1.0, -2.5, 3.25, 0.0, 1e-7, 7e5]).unwrap();
        let back: FeatureSequence<f32> = decode_binary(&encode_binary(&seq), "v".into()).unwrap();
        assert_eq!(back, seq);
        assert_eq!(back.n_frames(), 2);
    }

    #[test]
    fn one_by_one_file() {
        let seq = FeatureSequence::<f64>::new("x", 1, vec![0.5]).unwrap();
        let bytes = encode_binary(&seq);
        assert_eq!(bytes.len(), 16);
        let back: FeatureSequence<f64> = decode_binary(&bytes, "x".into()).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn csv_two_by_two() {
        let seq: FeatureSequence<f64> = decode_csv("1,0\n0,1", "c".into()).unwrap();
        assert_eq!((seq.n_frames(), seq.dim()), (2, 2));
        assert_eq!(seq.frame(2), &[0.0, 1.0]);
    }

    #[test]
    fn truncated_payload() {
        let seq = FeatureSequence::<f32>::new("v", 2, vec![0.0; 6]).unwrap();
        let mut bytes = encode_binary(&seq);
        bytes[4..8].copy_from_slice(&5u32.to_le_bytes());
        match decode_binary::<f32>(&bytes, "v".into()) {
            Err(Error::TruncatedPayload { expected, found, .. }) => {
                assert_eq!(expected, 40);
                assert_eq!(found, 24);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_are_a_dimension_mismatch() {
        let seq = FeatureSequence::<f32>::new("v", 2, vec![0.0; 4]).unwrap();
        let mut bytes = encode_binary(&seq);
        bytes.extend_from_slice(&[0; 8]);
        assert!(matches!(
            decode_binary::<f32>(&bytes, "v".into()),
            Err(Error::TrailingBytes { offset: 28, extra: 8 })
        ));
    }

    #[test]
    fn bad_magic_and_short_header() {
        assert!(matches!(
            decode_binary::<f32>(b"AMF2\0\0\0\0\0\0\0\0", "v".into()),
            Err(Error::BadMagic { .. })
        ));
        assert!(matches!(
            decode_binary::<f32>(b"AMF1\x01\0", "v".into()),
            Err(Error::MalformedHeader { .. })
        ));
        assert!(matches!(
            decode_binary::<f32>(b"AMF1\0\0\0\0\x01\0\0\0", "v".into()),
            Err(Error::MalformedHeader { offset: 4, .. })
        ));
    }

    #[test]
    fn non_finite_binary_names_offset() {
        let seq = FeatureSequence::<f32>::new("v", 2, vec![0.0; 4]).unwrap();
        let mut bytes = encode_binary(&seq);
        bytes[20..24].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(
            decode_binary::<f32>(&bytes, "v".into()),
            Err(Error::NonFiniteBinary { offset: 20 })
        ));
    }

    #[test]
    fn csv_errors_name_line() {
        assert!(matches!(
            decode_csv::<f64>("1,2\n3\n", "c".into()),
            Err(Error::RaggedRow {
                line: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            decode_csv::<f64>("1,2\n3,x\n", "c".into()),
            Err(Error::CsvParse { line: 2, column: 2, .. })
        ));
        assert!(matches!(
            decode_csv::<f64>("1,inf\n", "c".into()),
            Err(Error::NonFiniteCsv { line: 1, column: 2 })
        ));
        assert!(matches!(decode_csv::<f64>("\n\n", "c".into()), Err(Error::Empty)));
    }

    #[test]
    fn csv_keeps_nine_significant_digits() {
        let vals = vec![1.234_567_891_2_f64, -9.876_543_210_9e-5, 3.0e12, 0.1];
        let seq = FeatureSequence::new("c", 2, vals.clone()).unwrap();
        let back: FeatureSequence<f64> = decode_csv(&encode_csv(&seq), "c".into()).unwrap();
        for (a, b) in vals.iter().zip(back.data()) {
            assert!(((a - b) / a).abs() < 1e-9);
        }
    }
}
