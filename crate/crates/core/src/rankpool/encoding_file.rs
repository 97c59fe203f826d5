//! `AME1` segment encoding files.
//!
//! ```text
//! b"AME1", u32 count, u32 dim,
//! count x { u32 start_frame, u32 end_frame, dim x f32 }   (all little-endian)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::SegmentEncoding;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"AME1";

pub fn encode_encodings<T: Real>(encodings: &[SegmentEncoding<T>], dim: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(12 + encodings.len() * (8 + 4 * dim));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(encodings.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for e in encodings {
        if e.w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: e.w.len(),
            });
        }
        out.extend_from_slice(&e.start_frame.to_le_bytes());
        out.extend_from_slice(&e.end_frame.to_le_bytes());
        for &x in &e.w {
            out.extend_from_slice(&(x.as_f64() as f32).to_le_bytes());
        }
    }
    Ok(out)
}

/// Parses an `AME1` buffer into `(dim, encodings)`.
pub fn decode_encodings<T: Real>(bytes: &[u8]) -> Result<(usize, Vec<SegmentEncoding<T>>)> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic {
            expected: "AME1".into(),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
        });
    }
    if bytes.len() < 12 {
        return Err(Error::MalformedHeader {
            offset: bytes.len(),
            reason: "header needs 12 bytes".into(),
        });
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let count = u32_at(4) as usize;
    let dim = u32_at(8) as usize;
    let record = 8 + 4 * dim;
    let expected = count * record;
    let payload = bytes.len() - 12;
    if payload < expected {
        return Err(Error::TruncatedPayload {
            offset: bytes.len(),
            expected,
            found: payload,
        });
    }
    if payload > expected {
        return Err(Error::TrailingBytes {
            offset: 12 + expected,
            extra: payload - expected,
        });
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let at = 12 + k * record;
        let start_frame = u32_at(at);
        let end_frame = u32_at(at + 4);
        let mut w = Vec::with_capacity(dim);
        for d in 0..dim {
            let off = at + 8 + 4 * d;
            let x = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
            if !x.is_finite() {
                return Err(Error::NonFiniteBinary { offset: off });
            }
            w.push(T::of(x as f64));
        }
        out.push(SegmentEncoding {
            start_frame,
            end_frame,
            w,
        });
    }
    Ok((dim, out))
}

pub fn write_encodings<T: Real>(encodings: &[SegmentEncoding<T>], dim: usize, path: &Path) -> Result<()> {
    let bytes = encode_encodings(encodings, dim)?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn read_encodings<T: Real>(path: &Path) -> Result<(usize, Vec<SegmentEncoding<T>>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_encodings(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let enc = vec![
            SegmentEncoding {
                start_frame: 1,
                end_frame: 61,
                w: vec![0.6f32, 0.8],
            },
            SegmentEncoding {
                start_frame: 11,
                end_frame: 71,
                w: vec![0.0, 0.0],
            },
        ];
        let bytes = encode_encodings(&enc, 2).unwrap();
        assert_eq!(bytes.len(), 12 + 2 * 16);
        let (dim, back) = decode_encodings::<f32>(&bytes).unwrap();
        assert_eq!((dim, back), (2, enc.clone()));
        assert!(matches!(
            decode_encodings::<f32>(&bytes[..20]),
            Err(Error::TruncatedPayload { .. })
        ));
        assert!(matches!(
            encode_encodings(&enc, 3),
            Err(Error::DimensionMismatch { .. })
        ));
        let (dim, none) = decode_encodings::<f64>(&encode_encodings::<f64>(&[], 5).unwrap()).unwrap();
        assert_eq!((dim, none.len()), (5, 0));
    }
}
