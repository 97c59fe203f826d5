use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labelled frame interval of one video (1-based, inclusive).
///
/// Frames not covered by any annotation are background.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub video_id: String,
    pub label: String,
    pub start_frame: u32,
    pub end_frame: u32,
}

impl Annotation {
    pub fn len(&self) -> u32 {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks the interval against the length of the video it refers to.
    pub fn check_bounds(&self, n_frames: usize) -> Result<()> {
        if self.end_frame as usize > n_frames {
            return Err(Error::Annotation {
                line: 0,
                message: format!(
                    "{}: end_frame {} exceeds video length {n_frames}",
                    self.video_id, self.end_frame
                ),
            });
        }
        Ok(())
    }
}

/// Parses JSON-lines annotations, sorted by `(video_id, start_frame)`.
///
/// Same-label overlaps within a video are logged as warnings.
pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let annotations = parse_annotations(&text)?;
    for warning in overlap_warnings(&annotations) {
        log::warn!("{}: {warning}", path.display());
    }
    Ok(annotations)
}

pub(crate) fn parse_annotations(text: &str) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let ann: Annotation = serde_json::from_str(line).map_err(|e| Error::Annotation {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if ann.start_frame < 1 {
            return Err(Error::Annotation {
                line: idx + 1,
                message: "start_frame must be at least 1".into(),
            });
        }
        if ann.start_frame > ann.end_frame {
            return Err(Error::Annotation {
                line: idx + 1,
                message: format!("start_frame {} is after end_frame {}", ann.start_frame, ann.end_frame),
            });
        }
        out.push(ann);
    }
    sort_annotations(&mut out);
    Ok(out)
}

pub(crate) fn sort_annotations(list: &mut [Annotation]) {
    list.sort_by(|a, b| {
        (a.video_id.as_str(), a.start_frame, a.end_frame, a.label.as_str()).cmp(&(
            b.video_id.as_str(),
            b.start_frame,
            b.end_frame,
            b.label.as_str(),
        ))
    });
}

/// Describes every pair of same-video, same-label annotations that overlap.
pub fn overlap_warnings(annotations: &[Annotation]) -> Vec<String> {
    let mut warnings = Vec::new();
    for (i, a) in annotations.iter().enumerate() {
        for b in &annotations[i + 1..] {
            if a.video_id == b.video_id
                && a.label == b.label
                && a.start_frame <= b.end_frame
                && b.start_frame <= a.end_frame
            {
                warnings.push(format!(
                    "overlapping {:?} annotations in {}: [{}, {}] and [{}, {}]",
                    a.label, a.video_id, a.start_frame, a.end_frame, b.start_frame, b.end_frame
                ));
            }
        }
    }
    warnings
}

pub fn write_annotations(annotations: &[Annotation], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for a in annotations {
        serde_json::to_writer(&mut buf, a).expect("annotation serializes");
        buf.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line() {
        let anns = parse_annotations(r#"{"video_id":"a","label":"cut","start_frame":10,"end_frame":40}"#).unwrap();
        assert_eq!(
            anns,
            vec![Annotation {
                video_id: "a".into(),
                label: "cut".into(),
                start_frame: 10,
                end_frame: 40
            }]
        );
        assert_eq!(anns[0].len(), 31);
    }

    #[test]
    fn sorted_by_video_then_start() {
        let text = concat!(
            r#"{"video_id":"b","label":"x","start_frame":1,"end_frame":2}"#,
            "\n",
            r#"{"video_id":"a","label":"x","start_frame":50,"end_frame":60}"#,
            "\n\n",
            r#"{"video_id":"a","label":"y","start_frame":5,"end_frame":9}"#,
            "\n"
        );
        let anns = parse_annotations(text).unwrap();
        let keys: Vec<_> = anns.iter().map(|a| (a.video_id.as_str(), a.start_frame)).collect();
        assert_eq!(keys, vec![("a", 5), ("a", 50), ("b", 1)]);
        assert!(overlap_warnings(&anns).is_empty());
    }

    #[test]
    fn reversed_interval_is_an_error() {
        let err = parse_annotations(r#"{"video_id":"a","label":"x","start_frame":50,"end_frame":40}"#).unwrap_err();
        assert!(matches!(err, Error::Annotation { line: 1, .. }));
    }

    #[test]
    fn overlap_is_a_warning() {
        let text = concat!(
            r#"{"video_id":"a","label":"x","start_frame":1,"end_frame":20}"#,
            "\n",
            r#"{"video_id":"a","label":"x","start_frame":15,"end_frame":30}"#,
            "\n",
            r#"{"video_id":"a","label":"y","start_frame":15,"end_frame":30}"#,
        );
        let anns = parse_annotations(text).unwrap();
        assert_eq!(anns.len(), 3);
        assert_eq!(overlap_warnings(&anns).len(), 1);
    }

    #[test]
    fn bounds_check() {
        let a = Annotation {
            video_id: "a".into(),
            label: "x".into(),
            start_frame: 1,
            end_frame: 11,
        };
        assert!(a.check_bounds(11).is_ok());
        assert!(a.check_bounds(10).is_err());
    }
}
