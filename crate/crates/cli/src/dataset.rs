use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

pub const PAIRS_FILE: &str = "pairs.txt";
pub const ANNOTATIONS_FILE: &str = "annotations.jsonl";

/// Reads `video_a video_b` lines; blank lines and `#` comments are skipped.
pub fn read_pairs(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading pair list {}", path.display()))?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields[..] else {
            bail!("{}:{}: expected `video_a video_b`, got {line:?}", path.display(), n + 1);
        };
        pairs.push((a.to_string(), b.to_string()));
    }
    Ok(pairs)
}

pub fn pairs_text(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect()
}

/// Feature file of `video_id` inside `dir`, as `.amf` or `.csv`.
pub fn find_video(dir: &Path, video_id: &str) -> anyhow::Result<PathBuf> {
    ["amf", "csv"]
        .iter()
        .map(|ext| dir.join(format!("{video_id}.{ext}")))
        .find(|p| p.is_file())
        .with_context(|| format!("no feature file for video {video_id:?} in {}", dir.display()))
}

pub fn video_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
