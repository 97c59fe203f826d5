use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunManifest;

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).map_err(|e| actmatch_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(sha256_bytes(&bytes))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name: OsString = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    sibling(out, ".manifest.json")
}

/// Produces `path` through `write` on a temporary sibling, then renames it
/// into place so readers never see a partial file.
pub fn atomic_with(path: &Path, write: impl FnOnce(&Path) -> anyhow::Result<()>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = sibling(path, &format!(".tmp{}", std::process::id()));
    let result =
        write(&tmp).and_then(|()| fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display())));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    atomic_with(path, |tmp| {
        let mut f = fs::File::create(tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
        Ok(())
    })
}

/// Writes `bytes` to `out` (or stdout) and the manifest beside it.
pub fn emit<C: Serialize>(out: Option<&Path>, bytes: &[u8], manifest: &RunManifest<C>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            atomic_write(path, bytes)?;
            write_manifest(path, manifest)
        }
        None => print(bytes),
    }
}

pub fn write_manifest<C: Serialize>(out: &Path, manifest: &RunManifest<C>) -> anyhow::Result<()> {
    let mut json = serde_json::to_vec_pretty(manifest)?;
    json.push(b'\n');
    atomic_write(&manifest_path(out), &json)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn print(bytes: &[u8]) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
