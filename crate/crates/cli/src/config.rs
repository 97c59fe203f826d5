use std::fmt;
use std::path::Path;

use actmatch_core::baselines::ClusterConfig;
use actmatch_core::preprocess::DEFAULT_ARMA_ALPHA;
use actmatch_core::{FeatureFormat, MatchConfig, RankPoolConfig, RankPoolMethod, SegmentationConfig, SmoothingConfig};
use serde::Serialize;

use crate::args::{EncodingArgs, FormatArg, MatchArgs, MethodArg, PoolArg, SmoothArg};
use crate::output::sha256_file;

/// A bad flag combination or parameter value; exits with status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Turns a core validation result into a usage error.
pub fn check(r: actmatch_core::Result<()>) -> anyhow::Result<()> {
    r.map_err(|e| usage(e.to_string()))
}

/// Everything that determines a segment encoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EncodingSettings {
    pub segmentation: SegmentationConfig,
    pub smoothing: SmoothingConfig,
    pub pooling: RankPoolConfig,
}

impl EncodingSettings {
    pub fn resolve(a: &EncodingArgs, pool: PoolArg) -> anyhow::Result<Self> {
        let smoothing = match (a.smooth, a.alpha) {
            (SmoothArg::Tvm, Some(_)) => return Err(usage("--alpha requires --smooth arma")),
            (SmoothArg::Tvm, None) => SmoothingConfig::Tvm,
            (SmoothArg::Arma, alpha) => SmoothingConfig::Arma {
                alpha: alpha.unwrap_or(DEFAULT_ARMA_ALPHA),
            },
        };
        let pooling = RankPoolConfig {
            method: match pool {
                PoolArg::Exact => RankPoolMethod::Exact,
                PoolArg::Approx => RankPoolMethod::Approximate,
            },
            c: a.c,
            epsilon: a.epsilon,
            solver_tol: a.tol,
            max_iters: a.max_iters,
        };
        let s = Self {
            segmentation: SegmentationConfig {
                window: a.window,
                stride: a.stride,
            },
            smoothing,
            pooling,
        };
        check(s.segmentation.validate())?;
        check(s.smoothing.validate())?;
        check(s.pooling.validate())?;
        Ok(s)
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self {
            segmentation: SegmentationConfig {
                stride,
                ..self.segmentation
            },
            ..self
        }
    }
}

pub fn feature_format(arg: Option<FormatArg>, path: &Path) -> FeatureFormat {
    match arg {
        Some(FormatArg::Binary) => FeatureFormat::Binary,
        Some(FormatArg::Csv) => FeatureFormat::Csv,
        None => FeatureFormat::from_path(path),
    }
}

/// Fully resolved matching configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MatchSettings {
    pub method: &'static str,
    pub encoding: EncodingSettings,
    #[serde(rename = "match")]
    pub matching: MatchConfig,
    pub cosine_thresh: f64,
    pub cluster: ClusterConfig,
}

impl MatchSettings {
    pub fn resolve(m: &MatchArgs) -> anyhow::Result<Self> {
        let encoding = EncodingSettings::resolve(&m.encoding, m.pooling)?;
        let matching = MatchConfig {
            min_run: m.min_run,
            top_k: m.top_k,
            nms_iou: m.nms_iou,
            threshold_override: m.threshold,
        };
        let cluster = ClusterConfig {
            k: m.k,
            beta: m.beta,
            min_cluster_frames: m.min_cluster_frames,
            window: m.encoding.window,
            cosine_thresh: m.cosine_thresh,
            top_k: m.top_k,
            seed: m.seed,
            smoothing: encoding.smoothing,
            unit_pooling: RankPoolConfig {
                method: RankPoolMethod::Exact,
                ..encoding.pooling
            },
        };
        let method = match m.method {
            MethodArg::Consistency => {
                check(matching.validate())?;
                "consistency"
            }
            MethodArg::Cluster => {
                check(cluster.validate())?;
                "cluster"
            }
            MethodArg::Plain => {
                if m.top_k == 0 {
                    return Err(usage("--top-k must be at least 1"));
                }
                "plain"
            }
        };
        if let Some(t) = m.threshold {
            if !t.is_finite() {
                return Err(usage("--threshold must be finite"));
            }
        }
        Ok(Self {
            method,
            encoding,
            matching,
            cosine_thresh: m.cosine_thresh,
            cluster,
        })
    }

    /// Encoding actually used by the gram-based pipelines.
    pub fn effective_encoding(&self) -> EncodingSettings {
        if self.method == "plain" {
            self.encoding.with_stride(1)
        } else {
            self.encoding
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Sidecar written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub inputs: Vec<InputDigest>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn new<'a>(
        command: &'static str,
        config: C,
        inputs: impl IntoIterator<Item = &'a Path>,
    ) -> anyhow::Result<Self> {
        let inputs = inputs
            .into_iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<anyhow::Result<_>>()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
        })
    }
}

pub fn show_config<C: Serialize>(config: &C) -> anyhow::Result<()> {
    let mut json = serde_json::to_string_pretty(config)?;
    json.push('\n');
    crate::output::print(json.as_bytes())
}
