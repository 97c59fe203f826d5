use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "actmatch",
    version,
    about = "Unsupervised action matching across video pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode one feature file into per-segment rank pooling vectors (AME1).
    Encode(EncodeCmd),
    /// Match one video pair, or every pair of a dataset, into JSON-lines detections.
    Match(MatchCmd),
    /// Score detections against annotations.
    Eval(EvalCmd),
    /// Write a synthetic dataset with planted matching segments.
    Synth(SynthCmd),
    /// Re-run matching and evaluation for each value of one parameter.
    Sweep(SweepCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothArg {
    Tvm,
    Arma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolArg {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Binary,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Consistency,
    Cluster,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Window,
    #[value(name = "top-k")]
    TopK,
    #[value(name = "L")]
    MinRun,
}

/// Segmentation, smoothing and pooling options shared by every command that encodes.
#[derive(Debug, Clone, Args)]
pub struct EncodingArgs {
    /// Segment length l_w in frames.
    #[arg(long, default_value_t = 61)]
    pub window: usize,
    /// Step l_s between segment starts.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    /// Smoothing applied before pooling.
    #[arg(long, value_enum, default_value_t = SmoothArg::Tvm)]
    pub smooth: SmoothArg,
    /// ARMA forgetting factor; only valid with `--smooth arma` [default: 0.9].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rank pooling regularization weight C.
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Insensitive-loss margin.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Solver stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Solver iteration cap; hitting it exits with status 3.
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Feature file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct EncodeCmd {
    /// Feature file (.amf binary or .csv).
    #[arg(required_unless_present = "show_config")]
    pub input: Option<PathBuf>,
    /// Output encoding file.
    #[arg(short, long, required_unless_present = "show_config")]
    pub output: Option<PathBuf>,
    /// Pooling: exact solver or the closed-form approximation.
    #[arg(long, value_enum, default_value_t = PoolArg::Exact)]
    pub method: PoolArg,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}

/// Matching options shared by `match` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    /// Matching pipeline.
    #[arg(long, value_enum, default_value_t = MethodArg::Consistency)]
    pub method: MethodArg,
    /// Segment pooling for the consistency and plain pipelines.
    #[arg(long, value_enum, default_value_t = PoolArg::Exact)]
    pub pooling: PoolArg,
    /// Minimum matched run length L.
    #[arg(long = "L", default_value_t = 10)]
    pub min_run: usize,
    /// Candidates kept per video pair.
    #[arg(long, default_value_t = 100)]
    pub top_k: usize,
    /// Both-sides IoU above which a lower-scored candidate is suppressed.
    #[arg(long, default_value_t = 0.5)]
    pub nms_iou: f64,
    /// Fixed similarity threshold replacing mean + std of the gram matrix.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Cosine threshold of the cluster and plain pipelines.
    #[arg(long, default_value_t = 0.2)]
    pub cosine_thresh: f64,
    /// Clusters per video (cluster pipeline).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Weight of the time coordinate (cluster pipeline).
    #[arg(long, default_value_t = 0.001)]
    pub beta: f64,
    /// Cluster runs must hold more than this many window starts.
    #[arg(long, default_value_t = 60)]
    pub min_cluster_frames: usize,
    /// k-means seed (cluster pipeline).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    /// Worker threads for video pairs (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Recompute encodings instead of using the cache.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct MatchCmd {
    /// Feature file of video a (single-pair mode).
    #[arg(conflicts_with = "dataset")]
    pub video_a: Option<PathBuf>,
    /// Feature file of video b (single-pair mode).
    #[arg(requires = "video_a")]
    pub video_b: Option<PathBuf>,
    /// Extra feature stream for the pair, fused by averaging gram matrices. Repeatable.
    #[arg(long, num_args = 2, value_names = ["A", "B"], action = clap::ArgAction::Append)]
    pub fuse: Vec<PathBuf>,
    /// Dataset directory holding `<video_id>.amf|.csv` files and `pairs.txt`.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Extra dataset directory with another feature stream for the same videos. Repeatable.
    #[arg(long, requires = "dataset")]
    pub fuse_dataset: Vec<PathBuf>,
    /// Pair list (`video_a video_b` per line) [default: <dataset>/pairs.txt].
    #[arg(long, requires = "dataset")]
    pub pairs: Option<PathBuf>,
    #[command(flatten)]
    pub matching: MatchArgs,
    /// Detections output (JSON lines); stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Debug, Args)]
pub struct EvalCmd {
    /// Detections (JSON lines).
    #[arg(long, required_unless_present = "show_config")]
    pub detections: Option<PathBuf>,
    /// Ground-truth annotations (JSON lines).
    #[arg(long, required_unless_present = "show_config")]
    pub annotations: Option<PathBuf>,
    /// Pairs to score, including pairs without detections [default: pairs seen in detections].
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// IoU required on both sides for a correct detection.
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    /// Add per-label recall.
    #[arg(long)]
    pub per_label: bool,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Write the JSON report here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Debug, Args)]
pub struct SynthCmd {
    /// Output directory.
    #[arg(short, long, required_unless_present = "show_config")]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 20)]
    pub n_pairs: usize,
    #[arg(long, default_value_t = 400)]
    pub frames: usize,
    /// Planted segments per video.
    #[arg(long, default_value_t = 3)]
    pub segments: usize,
    #[arg(long, default_value_t = 60)]
    pub min_len: usize,
    #[arg(long, default_value_t = 90)]
    pub max_len: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    pub format: FormatArg,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    /// Dataset directory (as written by `synth`).
    #[arg(long, required_unless_present = "show_config")]
    pub dataset: Option<PathBuf>,
    /// Annotations [default: <dataset>/annotations.jsonl].
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Pair list [default: <dataset>/pairs.txt].
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Parameter to vary.
    #[arg(long, value_enum, required_unless_present = "show_config")]
    pub param: Option<SweepParam>,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    #[command(flatten)]
    pub matching: MatchArgs,
    /// CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}
