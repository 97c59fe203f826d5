use std::path::{Path, PathBuf};

use actmatch_core::baselines::{cluster_match, plain_match_gram};
use actmatch_core::matcher::rank_order;
use actmatch_core::seqio::read_features;
use actmatch_core::{gram_matrix, match_gram, CandidatePair, Detection, GramMatrix};
use rayon::prelude::*;

use crate::args::{FormatArg, MatchArgs, MatchCmd};
use crate::cache::EncodingCache;
use crate::config::{feature_format, show_config, usage, MatchSettings, RunManifest};
use crate::dataset::{find_video, read_pairs, video_id, PAIRS_FILE};
use crate::output::emit;

/// One video pair with one `(a, b)` file pair per feature stream.
#[derive(Debug, Clone)]
pub struct PairJob {
    pub streams: Vec<(PathBuf, PathBuf)>,
}

/// Jobs for every listed pair of a dataset directory and its fused siblings.
pub fn dataset_jobs(dir: &Path, fuse: &[PathBuf], pairs: &[(String, String)]) -> anyhow::Result<Vec<PairJob>> {
    pairs
        .iter()
        .map(|(a, b)| {
            let streams = std::iter::once(dir)
                .chain(fuse.iter().map(PathBuf::as_path))
                .map(|d| Ok((find_video(d, a)?, find_video(d, b)?)))
                .collect::<anyhow::Result<_>>()?;
            Ok(PairJob { streams })
        })
        .collect()
}

pub struct Matcher {
    pub settings: MatchSettings,
    pub format: Option<FormatArg>,
    pub cache: EncodingCache,
    pool: rayon::ThreadPool,
}

impl Matcher {
    pub fn new(args: &MatchArgs, settings: MatchSettings) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
        Ok(Self {
            settings,
            format: args.encoding.format,
            cache: EncodingCache::new(!args.no_cache),
            pool,
        })
    }

    pub fn check_jobs(&self, jobs: &[PairJob]) -> anyhow::Result<()> {
        if self.settings.method == "cluster" && jobs.iter().any(|j| j.streams.len() > 1) {
            return Err(usage("fusing feature streams is not supported by the cluster method"));
        }
        Ok(())
    }

    /// Gram matrix of one pair, averaged over its feature streams.
    pub fn gram(&self, job: &PairJob) -> anyhow::Result<GramMatrix<f64>> {
        let enc = self.settings.effective_encoding();
        let grams = job
            .streams
            .iter()
            .map(|(pa, pb)| {
                let wa = self.cache.encode(pa, feature_format(self.format, pa), &enc)?;
                let wb = self.cache.encode(pb, feature_format(self.format, pb), &enc)?;
                Ok(gram_matrix(&wa, &wb)?.with_ids(video_id(pa), video_id(pb)))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(GramMatrix::average(&grams)?)
    }

    pub fn match_job(&self, job: &PairJob) -> anyhow::Result<Vec<CandidatePair>> {
        let s = &self.settings;
        match s.method {
            "cluster" => {
                let (pa, pb) = &job.streams[0];
                let xa = read_features::<f64>(pa, feature_format(self.format, pa))?;
                let xb = read_features::<f64>(pb, feature_format(self.format, pb))?;
                Ok(cluster_match(&xa, &xb, &s.cluster)?)
            }
            "plain" => Ok(plain_match_gram(&self.gram(job)?, s.cosine_thresh, s.matching.top_k)),
            _ => Ok(match_gram(&self.gram(job)?, &s.matching)?),
        }
    }

    /// Per-job results in job order, computed on the worker pool.
    pub fn run_all<R: Send>(
        &self,
        jobs: &[PairJob],
        f: impl Fn(&PairJob) -> anyhow::Result<R> + Sync,
    ) -> anyhow::Result<Vec<R>> {
        self.pool.install(|| jobs.par_iter().map(&f).collect())
    }
}

/// Detections of all pairs: stable sort by score, so ties keep pair order.
pub fn detections_jsonl(per_pair: Vec<Vec<CandidatePair>>) -> anyhow::Result<String> {
    let mut all: Vec<CandidatePair> = per_pair.into_iter().flatten().collect();
    all.sort_by(rank_order);
    let mut out = String::new();
    for c in &all {
        out.push_str(&serde_json::to_string(&Detection::from(c))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn run(cmd: MatchCmd) -> anyhow::Result<()> {
    let settings = MatchSettings::resolve(&cmd.matching)?;
    if cmd.show_config {
        return show_config(&settings);
    }
    let (jobs, extra_inputs) = match (&cmd.dataset, &cmd.video_a, &cmd.video_b) {
        (Some(dir), None, None) => {
            if !cmd.fuse.is_empty() {
                return Err(usage("use --fuse-dataset with --dataset"));
            }
            let pairs_path = cmd.pairs.clone().unwrap_or_else(|| dir.join(PAIRS_FILE));
            let pairs = read_pairs(&pairs_path)?;
            (dataset_jobs(dir, &cmd.fuse_dataset, &pairs)?, vec![pairs_path])
        }
        (None, Some(a), Some(b)) => {
            let mut streams = vec![(a.clone(), b.clone())];
            streams.extend(cmd.fuse.chunks_exact(2).map(|p| (p[0].clone(), p[1].clone())));
            (vec![PairJob { streams }], Vec::new())
        }
        _ => return Err(usage("match needs either two feature files or --dataset")),
    };
    let matcher = Matcher::new(&cmd.matching, settings)?;
    matcher.check_jobs(&jobs)?;
    let results = matcher.run_all(&jobs, |j| matcher.match_job(j))?;
    let text = detections_jsonl(results)?;

    let mut inputs: Vec<&Path> = extra_inputs.iter().map(PathBuf::as_path).collect();
    for job in &jobs {
        for (a, b) in &job.streams {
            for p in [a.as_path(), b.as_path()] {
                if !inputs.contains(&p) {
                    inputs.push(p);
                }
            }
        }
    }
    let manifest = RunManifest::new("match", &settings, inputs)?;
    emit(cmd.output.as_deref(), text.as_bytes(), &manifest)
}
