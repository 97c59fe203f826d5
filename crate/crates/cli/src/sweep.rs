use std::fmt::Write as _;
use std::path::PathBuf;

use actmatch_core::seqio::read_annotations;
use actmatch_core::Detection;
use serde::Serialize;

use crate::args::{MatchArgs, SweepCmd, SweepParam};
use crate::config::{show_config, usage, MatchSettings, RunManifest};
use crate::dataset::{read_pairs, ANNOTATIONS_FILE, PAIRS_FILE};
use crate::evaluate::score;
use crate::matching::{dataset_jobs, Matcher};
use crate::output::emit;

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::Window => "window",
        SweepParam::TopK => "top_k",
        SweepParam::MinRun => "L",
    }
}

fn with_value(base: &MatchArgs, p: SweepParam, v: usize) -> MatchArgs {
    let mut m = base.clone();
    match p {
        SweepParam::Window => m.encoding.window = v,
        SweepParam::TopK => m.top_k = v,
        SweepParam::MinRun => m.min_run = v,
    }
    m
}

#[derive(Serialize)]
struct SweepConfig<'a> {
    param: &'static str,
    values: &'a [usize],
    iou: f64,
    base: MatchSettings,
}

pub fn run(cmd: SweepCmd) -> anyhow::Result<()> {
    let base = MatchSettings::resolve(&cmd.matching)?;
    let param = cmd.param.unwrap_or(SweepParam::TopK);
    let config = SweepConfig {
        param: param_name(param),
        values: &cmd.values,
        iou: cmd.iou,
        base,
    };
    if cmd.show_config {
        return show_config(&config);
    }
    let Some(dir) = cmd.dataset.as_deref() else {
        return Err(usage("sweep needs --dataset"));
    };
    if cmd.values.is_empty() {
        return Err(usage("sweep needs at least one value in --values"));
    }
    if !(cmd.iou > 0.0 && cmd.iou <= 1.0) {
        return Err(usage(format!("--iou {} must lie in (0, 1]", cmd.iou)));
    }
    // validate every point before doing any work
    let settings: Vec<MatchSettings> = cmd
        .values
        .iter()
        .map(|&v| MatchSettings::resolve(&with_value(&cmd.matching, param, v)))
        .collect::<anyhow::Result<_>>()?;

    let ann_path = cmd.annotations.clone().unwrap_or_else(|| dir.join(ANNOTATIONS_FILE));
    let pairs_path = cmd.pairs.clone().unwrap_or_else(|| dir.join(PAIRS_FILE));
    let annotations = read_annotations(&ann_path)?;
    let pairs = read_pairs(&pairs_path)?;
    let jobs = dataset_jobs(dir, &[], &pairs)?;

    let mut csv = String::from("param,value,precision,recall,f1\n");
    for (&v, s) in cmd.values.iter().zip(settings) {
        let matcher = Matcher::new(&cmd.matching, s)?;
        let per_pair = matcher.run_all(&jobs, |j| matcher.match_job(j))?;
        let detections: Vec<Detection> = per_pair.iter().flatten().map(Detection::from).collect();
        let r = score(&detections, &annotations, Some(&pairs), cmd.iou)?.overall;
        let _ = writeln!(
            csv,
            "{},{v},{:.4},{:.4},{:.4}",
            config.param, r.precision, r.recall, r.f1
        );
        log::info!(
            "{}={v}: P {:.1} R {:.1} F1 {:.1}",
            config.param,
            r.precision,
            r.recall,
            r.f1
        );
    }

    let mut inputs: Vec<PathBuf> = vec![ann_path, pairs_path];
    for j in &jobs {
        for (a, b) in &j.streams {
            for p in [a, b] {
                if !inputs.contains(p) {
                    inputs.push(p.clone());
                }
            }
        }
    }
    let manifest = RunManifest::new("sweep", &config, inputs.iter().map(PathBuf::as_path))?;
    emit(cmd.output.as_deref(), csv.as_bytes(), &manifest)
}
