use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use actmatch_core::seqio::read_annotations;
use actmatch_core::{aggregate, evaluate, gt_pairs, Annotation, CandidatePair, Detection, EvalReport};
use anyhow::Context;
use serde::Serialize;

use crate::args::EvalCmd;
use crate::config::{show_config, usage, RunManifest};
use crate::dataset::read_pairs;
use crate::output::{emit, print};

#[derive(Debug, Serialize)]
pub struct PairReport {
    pub video_a: String,
    pub video_b: String,
    #[serde(flatten)]
    pub report: EvalReport,
}

#[derive(Debug, Serialize)]
pub struct FullReport {
    pub iou: f64,
    /// Pairs without ground truth, or with a single action unit in total, are skipped.
    pub skip_rule: &'static str,
    pub n_pairs: usize,
    pub n_skipped: usize,
    pub overall: EvalReport,
    pub pairs: Vec<PairReport>,
}

pub fn read_detections(path: &Path) -> anyhow::Result<Vec<Detection>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading detections {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).with_context(|| format!("{}:{}: bad detection", path.display(), n + 1)))
        .collect()
}

/// Scores each pair and pools them. Pairs come from `pairs` when given,
/// otherwise from the detections in first-seen order.
pub fn score(
    detections: &[Detection],
    annotations: &[Annotation],
    pairs: Option<&[(String, String)]>,
    iou: f64,
) -> anyhow::Result<FullReport> {
    let mut by_pair: BTreeMap<(&str, &str), Vec<CandidatePair>> = BTreeMap::new();
    let mut seen: Vec<(String, String)> = Vec::new();
    for d in detections {
        let key = (d.video_a.as_str(), d.video_b.as_str());
        if !by_pair.contains_key(&key) {
            seen.push((d.video_a.clone(), d.video_b.clone()));
        }
        by_pair.entry(key).or_default().push(CandidatePair::from(d));
    }
    let pairs = pairs.unwrap_or(&seen);
    let of = |id: &str| {
        annotations
            .iter()
            .filter(|a| a.video_id == id)
            .cloned()
            .collect::<Vec<_>>()
    };

    let reports: Vec<PairReport> = pairs
        .iter()
        .map(|(a, b)| {
            let gt = gt_pairs(&of(a), &of(b));
            let cands = by_pair.get(&(a.as_str(), b.as_str())).map_or(&[][..], Vec::as_slice);
            let mut report = evaluate(cands, &gt.pairs, iou);
            report.skipped |= gt.skip;
            if report.skipped {
                report.recall = 0.0;
            }
            PairReport {
                video_a: a.clone(),
                video_b: b.clone(),
                report,
            }
        })
        .collect();
    let plain: Vec<EvalReport> = reports.iter().map(|r| r.report.clone()).collect();
    let overall = aggregate(&plain)?;
    Ok(FullReport {
        iou,
        skip_rule: "per-pair",
        n_pairs: reports.len(),
        n_skipped: plain.iter().filter(|r| r.skipped).count(),
        overall,
        pairs: reports,
    })
}

/// Human-readable summary, rates to one decimal.
pub fn table(r: &FullReport, per_label: bool) -> String {
    let o = &r.overall;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "pairs {} (skipped {}), candidates {}, gt pairs {}, correct {}",
        r.n_pairs, r.n_skipped, o.n_candidates, o.n_gt_pairs, o.n_correct
    );
    let _ = writeln!(s, "{:>9} {:>9} {:>9}", "P", "R", "F1");
    let _ = writeln!(s, "{:>9.1} {:>9.1} {:>9.1}", o.precision, o.recall, o.f1);
    if per_label {
        let _ = writeln!(s, "{:<20} {:>9} {:>9} {:>9}", "label", "gt", "correct", "R");
        for (label, lr) in &o.per_label {
            let rec = if lr.gt_pairs > 0 {
                100.0 * lr.correct as f64 / lr.gt_pairs as f64
            } else {
                0.0
            };
            let _ = writeln!(s, "{label:<20} {:>9} {:>9} {rec:>9.1}", lr.gt_pairs, lr.correct);
        }
    }
    s
}

#[derive(Serialize)]
struct EvalConfig {
    iou: f64,
    per_label: bool,
}

pub fn run(cmd: EvalCmd) -> anyhow::Result<()> {
    let config = EvalConfig {
        iou: cmd.iou,
        per_label: cmd.per_label,
    };
    if !(cmd.iou > 0.0 && cmd.iou <= 1.0) {
        return Err(usage(format!("--iou {} must lie in (0, 1]", cmd.iou)));
    }
    if cmd.show_config {
        return show_config(&config);
    }
    let (Some(det_path), Some(ann_path)) = (cmd.detections.as_deref(), cmd.annotations.as_deref()) else {
        return Err(usage("eval needs --detections and --annotations"));
    };
    let detections = read_detections(det_path)?;
    let annotations = read_annotations(ann_path)?;
    let pairs = cmd.pairs.as_deref().map(read_pairs).transpose()?;
    let mut report = score(&detections, &annotations, pairs.as_deref(), cmd.iou)?;
    if !cmd.per_label {
        report.overall.per_label.clear();
        report.pairs.iter_mut().for_each(|p| p.report.per_label.clear());
    }

    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    if let Some(out) = cmd.output.as_deref() {
        let mut inputs = vec![det_path, ann_path];
        inputs.extend(cmd.pairs.as_deref());
        emit(Some(out), json.as_bytes(), &RunManifest::new("eval", &config, inputs)?)?;
    }
    if cmd.json {
        print(json.as_bytes())
    } else {
        print(table(&report, cmd.per_label).as_bytes())
    }
}
