use actmatch_core::seqio::{synth_generate, write_annotations, write_features};
use actmatch_core::{FeatureFormat, SynthConfig};
use anyhow::Context;
use serde::Serialize;

use crate::args::{FormatArg, SynthCmd};
use crate::config::{check, show_config, usage, RunManifest};
use crate::dataset::{pairs_text, ANNOTATIONS_FILE, PAIRS_FILE};
use crate::output::{atomic_with, atomic_write, write_manifest};

#[derive(Serialize)]
struct SynthRun {
    #[serde(flatten)]
    synth: SynthConfig,
    format: FeatureFormat,
}

pub fn run(cmd: SynthCmd) -> anyhow::Result<()> {
    let format = match cmd.format {
        FormatArg::Binary => FeatureFormat::Binary,
        FormatArg::Csv => FeatureFormat::Csv,
    };
    let synth = SynthConfig {
        dim: cmd.dim,
        n_pairs: cmd.n_pairs,
        frames_per_video: cmd.frames,
        planted_segments_per_video: cmd.segments,
        planted_length_range: (cmd.min_len, cmd.max_len),
        n_classes: cmd.classes,
        noise_level: cmd.noise,
        seed: cmd.seed,
    };
    check(synth.validate())?;
    let run = SynthRun { synth, format };
    if cmd.show_config {
        return show_config(&run);
    }
    let Some(dir) = cmd.output.as_deref() else {
        return Err(usage("synth needs --output"));
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let ds = synth_generate::<f32>(&run.synth)?;
    let ext = match format {
        FeatureFormat::Binary => "amf",
        FeatureFormat::Csv => "csv",
    };
    for v in &ds.videos {
        let path = dir.join(format!("{}.{ext}", v.video_id()));
        atomic_with(&path, |tmp| Ok(write_features(v, tmp, format)?))?;
    }
    let ann = dir.join(ANNOTATIONS_FILE);
    atomic_with(&ann, |tmp| Ok(write_annotations(&ds.annotations, tmp)?))?;
    let pairs = dir.join(PAIRS_FILE);
    atomic_write(&pairs, pairs_text(&ds.pairs).as_bytes())?;
    write_manifest(&dir.join("dataset"), &RunManifest::new("synth", &run, [])?)?;
    log::info!("wrote {} videos to {}", ds.videos.len(), dir.display());
    Ok(())
}
