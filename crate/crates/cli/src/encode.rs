use actmatch_core::rankpool::encode_encodings;
use actmatch_core::{encode_segments, seqio::read_features};
use serde::Serialize;

use crate::args::EncodeCmd;
use crate::config::{feature_format, show_config, usage, EncodingSettings, RunManifest};
use crate::output::{atomic_write, write_manifest};

#[derive(Serialize)]
struct EncodeConfig {
    #[serde(flatten)]
    encoding: EncodingSettings,
    format: actmatch_core::FeatureFormat,
}

pub fn run(cmd: EncodeCmd) -> anyhow::Result<()> {
    let encoding = EncodingSettings::resolve(&cmd.encoding, cmd.method)?;
    let input = cmd.input.as_deref();
    let format = feature_format(cmd.encoding.format, input.unwrap_or("x.amf".as_ref()));
    let config = EncodeConfig { encoding, format };
    if cmd.show_config {
        return show_config(&config);
    }
    let (Some(input), Some(output)) = (input, cmd.output.as_deref()) else {
        return Err(usage("encode needs an input file and --output"));
    };

    let x = read_features::<f64>(input, format)?;
    let enc = encode_segments(&x, &encoding.segmentation, &encoding.smoothing, &encoding.pooling)?;
    let bytes = encode_encodings(&enc, x.dim())?;
    let manifest = RunManifest::new("encode", &config, [input])?;
    atomic_write(output, &bytes)?;
    write_manifest(output, &manifest)?;
    log::info!("wrote {} segments to {}", enc.len(), output.display());
    Ok(())
}
