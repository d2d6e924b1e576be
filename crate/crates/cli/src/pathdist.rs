use std::path::PathBuf;

use clap::Args;
use lingam_spp::pathdist::{
    enumerate_paths_capped, moment_features_with_epsilon, sample_paths, DEFAULT_ENUMERATION_CAP, DEFAULT_LOG_EPSILON,
};
use lingam_spp::{KRule, MeasureConfig};
use serde::{Deserialize, Serialize};

use crate::opts::{parse_named, resolve, MeasureName, ModeName};
use crate::output::Run;
use crate::{Context, Invalid};

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathArgs {
    /// Input CSV with a header row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    /// Paths drawn in sample mode.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureName>,
    #[arg(long, value_parser = parse_named::<KRule>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_rule: Option<KRule>,
    /// Largest p enumerated exhaustively.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Offset added before taking logs of path lengths.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

pub fn run(ctx: &Context, args: PathArgs, with_lengths: bool) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let input = args.input.clone().ok_or_else(|| Invalid("an input CSV is required".into()))?;
    let name = if with_lengths { "pathdist" } else { "features" };
    let mut run = Run::new(&ctx.out, name, &args)?;
    let data = run.read_csv(&input)?;
    let measure = match args.measure.unwrap_or(MeasureName::Plr) {
        MeasureName::Plr => MeasureConfig::plr(),
        MeasureName::Knn => MeasureConfig::knn(args.k_rule.unwrap_or_default()),
    };
    let dist = match args.mode.unwrap_or(ModeName::Exhaustive) {
        ModeName::Exhaustive => enumerate_paths_capped(&data, &measure, args.cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?,
        ModeName::Sample => sample_paths(&data, &measure, args.samples.unwrap_or(1000), args.seed.unwrap_or(0))?,
    };
    let features = moment_features_with_epsilon(&dist, args.epsilon.unwrap_or(DEFAULT_LOG_EPSILON))?;
    if with_lengths {
        run.write_json("pathdist.json", &dist)?;
    }
    run.write_json("features.json", &features)?;
    run.finish()
}
