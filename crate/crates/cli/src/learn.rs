use std::path::{Path, PathBuf};

use clap::Args;
use lingam_spp::predict::{build_training_set, default_k, FeatureMeta, PathSampling, TrainingConfig};
use lingam_spp::{roc_summary, Error, KnnModel, LabeledFeatures, Target};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::opts::{parse_named, resolve, ModeName};
use crate::output::Run;
use crate::{Context, Invalid};

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainArgs {
    /// Labelled rows (JSONL) to fit on instead of simulating.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<PathBuf>,
    /// CONFOUNDER, SPARSITY_GT_HALF, SPARSITY_VALUE, SPP_EXACT, DIRECT_EXACT, SPP_EO or DIRECT_EO.
    #[arg(long, value_parser = parse_named::<Target>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    /// Feature counts simulated, comma separated.
    #[arg(long = "p", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<usize>>,
    /// Datasets per feature count.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Samples per dataset.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// features.json, or JSONL of feature or labelled rows.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<PathBuf>,
    /// Neighbours; defaults to ceil(sqrt(training rows)).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Labelled test rows (JSONL); simulated from the grid flags when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Feature counts simulated for testing (default 7).
    #[arg(long = "p", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Seed of the simulated test set (default 1, apart from train's 0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn grid(
    p_values: &Option<Vec<usize>>,
    default_p: &[usize],
    trials: Option<usize>,
    n: Option<usize>,
    seed: u64,
    mode: Option<ModeName>,
    samples: Option<usize>,
) -> TrainingConfig {
    let base = TrainingConfig::default();
    TrainingConfig {
        p_values: p_values.clone().unwrap_or_else(|| default_p.to_vec()),
        trials_per_p: trials.unwrap_or(base.trials_per_p),
        n_samples: n.unwrap_or(base.n_samples),
        seed,
        paths: match mode.unwrap_or(ModeName::Exhaustive) {
            ModeName::Exhaustive => PathSampling::Exhaustive,
            ModeName::Sample => PathSampling::Sampled { samples: samples.unwrap_or(1000) },
        },
        ..base
    }
}

fn read_rows(run: &mut Run, path: &Path) -> anyhow::Result<Vec<Value>> {
    let bytes = run.read_input(path)?;
    serde_json::Deserializer::from_slice(&bytes)
        .into_iter::<Value>()
        .collect::<Result<_, _>>()
        .map_err(|e| Invalid(format!("{}: {e}", path.display())).into())
}

fn labelled(run: &mut Run, path: &Path, target: Target) -> anyhow::Result<Vec<LabeledFeatures>> {
    let rows = read_rows(run, path)?
        .into_iter()
        .map(serde_json::from_value::<LabeledFeatures>)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    Ok(rows.into_iter().filter(|r| r.meta.target == target).collect())
}

fn load_model(run: &mut Run, path: Option<&PathBuf>) -> anyhow::Result<KnnModel> {
    let path = path.ok_or_else(|| Invalid("--model is required".into()))?;
    let bytes = run.read_input(path)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::EmptyTrainingSet.into());
    }
    let model: KnnModel = serde_json::from_slice(&bytes).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    if model.is_empty() {
        return Err(Error::EmptyTrainingSet.into());
    }
    Ok(model)
}

fn model_target(model: &KnnModel) -> Target {
    model.train[0].meta.target
}

fn check_width(model: &KnnModel, features: &[f64]) -> anyhow::Result<()> {
    if features.len() != model.feature_mean.len() {
        return Err(Invalid(format!(
            "feature row has {} values, model expects {}",
            features.len(),
            model.feature_mean.len()
        ))
        .into());
    }
    Ok(())
}

fn score(model: &KnnModel, target: Target, features: &[f64], k: usize) -> anyhow::Result<f64> {
    check_width(model, features)?;
    Ok(if target.is_binary() { model.classify(features, k)? } else { model.regress(features, k)? })
}

pub fn train(ctx: &Context, args: TrainArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let target = args.target.unwrap_or(Target::Confounder);
    let mut run = Run::new(&ctx.out, "train", &args)?;
    let rows = match &args.from {
        Some(path) => labelled(&mut run, path, target)?,
        None => {
            let cfg = grid(&args.p_values, &[4, 5, 6], args.trials, args.n, args.seed.unwrap_or(0), args.mode, args.samples);
            build_training_set(target, &cfg)
        }
    };
    let model = KnnModel::fit(rows)?;
    run.write_jsonl("training.jsonl", &model.train)?;
    run.write_json("model.json", &model)?;
    run.finish()
}

#[derive(Debug, Serialize)]
struct Predictions {
    target: Target,
    k: usize,
    scores: Vec<f64>,
}

pub fn predict(ctx: &Context, args: PredictArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let mut run = Run::new(&ctx.out, "predict", &args)?;
    let model = load_model(&mut run, args.model.as_ref())?;
    let query = args.query.as_ref().ok_or_else(|| Invalid("--query is required".into()))?;
    let target = model_target(&model);
    let k = args.k.unwrap_or_else(|| default_k(model.len()));
    let mut scores = Vec::new();
    for row in read_rows(&mut run, query)? {
        let feats = row
            .get("features")
            .or_else(|| row.get("moments"))
            .cloned()
            .ok_or_else(|| Invalid("query rows need a 'features' or 'moments' array".into()))?;
        let feats: Vec<f64> = serde_json::from_value(feats).map_err(|e| Invalid(format!("query row: {e}")))?;
        scores.push(score(&model, target, &feats, k)?);
    }
    run.write_json("predictions.json", &Predictions { target, k, scores })?;
    run.finish()
}

pub fn eval(ctx: &Context, args: EvalArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let mut run = Run::new(&ctx.out, "eval", &args)?;
    let model = load_model(&mut run, args.model.as_ref())?;
    let target = model_target(&model);
    if !target.is_binary() {
        return Err(Invalid(format!("ROC needs a binary target, model predicts {target:?}")).into());
    }
    let rows = match &args.test {
        Some(path) => labelled(&mut run, path, target)?,
        None => {
            let cfg = grid(&args.p_values, &[7], args.trials, args.n, args.seed.unwrap_or(1), args.mode, args.samples);
            build_training_set(target, &cfg)
        }
    };
    let k = args.k.unwrap_or_else(|| default_k(model.len()));
    let mut scored = Vec::with_capacity(rows.len());
    let mut csv = String::from("p,seed,label,score\n");
    for r in &rows {
        let s = score(&model, target, &r.features, k)?;
        let FeatureMeta { p, seed, .. } = r.meta;
        csv.push_str(&format!("{p},{seed},{},{s}\n", r.label));
        scored.push((s, r.label == 1.0));
    }
    let roc = roc_summary(&scored)?;
    run.write_json("roc.json", &roc)?;
    run.write("scores.csv", csv.as_bytes())?;
    run.finish()
}
