use clap::Args;
use lingam_spp::{generate, GenParams};
use serde::{Deserialize, Serialize};

use crate::opts::resolve;
use crate::output::{csv_bytes, Run};
use crate::Context;

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Probability that a possible edge is dropped.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<f64>,
    /// Number of latent confounders.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confounders: Option<usize>,
    /// Chance that a variable loads on a confounder beyond the two forced children.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confoundedness: Option<f64>,
    /// Confounders are scaled by 10^strength.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    /// "standard12" or one shape name such as "laplace".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GenArgs {
    fn params(&self) -> GenParams {
        let mut g = GenParams::new(self.p.unwrap_or(5), self.n.unwrap_or(1000), self.seed.unwrap_or(0));
        g.sparsity = self.sparsity.unwrap_or(g.sparsity);
        g.n_confounders = self.confounders.unwrap_or(0);
        g.confoundedness = self.confoundedness.unwrap_or(g.confoundedness);
        g.confounding_strength_exp = self.strength.unwrap_or(g.confounding_strength_exp);
        if let Some(f) = &self.noise {
            g.noise_family = f.clone();
        }
        g
    }
}

pub fn run(ctx: &Context, args: GenArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let params = args.params();
    params.validate()?;
    let mut run = Run::new(&ctx.out, "gen", &params)?;
    let (data, truth) = generate(&params)?;
    run.write("data.csv", &csv_bytes(&data)?)?;
    run.write_json("truth.json", &truth)?;
    run.finish()
}
