use std::path::PathBuf;

use clap::Args;
use lingam_spp::metrics::tiers_to_forbidden;
use lingam_spp::{
    direct_lingam_order, edge_report, estimate_adjacency, expand_prior, shortest_path_order, EdgeConstraints,
    EdgeReport, KRule, MeasureConfig, PriorKnowledge,
};
use serde::{Deserialize, Serialize};

use crate::opts::{is_false, parse_named, read_json, resolve, MethodName};
use crate::output::Run;
use crate::{Context, Invalid};

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscoverArgs {
    /// Input CSV with a header row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodName>,
    /// Neighbour rule for spp-knn: sqrt-n, fraction5 or fraction10.
    #[arg(long, value_parser = parse_named::<KRule>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_rule: Option<KRule>,
    /// JSON list of index sequences, each one a known partial order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<PathBuf>,
    /// Also estimate the weighted adjacency matrix.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub adjacency: bool,
    /// JSON {"required": [[c, e], ...], "forbidden": [...]} scored against the adjacency.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<PathBuf>,
    /// JSON list of tiers; edges from a later tier to an earlier one are forbidden.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tiers: Option<PathBuf>,
    /// Include wall-clock runtime (makes the output nondeterministic).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub timings: bool,
}

#[derive(Debug, Serialize)]
struct DiscoverResult {
    method: &'static str,
    order: Vec<usize>,
    names: Vec<String>,
    total_cost: f64,
    step_costs: Vec<f64>,
    edges_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_hat: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_report: Option<EdgeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

pub fn run(ctx: &Context, args: DiscoverArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let input = args.input.clone().ok_or_else(|| Invalid("an input CSV is required".into()))?;
    let mut run = Run::new(&ctx.out, "discover", &args)?;
    let data = run.read_csv(&input)?;

    let prior = match &args.prior {
        None => PriorKnowledge::none(),
        Some(path) => {
            run.read_input(path)?;
            expand_prior(&read_json::<Vec<Vec<usize>>>(path, "prior")?)?
        }
    };
    let mut constraints: Option<EdgeConstraints> = None;
    if let Some(path) = &args.constraints {
        run.read_input(path)?;
        constraints = Some(read_json(path, "constraints")?);
    }
    if let Some(path) = &args.tiers {
        run.read_input(path)?;
        let forbidden = tiers_to_forbidden(&read_json::<Vec<Vec<usize>>>(path, "tiers")?)?;
        constraints = Some(match constraints {
            Some(c) => c.merge(&forbidden)?,
            None => forbidden,
        });
    }

    let method = args.method.unwrap_or(MethodName::SppPlr);
    let result = match method {
        MethodName::SppPlr => shortest_path_order(&data, &MeasureConfig::plr(), &prior)?,
        MethodName::DirectPlr => direct_lingam_order(&data, &MeasureConfig::plr(), &prior)?,
        MethodName::SppKnn => {
            shortest_path_order(&data, &MeasureConfig::knn(args.k_rule.unwrap_or_default()), &prior)?
        }
    };
    let dag = if args.adjacency || constraints.is_some() {
        Some(estimate_adjacency(&data, &result.order)?)
    } else {
        None
    };
    let out = DiscoverResult {
        method: MethodName::of(method.method()),
        names: result.order.order.iter().map(|&i| data.names()[i].clone()).collect(),
        order: result.order.order.clone(),
        total_cost: result.order.total_cost,
        step_costs: result.order.step_costs.clone(),
        edges_evaluated: result.edges_evaluated,
        b_hat: dag.as_ref().map(|d| d.b_hat.clone()),
        edges: dag.as_ref().map(|d| d.edges.iter().map(|&(c, e)| [c, e]).collect()),
        edge_report: dag.as_ref().zip(constraints.as_ref()).map(|(d, c)| edge_report(d, c)),
        runtime_ms: args.timings.then_some(result.wall_time.as_secs_f64() * 1e3),
    };
    run.write_json("result.json", &out)?;
    run.finish()
}
