use clap::Args;
use lingam_spp::experiment::{BenchConfig, ConfounderMode};
use lingam_spp::{run_benchmark, BenchCell, KRule};
use serde::{Deserialize, Serialize};

use crate::opts::{is_false, parse_named, resolve, MethodName};
use crate::output::Run;
use crate::Context;

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchArgs {
    /// Feature counts, comma separated.
    #[arg(long = "p", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<usize>>,
    /// Sample sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<usize>>,
    /// Datasets per cell.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodName>>,
    /// both, true or false.
    #[arg(long, value_parser = parse_named::<ConfounderMode>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confounders: Option<ConfounderMode>,
    /// Shares of the true order given as prior knowledge, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_fracs: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_named::<KRule>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_rule: Option<KRule>,
    /// Record runtimes (makes the output nondeterministic).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub timings: bool,
}

impl BenchArgs {
    fn config(&self, jobs: usize) -> BenchConfig {
        let base = BenchConfig::default();
        BenchConfig {
            p_values: self.p_values.clone().unwrap_or(base.p_values),
            n_values: self.n_values.clone().unwrap_or(base.n_values),
            trials: self.trials.unwrap_or(base.trials),
            methods: self.methods.as_ref().map_or(base.methods, |m| m.iter().map(|m| m.method()).collect()),
            with_confounders: self.confounders.unwrap_or(base.with_confounders),
            prior_fracs: self.prior_fracs.clone().unwrap_or(base.prior_fracs),
            seed: self.seed.unwrap_or(base.seed),
            parallelism: jobs,
            record_timings: self.timings,
            k_rule: self.k_rule.unwrap_or(base.k_rule),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cells_csv(cells: &[BenchCell]) -> String {
    let mut s = String::from("method,p,n,confounded,prior_frac,trials,failed,valid,mean_eo,mean_edges,mean_runtime_ms\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            MethodName::of(c.method),
            c.p,
            c.n,
            c.confounded,
            c.prior_frac,
            c.trials,
            c.failed,
            c.valid,
            opt(c.mean_eo),
            opt(c.mean_edges),
            opt(c.mean_runtime_ms)
        ));
    }
    s
}

fn print_table(cells: &[BenchCell]) {
    println!(
        "{:<11} {:>3} {:>6} {:>6} {:>6} {:>6} {:>6} {:>8} {:>8} {:>10}",
        "method", "p", "n", "conf", "prior", "trials", "failed", "E_o", "edges", "ms"
    );
    let f = |v: Option<f64>, d: usize| v.map_or("-".to_string(), |x| format!("{x:.d$}"));
    for c in cells {
        println!(
            "{:<11} {:>3} {:>6} {:>6} {:>6.2} {:>6} {:>6} {:>8} {:>8} {:>10}",
            MethodName::of(c.method),
            c.p,
            c.n,
            c.confounded,
            c.prior_frac,
            c.trials,
            c.failed,
            f(c.mean_eo, 4),
            f(c.mean_edges, 2),
            f(c.mean_runtime_ms, 2)
        );
    }
}

pub fn run(ctx: &Context, args: BenchArgs) -> anyhow::Result<()> {
    let args = resolve(ctx.config.as_deref(), &args)?;
    let config = args.config(ctx.jobs);
    config.validate()?;
    // parallelism changes scheduling, never results, so it stays out of the digest
    let mut run = Run::new(&ctx.out, "bench", &BenchConfig { parallelism: 0, ..config.clone() })?;
    let cells = run_benchmark(&config)?;
    for c in cells.iter().filter(|c| !c.valid) {
        eprintln!(
            "warning: {} p={} n={} confounded={} prior={} has {}/{} failed trials",
            MethodName::of(c.method),
            c.p,
            c.n,
            c.confounded,
            c.prior_frac,
            c.failed,
            c.trials
        );
    }
    run.write_json("cells.json", &cells)?;
    run.write("cells.csv", cells_csv(&cells).as_bytes())?;
    print_table(&cells);
    run.finish()
}
