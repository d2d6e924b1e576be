mod bench;
mod discover;
mod gen;
mod learn;
mod opts;
mod output;
mod pathdist;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lingam_spp::Error;

#[derive(Debug, Parser)]
#[command(name = "lingam-spp", version, about = "Causal ordering by shortest paths over the subset lattice")]
struct Cli {
    /// JSON file with option values; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads for bench and train (0 = one per core).
    #[arg(long, global = true, env = "LINGAM_SPP_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a dataset and its ground truth.
    Gen(gen::GenArgs),
    /// Estimate a causal ordering (and optionally the adjacency) from a CSV.
    Discover(discover::DiscoverArgs),
    /// Path-length distribution and its moment features.
    Pathdist(pathdist::PathArgs),
    /// Moment features only.
    Features(pathdist::PathArgs),
    /// Build a labelled training set and fit a kNN model.
    Train(learn::TrainArgs),
    /// Score feature rows with a saved model.
    Predict(learn::PredictArgs),
    /// ROC summary of a saved model on a test set.
    Eval(learn::EvalArgs),
    /// Seeded Monte Carlo comparison of ordering methods.
    Bench(bench::BenchArgs),
}

/// Bad user input; exits with code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub struct Context {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(e) => match e {
            Error::CyclicPrior(..) | Error::PriorUnsatisfiable => 3,
            Error::TooManyFeatures { .. } => 4,
            Error::EmptyTrainingSet => 6,
            Error::SingleClass => 7,
            Error::ZeroVariance
            | Error::DegenerateCorrelation
            | Error::GenerationFailed(_)
            | Error::SingularDesign { .. }
            | Error::DegenerateDistribution
            | Error::DegeneratePairs => 5,
            _ => 2,
        },
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            log::warn!("worker pool: {e}");
        }
    }
    let ctx = Context { config: cli.config, out: cli.out, jobs: cli.jobs };
    let result = match cli.command {
        Command::Gen(a) => gen::run(&ctx, a),
        Command::Discover(a) => discover::run(&ctx, a),
        Command::Pathdist(a) => pathdist::run(&ctx, a, true),
        Command::Features(a) => pathdist::run(&ctx, a, false),
        Command::Train(a) => learn::train(&ctx, a),
        Command::Predict(a) => learn::predict(&ctx, a),
        Command::Eval(a) => learn::eval(&ctx, a),
        Command::Bench(a) => bench::run(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
