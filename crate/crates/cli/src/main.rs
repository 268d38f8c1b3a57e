use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use schedrisk::{analyze, write_artifacts, AnalyzeError, Format, RunConfig};
use schedrisk_core::metrics::DEFAULT_TIE_EPS;
use schedrisk_core::simulation::{DEFAULT_REPLICATIONS, DEFAULT_SEED};
use schedrisk_core::{
    parse_project_unchecked, Determinize, MetricSelection, Scaling, SuccessorCount,
};

#[derive(Parser)]
#[command(
    name = "schedrisk",
    version,
    about = "Schedule risk analysis for activity networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a project and write sensitivity metrics and risk baselines.
    Analyze(AnalyzeArgs),
    /// Check a project file and report every problem found.
    Validate { input: PathBuf },
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
    replications: usize,
    #[arg(long, env = "SCHEDRISK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Control-grid step; defaults to 1/40 of the planned duration.
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long, default_value = "proportional-sigma")]
    scaling: Scaling,
    /// Comma-separated subset of ci,cri,si,ssi,moi,ari, or `all`.
    #[arg(long, default_value = "all")]
    metrics: MetricSelection,
    #[arg(long, default_value_t = DEFAULT_TIE_EPS)]
    tie_eps: f64,
    #[arg(long, default_value = "immediate")]
    moi_successors: SuccessorCount,
    #[arg(long, value_enum, default_value = "mean")]
    determinize_with: DeterminizeArg,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long, default_value = "schedrisk-out")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DeterminizeArg {
    Mean,
    Mode,
}

impl From<DeterminizeArg> for Determinize {
    fn from(d: DeterminizeArg) -> Self {
        match d {
            DeterminizeArg::Mean => Determinize::Mean,
            DeterminizeArg::Mode => Determinize::Mode,
        }
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), AnalyzeError> {
    let config = RunConfig {
        input: args.input,
        replications: args.replications,
        seed: args.seed,
        grid_step: args.grid_step,
        scaling: args.scaling,
        metrics: args.metrics,
        tie_eps: args.tie_eps,
        moi_successors: args.moi_successors,
        determinize_with: args.determinize_with.into(),
        format: args.format,
        out: args.out,
    };
    let run = || -> Result<(), AnalyzeError> {
        let (_, artifacts) = analyze(&config)?;
        write_artifacts(&config.out, &artifacts)
    };
    match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| AnalyzeError::Computation(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn run_validate(input: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", input.display());
            return ExitCode::from(1);
        }
    };
    let net = match parse_project_unchecked(&text) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("{}: {e}", input.display());
            return ExitCode::from(1);
        }
    };
    let report = net.validate();
    if report.is_empty() {
        println!("{}: ok ({} activities)", input.display(), net.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: {report}", input.display());
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => match run_analyze(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Validate { input } => run_validate(input),
    }
}
