mod commands;
mod config;
mod fixture;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fogpart_core::placement::Strategy;
use fogpart_core::simulator::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "fogpart",
    version,
    about = "Multilayer fog resource partitioning and service placement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Multilayer,
    #[value(name = "first_fit")]
    FirstFit,
    #[value(name = "connectivity_greedy")]
    ConnectivityGreedy,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Multilayer => Strategy::Multilayer,
            StrategyArg::FirstFit => Strategy::FirstFit,
            StrategyArg::ConnectivityGreedy => Strategy::ConnectivityGreedy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Reliable,
    Faulty,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Reliable => Mode::Reliable,
            ModeArg::Faulty => Mode::Faulty,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a scenario bundle from a config file.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition the infrastructure of a scenario or layered-graph fixture.
    Partition {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Unit weights on compressed-graph edges instead of feature similarity.
        #[arg(long)]
        unit_weights: bool,
        /// Drop resource-layer edges lighter than this.
        #[arg(long, default_value_t = 0.0)]
        min_weight: f64,
        /// Shuffle the Louvain sweep order with this seed.
        #[arg(long)]
        louvain_seed: Option<u64>,
    },
    /// Place every request of a scenario.
    Place {
        #[arg(long)]
        scenario: PathBuf,
        /// Output of `partition`; computed on the fly when omitted.
        #[arg(long)]
        partitions: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "multilayer")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay placement plans over time.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        plans: PathBuf,
        #[arg(long, value_enum, default_value = "reliable")]
        mode: ModeArg,
        #[arg(long, default_value_t = 2000.0)]
        horizon_s: f64,
        #[arg(long, default_value_t = 20.0)]
        failure_period_s: f64,
        /// Seed of the failure order; defaults to the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the metrics of several run directories.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FOGPART_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, seed, out } => commands::generate(&config, seed, &out),
        Command::Partition {
            scenario,
            out,
            unit_weights,
            min_weight,
            louvain_seed,
        } => commands::partition(&scenario, &out, unit_weights, min_weight, louvain_seed),
        Command::Place {
            scenario,
            partitions,
            strategy,
            alpha,
            beta,
            out,
        } => commands::place(
            &scenario,
            partitions.as_deref(),
            strategy.into(),
            alpha,
            beta,
            &out,
        ),
        Command::Simulate {
            scenario,
            plans,
            mode,
            horizon_s,
            failure_period_s,
            seed,
            out,
        } => commands::simulate(
            &scenario,
            &plans,
            mode.into(),
            horizon_s,
            failure_period_s,
            seed,
            &out,
        ),
        Command::Report { runs, out } => commands::report(&runs, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
