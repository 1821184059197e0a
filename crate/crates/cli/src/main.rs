//! `dlgn` command-line interface.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the dataset root directory.
pub const DATA_ROOT_VAR: &str = "DLGN_DATA_ROOT";

#[derive(Parser)]
#[command(name = "dlgn", version, about = "Train, verify and deploy deep logic gate networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run per seed; writes metrics CSVs, checkpoints and a summary.
    Train(TrainArgs),
    /// Run the property suite.
    Verify {
        /// Corrupt the codebook before checking it.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
    },
    /// Snap a checkpoint to a netlist.
    Export {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a netlist with the bit-packed evaluator.
    RunCircuit {
        #[arg(long)]
        netlist: PathBuf,
        /// Dataset spec, resolved against the dataset root.
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum, default_value_t = Split::Test)]
        split: Split,
        /// Also report the discretization gap against this checkpoint's training forward.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Write `sample_index,predicted_class` rows here.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Print diagnostics for a checkpoint.
    Diagnose {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Dataset spec; defaults to the one stored in the checkpoint.
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Train a grid over one axis and write `sweep.csv`.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Coverage, coherence and bias of backward bases.
    BasisMetrics {
        /// Basis specs such as `walsh`, `smoothed:0.2`, `affine:-1:2`.
        #[arg(value_delimiter = ',', default_values_t = ["canonical".to_string(), "walsh".to_string(), "smoothed:0.2".to_string()])]
        bases: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    SignFlip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Split {
    Train,
    Test,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Depth,
    Width,
    Tau,
}

impl Axis {
    fn key(self) -> &'static str {
        match self {
            Axis::Depth => "depth",
            Axis::Width => "width",
            Axis::Tau => "tau",
        }
    }
}

#[derive(Args, Clone, Default)]
struct TrainArgs {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long = "L", alias = "depth")]
    depth: Option<usize>,
    #[arg(long = "k", alias = "width")]
    width: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    init_sigma: Option<f64>,
    #[arg(long)]
    wiring: Option<String>,
    #[arg(long)]
    wiring_seed: Option<u64>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    eval_every: Option<u64>,
    #[arg(long)]
    lr: Option<f64>,
    /// Comma-separated run seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    ste_basis: Option<String>,
    /// Use the thread pool for batch rows.
    #[arg(long)]
    parallel: bool,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Continue a run from its checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
}

/// Failure caused by bad user input; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Train(args) => commands::train(&args),
        Command::Verify { inject_fault } => commands::verify(inject_fault.is_some()),
        Command::Export { checkpoint, out } => commands::export(&checkpoint, &out),
        Command::RunCircuit {
            netlist,
            dataset,
            split,
            checkpoint,
            predictions,
        } => commands::run_circuit(&netlist, &dataset, split == Split::Train, checkpoint.as_deref(), predictions.as_deref()),
        Command::Diagnose { checkpoint, dataset } => commands::diagnose(&checkpoint, dataset.as_deref()),
        Command::Sweep { axis, values, train } => commands::sweep(axis.key(), &values, &train),
        Command::BasisMetrics { bases } => commands::basis_metrics(&bases),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
