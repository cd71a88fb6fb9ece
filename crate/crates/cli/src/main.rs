//! `stm`: prepare data, train, evaluate, benchmark and inspect sparse
//! Tsetlin machine models.
//!
//! ```text
//! stm prepare corpus.tsv --vocab-size 5000 --test-fraction 0.1 --test-out test.sparse -o train.sparse
//! stm train train.sparse --test test.sparse -n 1000 -a 80 -t 40 -p 75 --metrics-out run.jsonl
//! stm eval model.stm test.sparse
//! stm bench corpus.tsv --vocab-sweep 2500:10000:500 --epochs 100 -o sweep.csv
//! stm inspect model.stm --rules 10
//! ```
//!
//! Exit status: 0 success, 2 usage or validation error, 3 data error,
//! 4 internal invariant violation.

mod bench;
mod error;
mod eval;
mod hyper;
mod inspect;
mod prepare;
mod sidecar;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "stm", version, about = "Sparse Tsetlin machine toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vectorise a text or tabular file into the sparse format.
    Prepare(prepare::PrepareArgs),
    /// Train a model, optionally scoring a test set after every epoch.
    Train(train::TrainArgs),
    /// Accuracy and confusion matrix of a model on labelled data.
    Eval(eval::EvalArgs),
    /// Epoch time and accuracy across a sweep of vocabulary sizes.
    Bench(bench::BenchArgs),
    /// Summary, rules, memory and active literal occupancy of a model.
    Inspect(inspect::InspectArgs),
}

fn threads(command: &Command) -> usize {
    match command {
        Command::Train(a) => a.hyper.threads,
        Command::Bench(a) => a.hyper.threads,
        _ => 1,
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let k = threads(&cli.command);
    if k == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    match &cli.command {
        Command::Prepare(a) => prepare::run(a),
        Command::Train(a) => train::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Inspect(a) => inspect::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stm: {e}");
            e.exit_code()
        }
    }
}
