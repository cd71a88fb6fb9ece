use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use stm::corpus::{
    load_subjectivity, prepare_tabular, prepare_text, read_labeled_text, read_tabular, split_indices,
};
use stm::{save_sparse_file, SparseDataset, Tokenizer};

use crate::error::{in_file, CliError, CliResult};
use crate::sidecar::{sidecar_path, Sidecar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// One `<label>\t<text>` document per line.
    Text,
    /// CSV with a header, 0/1 feature columns and a label column.
    Tabular,
    /// Directory holding plot.tok.gt9.5000 and quote.tok.gt9.5000.
    Subj,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Input file (directory for --format subj).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Text)]
    pub format: InputFormat,
    /// Output sparse file; the vocabulary goes to `<out>.vocab.json`.
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Keep at most this many tokens, by document frequency (text only).
    #[arg(long, default_value_t = 5_000)]
    pub vocab_size: usize,
    /// Drop tokens seen in fewer documents than this (text only).
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[arg(long)]
    pub bigrams: bool,
    /// Keep the original letter case (text only).
    #[arg(long)]
    pub keep_case: bool,
    /// Name of the label column (tabular only). Default: the last column.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Fraction of rows held out into --test-out.
    #[arg(long, default_value_t = 0.0)]
    pub test_fraction: f64,
    #[arg(long)]
    pub test_out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn run(args: &PrepareArgs) -> CliResult<()> {
    if !(0.0..1.0).contains(&args.test_fraction) {
        return Err(CliError::Usage(format!("--test-fraction {} must lie in [0, 1)", args.test_fraction)));
    }
    if args.test_fraction > 0.0 && args.test_out.is_none() {
        return Err(CliError::Usage("--test-fraction needs --test-out".into()));
    }
    if args.test_out.is_some() && args.test_fraction == 0.0 {
        return Err(CliError::Usage("--test-out needs a positive --test-fraction".into()));
    }
    let (train, test, sidecar) = match args.format {
        InputFormat::Text | InputFormat::Subj => {
            let docs = match args.format {
                InputFormat::Text => {
                    let file = in_file(File::open(&args.input), &args.input)?;
                    in_file(read_labeled_text(BufReader::new(file)), &args.input)?
                }
                _ => in_file(load_subjectivity(&args.input), &args.input)?,
            };
            let tokenizer = Tokenizer { lowercase: !args.keep_case, bigrams: args.bigrams };
            let prepared = in_file(
                prepare_text(&docs, &tokenizer, args.vocab_size, args.min_df, args.test_fraction, args.seed),
                &args.input,
            )?;
            let sidecar = Sidecar::new(&prepared.vocabulary, prepared.class_names, Some(tokenizer));
            (prepared.train, prepared.test, sidecar)
        }
        InputFormat::Tabular => {
            let file = in_file(File::open(&args.input), &args.input)?;
            let table = in_file(read_tabular(BufReader::new(file), args.label_column.as_deref()), &args.input)?;
            let (data, vocab, classes) = in_file(prepare_tabular(table), &args.input)?;
            let sidecar = Sidecar::new(&vocab, classes, None);
            let (train, test) = split(data, args.test_fraction, args.seed);
            (train, test, sidecar)
        }
    };

    save_sparse_file(&train, &args.out)?;
    sidecar.save(&sidecar_path(&args.out))?;
    eprintln!("{}: {} rows, o={}, m={}", args.out.display(), train.len(), train.feature_count(), train.class_count());
    if let (Some(test), Some(path)) = (test, &args.test_out) {
        save_sparse_file(&test, path)?;
        sidecar.save(&sidecar_path(path))?;
        eprintln!("{}: {} rows", path.display(), test.len());
    }
    Ok(())
}

fn split(data: SparseDataset, fraction: f64, seed: u64) -> (SparseDataset, Option<SparseDataset>) {
    if fraction <= 0.0 {
        return (data, None);
    }
    let (train, test) = split_indices(data.len(), fraction, seed);
    (data.subset(&train), Some(data.subset(&test)))
}
