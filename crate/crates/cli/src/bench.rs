use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::Args;
use stm::bench::{vocab_sweep, BenchRow, VocabSweep};
use stm::corpus::{index_labels, load_subjectivity, read_labeled_text, split_indices};
use stm::Tokenizer;

use crate::error::{in_file, CliError, CliResult};
use crate::hyper::HyperArgs;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `<label>\t<text>` corpus, or a subjectivity corpus directory.
    pub corpus: PathBuf,
    /// Vocabulary sizes as start:end:step.
    #[arg(long, default_value = "2500:10000:500")]
    pub vocab_sweep: String,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Held-out fraction used for the accuracy column (0 scores on training data).
    #[arg(long, default_value_t = 0.1)]
    pub test_fraction: f64,
    #[arg(long)]
    pub bigrams: bool,
    /// CSV output. Default: stdout.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let sweep: VocabSweep = args.vocab_sweep.parse().map_err(|e: stm::StmError| CliError::Usage(e.to_string()))?;
    let cfg = args.hyper.config(args.epochs);
    cfg.validate()?;
    if !(0.0..1.0).contains(&args.test_fraction) {
        return Err(CliError::Usage(format!("--test-fraction {} must lie in [0, 1)", args.test_fraction)));
    }

    let docs = if args.corpus.is_dir() {
        in_file(load_subjectivity(&args.corpus), &args.corpus)?
    } else {
        let file = in_file(File::open(&args.corpus), &args.corpus)?;
        in_file(read_labeled_text(BufReader::new(file)), &args.corpus)?
    };
    if docs.is_empty() {
        return Err(CliError::Data(format!("{}: no documents", args.corpus.display())));
    }
    let tok = Tokenizer { bigrams: args.bigrams, ..Tokenizer::default() };
    let (labels, classes) = index_labels(&docs.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>());
    let encoded: Vec<(u32, Vec<String>)> =
        docs.iter().zip(&labels).map(|((_, text), &y)| (y, tok.tokenize(text))).collect();
    let (train_idx, test_idx) = split_indices(encoded.len(), args.test_fraction, cfg.seed);
    let pick = |idx: &[usize]| -> Vec<(u32, Vec<String>)> { idx.iter().map(|&i| encoded[i].clone()).collect() };
    let (train, test) = (pick(&train_idx), pick(&test_idx));

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(in_file(File::create(path), path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut csv = csv::Writer::from_writer(&mut out);
    csv.write_record(["V", "epoch", "seconds", "accuracy"])?;
    let mut write_error = None;
    let m = (classes.len() as u32).max(2);
    let test_ref = (!test.is_empty()).then_some(test.as_slice());
    vocab_sweep(&train, test_ref, m, sweep, &cfg, args.epochs, |r: &BenchRow| {
        eprintln!("V={} epoch {} {:.3}s acc {:.4}", r.vocab_size, r.epoch, r.seconds, r.accuracy);
        let rec = [r.vocab_size.to_string(), r.epoch.to_string(), r.seconds.to_string(), r.accuracy.to_string()];
        if let Err(e) = csv.write_record(rec).and_then(|_| csv.flush().map_err(Into::into)) {
            write_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    csv.flush()?;
    Ok(())
}
