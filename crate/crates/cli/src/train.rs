use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stm::model::InputMeta;
use stm::{load_sparse_file, save_model, EpochMetrics, SparseDataset, StmModel, TrainConfig};

use crate::error::{in_file, CliError, CliResult};
use crate::hyper::HyperArgs;
use crate::sidecar::{sidecar_path, Sidecar};

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training data in sparse format.
    pub train: PathBuf,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Where to write the trained model.
    #[arg(long, short = 'o', default_value = "model.stm")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Vocabulary sidecar. Default: `<train>.vocab.json` when it exists.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// JSON-lines metrics; a CSV copy is written next to it.
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Serialize)]
struct RunHeader<'a> {
    command: &'static str,
    train: &'a Path,
    test: Option<&'a Path>,
    features: u32,
    classes: u32,
    config: &'a TrainConfig,
}

/// JSON-lines plus CSV metrics sinks.
struct MetricsWriter {
    json: BufWriter<File>,
    csv: csv::Writer<File>,
}

impl MetricsWriter {
    fn create(path: &Path, header: &RunHeader<'_>) -> CliResult<Self> {
        let mut json = BufWriter::new(in_file(File::create(path), path)?);
        serde_json::to_writer(&mut json, header)?;
        writeln!(json)?;
        let csv_path = path.with_extension("csv");
        let mut csv = in_file(csv::Writer::from_path(&csv_path), &csv_path)?;
        csv.write_record(["epoch", "seconds", "train_acc", "test_acc", "mean_clause_size", "al_occupancy"])?;
        Ok(Self { json, csv })
    }

    fn push(&mut self, m: &EpochMetrics) -> CliResult<()> {
        serde_json::to_writer(&mut self.json, m)?;
        writeln!(self.json)?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let occupancy: Vec<String> = m.al_occupancy.iter().map(usize::to_string).collect();
        self.csv.write_record([
            m.epoch.to_string(),
            m.seconds.to_string(),
            opt(m.train_acc),
            opt(m.test_acc),
            m.mean_clause_size.to_string(),
            occupancy.join(";"),
        ])?;
        Ok(())
    }

    fn finish(mut self) -> CliResult<()> {
        self.json.flush()?;
        self.csv.flush()?;
        Ok(())
    }
}

fn load(path: &Path) -> CliResult<SparseDataset> {
    in_file(load_sparse_file(path), path)
}

pub fn run(args: &TrainArgs) -> CliResult<()> {
    let cfg = args.hyper.config(args.epochs);
    cfg.validate()?;
    if args.epochs == 0 {
        return Err(CliError::Usage("--epochs must be at least 1".into()));
    }

    let train = load(&args.train)?;
    let test = args.test.as_deref().map(load).transpose()?;
    let features = train.feature_count().max(test.as_ref().map_or(0, SparseDataset::feature_count));
    let classes = train.class_count().max(test.as_ref().map_or(0, SparseDataset::class_count));

    let sidecar_file = args.vocab.clone().or_else(|| Some(sidecar_path(&args.train)).filter(|p| p.is_file()));
    let sidecar = sidecar_file.as_deref().map(Sidecar::load).transpose()?;
    if let Some(s) = &sidecar {
        if s.tokens.len() != features as usize {
            return Err(CliError::Data(format!(
                "vocabulary has {} tokens but the data has o={features}",
                s.tokens.len()
            )));
        }
    }

    let mut model = StmModel::new(cfg.clone(), features, classes)?;
    if let Some(s) = sidecar {
        model.meta = InputMeta {
            vocabulary: Some(s.vocabulary()),
            tokenizer: s.tokenizer,
            class_names: Some(s.classes).filter(|c| c.len() == classes as usize),
        };
    }

    let header = RunHeader {
        command: "train",
        train: &args.train,
        test: args.test.as_deref(),
        features,
        classes,
        config: &cfg,
    };
    let mut metrics = args.metrics_out.as_deref().map(|p| MetricsWriter::create(p, &header)).transpose()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sink_error = None;
    let history = model.fit(&train, test.as_ref(), args.epochs, &mut rng, |m| {
        eprintln!(
            "epoch {:>3}  {:.2}s  train {:.4}  test {}  clause size {:.2}",
            m.epoch,
            m.seconds,
            m.train_acc.unwrap_or(f64::NAN),
            m.test_acc.map_or("-".into(), |a| format!("{a:.4}")),
            m.mean_clause_size
        );
        if let Some(w) = metrics.as_mut() {
            if let Err(e) = w.push(m) {
                sink_error.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = sink_error {
        return Err(e);
    }
    if let Some(w) = metrics {
        w.finish()?;
    }

    model.check_invariants().map_err(CliError::Internal)?;
    save_model(&model, &args.out)?;

    let best = |f: fn(&EpochMetrics) -> Option<f64>| history.iter().filter_map(f).fold(f64::NAN, f64::max);
    println!("model: {}", args.out.display());
    println!("best train accuracy: {:.4}", best(|m| m.train_acc));
    if test.is_some() {
        println!("best test accuracy: {:.4}", best(|m| m.test_acc));
    }
    Ok(())
}
