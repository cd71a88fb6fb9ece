use std::path::PathBuf;

use clap::Args;
use stm::{load_model, load_sparse_file, predict_all, StmModel};

use crate::error::{in_file, CliError, CliResult};

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    /// Labelled data in sparse format.
    pub data: PathBuf,
}

/// `confusion[actual][predicted]` counts.
pub fn confusion(model: &StmModel, predictions: &[usize], labels: &[u32]) -> Vec<Vec<usize>> {
    let m = model.class_count() as usize;
    let mut table = vec![vec![0usize; m]; m];
    for (&p, &y) in predictions.iter().zip(labels) {
        table[y as usize][p] += 1;
    }
    table
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let model = in_file(load_model(&args.model), &args.model)?;
    let data = in_file(load_sparse_file(&args.data), &args.data)?;
    if data.is_empty() {
        return Err(CliError::Data(format!("{}: no rows", args.data.display())));
    }
    if data.feature_count() > model.feature_count() {
        return Err(CliError::Data(format!(
            "{}: o={} but the model was trained on o={}",
            args.data.display(),
            data.feature_count(),
            model.feature_count()
        )));
    }
    if let Some(&y) = data.labels().iter().find(|&&y| y >= model.class_count()) {
        return Err(CliError::Data(format!(
            "{}: label {y} out of range for a {}-class model",
            args.data.display(),
            model.class_count()
        )));
    }

    let predictions = predict_all(&model, &data);
    let table = confusion(&model, &predictions, data.labels());
    let correct: usize = (0..table.len()).map(|i| table[i][i]).sum();
    println!("accuracy: {:.4} ({correct}/{})", correct as f64 / data.len() as f64, data.len());

    let names: Vec<String> = match &model.meta.class_names {
        Some(n) => n.clone(),
        None => (0..table.len()).map(|i| i.to_string()).collect(),
    };
    let width = names.iter().map(String::len).max().unwrap_or(1).max(6);
    println!("confusion (rows: actual, columns: predicted)");
    print!("{:>width$}", "");
    for n in &names {
        print!(" {n:>width$}");
    }
    println!();
    for (name, row) in names.iter().zip(&table) {
        print!("{name:>width$}");
        for c in row {
            print!(" {c:>width$}");
        }
        println!();
    }
    Ok(())
}
