//! Epoch-time versus vocabulary-size sweeps.
//!
//! For each vocabulary size the corpus is re-vectorised, a fresh model is
//! trained from the same seed, and one [`BenchRow`] is emitted per epoch.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{evaluate_accuracy, TrainConfig};
use crate::error::{Result, StmError};
use crate::model::StmModel;
use crate::sparse::{SparseDataset, Vocabulary};

/// Inclusive `start:end:step` range of vocabulary sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabSweep {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl VocabSweep {
    pub fn sizes(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

impl FromStr for VocabSweep {
    type Err = StmError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || StmError::Config(format!("vocabulary sweep {s:?} must look like start:end:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<usize> = parts.iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let sweep = Self { start: nums[0], end: nums[1], step: nums[2] };
        if sweep.start == 0 || sweep.step == 0 || sweep.end < sweep.start {
            return Err(bad());
        }
        Ok(sweep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub vocab_size: usize,
    pub epoch: usize,
    pub seconds: f64,
    /// Test accuracy when a test split is given, training accuracy otherwise.
    pub accuracy: f64,
}

/// Tokenised documents with integer labels.
pub type Documents = [(u32, Vec<String>)];

fn vectorize(docs: &Documents, vocab: &Vocabulary, classes: u32) -> Result<SparseDataset> {
    let rows = docs.iter().map(|(_, toks)| vocab.vectorize(toks)).collect();
    let labels = docs.iter().map(|(y, _)| *y).collect();
    SparseDataset::new(rows, labels, vocab.len() as u32, classes)
}

/// Runs the sweep, calling `on_row` as each epoch finishes.
pub fn vocab_sweep<F: FnMut(&BenchRow)>(
    train: &Documents,
    test: Option<&Documents>,
    classes: u32,
    sweep: VocabSweep,
    config: &TrainConfig,
    epochs: usize,
    mut on_row: F,
) -> Result<Vec<BenchRow>> {
    let corpus: Vec<Vec<String>> = train.iter().map(|(_, t)| t.clone()).collect();
    let mut out = Vec::new();
    for size in sweep.sizes() {
        let vocab = Vocabulary::build(&corpus, size, 1)?;
        let train_ds = vectorize(train, &vocab, classes)?;
        let test_ds = test.map(|t| vectorize(t, &vocab, classes)).transpose()?;
        let mut model = StmModel::new(config.clone(), vocab.len() as u32, classes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for epoch in 1..=epochs {
            let metrics = model.train_epoch(&train_ds, &mut rng)?;
            let accuracy = evaluate_accuracy(&model, test_ds.as_ref().unwrap_or(&train_ds))?;
            let row = BenchRow { vocab_size: vocab.len(), epoch, seconds: metrics.seconds, accuracy };
            on_row(&row);
            out.push(row);
        }
    }
    Ok(out)
}

/// Sum of epoch times recorded for `vocab_size`.
pub fn cumulative_seconds(rows: &[BenchRow], vocab_size: usize) -> f64 {
    rows.iter().filter(|r| r.vocab_size == vocab_size).map(|r| r.seconds).sum()
}

/// Relative growth of cumulative training time from `small` to `large`.
pub fn cumulative_increase(rows: &[BenchRow], small: usize, large: usize) -> Option<f64> {
    let base = cumulative_seconds(rows, small);
    if base <= 0.0 {
        return None;
    }
    Some(cumulative_seconds(rows, large) / base - 1.0)
}
