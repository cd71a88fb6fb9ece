//! The trained artefact: clause bank, weights, active literals, the
//! configuration it was trained with, and optional input metadata.

mod format;
mod rules;

pub use format::{load_model, read_model, save_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use rules::{export_rules, Rule};

use crate::active::ActiveLiteralRecord;
use crate::clause::{ClauseBank, EvalMode};
use crate::engine::{argmax_lowest, TrainConfig, WeightMatrix};
use crate::error::{Result, StmError};
use crate::sparse::{SparseRow, Tokenizer, Vocabulary};

/// Bytes per stored clause literal: feature index and state, both `u32`.
pub const LITERAL_ENTRY_BYTES: usize = 8;
/// Bytes per weight (`i32`).
pub const WEIGHT_BYTES: usize = 4;
/// Bytes per active literal entry (`u32` feature index).
pub const AL_ENTRY_BYTES: usize = 4;
/// Fixed bookkeeping: the shape and hyperparameter header.
pub const MODEL_OVERHEAD_BYTES: usize = 128;

/// Input-space metadata carried alongside the model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputMeta {
    pub vocabulary: Option<Vocabulary>,
    pub tokenizer: Option<Tokenizer>,
    pub class_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StmModel {
    pub(crate) bank: ClauseBank,
    pub(crate) weights: WeightMatrix,
    pub(crate) active: ActiveLiteralRecord,
    pub(crate) config: TrainConfig,
    pub(crate) classes: u32,
    pub meta: InputMeta,
}

impl StmModel {
    /// Empty model for `features` inputs and `classes` outputs.
    pub fn new(config: TrainConfig, features: u32, classes: u32) -> Result<Self> {
        config.validate()?;
        if classes < 2 {
            return Err(StmError::SingleClass);
        }
        let bank = ClauseBank::with_limits(config.clauses, config.limits()?, features);
        Ok(Self {
            weights: WeightMatrix::zeros(classes as usize, config.clauses),
            active: ActiveLiteralRecord::new(classes as usize, config.al_size, config.al_mode),
            bank,
            config,
            classes,
            meta: InputMeta::default(),
        })
    }

    pub(crate) fn from_parts(
        bank: ClauseBank,
        weights: WeightMatrix,
        active: ActiveLiteralRecord,
        config: TrainConfig,
        meta: InputMeta,
    ) -> Result<Self> {
        let classes = weights.classes() as u32;
        if classes < 2 {
            return Err(StmError::SingleClass);
        }
        if weights.clauses() != bank.len() || active.class_count() != classes as usize {
            return Err(StmError::DimensionMismatch { expected: bank.len(), actual: weights.clauses() });
        }
        Ok(Self { bank, weights, active, config, classes, meta })
    }

    pub fn bank(&self) -> &ClauseBank {
        &self.bank
    }

    /// Mutable access for hand-built models; clause operations keep their
    /// own invariants.
    pub fn bank_mut(&mut self) -> &mut ClauseBank {
        &mut self.bank
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut WeightMatrix {
        &mut self.weights
    }

    pub fn active_literals(&self) -> &ActiveLiteralRecord {
        &self.active
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn feature_count(&self) -> u32 {
        self.bank.feature_count()
    }

    pub fn class_count(&self) -> u32 {
        self.classes
    }

    /// Per-class vote sums `W c` with inference-mode clause outputs.
    pub fn class_votes(&self, row: &SparseRow) -> Vec<i64> {
        let c = self.bank.evaluate_all(row, EvalMode::Inference);
        self.weights.multiply(&c)
    }

    /// Class with the highest vote; ties go to the lowest index.
    pub fn predict(&self, row: &SparseRow) -> usize {
        argmax_lowest(&self.class_votes(row))
    }

    /// Storage accounted for the learned state: stored literals, weights and
    /// active literal entries plus [`MODEL_OVERHEAD_BYTES`]. The vocabulary is
    /// input metadata and is not counted. Nothing here depends on `o`.
    pub fn memory_bytes(&self) -> usize {
        MODEL_OVERHEAD_BYTES
            + self.bank.stored_literals() * LITERAL_ENTRY_BYTES
            + self.weights.len() * WEIGHT_BYTES
            + self.active.total_entries() * AL_ENTRY_BYTES
    }

    /// Checks every structural invariant of the contained parts.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        self.bank.check_invariants()?;
        self.active.check_invariants(self.feature_count())?;
        if self.active.occupancy().iter().any(|&c| c > self.config.al_size) {
            return Err("active literal record exceeds a".into());
        }
        Ok(())
    }
}

/// Upper bound on [`StmModel::memory_bytes`] for `n` clauses of at most `p`
/// literals, `m` classes and active literal capacity `a`.
pub fn memory_bound(n: usize, p: usize, m: usize, a: usize) -> usize {
    n * p * LITERAL_ENTRY_BYTES + m * n * WEIGHT_BYTES + a * m * AL_ENTRY_BYTES + MODEL_OVERHEAD_BYTES
}

/// Free function form of [`StmModel::memory_bytes`].
pub fn model_memory_bytes(model: &StmModel) -> usize {
    model.memory_bytes()
}
