//! Sparse Tsetlin machine.
//!
//! Learns conjunctive clauses directly on compressed sparse binary input.
//! Clauses start empty and only ever store the literals introduced to them
//! through per-class active literal records, so memory is bounded by the
//! clause count, clause capacity and record size rather than by the width
//! of the input space.
//!
//! ```
//! use rand::SeedableRng;
//! use stm::{SparseDataset, SparseRow, StmModel, TrainConfig};
//!
//! let rows = vec![SparseRow::new(vec![0, 2]).unwrap(), SparseRow::new(vec![1]).unwrap()];
//! let data = SparseDataset::new(rows, vec![1, 0], 3, 2).unwrap();
//! let cfg = TrainConfig { clauses: 10, threshold: 8, max_literals: 4, al_size: 4, ..TrainConfig::for_clauses(10) };
//! let mut model = StmModel::new(cfg, 3, 2).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! model.train_epoch(&data, &mut rng).unwrap();
//! let _ = model.predict(&data.rows()[0]);
//! ```

pub mod active;
pub mod bench;
pub mod clause;
pub mod corpus;
pub mod dense;
pub mod engine;
pub mod error;
pub mod model;
pub mod sparse;
pub mod synth;

pub use active::{ActiveLiteralRecord, AlMode};
pub use clause::{ClauseBank, ClauseLimits, EvalMode, SparseClause};
pub use engine::{
    evaluate_accuracy, predict_all, sample_negative_class, update_probability, votes, EpochMetrics,
    NegativeSampler, TrainConfig, VoteVector, WeightMatrix,
};
pub use error::{Result, StmError};
pub use model::{export_rules, load_model, memory_bound, model_memory_bytes, save_model, Rule, StmModel};
pub use sparse::{load_sparse_file, save_sparse_file, SparseDataset, SparseRow, Tokenizer, Vocabulary};
