//! Dense reference Tsetlin machine over the full `2o` literal vector.
//!
//! Straight loops, no sparsity tricks. Used as the ground truth for the
//! sparse implementation at small `o`.

use rand::Rng;

use crate::clause::EvalMode;
use crate::error::{Result, StmError};
use crate::model::StmModel;
use crate::sparse::SparseDataset;

/// Largest feature count the oracle accepts.
pub const MAX_DENSE_FEATURES: u32 = 64;

/// One automaton state per literal, `[x_1..x_o, !x_1..!x_o]`, each in `1..=2N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseClause {
    pub states: Vec<u32>,
}

impl DenseClause {
    pub fn new(states: Vec<u32>) -> Self {
        Self { states }
    }

    pub fn included(&self, n_states: u32, k: usize) -> bool {
        self.states[k] > n_states
    }
}

/// Conjunction of every included literal over a dense literal vector.
pub fn dense_evaluate(clause: &DenseClause, literals: &[bool], n_states: u32, mode: EvalMode) -> bool {
    assert_eq!(clause.states.len(), literals.len());
    let mut any = false;
    for (k, &value) in literals.iter().enumerate() {
        if clause.included(n_states, k) {
            any = true;
            if !value {
                return false;
            }
        }
    }
    if any {
        true
    } else {
        mode == EvalMode::Training
    }
}

/// Unit step: 1 when `v >= 0`.
pub fn unit_step(v: i64) -> u8 {
    if v >= 0 {
        1
    } else {
        0
    }
}

/// Classic two-polarity vote: positive clauses minus negative clauses,
/// thresholded with [`unit_step`].
pub fn dense_binary_predict(
    positive: &[DenseClause],
    negative: &[DenseClause],
    literals: &[bool],
    n_states: u32,
    mode: EvalMode,
) -> u8 {
    let mut sum = 0i64;
    for c in positive {
        if dense_evaluate(c, literals, n_states, mode) {
            sum += 1;
        }
    }
    for c in negative {
        if dense_evaluate(c, literals, n_states, mode) {
            sum -= 1;
        }
    }
    unit_step(sum)
}

/// Dense coalesced machine: clauses plus an `m x n` weight table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseModel {
    pub features: u32,
    pub n_states: u32,
    pub clauses: Vec<DenseClause>,
    pub weights: Vec<Vec<i64>>,
}

impl DenseModel {
    pub fn dense_votes(&self, literals: &[bool], mode: EvalMode) -> Vec<i64> {
        let mut outputs = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            outputs.push(dense_evaluate(c, literals, self.n_states, mode));
        }
        let mut votes = vec![0i64; self.weights.len()];
        for (i, row) in self.weights.iter().enumerate() {
            for j in 0..outputs.len() {
                if outputs[j] {
                    votes[i] += row[j];
                }
            }
        }
        votes
    }

    /// Argmax of the inference-mode votes, lowest class on ties.
    pub fn dense_predict(&self, literals: &[bool]) -> usize {
        let votes = self.dense_votes(literals, EvalMode::Inference);
        let mut best = 0;
        for i in 1..votes.len() {
            if votes[i] > votes[best] {
                best = i;
            }
        }
        best
    }
}

/// Copies a sparse model into the dense layout. Stored states are kept;
/// every untracked literal, including all negated ones, gets state 1.
pub fn import_sparse(model: &StmModel) -> Result<DenseModel> {
    let o = model.feature_count();
    if o > MAX_DENSE_FEATURES {
        return Err(StmError::Config(format!("dense oracle supports o <= {MAX_DENSE_FEATURES}, got {o}")));
    }
    let n_states = model.bank().limits().n_states;
    let clauses = model
        .bank()
        .clauses()
        .iter()
        .map(|c| {
            let mut states = vec![1u32; 2 * o as usize];
            for (&l, &s) in c.literals().iter().zip(c.states()) {
                states[l as usize] = s;
            }
            DenseClause::new(states)
        })
        .collect();
    let weights = (0..model.class_count() as usize)
        .map(|i| model.weights().row(i).iter().map(|&w| i64::from(w)).collect())
        .collect();
    Ok(DenseModel { features: o, n_states, clauses, weights })
}

/// Plain dense coalesced trainer: all `2o` automata, uniform negative
/// class, classic Type I (with boosted true positives) and Type II.
/// Only used to confirm that the planted concepts are learnable.
#[derive(Debug, Clone)]
pub struct DenseTrainer {
    pub model: DenseModel,
    pub margin: i64,
    pub specificity: f64,
}

impl DenseTrainer {
    pub fn new<R: Rng>(features: u32, classes: usize, clauses: usize, n_states: u32, margin: i64, specificity: f64, rng: &mut R) -> Self {
        let mut cl = Vec::new();
        for _ in 0..clauses {
            let mut states = Vec::new();
            for _ in 0..2 * features {
                states.push(if rng.gen_bool(0.5) { n_states } else { n_states + 1 });
            }
            cl.push(DenseClause::new(states));
        }
        let mut weights = Vec::new();
        for _ in 0..classes {
            let mut row = Vec::new();
            for _ in 0..clauses {
                row.push(if rng.gen_bool(0.5) { 1 } else { -1 });
            }
            weights.push(row);
        }
        Self { model: DenseModel { features, n_states, clauses: cl, weights }, margin, specificity }
    }

    pub fn train_epoch<R: Rng>(&mut self, data: &SparseDataset, rng: &mut R) {
        for (row, y) in data.iter() {
            let literals = row.densify(self.model.features).expect("row in range");
            let y = y as usize;
            let outputs: Vec<bool> = self
                .model
                .clauses
                .iter()
                .map(|c| dense_evaluate(c, &literals, self.model.n_states, EvalMode::Training))
                .collect();
            let votes = self.model.dense_votes(&literals, EvalMode::Training);
            let m = self.model.weights.len();
            let mut k = rng.gen_range(0..m - 1);
            if k >= y {
                k += 1;
            }
            for (class, desired) in [(y, true), (k, false)] {
                let t = self.margin;
                let v = votes[class].clamp(-t, t);
                let q = if desired { t } else { -t };
                let d = (q - v).abs() as f64 / (2 * t) as f64;
                for (j, &fired) in outputs.iter().enumerate() {
                    if rng.gen::<f64>() >= d {
                        continue;
                    }
                    let w = self.model.weights[class][j];
                    if (w >= 0) == desired {
                        self.type_i(j, &literals, fired, rng);
                        if fired {
                            self.model.weights[class][j] += if w >= 0 { 1 } else { -1 };
                        }
                    } else if fired {
                        self.type_ii(j, &literals);
                        self.model.weights[class][j] += if w >= 0 { -1 } else { 1 };
                    }
                }
            }
        }
    }

    fn type_i<R: Rng>(&mut self, j: usize, literals: &[bool], fired: bool, rng: &mut R) {
        let n = self.model.n_states;
        let forget = 1.0 / self.specificity;
        let states = &mut self.model.clauses[j].states;
        for k in 0..literals.len() {
            if fired && literals[k] {
                if states[k] < 2 * n {
                    states[k] += 1;
                }
            } else if rng.gen::<f64>() < forget && states[k] > 1 {
                states[k] -= 1;
            }
        }
    }

    fn type_ii(&mut self, j: usize, literals: &[bool]) {
        let n = self.model.n_states;
        let states = &mut self.model.clauses[j].states;
        for k in 0..literals.len() {
            if !literals[k] && states[k] <= n {
                states[k] += 1;
            }
        }
    }

    pub fn accuracy(&self, data: &SparseDataset) -> f64 {
        let mut correct = 0;
        for (row, y) in data.iter() {
            let literals = row.densify(self.model.features).expect("row in range");
            if self.model.dense_predict(&literals) == y as usize {
                correct += 1;
            }
        }
        correct as f64 / data.len() as f64
    }
}
