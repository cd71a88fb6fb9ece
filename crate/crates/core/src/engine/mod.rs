//! Coalesced voting and the sparse feedback scheme.
//!
//! One clause bank serves every class through a signed weight matrix.
//! Per sample the trainer computes clause outputs `c`, votes `v = W c`
//! clipped to `[-T, T]`, and then updates two classes: the true class `y`
//! towards output 1 and one negative class towards output 0. Each clause is
//! selected for an update with probability `|q - clip(v)| / 2T`.
//!
//! Routing for a selected clause `j` and update class `u`:
//!
//! | sign of `W[u][j]` agrees with desired output | `c_j` | feedback |
//! |----------------------------------------------|-------|----------|
//! | yes                                          | 1     | Type Ia  |
//! | yes                                          | 0     | Type Ib  |
//! | no                                           | 1     | Type II  |
//! | no                                           | 0     | none     |

mod feedback;

pub use feedback::{type_ia_feedback, type_ib_feedback, type_ii_feedback};

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::active::AlMode;
use crate::clause::{ClauseLimits, EvalMode};
use crate::error::{Result, StmError};
use crate::model::StmModel;
use crate::sparse::{SparseDataset, SparseRow};

/// Class x clause signed integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    classes: usize,
    clauses: usize,
    data: Vec<i32>,
}

impl WeightMatrix {
    pub fn zeros(classes: usize, clauses: usize) -> Self {
        Self { classes, clauses, data: vec![0; classes * clauses] }
    }

    pub fn from_rows(rows: Vec<Vec<i32>>) -> Result<Self> {
        let classes = rows.len();
        let clauses = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != clauses) {
            return Err(StmError::DimensionMismatch { expected: clauses, actual: bad.len() });
        }
        Ok(Self { classes, clauses, data: rows.concat() })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn clauses(&self) -> usize {
        self.clauses
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, class: usize, clause: usize) -> i32 {
        self.data[class * self.clauses + clause]
    }

    #[inline]
    pub fn get_mut(&mut self, class: usize, clause: usize) -> &mut i32 {
        &mut self.data[class * self.clauses + clause]
    }

    pub fn row(&self, class: usize) -> &[i32] {
        &self.data[class * self.clauses..(class + 1) * self.clauses]
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.data
    }

    /// `W c` for a clause output vector of matching length.
    pub fn votes(&self, outputs: &[bool]) -> Result<Vec<i64>> {
        if outputs.len() != self.clauses {
            return Err(StmError::DimensionMismatch { expected: self.clauses, actual: outputs.len() });
        }
        Ok(self.multiply(outputs))
    }

    pub(crate) fn multiply(&self, outputs: &[bool]) -> Vec<i64> {
        (0..self.classes)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(outputs)
                    .filter(|&(_, &c)| c)
                    .map(|(&w, _)| i64::from(w))
                    .sum()
            })
            .collect()
    }
}

/// Raw per-class vote sums and their copy clipped to `[-T, T]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteVector {
    pub raw: Vec<i64>,
    pub clipped: Vec<i64>,
}

impl VoteVector {
    pub fn new(raw: Vec<i64>, margin: u32) -> Self {
        let t = i64::from(margin);
        let clipped = raw.iter().map(|&v| v.clamp(-t, t)).collect();
        Self { raw, clipped }
    }
}

/// `v = W c` followed by clipping.
pub fn votes(weights: &WeightMatrix, outputs: &[bool], margin: u32) -> Result<VoteVector> {
    Ok(VoteVector::new(weights.votes(outputs)?, margin))
}

/// Probability of selecting a clause for feedback: `|q - v| / 2T`, where
/// `v` is already clipped and `q` is `+T` (desired output 1) or `-T`.
#[inline]
pub fn update_probability(v_clipped: i64, q: i64, margin: u32) -> f64 {
    (q - v_clipped).unsigned_abs() as f64 / (2.0 * f64::from(margin))
}

/// Index of the largest value, lowest index on ties.
pub fn argmax_lowest(values: &[i64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// How the negative class of a training update is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeSampler {
    /// Uniform over all classes except the true one.
    Uniform,
    /// The most confusable class: highest clipped vote among the negatives.
    Focused,
}

impl std::str::FromStr for NegativeSampler {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "focused" => Ok(Self::Focused),
            other => Err(format!("unknown negative sampler {other:?} (expected uniform or focused)")),
        }
    }
}

impl std::fmt::Display for NegativeSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Focused => "focused",
        })
    }
}

pub fn sample_negative_class<R: Rng + ?Sized>(
    votes: &VoteVector,
    target: usize,
    sampler: NegativeSampler,
    rng: &mut R,
) -> Result<usize> {
    let m = votes.clipped.len();
    if m < 2 {
        return Err(StmError::SingleClass);
    }
    match sampler {
        NegativeSampler::Uniform => {
            let k = rng.gen_range(0..m - 1);
            Ok(if k >= target { k + 1 } else { k })
        }
        NegativeSampler::Focused => {
            let best = (0..m).filter(|&i| i != target).map(|i| votes.clipped[i]).max().unwrap_or(0);
            let tied: Vec<usize> =
                (0..m).filter(|&i| i != target && votes.clipped[i] == best).collect();
            Ok(if tied.len() == 1 { tied[0] } else { tied[rng.gen_range(0..tied.len())] })
        }
    }
}

/// Feedback a selected clause receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feedback {
    TypeIa,
    TypeIb,
    TypeII,
}

/// Chooses the feedback type from the clause's weight for the update class,
/// the desired output for that class, and the clause output.
#[inline]
pub fn route(weight: i32, desired: bool, fired: bool) -> Option<Feedback> {
    match ((weight >= 0) == desired, fired) {
        (true, true) => Some(Feedback::TypeIa),
        (true, false) => Some(Feedback::TypeIb),
        (false, true) => Some(Feedback::TypeII),
        (false, false) => None,
    }
}

/// Hyperparameters and run settings. Stored with every model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// `n`: number of clauses.
    pub clauses: usize,
    /// `N`: automaton states per action.
    pub n_states: u32,
    /// `t`: lower state threshold.
    pub threshold: u32,
    /// `p`: maximum literals per clause.
    pub max_literals: u32,
    /// `a`: active literal capacity per class.
    pub al_size: usize,
    /// `T`: voting margin.
    pub margin: u32,
    /// `s`: specificity, Type Ib penalty rate is `1/s`.
    pub specificity: f64,
    pub al_mode: AlMode,
    pub sampler: NegativeSampler,
    /// State given to literals introduced by Type II feedback.
    pub insert_state: u32,
    /// Literals introduced per Type II event.
    pub k_intro: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Worker threads for clause evaluation; training updates stay sequential.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::for_clauses(100)
    }
}

impl TrainConfig {
    /// Defaults for `n` clauses, with `T = round(4 sqrt(n))`.
    pub fn for_clauses(clauses: usize) -> Self {
        let n_states = 128;
        Self {
            clauses,
            n_states,
            threshold: 32,
            max_literals: 64,
            al_size: 100,
            margin: Self::default_margin(clauses),
            specificity: 2.0,
            al_mode: AlMode::Dynamic,
            sampler: NegativeSampler::Focused,
            insert_state: n_states,
            k_intro: 1,
            epochs: 100,
            seed: 42,
            threads: 1,
        }
    }

    pub fn default_margin(clauses: usize) -> u32 {
        ((4.0 * (clauses as f64).sqrt()).round() as u32).max(1)
    }

    pub fn limits(&self) -> Result<ClauseLimits> {
        ClauseLimits::new(self.n_states, self.threshold, self.max_literals)
    }

    pub fn validate(&self) -> Result<()> {
        let limits = self.limits()?;
        if self.clauses == 0 {
            return Err(StmError::Config("number of clauses must be at least 1".into()));
        }
        if self.margin < 1 {
            return Err(StmError::Config("voting margin T must be at least 1".into()));
        }
        if !self.specificity.is_finite() || self.specificity <= 1.0 {
            return Err(StmError::Config(format!("specificity s={} must be finite and > 1", self.specificity)));
        }
        if self.al_size == 0 {
            return Err(StmError::Config("active literal size a must be at least 1".into()));
        }
        if self.k_intro == 0 {
            return Err(StmError::Config("k_intro must be at least 1".into()));
        }
        limits
            .check_state(self.insert_state)
            .map_err(|e| StmError::Config(format!("insert state: {e}")))?;
        Ok(())
    }
}

/// Statistics for one pass over the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub seconds: f64,
    pub train_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub mean_clause_size: f64,
    pub al_occupancy: Vec<usize>,
}

impl StmModel {
    /// One stochastic update on `(row, target)`.
    pub fn train_sample<R: Rng + ?Sized>(&mut self, row: &SparseRow, target: usize, rng: &mut R) -> Result<()> {
        let m = self.classes as usize;
        if target >= m {
            return Err(StmError::ClassOutOfRange { class: target as u32, classes: self.classes });
        }
        let outputs = if self.config.threads > 1 {
            self.bank.evaluate_all_par(row, EvalMode::Training)
        } else {
            self.bank.evaluate_all(row, EvalMode::Training)
        };
        let margin = self.config.margin;
        let v = VoteVector::new(self.weights.multiply(&outputs), margin);
        let t = i64::from(margin);

        let d_target = update_probability(v.clipped[target], t, margin);
        self.update_class(row, target, target, true, d_target, &outputs, rng);

        let negative = sample_negative_class(&v, target, self.config.sampler, rng)?;
        let d_negative = update_probability(v.clipped[negative], -t, margin);
        self.update_class(row, target, negative, false, d_negative, &outputs, rng);
        Ok(())
    }

    /// Feedback for update class `class` with desired output `desired`.
    /// Literals observed by Type Ia go to the record of the true class.
    #[allow(clippy::too_many_arguments)]
    fn update_class<R: Rng + ?Sized>(
        &mut self,
        row: &SparseRow,
        target: usize,
        class: usize,
        desired: bool,
        probability: f64,
        outputs: &[bool],
        rng: &mut R,
    ) {
        if probability <= 0.0 {
            return;
        }
        let limits = *self.bank.limits();
        let s = self.config.specificity;
        for (j, &fired) in outputs.iter().enumerate() {
            if rng.gen::<f64>() >= probability {
                continue;
            }
            let weight = self.weights.get_mut(class, j);
            let clause = self.bank.clause_mut(j);
            match route(*weight, desired, fired) {
                Some(Feedback::TypeIa) => {
                    type_ia_feedback(clause, weight, row, &mut self.active, target, &limits, s, rng)
                }
                Some(Feedback::TypeIb) => type_ib_feedback(clause, &limits, s, rng),
                Some(Feedback::TypeII) => type_ii_feedback(
                    clause,
                    weight,
                    row,
                    &self.active,
                    class,
                    &limits,
                    self.config.insert_state,
                    self.config.k_intro,
                    rng,
                ),
                None => {}
            }
        }
    }

    /// Applies [`StmModel::train_sample`] over a seeded shuffle of `data`.
    pub fn train_epoch<R: Rng + ?Sized>(&mut self, data: &SparseDataset, rng: &mut R) -> Result<EpochMetrics> {
        self.check_dataset(data)?;
        let start = Instant::now();
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(rng);
        let rows = data.rows();
        let labels = data.labels();
        for i in order {
            self.train_sample(&rows[i], labels[i] as usize, rng)?;
        }
        #[cfg(debug_assertions)]
        self.check_provenance();
        Ok(EpochMetrics {
            epoch: 0,
            seconds: start.elapsed().as_secs_f64(),
            train_acc: None,
            test_acc: None,
            mean_clause_size: self.bank.mean_clause_size(),
            al_occupancy: self.active.occupancy(),
        })
    }

    /// Every stored literal must have passed through some class's record.
    #[cfg(debug_assertions)]
    fn check_provenance(&self) {
        for (j, clause) in self.bank.clauses().iter().enumerate() {
            for &f in clause.literals() {
                assert!(
                    (0..self.classes as usize).any(|c| self.active.ever_held(c, f)),
                    "clause {j} holds feature {f} that never entered an active literal record"
                );
            }
        }
    }

    fn check_dataset(&self, data: &SparseDataset) -> Result<()> {
        if data.is_empty() {
            return Err(StmError::EmptyDataset);
        }
        if data.feature_count() > self.feature_count() {
            return Err(StmError::FeatureOutOfRange {
                index: data.feature_count() - 1,
                features: self.feature_count(),
            });
        }
        if data.class_count() > self.classes {
            return Err(StmError::ClassOutOfRange { class: data.class_count() - 1, classes: self.classes });
        }
        Ok(())
    }

    /// Trains for `epochs` passes, scoring after each and handing the metrics
    /// to `on_epoch`.
    pub fn fit<R, F>(
        &mut self,
        train: &SparseDataset,
        test: Option<&SparseDataset>,
        epochs: usize,
        rng: &mut R,
        mut on_epoch: F,
    ) -> Result<Vec<EpochMetrics>>
    where
        R: Rng + ?Sized,
        F: FnMut(&EpochMetrics),
    {
        let mut history = Vec::with_capacity(epochs);
        for epoch in 1..=epochs {
            let mut metrics = self.train_epoch(train, rng)?;
            metrics.epoch = epoch;
            metrics.train_acc = Some(evaluate_accuracy(self, train)?);
            if let Some(test) = test {
                metrics.test_acc = Some(evaluate_accuracy(self, test)?);
            }
            on_epoch(&metrics);
            history.push(metrics);
        }
        Ok(history)
    }
}

/// Fraction of samples whose prediction equals the label.
pub fn evaluate_accuracy(model: &StmModel, data: &SparseDataset) -> Result<f64> {
    model.check_dataset(data)?;
    let correct = predict_all(model, data).iter().zip(data.labels()).filter(|(&p, &y)| p == y as usize).count();
    Ok(correct as f64 / data.len() as f64)
}

/// Predictions for every row, evaluated in parallel across rows.
pub fn predict_all(model: &StmModel, data: &SparseDataset) -> Vec<usize> {
    data.rows().par_iter().map(|row| model.predict(row)).collect()
}
