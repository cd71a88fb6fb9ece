//! Sparse clause memory.
//!
//! Each clause keeps two parallel lists: the feature indices it tracks and
//! the automaton state of each. Only non-negated literals are ever stored.
//! States live in the spectrum `[t, 2N]`; a state above `N` means the
//! literal is included in the conjunction. Penalising a literal below `t`
//! removes it from the clause, and a clause never holds more than `p`
//! literals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StmError};
use crate::sparse::SparseRow;

/// Evaluation convention for clauses without any included literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Empty conjunctions output 1 so fresh clauses can receive Type Ia feedback.
    Training,
    /// Empty conjunctions output 0.
    Inference,
}

/// Structural bounds shared by every clause of a bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseLimits {
    /// `N`: states `1..=N` exclude, `N+1..=2N` include.
    pub n_states: u32,
    /// `t`: lowest state a stored literal may hold.
    pub threshold: u32,
    /// `p`: maximum literals per clause.
    pub max_literals: u32,
}

impl ClauseLimits {
    pub fn new(n_states: u32, threshold: u32, max_literals: u32) -> Result<Self> {
        if threshold < 1 {
            return Err(StmError::Config("lower threshold t must be at least 1".into()));
        }
        if threshold > n_states {
            return Err(StmError::Config(format!(
                "lower threshold t={threshold} exceeds N={n_states}; literals could never be included"
            )));
        }
        if max_literals < 1 {
            return Err(StmError::Config("max clause size p must be at least 1".into()));
        }
        if n_states > u32::MAX / 2 {
            return Err(StmError::Config(format!("N={n_states} is too large")));
        }
        Ok(Self { n_states, threshold, max_literals })
    }

    #[inline]
    pub fn max_state(&self) -> u32 {
        2 * self.n_states
    }

    #[inline]
    pub fn is_included(&self, state: u32) -> bool {
        state > self.n_states
    }

    pub fn check_state(&self, state: u32) -> Result<()> {
        if state < self.threshold || state > self.max_state() {
            return Err(StmError::StateOutOfSpectrum {
                state,
                lower: self.threshold,
                upper: self.max_state(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseClause {
    literals: Vec<u32>,
    states: Vec<u32>,
}

impl SparseClause {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a clause from parallel lists, checking every invariant.
    pub fn from_parts(literals: Vec<u32>, states: Vec<u32>, limits: &ClauseLimits) -> Result<Self> {
        let clause = Self { literals, states };
        clause.check_invariants(limits).map_err(StmError::Config)?;
        Ok(clause)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    #[inline]
    pub fn literals(&self) -> &[u32] {
        &self.literals
    }

    #[inline]
    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state_of(&self, feature: u32) -> Option<u32> {
        self.position(feature).map(|i| self.states[i])
    }

    #[inline]
    fn position(&self, feature: u32) -> Option<usize> {
        self.literals.binary_search(&feature).ok()
    }

    pub fn included_literals(&self, limits: &ClauseLimits) -> Vec<u32> {
        self.literals
            .iter()
            .zip(&self.states)
            .filter(|&(_, &s)| limits.is_included(s))
            .map(|(&l, _)| l)
            .collect()
    }

    /// Conjunction of the included literals over `row`.
    pub fn evaluate(&self, row: &SparseRow, mode: EvalMode, limits: &ClauseLimits) -> bool {
        let row = row.indices();
        let mut any_included = false;
        let mut from = 0usize;
        for (&lit, &state) in self.literals.iter().zip(&self.states) {
            if !limits.is_included(state) {
                continue;
            }
            any_included = true;
            // Both lists are sorted, so each search can start where the last stopped.
            match row[from..].binary_search(&lit) {
                Ok(i) => from += i + 1,
                Err(_) => return false,
            }
        }
        any_included || mode == EvalMode::Training
    }

    /// Moves the literal at `pos` one state up, saturating at `2N`.
    #[inline]
    pub(crate) fn reward_at(&mut self, pos: usize, limits: &ClauseLimits) {
        let s = &mut self.states[pos];
        if *s < limits.max_state() {
            *s += 1;
        }
    }

    /// Moves the literal at `pos` one state down; drops it when it falls
    /// below `t`. Returns true if the literal was removed.
    #[inline]
    pub(crate) fn penalize_at(&mut self, pos: usize, limits: &ClauseLimits) -> bool {
        let s = self.states[pos] - 1;
        if s < limits.threshold {
            self.literals.remove(pos);
            self.states.remove(pos);
            true
        } else {
            self.states[pos] = s;
            false
        }
    }

    pub fn reward_literal(&mut self, feature: u32, limits: &ClauseLimits) -> Result<()> {
        let pos = self.position(feature).ok_or(StmError::LiteralNotPresent(feature))?;
        self.reward_at(pos, limits);
        Ok(())
    }

    /// Returns true when the penalty removed the literal.
    pub fn penalize_literal(&mut self, feature: u32, limits: &ClauseLimits) -> Result<bool> {
        let pos = self.position(feature).ok_or(StmError::LiteralNotPresent(feature))?;
        Ok(self.penalize_at(pos, limits))
    }

    /// Adds `feature` at `state`. No-op (false) when the feature is already
    /// tracked or the clause is at capacity.
    pub fn insert_literal(&mut self, feature: u32, state: u32, limits: &ClauseLimits) -> Result<bool> {
        limits.check_state(state)?;
        Ok(self.insert_unchecked(feature, state, limits))
    }

    #[inline]
    pub(crate) fn insert_unchecked(&mut self, feature: u32, state: u32, limits: &ClauseLimits) -> bool {
        if self.literals.len() >= limits.max_literals as usize {
            return false;
        }
        match self.literals.binary_search(&feature) {
            Ok(_) => false,
            Err(pos) => {
                self.literals.insert(pos, feature);
                self.states.insert(pos, state);
                true
            }
        }
    }

    /// Verifies the sorted-parallel, spectrum, and capacity invariants.
    pub fn check_invariants(&self, limits: &ClauseLimits) -> std::result::Result<(), String> {
        if self.literals.len() != self.states.len() {
            return Err(format!("{} literals but {} states", self.literals.len(), self.states.len()));
        }
        if self.literals.len() > limits.max_literals as usize {
            return Err(format!("clause holds {} literals, cap is {}", self.literals.len(), limits.max_literals));
        }
        if let Some(w) = self.literals.windows(2).find(|w| w[0] >= w[1]) {
            return Err(format!("literals not strictly increasing: {} then {}", w[0], w[1]));
        }
        if let Some(&s) = self.states.iter().find(|&&s| s < limits.threshold || s > limits.max_state()) {
            return Err(format!("state {s} outside [{}, {}]", limits.threshold, limits.max_state()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseBank {
    clauses: Vec<SparseClause>,
    limits: ClauseLimits,
    feature_count: u32,
}

impl ClauseBank {
    /// `n` empty clauses over `o` features with `2N` states, threshold `t`
    /// and capacity `p`.
    pub fn new(n: usize, n_states: u32, threshold: u32, max_literals: u32, features: u32) -> Result<Self> {
        let limits = ClauseLimits::new(n_states, threshold, max_literals)?;
        Ok(Self::with_limits(n, limits, features))
    }

    pub fn with_limits(n: usize, limits: ClauseLimits, features: u32) -> Self {
        Self { clauses: vec![SparseClause::new(); n], limits, feature_count: features }
    }

    pub(crate) fn from_clauses(clauses: Vec<SparseClause>, limits: ClauseLimits, features: u32) -> Self {
        Self { clauses, limits, feature_count: features }
    }

    #[inline]
    pub fn limits(&self) -> &ClauseLimits {
        &self.limits
    }

    pub fn feature_count(&self) -> u32 {
        self.feature_count
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[SparseClause] {
        &self.clauses
    }

    pub fn clause(&self, j: usize) -> &SparseClause {
        &self.clauses[j]
    }

    pub fn clause_mut(&mut self, j: usize) -> &mut SparseClause {
        &mut self.clauses[j]
    }

    pub fn evaluate_all(&self, row: &SparseRow, mode: EvalMode) -> Vec<bool> {
        self.clauses.iter().map(|c| c.evaluate(row, mode, &self.limits)).collect()
    }

    /// Same as [`ClauseBank::evaluate_all`], split across the rayon pool.
    pub fn evaluate_all_par(&self, row: &SparseRow, mode: EvalMode) -> Vec<bool> {
        self.clauses.par_iter().map(|c| c.evaluate(row, mode, &self.limits)).collect()
    }

    /// Total literal entries stored across all clauses.
    pub fn stored_literals(&self) -> usize {
        self.clauses.iter().map(SparseClause::len).sum()
    }

    pub fn mean_clause_size(&self) -> f64 {
        if self.clauses.is_empty() {
            return 0.0;
        }
        self.stored_literals() as f64 / self.clauses.len() as f64
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (j, c) in self.clauses.iter().enumerate() {
            c.check_invariants(&self.limits).map_err(|e| format!("clause {j}: {e}"))?;
            if let Some(&last) = c.literals.last() {
                if last >= self.feature_count {
                    return Err(format!("clause {j}: feature {last} >= o={}", self.feature_count));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 128;

    fn limits() -> ClauseLimits {
        ClauseLimits::new(N, 30, 115).unwrap()
    }

    fn row(v: &[u32]) -> SparseRow {
        SparseRow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn new_bank_starts_empty() {
        let bank = ClauseBank::new(4, 128, 30, 115, 100).unwrap();
        assert_eq!(bank.len(), 4);
        assert!(bank.clauses().iter().all(SparseClause::is_empty));
        assert_eq!(bank.evaluate_all(&row(&[1, 2]), EvalMode::Inference), vec![false; 4]);
        assert_eq!(bank.evaluate_all(&row(&[1, 2]), EvalMode::Training), vec![true; 4]);
    }

    #[test]
    fn new_bank_validates() {
        assert!(ClauseBank::new(4, 128, 129, 10, 10).is_err());
        assert!(ClauseBank::new(4, 128, 30, 0, 10).is_err());
        assert!(ClauseBank::new(4, 128, 0, 10, 10).is_err());
        assert!(ClauseBank::new(4, 128, 128, 10, 10).is_ok());
    }

    #[test]
    fn evaluate_examples() {
        let l = limits();
        let c = SparseClause::from_parts(vec![3], vec![200], &l).unwrap();
        assert!(c.evaluate(&row(&[1, 3, 7]), EvalMode::Inference, &l));

        let c = SparseClause::from_parts(vec![3, 5], vec![200, 130], &l).unwrap();
        assert!(!c.evaluate(&row(&[3, 7]), EvalMode::Inference, &l));

        let c = SparseClause::from_parts(vec![3], vec![100], &l).unwrap();
        assert!(c.evaluate(&row(&[]), EvalMode::Training, &l));
        assert!(!c.evaluate(&row(&[]), EvalMode::Inference, &l));
    }

    #[test]
    fn reward_saturates_and_flips() {
        let l = limits();
        let mut c = SparseClause::from_parts(vec![1, 2], vec![2 * N, N], &l).unwrap();
        c.reward_literal(1, &l).unwrap();
        assert_eq!(c.state_of(1), Some(2 * N));
        c.reward_literal(2, &l).unwrap();
        assert_eq!(c.state_of(2), Some(N + 1));
        assert!(l.is_included(c.state_of(2).unwrap()));
    }

    #[test]
    fn penalize_at_threshold_removes() {
        let l = limits();
        let mut c = SparseClause::from_parts(vec![4, 8], vec![l.threshold, 50], &l).unwrap();
        assert!(c.penalize_literal(4, &l).unwrap());
        assert_eq!(c.literals(), &[8]);
        assert_eq!(c.states(), &[50]);
        assert!(!c.penalize_literal(8, &l).unwrap());
        assert_eq!(c.state_of(8), Some(49));
        assert!(matches!(c.penalize_literal(4, &l), Err(StmError::LiteralNotPresent(4))));
        assert!(c.reward_literal(4, &l).is_err());
    }

    #[test]
    fn insert_respects_capacity_and_duplicates() {
        let l = ClauseLimits::new(N, 30, 2).unwrap();
        let mut c = SparseClause::new();
        assert!(c.insert_literal(5, N, &l).unwrap());
        assert_eq!(c.state_of(5), Some(N));
        assert!(!c.insert_literal(5, N + 9, &l).unwrap());
        assert_eq!(c.state_of(5), Some(N));
        assert!(c.insert_literal(2, N, &l).unwrap());
        assert_eq!(c.literals(), &[2, 5]);
        assert!(!c.insert_literal(9, N, &l).unwrap());
        assert_eq!(c.len(), 2);
        assert!(c.insert_literal(9, 29, &l).is_err());
        assert!(c.insert_literal(9, 2 * N + 1, &l).is_err());
    }

    #[test]
    fn size_and_included() {
        let l = limits();
        assert_eq!(SparseClause::new().len(), 0);
        assert!(SparseClause::new().included_literals(&l).is_empty());
        let mut c = SparseClause::from_parts(vec![2, 9], vec![N, N + 1], &l).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.included_literals(&l), vec![9]);
        for _ in 0..(N + 1 - l.threshold + 1) {
            c.penalize_literal(9, &l).unwrap();
        }
        assert_eq!(c.len(), 1);
        assert!(c.included_literals(&l).is_empty());
    }

    #[test]
    fn from_parts_rejects_broken_clauses() {
        let l = limits();
        assert!(SparseClause::from_parts(vec![2, 1], vec![40, 40], &l).is_err());
        assert!(SparseClause::from_parts(vec![1], vec![40, 40], &l).is_err());
        assert!(SparseClause::from_parts(vec![1], vec![10], &l).is_err());
    }
}
