//! Seeded synthetic data for tests, benchmarks and smoke runs.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::{SparseDataset, SparseRow};

/// Rows over `features` inputs where each feature is on with probability
/// one half. The label is 1 exactly when every feature of `rule` is on.
pub fn planted_conjunction(features: u32, rule: &[u32], samples: usize, seed: u64) -> SparseDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for _ in 0..samples {
        let row = SparseRow::from_unsorted((0..features).filter(|_| rng.gen_bool(0.5)));
        labels.push(u32::from(rule.iter().all(|&f| row.contains(f))));
        rows.push(row);
    }
    SparseDataset::new(rows, labels, features, 2).expect("planted rows are in range")
}

/// Uniformly random sparse rows with `active` features each and random labels.
pub fn random_sparse(features: u32, classes: u32, samples: usize, active: usize, seed: u64) -> SparseDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..samples)
        .map(|_| SparseRow::from_unsorted((0..active).map(|_| rng.gen_range(0..features))))
        .collect();
    let labels = (0..samples).map(|_| rng.gen_range(0..classes)).collect();
    SparseDataset::new(rows, labels, features, classes).expect("random rows are in range")
}

/// Two-class text corpus with a Zipf-distributed shared vocabulary and a
/// set of class-indicative words. Documents are `(label, text)`.
#[derive(Debug, Clone)]
pub struct TextCorpusSpec {
    pub documents: usize,
    pub vocabulary: usize,
    pub words_per_doc: usize,
    /// Words drawn from the label's private cue list instead of the shared pool.
    pub cue_words_per_doc: usize,
    pub cues_per_class: usize,
    pub seed: u64,
}

impl Default for TextCorpusSpec {
    fn default() -> Self {
        Self {
            documents: 2_000,
            vocabulary: 20_000,
            words_per_doc: 22,
            cue_words_per_doc: 3,
            cues_per_class: 60,
            seed: 7,
        }
    }
}

pub fn text_corpus(spec: &TextCorpusSpec) -> Vec<(u32, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zipf = WeightedIndex::new((1..=spec.vocabulary).map(|r| 1.0 / r as f64)).expect("non-empty vocabulary");
    (0..spec.documents)
        .map(|_| {
            let label = rng.gen_range(0..2u32);
            let mut words: Vec<String> =
                (0..spec.words_per_doc).map(|_| format!("w{}", zipf.sample(&mut rng))).collect();
            for _ in 0..spec.cue_words_per_doc {
                let cue = rng.gen_range(0..spec.cues_per_class);
                // Cue words are mostly, not always, faithful to the label.
                let side = if rng.gen_bool(0.85) { label } else { 1 - label };
                words.push(format!("c{side}x{cue}"));
            }
            (label, words.join(" "))
        })
        .collect()
}
