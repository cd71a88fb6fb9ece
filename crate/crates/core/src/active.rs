//! Per-class active literal records.
//!
//! Every class owns a bounded, duplicate-free list of candidate feature
//! indices. Type Ia feedback submits the features it observes; Type II
//! feedback draws from the list to extend clauses. A full static record
//! never changes again, a full dynamic record evicts a random slot.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sparse::SparseRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlMode {
    Static,
    Dynamic,
}

impl std::str::FromStr for AlMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "static" => Ok(Self::Static),
            "dynamic" => Ok(Self::Dynamic),
            other => Err(format!("unknown AL mode {other:?} (expected static or dynamic)")),
        }
    }
}

impl std::fmt::Display for AlMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Static => "static",
            Self::Dynamic => "dynamic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ActiveLiteralRecord {
    lists: Vec<Vec<u32>>,
    // feature -> slot, mirrors `lists`
    slots: Vec<HashMap<u32, usize>>,
    capacity: usize,
    mode: AlMode,
    // Every feature ever accepted per class; debug builds only.
    #[cfg(debug_assertions)]
    history: Vec<std::collections::HashSet<u32>>,
}

impl PartialEq for ActiveLiteralRecord {
    fn eq(&self, other: &Self) -> bool {
        self.lists == other.lists && self.capacity == other.capacity && self.mode == other.mode
    }
}

impl Eq for ActiveLiteralRecord {}

impl ActiveLiteralRecord {
    pub fn new(classes: usize, capacity: usize, mode: AlMode) -> Self {
        Self::from_lists(vec![Vec::new(); classes], capacity, mode)
    }

    /// Restores a record from stored lists. Duplicates within a list are dropped.
    pub fn from_lists(lists: Vec<Vec<u32>>, capacity: usize, mode: AlMode) -> Self {
        let mut clean = Vec::with_capacity(lists.len());
        let mut slots = Vec::with_capacity(lists.len());
        for list in lists {
            let mut map = HashMap::with_capacity(list.len());
            let mut kept = Vec::with_capacity(capacity.max(list.len()));
            for f in list {
                if let std::collections::hash_map::Entry::Vacant(slot) = map.entry(f) {
                    slot.insert(kept.len());
                    kept.push(f);
                }
            }
            clean.push(kept);
            slots.push(map);
        }
        Self {
            #[cfg(debug_assertions)]
            history: clean.iter().map(|l| l.iter().copied().collect()).collect(),
            lists: clean,
            slots,
            capacity,
            mode,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn mode(&self) -> AlMode {
        self.mode
    }

    pub fn class_count(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, class: usize) -> &[u32] {
        &self.lists[class]
    }

    pub fn occupancy(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    pub fn total_entries(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    #[inline]
    pub fn contains(&self, class: usize, feature: u32) -> bool {
        self.slots[class].contains_key(&feature)
    }

    /// True when submissions to `class` can no longer change its list.
    #[inline]
    pub fn is_frozen(&self, class: usize) -> bool {
        self.lists[class].len() >= self.capacity
            && (self.mode == AlMode::Static || self.capacity == 0)
    }

    /// Offers `feature` to the record of `class`.
    pub fn submit<R: Rng + ?Sized>(&mut self, class: usize, feature: u32, rng: &mut R) -> bool {
        if self.is_frozen(class) || self.slots[class].contains_key(&feature) {
            return false;
        }
        let list = &mut self.lists[class];
        let slots = &mut self.slots[class];
        if list.len() < self.capacity {
            slots.insert(feature, list.len());
            list.push(feature);
        } else {
            let slot = rng.gen_range(0..list.len());
            slots.remove(&list[slot]);
            slots.insert(feature, slot);
            list[slot] = feature;
        }
        #[cfg(debug_assertions)]
        self.history[class].insert(feature);
        true
    }

    /// Whether `feature` was ever accepted into the record of `class`.
    #[cfg(debug_assertions)]
    pub fn ever_held(&self, class: usize, feature: u32) -> bool {
        self.history[class].contains(&feature)
    }

    /// Up to `k` distinct members of `class` that are absent from `row`,
    /// drawn uniformly without replacement.
    pub fn sample_absent<R: Rng + ?Sized>(
        &self,
        class: usize,
        row: &SparseRow,
        k: usize,
        rng: &mut R,
    ) -> Vec<u32> {
        self.sample_where(class, k, rng, |f| !row.contains(f))
    }

    /// Reservoir-samples up to `k` members of `class` satisfying `eligible`.
    pub(crate) fn sample_where<R, F>(&self, class: usize, k: usize, rng: &mut R, mut eligible: F) -> Vec<u32>
    where
        R: Rng + ?Sized,
        F: FnMut(u32) -> bool,
    {
        let mut picked = Vec::with_capacity(k);
        if k == 0 {
            return picked;
        }
        let mut seen = 0usize;
        for &f in &self.lists[class] {
            if !eligible(f) {
                continue;
            }
            seen += 1;
            if picked.len() < k {
                picked.push(f);
            } else {
                let j = rng.gen_range(0..seen);
                if j < k {
                    picked[j] = f;
                }
            }
        }
        picked
    }

    pub fn check_invariants(&self, features: u32) -> std::result::Result<(), String> {
        for (class, list) in self.lists.iter().enumerate() {
            if list.len() > self.capacity {
                return Err(format!("class {class}: {} entries exceed capacity {}", list.len(), self.capacity));
            }
            if let Some(&f) = list.iter().find(|&&f| f >= features) {
                return Err(format!("class {class}: feature {f} >= o={features}"));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("class {class}: duplicate entries"));
            }
            let slots = &self.slots[class];
            if slots.len() != list.len() || list.iter().enumerate().any(|(i, f)| slots.get(f) != Some(&i)) {
                return Err(format!("class {class}: slot index out of sync"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn submit_into_empty_record() {
        let mut al = ActiveLiteralRecord::new(2, 3, AlMode::Static);
        assert!(al.submit(0, 7, &mut rng()));
        assert_eq!(al.list(0), &[7]);
        assert_eq!(al.occupancy(), vec![1, 0]);
        assert!(!al.submit(0, 7, &mut rng()));
    }

    #[test]
    fn static_record_freezes_when_full() {
        let mut r = rng();
        let mut al = ActiveLiteralRecord::new(1, 2, AlMode::Static);
        al.submit(0, 3, &mut r);
        al.submit(0, 9, &mut r);
        assert!(!al.submit(0, 5, &mut r));
        assert_eq!(al.list(0), &[3, 9]);
    }

    #[test]
    fn dynamic_eviction_is_uniform() {
        // Each of the two slots should be replaced about half the time.
        let mut r = ChaCha8Rng::seed_from_u64(2024);
        let trials = 10_000;
        let mut first_evicted = 0;
        for _ in 0..trials {
            let mut al = ActiveLiteralRecord::from_lists(vec![vec![3, 9]], 2, AlMode::Dynamic);
            assert!(al.submit(0, 5, &mut r));
            match al.list(0) {
                [5, 9] => first_evicted += 1,
                [3, 5] => {}
                other => panic!("unexpected list {other:?}"),
            }
        }
        let freq = first_evicted as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.05, "slot 0 evicted with frequency {freq}");
    }

    #[test]
    fn sample_absent_filters_present_features() {
        let mut r = rng();
        let al = ActiveLiteralRecord::from_lists(vec![vec![1, 2, 3], vec![2], vec![]], 4, AlMode::Static);
        let row = SparseRow::new(vec![2]).unwrap();
        let mut got = al.sample_absent(0, &row, 5, &mut r);
        got.sort_unstable();
        assert_eq!(got, vec![1, 3]);
        assert!(al.sample_absent(1, &row, 1, &mut r).is_empty());
        assert!(al.sample_absent(2, &SparseRow::empty(), 3, &mut r).is_empty());

        let one = al.sample_absent(0, &row, 1, &mut r);
        assert_eq!(one.len(), 1);
        assert!(one[0] == 1 || one[0] == 3);
    }

    #[test]
    fn occupancy_bounded() {
        let mut r = rng();
        let mut al = ActiveLiteralRecord::new(3, 4, AlMode::Dynamic);
        assert_eq!(al.occupancy(), vec![0, 0, 0]);
        for f in 0..100 {
            al.submit(f as usize % 3, f, &mut r);
        }
        assert!(al.occupancy().iter().all(|&c| c <= 4));
        al.check_invariants(100).unwrap();
    }
}
