use rand::Rng;

use crate::active::ActiveLiteralRecord;
use crate::clause::{ClauseLimits, SparseClause};
use crate::sparse::SparseRow;

/// Reinforces a clause that matched and votes for the desired output.
///
/// Literals present in `row` are rewarded with probability 1 (boosted true
/// positives). Literals absent from `row` can only be excluded ones; they
/// are penalised with probability `1/s`. Every row feature the clause does
/// not track is offered to the active literal record of `al_class`. The
/// weight grows by one in magnitude.
#[allow(clippy::too_many_arguments)]
pub fn type_ia_feedback<R: Rng + ?Sized>(
    clause: &mut SparseClause,
    weight: &mut i32,
    row: &SparseRow,
    active: &mut ActiveLiteralRecord,
    al_class: usize,
    limits: &ClauseLimits,
    specificity: f64,
    rng: &mut R,
) {
    let forget = 1.0 / specificity;
    for pos in (0..clause.len()).rev() {
        if row.contains(clause.literals()[pos]) {
            clause.reward_at(pos, limits);
        } else if rng.gen::<f64>() < forget {
            clause.penalize_at(pos, limits);
        }
    }

    if !active.is_frozen(al_class) {
        let tracked = clause.literals();
        let mut k = 0;
        for &f in row.indices() {
            while k < tracked.len() && tracked[k] < f {
                k += 1;
            }
            if k < tracked.len() && tracked[k] == f {
                continue;
            }
            active.submit(al_class, f, rng);
        }
    }

    *weight = if *weight >= 0 { weight.saturating_add(1) } else { weight.saturating_sub(1) };
}

/// Erodes a clause that did not match: each literal is penalised with
/// probability `1/s`, falling out of the clause below the threshold.
pub fn type_ib_feedback<R: Rng + ?Sized>(
    clause: &mut SparseClause,
    limits: &ClauseLimits,
    specificity: f64,
    rng: &mut R,
) {
    let forget = 1.0 / specificity;
    for pos in (0..clause.len()).rev() {
        if rng.gen::<f64>() < forget {
            clause.penalize_at(pos, limits);
        }
    }
}

/// Adds discrimination to a clause that matched while voting against the
/// desired output.
///
/// Excluded literals absent from `row` are rewarded towards inclusion. If the
/// clause has room, up to `k_intro` members of the `class` record that are
/// absent from `row` and not yet tracked are inserted at `insert_state`. The
/// weight moves one step towards (and past) zero.
#[allow(clippy::too_many_arguments)]
pub fn type_ii_feedback<R: Rng + ?Sized>(
    clause: &mut SparseClause,
    weight: &mut i32,
    row: &SparseRow,
    active: &ActiveLiteralRecord,
    class: usize,
    limits: &ClauseLimits,
    insert_state: u32,
    k_intro: usize,
    rng: &mut R,
) {
    for pos in 0..clause.len() {
        if !limits.is_included(clause.states()[pos]) && !row.contains(clause.literals()[pos]) {
            clause.reward_at(pos, limits);
        }
    }

    let room = (limits.max_literals as usize).saturating_sub(clause.len());
    if room > 0 {
        let picks = active.sample_where(class, k_intro.min(room), rng, |f| {
            !row.contains(f) && clause.state_of(f).is_none()
        });
        for f in picks {
            #[cfg(debug_assertions)]
            debug_assert!(active.ever_held(class, f));
            clause.insert_unchecked(f, insert_state, limits);
        }
    }

    *weight = if *weight >= 0 { weight.saturating_sub(1) } else { weight.saturating_add(1) };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::AlMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: u32 = 128;

    fn limits(p: u32) -> ClauseLimits {
        ClauseLimits::new(N, 30, p).unwrap()
    }

    fn row(v: &[u32]) -> SparseRow {
        SparseRow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn type_ia_rewards_submits_and_strengthens() {
        let l = limits(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SparseClause::from_parts(vec![3], vec![N + 2], &l).unwrap();
        let mut w = 0;
        let mut al = ActiveLiteralRecord::new(2, 10, AlMode::Dynamic);
        type_ia_feedback(&mut c, &mut w, &row(&[3, 7]), &mut al, 1, &l, 4.0, &mut rng);
        assert_eq!(c.state_of(3), Some(N + 3));
        assert_eq!(al.list(1), &[7]);
        assert!(al.list(0).is_empty());
        assert_eq!(w, 1);
    }

    #[test]
    fn type_ia_on_empty_clause_only_populates() {
        let l = limits(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SparseClause::new();
        let mut w = 5;
        let mut al = ActiveLiteralRecord::new(1, 10, AlMode::Static);
        type_ia_feedback(&mut c, &mut w, &row(&[4]), &mut al, 0, &l, 4.0, &mut rng);
        assert!(c.is_empty());
        assert_eq!(al.list(0), &[4]);
        assert_eq!(w, 6);

        let mut w = -3;
        type_ia_feedback(&mut c, &mut w, &row(&[4]), &mut al, 0, &l, 4.0, &mut rng);
        assert_eq!(w, -4);
    }

    #[test]
    fn type_ib_removes_at_threshold_when_firing() {
        let l = limits(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // s just above 1 makes the 1/s draw fire almost surely.
        let mut c = SparseClause::from_parts(vec![3], vec![l.threshold], &l).unwrap();
        type_ib_feedback(&mut c, &l, 1.0 + 1e-12, &mut rng);
        assert!(c.is_empty());

        let mut c = SparseClause::from_parts(vec![3, 4], vec![50, N + 1], &l).unwrap();
        let before = c.clone();
        for _ in 0..1000 {
            type_ib_feedback(&mut c, &l, f64::INFINITY, &mut rng);
        }
        assert_eq!(c, before);

        let mut empty = SparseClause::new();
        type_ib_feedback(&mut empty, &l, 2.0, &mut rng);
        assert!(empty.is_empty());
    }

    #[test]
    fn type_ii_introduces_absent_active_literal() {
        let l = limits(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SparseClause::from_parts(vec![3], vec![N + 1], &l).unwrap();
        let mut al = ActiveLiteralRecord::new(2, 4, AlMode::Static);
        al.submit(1, 9, &mut rng);
        let mut w = 2;
        type_ii_feedback(&mut c, &mut w, &row(&[3]), &al, 1, &l, N, 1, &mut rng);
        assert_eq!(c.literals(), &[3, 9]);
        assert_eq!(c.state_of(9), Some(N));
        assert_eq!(c.state_of(3), Some(N + 1));
        assert_eq!(w, 1);
    }

    #[test]
    fn type_ii_at_capacity_still_pushes_excluded() {
        let l = limits(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SparseClause::from_parts(vec![3, 5], vec![N + 1, N], &l).unwrap();
        let mut al = ActiveLiteralRecord::new(1, 4, AlMode::Static);
        al.submit(0, 9, &mut rng);
        let mut w = -1;
        type_ii_feedback(&mut c, &mut w, &row(&[3]), &al, 0, &l, N, 1, &mut rng);
        assert_eq!(c.literals(), &[3, 5]);
        assert_eq!(c.state_of(5), Some(N + 1));
        assert_eq!(w, 0);
    }

    #[test]
    fn type_ii_without_eligible_literals() {
        let l = limits(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SparseClause::new();
        let mut al = ActiveLiteralRecord::new(1, 4, AlMode::Static);
        al.submit(0, 2, &mut rng);
        al.submit(0, 6, &mut rng);
        let mut w = 0;
        type_ii_feedback(&mut c, &mut w, &row(&[2, 6, 8]), &al, 0, &l, N, 3, &mut rng);
        assert!(c.is_empty());
        assert_eq!(w, -1);
    }
}
