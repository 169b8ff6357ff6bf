//! Single-machine interval scheduling: exact feasibility, exact best
//! subsets by subset dynamic programming, and a local-ratio 1/2-approximation.

use num_traits::Zero;

use crate::instance::Job;
use crate::rational::Rational;

/// Places jobs in the given order, each as early as possible.
/// Returns the start period of every job, or `None` if some job misses its
/// deadline.
pub fn place_in_order(jobs: &[Job], order: &[usize]) -> Option<Vec<u64>> {
    let mut free = 1u64;
    let mut starts = Vec::with_capacity(order.len());
    for &j in order {
        let job = &jobs[j];
        let start = free.max(job.release);
        if start + job.processing - 1 > job.deadline {
            return None;
        }
        starts.push(start);
        free = start + job.processing;
    }
    Some(starts)
}

/// Earliest-finish table over all subsets of `items`: entry `mask` is the
/// first free period after scheduling exactly those jobs, or `None`.
/// Also records the last job of an optimal order for reconstruction.
fn finish_table(jobs: &[Job], items: &[usize]) -> (Vec<Option<u64>>, Vec<u8>) {
    let k = items.len();
    let mut finish = vec![None; 1 << k];
    let mut last = vec![u8::MAX; 1 << k];
    finish[0] = Some(1);
    for mask in 1usize..1 << k {
        for pos in 0..k {
            if mask >> pos & 1 == 0 {
                continue;
            }
            let Some(free) = finish[mask ^ 1 << pos] else { continue };
            let job = &jobs[items[pos]];
            let start = free.max(job.release);
            if start + job.processing - 1 <= job.deadline {
                let end = start + job.processing;
                if finish[mask].is_none_or(|f| end < f) {
                    finish[mask] = Some(end);
                    last[mask] = pos as u8;
                }
            }
        }
    }
    (finish, last)
}

/// Exact feasibility of scheduling all of `items` (at most ~20 jobs).
pub fn feasible(jobs: &[Job], items: &[usize]) -> bool {
    schedule(jobs, items).is_some()
}

/// A feasible schedule for `items` as `(item, start)` pairs in time order.
pub fn schedule(jobs: &[Job], items: &[usize]) -> Option<Vec<(usize, u64)>> {
    if items.is_empty() {
        return Some(Vec::new());
    }
    let (finish, last) = finish_table(jobs, items);
    let full = (1usize << items.len()) - 1;
    finish[full]?;
    let mut order = Vec::with_capacity(items.len());
    let mut mask = full;
    while mask != 0 {
        let pos = last[mask] as usize;
        order.push(items[pos]);
        mask ^= 1 << pos;
    }
    order.reverse();
    let starts = place_in_order(jobs, &order)?;
    Some(order.into_iter().zip(starts).collect())
}

/// Maximum-value feasible subset of `items`, exactly.
pub fn best_subset(jobs: &[Job], values: &[Rational], items: &[usize]) -> (Vec<usize>, Rational) {
    let (finish, _) = finish_table(jobs, items);
    let mut best_mask = 0usize;
    let mut best = Rational::zero();
    let mut sums = vec![Rational::zero(); finish.len()];
    for mask in 1..finish.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &values[items[low]];
        if finish[mask].is_some() && sums[mask] > best {
            best = sums[mask].clone();
            best_mask = mask;
        }
    }
    let chosen = (0..items.len()).filter(|p| best_mask >> p & 1 == 1).map(|p| items[p]).collect();
    (chosen, best)
}

/// Whether two jobs fit together, by trying both orders.
pub fn pair_feasible(jobs: &[Job], a: usize, b: usize) -> bool {
    place_in_order(jobs, &[a, b]).is_some() || place_in_order(jobs, &[b, a]).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Placement {
    item: usize,
    start: u64,
    end: u64, // last occupied period
}

impl Placement {
    fn overlaps(&self, other: &Placement) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Local-ratio scheduling: every job is expanded into all of its feasible
/// placements, weights are peeled off around the placement that ends first,
/// and the stacked placements are unwound greedily. The result is feasible
/// and worth at least half of the optimum.
pub fn local_ratio(jobs: &[Job], values: &[Rational], items: &[usize]) -> Vec<(usize, u64)> {
    let mut placements = Vec::new();
    let mut weights = Vec::new();
    for &item in items {
        if values[item].is_zero() {
            continue;
        }
        let job = &jobs[item];
        for start in job.release..=job.latest_start() {
            placements.push(Placement { item, start, end: start + job.processing - 1 });
            weights.push(values[item].clone());
        }
    }
    let mut stack = Vec::new();
    loop {
        let pick = (0..placements.len())
            .filter(|&p| weights[p] > Rational::zero())
            .min_by_key(|&p| (placements[p].end, placements[p].item, placements[p].start));
        let Some(pick) = pick else { break };
        let chosen = placements[pick];
        let eps = weights[pick].clone();
        for p in 0..placements.len() {
            let other = &placements[p];
            if weights[p] > Rational::zero() && (other.item == chosen.item || other.overlaps(&chosen)) {
                weights[p] -= &eps;
            }
        }
        stack.push(chosen);
    }
    let mut accepted: Vec<Placement> = Vec::new();
    while let Some(p) = stack.pop() {
        if accepted.iter().all(|a| a.item != p.item && !a.overlaps(&p)) {
            accepted.push(p);
        }
    }
    accepted.sort_by_key(|p| p.start);
    accepted.into_iter().map(|p| (p.item, p.start)).collect()
}

/// Checks a claimed schedule: windows respected, no overlaps.
pub fn verify_schedule(jobs: &[Job], schedule: &[(usize, u64)]) -> bool {
    let mut spans: Vec<(u64, u64)> = Vec::with_capacity(schedule.len());
    for &(item, start) in schedule {
        let job = &jobs[item];
        if start < job.release || start + job.processing - 1 > job.deadline {
            return false;
        }
        spans.push((start, start + job.processing - 1));
    }
    spans.sort_unstable();
    spans.windows(2).all(|w| w[0].1 < w[1].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    /// Permutation brute force, independent of the subset DP.
    fn feasible_by_permutation(jobs: &[Job], items: &[usize]) -> bool {
        fn rec(jobs: &[Job], rest: &mut Vec<usize>, order: &mut Vec<usize>) -> bool {
            if rest.is_empty() {
                return place_in_order(jobs, order).is_some();
            }
            for i in 0..rest.len() {
                let j = rest.remove(i);
                order.push(j);
                let ok = rec(jobs, rest, order);
                order.pop();
                rest.insert(i, j);
                if ok {
                    return true;
                }
            }
            false
        }
        rec(jobs, &mut items.to_vec(), &mut Vec::new())
    }

    #[test]
    fn pair_cases() {
        let jobs = vec![Job::new(1, 1, 2), Job::new(1, 1, 2)];
        assert!(pair_feasible(&jobs, 0, 1));
        let jobs = vec![Job::new(1, 1, 1), Job::new(1, 1, 1)];
        assert!(!pair_feasible(&jobs, 0, 1));
    }

    #[test]
    fn three_unit_jobs_in_one_period() {
        let jobs = vec![Job::new(1, 1, 1); 3];
        let values = vec![int(1); 3];
        let got = local_ratio(&jobs, &values, &[0, 1, 2]);
        assert_eq!(got.len(), 1);
        assert!(verify_schedule(&jobs, &got));
        assert_eq!(best_subset(&jobs, &values, &[0, 1, 2]).1, int(1));
    }

    #[test]
    fn subset_dp_matches_permutations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let k = rng.gen_range(1..=6);
            let jobs: Vec<Job> = (0..k)
                .map(|_| {
                    let p = rng.gen_range(1..=3);
                    let r = rng.gen_range(1..=5);
                    let d = r + p - 1 + rng.gen_range(0..=4);
                    Job::new(p, r, d)
                })
                .collect();
            let items: Vec<usize> = (0..k).collect();
            assert_eq!(feasible(&jobs, &items), feasible_by_permutation(&jobs, &items), "{jobs:?}");
            if let Some(s) = schedule(&jobs, &items) {
                assert!(verify_schedule(&jobs, &s));
            }
        }
    }
}
