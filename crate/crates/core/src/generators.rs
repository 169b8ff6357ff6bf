//! Instance constructors: tightness gadgets, the 3-PARTITION reduction and
//! seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instance::{EntitledSpec, Instance, Job, SetSystemSpec, Valuations};
use crate::rational::{int, ratio, Rational};

fn one_based(items: &[usize]) -> Bundle {
    Bundle::from_items(items.iter().map(|j| j - 1))
}

/// Instance on which no allocation gives every agent more than 2/3 of its
/// MMS. `4n` items; the family is spanned by the triples
/// `{4k+1, 4k+2, 4k+3}` and `{4k+3, 4k+4, 4k+6}` (1-based, with `4k+6`
/// wrapping to item 2 for `k = n-1`). The first `r` agents value every item
/// except `4, 8, ...`; the others every item except `1, 5, ...`.
pub fn gen_two_thirds_bound(n: usize, r: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Malformed("the gadget needs n >= 2".into()));
    }
    if r == 0 || r >= n {
        return Err(Error::Malformed(format!("r = {r} must satisfy 0 < r < n")));
    }
    let m = 4 * n;
    let mut sets = Vec::with_capacity(2 * n);
    for k in 0..n {
        sets.push(one_based(&[4 * k + 1, 4 * k + 2, 4 * k + 3]));
        let last = if k == n - 1 { 2 } else { 4 * k + 6 };
        sets.push(one_based(&[4 * k + 3, 4 * k + 4, last]));
    }
    let row = |skip: usize| -> Vec<Rational> { (1..=m).map(|j| int(i64::from(j % 4 != skip))).collect() };
    let values = (0..n).map(|i| if i < r { row(0) } else { row(1) }).collect();
    Ok(Instance::shared(values, m, SetSystemSpec::explicit(sets)))
}

/// Unit-value instance with `2n` items where no allocation gives every agent
/// more than half its MMS. Agents `1..n-1` may take the pairs
/// `{1, 2}, {3, 4}, ..., {2n-1, 2n}`; agent `n` the pairs
/// `{2, 3}, ..., {2n-2, 2n-1}` and `{1, 2n}`.
pub fn gen_asymmetric_half(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Malformed("the gadget needs n >= 2".into()));
    }
    let m = 2 * n;
    let h1 = SetSystemSpec::explicit((0..n).map(|i| Bundle::pair(2 * i, 2 * i + 1)));
    let mut h2_sets: Vec<Bundle> = (0..n - 1).map(|i| Bundle::pair(2 * i + 1, 2 * i + 2)).collect();
    h2_sets.push(Bundle::pair(0, m - 1));
    let h2 = SetSystemSpec::explicit(h2_sets);
    let mut systems = vec![h1; n - 1];
    systems.push(h2);
    Ok(Instance { n, m, values: vec![vec![int(1); m]; n], valuations: Valuations::Asymmetric(systems) })
}

/// The 3-PARTITION reduction: `n = |a|/3` identical agents with unit values
/// over `3n` items, where a set is independent iff it has at most three
/// items of total weight at most `T = sum(a)/n`. Every agent's MMS is 3
/// iff `a` splits into `n` triples of sum `T`.
pub fn gen_three_partition(a: &[u64]) -> Result<Instance> {
    if a.is_empty() || !a.len().is_multiple_of(3) {
        return Err(Error::NotTripleMultiple(a.len()));
    }
    if a.contains(&0) {
        return Err(Error::Malformed("3-PARTITION numbers must be positive".into()));
    }
    let n = a.len() / 3;
    let sum: u64 = a.iter().sum();
    if !sum.is_multiple_of(n as u64) {
        return Err(Error::NotDivisible { sum, n });
    }
    let target = sum / n as u64;
    let m = a.len();
    let mut sets = Vec::new();
    for x in 0..m {
        for y in x + 1..m {
            for z in y + 1..m {
                if a[x] + a[y] + a[z] <= target {
                    sets.push(Bundle::from_items([x, y, z]));
                }
            }
            if a[x] + a[y] <= target {
                sets.push(Bundle::pair(x, y));
            }
        }
        if a[x] <= target {
            sets.push(Bundle::singleton(x));
        }
    }
    Ok(Instance::shared(vec![vec![int(1); m]; n], m, SetSystemSpec::explicit(sets)))
}

/// Inclusive range of value numerators; denominators are drawn from 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueRange {
    pub lo: u32,
    pub hi: u32,
}

impl Default for ValueRange {
    fn default() -> Self {
        ValueRange { lo: 0, hi: 10 }
    }
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, m: usize, range: ValueRange) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let p = rng.gen_range(range.lo..=range.hi.max(range.lo));
                    let q = rng.gen_range(1..=3);
                    ratio(i64::from(p), q)
                })
                .collect()
        })
        .collect()
}

fn random_sets(rng: &mut ChaCha8Rng, m: usize, count: usize, density: f64) -> Vec<Bundle> {
    (0..count).map(|_| Bundle::from_items((0..m).filter(|_| rng.gen_bool(density)))).collect()
}

/// Seeded explicit-family instance. The family is the downward closure of
/// up to `m` random sets, each containing every item with probability
/// `density`; `density >= 1` gives the full item set.
pub fn gen_random_hereditary(m: usize, n: usize, density: f64, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = if density >= 1.0 {
        vec![Bundle::full(m)]
    } else {
        let count = rng.gen_range(1..=m.max(1));
        random_sets(&mut rng, m, count, density.max(0.0))
    };
    let values = random_values(&mut rng, n, m, range);
    Instance::shared(values, m, SetSystemSpec::explicit(sets))
}

/// Seeded additive instance.
pub fn gen_random_additive(m: usize, n: usize, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = random_values(&mut rng, n, m, range);
    Instance::shared(values, m, SetSystemSpec::Free)
}

/// Seeded budget instance: integer sizes in `1..=4`, one budget per agent
/// between 1 and the total size, entitled ordering by budget.
pub fn gen_random_budget(m: usize, n: usize, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<Rational> = (0..m).map(|_| int(rng.gen_range(1..=4))).collect();
    let total: i64 = sizes.iter().map(|s| s.to_integer().try_into().unwrap_or(4)).sum::<i64>().max(1);
    let budgets: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=total)).collect();
    let values = random_values(&mut rng, n, m, range);
    let systems: Vec<SetSystemSpec> =
        budgets.iter().map(|&b| SetSystemSpec::Budget { sizes: sizes.clone(), budget: int(b) }).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| (budgets[a], a));
    Instance { n, m, values, valuations: Valuations::Entitled(EntitledSpec { order: Some(order), systems }) }
}

/// Seeded conflict-graph instance with maximum degree below `n`.
pub fn gen_random_conflict(m: usize, n: usize, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    pairs.shuffle(&mut rng);
    let mut degree = vec![0usize; m];
    let mut edges = Vec::new();
    for (a, b) in pairs {
        if degree[a] + 1 < n && degree[b] + 1 < n && rng.gen_bool(0.3) {
            degree[a] += 1;
            degree[b] += 1;
            edges.push((a, b));
        }
    }
    let values = random_values(&mut rng, n, m, range);
    Instance::shared(values, m, SetSystemSpec::conflict(edges))
}

/// Seeded interval instance: processing times 1 or 2 on a short horizon so
/// that windows overlap.
pub fn gen_random_interval(m: usize, n: usize, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = (m as u64 / 2).max(2);
    let jobs = (0..m)
        .map(|_| {
            let p = rng.gen_range(1..=2);
            let r = rng.gen_range(1..=horizon);
            let d = r + p - 1 + rng.gen_range(0..=3);
            Job::new(p, r, d)
        })
        .collect();
    let values = random_values(&mut rng, n, m, range);
    Instance::shared(values, m, SetSystemSpec::Interval { jobs })
}

/// Seeded entitled instance with nested explicit families: the agents, in a
/// random order, each add one or two random sets to the previous family.
pub fn gen_random_entitled(m: usize, n: usize, range: ValueRange, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut systems = vec![SetSystemSpec::Free; n];
    let mut sets: Vec<Bundle> = Vec::new();
    for &agent in &order {
        let extra = rng.gen_range(1..=2);
        sets.extend(random_sets(&mut rng, m, extra, 0.5));
        systems[agent] = SetSystemSpec::explicit(sets.clone());
    }
    let values = random_values(&mut rng, n, m, range);
    Instance { n, m, values, valuations: Valuations::Entitled(EntitledSpec { order: Some(order), systems }) }
}
