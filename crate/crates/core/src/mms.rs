//! Brute-force maximin shares, best allocations and allocation checks.
//!
//! Everything here enumerates subsets of the full item set, so it is only
//! usable for small `m` (see [`BRUTE_FORCE_GATE`]). Values are scaled to a
//! common integer denominator whenever that fits in `i128`, which keeps the
//! `O(n 3^m)` partition searches fast.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::allocation::{AgentReport, Allocation, VerificationReport};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instance::{Instance, SetSystemSpec};
use crate::rational::Rational;
use crate::valuation::{interval, is_independent_in, ValuationOracle};

pub const BRUTE_FORCE_GATE: usize = 12;
/// Hard ceiling on table sizes regardless of the configured gate.
pub const MAX_TABLE_ITEMS: usize = 22;

/// Exact maximin share of one agent with a witness partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsRecord {
    pub agent: usize,
    pub parts: usize,
    pub mu: Rational,
    /// `parts` disjoint bundles covering all items, each worth at least `mu`.
    pub witness: Vec<Bundle>,
}

/// Lower and upper bounds on `mu_i` from the `n`-th most valuable item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsBounds {
    pub lower: Rational,
    pub upper: Rational,
    /// Set when there are fewer items than parts; both bounds are then zero.
    pub fewer_items_than_agents: bool,
}

fn check_gate(m: usize, gate: usize) -> Result<()> {
    if m > gate.min(MAX_TABLE_ITEMS) {
        return Err(Error::BruteForceGateExceeded { m, gate: gate.min(MAX_TABLE_ITEMS) });
    }
    Ok(())
}

/// `table[mask]` is true iff the item set `mask` is independent.
pub fn independence_table(system: &SetSystemSpec, m: usize) -> Vec<bool> {
    let size = 1usize << m;
    let mut table = vec![false; size];
    table[0] = true;
    for mask in 1..size {
        // Hereditary: every maximal proper subset must be independent first.
        let mut rest = mask;
        let mut ok = true;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            rest ^= low;
            if !table[mask ^ low] {
                ok = false;
                break;
            }
        }
        if ok {
            let bundle = Bundle::from_mask(mask as u64);
            ok = match system {
                SetSystemSpec::Interval { jobs } => interval::feasible(jobs, bundle.items()),
                sys => is_independent_in(sys, &bundle).unwrap_or(false),
            };
        }
        table[mask] = ok;
    }
    table
}

/// Item values of one agent over a common integer denominator.
#[derive(Debug, Clone)]
struct Scaled {
    numerators: Vec<i128>,
    denominator: BigInt,
}

fn scale(values: &[Rational]) -> Option<Scaled> {
    let denominator = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut total: i128 = 0;
    let mut numerators = Vec::with_capacity(values.len());
    for v in values {
        let x = (v.numer() * (&denominator / v.denom())).to_i128()?;
        total = total.checked_add(x)?;
        numerators.push(x);
    }
    Some(Scaled { numerators, denominator })
}

/// Per-mask values for one agent: `v_i(S)` for every item set `S`.
#[derive(Debug, Clone)]
pub struct ValueTable {
    m: usize,
    repr: TableRepr,
}

#[derive(Debug, Clone)]
enum TableRepr {
    Scaled { values: Vec<i128>, denominator: BigInt },
    Exact(Vec<Rational>),
}

fn fill<T: Clone + Ord + std::ops::Add<Output = T>>(items: &[T], zero: T, indep: &[bool]) -> Vec<T> {
    let size = indep.len();
    let mut sums = vec![zero.clone(); size];
    let mut best = vec![zero; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)].clone() + items[low].clone();
        if indep[mask] {
            best[mask] = sums[mask].clone();
        } else {
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                if best[mask ^ bit] > best[mask] {
                    best[mask] = best[mask ^ bit].clone();
                }
            }
        }
    }
    best
}

impl ValueTable {
    pub fn new(values: &[Rational], indep: &[bool]) -> Self {
        let m = values.len();
        let repr = match scale(values) {
            Some(s) => TableRepr::Scaled { values: fill(&s.numerators, 0, indep), denominator: s.denominator },
            None => TableRepr::Exact(fill(values, Rational::zero(), indep)),
        };
        ValueTable { m, repr }
    }

    pub fn for_agent(instance: &Instance, agent: usize, gate: usize) -> Result<Self> {
        check_gate(instance.m, gate)?;
        let indep = independence_table(instance.system(agent), instance.m);
        Ok(Self::new(&instance.values[agent], &indep))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, mask: usize) -> Rational {
        match &self.repr {
            TableRepr::Scaled { values, denominator } => {
                Rational::new(BigInt::from(values[mask]), denominator.clone())
            }
            TableRepr::Exact(v) => v[mask].clone(),
        }
    }

    pub fn value_of(&self, b: &Bundle) -> Rational {
        self.value(b.mask() as usize)
    }
}

/// Best min-block value over unlabeled `parts`-partitions of the full set,
/// where `table[S]` is the worth of block `S`. Returns the optimum and the
/// blocks of one optimal partition.
fn max_min_partition<T: Clone + Ord>(table: &[T], m: usize, parts: usize) -> (T, Vec<usize>) {
    let full = (1usize << m) - 1;
    if parts <= 1 || m == 0 {
        let mut blocks = vec![full];
        blocks.resize(parts.max(1), 0);
        let v = if parts >= 2 && m == 0 { table[0].clone() } else { table[full].clone() };
        return (v, blocks);
    }
    // levels[k - 1][mask]: best over k-partitions of `mask`.
    let mut levels: Vec<Vec<T>> = vec![table.to_vec()];
    let best_split = |prev: &Vec<T>, mask: usize| -> (T, usize) {
        if mask == 0 {
            return (table[0].clone(), 0);
        }
        let low = mask & mask.wrapping_neg();
        let others = mask ^ low;
        let mut best: Option<(T, usize)> = None;
        // Blocks containing the lowest item; the remainder is split further.
        let mut sub = others;
        loop {
            let block = sub | low;
            let a = &table[block];
            let b = &prev[mask ^ block];
            let v = if a < b { a } else { b };
            if best.as_ref().is_none_or(|(bv, _)| v > bv) {
                best = Some((v.clone(), block));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        best.unwrap()
    };
    for _ in 2..parts {
        let prev = levels.last().unwrap();
        let next: Vec<T> = (0..=full).map(|mask| best_split(prev, mask).0).collect();
        levels.push(next);
    }
    let mut blocks = Vec::with_capacity(parts);
    let (value, _) = best_split(levels.last().unwrap(), full);
    let mut mask = full;
    for k in (1..parts).rev() {
        let (_, block) = best_split(&levels[k - 1], mask);
        blocks.push(block);
        mask ^= block;
    }
    blocks.push(mask);
    (value, blocks)
}

fn masks_to_bundles(blocks: &[usize]) -> Vec<Bundle> {
    blocks.iter().map(|&b| Bundle::from_mask(b as u64)).collect()
}

/// `mu_i^parts` and an MMS partition, by exhaustive search.
pub fn compute_mms_exact(instance: &Instance, agent: usize, parts: usize, gate: usize) -> Result<MmsRecord> {
    let table = ValueTable::for_agent(instance, agent, gate)?;
    Ok(mms_from_table(&table, agent, parts))
}

pub fn mms_from_table(table: &ValueTable, agent: usize, parts: usize) -> MmsRecord {
    let (mu, blocks) = match &table.repr {
        TableRepr::Scaled { values, denominator } => {
            let (v, blocks) = max_min_partition(values, table.m, parts);
            (Rational::new(BigInt::from(v), denominator.clone()), blocks)
        }
        TableRepr::Exact(values) => max_min_partition(values, table.m, parts),
    };
    MmsRecord { agent, parts, mu, witness: masks_to_bundles(&blocks) }
}

/// MMS over complete partitions whose blocks are all independent. `None`
/// when no such partition exists.
pub fn mms_feasible_partition(instance: &Instance, agent: usize, parts: usize, gate: usize) -> Result<Option<MmsRecord>> {
    check_gate(instance.m, gate)?;
    let m = instance.m;
    let indep = independence_table(instance.system(agent), m);
    let values = &instance.values[agent];
    let table: Vec<Option<Rational>> = (0..1usize << m)
        .map(|mask| {
            indep[mask].then(|| {
                Bundle::from_mask(mask as u64).iter().fold(Rational::zero(), |acc, j| acc + &values[j])
            })
        })
        .collect();
    let (mu, blocks) = max_min_partition(&table, m, parts);
    Ok(mu.map(|mu| MmsRecord { agent, parts, mu, witness: masks_to_bundles(&blocks) }))
}

/// Exact MMS of every agent with `n` parts.
pub fn all_mms(instance: &Instance, gate: usize) -> Result<Vec<MmsRecord>> {
    (0..instance.n).map(|i| compute_mms_exact(instance, i, instance.n, gate)).collect()
}

/// Bounds from the `parts`-th most valuable item, valued through `oracle`
/// (a dependent singleton is worth zero).
pub fn mms_bounds_with(oracle: &ValuationOracle, m: usize, parts: usize) -> Result<MmsBounds> {
    if m < parts || parts == 0 {
        return Ok(MmsBounds { lower: Rational::zero(), upper: Rational::zero(), fewer_items_than_agents: true });
    }
    let mut singles = (0..m).map(|j| oracle.singleton_value(j)).collect::<Result<Vec<_>>>()?;
    singles.sort_by(|a, b| b.cmp(a));
    let lower = singles[parts - 1].clone();
    let upper = &lower * Rational::from_integer(BigInt::from(m));
    Ok(MmsBounds { lower, upper, fewer_items_than_agents: false })
}

pub fn mms_bounds(instance: &Instance, agent: usize) -> Result<MmsBounds> {
    mms_bounds_with(&ValuationOracle::exact(instance, agent), instance.m, instance.n)
}

/// An optimal labeled allocation under a max-min objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestAllocation<T> {
    pub objective: T,
    pub bundles: Vec<Bundle>,
}

/// Labeled max-min search: `tables[i][S]` is agent `i`'s worth for `S`.
fn max_min_allocation<T: Clone + Ord>(tables: &[Vec<T>], m: usize) -> (T, Vec<usize>) {
    let n = tables.len();
    let full = (1usize << m) - 1;
    // suffix[i][mask]: best min over agents i.. sharing `mask`.
    let mut suffix: Vec<Vec<T>> = vec![Vec::new(); n];
    suffix[n - 1] = tables[n - 1].clone();
    let best_split = |i: usize, next: &Vec<T>, mask: usize| -> (T, usize) {
        let mut best: Option<(T, usize)> = None;
        let mut sub = mask;
        loop {
            let a = &tables[i][sub];
            let b = &next[mask ^ sub];
            let v = if a < b { a } else { b };
            if best.as_ref().is_none_or(|(bv, _)| v > bv) {
                best = Some((v.clone(), sub));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        best.unwrap()
    };
    for i in (1..n - 1).rev() {
        suffix[i] = (0..=full).map(|mask| best_split(i, &suffix[i + 1], mask).0).collect();
    }
    if n == 1 {
        return (tables[0][full].clone(), vec![full]);
    }
    let (objective, _) = best_split(0, &suffix[1], full);
    let mut blocks = Vec::with_capacity(n);
    let mut mask = full;
    for i in 0..n - 1 {
        let (_, block) = best_split(i, &suffix[i + 1], mask);
        blocks.push(block);
        mask ^= block;
    }
    blocks.push(mask);
    (objective, blocks)
}

fn agent_tables(instance: &Instance, gate: usize) -> Result<Vec<ValueTable>> {
    (0..instance.n).map(|i| ValueTable::for_agent(instance, i, gate)).collect()
}

/// Largest achievable minimum bundle value over all allocations.
pub fn best_min_value(instance: &Instance, gate: usize) -> Result<BestAllocation<Rational>> {
    if instance.n == 0 {
        return Ok(BestAllocation { objective: Rational::zero(), bundles: vec![] });
    }
    let tables = agent_tables(instance, gate)?;
    let size = 1usize << instance.m;
    let scaled: Option<Vec<Vec<i128>>> = tables
        .iter()
        .map(|t| match &t.repr {
            TableRepr::Scaled { values, denominator } if denominator.is_one() => Some(values.clone()),
            _ => None,
        })
        .collect();
    let (objective, blocks) = match scaled {
        Some(ints) => {
            let (v, b) = max_min_allocation(&ints, instance.m);
            (Rational::from_integer(BigInt::from(v)), b)
        }
        None => {
            let exact: Vec<Vec<Rational>> = tables.iter().map(|t| (0..size).map(|s| t.value(s)).collect()).collect();
            max_min_allocation(&exact, instance.m)
        }
    };
    Ok(BestAllocation { objective, bundles: masks_to_bundles(&blocks) })
}

/// Largest achievable `min_i v_i(A_i) / mu_i` over allocations, counting
/// agents with `mu_i = 0` as fully satisfied.
pub fn best_min_ratio(instance: &Instance, gate: usize) -> Result<BestAllocation<Rational>> {
    if instance.n == 0 {
        return Ok(BestAllocation { objective: Rational::one(), bundles: vec![] });
    }
    let tables = agent_tables(instance, gate)?;
    let size = 1usize << instance.m;
    let ratios: Vec<Vec<Rational>> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mu = mms_from_table(t, i, instance.n).mu;
            (0..size)
                .map(|s| if mu.is_zero() { Rational::one() } else { (t.value(s) / &mu).min(Rational::one()) })
                .collect()
        })
        .collect();
    let (objective, blocks) = max_min_allocation(&ratios, instance.m);
    Ok(BestAllocation { objective, bundles: masks_to_bundles(&blocks) })
}

/// Checks `v_i(A_i) >= alpha mu_i` for every agent against supplied MMS
/// records. An agent without a record fails.
pub fn verify_with_records(
    instance: &Instance,
    allocation: &Allocation,
    alpha: &Rational,
    records: &[Option<MmsRecord>],
    require_independent: bool,
) -> Result<VerificationReport> {
    let mut agents = Vec::with_capacity(instance.n);
    let mut disjoint = true;
    let mut seen = vec![false; instance.m];
    for b in &allocation.bundles {
        for j in b.iter() {
            if j >= instance.m {
                return Err(Error::IndexOutOfRange(format!("item {} in allocation", j + 1)));
            }
            if std::mem::replace(&mut seen[j], true) {
                disjoint = false;
            }
        }
    }
    for i in 0..instance.n {
        let oracle = ValuationOracle::exact(instance, i);
        let bundle = allocation.bundles.get(i).cloned().unwrap_or_default();
        let value = oracle.exact_value(&bundle)?;
        let independent = oracle.is_independent(&bundle).unwrap_or(false);
        let (mu, ratio, pass) = match records.get(i).and_then(|r| r.as_ref()) {
            Some(rec) => {
                let ratio = if rec.mu.is_zero() { None } else { Some(&value / &rec.mu) };
                let meets = value >= alpha * &rec.mu;
                (Some(rec.mu.clone()), ratio, meets && (independent || !require_independent))
            }
            None => (None, None, false),
        };
        agents.push(AgentReport { agent: i, value, mu, ratio, independent, pass });
    }
    let pass = disjoint && agents.iter().all(|a| a.pass);
    Ok(VerificationReport { alpha: alpha.clone(), disjoint, agents, pass })
}

/// Brute-force MMS for every agent, then [`verify_with_records`].
pub fn verify_allocation(
    instance: &Instance,
    allocation: &Allocation,
    alpha: &Rational,
    gate: usize,
    require_independent: bool,
) -> Result<VerificationReport> {
    let records = all_mms(instance, gate)?.into_iter().map(Some).collect::<Vec<_>>();
    verify_with_records(instance, allocation, alpha, &records, require_independent)
}
