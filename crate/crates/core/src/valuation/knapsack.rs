//! 0/1 knapsack over rational sizes and values: an exact solver (table
//! dynamic programming for small integer sizes, branch-and-bound otherwise)
//! and the value-scaling FPTAS.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::rational::Rational;

const DP_SIZE_LIMIT: u64 = 1_000_000;
const DP_CELL_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone)]
pub struct Item {
    pub id: usize,
    pub value: Rational,
    pub size: Rational,
}

/// Result of a knapsack solve: chosen ids (ascending) and their value.
pub type Packing = (Vec<usize>, Rational);

fn total(items: &[Item], f: impl Fn(&Item) -> &Rational) -> Rational {
    items.iter().fold(Rational::zero(), |acc, it| acc + f(it))
}

fn finish(mut ids: Vec<usize>, items: &[Item]) -> Packing {
    ids.sort_unstable();
    let value = items.iter().filter(|it| ids.contains(&it.id)).fold(Rational::zero(), |a, it| a + &it.value);
    (ids, value)
}

/// Whether the exact solver would fall back to branch-and-bound.
pub fn needs_search(items: &[Item], budget: &Rational) -> bool {
    integer_dp_capacity(items, budget).is_none()
}

fn integer_dp_capacity(items: &[Item], budget: &Rational) -> Option<usize> {
    if !items.iter().all(|it| it.size.is_integer()) {
        return None;
    }
    let sum = items.iter().try_fold(0u64, |acc, it| acc.checked_add(it.size.to_integer().to_u64()?))?;
    if sum > DP_SIZE_LIMIT {
        return None;
    }
    let cap = budget.floor().to_integer().to_u64()?.min(sum);
    if (cap + 1) * (items.len() as u64 + 1) > DP_CELL_LIMIT {
        return None;
    }
    Some(cap as usize)
}

/// Exact maximum-value packing.
pub fn exact(items: &[Item], budget: &Rational) -> Packing {
    let fitting: Vec<Item> = items.iter().filter(|it| &it.size <= budget).cloned().collect();
    if total(&fitting, |it| &it.size) <= *budget {
        return finish(fitting.iter().map(|it| it.id).collect(), items);
    }
    match integer_dp_capacity(&fitting, budget) {
        Some(cap) => table_dp(&fitting, cap, items),
        None => branch_and_bound(&fitting, budget, items),
    }
}

fn table_dp(fitting: &[Item], cap: usize, all: &[Item]) -> Packing {
    let k = fitting.len();
    let mut best = vec![Rational::zero(); cap + 1];
    let mut take = vec![false; k * (cap + 1)];
    for (idx, it) in fitting.iter().enumerate() {
        let s = it.size.to_integer().to_usize().expect("integer size");
        for c in (s..=cap).rev() {
            let cand = &best[c - s] + &it.value;
            if cand > best[c] {
                best[c] = cand;
                take[idx * (cap + 1) + c] = true;
            }
        }
    }
    let mut ids = Vec::new();
    let mut c = cap;
    for idx in (0..k).rev() {
        if take[idx * (cap + 1) + c] {
            ids.push(fitting[idx].id);
            c -= fitting[idx].size.to_integer().to_usize().expect("integer size");
        }
    }
    finish(ids, all)
}

fn branch_and_bound(fitting: &[Item], budget: &Rational, all: &[Item]) -> Packing {
    // Zero-size items are always taken; the rest are sorted by density.
    let mut free: Vec<usize> = Vec::new();
    let mut order: Vec<&Item> = Vec::new();
    for it in fitting {
        if it.size.is_zero() {
            free.push(it.id);
        } else {
            order.push(it);
        }
    }
    order.sort_by(|a, b| (&b.value * &a.size).cmp(&(&a.value * &b.size)).then(a.id.cmp(&b.id)));

    struct Search<'a> {
        order: Vec<&'a Item>,
        best: Rational,
        best_set: Vec<usize>,
        current: Vec<usize>,
    }
    impl Search<'_> {
        fn bound(&self, from: usize, room: &Rational, value: &Rational) -> Rational {
            let mut room = room.clone();
            let mut v = value.clone();
            for it in &self.order[from..] {
                if it.size <= room {
                    room -= &it.size;
                    v += &it.value;
                } else {
                    v += &it.value * &room / &it.size;
                    break;
                }
            }
            v
        }
        fn go(&mut self, from: usize, room: Rational, value: Rational) {
            if value > self.best {
                self.best = value.clone();
                self.best_set = self.current.clone();
            }
            if from == self.order.len() || self.bound(from, &room, &value) <= self.best {
                return;
            }
            let it = self.order[from];
            if it.size <= room {
                self.current.push(it.id);
                self.go(from + 1, &room - &it.size, &value + &it.value);
                self.current.pop();
            }
            self.go(from + 1, room, value);
        }
    }
    let mut s = Search { order, best: Rational::zero(), best_set: Vec::new(), current: Vec::new() };
    s.go(0, budget.clone(), Rational::zero());
    let mut ids = s.best_set;
    ids.extend(free);
    finish(ids, all)
}

/// Value-scaling FPTAS: the packing is worth at least `(1 - eps)` times the
/// optimum. Requires `eps > 0`.
pub fn fptas(items: &[Item], budget: &Rational, eps: &Rational) -> Packing {
    assert!(*eps > Rational::zero(), "fptas needs a positive error bound");
    let fitting: Vec<Item> = items.iter().filter(|it| &it.size <= budget).cloned().collect();
    if total(&fitting, |it| &it.size) <= *budget {
        return finish(fitting.iter().map(|it| it.id).collect(), items);
    }
    let vmax = fitting.iter().map(|it| it.value.clone()).max().unwrap_or_else(Rational::zero);
    if vmax.is_zero() {
        return (Vec::new(), Rational::zero());
    }
    let k = fitting.len();
    let scale = eps * &vmax / Rational::from_integer(BigInt::from(k));
    let profits: Vec<usize> = fitting
        .iter()
        .map(|it| (&it.value / &scale).floor().to_integer().to_usize().expect("scaled profit fits usize"))
        .collect();
    let total_profit: usize = profits.iter().sum();
    // smallest size reaching each exact scaled profit
    let mut min_size: Vec<Option<Rational>> = vec![None; total_profit + 1];
    min_size[0] = Some(Rational::zero());
    let width = total_profit + 1;
    let mut take = vec![false; k * width];
    for (idx, it) in fitting.iter().enumerate() {
        let p = profits[idx];
        for q in (p..=total_profit).rev() {
            let Some(base) = &min_size[q - p] else { continue };
            let cand = base + &it.size;
            if cand <= *budget && min_size[q].as_ref().is_none_or(|cur| cand < *cur) {
                min_size[q] = Some(cand);
                take[idx * width + q] = true;
            }
        }
    }
    let mut q = (0..=total_profit).rev().find(|&q| min_size[q].is_some()).unwrap_or(0);
    let mut ids = Vec::new();
    for idx in (0..k).rev() {
        if take[idx * width + q] {
            ids.push(fitting[idx].id);
            q -= profits[idx];
        }
    }
    finish(ids, items)
}

/// Exhaustive reference for tests and brute-force tables.
pub fn brute_force(items: &[Item], budget: &Rational) -> Packing {
    assert!(items.len() <= 20);
    let mut best = (Vec::new(), Rational::zero());
    for mask in 0u32..1 << items.len() {
        let chosen: Vec<&Item> = (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| &items[i]).collect();
        let size = chosen.iter().fold(Rational::zero(), |a, it| a + &it.size);
        if size > *budget {
            continue;
        }
        let value = chosen.iter().fold(Rational::zero(), |a, it| a + &it.value);
        if value > best.1 {
            best = (chosen.iter().map(|it| it.id).collect(), value);
        }
    }
    best
}
