//! The lone-divider procedure and its entitled variant.
//!
//! In every round one remaining agent (the divider) builds as many disjoint
//! bundles as there are remaining agents, each meeting its own threshold.
//! A maximum envy-free matching between remaining agents and those bundles
//! decides who is served; matched agents and their bundles leave.

use num_traits::One;

use crate::allocation::Allocation;
use crate::bundle::Bundle;
use crate::bundles::{MadeBundle, MakerResult};
use crate::error::{Error, Result};
use crate::matching::{envy_free_matching, BipartiteGraph};
use crate::rational::Rational;
use crate::valuation::ValuationOracle;

/// Builds the divider's bundles for a round.
pub trait BundleMaker {
    /// `k` disjoint bundles from `items`, independent for `agent` and worth
    /// at least its threshold.
    fn make(&mut self, agent: usize, items: &Bundle, k: usize) -> Result<MakerResult>;
}

impl<F: FnMut(usize, &Bundle, usize) -> Result<MakerResult>> BundleMaker for F {
    fn make(&mut self, agent: usize, items: &Bundle, k: usize) -> Result<MakerResult> {
        self(agent, items, k)
    }
}

/// How the divider of a round is chosen among the remaining agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DividerRule {
    LowestIndex,
    /// First remaining agent in this order (most restrictive family first).
    Ordered(Vec<usize>),
}

impl DividerRule {
    fn pick(&self, remaining: &[usize]) -> usize {
        match self {
            DividerRule::LowestIndex => remaining[0],
            DividerRule::Ordered(order) => {
                *order.iter().find(|a| remaining.contains(a)).expect("ordering covers every agent")
            }
        }
    }
}

/// One round of the procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub divider: usize,
    /// Divider changes in this round as `(from, to)`.
    pub swaps: Vec<(usize, usize)>,
    pub remaining: Vec<usize>,
    pub bundles: Vec<Bundle>,
    /// `values[a][b]`: the value used for the edge test of
    /// `remaining[a]` and `bundles[b]`.
    pub values: Vec<Vec<Rational>>,
    /// Matched `(agent, bundle index)` pairs.
    pub matching: Vec<(usize, usize)>,
    /// What each matched agent received.
    pub allocated: Vec<(usize, Bundle)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DividerOutcome {
    Allocated { allocation: Allocation, rounds: Vec<Round> },
    /// The named divider could not build its bundles.
    MakerFailure { agent: usize, rounds: Vec<Round> },
}

impl DividerOutcome {
    pub fn rounds(&self) -> &[Round] {
        match self {
            DividerOutcome::Allocated { rounds, .. } | DividerOutcome::MakerFailure { rounds, .. } => rounds,
        }
    }
}

/// How non-divider agents value a bundle for the edge test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeValue {
    /// Sum of item values; exact for bundles independent for everyone.
    Additive,
    /// Exact value for exact oracles, oracle-subset value otherwise.
    Oracle,
}

fn edge_value(oracle: &ValuationOracle, b: &Bundle, mode: EdgeValue) -> Result<Rational> {
    match mode {
        EdgeValue::Additive => Ok(oracle.additive(b)),
        EdgeValue::Oracle if oracle.is_exact() => oracle.exact_value(b),
        EdgeValue::Oracle => oracle.oracle_value(b),
    }
}

/// Lone divider over `agents` (all agents when `None`) and all items.
/// Matched agents receive the divider's bundle.
pub fn lone_divider(
    oracles: &[ValuationOracle],
    m: usize,
    thresholds: &[Rational],
    maker: &mut dyn BundleMaker,
    rule: &DividerRule,
    agents: Option<&[usize]>,
    edges: EdgeValue,
) -> Result<DividerOutcome> {
    run(oracles, m, thresholds, maker, rule, agents, Variant::Plain(edges))
}

/// The entitled variant: before matching, the divider is replaced by any
/// remaining agent for which some bundle fails the `(1 - eps)` additivity
/// test, and matched agents other than the divider receive their oracle's
/// independent subset of the matched bundle.
pub fn lone_divider_entitled(
    oracles: &[ValuationOracle],
    m: usize,
    thresholds: &[Rational],
    maker: &mut dyn BundleMaker,
    rule: &DividerRule,
    agents: Option<&[usize]>,
    eps: &Rational,
) -> Result<DividerOutcome> {
    run(oracles, m, thresholds, maker, rule, agents, Variant::Entitled(eps.clone()))
}

enum Variant {
    Plain(EdgeValue),
    Entitled(Rational),
}

fn run(
    oracles: &[ValuationOracle],
    m: usize,
    thresholds: &[Rational],
    maker: &mut dyn BundleMaker,
    rule: &DividerRule,
    agents: Option<&[usize]>,
    variant: Variant,
) -> Result<DividerOutcome> {
    let n = oracles.len();
    let mut remaining: Vec<usize> = match agents {
        Some(a) => a.to_vec(),
        None => (0..n).collect(),
    };
    remaining.sort_unstable();
    let mut items = Bundle::full(m);
    let mut allocation = Allocation::empty(n);
    let mut rounds = Vec::new();

    while !remaining.is_empty() {
        let mut divider = rule.pick(&remaining);
        let mut swaps = Vec::new();
        let made: Vec<MadeBundle> = loop {
            let made = match maker.make(divider, &items, remaining.len())? {
                MakerResult::Success(made) => made,
                MakerResult::Failure(_) => return Ok(DividerOutcome::MakerFailure { agent: divider, rounds }),
            };
            let Variant::Entitled(eps) = &variant else { break made };
            let keep = Rational::one() - eps;
            let mut swap_to = None;
            'scan: for &other in remaining.iter().filter(|&&a| a != divider) {
                for b in &made {
                    let b = &b.bundle.bundle;
                    let o = &oracles[other];
                    if o.oracle_value(b)? < &keep * o.additive(b) {
                        swap_to = Some(other);
                        break 'scan;
                    }
                }
            }
            match swap_to {
                None => break made,
                Some(next) => {
                    // Nested families make every swap strictly tighten the divider's
                    // family, so a repeat means the families are not nested.
                    if next == divider || swaps.iter().any(|&(from, _)| from == next) {
                        return Err(Error::NonNestedEntitledFamilies);
                    }
                    swaps.push((divider, next));
                    divider = next;
                }
            }
        };

        let bundles: Vec<Bundle> = made.iter().map(|b| b.bundle.bundle.clone()).collect();
        let mut values = Vec::with_capacity(remaining.len());
        for &a in &remaining {
            let row = if a == divider {
                made.iter().map(|b| b.bundle.value.clone()).collect()
            } else {
                let mode = match variant {
                    Variant::Plain(mode) => mode,
                    Variant::Entitled(_) => EdgeValue::Oracle,
                };
                bundles.iter().map(|b| edge_value(&oracles[a], b, mode)).collect::<Result<Vec<_>>>()?
            };
            values.push(row);
        }
        let graph = BipartiteGraph::from_predicate(remaining.len(), bundles.len(), |x, y| {
            values[x][y] >= thresholds[remaining[x]]
        });
        let matched = envy_free_matching(&graph);
        debug_assert!(matched.iter().any(|&(x, _)| remaining[x] == divider));

        let mut allocated = Vec::with_capacity(matched.len());
        let mut served = Vec::with_capacity(matched.len());
        for &(x, y) in &matched {
            let agent = remaining[x];
            let received = match variant {
                Variant::Entitled(_) if agent != divider => oracles[agent].approx_value_subset(&bundles[y])?.bundle,
                _ => bundles[y].clone(),
            };
            items = items.difference(&bundles[y]);
            allocation.bundles[agent] = received.clone();
            allocated.push((agent, received));
            served.push(agent);
        }
        let matching = matched.iter().map(|&(x, y)| (remaining[x], y)).collect();
        rounds.push(Round { divider, swaps, remaining: remaining.clone(), bundles, values, matching, allocated });
        remaining.retain(|a| !served.contains(a));
    }
    allocation.refresh_complete(m);
    Ok(DividerOutcome::Allocated { allocation, rounds })
}
