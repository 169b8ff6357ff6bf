//! Valuation oracles for hereditary set systems.
//!
//! An agent's value for a bundle `B` is the largest additive value of an
//! independent subset of `B`. [`ValuationOracle`] answers exact value queries
//! (exhaustively for the NP-hard variants, up to a size gate) and
//! approximate queries that return an independent `B' ⊆ B` worth at least
//! `(1 - eps)` of `v(B)`.

pub mod conflict;
pub mod interval;
pub mod knapsack;

use num_traits::{One, Zero};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instance::{Instance, SetSystemSpec};
use crate::rational::{ratio, Rational};

pub const BUDGET_GATE: usize = 25;
pub const CONFLICT_GATE: usize = 30;
pub const INTERVAL_GATE: usize = 20;
/// Largest bundle the adversarial wrapper enumerates.
pub const ADVERSARY_GATE: usize = 16;

/// How approximate queries are answered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleKind {
    /// Exact values; approximate queries go through the greedy reduction.
    Exact,
    /// The variant's polynomial approximation with declared error bound.
    Approx(Rational),
    /// Returns the least valuable independent subset that still meets the
    /// `(1 - eps)` bound. Exhaustive; for testing at desk scale.
    Adversarial(Rational),
}

/// An independent bundle together with its (additive) value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentBundle {
    pub bundle: Bundle,
    pub value: Rational,
}

/// Output of the greedy independent-subset reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub independent: IndependentBundle,
    /// Value queries issued.
    pub queries: usize,
}

/// Structural independence test. `None` when an interval bundle is too large
/// for exact feasibility search.
pub fn is_independent_in(system: &SetSystemSpec, s: &Bundle) -> Option<bool> {
    Some(match system {
        SetSystemSpec::Free => true,
        SetSystemSpec::Explicit { sets } => s.is_empty() || sets.iter().any(|t| s.is_subset(t)),
        SetSystemSpec::Budget { sizes, budget } => {
            s.iter().fold(Rational::zero(), |acc, j| acc + &sizes[j]) <= *budget
        }
        SetSystemSpec::Conflict { edges } => {
            !edges.iter().any(|&(a, b)| s.contains(a) && s.contains(b))
        }
        SetSystemSpec::Interval { jobs } => {
            if s.len() > INTERVAL_GATE {
                return None;
            }
            interval::feasible(jobs, s.items())
        }
    })
}

/// Greedy reduction: drop each item (ascending) whose removal keeps the
/// value unchanged. The survivor is independent with the original value.
/// The result depends on the scan order when several subsets tie.
pub fn greedy_reduce(b: &Bundle, mut value: impl FnMut(&Bundle) -> Result<Rational>) -> Result<Reduction> {
    let target = value(b)?;
    let mut queries = 1;
    let mut current = b.clone();
    for j in b.iter() {
        let without = current.without(j);
        queries += 1;
        if value(&without)? == target {
            current = without;
        }
    }
    Ok(Reduction { independent: IndependentBundle { bundle: current, value: target }, queries })
}

#[derive(Debug, Clone)]
pub struct ValuationOracle {
    agent: usize,
    values: Vec<Rational>,
    system: SetSystemSpec,
    kind: OracleKind,
    gate: usize,
}

impl ValuationOracle {
    pub fn new(instance: &Instance, agent: usize, kind: OracleKind) -> Self {
        let system = instance.system(agent).clone();
        let gate = match system {
            SetSystemSpec::Budget { .. } => BUDGET_GATE,
            SetSystemSpec::Conflict { .. } => CONFLICT_GATE,
            SetSystemSpec::Interval { .. } => INTERVAL_GATE,
            _ => usize::MAX,
        };
        ValuationOracle { agent, values: instance.values[agent].clone(), system, kind, gate }
    }

    pub fn exact(instance: &Instance, agent: usize) -> Self {
        Self::new(instance, agent, OracleKind::Exact)
    }

    pub fn with_gate(mut self, gate: usize) -> Self {
        self.gate = gate;
        self
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn system(&self) -> &SetSystemSpec {
        &self.system
    }

    pub fn is_exact(&self) -> bool {
        self.kind == OracleKind::Exact
    }

    /// Declared error bound of approximate queries.
    pub fn epsilon(&self) -> Rational {
        match &self.kind {
            OracleKind::Exact => Rational::zero(),
            OracleKind::Approx(e) | OracleKind::Adversarial(e) => self.effective_epsilon(e),
        }
    }

    /// Interval bundles use the 1/2-ratio scheduler only when the declared
    /// bound allows it; smaller bounds are served exactly.
    fn effective_epsilon(&self, e: &Rational) -> Rational {
        e.clone()
    }

    pub fn item_value(&self, j: usize) -> &Rational {
        &self.values[j]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Sum of item values, which is the value of `b` when `b` is independent.
    pub fn additive(&self, b: &Bundle) -> Rational {
        b.iter().fold(Rational::zero(), |acc, j| acc + &self.values[j])
    }

    fn check_gate(&self, b: &Bundle) -> Result<()> {
        if self.system.is_hard() && b.len() > self.gate {
            let needs = match &self.system {
                SetSystemSpec::Budget { sizes, budget } => knapsack::needs_search(&self.knapsack_items(b), budget) || sizes.is_empty(),
                _ => true,
            };
            if needs {
                return Err(Error::ExactnessGateExceeded { size: b.len(), gate: self.gate });
            }
        }
        Ok(())
    }

    fn knapsack_items(&self, b: &Bundle) -> Vec<knapsack::Item> {
        let SetSystemSpec::Budget { sizes, .. } = &self.system else { unreachable!() };
        b.iter()
            .map(|id| knapsack::Item { id, value: self.values[id].clone(), size: sizes[id].clone() })
            .collect()
    }

    /// Exact maximum-value independent subset of `b`.
    pub fn best_subset(&self, b: &Bundle) -> Result<IndependentBundle> {
        self.check_gate(b)?;
        let (bundle, value) = match &self.system {
            SetSystemSpec::Free => (b.clone(), self.additive(b)),
            SetSystemSpec::Explicit { sets } => {
                let mut best = (Bundle::new(), Rational::zero());
                for t in sets {
                    let inter = b.intersection(t);
                    let v = self.additive(&inter);
                    if v > best.1 {
                        best = (inter, v);
                    }
                }
                best
            }
            SetSystemSpec::Budget { budget, .. } => {
                let (ids, v) = knapsack::exact(&self.knapsack_items(b), budget);
                (Bundle::from_items(ids), v)
            }
            SetSystemSpec::Conflict { edges } => {
                let (ids, v) = conflict::max_weight_independent_set(b.items(), &self.values, |x, y| {
                    edges.contains(&(x.min(y), x.max(y)))
                });
                (Bundle::from_items(ids), v)
            }
            SetSystemSpec::Interval { jobs } => {
                let (ids, v) = interval::best_subset(jobs, &self.values, b.items());
                (Bundle::from_items(ids), v)
            }
        };
        Ok(IndependentBundle { bundle, value })
    }

    /// `v_i(B)`: the maximum additive value over independent subsets of `B`.
    pub fn exact_value(&self, b: &Bundle) -> Result<Rational> {
        Ok(self.best_subset(b)?.value)
    }

    /// Greedy reduction driven by exact value queries.
    pub fn reduce_to_independent(&self, b: &Bundle) -> Result<IndependentBundle> {
        Ok(self.reduce_counted(b)?.independent)
    }

    pub fn reduce_counted(&self, b: &Bundle) -> Result<Reduction> {
        greedy_reduce(b, |s| self.exact_value(s))
    }

    /// `v_i^o(B)`: an independent subset worth at least `(1 - eps) v_i(B)`.
    pub fn approx_value_subset(&self, b: &Bundle) -> Result<IndependentBundle> {
        match &self.kind {
            OracleKind::Exact => self.reduce_to_independent(b),
            OracleKind::Approx(eps) => self.polynomial_subset(b, eps),
            OracleKind::Adversarial(eps) => {
                if b.len() > ADVERSARY_GATE {
                    return self.polynomial_subset(b, eps);
                }
                self.adversarial_subset(b, eps)
            }
        }
    }

    fn polynomial_subset(&self, b: &Bundle, eps: &Rational) -> Result<IndependentBundle> {
        match &self.system {
            SetSystemSpec::Budget { budget, .. } if *eps > Rational::zero() => {
                let (ids, value) = knapsack::fptas(&self.knapsack_items(b), budget, eps);
                Ok(IndependentBundle { bundle: Bundle::from_items(ids), value })
            }
            SetSystemSpec::Interval { jobs } if *eps >= ratio(1, 2) => {
                let placed = interval::local_ratio(jobs, &self.values, b.items());
                let bundle = Bundle::from_items(placed.into_iter().map(|(j, _)| j));
                let value = self.additive(&bundle);
                Ok(IndependentBundle { bundle, value })
            }
            _ => self.best_subset(b),
        }
    }

    fn adversarial_subset(&self, b: &Bundle, eps: &Rational) -> Result<IndependentBundle> {
        let floor = (Rational::one() - eps) * self.exact_value(b)?;
        let items = b.items();
        let mut worst: Option<IndependentBundle> = None;
        for mask in 0u32..1 << items.len() {
            let s = Bundle::from_items((0..items.len()).filter(|p| mask >> p & 1 == 1).map(|p| items[p]));
            let v = self.additive(&s);
            if v < floor || worst.as_ref().is_some_and(|w| v >= w.value) {
                continue;
            }
            if self.is_independent(&s)? {
                worst = Some(IndependentBundle { bundle: s, value: v });
            }
        }
        Ok(worst.expect("the empty set or the optimum always qualifies"))
    }

    /// `v_i(v_i^o(B))`.
    pub fn oracle_value(&self, b: &Bundle) -> Result<Rational> {
        Ok(self.approx_value_subset(b)?.value)
    }

    /// Structural independence of `s`.
    pub fn is_independent(&self, s: &Bundle) -> Result<bool> {
        is_independent_in(&self.system, s).ok_or(Error::ExactnessGateExceeded { size: s.len(), gate: INTERVAL_GATE })
    }

    /// Whether `{j}` is independent. Approximate oracles can only tell for
    /// items of positive value.
    pub fn is_singleton_independent(&self, j: usize) -> Result<bool> {
        match &self.kind {
            OracleKind::Exact => self.is_independent(&Bundle::singleton(j)),
            _ => {
                if self.values[j].is_zero() {
                    return Err(Error::IndeterminateZeroValueSingleton { item: j });
                }
                Ok(!self.approx_value_subset(&Bundle::singleton(j))?.bundle.is_empty())
            }
        }
    }

    /// `v_i({j})` as seen through the oracle: `v_ij` if `{j}` is
    /// independent, otherwise zero.
    pub fn singleton_value(&self, j: usize) -> Result<Rational> {
        if self.values[j].is_zero() || !self.is_singleton_independent(j)? {
            return Ok(Rational::zero());
        }
        Ok(self.values[j].clone())
    }

    /// Exact independence of `{a, b}`.
    pub fn pair_independent(&self, a: usize, b: usize) -> bool {
        match &self.system {
            SetSystemSpec::Interval { jobs } => interval::pair_feasible(jobs, a, b),
            sys => is_independent_in(sys, &Bundle::pair(a, b)).expect("pairs are always decidable"),
        }
    }
}
