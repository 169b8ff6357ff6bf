//! Bundle construction for the lone divider.
//!
//! Two strategies: restricting an exact MMS partition to the remaining items
//! (existence mode), and the two-phase high/low item construction that only
//! needs an estimate `mu*` of the maximin share (polynomial modes).

use crate::bundle::Bundle;
use crate::error::Result;
use crate::matching::{max_general_matching, Graph};
use crate::mms::MmsRecord;
use crate::rational::{ratio, Rational};
use crate::valuation::{IndependentBundle, ValuationOracle};

/// Where a constructed bundle came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Restriction of an MMS-partition block.
    Witness,
    /// A single high-valued item.
    Singleton,
    /// Greedy phase-one bundle, minimal with respect to the threshold.
    PhaseOne,
    /// A matched pair of high-valued items.
    PhaseTwo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MadeBundle {
    pub bundle: IndependentBundle,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MakerResult {
    /// Exactly the requested number of bundles.
    Success(Vec<MadeBundle>),
    /// Fewer bundles than requested; carries those that were built.
    Failure(Vec<MadeBundle>),
}

impl MakerResult {
    pub fn is_success(&self) -> bool {
        matches!(self, MakerResult::Success(_))
    }

    fn settle(mut created: Vec<MadeBundle>, k: usize) -> Self {
        if created.len() < k {
            MakerResult::Failure(created)
        } else {
            created.truncate(k);
            MakerResult::Success(created)
        }
    }
}

/// Inputs of the two-phase construction.
#[derive(Debug, Clone)]
pub struct BundleRequest<'a> {
    pub oracle: &'a ValuationOracle,
    /// Remaining items `M'`.
    pub items: &'a Bundle,
    pub k: usize,
    pub mu_star: Rational,
    pub alpha: Rational,
}

/// Items split by singleton value against `(alpha / 2) mu*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighLowSplit {
    pub high: Bundle,
    pub low: Bundle,
    /// Singleton values through the oracle, indexed by item.
    pub singleton: Vec<(usize, Rational)>,
}

pub fn split_high_low(oracle: &ValuationOracle, items: &Bundle, alpha: &Rational, mu_star: &Rational) -> Result<HighLowSplit> {
    let cut = alpha * mu_star / Rational::from_integer(2.into());
    let mut high = Bundle::new();
    let mut low = Bundle::new();
    let mut singleton = Vec::with_capacity(items.len());
    for j in items.iter() {
        let v = oracle.singleton_value(j)?;
        if v > cut {
            high.insert(j);
        } else {
            low.insert(j);
        }
        singleton.push((j, v));
    }
    Ok(HighLowSplit { high, low, singleton })
}

/// Up to `k` disjoint independent bundles, each worth at least `x`, from the
/// blocks of an MMS partition restricted to `items`. Each qualifying block is
/// reduced to an independent subset of equal value.
pub fn bundles_from_mms_partition(
    record: &MmsRecord,
    oracle: &ValuationOracle,
    items: &Bundle,
    k: usize,
    x: &Rational,
) -> Result<MakerResult> {
    let mut created = Vec::new();
    for block in &record.witness {
        if created.len() == k {
            break;
        }
        let restricted = block.intersection(items);
        if oracle.exact_value(&restricted)? >= *x {
            let bundle = oracle.reduce_to_independent(&restricted)?;
            created.push(MadeBundle { bundle, origin: Origin::Witness });
        }
    }
    Ok(MakerResult::settle(created, k))
}

/// Which test decides phase-two edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairTest {
    /// `v(v^o({j1, j2})) >= alpha mu*`.
    Oracle,
    /// Exact pair independence plus additive value.
    Exact,
}

impl PairTest {
    /// The oracle-mediated test is sound for error bounds up to 1/3.
    pub fn for_epsilon(eps: &Rational) -> Self {
        if *eps <= ratio(1, 3) {
            PairTest::Oracle
        } else {
            PairTest::Exact
        }
    }
}

/// Two-phase construction of `k` disjoint independent bundles worth at
/// least `alpha mu*` each.
pub fn make_bundles_alpha(req: &BundleRequest<'_>, pair_test: PairTest) -> Result<MakerResult> {
    if req.k == 0 {
        return Ok(MakerResult::Success(Vec::new()));
    }
    let oracle = req.oracle;
    let target = &req.alpha * &req.mu_star;
    let split = split_high_low(oracle, req.items, &req.alpha, &req.mu_star)?;
    let singleton_value = |j: usize| -> &Rational {
        &split.singleton.iter().find(|(i, _)| *i == j).expect("item of M'").1
    };
    let mut high = split.high.clone();
    let mut low = split.low.clone();
    let mut created = Vec::new();

    // Phase one: valuable singletons.
    for j in split.high.iter() {
        if *singleton_value(j) >= target {
            let bundle = IndependentBundle { bundle: Bundle::singleton(j), value: singleton_value(j).clone() };
            created.push(MadeBundle { bundle, origin: Origin::Singleton });
            high.remove(j);
        }
    }

    // Phase one: one high item topped up with low items, then minimized.
    'grow: loop {
        for j in high.items().to_vec() {
            let got = oracle.approx_value_subset(&low.with(j))?;
            if got.value < target {
                continue;
            }
            let mut b = got.bundle;
            let mut value = got.value;
            for jj in b.clone().iter() {
                let reduced = &value - oracle.item_value(jj);
                if reduced >= target {
                    b.remove(jj);
                    value = reduced;
                }
            }
            high = high.difference(&b);
            low = low.difference(&b);
            created.push(MadeBundle { bundle: IndependentBundle { bundle: b, value }, origin: Origin::PhaseOne });
            continue 'grow;
        }
        break;
    }

    // Phase two: pairs of high items through a maximum matching.
    let hv: Vec<usize> = high.items().to_vec();
    let mut g = Graph::new(hv.len());
    for a in 0..hv.len() {
        for b in a + 1..hv.len() {
            let pair = Bundle::pair(hv[a], hv[b]);
            let edge = match pair_test {
                PairTest::Oracle => oracle.oracle_value(&pair)? >= target,
                PairTest::Exact => {
                    oracle.pair_independent(hv[a], hv[b]) && oracle.additive(&pair) >= target
                }
            };
            if edge {
                g.add_edge(a, b);
            }
        }
    }
    for (a, b) in max_general_matching(&g) {
        let pair = Bundle::pair(hv[a], hv[b]);
        let value = oracle.additive(&pair);
        created.push(MadeBundle { bundle: IndependentBundle { bundle: pair, value }, origin: Origin::PhaseTwo });
    }

    Ok(MakerResult::settle(created, req.k))
}

/// The construction with threshold `(2/5) mu*`.
pub fn make_bundles_two_fifths(req: &BundleRequest<'_>) -> Result<MakerResult> {
    let req = BundleRequest { alpha: ratio(2, 5), ..req.clone() };
    make_bundles_alpha(&req, PairTest::Oracle)
}

/// `alpha = (1 - eps) / (1 + (3/2)(1 - eps))`.
pub fn alpha_for_epsilon(eps: &Rational) -> Rational {
    let one_minus = Rational::from_integer(1.into()) - eps;
    &one_minus / (Rational::from_integer(1.into()) + ratio(3, 2) * &one_minus)
}

/// Checks the construction's structural guarantees on `made`: disjoint,
/// inside `items`, independent, worth the target, phase-one bundles below
/// `(3/2) alpha mu*` in item sum and minimal. Returns a description of the
/// first violation.
pub fn audit(req: &BundleRequest<'_>, made: &[MadeBundle]) -> Result<Option<String>> {
    let target = &req.alpha * &req.mu_star;
    let cap = ratio(3, 2) * &target;
    let mut used = Bundle::new();
    for m in made {
        let b = &m.bundle.bundle;
        if !b.is_subset(req.items) {
            return Ok(Some(format!("{b} leaves M'")));
        }
        if !b.is_disjoint(&used) {
            return Ok(Some(format!("{b} overlaps an earlier bundle")));
        }
        used = used.union(b);
        if !req.oracle.is_independent(b)? {
            return Ok(Some(format!("{b} is not independent")));
        }
        let sum = req.oracle.additive(b);
        if sum != m.bundle.value || sum < target {
            return Ok(Some(format!("{b} is worth {sum}, below the target")));
        }
        if m.origin == Origin::PhaseOne && b.len() > 1 {
            if sum >= cap {
                return Ok(Some(format!("phase-one bundle {b} reaches the cap")));
            }
            if b.iter().any(|j| &sum - req.oracle.item_value(j) >= target) {
                return Ok(Some(format!("phase-one bundle {b} is not minimal")));
            }
        }
        if m.origin == Origin::PhaseTwo && b.len() != 2 {
            return Ok(Some(format!("phase-two bundle {b} is not a pair")));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, SetSystemSpec};
    use crate::rational::int;
    use crate::valuation::OracleKind;

    fn b(items: &[usize]) -> Bundle {
        Bundle::from_items(items.iter().copied())
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_for_epsilon(&int(0)), ratio(2, 5));
        assert_eq!(alpha_for_epsilon(&ratio(1, 2)), ratio(2, 7));
        assert_eq!(alpha_for_epsilon(&ratio(1, 3)), ratio(1, 3));
    }

    #[test]
    fn zero_request_is_empty_success() {
        let inst = Instance::shared(vec![vec![int(1); 2]], 2, SetSystemSpec::Free);
        let o = ValuationOracle::exact(&inst, 0);
        let items = Bundle::full(2);
        let req = BundleRequest { oracle: &o, items: &items, k: 0, mu_star: int(1), alpha: ratio(2, 5) };
        assert_eq!(make_bundles_alpha(&req, PairTest::Oracle).unwrap(), MakerResult::Success(vec![]));
    }

    #[test]
    fn dependent_singleton_is_not_emitted() {
        // Item 2 is worth 10 but lies outside every independent set.
        let sys = SetSystemSpec::explicit([b(&[0, 1])]);
        let inst = Instance::shared(vec![vec![int(1), int(1), int(10)]], 3, sys);
        let o = ValuationOracle::exact(&inst, 0);
        let items = Bundle::full(3);
        let req = BundleRequest { oracle: &o, items: &items, k: 1, mu_star: int(2), alpha: ratio(2, 5) };
        let MakerResult::Success(made) = make_bundles_two_fifths(&req).unwrap() else { panic!() };
        assert!(!made[0].bundle.bundle.contains(2));
        assert_eq!(audit(&req, &made).unwrap(), None);
    }

    #[test]
    fn exact_pair_test_for_large_epsilon() {
        let inst = Instance::shared(vec![vec![int(1); 4]], 4, SetSystemSpec::Free);
        let o = ValuationOracle::new(&inst, 0, OracleKind::Approx(ratio(1, 2)));
        let items = Bundle::full(4);
        // Every item is high (1 > 4/7) but only pairs reach 8/7.
        let req = BundleRequest { oracle: &o, items: &items, k: 2, mu_star: int(4), alpha: ratio(2, 7) };
        let MakerResult::Success(made) = make_bundles_alpha(&req, PairTest::Exact).unwrap() else { panic!() };
        assert!(made.iter().all(|m| m.origin == Origin::PhaseTwo));
        assert_eq!(audit(&req, &made).unwrap(), None);
    }

    #[test]
    fn witness_restriction() {
        let inst = Instance::shared(vec![vec![int(1); 4]], 4, SetSystemSpec::Free);
        let o = ValuationOracle::exact(&inst, 0);
        let rec = MmsRecord { agent: 0, parts: 2, mu: int(2), witness: vec![b(&[0, 1]), b(&[2, 3])] };
        let got = bundles_from_mms_partition(&rec, &o, &b(&[0, 2, 3]), 1, &int(2)).unwrap();
        let MakerResult::Success(made) = got else { panic!() };
        assert_eq!(made[0].bundle.bundle, b(&[2, 3]));
        let got = bundles_from_mms_partition(&rec, &o, &b(&[0, 2, 3]), 2, &int(2)).unwrap();
        assert!(!got.is_success());
        let got = bundles_from_mms_partition(&rec, &o, &b(&[0, 2, 3]), 2, &int(0)).unwrap();
        assert!(got.is_success());
    }
}
