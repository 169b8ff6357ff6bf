//! Top-level solvers.
//!
//! * existence mode: lone divider with exact MMS partitions, thresholds
//!   `n/(2n-1) mu_i` (brute force, desk scale only);
//! * 2/5 mode: lone divider with the two-phase bundle construction, driven
//!   by shrinking estimates `mu*` of every agent's maximin share;
//! * alpha mode: the same loop for oracles with a larger error bound `eps`;
//! * entitled mode: the 2/5 loop on nested per-agent families, using the
//!   divider-swapping variant of the lone divider.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::allocation::Allocation;
use crate::bundle::Bundle;
use crate::bundles::{bundles_from_mms_partition, make_bundles_alpha, alpha_for_epsilon, BundleRequest, MakerResult, PairTest};
use crate::divider::{lone_divider, lone_divider_entitled, DividerOutcome, DividerRule, EdgeValue, Round};
use crate::error::{Error, Result};
use crate::instance::{Instance, Valuations};
use crate::mms::{all_mms, mms_bounds_with, MmsRecord};
use crate::rational::{ratio, Rational};
use crate::valuation::{OracleKind, ValuationOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Existence,
    TwoFifths,
    Alpha,
    Entitled,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Existence => "existence",
            Mode::TwoFifths => "two_fifths",
            Mode::Alpha => "alpha",
            Mode::Entitled => "entitled",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "existence" => Some(Mode::Existence),
            "two_fifths" | "two-fifths" => Some(Mode::TwoFifths),
            "alpha" => Some(Mode::Alpha),
            "entitled" => Some(Mode::Entitled),
            _ => None,
        }
    }
}

/// Which approximate oracle answers queries in the polynomial modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleChoice {
    /// Exact oracles when `epsilon` is zero, the variant's approximation
    /// scheme at `epsilon` otherwise.
    Default,
    Exact,
    /// Worst subsets that still meet the `(1 - epsilon)` bound.
    Adversarial,
}

/// How `mu*` shrinks after a failed bundle construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustmentRule {
    /// `mu* <- n/(n+1) mu*`.
    Standard,
    /// `mu* <- mu* / (1 + (3 - 3eps)/(5n - 3n eps + 3 eps + 3))`.
    ErrorAware,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub mode: Mode,
    /// Oracle error bound.
    pub epsilon: Rational,
    pub oracle: OracleChoice,
    /// Alpha mode: `delta` with `eps <= 1 - 1/delta`; `1/(1 - eps)` if unset.
    pub delta: Option<Rational>,
    /// Brute-force gate for existence mode.
    pub gate: usize,
}

impl SolveConfig {
    pub fn new(mode: Mode) -> Self {
        SolveConfig {
            mode,
            epsilon: Rational::zero(),
            oracle: OracleChoice::Default,
            delta: None,
            gate: crate::mms::BRUTE_FORCE_GATE,
        }
    }

    pub fn with_epsilon(mut self, eps: Rational) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn with_oracle(mut self, oracle: OracleChoice) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn with_gate(mut self, gate: usize) -> Self {
        self.gate = gate;
        self
    }
}

/// One `mu*` reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjustment {
    pub agent: usize,
    pub from: Rational,
    pub to: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateState {
    pub mu_star: Vec<Rational>,
    pub adjustments: Vec<usize>,
    pub factor: Rational,
    pub history: Vec<Adjustment>,
}

impl EstimateState {
    pub fn new(mu_star: Vec<Rational>, factor: Rational) -> Self {
        let n = mu_star.len();
        EstimateState { mu_star, adjustments: vec![0; n], factor, history: Vec::new() }
    }

    pub fn adjust(&mut self, agent: usize) {
        let from = self.mu_star[agent].clone();
        let to = &from * &self.factor;
        self.mu_star[agent] = to.clone();
        self.adjustments[agent] += 1;
        self.history.push(Adjustment { agent, from, to });
    }

    pub fn max_adjustments(&self) -> usize {
        self.adjustments.iter().copied().max().unwrap_or(0)
    }
}

/// One full lone-divider run inside the estimate loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub run: usize,
    /// `mu*` of every agent when the run started (zero for dropped agents).
    pub mu_star: Vec<Rational>,
    /// Edge thresholds of the run.
    pub thresholds: Vec<Rational>,
    pub rounds: Vec<Round>,
    /// The divider that failed, ending the run.
    pub failed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub allocation: Allocation,
    /// Ratio guaranteed by the mode against every agent's MMS.
    pub guarantee: Rational,
    /// Agents removed before the main loop because their MMS is zero.
    pub dropped: Vec<usize>,
    /// Agents that took part in the main loop.
    pub active: Vec<usize>,
    pub estimates: Option<EstimateState>,
    pub runs: Vec<RunTrace>,
    /// Existence mode: the MMS records used as thresholds.
    pub records: Option<Vec<MmsRecord>>,
}

/// `n/(2n-1)`.
pub fn existence_ratio(n: usize) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    ratio(n as i64, 2 * n as i64 - 1)
}

/// `(6/5)(n+1) ln m`.
pub fn two_fifths_adjustment_bound(n: usize, m: usize) -> f64 {
    1.2 * (n as f64 + 1.0) * (m as f64).ln()
}

/// `delta (5n+3) ln m`.
pub fn alpha_adjustment_bound(n: usize, m: usize, delta: &Rational) -> f64 {
    delta.to_f64().unwrap_or(f64::INFINITY) * (5.0 * n as f64 + 3.0) * (m as f64).ln()
}

/// `1 / (1 + (3 - 3eps)/(5n - 3n eps + 3 eps + 3))`.
pub fn error_aware_factor(n: usize, eps: &Rational) -> Rational {
    let n = Rational::from_integer(BigInt::from(n));
    let three = Rational::from_integer(3.into());
    let five = Rational::from_integer(5.into());
    let x = (&three - &three * eps) / (&five * &n - &three * &n * eps + &three * eps + &three);
    Rational::one() / (Rational::one() + x)
}

pub fn standard_factor(n: usize) -> Rational {
    ratio(n as i64, n as i64 + 1)
}

fn check_supported(instance: &Instance) -> Result<()> {
    if let Valuations::Asymmetric(_) = instance.valuations {
        return Err(Error::Unsupported("no approximation guarantee exists for asymmetric families".into()));
    }
    Ok(())
}

fn oracle_kind(choice: &OracleChoice, eps: &Rational) -> OracleKind {
    match choice {
        OracleChoice::Exact => OracleKind::Exact,
        OracleChoice::Adversarial => OracleKind::Adversarial(eps.clone()),
        OracleChoice::Default if eps.is_zero() => OracleKind::Exact,
        OracleChoice::Default => OracleKind::Approx(eps.clone()),
    }
}

fn build_oracles(instance: &Instance, kind: &OracleKind) -> Vec<ValuationOracle> {
    (0..instance.n).map(|i| ValuationOracle::new(instance, i, kind.clone())).collect()
}

/// Existence mode: every agent gets at least `n/(2n-1)` of its MMS.
pub fn solve_existence(instance: &Instance, gate: usize) -> Result<Solution> {
    check_supported(instance)?;
    let n = instance.n;
    let guarantee = existence_ratio(n);
    let records = all_mms(instance, gate)?;
    let oracles = build_oracles(instance, &OracleKind::Exact);
    let thresholds: Vec<Rational> = records.iter().map(|r| &guarantee * &r.mu).collect();
    let rule = if instance.is_shared() {
        DividerRule::LowestIndex
    } else {
        DividerRule::Ordered(instance.restrictiveness_order())
    };
    let mut shortfall = None;
    let mut maker = |agent: usize, items: &Bundle, k: usize| -> Result<MakerResult> {
        let out = bundles_from_mms_partition(&records[agent], &oracles[agent], items, k, &thresholds[agent])?;
        if let MakerResult::Failure(made) = &out {
            shortfall = Some(Error::InsufficientBundles { agent, needed: k, found: made.len() });
        }
        Ok(out)
    };
    let outcome = lone_divider(&oracles, instance.m, &thresholds, &mut maker, &rule, None, EdgeValue::Oracle)?;
    match outcome {
        DividerOutcome::Allocated { allocation, rounds } => Ok(Solution {
            allocation,
            guarantee,
            dropped: vec![],
            active: (0..n).collect(),
            estimates: None,
            runs: vec![RunTrace { run: 0, mu_star: vec![], thresholds, rounds, failed: None }],
            records: Some(records),
        }),
        DividerOutcome::MakerFailure { .. } => Err(shortfall.expect("failure recorded by the maker")),
    }
}

/// Shared setup of the estimate-driven modes.
struct EstimateLoop<'a> {
    instance: &'a Instance,
    oracles: Vec<ValuationOracle>,
    alpha: Rational,
    pair_test: PairTest,
    rule: AdjustmentRule,
    eps: Rational,
    entitled: bool,
    /// Bail out after this many adjustments of a single agent.
    limit: usize,
}

impl EstimateLoop<'_> {
    fn solve(&self, guarantee: Rational) -> Result<Solution> {
        let inst = self.instance;
        let (n, m) = (inst.n, inst.m);
        let mut allocation = Allocation::empty(n);
        if n == 0 {
            allocation.refresh_complete(m);
            return Ok(empty_solution(allocation, guarantee, vec![], vec![]));
        }
        // Agents whose n-th most valuable singleton is worthless have MMS 0.
        let mut dropped = Vec::new();
        let mut active = Vec::new();
        for (i, o) in self.oracles.iter().enumerate() {
            if mms_bounds_with(o, m, n)?.lower.is_zero() {
                dropped.push(i);
            } else {
                active.push(i);
            }
        }
        if active.is_empty() {
            allocation.refresh_complete(m);
            return Ok(empty_solution(allocation, guarantee, dropped, active));
        }
        if active.len() == 1 {
            let i = active[0];
            allocation.bundles[i] = self.oracles[i].approx_value_subset(&Bundle::full(m))?.bundle;
            allocation.refresh_complete(m);
            return Ok(empty_solution(allocation, guarantee, dropped, active));
        }

        let k = active.len();
        let mut initial = vec![Rational::zero(); n];
        for &i in &active {
            initial[i] = mms_bounds_with(&self.oracles[i], m, k)?.upper;
        }
        let factor = match self.rule {
            AdjustmentRule::Standard => standard_factor(k),
            AdjustmentRule::ErrorAware => error_aware_factor(k, &self.eps),
        };
        let mut est = EstimateState::new(initial, factor);
        let divider_rule = match &inst.valuations {
            Valuations::Entitled(spec) if spec.order.is_some() => DividerRule::Ordered(inst.restrictiveness_order()),
            _ => DividerRule::LowestIndex,
        };
        let mut runs = Vec::new();
        loop {
            let thresholds: Vec<Rational> = est.mu_star.iter().map(|mu| &self.alpha * mu).collect();
            let mut maker = |agent: usize, items: &Bundle, k: usize| -> Result<MakerResult> {
                let req = BundleRequest {
                    oracle: &self.oracles[agent],
                    items,
                    k,
                    mu_star: est.mu_star[agent].clone(),
                    alpha: self.alpha.clone(),
                };
                make_bundles_alpha(&req, self.pair_test)
            };
            let outcome = if self.entitled {
                lone_divider_entitled(&self.oracles, m, &thresholds, &mut maker, &divider_rule, Some(&active), &self.eps)?
            } else {
                lone_divider(&self.oracles, m, &thresholds, &mut maker, &divider_rule, Some(&active), EdgeValue::Additive)?
            };
            let run = runs.len();
            let mu_star = est.mu_star.clone();
            match outcome {
                DividerOutcome::Allocated { allocation, rounds } => {
                    runs.push(RunTrace { run, mu_star, thresholds, rounds, failed: None });
                    return Ok(Solution {
                        allocation,
                        guarantee,
                        dropped,
                        active,
                        estimates: Some(est),
                        runs,
                        records: None,
                    });
                }
                DividerOutcome::MakerFailure { agent, rounds } => {
                    runs.push(RunTrace { run, mu_star, thresholds, rounds, failed: Some(agent) });
                    est.adjust(agent);
                    if est.adjustments[agent] > self.limit {
                        return Err(Error::NoConvergence(runs.len()));
                    }
                }
            }
        }
    }
}

fn empty_solution(allocation: Allocation, guarantee: Rational, dropped: Vec<usize>, active: Vec<usize>) -> Solution {
    Solution { allocation, guarantee, dropped, active, estimates: None, runs: vec![], records: None }
}

fn safety_limit(bound: f64) -> usize {
    // The bounds are proven; this only stops runaway loops on broken inputs.
    (bound.max(1.0) * 4.0).ceil() as usize + 64
}

/// The 2/5 algorithm: ratios of at least 2/5 for oracle error `eps <= 1/(n+1)`.
pub fn solve_two_fifths(instance: &Instance, config: &SolveConfig) -> Result<Solution> {
    check_supported(instance)?;
    if !instance.is_shared() {
        return solve_entitled(instance, config);
    }
    check_error_bound(instance.n, &config.epsilon)?;
    let kind = oracle_kind(&config.oracle, &config.epsilon);
    EstimateLoop {
        instance,
        oracles: build_oracles(instance, &kind),
        alpha: ratio(2, 5),
        pair_test: PairTest::Oracle,
        rule: AdjustmentRule::Standard,
        eps: config.epsilon.clone(),
        entitled: false,
        limit: safety_limit(two_fifths_adjustment_bound(instance.n, instance.m)),
    }
    .solve(ratio(2, 5))
}

fn check_error_bound(n: usize, eps: &Rational) -> Result<()> {
    if eps.is_negative() || *eps > ratio(1, n as i64 + 1) {
        return Err(Error::EpsilonOutOfRange(format!("{eps} exceeds 1/(n+1) for n = {n}")));
    }
    Ok(())
}

/// Alpha mode: ratios of at least `(1 - eps)/(1 + (3/2)(1 - eps))` for
/// oracle error `eps`. Pairs are checked exactly when `eps > 1/3`. At
/// `eps = 0` the run coincides with the 2/5 algorithm.
pub fn solve_alpha(instance: &Instance, config: &SolveConfig) -> Result<Solution> {
    check_supported(instance)?;
    let eps = &config.epsilon;
    if eps.is_negative() || *eps >= Rational::one() {
        return Err(Error::EpsilonOutOfRange(format!("{eps} is not in [0, 1)")));
    }
    if let Some(delta) = &config.delta {
        if *eps > Rational::one() - Rational::one() / delta {
            return Err(Error::EpsilonOutOfRange(format!("{eps} exceeds 1 - 1/delta")));
        }
    }
    let alpha = alpha_for_epsilon(eps);
    let kind = oracle_kind(&config.oracle, eps);
    let delta = config.delta.clone().unwrap_or_else(|| Rational::one() / (Rational::one() - eps));
    let (rule, limit) = if eps.is_zero() {
        (AdjustmentRule::Standard, two_fifths_adjustment_bound(instance.n, instance.m))
    } else {
        (AdjustmentRule::ErrorAware, alpha_adjustment_bound(instance.n, instance.m, &delta))
    };
    EstimateLoop {
        instance,
        oracles: build_oracles(instance, &kind),
        alpha: alpha.clone(),
        pair_test: PairTest::for_epsilon(eps),
        rule,
        eps: eps.clone(),
        entitled: !instance.is_shared(),
        limit: safety_limit(limit),
    }
    .solve(alpha)
}

/// Entitled mode: ratios of at least 2/5 on nested per-agent families,
/// whether or not their ordering is known.
pub fn solve_entitled(instance: &Instance, config: &SolveConfig) -> Result<Solution> {
    check_supported(instance)?;
    check_error_bound(instance.n, &config.epsilon)?;
    let kind = oracle_kind(&config.oracle, &config.epsilon);
    EstimateLoop {
        instance,
        oracles: build_oracles(instance, &kind),
        alpha: ratio(2, 5),
        pair_test: PairTest::Oracle,
        rule: AdjustmentRule::Standard,
        eps: config.epsilon.clone(),
        entitled: true,
        limit: safety_limit(two_fifths_adjustment_bound(instance.n, instance.m)),
    }
    .solve(ratio(2, 5))
}

/// Dispatches on `config.mode`.
pub fn solve(instance: &Instance, config: &SolveConfig) -> Result<Solution> {
    match config.mode {
        Mode::Existence => solve_existence(instance, config.gate),
        Mode::TwoFifths => solve_two_fifths(instance, config),
        Mode::Alpha => solve_alpha(instance, config),
        Mode::Entitled => solve_entitled(instance, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SetSystemSpec;
    use crate::rational::int;

    #[test]
    fn factors() {
        assert_eq!(standard_factor(2), ratio(2, 3));
        assert_eq!(error_aware_factor(2, &int(0)), ratio(13, 16));
        // eps = 1/2, n = 2: x = (3/2) / (10 - 3 + 3/2 + 3) = 3/23.
        assert_eq!(error_aware_factor(2, &ratio(1, 2)), ratio(23, 26));
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::shared(vec![vec![int(2), int(3)]], 2, SetSystemSpec::Free);
        let sol = solve_two_fifths(&inst, &SolveConfig::new(Mode::TwoFifths)).unwrap();
        assert_eq!(sol.allocation.bundles[0], Bundle::full(2));
        let sol = solve_existence(&inst, 12).unwrap();
        assert_eq!(sol.allocation.bundles[0], Bundle::full(2));
    }

    #[test]
    fn all_zero_values_give_empty_allocation() {
        let inst = Instance::shared(vec![vec![int(0); 3]; 2], 3, SetSystemSpec::Free);
        let sol = solve_two_fifths(&inst, &SolveConfig::new(Mode::TwoFifths)).unwrap();
        assert!(sol.allocation.bundles.iter().all(Bundle::is_empty));
        assert_eq!(sol.dropped, vec![0, 1]);
    }

    #[test]
    fn epsilon_too_large_for_two_fifths() {
        let inst = Instance::shared(vec![vec![int(1); 3]; 2], 3, SetSystemSpec::Free);
        let cfg = SolveConfig::new(Mode::TwoFifths).with_epsilon(ratio(1, 2));
        assert!(matches!(solve_two_fifths(&inst, &cfg), Err(Error::EpsilonOutOfRange(_))));
        let cfg = SolveConfig::new(Mode::Alpha).with_epsilon(int(1));
        assert!(matches!(solve_alpha(&inst, &cfg), Err(Error::EpsilonOutOfRange(_))));
    }
}
