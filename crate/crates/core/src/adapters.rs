//! Front ends for budget, conflicting-item and interval-scheduling
//! constraints.

use num_traits::{One, Zero};

use crate::bundle::Bundle;
use crate::driver::{solve_alpha, solve_existence, solve_two_fifths, solve_entitled, Mode, SolveConfig, Solution};
use crate::error::{Error, Result};
use crate::instance::{EntitledSpec, Instance, SetSystemSpec, Valuations};
use crate::rational::{ratio, Rational};
use crate::valuation::{interval, is_independent_in};

/// An item handed out after the main solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionStep {
    pub item: usize,
    pub agent: usize,
}

/// Start times `(item, start)` of a bundle's jobs.
pub type Schedule = Vec<(usize, u64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub solution: Solution,
    /// Whether each agent's bundle satisfies that agent's constraint.
    pub feasible: Vec<bool>,
    pub completion: Vec<CompletionStep>,
    /// Interval instances: a witness schedule per bundle.
    pub schedules: Option<Vec<Option<Schedule>>>,
}

impl ConstraintReport {
    pub fn all_feasible(&self) -> bool {
        self.feasible.iter().all(|&f| f)
    }
}

fn budget_of(spec: &SetSystemSpec) -> Option<(&[Rational], &Rational)> {
    match spec {
        SetSystemSpec::Budget { sizes, budget } => Some((sizes, budget)),
        _ => None,
    }
}

/// Total size of `b` within the budget.
pub fn within_budget(sizes: &[Rational], budget: &Rational, b: &Bundle) -> bool {
    b.iter().fold(Rational::zero(), |acc, j| acc + &sizes[j]) <= *budget
}

/// Per-agent budgets over common sizes, as an entitled instance sorted by
/// budget (smallest first). Shared budget instances are returned unchanged.
pub fn as_budget_instance(instance: &Instance) -> Result<Instance> {
    let systems: Vec<&SetSystemSpec> = (0..instance.n).map(|i| instance.system(i)).collect();
    if systems.iter().any(|s| budget_of(s).is_none()) {
        return Err(Error::Unsupported("budget adapter needs budget systems for every agent".into()));
    }
    if instance.is_shared() {
        return Ok(instance.clone());
    }
    let sizes = budget_of(systems[0]).expect("checked").0;
    if systems.iter().any(|s| budget_of(s).expect("checked").0 != sizes) {
        return Err(Error::Unsupported("budget adapter needs the same item sizes for every agent".into()));
    }
    let mut order: Vec<usize> = (0..instance.n).collect();
    order.sort_by(|&a, &b| budget_of(systems[a]).unwrap().1.cmp(budget_of(systems[b]).unwrap().1).then(a.cmp(&b)));
    let spec = EntitledSpec { order: Some(order), systems: systems.into_iter().cloned().collect() };
    Instance { valuations: Valuations::Entitled(spec), ..instance.clone() }.validate()
}

/// Budget constraints: 2/5 of the budget-feasible MMS, oracle error
/// `1/(n+1)` (knapsack FPTAS).
pub fn solve_budget_adapter(instance: &Instance) -> Result<ConstraintReport> {
    let inst = as_budget_instance(instance)?;
    let eps = ratio(1, inst.n as i64 + 1);
    let config = SolveConfig::new(Mode::Entitled).with_epsilon(eps);
    let solution = if inst.is_shared() { solve_two_fifths(&inst, &config)? } else { solve_entitled(&inst, &config)? };
    let feasible = (0..inst.n)
        .map(|i| {
            let (sizes, budget) = budget_of(inst.system(i)).expect("budget system");
            within_budget(sizes, budget, &solution.allocation.bundles[i])
        })
        .collect();
    Ok(ConstraintReport { solution, feasible, completion: vec![], schedules: None })
}

fn conflict_edges(instance: &Instance) -> Result<&[(usize, usize)]> {
    match &instance.valuations {
        Valuations::Shared(SetSystemSpec::Conflict { edges }) => Ok(edges),
        _ => Err(Error::Unsupported("conflict adapter needs a shared conflict graph".into())),
    }
}

/// Maximum degree of the conflict graph on `m` items.
pub fn max_degree(edges: &[(usize, usize)], m: usize) -> usize {
    let mut deg = vec![0usize; m];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Conflicting items with `n > max degree`: existence-mode allocation
/// (at least `n/(2n-1) >= 1/2` of every MMS), completed by handing each
/// leftover item, in ascending order, to the lowest-index agent holding
/// nothing in conflict with it.
pub fn solve_conflicts_adapter(instance: &Instance, gate: usize) -> Result<ConstraintReport> {
    let edges = conflict_edges(instance)?;
    let (n, m) = (instance.n, instance.m);
    let degree = max_degree(edges, m);
    if n <= degree {
        return Err(Error::DegreeTooHigh { degree, n });
    }
    let mut solution = solve_existence(instance, gate)?;
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut completion = Vec::new();
    for item in solution.allocation.unallocated(m).items().to_vec() {
        let bundles = &mut solution.allocation.bundles;
        let agent = (0..n)
            .find(|&i| adj[item].iter().all(|&x| !bundles[i].contains(x)))
            .expect("an agent without conflicts exists when n exceeds the degree");
        bundles[agent].insert(item);
        completion.push(CompletionStep { item, agent });
    }
    solution.allocation.refresh_complete(m);
    let system = instance.system(0);
    let feasible = solution
        .allocation
        .bundles
        .iter()
        .map(|b| is_independent_in(system, b).expect("conflict independence is decidable"))
        .collect();
    Ok(ConstraintReport { solution, feasible, completion, schedules: None })
}

/// Interval scheduling: alpha mode with a 1/2-approximate oracle, so every
/// agent gets at least 2/7 of its MMS. Each bundle comes with a schedule.
pub fn solve_intervals_adapter(instance: &Instance) -> Result<ConstraintReport> {
    let jobs = match &instance.valuations {
        Valuations::Shared(SetSystemSpec::Interval { jobs }) => jobs,
        _ => return Err(Error::Unsupported("interval adapter needs shared interval jobs".into())),
    };
    let config = SolveConfig::new(Mode::Alpha).with_epsilon(ratio(1, 2));
    let solution = solve_alpha(instance, &config)?;
    let schedules: Vec<Option<Schedule>> =
        solution.allocation.bundles.iter().map(|b| interval::schedule(jobs, b.items())).collect();
    let feasible = schedules
        .iter()
        .map(|s| s.as_ref().is_some_and(|s| interval::verify_schedule(jobs, s)))
        .collect();
    Ok(ConstraintReport { solution, feasible, completion: vec![], schedules: Some(schedules) })
}

/// Ratio each adapter promises.
pub fn adapter_ratio(system: &SetSystemSpec, n: usize) -> Rational {
    match system {
        SetSystemSpec::Budget { .. } => ratio(2, 5),
        SetSystemSpec::Conflict { .. } => crate::driver::existence_ratio(n),
        SetSystemSpec::Interval { .. } => ratio(2, 7),
        _ => Rational::one(),
    }
}
