//! Instances, set-system specifications and validation.

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Scheduling window of one interval job. Periods are `[t, t + 1)` for
/// integer `t >= 1`; a job occupies `processing` consecutive periods inside
/// `[release, deadline]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    #[serde(rename = "p")]
    pub processing: u64,
    #[serde(rename = "r")]
    pub release: u64,
    #[serde(rename = "d")]
    pub deadline: u64,
}

impl Job {
    pub fn new(processing: u64, release: u64, deadline: u64) -> Self {
        Job { processing, release, deadline }
    }

    /// Latest feasible start period.
    pub fn latest_start(&self) -> u64 {
        self.deadline + 1 - self.processing
    }
}

/// One hereditary set system over the items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSystemSpec {
    /// Every subset is independent (additive valuations).
    Free,
    /// Maximal independent sets, stored as an antichain.
    Explicit { sets: Vec<Bundle> },
    /// Knapsack feasibility: total size within the budget.
    Budget { sizes: Vec<Rational>, budget: Rational },
    /// Independent sets of a conflict graph over the items.
    Conflict { edges: Vec<(usize, usize)> },
    /// Jobs schedulable without overlap on a single machine.
    Interval { jobs: Vec<Job> },
}

impl SetSystemSpec {
    /// Builds an explicit family, keeping only the maximal sets.
    pub fn explicit(sets: impl IntoIterator<Item = Bundle>) -> Self {
        let mut sets: Vec<Bundle> = sets.into_iter().collect();
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        let mut kept: Vec<Bundle> = Vec::with_capacity(sets.len());
        for s in sets {
            if !kept.iter().any(|k| s.is_subset(k)) {
                kept.push(s);
            }
        }
        kept.retain(|s| !s.is_empty());
        kept.sort();
        SetSystemSpec::Explicit { sets: kept }
    }

    pub fn conflict(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> =
            edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        SetSystemSpec::Conflict { edges }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SetSystemSpec::Free => "free",
            SetSystemSpec::Explicit { .. } => "explicit",
            SetSystemSpec::Budget { .. } => "budget",
            SetSystemSpec::Conflict { .. } => "conflict",
            SetSystemSpec::Interval { .. } => "interval",
        }
    }

    /// Whether exact valuation is NP-hard for this variant.
    pub fn is_hard(&self) -> bool {
        matches!(
            self,
            SetSystemSpec::Budget { .. } | SetSystemSpec::Conflict { .. } | SetSystemSpec::Interval { .. }
        )
    }

    fn validate(&self, m: usize) -> Result<()> {
        match self {
            SetSystemSpec::Free => {}
            SetSystemSpec::Explicit { sets } => {
                for s in sets {
                    if let Some(&j) = s.items().iter().find(|&&j| j >= m) {
                        return Err(Error::IndexOutOfRange(format!("item {} in explicit family", j + 1)));
                    }
                }
                for (a, sa) in sets.iter().enumerate() {
                    for (b, sb) in sets.iter().enumerate() {
                        if a != b && sa.is_subset(sb) {
                            return Err(Error::Malformed("explicit family is not an antichain".into()));
                        }
                    }
                }
            }
            SetSystemSpec::Budget { sizes, budget } => {
                if sizes.len() != m {
                    return Err(Error::Malformed(format!("{} sizes for {m} items", sizes.len())));
                }
                if sizes.iter().any(rational::is_negative) || rational::is_negative(budget) {
                    return Err(Error::Malformed("negative size or budget".into()));
                }
            }
            SetSystemSpec::Conflict { edges } => {
                for &(a, b) in edges {
                    if a >= m || b >= m {
                        return Err(Error::IndexOutOfRange(format!("edge ({}, {})", a + 1, b + 1)));
                    }
                    if a == b {
                        return Err(Error::Malformed(format!("self-loop on item {}", a + 1)));
                    }
                }
            }
            SetSystemSpec::Interval { jobs } => {
                if jobs.len() != m {
                    return Err(Error::Malformed(format!("{} jobs for {m} items", jobs.len())));
                }
                for (item, job) in jobs.iter().enumerate() {
                    if job.processing == 0 || job.release == 0 {
                        return Err(Error::Malformed(format!(
                            "job {} needs processing time and release >= 1",
                            item + 1
                        )));
                    }
                    let min = job.release + job.processing - 1;
                    if job.deadline < min {
                        return Err(Error::InvalidInterval { item, deadline: job.deadline, min });
                    }
                }
            }
        }
        Ok(())
    }

    /// Decides `F_self ⊆ F_other` when a cheap exact test exists, or by
    /// exhaustive comparison for `m <= 16`. `None` means undecided.
    pub fn family_subset(&self, other: &SetSystemSpec, m: usize) -> Option<bool> {
        use SetSystemSpec::*;
        match (self, other) {
            (_, Free) => return Some(true),
            (Explicit { sets: a }, Explicit { sets: b }) => {
                return Some(a.iter().all(|s| b.iter().any(|t| s.is_subset(t))));
            }
            (Explicit { sets }, _) => {
                if let Some(all) = sets.iter().map(|s| crate::valuation::is_independent_in(other, s)).collect::<Option<Vec<_>>>() {
                    return Some(all.into_iter().all(|x| x));
                }
            }
            (Conflict { edges: a }, Conflict { edges: b }) => {
                return Some(b.iter().all(|e| a.contains(e)));
            }
            (Budget { sizes: sa, budget: ba }, Budget { sizes: sb, budget: bb }) if sa == sb && ba <= bb => {
                return Some(true);
            }
            _ => {}
        }
        if m <= 16 {
            let a = crate::mms::independence_table(self, m);
            let b = crate::mms::independence_table(other, m);
            return Some(a.iter().zip(&b).all(|(x, y)| !*x || *y));
        }
        None
    }
}

/// Per-agent set systems nested along some agent ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitledSpec {
    /// Agents from most to least restrictive family, when known.
    pub order: Option<Vec<usize>>,
    pub systems: Vec<SetSystemSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuations {
    Shared(SetSystemSpec),
    Entitled(EntitledSpec),
    Asymmetric(Vec<SetSystemSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    /// `values[i][j]` is agent `i`'s value for item `j`.
    pub values: Vec<Vec<Rational>>,
    pub valuations: Valuations,
}

impl Instance {
    pub fn shared(values: Vec<Vec<Rational>>, m: usize, system: SetSystemSpec) -> Self {
        Instance { n: values.len(), m, values, valuations: Valuations::Shared(system) }
    }

    pub fn system(&self, agent: usize) -> &SetSystemSpec {
        match &self.valuations {
            Valuations::Shared(s) => s,
            Valuations::Entitled(e) => &e.systems[agent],
            Valuations::Asymmetric(v) => &v[agent],
        }
    }

    pub fn is_shared(&self) -> bool {
        matches!(self.valuations, Valuations::Shared(_))
    }

    /// Returns the instance iff every structural invariant holds.
    pub fn validate(self) -> Result<Self> {
        if self.values.len() != self.n {
            return Err(Error::Malformed(format!("{} value rows for n = {}", self.values.len(), self.n)));
        }
        for (agent, row) in self.values.iter().enumerate() {
            if row.len() != self.m {
                return Err(Error::Malformed(format!(
                    "agent {} has {} values for m = {}",
                    agent + 1,
                    row.len(),
                    self.m
                )));
            }
            if let Some(item) = row.iter().position(rational::is_negative) {
                return Err(Error::NegativeValue { agent, item });
            }
        }
        match &self.valuations {
            Valuations::Shared(s) => s.validate(self.m)?,
            Valuations::Asymmetric(systems) => {
                if systems.len() != self.n {
                    return Err(Error::Malformed(format!("{} systems for n = {}", systems.len(), self.n)));
                }
                for s in systems {
                    s.validate(self.m)?;
                }
            }
            Valuations::Entitled(spec) => {
                if spec.systems.len() != self.n {
                    return Err(Error::Malformed(format!("{} systems for n = {}", spec.systems.len(), self.n)));
                }
                for s in &spec.systems {
                    s.validate(self.m)?;
                }
                match &spec.order {
                    Some(order) => {
                        let mut seen = vec![false; self.n];
                        for &a in order {
                            if a >= self.n {
                                return Err(Error::IndexOutOfRange(format!("agent {} in ordering", a + 1)));
                            }
                            if std::mem::replace(&mut seen[a], true) {
                                return Err(Error::Malformed(format!("agent {} repeated in ordering", a + 1)));
                            }
                        }
                        if order.len() != self.n {
                            return Err(Error::Malformed("ordering must list every agent".into()));
                        }
                        for w in order.windows(2) {
                            let inner = &spec.systems[w[0]];
                            let outer = &spec.systems[w[1]];
                            if inner.family_subset(outer, self.m) == Some(false) {
                                return Err(Error::NonNestedEntitledFamilies);
                            }
                        }
                    }
                    None => {
                        for a in 0..self.n {
                            for b in a + 1..self.n {
                                let (sa, sb) = (&spec.systems[a], &spec.systems[b]);
                                if sa.family_subset(sb, self.m) == Some(false)
                                    && sb.family_subset(sa, self.m) == Some(false)
                                {
                                    return Err(Error::NonNestedEntitledFamilies);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(self)
    }

    /// Agents from most to least restrictive family. Uses the declared
    /// ordering when present; otherwise sorts by pairwise containment
    /// (ties and undecided pairs fall back to agent index).
    pub fn restrictiveness_order(&self) -> Vec<usize> {
        match &self.valuations {
            Valuations::Entitled(spec) => {
                if let Some(order) = &spec.order {
                    return order.clone();
                }
                let mut rank: Vec<(usize, usize)> = (0..self.n)
                    .map(|a| {
                        let contained_in = (0..self.n)
                            .filter(|&b| {
                                b != a
                                    && spec.systems[a].family_subset(&spec.systems[b], self.m) == Some(true)
                            })
                            .count();
                        (self.n - contained_in, a)
                    })
                    .collect();
                rank.sort();
                rank.into_iter().map(|(_, a)| a).collect()
            }
            _ => (0..self.n).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// File format. Items and agents are 1-based here.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SystemJson {
    Free,
    Explicit {
        sets: Vec<Vec<usize>>,
    },
    Budget {
        #[serde(with = "rational::serde_str::vec")]
        sizes: Vec<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<String>,
        /// One budget per agent; implies entitled valuations.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budgets: Option<Vec<String>>,
    },
    Conflict {
        edges: Vec<(usize, usize)>,
    },
    Interval {
        jobs: Vec<Job>,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EntitledJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systems: Option<Vec<SystemJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub m: usize,
    #[serde(with = "rational::serde_str::matrix")]
    pub values: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entitled: Option<EntitledJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetric: Option<Vec<SystemJson>>,
}

fn zero_based(items: &[usize], what: &str) -> Result<Bundle> {
    Bundle::from_one_based(items).ok_or_else(|| Error::IndexOutOfRange(format!("item 0 in {what}")))
}

impl SystemJson {
    fn from_spec(spec: &SetSystemSpec) -> SystemJson {
        match spec {
            SetSystemSpec::Free => SystemJson::Free,
            SetSystemSpec::Explicit { sets } => SystemJson::Explicit {
                sets: sets.iter().map(Bundle::to_one_based).collect(),
            },
            SetSystemSpec::Budget { sizes, budget } => SystemJson::Budget {
                sizes: sizes.clone(),
                budget: Some(rational::format(budget)),
                budgets: None,
            },
            SetSystemSpec::Conflict { edges } => SystemJson::Conflict {
                edges: edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
            },
            SetSystemSpec::Interval { jobs } => SystemJson::Interval { jobs: jobs.clone() },
        }
    }

    /// Single-agent conversion; per-agent budgets are rejected here.
    fn to_spec(&self) -> Result<SetSystemSpec> {
        Ok(match self {
            SystemJson::Free => SetSystemSpec::Free,
            SystemJson::Explicit { sets } => SetSystemSpec::explicit(
                sets.iter().map(|s| zero_based(s, "explicit family")).collect::<Result<Vec<_>>>()?,
            ),
            SystemJson::Budget { sizes, budget, budgets } => match (budget, budgets) {
                (Some(b), None) => SetSystemSpec::Budget { sizes: sizes.clone(), budget: rational::parse(b)? },
                _ => return Err(Error::Malformed("expected exactly one \"budget\"".into())),
            },
            SystemJson::Conflict { edges } => {
                let mut out = Vec::with_capacity(edges.len());
                for &(a, b) in edges {
                    if a == 0 || b == 0 {
                        return Err(Error::IndexOutOfRange("item 0 in edge list".into()));
                    }
                    out.push((a - 1, b - 1));
                }
                SetSystemSpec::conflict(out)
            }
            SystemJson::Interval { jobs } => SetSystemSpec::Interval { jobs: jobs.clone() },
        })
    }
}

impl Instance {
    pub fn to_json(&self) -> InstanceJson {
        let (system, entitled, asymmetric) = match &self.valuations {
            Valuations::Shared(s) => (Some(SystemJson::from_spec(s)), None, None),
            Valuations::Entitled(e) => (
                None,
                Some(EntitledJson {
                    order: e.order.as_ref().map(|o| o.iter().map(|a| a + 1).collect()),
                    systems: Some(e.systems.iter().map(SystemJson::from_spec).collect()),
                }),
                None,
            ),
            Valuations::Asymmetric(v) => (None, None, Some(v.iter().map(SystemJson::from_spec).collect())),
        };
        InstanceJson { n: self.n, m: self.m, values: self.values.clone(), system, entitled, asymmetric }
    }

    pub fn from_json(raw: InstanceJson) -> Result<Instance> {
        let order = match raw.entitled.as_ref().and_then(|e| e.order.as_ref()) {
            Some(order) => {
                if order.contains(&0) {
                    return Err(Error::IndexOutOfRange("agent 0 in ordering".into()));
                }
                Some(order.iter().map(|a| a - 1).collect())
            }
            None => None,
        };
        let valuations = if let Some(asym) = &raw.asymmetric {
            if raw.system.is_some() || raw.entitled.is_some() {
                return Err(Error::Malformed("\"asymmetric\" excludes \"system\" and \"entitled\"".into()));
            }
            Valuations::Asymmetric(asym.iter().map(SystemJson::to_spec).collect::<Result<_>>()?)
        } else if let Some(systems) = raw.entitled.as_ref().and_then(|e| e.systems.as_ref()) {
            if raw.system.is_some() {
                return Err(Error::Malformed("entitled systems exclude a shared \"system\"".into()));
            }
            Valuations::Entitled(EntitledSpec {
                order,
                systems: systems.iter().map(SystemJson::to_spec).collect::<Result<_>>()?,
            })
        } else {
            match &raw.system {
                Some(SystemJson::Budget { sizes, budget: None, budgets: Some(budgets) }) => {
                    let systems = budgets
                        .iter()
                        .map(|b| Ok(SetSystemSpec::Budget { sizes: sizes.clone(), budget: rational::parse(b)? }))
                        .collect::<Result<Vec<_>>>()?;
                    let order = order.or_else(|| {
                        let mut idx: Vec<usize> = (0..systems.len()).collect();
                        let budget = |a: usize| match &systems[a] {
                            SetSystemSpec::Budget { budget, .. } => budget.clone(),
                            _ => unreachable!(),
                        };
                        idx.sort_by(|&a, &b| budget(a).cmp(&budget(b)).then(a.cmp(&b)));
                        Some(idx)
                    });
                    Valuations::Entitled(EntitledSpec { order, systems })
                }
                Some(sys) => {
                    let spec = sys.to_spec()?;
                    if raw.entitled.is_some() {
                        Valuations::Entitled(EntitledSpec { order, systems: vec![spec; raw.n] })
                    } else {
                        Valuations::Shared(spec)
                    }
                }
                None => return Err(Error::Malformed("missing \"system\"".into())),
            }
        };
        Instance { n: raw.n, m: raw.m, values: raw.values, valuations }.validate()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("instance serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Instance> {
        let raw: InstanceJson = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        Instance::from_json(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn unit(n: usize, m: usize) -> Vec<Vec<Rational>> {
        vec![vec![int(1); m]; n]
    }

    #[test]
    fn identity_instance_is_valid() {
        let inst = Instance::shared(unit(2, 2), 2, SetSystemSpec::Free);
        assert!(inst.validate().is_ok());
    }

    #[test]
    fn negative_value_rejected() {
        let mut values = unit(2, 2);
        values[1][0] = int(-1);
        let err = Instance::shared(values, 2, SetSystemSpec::Free).validate().unwrap_err();
        assert_eq!(err, Error::NegativeValue { agent: 1, item: 0 });
    }

    #[test]
    fn non_nested_entitled_families_rejected() {
        let systems = vec![
            SetSystemSpec::explicit([Bundle::singleton(0)]),
            SetSystemSpec::explicit([Bundle::singleton(1)]),
        ];
        for order in [None, Some(vec![0, 1])] {
            let inst = Instance {
                n: 2,
                m: 2,
                values: unit(2, 2),
                valuations: Valuations::Entitled(EntitledSpec { order, systems: systems.clone() }),
            };
            assert_eq!(inst.validate().unwrap_err(), Error::NonNestedEntitledFamilies);
        }
    }

    #[test]
    fn invalid_interval_rejected() {
        let inst = Instance::shared(unit(1, 1), 1, SetSystemSpec::Interval { jobs: vec![Job::new(2, 3, 3)] });
        assert_eq!(inst.validate().unwrap_err(), Error::InvalidInterval { item: 0, deadline: 3, min: 4 });
    }

    #[test]
    fn out_of_range_items_rejected() {
        let inst = Instance::shared(unit(1, 2), 2, SetSystemSpec::explicit([Bundle::from_items([0, 5])]));
        assert!(matches!(inst.validate(), Err(Error::IndexOutOfRange(_))));
        let inst = Instance::shared(unit(1, 2), 2, SetSystemSpec::conflict([(0, 2)]));
        assert!(matches!(inst.validate(), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn explicit_normalizes_to_antichain() {
        let spec = SetSystemSpec::explicit([
            Bundle::from_items([0, 1]),
            Bundle::from_items([0]),
            Bundle::from_items([1, 2]),
            Bundle::from_items([0, 1]),
        ]);
        assert_eq!(
            spec,
            SetSystemSpec::Explicit { sets: vec![Bundle::from_items([0, 1]), Bundle::from_items([1, 2])] }
        );
    }

    #[test]
    fn json_round_trip_with_per_agent_budgets() {
        let text = r#"{"n":2,"m":4,"values":[["1","1","1","1"],["1","1","1","1"]],
            "system":{"kind":"budget","sizes":["1","1","1","1"],"budgets":["6","3"]}}"#;
        let inst = Instance::from_json_str(text).unwrap();
        match &inst.valuations {
            Valuations::Entitled(e) => assert_eq!(e.order, Some(vec![1, 0])),
            other => panic!("expected entitled, got {other:?}"),
        }
        let again = Instance::from_json_str(&inst.to_json_string()).unwrap();
        assert_eq!(again, inst);
    }
}
