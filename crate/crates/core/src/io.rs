//! File formats for solver configuration, allocations and traces. Agents
//! and items are 1-based in every file.

use serde::{Deserialize, Serialize};

use crate::adapters::ConstraintReport;
use crate::allocation::{Allocation, Certificate, VerificationReport};
use crate::bundle::Bundle;
use crate::driver::{Mode, OracleChoice, SolveConfig, Solution};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub trace: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<usize>,
}

pub fn parse_oracle(s: &str) -> Result<OracleChoice> {
    match s {
        "default" => Ok(OracleChoice::Default),
        "exact" => Ok(OracleChoice::Exact),
        "adversarial" => Ok(OracleChoice::Adversarial),
        _ => Err(Error::Malformed(format!("unknown oracle {s:?}"))),
    }
}

impl ConfigJson {
    /// The solver configuration and the trace flag.
    pub fn to_config(&self) -> Result<(SolveConfig, bool)> {
        let mode = Mode::parse(&self.mode).ok_or_else(|| Error::Malformed(format!("unknown mode {:?}", self.mode)))?;
        let mut config = SolveConfig::new(mode);
        if let Some(e) = &self.epsilon {
            config.epsilon = rational::parse(e)?;
        }
        if let Some(o) = &self.oracle {
            config.oracle = parse_oracle(o)?;
        }
        if let Some(d) = &self.delta {
            config.delta = Some(rational::parse(d)?);
        }
        if let Some(g) = self.gate {
            config.gate = g;
        }
        Ok((config, self.trace))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentJson {
    pub agent: usize,
    pub bundle: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    /// `[item, start]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<(usize, u64)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionJson {
    pub item: usize,
    pub agent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Ratio of the MMS the mode guarantees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guarantee: Option<String>,
    #[serde(default)]
    pub complete: bool,
    pub agents: Vec<AgentJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjustments: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub completion: Vec<CompletionJson>,
}

impl AllocationJson {
    /// Per-agent values are item sums, the exact value of an independent
    /// bundle.
    pub fn from_allocation(instance: &Instance, allocation: &Allocation) -> Self {
        let agents = allocation
            .bundles
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let cert = allocation.certificates.as_ref().map(|c| &c[i]);
                let value = b.iter().fold(Rational::from_integer(0.into()), |acc, j| acc + &instance.values[i][j]);
                AgentJson {
                    agent: i + 1,
                    bundle: b.to_one_based(),
                    value: Some(rational::format(&value)),
                    mu: cert.map(|c| rational::format(&c.mu)),
                    ratio: cert.and_then(|c| c.ratio.as_ref().map(rational::format)),
                    feasible: None,
                    schedule: None,
                }
            })
            .collect();
        AllocationJson {
            mode: None,
            guarantee: None,
            complete: allocation.complete,
            agents,
            dropped: vec![],
            adjustments: None,
            completion: vec![],
        }
    }

    pub fn from_solution(instance: &Instance, mode: &str, solution: &Solution) -> Self {
        let mut out = Self::from_allocation(instance, &solution.allocation);
        out.mode = Some(mode.to_string());
        out.guarantee = Some(rational::format(&solution.guarantee));
        out.dropped = solution.dropped.iter().map(|a| a + 1).collect();
        out.adjustments = solution.estimates.as_ref().map(|e| e.adjustments.clone());
        out
    }

    pub fn from_report(instance: &Instance, mode: &str, report: &ConstraintReport) -> Self {
        let mut out = Self::from_solution(instance, mode, &report.solution);
        for (i, a) in out.agents.iter_mut().enumerate() {
            a.feasible = Some(report.feasible[i]);
            if let Some(s) = &report.schedules {
                a.schedule = s[i].as_ref().map(|s| s.iter().map(|&(j, t)| (j + 1, t)).collect());
            }
        }
        out.completion =
            report.completion.iter().map(|c| CompletionJson { item: c.item + 1, agent: c.agent + 1 }).collect();
        out
    }

    /// The bundles, checked against the instance dimensions.
    pub fn to_allocation(&self, instance: &Instance) -> Result<Allocation> {
        let mut bundles = vec![Bundle::new(); instance.n];
        for a in &self.agents {
            if a.agent == 0 || a.agent > instance.n {
                return Err(Error::IndexOutOfRange(format!("agent {}", a.agent)));
            }
            let b = Bundle::from_one_based(&a.bundle)
                .filter(|b| b.iter().all(|j| j < instance.m))
                .ok_or_else(|| Error::IndexOutOfRange(format!("bundle of agent {}", a.agent)))?;
            bundles[a.agent - 1] = b;
        }
        Ok(Allocation::from_bundles(bundles, instance.m))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("allocation serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

/// Attaches value, MMS and ratio to every agent.
pub fn certify(allocation: &mut Allocation, instance: &Instance, records: &[crate::mms::MmsRecord]) {
    let certs = allocation
        .bundles
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let value = b.iter().fold(Rational::from_integer(0.into()), |acc, j| acc + &instance.values[i][j]);
            let mu = records[i].mu.clone();
            let ratio = if num_traits::Zero::is_zero(&mu) { None } else { Some(&value / &mu) };
            Certificate { value, mu, ratio }
        })
        .collect();
    allocation.certificates = Some(certs);
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
struct RoundLine {
    run: usize,
    round: usize,
    divider: usize,
    swaps: Vec<(usize, usize)>,
    remaining: Vec<usize>,
    bundles: Vec<Vec<usize>>,
    matching: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
struct RunLine {
    run: usize,
    mu_star: Vec<String>,
    failed: Option<usize>,
}

/// One JSON line per round, then one per run with its outcome.
pub fn trace_lines(solution: &Solution) -> Vec<String> {
    let mut out = Vec::new();
    for run in &solution.runs {
        for (k, r) in run.rounds.iter().enumerate() {
            let line = RoundLine {
                run: run.run,
                round: k + 1,
                divider: r.divider + 1,
                swaps: r.swaps.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
                remaining: r.remaining.iter().map(|a| a + 1).collect(),
                bundles: r.bundles.iter().map(Bundle::to_one_based).collect(),
                matching: r.matching.iter().map(|&(a, y)| (a + 1, y + 1)).collect(),
            };
            out.push(serde_json::to_string(&line).expect("trace serializes"));
        }
        let line = RunLine {
            run: run.run,
            mu_star: run.mu_star.iter().map(rational::format).collect(),
            failed: run.failed.map(|a| a + 1),
        };
        out.push(serde_json::to_string(&line).expect("trace serializes"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationJson {
    pub alpha: String,
    pub disjoint: bool,
    pub pass: bool,
    pub agents: Vec<AgentJson>,
}

impl VerificationJson {
    pub fn from_report(report: &VerificationReport) -> Self {
        VerificationJson {
            alpha: rational::format(&report.alpha),
            disjoint: report.disjoint,
            pass: report.pass,
            agents: report
                .agents
                .iter()
                .map(|a| AgentJson {
                    agent: a.agent + 1,
                    bundle: vec![],
                    value: Some(rational::format(&a.value)),
                    mu: a.mu.as_ref().map(rational::format),
                    ratio: a.ratio.as_ref().map(rational::format),
                    feasible: Some(a.independent),
                    schedule: None,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::solve_two_fifths;
    use crate::instance::SetSystemSpec;
    use crate::rational::int;

    #[test]
    fn allocation_round_trip() {
        let inst = Instance::shared(vec![vec![int(1); 4]; 2], 4, SetSystemSpec::Free);
        let sol = solve_two_fifths(&inst, &SolveConfig::new(Mode::TwoFifths)).unwrap();
        let json = AllocationJson::from_solution(&inst, "two_fifths", &sol);
        let back = AllocationJson::from_json_str(&json.to_json_string()).unwrap();
        assert_eq!(back, json);
        assert_eq!(back.to_allocation(&inst).unwrap().bundles, sol.allocation.bundles);
    }

    #[test]
    fn config_block() {
        let c = ConfigJson::from_json_str(r#"{"mode":"alpha","epsilon":"1/2","trace":true}"#).unwrap();
        let (config, trace) = c.to_config().unwrap();
        assert_eq!(config.mode, Mode::Alpha);
        assert_eq!(config.epsilon, crate::rational::ratio(1, 2));
        assert!(trace);
        assert!(ConfigJson::from_json_str(r#"{"mode":"fast"}"#).unwrap().to_config().is_err());
    }
}
