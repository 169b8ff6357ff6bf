//! Allocations and verification reports.

use crate::bundle::Bundle;
use crate::rational::Rational;

/// Per-agent certificate attached to a solved allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub value: Rational,
    pub mu: Rational,
    /// `None` when `mu` is zero.
    pub ratio: Option<Rational>,
}

/// One bundle per agent (agent `i` holds `bundles[i]`), pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    /// True when every item is allocated.
    pub complete: bool,
    pub certificates: Option<Vec<Certificate>>,
}

impl Allocation {
    pub fn empty(n: usize) -> Self {
        Allocation { bundles: vec![Bundle::new(); n], complete: false, certificates: None }
    }

    pub fn from_bundles(bundles: Vec<Bundle>, m: usize) -> Self {
        let complete = bundles.iter().map(Bundle::len).sum::<usize>() == m
            && bundles.iter().fold(Bundle::new(), |acc, b| acc.union(b)).len() == m;
        Allocation { bundles, complete, certificates: None }
    }

    /// Items held by nobody, ascending.
    pub fn unallocated(&self, m: usize) -> Bundle {
        let held = self.bundles.iter().fold(Bundle::new(), |acc, b| acc.union(b));
        Bundle::full(m).difference(&held)
    }

    pub fn refresh_complete(&mut self, m: usize) {
        self.complete = self.unallocated(m).is_empty();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentReport {
    pub agent: usize,
    pub value: Rational,
    pub mu: Option<Rational>,
    pub ratio: Option<Rational>,
    pub independent: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub alpha: Rational,
    pub disjoint: bool,
    pub agents: Vec<AgentReport>,
    pub pass: bool,
}
