use thiserror::Error;

/// Errors surfaced by validation, oracles and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("agent {agent} values item {item} negatively")]
    NegativeValue { agent: usize, item: usize },
    #[error("entitled families are not nested")]
    NonNestedEntitledFamilies,
    #[error("interval job {item} has deadline {deadline} < release + processing - 1 = {min}")]
    InvalidInterval { item: usize, deadline: u64, min: u64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("exact evaluation of a {size}-item bundle exceeds the gate of {gate}")]
    ExactnessGateExceeded { size: usize, gate: usize },
    #[error("item {item} has zero value; an approximate oracle cannot decide its independence")]
    IndeterminateZeroValueSingleton { item: usize },
    #[error("brute force over {m} items exceeds the gate of {gate}")]
    BruteForceGateExceeded { m: usize, gate: usize },
    #[error("agent {agent} could not build {needed} bundles from its MMS partition (found {found})")]
    InsufficientBundles { agent: usize, needed: usize, found: usize },
    #[error("epsilon {0} is outside the supported range")]
    EpsilonOutOfRange(String),
    #[error("conflict graph has maximum degree {degree}, which is not below n = {n}")]
    DegreeTooHigh { degree: usize, n: usize },
    #[error("3-PARTITION input length {0} is not a positive multiple of three")]
    NotTripleMultiple(usize),
    #[error("3-PARTITION sum {sum} is not divisible by {n}")]
    NotDivisible { sum: u64, n: usize },
    #[error("unsupported valuation structure: {0}")]
    Unsupported(String),
    #[error("estimate adjustment did not converge after {0} rounds")]
    NoConvergence(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
