//! Approximate maximin-share allocations of indivisible items under
//! hereditary set system valuations.

pub mod adapters;
pub mod allocation;
pub mod bundle;
pub mod bundles;
pub mod divider;
pub mod driver;
pub mod error;
pub mod generators;
pub mod instance;
pub mod io;
pub mod matching;
pub mod mms;
pub mod rational;
pub mod valuation;

pub use allocation::{Allocation, Certificate};
pub use bundle::Bundle;
pub use error::{Error, Result};
pub use instance::{Instance, Job, SetSystemSpec};
pub use rational::Rational;
