//! Inductive bias and entropic expressivity of black-box search.
//!
//! A search algorithm, fed an information resource, induces an averaged
//! sampling distribution over a finite search space. This crate measures how
//! strongly that distribution favours a target set (bias), how spread out it
//! is (entropic expressivity), and checks numerically that the two obey the
//! conservation, famine, concentration and trade-off bounds that tie them
//! together.
//!
//! Modules:
//! - [`search`]: spaces, targets, strategies, resources, toy algorithms.
//! - [`bias`]: bias measures, extrema, famine and concentration bounds.
//! - [`expressivity`]: entropy, KL divergence, expressivity ranges.
//! - [`oracle`]: constructive lemmas and brute-force oracles.
//! - [`verify`]: the harness that re-checks every bound and reports.

pub mod bias;
pub mod error;
pub mod expressivity;
pub mod oracle;
pub mod report;
pub mod resource_file;
pub mod rng;
pub mod sampling;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use report::{CheckResult, VerificationReport};
pub use search::{
    AlgorithmSpec, InformationResource, ResourceDistribution, ResourcePayload, ResourceSet,
    SearchSpace, SearchTrace, StrategyDistribution, StrategyMap, TargetFunction,
};
pub use verify::{verify_all, VerifyConfig};
