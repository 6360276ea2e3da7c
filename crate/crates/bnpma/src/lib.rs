//! Bayesian nonparametric meta-analysis of reported survival-time
//! summaries.
//!
//! Each cohort contributes a quadruple (lower CI bound, median, upper
//! CI bound, sample size) from which exact binomial order-statistic
//! counts are recovered. A random distribution per cohort is built as a
//! tail-free tree whose first two levels are anchored at the reported
//! values; branch probabilities at those levels are modeled on the
//! logit scale with covariate effects, study intercepts, and a
//! stick-breaking mixture that clusters studies. Inference runs by
//! Gibbs sampling with exact Pólya-Gamma augmentation.
//!
//! Entry points:
//! - [`data::Dataset`] holds validated cohort summaries.
//! - [`model::ModelState::init`] builds the model; [`gibbs::run_chain`]
//!   samples it deterministically for a given seed at any worker count.
//! - [`posterior`] turns emitted draws into medians, survival curves,
//!   effect contrasts, predictive densities, and a clustering estimate.
//! - [`sim`] generates synthetic datasets with known truth and scores
//!   recovery against it.

pub mod centering;
pub mod config;
pub mod data;
pub mod error;
pub mod gibbs;
pub mod ingest;
pub mod logistic;
pub mod model;
pub mod partition;
pub mod polya_gamma;
pub mod posterior;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod runner;
pub mod sim;

pub use error::{Error, Result};
