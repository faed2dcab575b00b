//! Individual-level analysis of fair regression outputs.
//!
//! Given baseline predictions `B` from an unconstrained learner and fair
//! predictions `F` for the same points, this crate measures how far each
//! individual moved (`D = F - B`), scores both prediction sets on accuracy and
//! demographic-parity disparity, and provides five post-processing
//! transformations that trade individual movement against fairness:
//!
//! - [`postproc::cap`] limits increases to a threshold,
//! - [`postproc::translate_nonpositive`] and
//!   [`postproc::normalize_translate_nonpositive`] guarantee that no output
//!   rises above its baseline,
//! - [`postproc::translate_budget_neutral`] and
//!   [`postproc::normalize_translate_budget_neutral`] keep the mean output
//!   equal to the baseline mean.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, CSV loading and the
//! command line live in the `fairdiff` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod encode;
pub mod error;
pub mod histogram;
pub mod learners;
pub mod linalg;
pub mod metrics;
mod num;
pub mod postproc;
pub mod repair;
pub mod report;

pub use dataset::{split, Dataset, Split, SplitSpec, TaskKind};
pub use error::{Error, Result};
pub use histogram::{histogram, Histogram};
pub use learners::{fit_logistic, fit_ols, FitReport, LogisticOptions, Predictor, PredictorKind};
pub use linalg::Matrix;
pub use metrics::{dp_disparity, standard_loss, EmpiricalCdf, MetricsRow};
pub use num::pairwise_sum;
pub use postproc::{DiffDistribution, Postprocess, PredictionPair};
pub use repair::{fit_repair, RepairModel};
pub use report::{DiffSummary, ExperimentReport};
