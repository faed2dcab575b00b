//! One row of an experiment result table.

use alloc::string::String;

use crate::error::{Error, Result};
use crate::postproc::DiffDistribution;

/// Extremes and mean of a set of differences against the baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSummary {
    pub max_increase: f64,
    pub max_decrease: f64,
    pub avg_difference: f64,
}

impl From<&DiffDistribution> for DiffSummary {
    fn from(d: &DiffDistribution) -> Self {
        DiffSummary {
            max_increase: d.max_increase,
            max_decrease: d.max_decrease,
            avg_difference: d.mean_diff,
        }
    }
}

/// Baseline metrics, fair metrics, the `F - B` summary and, optionally, the
/// metrics of one post-processing step.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub baseline_learner: String,
    pub baseline_loss: f64,
    pub baseline_dp: f64,
    /// Disparity target handed to the fair predictor. For the built-in
    /// quantile repair this is its training-set target, not a reduction slack.
    pub epsilon: f64,
    pub fair_learner: String,
    pub fair_loss: f64,
    pub fair_dp: f64,
    pub max_increase: f64,
    pub max_decrease: f64,
    pub avg_difference: f64,
    pub postproc_name: Option<String>,
    pub postproc_loss: Option<f64>,
    pub postproc_dp: Option<f64>,
    /// Post-processed outputs against the baseline. Not part of the CSV row.
    pub postproc_diff: Option<DiffSummary>,
}

impl ExperimentReport {
    pub fn fair_diff(&self) -> DiffSummary {
        DiffSummary {
            max_increase: self.max_increase,
            max_decrease: self.max_decrease,
            avg_difference: self.avg_difference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |d: DiffSummary| d.max_decrease <= d.avg_difference && d.avg_difference <= d.max_increase;
        if !ordered(self.fair_diff()) {
            return Err(Error::Invariant("max_decrease <= avg_difference <= max_increase"));
        }
        if let Some(d) = self.postproc_diff {
            if !ordered(d) {
                return Err(Error::Invariant("post-processed differences out of order"));
            }
        }
        let dp_ok = |v: f64| (0.0..=1.0).contains(&v);
        if !dp_ok(self.baseline_dp) || !dp_ok(self.fair_dp) || !self.postproc_dp.map_or(true, dp_ok) {
            return Err(Error::Invariant("dp disparity outside [0, 1]"));
        }
        let postproc_fields = [
            self.postproc_name.is_some(),
            self.postproc_loss.is_some(),
            self.postproc_dp.is_some(),
        ];
        if postproc_fields.iter().any(|&s| s != postproc_fields[0]) {
            return Err(Error::Invariant("post-processing fields must be all present or all absent"));
        }
        Ok(())
    }
}
