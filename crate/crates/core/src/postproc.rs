//! The distribution of differences `D = F - B` and the five transformations
//! of the fair outputs built on it.
//!
//! Non-positive evolution (no output above its baseline):
//! [`cap`] with `theta = 0`, [`translate_nonpositive`],
//! [`normalize_translate_nonpositive`].
//!
//! Budget neutrality (mean output equal to the baseline mean):
//! [`translate_budget_neutral`], [`normalize_translate_budget_neutral`].
//!
//! Outputs are not clamped to `[0, 1]`: translation may leave the unit
//! interval, and clamping would break the exact mean and rank guarantees.
//! [`clamp_unit`] is available for callers who want it anyway.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::num::{self, check_finite, check_len};

/// Baseline and fair outputs for the same points, with the sensitive
/// attribute and ground truth of each point.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionPair {
    baseline: Vec<f64>,
    fair: Vec<f64>,
    sensitive: Vec<bool>,
    targets: Vec<f64>,
}

impl PredictionPair {
    pub fn new(baseline: Vec<f64>, fair: Vec<f64>, sensitive: Vec<bool>, targets: Vec<f64>) -> Result<Self> {
        if baseline.is_empty() {
            return Err(Error::Empty("prediction pair"));
        }
        check_len("fair vs baseline", fair.len(), baseline.len())?;
        check_len("sensitive vs baseline", sensitive.len(), baseline.len())?;
        check_len("targets vs baseline", targets.len(), baseline.len())?;
        check_finite("baseline", &baseline)?;
        check_finite("fair", &fair)?;
        check_finite("targets", &targets)?;
        Ok(PredictionPair {
            baseline,
            fair,
            sensitive,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.baseline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.baseline.is_empty()
    }

    pub fn baseline(&self) -> &[f64] {
        &self.baseline
    }

    pub fn fair(&self) -> &[f64] {
        &self.fair
    }

    pub fn sensitive(&self) -> &[bool] {
        &self.sensitive
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Same baseline, sensitive attribute and targets; `fair` replaced.
    pub fn with_fair(&self, fair: Vec<f64>) -> Result<Self> {
        PredictionPair::new(self.baseline.clone(), fair, self.sensitive.clone(), self.targets.clone())
    }

    pub fn diffs(&self) -> Vec<f64> {
        self.fair.iter().zip(&self.baseline).map(|(f, b)| f - b).collect()
    }
}

/// Per-point differences and their extremes and mean.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffDistribution {
    pub diffs: Vec<f64>,
    pub max_increase: f64,
    pub max_decrease: f64,
    pub mean_diff: f64,
}

impl DiffDistribution {
    pub fn from_diffs(diffs: Vec<f64>) -> Result<Self> {
        if diffs.is_empty() {
            return Err(Error::Empty("differences"));
        }
        check_finite("differences", &diffs)?;
        Ok(DiffDistribution {
            max_increase: num::max(&diffs),
            max_decrease: num::min(&diffs),
            mean_diff: num::mean(&diffs),
            diffs,
        })
    }

    /// Differences between `outputs` and `baseline`, `outputs[i] - baseline[i]`.
    pub fn between(outputs: &[f64], baseline: &[f64]) -> Result<Self> {
        check_len("outputs vs baseline", outputs.len(), baseline.len())?;
        DiffDistribution::from_diffs(outputs.iter().zip(baseline).map(|(y, b)| y - b).collect())
    }
}

pub fn diff_distribution(pair: &PredictionPair) -> DiffDistribution {
    // a valid pair is non-empty and finite
    DiffDistribution::from_diffs(pair.diffs()).expect("prediction pair invariants")
}

/// Algorithm "cap": `y_i = min(f_i, b_i + theta)`. `theta` may be negative.
pub fn cap(pair: &PredictionPair, theta: f64) -> Result<Vec<f64>> {
    if theta.is_nan() {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: "must not be NaN".into(),
        });
    }
    Ok(pair
        .fair
        .iter()
        .zip(&pair.baseline)
        .map(|(&f, &b)| if f > b + theta { b + theta } else { f })
        .collect())
}

/// Shifts every fair output down by the largest difference, so the point
/// with the largest increase lands on its baseline.
///
/// The result is `f_i - delta` for a single `delta`, which keeps ties and
/// order among the fair outputs. `delta` starts at `max(F - B)` and is raised
/// by single ulps until `y_i <= b_i` holds exactly for every point.
pub fn translate_nonpositive(pair: &PredictionPair) -> Vec<f64> {
    let mut delta = num::max(&pair.diffs());
    loop {
        let y: Vec<f64> = pair.fair.iter().map(|f| f - delta).collect();
        if y.iter().zip(&pair.baseline).all(|(y, b)| y <= b) {
            return y;
        }
        delta = delta.next_up();
    }
}

/// `b_i + (d_i - delta)`, computed in difference space.
fn rebuild(baseline: &[f64], diffs: &[f64], delta: f64) -> Vec<f64> {
    baseline.iter().zip(diffs).map(|(b, d)| b + (d - delta)).collect()
}

/// Min-max rescaling of the differences onto `[a, b]`.
///
/// A constant distribution (max == min) has no spread to rescale; every
/// difference maps to `b`.
pub fn normalize_diffs(d: &DiffDistribution, a: f64, b: f64) -> Result<Vec<f64>> {
    check_range(a, b)?;
    let (lo, hi) = (d.max_decrease, d.max_increase);
    if hi > lo {
        let scale = (b - a) / (hi - lo);
        Ok(d.diffs.iter().map(|x| a + (x - lo) * scale).collect())
    } else {
        Ok(alloc::vec![b; d.diffs.len()])
    }
}

fn check_range(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "range",
            reason: alloc::format!("bounds must be finite, got [{a}, {b}]"),
        });
    }
    if a > b {
        return Err(Error::InvalidRange { a, b });
    }
    Ok(())
}

/// Rescales the differences onto `[a, b]`, then shifts down by the largest
/// rescaled difference so that no output exceeds its baseline.
pub fn normalize_translate_nonpositive(pair: &PredictionPair, a: f64, b: f64) -> Result<Vec<f64>> {
    let normalized = normalize_diffs(&diff_distribution(pair), a, b)?;
    let gamma = num::max(&normalized);
    Ok(rebuild(&pair.baseline, &normalized, gamma))
}

/// Shifts every fair output by the mean difference.
pub fn translate_budget_neutral(pair: &PredictionPair) -> Vec<f64> {
    let delta = num::mean(&pair.diffs());
    pair.fair.iter().map(|f| f - delta).collect()
}

/// Rescales the differences onto `[a, b]`, then removes their mean.
pub fn normalize_translate_budget_neutral(pair: &PredictionPair, a: f64, b: f64) -> Result<Vec<f64>> {
    let normalized = normalize_diffs(&diff_distribution(pair), a, b)?;
    let delta = num::mean(&normalized);
    Ok(rebuild(&pair.baseline, &normalized, delta))
}

/// Clamps outputs into `[0, 1]` in place.
pub fn clamp_unit(outputs: &mut [f64]) {
    outputs.iter_mut().for_each(|y| *y = y.clamp(0.0, 1.0));
}

/// One of the five transformations with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Postprocess {
    Cap { theta: f64 },
    TranslateNonPositive,
    NormalizeNonPositive { a: f64, b: f64 },
    TranslateBudgetNeutral,
    NormalizeBudgetNeutral { a: f64, b: f64 },
}

impl Postprocess {
    pub fn name(&self) -> &'static str {
        match self {
            Postprocess::Cap { .. } => "cap",
            Postprocess::TranslateNonPositive => "translate-nonpos",
            Postprocess::NormalizeNonPositive { .. } => "norm-nonpos",
            Postprocess::TranslateBudgetNeutral => "translate-budget",
            Postprocess::NormalizeBudgetNeutral { .. } => "norm-budget",
        }
    }

    /// Builds a step from its name and the parameters it needs.
    pub fn from_name(name: &str, theta: Option<f64>, a: Option<f64>, b: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>, field: &'static str| {
            v.ok_or_else(|| Error::InvalidParameter {
                name: field,
                reason: alloc::format!("required by `{name}`"),
            })
        };
        match name {
            "cap" => Ok(Postprocess::Cap {
                theta: need(theta, "theta")?,
            }),
            "translate-nonpos" => Ok(Postprocess::TranslateNonPositive),
            "norm-nonpos" => Ok(Postprocess::NormalizeNonPositive {
                a: need(a, "a")?,
                b: need(b, "b")?,
            }),
            "translate-budget" => Ok(Postprocess::TranslateBudgetNeutral),
            "norm-budget" => Ok(Postprocess::NormalizeBudgetNeutral {
                a: need(a, "a")?,
                b: need(b, "b")?,
            }),
            other => Err(Error::InvalidParameter {
                name: "postprocess",
                reason: alloc::format!(
                    "unknown step `{other}` (expected cap, translate-nonpos, norm-nonpos, translate-budget, norm-budget)"
                ),
            }),
        }
    }

    pub fn apply(&self, pair: &PredictionPair) -> Result<Vec<f64>> {
        match *self {
            Postprocess::Cap { theta } => cap(pair, theta),
            Postprocess::TranslateNonPositive => Ok(translate_nonpositive(pair)),
            Postprocess::NormalizeNonPositive { a, b } => normalize_translate_nonpositive(pair, a, b),
            Postprocess::TranslateBudgetNeutral => Ok(translate_budget_neutral(pair)),
            Postprocess::NormalizeBudgetNeutral { a, b } => normalize_translate_budget_neutral(pair, a, b),
        }
    }

    /// Name plus parameters, e.g. `norm-budget[a=-0.1,b=0.1]`.
    pub fn label(&self) -> String {
        match *self {
            Postprocess::Cap { theta } => alloc::format!("cap[theta={theta}]"),
            Postprocess::NormalizeNonPositive { a, b } | Postprocess::NormalizeBudgetNeutral { a, b } => {
                alloc::format!("{}[a={a},b={b}]", self.name())
            }
            _ => String::from(self.name()),
        }
    }
}

impl fmt::Display for Postprocess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Postprocess {
    type Err = Error;

    /// Parses parameterless steps only; use [`Postprocess::from_name`] for
    /// the others.
    fn from_str(s: &str) -> Result<Self> {
        Postprocess::from_name(s, None, None, None)
    }
}
