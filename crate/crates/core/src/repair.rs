//! Group-conditional quantile repair of baseline predictions.
//!
//! Each group's predictions are mapped to their within-group rank and then to
//! the pooled quantile at that rank. `lambda` interpolates between the
//! original prediction (`0`) and the fully repaired one (`1`). The smallest
//! `lambda` on a 1/64 grid that brings the training disparity under the
//! target is selected.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::dp_disparity;
use crate::num::{check_len, check_unit_range, interpolate};

/// Number of steps in the `lambda` search grid.
pub const LAMBDA_GRID: u32 = 64;

/// Monotone piecewise-linear link between values and plotting positions.
///
/// Knot `i` of a sorted sample of size `n` sits at position `(i + 0.5) / n`;
/// tied values collapse into one knot at their mean position, which keeps
/// `values` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileMap {
    values: Vec<f64>,
    positions: Vec<f64>,
}

impl QuantileMap {
    pub fn from_sample(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Empty("quantile sample"));
        }
        crate::num::check_finite("quantile sample", sample)?;
        let mut sorted = sample.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let n = sorted.len() as f64;

        let mut values = Vec::new();
        let mut positions = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            // mean of (k + 0.5) / n for k in i..j
            let mean_position = (i + j) as f64 / (2.0 * n);
            values.push(sorted[i]);
            positions.push(mean_position);
            i = j;
        }
        Ok(QuantileMap { values, positions })
    }

    /// Rebuilds a map from stored knots; both sequences must be strictly
    /// increasing and of equal, non-zero length.
    pub fn from_knots(values: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        check_len("knot values vs positions", values.len(), positions.len())?;
        if values.is_empty() {
            return Err(Error::Empty("quantile knots"));
        }
        crate::num::check_finite("knot values", &values)?;
        crate::num::check_finite("knot positions", &positions)?;
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&values) || !increasing(&positions) {
            return Err(Error::InvalidParameter {
                name: "quantile knots",
                reason: "knots must be strictly increasing".into(),
            });
        }
        Ok(QuantileMap { values, positions })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Plotting position of `value`, constant outside the knot range.
    pub fn rank(&self, value: f64) -> f64 {
        interpolate(&self.values, &self.positions, value)
    }

    /// Value at plotting position `u`, constant outside the knot range.
    pub fn quantile(&self, u: f64) -> f64 {
        interpolate(&self.positions, &self.values, u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairModel {
    /// Rank maps for the `false` and `true` groups, in that order.
    group_maps: [QuantileMap; 2],
    pooled: QuantileMap,
    lambda: f64,
    epsilon_target: f64,
}

fn check_epsilon(epsilon_target: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon_target) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "epsilon_target",
            reason: alloc::format!("{epsilon_target} is not in [0, 1]"),
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            reason: alloc::format!("{lambda} is not in [0, 1]"),
        })
    }
}

impl RepairModel {
    pub fn from_parts(
        map_false: QuantileMap,
        map_true: QuantileMap,
        pooled: QuantileMap,
        lambda: f64,
        epsilon_target: f64,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        check_epsilon(epsilon_target)?;
        Ok(RepairModel {
            group_maps: [map_false, map_true],
            pooled,
            lambda,
            epsilon_target,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon_target(&self) -> f64 {
        self.epsilon_target
    }

    pub fn group_map(&self, group: bool) -> &QuantileMap {
        &self.group_maps[group as usize]
    }

    pub fn pooled(&self) -> &QuantileMap {
        &self.pooled
    }

    /// Same maps, different interpolation weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(RepairModel {
            lambda,
            ..self.clone()
        })
    }

    /// Fully repaired value of one prediction.
    pub fn repaired_value(&self, prediction: f64, group: bool) -> f64 {
        let u = self.group_map(group).rank(prediction);
        self.pooled.quantile(u)
    }

    pub fn apply(&self, predictions: &[f64], sensitive: &[bool]) -> Result<Vec<f64>> {
        check_len("predictions vs sensitive", predictions.len(), sensitive.len())?;
        check_unit_range("predictions", predictions)?;
        Ok(predictions
            .iter()
            .zip(sensitive)
            .map(|(&p, &a)| {
                let target = self.repaired_value(p, a);
                ((1.0 - self.lambda) * p + self.lambda * target).clamp(0.0, 1.0)
            })
            .collect())
    }
}

/// Builds the quantile maps from training predictions and picks the
/// smallest grid `lambda` whose repaired training predictions have disparity
/// at most `epsilon_target` (falling back to `lambda = 1`).
pub fn fit_repair(base_predictions: &[f64], sensitive: &[bool], epsilon_target: f64) -> Result<RepairModel> {
    check_len("predictions vs sensitive", base_predictions.len(), sensitive.len())?;
    check_epsilon(epsilon_target)?;
    check_unit_range("predictions", base_predictions)?;
    let group = |g: bool| -> Vec<f64> {
        base_predictions
            .iter()
            .zip(sensitive)
            .filter(|(_, &a)| a == g)
            .map(|(&p, _)| p)
            .collect()
    };
    let (falses, trues) = (group(false), group(true));
    if trues.is_empty() {
        return Err(Error::EmptyGroup(true));
    }
    if falses.is_empty() {
        return Err(Error::EmptyGroup(false));
    }

    let mut model = RepairModel {
        group_maps: [QuantileMap::from_sample(&falses)?, QuantileMap::from_sample(&trues)?],
        pooled: QuantileMap::from_sample(base_predictions)?,
        lambda: 1.0,
        epsilon_target,
    };
    for step in 0..=LAMBDA_GRID {
        let lambda = f64::from(step) / f64::from(LAMBDA_GRID);
        let candidate = model.with_lambda(lambda)?;
        let repaired = candidate.apply(base_predictions, sensitive)?;
        if dp_disparity(&repaired, sensitive)? <= epsilon_target {
            model.lambda = lambda;
            return Ok(model);
        }
    }
    model.lambda = 1.0;
    Ok(model)
}
