//! Accuracy and demographic-parity disparity.
//!
//! The disparity of predictions `f(X)` with respect to a boolean attribute `A`
//! is the largest l-infinity distance between a group-conditional CDF and the
//! marginal CDF:
//!
//! ```text
//! max over a in {true, false} of  sup_z | P[f(X) <= z | A = a] - P[f(X) <= z] |
//! ```
//!
//! Both CDFs are right-continuous step functions that only jump at sample
//! values, so the supremum is attained at a sample value and is computed
//! exactly in one sorted sweep.

use alloc::vec::Vec;

use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::num::{check_finite, check_len, pairwise_sum};

/// Probability clamp applied before taking logarithms.
pub const LOG_LOSS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted_values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("values"));
        }
        check_finite("values", values)?;
        let mut sorted_values = values.to_vec();
        sorted_values.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted_values })
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Fraction of values `<= z`.
    pub fn eval(&self, z: f64) -> f64 {
        let count = self.sorted_values.partition_point(|&v| v <= z);
        count as f64 / self.len() as f64
    }
}

/// `|count_group / n_group - count_all / n_all|`, the discrepancy between
/// two empirical CDFs at one point.
#[inline]
pub fn cdf_gap(count_group: usize, n_group: usize, count_all: usize, n_all: usize) -> f64 {
    libm::fabs(count_group as f64 / n_group as f64 - count_all as f64 / n_all as f64)
}

/// Demographic-parity disparity of `predictions` with respect to `sensitive`.
///
/// The result lies in `[0, 1]`. Predictions need not lie in `[0, 1]`; the
/// statistic depends only on their ranks, so post-processed outputs that
/// leave the unit interval are scored the same way.
pub fn dp_disparity(predictions: &[f64], sensitive: &[bool]) -> Result<f64> {
    check_len("predictions vs sensitive", predictions.len(), sensitive.len())?;
    check_finite("predictions", predictions)?;
    let n = predictions.len();
    let n_true = sensitive.iter().filter(|&&s| s).count();
    let n_false = n - n_true;
    if n_true == 0 {
        return Err(Error::EmptyGroup(true));
    }
    if n_false == 0 {
        return Err(Error::EmptyGroup(false));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| predictions[i].total_cmp(&predictions[j]));

    let (mut seen, mut seen_true) = (0usize, 0usize);
    let mut worst: f64 = 0.0;
    let mut k = 0;
    while k < n {
        // consume the whole block of tied values before evaluating
        let z = predictions[order[k]];
        while k < n && predictions[order[k]] == z {
            seen += 1;
            if sensitive[order[k]] {
                seen_true += 1;
            }
            k += 1;
        }
        let gap_true = cdf_gap(seen_true, n_true, seen, n);
        let gap_false = cdf_gap(seen - seen_true, n_false, seen, n);
        worst = worst.max(gap_true).max(gap_false);
    }
    Ok(worst)
}

/// Mean squared error or mean log-loss, depending on the task.
pub fn standard_loss(predictions: &[f64], targets: &[f64], kind: TaskKind) -> Result<f64> {
    check_len("predictions vs targets", predictions.len(), targets.len())?;
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    check_finite("predictions", predictions)?;
    check_finite("targets", targets)?;
    let terms: Vec<f64> = match kind {
        TaskKind::SquareLoss => predictions
            .iter()
            .zip(targets)
            .map(|(p, y)| (p - y) * (p - y))
            .collect(),
        TaskKind::LogisticLoss => predictions
            .iter()
            .zip(targets)
            .map(|(&p, &y)| {
                let p = p.clamp(LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS);
                -(y * libm::log(p) + (1.0 - y) * libm::log(1.0 - p))
            })
            .collect(),
    };
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// Accuracy and fairness of one prediction set, as reported per learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub loss_std: f64,
    pub dp_disp: f64,
}

impl MetricsRow {
    pub fn evaluate(predictions: &[f64], targets: &[f64], sensitive: &[bool], kind: TaskKind) -> Result<Self> {
        Ok(MetricsRow {
            loss_std: standard_loss(predictions, targets, kind)?,
            dp_disp: dp_disparity(predictions, sensitive)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_single_point() {
        let c = EmpiricalCdf::new(&[0.5]).unwrap();
        assert_eq!(c.eval(0.4), 0.0);
        assert_eq!(c.eval(0.5), 1.0);
    }

    #[test]
    fn cdf_with_ties() {
        let c = EmpiricalCdf::new(&[0.2, 0.8, 0.2]).unwrap();
        assert_eq!(c.eval(0.2), 2.0 / 3.0);
        assert_eq!(c.eval(1.0), 1.0);
        assert_eq!(c.sorted_values(), &[0.2, 0.2, 0.8]);
    }

    #[test]
    fn cdf_rejects_empty() {
        assert_eq!(EmpiricalCdf::new(&[]), Err(Error::Empty("values")));
    }

    #[test]
    fn separated_groups_have_half_disparity() {
        let p = [0.1, 0.2, 0.8, 0.9];
        let a = [true, true, false, false];
        assert_eq!(dp_disparity(&p, &a).unwrap(), 0.5);
    }

    #[test]
    fn equal_predictions_have_zero_disparity() {
        assert_eq!(dp_disparity(&[0.4; 5], &[true, false, true, false, false]).unwrap(), 0.0);
    }

    #[test]
    fn constant_shift_keeps_disparity() {
        let p = [0.1, 0.35, 0.2, 0.7, 0.55, 0.3];
        let a = [true, false, true, false, false, true];
        let shifted: Vec<f64> = p.iter().map(|v| v + 0.25).collect();
        assert_eq!(dp_disparity(&p, &a).unwrap(), dp_disparity(&shifted, &a).unwrap());
    }

    #[test]
    fn disparity_requires_both_groups() {
        assert_eq!(dp_disparity(&[0.1, 0.2], &[true, true]), Err(Error::EmptyGroup(false)));
        assert_eq!(dp_disparity(&[0.1, 0.2], &[false, false]), Err(Error::EmptyGroup(true)));
        assert!(matches!(dp_disparity(&[0.1], &[true, false]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn square_loss_examples() {
        assert_eq!(standard_loss(&[0.3, 0.6], &[0.3, 0.6], TaskKind::SquareLoss).unwrap(), 0.0);
        assert_eq!(standard_loss(&[0.0, 1.0], &[1.0, 0.0], TaskKind::SquareLoss).unwrap(), 1.0);
    }

    #[test]
    fn log_loss_of_coin_flip() {
        let l = standard_loss(&[0.5, 0.5], &[0.0, 1.0], TaskKind::LogisticLoss).unwrap();
        assert!((l - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn log_loss_clamps_extremes() {
        let l = standard_loss(&[0.0], &[1.0], TaskKind::LogisticLoss).unwrap();
        assert!((l - 12.0 * core::f64::consts::LN_10).abs() < 1e-6);
    }

    #[test]
    fn loss_length_mismatch() {
        assert!(matches!(
            standard_loss(&[0.1], &[0.1, 0.2], TaskKind::SquareLoss),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
