//! Unconstrained baseline learners: ridge-stabilized ordinary least squares
//! for square-loss tasks and L2-regularized logistic regression for
//! logistic-loss tasks. Both produce outputs in `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dataset::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, Matrix};
use crate::num::{check_finite, check_len, pairwise_sum, sigmoid, softplus};

/// Ridge added to the (mean-scaled) normal equations of [`fit_ols`].
pub const OLS_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictorKind {
    Ols,
    Logistic,
}

impl PredictorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictorKind::Ols => "ols",
            PredictorKind::Logistic => "logistic",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ols" => Ok(PredictorKind::Ols),
            "logistic" | "lr" => Ok(PredictorKind::Logistic),
            other => Err(Error::InvalidParameter {
                name: "learner",
                reason: alloc::format!("unknown learner `{other}` (expected ols or logistic)"),
            }),
        }
    }
}

/// A linear model whose outputs are mapped into `[0, 1]`: clamped for OLS,
/// squashed by the sigmoid for logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub kind: PredictorKind,
}

impl Predictor {
    pub fn new(kind: PredictorKind, weights: Vec<f64>, intercept: f64) -> Result<Self> {
        check_finite("weights", &weights)?;
        check_finite("intercept", &[intercept])?;
        Ok(Predictor {
            weights,
            intercept,
            kind,
        })
    }

    fn linear(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: row.len(),
            });
        }
        let z = self.linear(row);
        Ok(match self.kind {
            PredictorKind::Ols => z.clamp(0.0, 1.0),
            PredictorKind::Logistic => sigmoid(z),
        })
    }

    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>> {
        if features.cols() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: features.cols(),
            });
        }
        features.iter_rows().map(|r| self.predict_row(r)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub converged: bool,
    pub iterations: usize,
    /// Mean training loss of the fitted model (squared error or log-loss,
    /// without the regularization term).
    pub final_training_loss: f64,
    /// Regularized objective before the first step and after every accepted
    /// step. Empty for closed-form fits.
    pub loss_history: Vec<f64>,
}

fn require_task(ds: &Dataset, expected: TaskKind) -> Result<()> {
    if ds.task_kind() == expected {
        Ok(())
    } else {
        Err(Error::TaskMismatch {
            expected,
            got: ds.task_kind(),
        })
    }
}

pub fn fit_ols(train: &Dataset) -> Result<(Predictor, FitReport)> {
    require_task(train, TaskKind::SquareLoss)?;
    fit_ols_matrix(train.features(), train.target(), OLS_RIDGE)
}

/// Least squares with an unpenalized intercept:
/// `(Xc^T Xc / n + ridge I) w = Xc^T yc / n` on centered data.
pub fn fit_ols_matrix(features: &Matrix, target: &[f64], ridge: f64) -> Result<(Predictor, FitReport)> {
    let n = features.rows();
    let d = features.cols();
    check_len("target vs feature rows", target.len(), n)?;
    if n == 0 {
        return Err(Error::Empty("training set"));
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "ridge",
            reason: alloc::format!("{ridge} is negative"),
        });
    }
    check_finite("features", features.as_slice())?;
    check_finite("target", target)?;

    let nf = n as f64;
    let mut col_mean = vec![0.0; d];
    for row in features.iter_rows() {
        for (m, x) in col_mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    col_mean.iter_mut().for_each(|m| *m /= nf);
    let y_mean = pairwise_sum(target) / nf;

    let mut gram = Matrix::zeros(d, d);
    let mut rhs = vec![0.0; d];
    let mut centered = vec![0.0; d];
    for (row, &y) in features.iter_rows().zip(target) {
        for j in 0..d {
            centered[j] = row[j] - col_mean[j];
        }
        let yc = y - y_mean;
        for j in 0..d {
            rhs[j] += centered[j] * yc;
            let cj = centered[j];
            let g = gram.row_mut(j);
            for k in j..d {
                g[k] += cj * centered[k];
            }
        }
    }
    for j in 0..d {
        rhs[j] /= nf;
        for k in j..d {
            let v = gram.get(j, k) / nf;
            gram.set(j, k, v);
            gram.set(k, j, v);
        }
        gram.set(j, j, gram.get(j, j) + ridge);
    }

    let weights = if d == 0 { Vec::new() } else { solve_spd(&gram, &rhs)? };
    let intercept = y_mean - col_mean.iter().zip(&weights).map(|(m, w)| m * w).sum::<f64>();
    let predictor = Predictor::new(PredictorKind::Ols, weights, intercept).map_err(|_| Error::Singular)?;

    let residuals: Vec<f64> = features
        .iter_rows()
        .zip(target)
        .map(|(r, y)| {
            let e = predictor.linear(r) - y;
            e * e
        })
        .collect();
    let report = FitReport {
        converged: true,
        iterations: 0,
        final_training_loss: pairwise_sum(&residuals) / nf,
        loss_history: Vec::new(),
    };
    Ok((predictor, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_iter: usize,
    /// Stop once the max-norm of the gradient drops below this.
    pub tol: f64,
    /// L2 penalty `ridge / 2 * |w|^2` on the standardized weights.
    pub ridge: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            max_iter: 1000,
            tol: 1e-5,
            ridge: 1e-6,
        }
    }
}

impl LogisticOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be positive".into(),
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: alloc::format!("{} is not positive", self.tol),
            });
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "ridge",
                reason: alloc::format!("{} is negative", self.ridge),
            });
        }
        Ok(())
    }
}

pub fn fit_logistic(train: &Dataset, opts: &LogisticOptions) -> Result<(Predictor, FitReport)> {
    require_task(train, TaskKind::LogisticLoss)?;
    fit_logistic_matrix(train.features(), train.target(), opts)
}

struct Standardized {
    data: Matrix,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

fn standardize(features: &Matrix) -> Standardized {
    let (n, d) = (features.rows(), features.cols());
    let nf = n as f64;
    let mut mean = vec![0.0; d];
    for row in features.iter_rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= nf);
    let mut var = vec![0.0; d];
    for row in features.iter_rows() {
        for j in 0..d {
            let c = row[j] - mean[j];
            var[j] += c * c;
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|v| {
            let s = libm::sqrt(v / nf);
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut data = features.clone();
    for i in 0..n {
        let row = data.row_mut(i);
        for j in 0..d {
            row[j] = (row[j] - mean[j]) / scale[j];
        }
    }
    Standardized { data, mean, scale }
}

struct Objective<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    ridge: f64,
}

impl Objective<'_> {
    fn margins(&self, w: &[f64], b: f64, out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.x.iter_rows()) {
            *o = b + row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>();
        }
    }

    /// Mean log-loss from margins, `softplus(z) - y z`.
    fn data_loss(&self, z: &[f64], scratch: &mut [f64]) -> f64 {
        for ((s, &zi), &yi) in scratch.iter_mut().zip(z).zip(self.y) {
            *s = softplus(zi) - yi * zi;
        }
        pairwise_sum(scratch) / z.len() as f64
    }

    fn value(&self, w: &[f64], z: &[f64], scratch: &mut [f64]) -> f64 {
        let penalty: f64 = w.iter().map(|v| v * v).sum::<f64>() * self.ridge / 2.0;
        self.data_loss(z, scratch) + penalty
    }

    fn gradient(&self, w: &[f64], z: &[f64], grad_w: &mut [f64]) -> f64 {
        let nf = z.len() as f64;
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for ((row, &zi), &yi) in self.x.iter_rows().zip(z).zip(self.y) {
            let r = sigmoid(zi) - yi;
            grad_b += r;
            for (g, x) in grad_w.iter_mut().zip(row) {
                *g += r * x;
            }
        }
        for (g, wj) in grad_w.iter_mut().zip(w) {
            *g = *g / nf + self.ridge * wj;
        }
        grad_b / nf
    }
}

/// Full-batch gradient descent with Armijo backtracking on standardized
/// features; the returned weights act on the original features.
pub fn fit_logistic_matrix(features: &Matrix, target: &[f64], opts: &LogisticOptions) -> Result<(Predictor, FitReport)> {
    opts.validate()?;
    let n = features.rows();
    let d = features.cols();
    check_len("target vs feature rows", target.len(), n)?;
    if n == 0 {
        return Err(Error::Empty("training set"));
    }
    check_finite("features", features.as_slice())?;
    crate::num::check_unit_range("target", target)?;

    let std = standardize(features);
    let obj = Objective {
        x: &std.data,
        y: target,
        ridge: opts.ridge,
    };

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut z = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut grad_w = vec![0.0; d];
    let mut trial_w = vec![0.0; d];
    let mut trial_z = vec![0.0; n];

    obj.margins(&w, b, &mut z);
    let mut loss = obj.value(&w, &z, &mut scratch);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss(0));
    }
    let mut history = vec![loss];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let grad_b = obj.gradient(&w, &z, &mut grad_w);
        let max_norm = grad_w.iter().fold(libm::fabs(grad_b), |m, g| m.max(libm::fabs(*g)));
        if max_norm < opts.tol {
            converged = true;
            break;
        }
        let sq_norm = grad_b * grad_b + grad_w.iter().map(|g| g * g).sum::<f64>();

        let mut accepted = false;
        while step > 1e-16 {
            for j in 0..d {
                trial_w[j] = w[j] - step * grad_w[j];
            }
            let trial_b = b - step * grad_b;
            obj.margins(&trial_w, trial_b, &mut trial_z);
            let trial_loss = obj.value(&trial_w, &trial_z, &mut scratch);
            if !trial_loss.is_finite() {
                return Err(Error::NonFiniteLoss(iterations + 1));
            }
            if trial_loss <= loss - 1e-4 * step * sq_norm {
                core::mem::swap(&mut w, &mut trial_w);
                core::mem::swap(&mut z, &mut trial_z);
                b = trial_b;
                loss = trial_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no descent possible at machine precision
            break;
        }
        iterations += 1;
        history.push(loss);
        step = (step * 2.0).min(1e4);
    }
    if !converged && iterations == opts.max_iter {
        let grad_b = obj.gradient(&w, &z, &mut grad_w);
        let max_norm = grad_w.iter().fold(libm::fabs(grad_b), |m, g| m.max(libm::fabs(*g)));
        converged = max_norm < opts.tol;
    }

    let final_training_loss = obj.data_loss(&z, &mut scratch).max(0.0);
    let weights: Vec<f64> = w.iter().zip(&std.scale).map(|(wj, s)| wj / s).collect();
    let intercept = b - weights.iter().zip(&std.mean).map(|(wj, m)| wj * m).sum::<f64>();
    let predictor = Predictor::new(PredictorKind::Logistic, weights, intercept)?;
    Ok((
        predictor,
        FitReport {
            converged,
            iterations,
            final_training_loss,
            loss_history: history,
        },
    ))
}
