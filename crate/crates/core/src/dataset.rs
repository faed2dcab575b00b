//! Encoded datasets and the seeded train/test/comparison split.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::num::{check_len, check_unit_range};

/// Which standard loss a dataset's task is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    LogisticLoss,
    SquareLoss,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::LogisticLoss => "logistic_loss",
            TaskKind::SquareLoss => "square_loss",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic_loss" | "logistic" => Ok(TaskKind::LogisticLoss),
            "square_loss" | "square" => Ok(TaskKind::SquareLoss),
            other => Err(Error::InvalidParameter {
                name: "task",
                reason: alloc::format!("unknown task kind `{other}`"),
            }),
        }
    }
}

/// Feature matrix `X`, boolean sensitive attribute `A` and target `Y` in `[0, 1]`.
///
/// `row_ids` holds each row's position in the cleaned source file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    sensitive: Vec<bool>,
    target: Vec<f64>,
    feature_names: Vec<String>,
    task_kind: TaskKind,
    row_ids: Vec<usize>,
}

impl Dataset {
    /// Checks every invariant: aligned lengths, targets in `[0, 1]`, and both
    /// sensitive groups present. Row ids default to `0..n`.
    pub fn new(
        features: Matrix,
        sensitive: Vec<bool>,
        target: Vec<f64>,
        feature_names: Vec<String>,
        task_kind: TaskKind,
    ) -> Result<Self> {
        let row_ids = (0..target.len()).collect();
        let ds = Dataset::from_parts(features, sensitive, target, feature_names, task_kind, row_ids)?;
        if !ds.sensitive.iter().any(|&s| s) {
            return Err(Error::EmptyGroup(true));
        }
        if !ds.sensitive.iter().any(|&s| !s) {
            return Err(Error::EmptyGroup(false));
        }
        Ok(ds)
    }

    // Shape and range checks only; subsets produced by `split` may hold a
    // single group.
    fn from_parts(
        features: Matrix,
        sensitive: Vec<bool>,
        target: Vec<f64>,
        feature_names: Vec<String>,
        task_kind: TaskKind,
        row_ids: Vec<usize>,
    ) -> Result<Self> {
        check_len("sensitive vs feature rows", sensitive.len(), features.rows())?;
        check_len("target vs feature rows", target.len(), features.rows())?;
        check_len("row ids vs feature rows", row_ids.len(), features.rows())?;
        check_len("feature names vs columns", feature_names.len(), features.cols())?;
        check_unit_range("target", &target)?;
        Ok(Dataset {
            features,
            sensitive,
            target,
            feature_names,
            task_kind,
            row_ids,
        })
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn sensitive(&self) -> &[bool] {
        &self.sensitive
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn task_kind(&self) -> TaskKind {
        self.task_kind
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    /// Rows at `indices` (positions in this dataset), in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            sensitive: indices.iter().map(|&i| self.sensitive[i]).collect(),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            feature_names: self.feature_names.clone(),
            task_kind: self.task_kind,
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }
}

/// Parameters of the train/test split and of the comparison sample drawn
/// from the test half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub comparison_sample_size: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter {
                name: "train_fraction",
                reason: alloc::format!("{} is not in (0, 1)", self.train_fraction),
            });
        }
        if self.comparison_sample_size == 0 {
            return Err(Error::InvalidParameter {
                name: "comparison_sample_size",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }

    pub fn train_len(&self, n: usize) -> usize {
        libm::round(self.train_fraction * n as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Positions into `test`, ascending.
    pub comparison: Vec<usize>,
}

impl Split {
    pub fn comparison_set(&self) -> Dataset {
        self.test.subset(&self.comparison)
    }
}

/// Seeded random partition into train and test halves plus a comparison
/// sample drawn without replacement from the test rows.
///
/// Train and test keep the source row order; identical inputs always produce
/// identical outputs.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let n = ds.len();
    let n_train = spec.train_len(n);
    let n_test = n - n_train.min(n);
    if spec.comparison_sample_size > n_test {
        return Err(Error::SampleTooLarge {
            requested: spec.comparison_sample_size,
            available: n_test,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (train_idx, test_idx) = order.split_at_mut(n_train);
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let mut comparison =
        rand::seq::index::sample(&mut rng, n_test, spec.comparison_sample_size).into_vec();
    comparison.sort_unstable();

    Ok(Split {
        train: ds.subset(train_idx),
        test: ds.subset(test_idx),
        comparison,
    })
}
