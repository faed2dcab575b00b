//! End-to-end experiment: load, split, fit the baseline, obtain fair
//! predictions, compare both on the comparison sample and optionally apply
//! one post-processing step.
//!
//! Experiments are described by TOML files. Relative paths are resolved
//! against the directory of the file itself.
//!
//! ```toml
//! dataset = "../data/communities.csv"
//! schema = "../data/communities.schema.toml"
//! seed = 1
//! train_fraction = 0.5
//! comparison_sample_size = "all"   # or a row count
//! baseline = "ols"                 # or "logistic"
//! epsilon = 0.05
//! # fair_predictions = "fair.csv"  # use external predictions instead of repair
//! bins = 50
//!
//! [logistic]
//! max_iter = 1000
//! tol = 1e-5
//!
//! [postprocess]
//! name = "norm-budget"
//! a = -0.1
//! b = 0.1
//! clamp = false
//! ```

use std::path::{Path, PathBuf};

use fairdiff_core::histogram::DEFAULT_BINS;
use fairdiff_core::postproc::clamp_unit;
use fairdiff_core::{
    fit_logistic, fit_ols, fit_repair, histogram, split, Dataset, DiffDistribution, DiffSummary, ExperimentReport,
    FitReport, Histogram, LogisticOptions, MetricsRow, Postprocess, Predictor, PredictorKind, PredictionPair,
    SplitSpec,
};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::files::{load_dataset, predictions_for, read_predictions, PairTable};
use crate::schema::load_schema;

/// Label of the built-in fair predictor in reports.
pub const REPAIR_LEARNER: &str = "quantile-repair";
/// Label of fair predictions read from a file.
pub const EXTERNAL_LEARNER: &str = "external";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSize {
    /// Every test row.
    All,
    Count(usize),
}

impl SampleSize {
    pub fn resolve(self, test_rows: usize) -> usize {
        match self {
            SampleSize::All => test_rows,
            SampleSize::Count(n) => n,
        }
    }
}

impl std::str::FromStr for SampleSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "all" {
            return Ok(SampleSize::All);
        }
        s.parse()
            .map(SampleSize::Count)
            .map_err(|_| format!("`{s}` is neither a row count nor `all`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostprocessConfig {
    pub step: Postprocess,
    pub clamp: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FairSource {
    Repair,
    External(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub schema: PathBuf,
    pub seed: u64,
    pub train_fraction: f64,
    pub comparison_sample_size: SampleSize,
    pub baseline: PredictorKind,
    pub epsilon: f64,
    pub fair: FairSource,
    pub logistic: LogisticOptions,
    pub postprocess: Option<PostprocessConfig>,
    pub bins: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSampleSize {
    Count(usize),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLogistic {
    max_iter: Option<usize>,
    tol: Option<f64>,
    ridge: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPostprocess {
    name: String,
    theta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    #[serde(default)]
    clamp: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dataset: PathBuf,
    schema: PathBuf,
    seed: u64,
    train_fraction: f64,
    comparison_sample_size: RawSampleSize,
    baseline: String,
    epsilon: f64,
    fair_predictions: Option<PathBuf>,
    bins: Option<usize>,
    logistic: Option<RawLogistic>,
    postprocess: Option<RawPostprocess>,
}

pub fn parse_experiment(text: &str, path: &Path) -> Result<ExperimentConfig> {
    let config_err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new(""));

    let comparison_sample_size = match raw.comparison_sample_size {
        RawSampleSize::Count(n) => SampleSize::Count(n),
        RawSampleSize::Word(w) => w.parse().map_err(config_err)?,
    };
    let baseline: PredictorKind = raw
        .baseline
        .parse()
        .map_err(|_| config_err(format!("unknown baseline `{}` (expected ols or logistic)", raw.baseline)))?;
    let defaults = LogisticOptions::default();
    let logistic = match raw.logistic {
        Some(l) => LogisticOptions {
            max_iter: l.max_iter.unwrap_or(defaults.max_iter),
            tol: l.tol.unwrap_or(defaults.tol),
            ridge: l.ridge.unwrap_or(defaults.ridge),
        },
        None => defaults,
    };
    let postprocess = match raw.postprocess {
        Some(p) => Some(PostprocessConfig {
            step: Postprocess::from_name(&p.name, p.theta, p.a, p.b)?,
            clamp: p.clamp,
        }),
        None => None,
    };
    Ok(ExperimentConfig {
        dataset: base.join(raw.dataset),
        schema: base.join(raw.schema),
        seed: raw.seed,
        train_fraction: raw.train_fraction,
        comparison_sample_size,
        baseline,
        epsilon: raw.epsilon,
        fair: match raw.fair_predictions {
            Some(p) => FairSource::External(base.join(p)),
            None => FairSource::Repair,
        },
        logistic,
        postprocess,
        bins: raw.bins.unwrap_or(DEFAULT_BINS),
    })
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_experiment(&text, path)
}

/// Everything an experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    /// Baseline, fair and post-processed outputs on the comparison sample.
    pub pairs: PairTable,
    /// Histogram of `F - B`.
    pub fair_histogram: Histogram,
    /// Histogram of `Y - B` when a post-processing step ran.
    pub postproc_histogram: Option<Histogram>,
    pub baseline_fit: FitReport,
    /// Interpolation weight chosen by the repair, if it ran.
    pub lambda: Option<f64>,
}

pub fn fit_baseline(train: &Dataset, kind: PredictorKind, opts: &LogisticOptions) -> Result<(Predictor, FitReport)> {
    Ok(match kind {
        PredictorKind::Ols => fit_ols(train)?,
        PredictorKind::Logistic => fit_logistic(train, opts)?,
    })
}

/// Splits `ds` with the experiment's seed, fraction and sample size.
pub fn split_dataset(ds: &Dataset, cfg: &ExperimentConfig) -> Result<fairdiff_core::Split> {
    let probe = SplitSpec {
        train_fraction: cfg.train_fraction,
        comparison_sample_size: 1,
        seed: cfg.seed,
    };
    probe.validate()?;
    let test_rows = ds.len() - probe.train_len(ds.len()).min(ds.len());
    let spec = SplitSpec {
        comparison_sample_size: cfg.comparison_sample_size.resolve(test_rows),
        ..probe
    };
    Ok(split(ds, &spec)?)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if !(0.0..=1.0).contains(&cfg.epsilon) {
        return Err(fairdiff_core::Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{} is not in [0, 1]", cfg.epsilon),
        }
        .into());
    }
    let schema = load_schema(&cfg.schema)?;
    let ds = load_dataset(&cfg.dataset, &schema)?;
    let parts = split_dataset(&ds, cfg)?;
    let sample = parts.comparison_set();
    let kind = ds.task_kind();

    let (predictor, baseline_fit) = fit_baseline(&parts.train, cfg.baseline, &cfg.logistic)?;
    let baseline = predictor.predict(sample.features())?;

    let (fair, fair_learner, lambda) = match &cfg.fair {
        FairSource::Repair => {
            let train_preds = predictor.predict(parts.train.features())?;
            let model = fit_repair(&train_preds, parts.train.sensitive(), cfg.epsilon)?;
            let fair = model.apply(&baseline, sample.sensitive())?;
            (fair, REPAIR_LEARNER, Some(model.lambda()))
        }
        FairSource::External(path) => {
            let map = read_predictions(path)?;
            (predictions_for(path, &map, &sample)?, EXTERNAL_LEARNER, None)
        }
    };

    let pair = PredictionPair::new(
        baseline,
        fair,
        sample.sensitive().to_vec(),
        sample.target().to_vec(),
    )?;
    let base_metrics = MetricsRow::evaluate(pair.baseline(), pair.targets(), pair.sensitive(), kind)?;
    let fair_metrics = MetricsRow::evaluate(pair.fair(), pair.targets(), pair.sensitive(), kind)?;
    let fair_diff = DiffDistribution::from_diffs(pair.diffs())?;
    let fair_histogram = histogram(&fair_diff.diffs, cfg.bins)?;

    let mut report = ExperimentReport {
        baseline_learner: cfg.baseline.as_str().to_string(),
        baseline_loss: base_metrics.loss_std,
        baseline_dp: base_metrics.dp_disp,
        epsilon: cfg.epsilon,
        fair_learner: fair_learner.to_string(),
        fair_loss: fair_metrics.loss_std,
        fair_dp: fair_metrics.dp_disp,
        max_increase: fair_diff.max_increase,
        max_decrease: fair_diff.max_decrease,
        avg_difference: fair_diff.mean_diff,
        postproc_name: None,
        postproc_loss: None,
        postproc_dp: None,
        postproc_diff: None,
    };

    let mut postprocessed = None;
    let mut postproc_histogram = None;
    if let Some(pp) = &cfg.postprocess {
        let mut y = pp.step.apply(&pair)?;
        if pp.clamp {
            clamp_unit(&mut y);
        }
        let m = MetricsRow::evaluate(&y, pair.targets(), pair.sensitive(), kind)?;
        let d = DiffDistribution::between(&y, pair.baseline())?;
        postproc_histogram = Some(histogram(&d.diffs, cfg.bins)?);
        report.postproc_name = Some(pp.step.label());
        report.postproc_loss = Some(m.loss_std);
        report.postproc_dp = Some(m.dp_disp);
        report.postproc_diff = Some(DiffSummary::from(&d));
        postprocessed = Some(y);
    }
    report.validate()?;

    Ok(ExperimentOutcome {
        report,
        pairs: PairTable {
            row_ids: sample.row_ids().to_vec(),
            pair,
            postprocessed,
        },
        fair_histogram,
        postproc_histogram,
        baseline_fit,
        lambda,
    })
}
