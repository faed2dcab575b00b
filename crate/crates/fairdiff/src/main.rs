use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairdiff::error::{CliError, Result};
use fairdiff::experiment::{
    fit_baseline, load_experiment, run_experiment, split_dataset, ExperimentConfig, FairSource, SampleSize,
    EXTERNAL_LEARNER,
};
use fairdiff::files::{load_dataset, predictions_for, read_pairs, read_predictions, write_pairs, write_predictions, PairTable};
use fairdiff::model_io::{load_repair, save_predictor, save_repair, SavedPredictor};
use fairdiff::render::{format_value, parse_report_csv, render_csv, render_svg, render_text};
use fairdiff::schema::load_schema;
use fairdiff_core::histogram::DEFAULT_BINS;
use fairdiff_core::postproc::clamp_unit;
use fairdiff_core::{
    dp_disparity, fit_repair, histogram, Dataset, DiffDistribution, DiffSummary, ExperimentReport, LogisticOptions,
    MetricsRow, Postprocess, PredictionPair, PredictorKind,
};

/// Compare fair and baseline predictions and post-process the differences.
#[derive(Parser)]
#[command(name = "fairdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a baseline learner on the training half and predict every row.
    Train(TrainArgs),
    /// Fit (or load) a quantile repair and apply it to baseline predictions.
    Repair(RepairArgs),
    /// Report baseline and fair metrics on the comparison sample.
    Compare(CompareArgs),
    /// Apply one post-processing step to a pair file.
    Postprocess(PostprocessArgs),
    /// Render report rows as CSV or text, or a pair file as an SVG histogram.
    Report(ReportArgs),
    /// Run a whole experiment from a config file.
    Run(RunArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Source CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Schema TOML file.
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    train_fraction: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Learner {
    Ols,
    Logistic,
}

impl From<Learner> for PredictorKind {
    fn from(l: Learner) -> Self {
        match l {
            Learner::Ols => PredictorKind::Ols,
            Learner::Logistic => PredictorKind::Logistic,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, value_enum)]
    learner: Learner,
    #[arg(long, default_value_t = LogisticOptions::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = LogisticOptions::default().tol)]
    tol: f64,
    /// Where to write the fitted model (TOML).
    #[arg(long)]
    model: PathBuf,
    /// Where to write `row_id,prediction` for every row.
    #[arg(long)]
    predictions: PathBuf,
}

#[derive(Args)]
struct RepairArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// Baseline prediction file covering every row.
    #[arg(long)]
    baseline: PathBuf,
    /// Training disparity target used to pick the interpolation weight.
    #[arg(long, required_unless_present = "load")]
    epsilon: Option<f64>,
    /// Apply a previously saved repair model instead of fitting one.
    #[arg(long, conflicts_with = "epsilon")]
    load: Option<PathBuf>,
    /// Where to save the fitted repair model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Where to write the repaired `row_id,prediction` file.
    #[arg(long)]
    predictions: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Print floats in shortest round-trip form instead of 3 decimals.
    #[arg(long)]
    full_precision: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long)]
    fair: PathBuf,
    /// Comparison sample size, or `all` for every test row.
    #[arg(long, default_value = "1000")]
    sample: SampleSize,
    /// Slack or target of the fair learner, reported as is.
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "baseline")]
    baseline_learner: String,
    #[arg(long, default_value = EXTERNAL_LEARNER)]
    fair_learner: String,
    /// Also write the comparison sample as a pair file.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Step {
    Cap,
    TranslateNonpos,
    NormNonpos,
    TranslateBudget,
    NormBudget,
}

impl Step {
    fn name(self) -> &'static str {
        match self {
            Step::Cap => "cap",
            Step::TranslateNonpos => "translate-nonpos",
            Step::NormNonpos => "norm-nonpos",
            Step::TranslateBudget => "translate-budget",
            Step::NormBudget => "norm-budget",
        }
    }
}

#[derive(Args)]
struct PostprocessArgs {
    #[arg(value_enum)]
    step: Step,
    /// Largest allowed increase for `cap`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Lower end of the normalized difference range.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Upper end of the normalized difference range.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Clamp the outputs into [0, 1] afterwards.
    #[arg(long)]
    clamp: bool,
    /// Input pair file.
    #[arg(long)]
    pairs: PathBuf,
    /// Output pair file with the `postprocessed` column filled.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Text,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Column {
    Fair,
    Postprocessed,
}

#[derive(Args)]
struct ReportArgs {
    /// A report CSV for `csv` and `text`, a pair file for `svg`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    full_precision: bool,
    /// Which outputs to compare against the baseline in the histogram.
    #[arg(long, value_enum, default_value = "fair")]
    column: Column,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Override the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the comparison sample as a pair file.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Write the histogram of differences as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(reports: &[ExperimentReport], output: &OutputArgs) -> Result<()> {
    let text = match output.format {
        TableFormat::Csv => render_csv(reports, output.full_precision),
        TableFormat::Text => render_text(reports, output.full_precision),
    };
    emit(output.out.as_deref(), &text)
}

fn load(args: &DataArgs) -> Result<Dataset> {
    load_dataset(&args.data, &load_schema(&args.schema)?)
}

fn experiment_for(args: &SplitArgs, sample: SampleSize) -> ExperimentConfig {
    ExperimentConfig {
        dataset: PathBuf::new(),
        schema: PathBuf::new(),
        seed: args.seed,
        train_fraction: args.train_fraction,
        comparison_sample_size: sample,
        baseline: PredictorKind::Ols,
        epsilon: 0.0,
        fair: FairSource::Repair,
        logistic: LogisticOptions::default(),
        postprocess: None,
        bins: DEFAULT_BINS,
    }
}

fn train(args: TrainArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let parts = split_dataset(&ds, &experiment_for(&args.split, SampleSize::Count(1)))?;
    let opts = LogisticOptions {
        max_iter: args.max_iter,
        tol: args.tol,
        ..LogisticOptions::default()
    };
    let (predictor, fit) = fit_baseline(&parts.train, args.learner.into(), &opts)?;
    let predictions = predictor.predict(ds.features())?;
    save_predictor(
        &args.model,
        &SavedPredictor {
            predictor: predictor.clone(),
            features: ds.feature_names().to_vec(),
        },
    )?;
    write_predictions(&args.predictions, ds.row_ids(), &predictions)?;
    println!(
        "{} on {} training rows: loss {}, iterations {}, converged {}",
        predictor.kind,
        parts.train.len(),
        format_value(fit.final_training_loss, false),
        fit.iterations,
        fit.converged
    );
    Ok(())
}

fn repair(args: RepairArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let map = read_predictions(&args.baseline)?;
    let all = predictions_for(&args.baseline, &map, &ds)?;
    let model = match (&args.load, args.epsilon) {
        (Some(path), _) => load_repair(path)?,
        (None, Some(eps)) => {
            let parts = split_dataset(&ds, &experiment_for(&args.split, SampleSize::Count(1)))?;
            let train = predictions_for(&args.baseline, &map, &parts.train)?;
            fit_repair(&train, parts.train.sensitive(), eps)?
        }
        (None, None) => return Err(CliError::Usage("either --epsilon or --load is required".into())),
    };
    let repaired = model.apply(&all, ds.sensitive())?;
    if let Some(path) = &args.model {
        save_repair(path, &model)?;
    }
    write_predictions(&args.predictions, ds.row_ids(), &repaired)?;
    println!(
        "lambda {} (target {})",
        model.lambda(),
        format_value(model.epsilon_target(), false)
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let parts = split_dataset(&ds, &experiment_for(&args.split, args.sample))?;
    let sample = parts.comparison_set();
    let b = predictions_for(&args.baseline, &read_predictions(&args.baseline)?, &sample)?;
    let f = predictions_for(&args.fair, &read_predictions(&args.fair)?, &sample)?;
    let pair = PredictionPair::new(b, f, sample.sensitive().to_vec(), sample.target().to_vec())?;
    let kind = ds.task_kind();
    let bm = MetricsRow::evaluate(pair.baseline(), pair.targets(), pair.sensitive(), kind)?;
    let fm = MetricsRow::evaluate(pair.fair(), pair.targets(), pair.sensitive(), kind)?;
    let d = DiffDistribution::from_diffs(pair.diffs())?;
    let report = ExperimentReport {
        baseline_learner: args.baseline_learner,
        baseline_loss: bm.loss_std,
        baseline_dp: bm.dp_disp,
        epsilon: args.epsilon,
        fair_learner: args.fair_learner,
        fair_loss: fm.loss_std,
        fair_dp: fm.dp_disp,
        max_increase: d.max_increase,
        max_decrease: d.max_decrease,
        avg_difference: d.mean_diff,
        postproc_name: None,
        postproc_loss: None,
        postproc_dp: None,
        postproc_diff: None,
    };
    report.validate()?;
    if let Some(path) = &args.pairs {
        write_pairs(
            path,
            &PairTable {
                row_ids: sample.row_ids().to_vec(),
                pair,
                postprocessed: None,
            },
        )?;
    }
    render(&[report], &args.output)
}

fn postprocess(args: PostprocessArgs) -> Result<()> {
    let step = Postprocess::from_name(args.step.name(), args.theta, args.a, args.b)?;
    let mut table = read_pairs(&args.pairs)?;
    let mut y = step.apply(&table.pair)?;
    if args.clamp {
        clamp_unit(&mut y);
    }
    let d = DiffSummary::from(&DiffDistribution::between(&y, table.pair.baseline())?);
    let dp = dp_disparity(&y, table.pair.sensitive())?;
    table.postprocessed = Some(y);
    write_pairs(&args.out, &table)?;
    println!(
        "{}: dp {}  max_increase {}  max_decrease {}  avg_difference {}",
        step.label(),
        format_value(dp, false),
        format_value(d.max_increase, false),
        format_value(d.max_decrease, false),
        format_value(d.avg_difference, false),
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let text = match args.format {
        ReportFormat::Svg => {
            let table = read_pairs(&args.input)?;
            let (outputs, title) = match args.column {
                Column::Fair => (table.pair.fair().to_vec(), "F - B"),
                Column::Postprocessed => (
                    table.postprocessed.ok_or_else(|| {
                        CliError::Usage(format!("{} has no postprocessed column", args.input.display()))
                    })?,
                    "Y - B",
                ),
            };
            let d = DiffDistribution::between(&outputs, table.pair.baseline())?;
            render_svg(&histogram(&d.diffs, args.bins)?, title)
        }
        format => {
            let text = std::fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
            let reports = parse_report_csv(&text, &args.input)?;
            match format {
                ReportFormat::Csv => render_csv(&reports, args.full_precision),
                _ => render_text(&reports, args.full_precision),
            }
        }
    };
    emit(args.out.as_deref(), &text)
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load_experiment(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let outcome = run_experiment(&cfg)?;
    if let Some(path) = &args.pairs {
        write_pairs(path, &outcome.pairs)?;
    }
    if let Some(path) = &args.svg {
        let (hist, title) = match &outcome.postproc_histogram {
            Some(h) => (h, "Y - B"),
            None => (&outcome.fair_histogram, "F - B"),
        };
        let svg = render_svg(hist, title);
        std::fs::write(path, svg).map_err(|e| CliError::io(path, e))?;
    }
    render(&[outcome.report], &args.output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Repair(a) => repair(a),
        Command::Compare(a) => compare(a),
        Command::Postprocess(a) => postprocess(a),
        Command::Report(a) => report(a),
        Command::Run(a) => run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
