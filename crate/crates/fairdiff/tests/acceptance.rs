//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use fairdiff::experiment::{load_experiment, run_experiment, SampleSize};
use fairdiff_core::postproc::{
    cap, diff_distribution, normalize_diffs, normalize_translate_budget_neutral, normalize_translate_nonpositive,
    translate_budget_neutral, translate_nonpositive,
};
use fairdiff_core::{
    dp_disparity, fit_logistic, fit_ols, pairwise_sum, Dataset, DiffDistribution, LogisticOptions, Matrix,
    PredictionPair, TaskKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_INSTANCES: usize = 200;
const ORACLE_MAX_N: usize = 50;
const ORACLE_LIMIT: Duration = Duration::from_secs(5);

const CONTRACT_PAIRS: usize = 1000;
const CONTRACT_MAX_N: usize = 500;
const CONTRACT_TOL: f64 = 1e-12;
const CONTRACT_LIMIT: Duration = Duration::from_secs(10);

const SHIFT_INSTANCES: usize = 200;

const HAND_TOL: f64 = 1e-12;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const COMMUNITIES_BASELINE_DP_MIN: f64 = 0.3;
const COMMUNITIES_FAIR_DP_MAX: f64 = 0.15;
const COMMUNITIES_LOSS_INCREASES_MIN: usize = 4;
const COMMUNITIES_AVG_DIFF_MAX: f64 = 0.15;
const COMMUNITIES_LIMIT: Duration = Duration::from_secs(60);

const BENCHMARK_SAMPLE: usize = 1000;
const BENCHMARK_LIMIT: Duration = Duration::from_secs(300);

const PLANTED_SLOPE_TOL: f64 = 1e-6;
const SEPARABLE_LOSS_MAX: f64 = 0.1;

const DETERMINISM_RUNS: usize = 3;

struct Verdict {
    passed: bool,
    detail: String,
    limit: Option<Duration>,
}

fn verdict(passed: bool, detail: impl Into<String>, limit: Option<Duration>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
        limit,
    }
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn random_groups(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    let mut a: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let k = rng.gen_range(0..n);
    a[k] = !a[(k + 1) % n];
    a
}

/// Evaluates both group CDFs by linear scans at every sample point, every
/// midpoint between consecutive distinct values and below the minimum.
fn brute_force_dp(p: &[f64], a: &[bool]) -> f64 {
    let mut grid: Vec<f64> = p.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mids: Vec<f64> = grid.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    let below = grid[0] - 1.0;
    grid.extend(mids);
    grid.push(below);
    let n = p.len();
    let n_true = a.iter().filter(|&&x| x).count();
    let n_false = n - n_true;
    let mut worst: f64 = 0.0;
    for &z in &grid {
        let all = p.iter().filter(|&&v| v <= z).count() as f64 / n as f64;
        let t = p.iter().zip(a).filter(|(&v, &g)| g && v <= z).count() as f64 / n_true as f64;
        let f = p.iter().zip(a).filter(|(&v, &g)| !g && v <= z).count() as f64 / n_false as f64;
        worst = worst.max((t - all).abs()).max((f - all).abs());
    }
    worst
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    for i in 0..ORACLE_INSTANCES {
        let n = rng.gen_range(2..=ORACLE_MAX_N);
        // alternate continuous draws with coarse grids that produce ties
        let p: Vec<f64> = if i % 2 == 0 {
            (0..n).map(|_| rng.gen()).collect()
        } else {
            (0..n).map(|_| f64::from(rng.gen_range(0..=10u32)) / 10.0).collect()
        };
        let a = random_groups(&mut rng, n);
        if dp_disparity(&p, &a).unwrap() != brute_force_dp(&p, &a) {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("{ORACLE_INSTANCES} instances, {mismatches} mismatches"),
        Some(ORACLE_LIMIT),
    )
}

fn random_pair(rng: &mut ChaCha8Rng) -> PredictionPair {
    let n = rng.gen_range(1..=CONTRACT_MAX_N);
    let b: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let f: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let a: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let t = b.clone();
    PredictionPair::new(b, f, a, t).unwrap()
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut failures: Vec<String> = Vec::new();
    let mut record = |ok: bool, what: &str| {
        if !ok && failures.len() < 5 {
            failures.push(what.to_string());
        }
    };
    for _ in 0..CONTRACT_PAIRS {
        let pair = random_pair(&mut rng);
        let b = pair.baseline();
        let theta = rng.gen_range(-0.2..0.2);
        let lo = rng.gen_range(-0.5..0.5);
        let hi = lo + rng.gen_range(0.01..0.5);
        let degenerate = {
            let d = diff_distribution(&pair);
            d.max_increase == d.max_decrease
        };
        let summary = |y: &[f64]| DiffDistribution::between(y, b).unwrap();
        let mean = |y: &[f64]| {
            let d: Vec<f64> = y.iter().zip(b).map(|(y, b)| y - b).collect();
            pairwise_sum(&d) / d.len() as f64
        };

        let y = cap(&pair, theta).unwrap();
        record(y.iter().zip(b).all(|(y, b)| *y <= b + theta), "cap exceeds b + theta");

        let y = translate_nonpositive(&pair);
        record(summary(&y).max_increase.abs() <= CONTRACT_TOL, "translate-nonpos max != 0");

        let y = normalize_translate_nonpositive(&pair, lo, hi).unwrap();
        let s = summary(&y);
        record(s.max_increase.abs() <= CONTRACT_TOL, "norm-nonpos max != 0");
        if !degenerate {
            record(
                ((s.max_increase - s.max_decrease) - (hi - lo)).abs() <= CONTRACT_TOL,
                "norm-nonpos width != b - a",
            );
        }

        let y = translate_budget_neutral(&pair);
        record(mean(&y).abs() <= CONTRACT_TOL, "translate-budget mean != 0");

        let y = normalize_translate_budget_neutral(&pair, lo, hi).unwrap();
        let s = summary(&y);
        record(mean(&y).abs() <= CONTRACT_TOL, "norm-budget mean != 0");
        if !degenerate {
            record(
                ((s.max_increase - s.max_decrease) - (hi - lo)).abs() <= CONTRACT_TOL,
                "norm-budget width != b - a",
            );
        }
    }
    let detail = if failures.is_empty() {
        format!("{CONTRACT_PAIRS} pairs x 5 operations, tolerance {CONTRACT_TOL:e}")
    } else {
        failures.join("; ")
    };
    verdict(failures.is_empty(), detail, Some(CONTRACT_LIMIT))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut mismatches = 0;
    for _ in 0..SHIFT_INSTANCES {
        let pair = loop {
            let p = random_pair(&mut rng);
            if p.len() >= 2 {
                break p;
            }
        };
        let a = random_groups(&mut rng, pair.len());
        let pair = PredictionPair::new(pair.baseline().to_vec(), pair.fair().to_vec(), a, pair.targets().to_vec()).unwrap();
        let base = dp_disparity(pair.fair(), pair.sensitive()).unwrap();
        for y in [translate_nonpositive(&pair), translate_budget_neutral(&pair)] {
            if dp_disparity(&y, pair.sensitive()).unwrap() != base {
                mismatches += 1;
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{SHIFT_INSTANCES} instances x 2 translations, {mismatches} mismatches"),
        None,
    )
}

fn close(got: &[f64], want: &[f64]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= HAND_TOL)
}

fn criterion_4() -> Verdict {
    let pair = |b: &[f64], f: &[f64]| {
        PredictionPair::new(b.to_vec(), f.to_vec(), vec![false; b.len()], vec![0.0; b.len()]).unwrap()
    };
    // pair whose differences are D
    let from_diffs = |d: &[f64]| pair(&vec![0.5; d.len()], &d.iter().map(|x| 0.5 + x).collect::<Vec<_>>());
    let minus = |y: &[f64], b: &[f64]| y.iter().zip(b).map(|(y, b)| y - b).collect::<Vec<_>>();

    let p = pair(&[0.2, 0.5, 0.7], &[0.4, 0.3, 0.7]);
    let d = diff_distribution(&p);
    let mut checks: Vec<(&str, bool)> = vec![
        (
            "diff_distribution",
            close(&d.diffs, &[0.2, -0.2, 0.0])
                && close(&[d.max_increase, d.max_decrease, d.mean_diff], &[0.2, -0.2, 0.0]),
        ),
        {
            let d = diff_distribution(&pair(&[0.1], &[0.9]));
            ("single element", close(&[d.max_increase, d.max_decrease, d.mean_diff], &[0.8, 0.8, 0.8]))
        },
        ("cap theta=0", close(&cap(&p, 0.0).unwrap(), &[0.2, 0.3, 0.7])),
        ("translate-nonpos", close(&translate_nonpositive(&p), &[0.2, 0.1, 0.5])),
        {
            let q = pair(&[0.5, 0.5], &[0.2, 0.4]);
            ("translate-nonpos negative diffs", close(&minus(&translate_nonpositive(&q), q.baseline()), &[-0.2, 0.0]))
        },
        {
            let d = DiffDistribution::from_diffs(vec![-0.4, 0.0, 0.1]).unwrap();
            ("normalize_diffs", close(&normalize_diffs(&d, -0.2, 0.0).unwrap(), &[-0.2, -0.04, 0.0]))
        },
        {
            let q = from_diffs(&[-0.4, 0.0, 0.1]);
            (
                "norm-nonpos a=-0.2 b=0",
                close(&minus(&normalize_translate_nonpositive(&q, -0.2, 0.0).unwrap(), q.baseline()), &[-0.2, -0.04, 0.0]),
            )
        },
        {
            let q = from_diffs(&[-0.4, 0.0, 0.1]);
            let e = minus(&normalize_translate_nonpositive(&q, -0.2, 0.1).unwrap(), q.baseline());
            let s = DiffDistribution::from_diffs(e).unwrap();
            ("norm-nonpos range [-0.3, 0]", close(&[s.max_decrease, s.max_increase], &[-0.3, 0.0]))
        },
        ("translate-budget neutral input", close(&translate_budget_neutral(&p), &[0.4, 0.3, 0.7])),
        {
            let q = pair(&[0.2, 0.5, 0.7], &[0.3, 0.6, 0.8]);
            ("translate-budget constant shift", close(&translate_budget_neutral(&q), &[0.2, 0.5, 0.7]))
        },
        ("translate-budget B=[0,0]", close(&translate_budget_neutral(&pair(&[0.0, 0.0], &[0.3, 0.1])), &[0.1, -0.1])),
        {
            let q = from_diffs(&[-0.4, 0.0, 0.1]);
            (
                "norm-budget a=-0.1 b=0.1",
                close(&minus(&normalize_translate_budget_neutral(&q, -0.1, 0.1).unwrap(), q.baseline()), &[-0.12, 0.04, 0.08]),
            )
        },
        {
            let q = pair(&[0.25, 0.5], &[0.375, 0.625]);
            ("norm-budget constant D", close(&normalize_translate_budget_neutral(&q, -0.1, 0.1).unwrap(), &[0.25, 0.5]))
        },
        {
            let q = pair(&[0.5, 0.5], &[0.4, 0.6]);
            ("norm-budget symmetric D", close(&normalize_translate_budget_neutral(&q, -0.1, 0.1).unwrap(), &[0.4, 0.6]))
        },
    ];
    {
        let q = pair(&[0.25, 0.5], &[0.375, 0.625]);
        checks.push(("norm-nonpos constant D", close(&normalize_translate_nonpositive(&q, -0.1, 0.1).unwrap(), &[0.25, 0.5])));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        format!("{} worked examples within {HAND_TOL:e}", checks.len())
    } else {
        format!("mismatched: {}", failed.join(", "))
    };
    verdict(failed.is_empty(), detail, None)
}

fn criterion_5() -> Verdict {
    let mut cfg = load_experiment(&repo_root().join("experiments/communities_ols.toml")).unwrap();
    let mut problems = Vec::new();
    let mut loss_increases = 0;
    let mut summary = Vec::new();
    for seed in SEEDS {
        cfg.seed = seed;
        let r = match run_experiment(&cfg) {
            Ok(o) => o.report,
            Err(e) => return verdict(false, format!("seed {seed}: {e}"), Some(COMMUNITIES_LIMIT)),
        };
        if r.baseline_dp < COMMUNITIES_BASELINE_DP_MIN {
            problems.push(format!("seed {seed}: baseline dp {:.3}", r.baseline_dp));
        }
        if r.fair_dp > COMMUNITIES_FAIR_DP_MAX {
            problems.push(format!("seed {seed}: fair dp {:.3}", r.fair_dp));
        }
        if r.avg_difference.abs() > COMMUNITIES_AVG_DIFF_MAX {
            problems.push(format!("seed {seed}: avg diff {:.3}", r.avg_difference));
        }
        if r.fair_loss >= r.baseline_loss {
            loss_increases += 1;
        }
        summary.push(format!("{:.3}->{:.3}", r.baseline_dp, r.fair_dp));
    }
    if loss_increases < COMMUNITIES_LOSS_INCREASES_MIN {
        problems.push(format!("fair loss >= baseline loss in only {loss_increases}/5 runs"));
    }
    let detail = if problems.is_empty() {
        format!("dp baseline->fair [{}], loss increased in {loss_increases}/5", summary.join(", "))
    } else {
        problems.join("; ")
    };
    verdict(problems.is_empty(), detail, Some(COMMUNITIES_LIMIT))
}

fn criterion_6() -> Verdict {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for config in ["law_school_ols.toml", "adult_logistic.toml"] {
        let mut cfg = load_experiment(&repo_root().join("experiments").join(config)).unwrap();
        if cfg.comparison_sample_size != SampleSize::Count(BENCHMARK_SAMPLE) {
            problems.push(format!("{config}: comparison sample is not {BENCHMARK_SAMPLE}"));
        }
        let mut improved = 0;
        for seed in SEEDS {
            cfg.seed = seed;
            match run_experiment(&cfg) {
                Ok(o) if o.report.fair_dp < o.report.baseline_dp => improved += 1,
                Ok(o) => problems.push(format!(
                    "{config} seed {seed}: fair dp {:.3} >= baseline dp {:.3}",
                    o.report.fair_dp, o.report.baseline_dp
                )),
                Err(e) => problems.push(format!("{config} seed {seed}: {e}")),
            }
        }
        summary.push(format!("{config} {improved}/5"));
    }
    let detail = if problems.is_empty() {
        format!("fair dp < baseline dp: {}", summary.join(", "))
    } else {
        problems.join("; ")
    };
    verdict(problems.is_empty(), detail, Some(BENCHMARK_LIMIT))
}

fn criterion_7() -> Verdict {
    let n = 100;
    let rows: Vec<[f64; 1]> = (0..n).map(|i| [i as f64 / (n - 1) as f64]).collect();
    let y: Vec<f64> = rows.iter().map(|r| 0.2 + 0.5 * r[0]).collect();
    let planted = Dataset::new(
        Matrix::from_rows(&rows, 1).unwrap(),
        (0..n).map(|i| i % 2 == 0).collect(),
        y,
        vec!["x".into()],
        TaskKind::SquareLoss,
    )
    .unwrap();
    let (ols, _) = fit_ols(&planted).unwrap();
    let slope_err = (ols.weights[0] - 0.5).abs();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..50 {
        let t = i as f64 / 49.0;
        rows.push([0.3 * t, 0.1 + 0.2 * t]);
        labels.push(0.0);
        rows.push([0.7 + 0.3 * t, 0.9 - 0.2 * t]);
        labels.push(1.0);
    }
    let separable = Dataset::new(
        Matrix::from_rows(&rows, 2).unwrap(),
        (0..rows.len()).map(|i| i % 3 == 0).collect(),
        labels,
        vec!["u".into(), "v".into()],
        TaskKind::LogisticLoss,
    )
    .unwrap();
    let opts = LogisticOptions::default();
    let (lr, fit) = fit_logistic(&separable, &opts).unwrap();
    let deterministic = fit_ols(&planted).unwrap().0 == ols && fit_logistic(&separable, &opts).unwrap().0 == lr;

    let passed = slope_err < PLANTED_SLOPE_TOL && fit.final_training_loss < SEPARABLE_LOSS_MAX && deterministic;
    verdict(
        passed,
        format!(
            "OLS slope error {slope_err:.1e}, separable log-loss {:.4}, deterministic {deterministic}",
            fit.final_training_loss
        ),
        None,
    )
}

fn criterion_8() -> Verdict {
    let config = repo_root().join("experiments/communities_norm_budget.toml");
    let mut outputs = Vec::new();
    for _ in 0..DETERMINISM_RUNS {
        let out = Command::new(env!("CARGO_BIN_EXE_fairdiff"))
            .args(["run", "--config"])
            .arg(&config)
            .output()
            .expect("spawn fairdiff");
        if !out.status.success() {
            return verdict(false, String::from_utf8_lossy(&out.stderr).into_owned(), None);
        }
        outputs.push(out.stdout);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        identical && !outputs[0].is_empty(),
        format!("{DETERMINISM_RUNS} runs, {} bytes each, identical {identical}", outputs[0].len()),
        None,
    )
}

fn main() {
    let criteria: [(u8, &str, fn() -> Verdict); 8] = [
        (1, "dp disparity oracle equivalence", criterion_1),
        (2, "post-processing contracts", criterion_2),
        (3, "dp shift invariance under translation", criterion_3),
        (4, "hand-computed post-processing vectors", criterion_4),
        (5, "directional reproduction, Communities & Crime", criterion_5),
        (6, "directional reproduction, Law School and Adult", criterion_6),
        (7, "learner sanity", criterion_7),
        (8, "end-to-end determinism", criterion_8),
    ];
    let mut all_passed = true;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = v.limit.map_or(true, |limit| elapsed < limit);
        let passed = v.passed && in_time;
        all_passed &= passed;
        let timing = match v.limit {
            Some(limit) => format!("{:.2}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!(
            "criterion {id} [{}] {name}: {} ({timing})",
            if passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if !all_passed {
        std::process::exit(1);
    }
}
