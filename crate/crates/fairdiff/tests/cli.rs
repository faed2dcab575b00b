use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairdiff::files::read_pairs;
use fairdiff::render::CSV_HEADER;

fn fairdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairdiff"))
        .args(args)
        .output()
        .expect("spawn fairdiff")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// 400 rows where the outcome depends on one feature and the groups differ
/// in that feature.
fn write_dataset(dir: &Path) -> (PathBuf, PathBuf) {
    let data = dir.join("toy.csv");
    let mut text = String::from("x,noise,colour,group,y\n");
    for i in 0..400 {
        let g = if i % 3 == 0 { "a" } else { "b" };
        let x = (i % 97) as f64 / 97.0 + if g == "a" { 0.4 } else { 0.0 };
        let colour = ["red", "green", "blue"][i % 3];
        let y = 0.3 * x + 0.05 * ((i * 7 % 11) as f64 / 11.0);
        text.push_str(&format!("{x},{},{colour},{g},{y}\n", (i * 13 % 17) as f64));
    }
    std::fs::write(&data, text).unwrap();
    let schema = dir.join("toy.toml");
    std::fs::write(
        &schema,
        "sensitive = \"group\"\nsensitive_equals = \"a\"\ntarget = \"y\"\ntask = \"square_loss\"\n[columns]\ncolour = \"categorical\"\n",
    )
    .unwrap();
    (data, schema)
}

#[test]
fn train_repair_compare_postprocess_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (data, schema) = write_dataset(d);
    let (model, base, fair, repair, pairs, post, svg) = (
        d.join("m.toml"),
        d.join("b.csv"),
        d.join("f.csv"),
        d.join("r.toml"),
        d.join("pairs.csv"),
        d.join("post.csv"),
        d.join("h.svg"),
    );

    let out = fairdiff(&[
        "train", "--data", s(&data), "--schema", s(&schema), "--learner", "ols", "--seed", "7",
        "--model", s(&model), "--predictions", s(&base),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&model).unwrap().contains("colour=red"));

    let out = fairdiff(&[
        "repair", "--data", s(&data), "--schema", s(&schema), "--seed", "7", "--baseline", s(&base),
        "--epsilon", "0.05", "--model", s(&repair), "--predictions", s(&fair),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // a saved repair model reproduces the fitted one
    let again = d.join("f2.csv");
    let out = fairdiff(&[
        "repair", "--data", s(&data), "--schema", s(&schema), "--baseline", s(&base), "--load", s(&repair),
        "--predictions", s(&again),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&fair).unwrap(), std::fs::read(&again).unwrap());

    let out = fairdiff(&[
        "compare", "--data", s(&data), "--schema", s(&schema), "--seed", "7", "--baseline", s(&base),
        "--fair", s(&fair), "--sample", "all", "--epsilon", "0.05", "--baseline-learner", "ols",
        "--fair-learner", "quantile-repair", "--pairs", s(&pairs),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 13);
    let (base_dp, fair_dp): (f64, f64) = (row[2].parse().unwrap(), row[6].parse().unwrap());
    assert!(fair_dp < base_dp, "{csv}");
    assert_eq!(&row[10..], ["", "", ""]);

    let out = fairdiff(&["postprocess", "norm-nonpos", "--a", "-0.1", "--b", "0.05", "--pairs", s(&pairs), "--out", s(&post)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_pairs(&post).unwrap();
    let y = table.postprocessed.unwrap();
    let diffs: Vec<f64> = y.iter().zip(table.pair.baseline()).map(|(y, b)| y - b).collect();
    assert!(diffs.iter().all(|&d| d <= 0.0));
    let lo = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((lo + 0.15).abs() < 1e-12);

    let out = fairdiff(&["report", "--input", s(&post), "--format", "svg", "--column", "postprocessed", "--out", s(&svg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(text.matches("<rect").count() >= 1);
}

#[test]
fn report_renders_saved_csv_as_text() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("r.csv");
    std::fs::write(
        &input,
        format!(
            "{}\nols,0.02,0.6,0.05,quantile-repair,0.04,0.1,0.3,-0.3,0.001,cap[theta=0],0.03,0.12\nols,0.02,0.5,0.05,external,0.05,0.2,0.2,-0.2,0,,,\n",
            CSV_HEADER.join(",")
        ),
    )
    .unwrap();
    let out = fairdiff(&["report", "--input", s(&input), "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.600↑") && text.contains("0.500↓"));
    let out = fairdiff(&["report", "--input", s(&input), "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains(",cap[theta=0],0.030,0.120"));
}

#[test]
fn run_writes_pairs_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_dataset(d);
    let config = d.join("exp.toml");
    std::fs::write(
        &config,
        "dataset = \"toy.csv\"\nschema = \"toy.toml\"\nseed = 3\ntrain_fraction = 0.5\ncomparison_sample_size = 150\nbaseline = \"ols\"\nepsilon = 0.05\n[postprocess]\nname = \"translate-budget\"\n",
    )
    .unwrap();
    let (pairs, svg) = (d.join("p.csv"), d.join("h.svg"));
    let out = fairdiff(&["run", "--config", s(&config), "--pairs", s(&pairs), "--svg", s(&svg), "--full-precision"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_pairs(&pairs).unwrap();
    assert_eq!(table.pair.len(), 150);
    let y = table.postprocessed.unwrap();
    let mean = y.iter().zip(table.pair.baseline()).map(|(y, b)| y - b).sum::<f64>() / 150.0;
    assert!(mean.abs() < 1e-12);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("Y - B"));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",translate-budget,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (data, schema) = write_dataset(d);
    let pairs = d.join("pairs.csv");
    std::fs::write(&pairs, "row_id,baseline,fair,postprocessed,sensitive,target\n0,0.2,0.4,,1,0\n1,0.5,0.3,,0,1\n").unwrap();

    // validation: missing parameter, inverted range, unknown flag
    let out = fairdiff(&["postprocess", "cap", "--pairs", s(&pairs), "--out", s(&d.join("o.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = fairdiff(&["postprocess", "norm-budget", "--a", "0.2", "--b", "-0.2", "--pairs", s(&pairs), "--out", s(&d.join("o.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fairdiff(&["run", "--bogus"]).status.code(), Some(1));
    let out = fairdiff(&[
        "train", "--data", s(&data), "--schema", s(&schema), "--learner", "ols", "--train-fraction", "1.5",
        "--model", s(&d.join("m.toml")), "--predictions", s(&d.join("p.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // runtime and data errors
    let out = fairdiff(&[
        "train", "--data", s(&d.join("absent.csv")), "--schema", s(&schema), "--learner", "ols",
        "--model", s(&d.join("m.toml")), "--predictions", s(&d.join("p.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&pairs, "row_id,baseline,fair,postprocessed,sensitive,target\n0,0.2,nan?,,1,0\n").unwrap();
    let out = fairdiff(&["postprocess", "translate-nonpos", "--pairs", s(&pairs), "--out", s(&d.join("o.csv"))]);
    assert_eq!(out.status.code(), Some(2));

    let out = fairdiff(&["postprocess", "cap", "--theta", "-0.1", "--pairs", s(&pairs), "--out", s(&d.join("o.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fairdiff(&["--help"]).status.code(), Some(0));
}
