//! Report rendering: CSV rows, an aligned text table and an SVG histogram.

use std::fmt::Write as _;
use std::path::Path;

use fairdiff_core::{ExperimentReport, Histogram};

use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 13] = [
    "baseline_learner",
    "baseline_loss",
    "baseline_dp",
    "epsilon",
    "fair_learner",
    "fair_loss",
    "fair_dp",
    "max_increase",
    "max_decrease",
    "avg_difference",
    "postproc_name",
    "postproc_loss",
    "postproc_dp",
];

/// Three decimals by default, shortest round-trip form when `full`.
pub fn format_value(v: f64, full: bool) -> String {
    if full {
        return v.to_string();
    }
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn cells(r: &ExperimentReport, full: bool) -> [String; 13] {
    let f = |v: f64| format_value(v, full);
    let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
    [
        r.baseline_learner.clone(),
        f(r.baseline_loss),
        f(r.baseline_dp),
        f(r.epsilon),
        r.fair_learner.clone(),
        f(r.fair_loss),
        f(r.fair_dp),
        f(r.max_increase),
        f(r.max_decrease),
        f(r.avg_difference),
        r.postproc_name.clone().unwrap_or_default(),
        opt(r.postproc_loss),
        opt(r.postproc_dp),
    ]
}

pub fn render_csv(reports: &[ExperimentReport], full: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to memory cannot fail
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(cells(r, full)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Reads report rows written by [`render_csv`].
pub fn parse_report_csv(text: &str, path: &Path) -> Result<Vec<ExperimentReport>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CliError::csv(path, e))?;
    if !header.iter().eq(CSV_HEADER.iter().copied()) {
        return Err(CliError::format(path, "not a report CSV: unexpected header"));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            record[k]
                .parse()
                .map_err(|_| CliError::format(path, format!("line {line}: bad `{}` value", CSV_HEADER[k])))
        };
        let opt_num = |k: usize| -> Result<Option<f64>> {
            if record[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        let report = ExperimentReport {
            baseline_learner: record[0].to_string(),
            baseline_loss: num(1)?,
            baseline_dp: num(2)?,
            epsilon: num(3)?,
            fair_learner: record[4].to_string(),
            fair_loss: num(5)?,
            fair_dp: num(6)?,
            max_increase: num(7)?,
            max_decrease: num(8)?,
            avg_difference: num(9)?,
            postproc_name: Some(record[10].to_string()).filter(|s| !s.is_empty()),
            postproc_loss: opt_num(11)?,
            postproc_dp: opt_num(12)?,
            postproc_diff: None,
        };
        out.push(report);
    }
    Ok(out)
}

/// Aligned table. With two or more rows, the largest value of each numeric
/// column is marked `↑` and the smallest `↓`.
pub fn render_text(reports: &[ExperimentReport], full: bool) -> String {
    let numeric = [1, 2, 3, 5, 6, 7, 8, 9, 11, 12];
    let raw: Vec<[Option<f64>; 13]> = reports
        .iter()
        .map(|r| {
            [
                None,
                Some(r.baseline_loss),
                Some(r.baseline_dp),
                Some(r.epsilon),
                None,
                Some(r.fair_loss),
                Some(r.fair_dp),
                Some(r.max_increase),
                Some(r.max_decrease),
                Some(r.avg_difference),
                None,
                r.postproc_loss,
                r.postproc_dp,
            ]
        })
        .collect();
    let mut table: Vec<Vec<String>> = reports.iter().map(|r| cells(r, full).to_vec()).collect();
    if reports.len() > 1 {
        for &c in &numeric {
            let values: Vec<f64> = raw.iter().filter_map(|row| row[c]).collect();
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if !(hi > lo) {
                continue;
            }
            for (row, cellrow) in raw.iter().zip(table.iter_mut()) {
                match row[c] {
                    Some(v) if v == hi => cellrow[c].push('↑'),
                    Some(v) if v == lo => cellrow[c].push('↓'),
                    _ => {}
                }
            }
        }
    }

    let width = |c: usize| {
        table
            .iter()
            .map(|row| row[c].chars().count())
            .chain([CSV_HEADER[c].len()])
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..13).map(width).collect();
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        let padded: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, &CSV_HEADER.map(String::from));
    for row in &table {
        line(&mut out, row);
    }
    for (i, r) in reports.iter().enumerate() {
        if let Some(d) = r.postproc_diff {
            let _ = writeln!(
                out,
                "row {}: post-processed Y-B  max_increase {}  max_decrease {}  avg_difference {}",
                i + 1,
                format_value(d.max_increase, full),
                format_value(d.max_decrease, full),
                format_value(d.avg_difference, full),
            );
        }
    }
    out
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Bar chart of a histogram of differences, one `rect` per non-empty bin.
pub fn render_svg(hist: &Histogram, title: &str) -> String {
    let lo = hist.bin_edges[0];
    let hi = hist.bin_edges[hist.bin_edges.len() - 1];
    let peak = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = SVG_WIDTH - 2.0 * MARGIN;
    let plot_h = SVG_HEIGHT - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + (v - lo) / (hi - lo) * plot_w;
    let base = SVG_HEIGHT - MARGIN;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        SVG_WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
    for (i, &count) in hist.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let (x0, x1) = (x(hist.bin_edges[i]), x(hist.bin_edges[i + 1]));
        let h = count as f64 / peak * plot_h;
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="steelblue"><title>{count}</title></rect>"#,
            base - h,
            (x1 - x0).max(0.5),
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        SVG_WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{base}" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" text-anchor="middle" font-size="11">{lo:.3}</text>"#,
        base + 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{hi:.3}</text>"#,
        SVG_WIDTH - MARGIN,
        base + 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{MARGIN}" text-anchor="end" font-size="11">{}</text>"#,
        MARGIN - 5.0,
        peak as u64
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">δ</text>"#,
        SVG_WIDTH / 2.0,
        SVG_HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 15 {})">count</text>"#,
        SVG_HEIGHT / 2.0,
        SVG_HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    s
}
