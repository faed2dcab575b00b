//! CSV readers and writers for source tables, prediction files and
//! prediction-pair files.
//!
//! Prediction files hold `row_id,prediction`. Pair files hold
//! `row_id,baseline,fair,postprocessed,sensitive,target`, where
//! `postprocessed` may be empty and `sensitive` is `0` or `1`. Row ids refer
//! to rows of the cleaned dataset (after rows with missing values are
//! dropped), counted from zero. Floats are written in their shortest
//! round-trip form.

use std::collections::HashMap;
use std::path::Path;

use fairdiff_core::encode::{encode, RawTable, Schema};
use fairdiff_core::{Dataset, PredictionPair};

use crate::error::{CliError, Result};

pub const PAIR_HEADER: [&str; 6] = ["row_id", "baseline", "fair", "postprocessed", "sensitive", "target"];
pub const PREDICTION_HEADER: [&str; 2] = ["row_id", "prediction"];

pub fn read_table(path: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        rows.push(record.iter().map(String::from).collect());
    }
    Ok(RawTable { header, rows })
}

pub fn load_dataset(data: &Path, schema: &Schema) -> Result<Dataset> {
    Ok(encode(&read_table(data)?, schema)?)
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))
}

fn write_record<W: std::io::Write>(w: &mut csv::Writer<W>, path: &Path, fields: &[String]) -> Result<()> {
    w.write_record(fields).map_err(|e| CliError::csv(path, e))
}

fn finish<W: std::io::Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, column: &str, cell: &str) -> Result<T> {
    cell.trim()
        .parse()
        .map_err(|_| CliError::format(path, format!("line {line}: bad `{column}` value `{cell}`")))
}

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().map(str::trim).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(CliError::format(
            path,
            format!("expected header `{}`", expected.join(",")),
        ))
    }
}

/// Writes `row_id,prediction` lines.
pub fn write_predictions(path: &Path, row_ids: &[usize], predictions: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    write_record(&mut w, path, &PREDICTION_HEADER.map(String::from))?;
    for (id, p) in row_ids.iter().zip(predictions) {
        write_record(&mut w, path, &[id.to_string(), p.to_string()])?;
    }
    finish(w, path)
}

/// Reads a prediction file into a map from row id to prediction.
pub fn read_predictions(path: &Path) -> Result<HashMap<usize, f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    check_header(path, reader.headers().map_err(|e| CliError::csv(path, e))?, &PREDICTION_HEADER)?;
    let mut out = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let line = i + 2;
        if record.len() != 2 {
            return Err(CliError::format(path, format!("line {line}: expected 2 fields")));
        }
        let id: usize = parse_field(path, line, "row_id", &record[0])?;
        let p: f64 = parse_field(path, line, "prediction", &record[1])?;
        if out.insert(id, p).is_some() {
            return Err(CliError::format(path, format!("line {line}: duplicate row_id {id}")));
        }
    }
    Ok(out)
}

/// Looks up the prediction of every row of `ds`.
pub fn predictions_for(path: &Path, map: &HashMap<usize, f64>, ds: &Dataset) -> Result<Vec<f64>> {
    ds.row_ids()
        .iter()
        .map(|id| {
            map.get(id)
                .copied()
                .ok_or_else(|| CliError::format(path, format!("no prediction for row_id {id}")))
        })
        .collect()
}

/// Baseline, fair and optional post-processed outputs for a set of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    pub row_ids: Vec<usize>,
    pub pair: PredictionPair,
    pub postprocessed: Option<Vec<f64>>,
}

pub fn write_pairs(path: &Path, table: &PairTable) -> Result<()> {
    let mut w = writer(path)?;
    write_record(&mut w, path, &PAIR_HEADER.map(String::from))?;
    let p = &table.pair;
    for i in 0..p.len() {
        let post = table
            .postprocessed
            .as_ref()
            .map_or_else(String::new, |y| y[i].to_string());
        write_record(
            &mut w,
            path,
            &[
                table.row_ids[i].to_string(),
                p.baseline()[i].to_string(),
                p.fair()[i].to_string(),
                post,
                u8::from(p.sensitive()[i]).to_string(),
                p.targets()[i].to_string(),
            ],
        )?;
    }
    finish(w, path)
}

pub fn read_pairs(path: &Path) -> Result<PairTable> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    check_header(path, reader.headers().map_err(|e| CliError::csv(path, e))?, &PAIR_HEADER)?;
    let (mut ids, mut base, mut fair, mut post, mut sens, mut target) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let line = i + 2;
        if record.len() != PAIR_HEADER.len() {
            return Err(CliError::format(path, format!("line {line}: expected 6 fields")));
        }
        ids.push(parse_field::<usize>(path, line, "row_id", &record[0])?);
        base.push(parse_field::<f64>(path, line, "baseline", &record[1])?);
        fair.push(parse_field::<f64>(path, line, "fair", &record[2])?);
        let cell = record[3].trim();
        post.push(if cell.is_empty() {
            None
        } else {
            Some(parse_field::<f64>(path, line, "postprocessed", cell)?)
        });
        sens.push(match record[4].trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(CliError::format(path, format!("line {line}: sensitive must be 0 or 1, got `{other}`")))
            }
        });
        target.push(parse_field::<f64>(path, line, "target", &record[5])?);
    }
    let postprocessed = if post.iter().all(Option::is_some) && !post.is_empty() {
        Some(post.into_iter().flatten().collect())
    } else if post.iter().all(Option::is_none) {
        None
    } else {
        return Err(CliError::format(path, "postprocessed column is only partly filled"));
    };
    Ok(PairTable {
        row_ids: ids,
        pair: PredictionPair::new(base, fair, sens, target)?,
        postprocessed,
    })
}
