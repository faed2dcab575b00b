//! Schema-driven encoding of a raw string table into a [`Dataset`].
//!
//! Categorical columns are one-hot encoded with levels in lexicographic order,
//! numeric columns are min-max scaled to `[0, 1]` over the whole table, and
//! rows with a missing value in any retained column are dropped. Scaling
//! statistics come from the full table so baseline and fair models see the
//! same inputs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Drop,
}

impl core::str::FromStr for ColumnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(ColumnKind::Numeric),
            "categorical" => Ok(ColumnKind::Categorical),
            "drop" => Ok(ColumnKind::Drop),
            other => Err(Error::InvalidParameter {
                name: "column kind",
                reason: format!("`{other}` is not one of numeric, categorical, drop"),
            }),
        }
    }
}

/// How the sensitive column becomes a boolean.
#[derive(Debug, Clone, PartialEq)]
pub enum SensitiveRule {
    /// `true` when the trimmed cell equals this text.
    Equals(String),
    /// `true` when the cell parses as a number strictly above this value.
    Above(f64),
}

/// How the target column becomes a value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetRule {
    /// Numeric target, min-max scaled.
    MinMax,
    /// Binary target: 1 when the cell equals this text, 0 otherwise.
    Positive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub sensitive: String,
    pub sensitive_rule: SensitiveRule,
    pub target: String,
    pub target_rule: TargetRule,
    pub task_kind: TaskKind,
    /// Cell values treated as missing in addition to the empty string.
    pub missing: Vec<String>,
    /// Kind for columns not listed in `columns`.
    pub default_kind: ColumnKind,
    pub columns: BTreeMap<String, ColumnKind>,
}

impl Schema {
    pub fn new(
        sensitive: impl Into<String>,
        sensitive_rule: SensitiveRule,
        target: impl Into<String>,
        target_rule: TargetRule,
        task_kind: TaskKind,
    ) -> Self {
        Schema {
            sensitive: sensitive.into(),
            sensitive_rule,
            target: target.into(),
            target_rule,
            task_kind,
            missing: Vec::new(),
            default_kind: ColumnKind::Numeric,
            columns: BTreeMap::new(),
        }
    }

    pub fn with_column(mut self, name: impl Into<String>, kind: ColumnKind) -> Self {
        self.columns.insert(name.into(), kind);
        self
    }

    pub fn with_default(mut self, kind: ColumnKind) -> Self {
        self.default_kind = kind;
        self
    }

    pub fn with_missing(mut self, token: impl Into<String>) -> Self {
        self.missing.push(token.into());
        self
    }

    fn kind_of(&self, column: &str) -> ColumnKind {
        if column == self.sensitive || column == self.target {
            return ColumnKind::Drop;
        }
        self.columns.get(column).copied().unwrap_or(self.default_kind)
    }

    fn is_missing(&self, cell: &str) -> bool {
        cell.is_empty() || self.missing.iter().any(|m| m == cell)
    }
}

/// Header plus string cells, as read from a CSV file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

enum Encoder {
    Numeric { col: usize, min: f64, max: f64 },
    Categorical { col: usize, levels: Vec<String> },
}

fn parse_number(row: usize, column: &str, cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidCell {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        })
}

fn column_index(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

pub fn encode(table: &RawTable, schema: &Schema) -> Result<Dataset> {
    let header: Vec<String> = table.header.iter().map(|h| h.trim().to_string()).collect();
    let sensitive_col = column_index(&header, &schema.sensitive)?;
    let target_col = column_index(&header, &schema.target)?;
    for name in schema.columns.keys() {
        column_index(&header, name)?;
    }

    let kinds: Vec<ColumnKind> = header.iter().map(|h| schema.kind_of(h)).collect();
    let retained: Vec<usize> = (0..header.len())
        .filter(|&c| kinds[c] != ColumnKind::Drop || c == sensitive_col || c == target_col)
        .collect();

    let mut rows: Vec<Vec<&str>> = Vec::with_capacity(table.rows.len());
    for (i, raw) in table.rows.iter().enumerate() {
        if raw.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i,
                fields: raw.len(),
                expected: header.len(),
            });
        }
        let cells: Vec<&str> = raw.iter().map(|c| c.trim()).collect();
        if retained.iter().any(|&c| schema.is_missing(cells[c])) {
            continue;
        }
        rows.push(cells);
    }
    if rows.len() < 2 {
        return Err(Error::TooFewRows(rows.len()));
    }

    let mut encoders = Vec::new();
    let mut feature_names = Vec::new();
    for c in 0..header.len() {
        match kinds[c] {
            ColumnKind::Drop => {}
            ColumnKind::Numeric => {
                let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
                for (i, row) in rows.iter().enumerate() {
                    let v = parse_number(i, &header[c], row[c])?;
                    min = min.min(v);
                    max = max.max(v);
                }
                feature_names.push(header[c].clone());
                encoders.push(Encoder::Numeric { col: c, min, max });
            }
            ColumnKind::Categorical => {
                let levels: BTreeSet<&str> = rows.iter().map(|row| row[c]).collect();
                let levels: Vec<String> = levels.into_iter().map(String::from).collect();
                feature_names.extend(levels.iter().map(|l| format!("{}={}", header[c], l)));
                encoders.push(Encoder::Categorical { col: c, levels });
            }
        }
    }

    let width = feature_names.len();
    let mut features = Matrix::zeros(rows.len(), width);
    for (i, row) in rows.iter().enumerate() {
        let out = features.row_mut(i);
        let mut j = 0;
        for enc in &encoders {
            match enc {
                Encoder::Numeric { col, min, max } => {
                    let v = parse_number(i, &header[*col], row[*col])?;
                    out[j] = if max > min { (v - min) / (max - min) } else { 0.0 };
                    j += 1;
                }
                Encoder::Categorical { col, levels } => {
                    // levels were collected from these rows, so the search succeeds
                    let k = levels.binary_search_by(|l| l.as_str().cmp(row[*col])).unwrap_or(0);
                    out[j + k] = 1.0;
                    j += levels.len();
                }
            }
        }
    }

    let mut sensitive = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let cell = row[sensitive_col];
        sensitive.push(match &schema.sensitive_rule {
            SensitiveRule::Equals(value) => cell == value,
            SensitiveRule::Above(threshold) => parse_number(i, &schema.sensitive, cell)? > *threshold,
        });
    }

    let target = match &schema.target_rule {
        TargetRule::Positive(label) => {
            let t: Vec<f64> = rows
                .iter()
                .map(|row| if row[target_col] == label { 1.0 } else { 0.0 })
                .collect();
            if t.iter().all(|&v| v == t[0]) {
                return Err(Error::ConstantTarget(schema.target.clone()));
            }
            t
        }
        TargetRule::MinMax => {
            let raw = rows
                .iter()
                .enumerate()
                .map(|(i, row)| parse_number(i, &schema.target, row[target_col]))
                .collect::<Result<Vec<f64>>>()?;
            let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(max > min) {
                return Err(Error::ConstantTarget(schema.target.clone()));
            }
            raw.iter().map(|v| (v - min) / (max - min)).collect()
        }
    };

    Dataset::new(features, sensitive, target, feature_names, schema.task_kind)
}

/// Convenience for tests and callers holding `&str` cells.
pub fn table_from_strs(header: &[&str], rows: &[&[&str]]) -> RawTable {
    RawTable {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect(),
    }
}
