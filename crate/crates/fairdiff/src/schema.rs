//! Dataset schema files.
//!
//! A schema is a TOML document naming the sensitive and target columns and
//! the treatment of every other column:
//!
//! ```toml
//! sensitive = "sex"
//! sensitive_equals = "Female"
//! target = "income"
//! target_positive = ">50K"
//! task = "logistic_loss"
//! missing = ["?"]
//! default = "numeric"
//!
//! [columns]
//! workclass = "categorical"
//! fnlwgt = "drop"
//! ```
//!
//! Exactly one of `sensitive_equals` and `sensitive_above` must be given.
//! Without `target_positive` the target is numeric and min-max scaled.

use std::collections::BTreeMap;
use std::path::Path;

use fairdiff_core::encode::{ColumnKind, Schema, SensitiveRule, TargetRule};
use fairdiff_core::TaskKind;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    sensitive: String,
    sensitive_equals: Option<String>,
    sensitive_above: Option<f64>,
    target: String,
    target_positive: Option<String>,
    task: String,
    #[serde(default)]
    missing: Vec<String>,
    default: Option<String>,
    #[serde(default)]
    columns: BTreeMap<String, String>,
}

pub fn parse_schema(text: &str, path: &Path) -> Result<Schema> {
    let config_err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let file: SchemaFile = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;

    let sensitive_rule = match (file.sensitive_equals, file.sensitive_above) {
        (Some(v), None) => SensitiveRule::Equals(v),
        (None, Some(t)) => SensitiveRule::Above(t),
        _ => {
            return Err(config_err(
                "exactly one of `sensitive_equals` and `sensitive_above` is required".into(),
            ))
        }
    };
    let target_rule = match file.target_positive {
        Some(label) => TargetRule::Positive(label),
        None => TargetRule::MinMax,
    };
    let task_kind: TaskKind = file
        .task
        .parse()
        .map_err(|_| config_err(format!("unknown task `{}`", file.task)))?;

    let mut schema = Schema::new(file.sensitive, sensitive_rule, file.target, target_rule, task_kind);
    for token in file.missing {
        schema = schema.with_missing(token);
    }
    if let Some(kind) = file.default {
        schema = schema.with_default(parse_kind(&kind).map_err(config_err)?);
    }
    for (name, kind) in file.columns {
        let kind = parse_kind(&kind).map_err(|m| config_err(format!("column `{name}`: {m}")))?;
        schema = schema.with_column(name, kind);
    }
    Ok(schema)
}

fn parse_kind(text: &str) -> std::result::Result<ColumnKind, String> {
    text.parse().map_err(|_| format!("unknown column kind `{text}`"))
}

pub fn load_schema(path: &Path) -> Result<Schema> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_schema(&text, path)
}
