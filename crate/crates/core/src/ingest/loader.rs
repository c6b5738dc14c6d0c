use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Jsonl,
}

impl TableFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "jsonl" => Some(Self::Jsonl),
            _ => None,
        }
    }
}

/// Parsed table contents in column-major order.
pub(crate) struct RawTable {
    pub column_names: Vec<String>,
    pub columns: Vec<Vec<Option<String>>>,
    pub row_count: u64,
}

/// Make header names unique: the second `x` becomes `x_2`, the third `x_3`,
/// skipping suffixes already taken. Blank names become `column_<n>` (1-based).
pub fn disambiguate_headers<S: AsRef<str>>(headers: &[S]) -> Vec<String> {
    let mut taken: HashSet<String> = HashSet::new();
    let mut out = Vec::with_capacity(headers.len());
    for (i, h) in headers.iter().enumerate() {
        let base = match h.as_ref().trim() {
            "" => format!("column_{}", i + 1),
            name => name.to_string(),
        };
        let mut name = base.clone();
        let mut suffix = 2;
        while taken.contains(&name) {
            name = format!("{base}_{suffix}");
            suffix += 1;
        }
        taken.insert(name.clone());
        out.push(name);
    }
    out
}

pub(crate) fn read_table(path: &Path, format: TableFormat) -> Result<RawTable> {
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let table = match format {
        TableFormat::Csv => read_csv(path)?,
        TableFormat::Jsonl => read_jsonl(path)?,
    };
    if table.row_count == 0 {
        return Err(Error::EmptyTable(path.to_path_buf()));
    }
    Ok(table)
}

fn read_csv(path: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, 0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(malformed(path, 0, "missing header row".into()));
    }
    let column_names = disambiguate_headers(&headers);
    let mut columns: Vec<Vec<Option<String>>> = vec![Vec::new(); column_names.len()];
    let mut row_count = 0u64;
    for record in reader.records() {
        let row = row_count + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => malformed(
                path,
                row,
                format!("expected {expected_len} fields, found {len}"),
            ),
            _ => malformed(path, row, e.to_string()),
        })?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            col.push(Some(field.to_string()));
        }
        row_count += 1;
    }
    Ok(RawTable {
        column_names,
        columns,
        row_count,
    })
}

fn read_jsonl(path: &Path) -> Result<RawTable> {
    let reader = BufReader::new(File::open(path)?);
    let mut column_names: Vec<String> = Vec::new();
    let mut positions: std::collections::HashMap<String, usize> = Default::default();
    let mut columns: Vec<Vec<Option<String>>> = Vec::new();
    let mut row_count = 0u64;

    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = row_count + 1;
        let object = match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(map)) => map,
            Ok(_) => return Err(malformed(path, row, "line is not a JSON object".into())),
            Err(e) => return Err(malformed(path, row, e.to_string())),
        };
        for (key, value) in object {
            let cell = match value {
                Value::Null => None,
                Value::String(s) => Some(s),
                Value::Bool(b) => Some(b.to_string()),
                Value::Number(n) => Some(n.to_string()),
                Value::Array(_) | Value::Object(_) => {
                    return Err(malformed(path, row, format!("nested value under key `{key}`")))
                }
            };
            let idx = *positions.entry(key.clone()).or_insert_with(|| {
                column_names.push(key);
                // backfill earlier rows that lacked this key
                columns.push(vec![None; row_count as usize]);
                columns.len() - 1
            });
            columns[idx].push(cell);
        }
        row_count += 1;
        for col in &mut columns {
            if col.len() < row_count as usize {
                col.push(None);
            }
        }
    }
    Ok(RawTable {
        column_names,
        columns,
        row_count,
    })
}

fn malformed(path: &Path, row: u64, reason: String) -> Error {
    Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        reason,
    }
}
