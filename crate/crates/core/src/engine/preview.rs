use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{is_null, Catalog, TableId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreviewRequest {
    pub query_table: TableId,
    pub query_column: String,
    pub candidate_table: TableId,
    pub candidate_column: String,
    pub selected_columns: Vec<String>,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreviewWarning {
    pub kind: String,
    pub key: String,
    /// Candidate rows carrying this key; only the first is used.
    pub candidate_rows: usize,
    pub message: String,
}

/// Left join of the query table with selected candidate columns, placed
/// directly after the query column. Row count always equals the query table's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinPreview {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
    /// Rows of the full (untruncated) join, equal to the query table's row count.
    pub total_rows: usize,
    pub matched_rows: usize,
    pub warnings: Vec<PreviewWarning>,
}

pub(super) fn join_preview(catalog: &Catalog, req: &PreviewRequest) -> Result<JoinPreview> {
    if req.limit == 0 {
        return Err(Error::InvalidConfig("limit must be positive".into()));
    }
    let left = catalog.table(&req.query_table)?;
    let right = catalog.table(&req.candidate_table)?;
    let unknown = |t: &crate::ingest::Table, c: &str| {
        Error::UnknownColumn(format!("{}.{c}", t.meta.qualified_name()))
    };
    let left_key = left
        .column_index(&req.query_column)
        .ok_or_else(|| unknown(left, &req.query_column))?;
    let right_key = right
        .column_index(&req.candidate_column)
        .ok_or_else(|| unknown(right, &req.candidate_column))?;
    let selected: Vec<usize> = req
        .selected_columns
        .iter()
        .map(|c| right.column_index(c).ok_or_else(|| unknown(right, c)))
        .collect::<Result<_>>()?;

    // first row per key, in candidate-table order, plus how many rows share it
    let mut first_row: HashMap<&str, (usize, usize)> = HashMap::new();
    for row in 0..right.row_count() {
        let key = right.cell(row, right_key);
        if is_null(key) {
            continue;
        }
        first_row
            .entry(key.unwrap_or_default())
            .and_modify(|(_, n)| *n += 1)
            .or_insert((row, 1));
    }

    let mut columns: Vec<String> = Vec::new();
    for (i, name) in left.meta.column_names.iter().enumerate() {
        columns.push(name.clone());
        if i == left_key {
            columns.extend(req.selected_columns.iter().map(|c| format!("{}.{c}", right.meta.name)));
        }
    }

    let total_rows = left.row_count();
    let mut rows = Vec::with_capacity(total_rows.min(req.limit));
    let mut matched_rows = 0;
    let mut duplicated: BTreeMap<String, usize> = BTreeMap::new();
    for row in 0..total_rows {
        let key = left.cell(row, left_key);
        let hit = if is_null(key) {
            None
        } else {
            first_row.get(key.unwrap_or_default()).copied()
        };
        if let Some((_, n)) = hit {
            matched_rows += 1;
            if n > 1 {
                duplicated.insert(key.unwrap_or_default().to_string(), n);
            }
        }
        if rows.len() < req.limit {
            let mut out = Vec::with_capacity(columns.len());
            for c in 0..left.meta.column_names.len() {
                out.push(left.cell(row, c).map(str::to_string));
                if c == left_key {
                    out.extend(selected.iter().map(|&s| {
                        hit.and_then(|(r, _)| right.cell(r, s)).map(str::to_string)
                    }));
                }
            }
            rows.push(out);
        }
    }

    let warnings = duplicated
        .into_iter()
        .map(|(key, n)| PreviewWarning {
            kind: "duplicate_key".to_string(),
            message: format!("key `{key}` matches {n} candidate rows; using the first"),
            key,
            candidate_rows: n,
        })
        .collect();
    Ok(JoinPreview {
        columns,
        rows,
        total_rows,
        matched_rows,
        warnings,
    })
}
