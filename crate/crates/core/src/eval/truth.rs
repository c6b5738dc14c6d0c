use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Catalog, ColumnRef};

pub const TRUTH_HEADER: [&str; 4] = ["query_table", "query_column", "answer_table", "answer_column"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub query: ColumnRef,
    pub answers: BTreeSet<ColumnRef>,
}

/// Labelled joinable columns per query, ordered by query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthSet {
    pub entries: Vec<TruthEntry>,
}

impl GroundTruthSet {
    pub fn from_pairs<I: IntoIterator<Item = (ColumnRef, ColumnRef)>>(pairs: I) -> Self {
        let mut grouped: BTreeMap<ColumnRef, BTreeSet<ColumnRef>> = BTreeMap::new();
        for (q, a) in pairs {
            if q != a {
                grouped.entry(q).or_default().insert(a);
            }
        }
        Self {
            entries: grouped
                .into_iter()
                .map(|(query, answers)| TruthEntry { query, answers })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn queries(&self) -> impl Iterator<Item = &ColumnRef> {
        self.entries.iter().map(|e| &e.query)
    }
}

/// One row of the ground-truth CSV. Tables are given as `database.table`,
/// a table id, or an unambiguous bare table name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub query_table: String,
    pub query_column: String,
    pub answer_table: String,
    pub answer_column: String,
}

#[derive(Debug, Clone, Default)]
pub struct TruthLoad {
    pub truth: GroundTruthSet,
    /// Rows whose table or column could not be resolved.
    pub dropped: usize,
    pub warnings: Vec<String>,
}

pub fn write_ground_truth(path: &Path, rows: &[TruthRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRUTH_HEADER)?;
    for r in rows {
        w.write_record([&r.query_table, &r.query_column, &r.answer_table, &r.answer_column])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_ground_truth(path: &Path, catalog: &Catalog) -> Result<TruthLoad> {
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let malformed = |row: u64, reason: String| Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        reason,
    };
    let resolve = |table: &str, column: &str| -> Result<ColumnRef> {
        let t = catalog.resolve_table(table)?;
        catalog.column_ref(&t.meta.table_id, column)
    };

    let mut load = TruthLoad::default();
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(i as u64, e.to_string()))?;
        if i == 0 {
            let header: Vec<&str> = record.iter().map(str::trim).collect();
            if header != TRUTH_HEADER {
                return Err(malformed(0, format!("expected header {}", TRUTH_HEADER.join(","))));
            }
            continue;
        }
        if record.len() != 4 {
            return Err(malformed(i as u64, format!("expected 4 fields, found {}", record.len())));
        }
        let f: Vec<&str> = record.iter().map(str::trim).collect();
        match (resolve(f[0], f[1]), resolve(f[2], f[3])) {
            (Ok(q), Ok(a)) if q == a => {
                load.dropped += 1;
                load.warnings.push(format!("row {i}: answer equals query"));
            }
            (Ok(q), Ok(a)) => pairs.push((q, a)),
            (Err(e), _) | (_, Err(e)) => {
                load.dropped += 1;
                load.warnings.push(format!("row {i}: {e}"));
            }
        }
    }
    if load.dropped > 0 {
        log::warn!("dropped {} unresolvable ground-truth rows", load.dropped);
    }
    load.truth = GroundTruthSet::from_pairs(pairs);
    Ok(load)
}
