use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embed::EmbedderConfig;
use crate::error::{Error, Result};
use crate::ingest::{ColumnRef, SampleSpec, TableId};
use crate::simhash::LshConfig;

#[derive(Debug, Clone)]
pub enum Query {
    /// An indexed or catalog column; re-sampled with the index's spec.
    Column(ColumnRef),
    /// Ad-hoc values, optionally attributed to a table for exclusion.
    Values {
        values: Vec<String>,
        table: Option<TableId>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    pub k: usize,
    /// `None` uses the index's similarity threshold.
    pub min_score: Option<f64>,
    pub exclude_query_table: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            k: 10,
            min_score: None,
            exclude_query_table: true,
        }
    }
}

impl SearchParams {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if let Some(m) = self.min_score {
            if m.is_nan() {
                return Err(Error::InvalidConfig("min_score is NaN".into()));
            }
        }
        Ok(())
    }
}

/// One ranked search result.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinCandidate {
    pub column: ColumnRef,
    pub database: String,
    pub table: String,
    pub score: f64,
}

/// Wire form shared by the CLI and the HTTP API.
#[derive(Serialize, Deserialize)]
struct CandidateWire {
    database: String,
    table: String,
    column: String,
    score: f64,
    table_id: TableId,
    column_index: usize,
}

/// Round to the four decimals used in every serialized score.
pub fn round_score(score: f64) -> f64 {
    (score * 1e4).round() / 1e4
}

impl Serialize for JoinCandidate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CandidateWire {
            database: self.database.clone(),
            table: self.table.clone(),
            column: self.column.column_name.clone(),
            score: round_score(self.score),
            table_id: self.column.table_id.clone(),
            column_index: self.column.column_index,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JoinCandidate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = CandidateWire::deserialize(deserializer)?;
        Ok(Self {
            column: ColumnRef {
                table_id: w.table_id,
                column_index: w.column_index,
                column_name: w.column,
            },
            database: w.database,
            table: w.table,
            score: w.score,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedColumn {
    pub table: String,
    pub column: ColumnRef,
    pub reason: String,
}

/// Everything needed to reproduce an index build, plus its timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexManifest {
    pub corpus_root: Option<PathBuf>,
    pub tables_indexed: usize,
    pub columns_indexed: usize,
    pub total_columns: usize,
    pub columns_skipped: Vec<SkippedColumn>,
    pub sample: SampleSpec,
    pub embedder: EmbedderConfig,
    pub lsh: LshConfig,
    pub build_seconds: f64,
    pub built_at_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub index: usize,
    pub distinct_count: u64,
    pub null_count: u64,
    pub sampled_values: usize,
}

/// Wall-clock split of one search. `lookup` covers bucket retrieval and exact
/// re-ranking; `end_to_end` adds sampling and embedding of the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchTiming {
    pub lookup: Duration,
    pub end_to_end: Duration,
}
