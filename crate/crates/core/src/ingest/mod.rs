//! Table loading, the corpus catalog, and per-column value sampling.
//!
//! All cell values are kept as strings. A cell is null when it is missing
//! (JSONL rows without the key) or equal to one of [`NULL_MARKERS`].

mod catalog;
mod loader;
mod sample;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use catalog::{Catalog, CatalogManifest, RegistrationReport, RejectedFile, Table};
pub use loader::{disambiguate_headers, TableFormat};
pub use sample::{sample_cells, SampleSpec, SampleStrategy};

use crate::hash::fnv1a;

/// Case-sensitive set of strings treated as null.
pub const NULL_MARKERS: [&str; 5] = ["", "NULL", "null", "NaN", "N/A"];

#[inline]
pub fn is_null_marker(value: &str) -> bool {
    NULL_MARKERS.contains(&value)
}

#[inline]
pub fn is_null(cell: Option<&str>) -> bool {
    cell.is_none_or(is_null_marker)
}

/// Stable table identifier derived from `(database, name)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableId(String);

impl TableId {
    pub fn derive(database: &str, name: &str) -> Self {
        let mut key = Vec::with_capacity(database.len() + name.len() + 1);
        key.extend_from_slice(database.as_bytes());
        key.push(0x1f);
        key.extend_from_slice(name.as_bytes());
        TableId(format!("t{:016x}", fnv1a(&key)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TableId {
    fn from(s: &str) -> Self {
        TableId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub table_id: TableId,
    pub name: String,
    pub database: String,
    pub source_path: PathBuf,
    pub column_names: Vec<String>,
    pub row_count: u64,
    /// Always true for file-backed tables; reserved for sampled sources.
    pub row_count_exact: bool,
}

impl TableMeta {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.database, self.name)
    }
}

/// Identity of one column. `(table_id, column_index)` is the key; the name
/// rides along for display.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColumnRef {
    pub table_id: TableId,
    pub column_index: usize,
    pub column_name: String,
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}:{}]", self.table_id, self.column_index, self.column_name)
    }
}

/// A column's sampled, null-free values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnValues {
    pub column: Option<ColumnRef>,
    pub values: Vec<String>,
    /// Nulls seen while scanning the column.
    pub null_count: u64,
    /// Distinct values among `values`.
    pub distinct_count: u64,
}

impl ColumnValues {
    /// Wrap an ad-hoc list of values, dropping nulls.
    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        sample_cells(
            values.into_iter().map(|v| Some(v.into())),
            &SampleSpec::full(),
            None,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatabaseNaming {
    /// Every table gets the corpus root's directory name as its database.
    Flat,
    /// Tables take the name of the first subdirectory below the root.
    #[default]
    PerSubdirectory,
}

impl std::str::FromStr for DatabaseNaming {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(Self::Flat),
            "per_subdirectory" | "per-subdirectory" => Ok(Self::PerSubdirectory),
            other => Err(format!("unknown database naming `{other}`")),
        }
    }
}

/// Where a catalog came from, recorded so an index can reload its corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSource {
    pub root: PathBuf,
    pub naming: DatabaseNaming,
}
