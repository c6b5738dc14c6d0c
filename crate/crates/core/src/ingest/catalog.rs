use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::loader::{read_table, TableFormat};
use super::sample::{sample_cells, SampleSpec};
use super::{ColumnRef, ColumnValues, CorpusSource, DatabaseNaming, TableId, TableMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Table {
    pub meta: TableMeta,
    columns: Vec<Vec<Option<String>>>,
}

impl Table {
    pub fn column(&self, index: usize) -> Option<&[Option<String>]> {
        self.columns.get(index).map(Vec::as_slice)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.meta.column_names.iter().position(|c| c == name)
    }

    pub fn column_ref(&self, index: usize) -> Option<ColumnRef> {
        self.meta.column_names.get(index).map(|name| ColumnRef {
            table_id: self.meta.table_id.clone(),
            column_index: index,
            column_name: name.clone(),
        })
    }

    pub fn column_refs(&self) -> impl Iterator<Item = ColumnRef> + '_ {
        (0..self.columns.len()).filter_map(|i| self.column_ref(i))
    }

    /// Cell at `(row, column)`; `None` for missing cells or out-of-range.
    pub fn cell(&self, row: usize, column: usize) -> Option<&str> {
        self.columns.get(column)?.get(row)?.as_deref()
    }

    pub fn row_count(&self) -> usize {
        self.meta.row_count as usize
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectedFile {
    pub path: PathBuf,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RegistrationReport {
    pub loaded: usize,
    pub rejected: Vec<RejectedFile>,
}

/// Serializable summary of a catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogManifest {
    pub ingested_at_unix: u64,
    pub source: Option<CorpusSource>,
    pub table_count: usize,
    pub column_count: usize,
    pub tables: Vec<TableMeta>,
}

/// In-memory registry of loaded tables.
///
/// Mutated only while loading; share it behind an `Arc` afterwards.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    tables: Vec<Table>,
    by_id: HashMap<TableId, usize>,
    source: Option<CorpusSource>,
    ingested_at_unix: u64,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Load every `*.csv` / `*.jsonl` below `root`. Files that fail to load
    /// are listed in the report; the rest are registered.
    pub fn register_corpus(&mut self, root: &Path, naming: DatabaseNaming) -> Result<RegistrationReport> {
        if !root.is_dir() {
            return Err(Error::FileNotFound(root.to_path_buf()));
        }
        let root = root.canonicalize()?;
        let root_name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "default".to_string());

        let mut report = RegistrationReport::default();
        let mut seen: HashMap<TableId, PathBuf> = HashMap::new();
        let entries = WalkDir::new(&root)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file());
        for entry in entries {
            let path = entry.path();
            let Some(format) = TableFormat::from_path(path) else {
                continue;
            };
            let database = match naming {
                DatabaseNaming::Flat => root_name.clone(),
                DatabaseNaming::PerSubdirectory => path
                    .strip_prefix(&root)
                    .ok()
                    .and_then(|rel| {
                        let mut comps = rel.components();
                        let first = comps.next()?;
                        // files sitting directly in the root have one component
                        comps.next().map(|_| first.as_os_str().to_string_lossy().into_owned())
                    })
                    .unwrap_or_else(|| root_name.clone()),
            };
            let name = table_name(path);
            let id = TableId::derive(&database, &name);
            if let Some(prev) = seen.get(&id) {
                report.rejected.push(RejectedFile {
                    path: path.to_path_buf(),
                    error: format!(
                        "table {database}.{name} already loaded from {}",
                        prev.display()
                    ),
                });
                continue;
            }
            match self.load_table(path, &database, format) {
                Ok(_) => {
                    seen.insert(id, path.to_path_buf());
                    report.loaded += 1;
                }
                Err(e) => {
                    log::warn!("rejected {}: {e}", path.display());
                    report.rejected.push(RejectedFile {
                        path: path.to_path_buf(),
                        error: e.to_string(),
                    });
                }
            }
        }
        self.source = Some(CorpusSource { root, naming });
        Ok(report)
    }

    /// Load one file as a table named after its file stem. Loading a table
    /// with an existing `(database, name)` replaces it.
    pub fn load_table(&mut self, path: &Path, database: &str, format: TableFormat) -> Result<TableMeta> {
        let raw = read_table(path, format)?;
        let name = table_name(path);
        let meta = TableMeta {
            table_id: TableId::derive(database, &name),
            name,
            database: database.to_string(),
            source_path: path.to_path_buf(),
            column_names: raw.column_names,
            row_count: raw.row_count,
            row_count_exact: true,
        };
        let table = Table {
            meta: meta.clone(),
            columns: raw.columns,
        };
        match self.by_id.get(&meta.table_id) {
            Some(&i) => self.tables[i] = table,
            None => {
                self.by_id.insert(meta.table_id.clone(), self.tables.len());
                self.tables.push(table);
            }
        }
        self.ingested_at_unix = now_unix();
        Ok(meta)
    }

    pub fn source(&self) -> Option<&CorpusSource> {
        self.source.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, id: &TableId) -> Result<&Table> {
        self.by_id
            .get(id)
            .map(|&i| &self.tables[i])
            .ok_or_else(|| Error::UnknownTable(id.to_string()))
    }

    /// Resolve a table by id, `database.name`, or an unambiguous bare name.
    pub fn resolve_table(&self, key: &str) -> Result<&Table> {
        if let Some(&i) = self.by_id.get(&TableId::from(key)) {
            return Ok(&self.tables[i]);
        }
        if let Some((db, name)) = key.split_once('.') {
            if let Some(&i) = self.by_id.get(&TableId::derive(db, name)) {
                return Ok(&self.tables[i]);
            }
        }
        let mut matches = self.tables.iter().filter(|t| t.meta.name == key);
        match (matches.next(), matches.next()) {
            (Some(t), None) => Ok(t),
            (Some(_), Some(_)) => Err(Error::UnknownTable(format!(
                "`{key}` is ambiguous; qualify it as database.table"
            ))),
            _ => Err(Error::UnknownTable(key.to_string())),
        }
    }

    pub fn column_ref(&self, table: &TableId, column: &str) -> Result<ColumnRef> {
        let t = self.table(table)?;
        t.column_index(column)
            .and_then(|i| t.column_ref(i))
            .ok_or_else(|| Error::UnknownColumn(format!("{}.{column}", t.meta.qualified_name())))
    }

    fn cells(&self, column: &ColumnRef) -> Result<&[Option<String>]> {
        let t = self.table(&column.table_id)?;
        t.column(column.column_index)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))
    }

    pub fn sample_column(&self, column: &ColumnRef, spec: &SampleSpec) -> Result<ColumnValues> {
        let cells = self.cells(column)?;
        Ok(sample_cells(cells.iter().map(Option::as_deref), spec, Some(column.clone())))
    }

    /// All columns in catalog order.
    pub fn column_refs(&self) -> impl Iterator<Item = ColumnRef> + '_ {
        self.tables.iter().flat_map(Table::column_refs)
    }

    pub fn column_count(&self) -> usize {
        self.tables.iter().map(|t| t.meta.column_names.len()).sum()
    }

    pub fn manifest(&self) -> CatalogManifest {
        CatalogManifest {
            ingested_at_unix: self.ingested_at_unix,
            source: self.source.clone(),
            table_count: self.tables.len(),
            column_count: self.column_count(),
            tables: self.tables.iter().map(|t| t.meta.clone()).collect(),
        }
    }

    pub fn write_manifest(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, &self.manifest())?;
        Ok(())
    }
}

fn table_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
