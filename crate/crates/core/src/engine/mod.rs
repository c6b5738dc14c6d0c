//! The indexing and search pipelines.
//!
//! Indexing: sample every catalog column, embed it, insert it into the LSH
//! index. Search: sample and embed the query column the same way, pull LSH
//! candidates, re-rank them by exact cosine, filter, and keep the top `k`.

mod preview;
mod types;

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

pub use preview::{JoinPreview, PreviewRequest, PreviewWarning};
pub use types::{ColumnSummary, IndexManifest, JoinCandidate, Query, SearchParams, SearchTiming, SkippedColumn};

use crate::embed::{cosine, ColumnEmbedder, EmbeddingVector};
use crate::error::{Error, Result};
use crate::ingest::{sample_cells, Catalog, ColumnRef, SampleSpec, TableId};
use crate::simhash::{IndexProvenance, LshConfig, LshIndex};

/// Result of [`build_index`].
#[derive(Debug, Clone)]
pub struct IndexBuild {
    pub index: LshIndex,
    pub manifest: IndexManifest,
}

pub fn build_index(
    catalog: &Catalog,
    sample: &SampleSpec,
    embedder: &dyn ColumnEmbedder,
    lsh: &LshConfig,
) -> Result<IndexBuild> {
    let started = Instant::now();
    sample.validate()?;
    lsh.validate()?;
    if catalog.is_empty() {
        return Err(Error::NothingIndexed("catalog is empty".into()));
    }
    let mut index = LshIndex::new(lsh.clone(), embedder.config().clone())?;
    index.set_provenance(IndexProvenance {
        corpus: catalog.source().cloned(),
        sample: *sample,
    });

    let mut skipped = Vec::new();
    let mut tables_indexed = 0;
    for table in catalog.tables() {
        let mut any = false;
        for column in table.column_refs() {
            let outcome = catalog
                .sample_column(&column, sample)
                .map(|values| embedder.embed_column(&values));
            let reason = match outcome {
                Ok(v) if v.is_zero() => "empty".to_string(),
                Ok(v) => match index.insert(column.clone(), v) {
                    Ok(()) => {
                        any = true;
                        continue;
                    }
                    Err(e) => e.to_string(),
                },
                Err(e) => e.to_string(),
            };
            skipped.push(SkippedColumn {
                table: table.meta.qualified_name(),
                column,
                reason,
            });
        }
        tables_indexed += usize::from(any);
    }
    if index.is_empty() {
        return Err(Error::NothingIndexed(format!(
            "all {} columns were skipped",
            skipped.len()
        )));
    }
    let manifest = IndexManifest {
        corpus_root: catalog.source().map(|s| s.root.clone()),
        tables_indexed,
        columns_indexed: index.len(),
        total_columns: catalog.column_count(),
        columns_skipped: skipped,
        sample: *sample,
        embedder: embedder.config().clone(),
        lsh: lsh.clone(),
        build_seconds: started.elapsed().as_secs_f64(),
        built_at_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    Ok(IndexBuild { index, manifest })
}

/// Result ordering: score descending, then database, table name and column
/// name ascending.
pub fn candidate_order(a: &JoinCandidate, b: &JoinCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.database.cmp(&b.database))
        .then_with(|| a.table.cmp(&b.table))
        .then_with(|| a.column.column_name.cmp(&b.column.column_name))
        .then_with(|| a.column.column_index.cmp(&b.column.column_index))
}

/// Catalog plus (optionally) a loaded index. Immutable; rebuilds produce a
/// new engine.
#[derive(Debug, Clone)]
pub struct DiscoveryEngine {
    catalog: Arc<Catalog>,
    embedder: Arc<dyn ColumnEmbedder>,
    sample: SampleSpec,
    index: Option<Arc<LshIndex>>,
    manifest: Option<IndexManifest>,
}

impl DiscoveryEngine {
    /// An engine over `catalog` with no index yet.
    pub fn new(catalog: Arc<Catalog>) -> Self {
        Self {
            catalog,
            embedder: Arc::new(crate::embed::HashingEmbedder::default()),
            sample: SampleSpec::default(),
            index: None,
            manifest: None,
        }
    }

    pub fn from_build(catalog: Arc<Catalog>, embedder: Arc<dyn ColumnEmbedder>, build: IndexBuild) -> Self {
        Self {
            catalog,
            embedder,
            sample: build.manifest.sample,
            index: Some(Arc::new(build.index)),
            manifest: Some(build.manifest),
        }
    }

    /// Attach a loaded index; the embedder is rebuilt from the index's
    /// recorded config.
    pub fn with_index(catalog: Arc<Catalog>, index: LshIndex) -> Result<Self> {
        let embedder = index.embedder_config().build()?;
        Self::with_index_and_embedder(catalog, index, embedder)
    }

    pub fn with_index_and_embedder(
        catalog: Arc<Catalog>,
        index: LshIndex,
        embedder: Arc<dyn ColumnEmbedder>,
    ) -> Result<Self> {
        if embedder.config() != index.embedder_config() {
            return Err(Error::ConfigMismatch(
                "embedder differs from the one recorded in the index".into(),
            ));
        }
        let sample = index.provenance().map(|p| p.sample).unwrap_or_default();
        Ok(Self {
            catalog,
            embedder,
            sample,
            index: Some(Arc::new(index)),
            manifest: None,
        })
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn embedder(&self) -> &Arc<dyn ColumnEmbedder> {
        &self.embedder
    }

    pub fn sample_spec(&self) -> &SampleSpec {
        &self.sample
    }

    pub fn index(&self) -> Option<&Arc<LshIndex>> {
        self.index.as_ref()
    }

    pub fn manifest(&self) -> Option<&IndexManifest> {
        self.manifest.as_ref()
    }

    fn loaded_index(&self) -> Result<&LshIndex> {
        self.index.as_deref().ok_or(Error::IndexNotBuilt)
    }

    /// Resolve `(table, column)` names to a column reference.
    pub fn resolve_column(&self, table: &str, column: &str) -> Result<ColumnRef> {
        let t = self.catalog.resolve_table(table)?;
        self.catalog.column_ref(&t.meta.table_id, column)
    }

    /// Fresh sample and embedding of the query, using the index's sample spec.
    pub fn query_vector(&self, query: &Query) -> Result<EmbeddingVector> {
        let values = match query {
            Query::Column(c) => self.catalog.sample_column(c, &self.sample)?,
            Query::Values { values, .. } => {
                sample_cells(values.iter().map(|v| Some(v.as_str())), &self.sample, None)
            }
        };
        Ok(self.embedder.embed_column(&values))
    }

    pub fn search_topk(&self, query: &Query, params: &SearchParams) -> Result<Vec<JoinCandidate>> {
        self.search_timed(query, params).map(|(r, _)| r)
    }

    /// Search and report the time split between query embedding and lookup.
    pub fn search_timed(&self, query: &Query, params: &SearchParams) -> Result<(Vec<JoinCandidate>, SearchTiming)> {
        let started = Instant::now();
        params.validate()?;
        let index = self.loaded_index()?;
        if let Query::Column(c) = query {
            // fail fast on bad refs before sampling
            self.catalog.table(&c.table_id)?;
        }
        let qv = self.query_vector(query)?;
        let lookup_started = Instant::now();
        let results = self.rank(index, &qv, query, params)?;
        let lookup = lookup_started.elapsed();
        Ok((
            results,
            SearchTiming {
                lookup,
                end_to_end: started.elapsed().max(lookup),
            },
        ))
    }

    fn rank(
        &self,
        index: &LshIndex,
        qv: &EmbeddingVector,
        query: &Query,
        params: &SearchParams,
    ) -> Result<Vec<JoinCandidate>> {
        let min_score = params.min_score.unwrap_or(index.config().similarity_threshold);
        let (self_ref, query_table) = match query {
            Query::Column(c) => (Some(c), Some(&c.table_id)),
            Query::Values { table, .. } => (None, table.as_ref()),
        };
        let mut out = Vec::new();
        for (column, vector) in index.candidates_with_vectors(qv)? {
            if Some(column) == self_ref {
                continue;
            }
            if params.exclude_query_table && Some(&column.table_id) == query_table {
                continue;
            }
            let score = cosine(qv, vector)?;
            if score < min_score {
                continue;
            }
            let Ok(table) = self.catalog.table(&column.table_id) else {
                // indexed column no longer in the catalog
                continue;
            };
            out.push(JoinCandidate {
                column: column.clone(),
                database: table.meta.database.clone(),
                table: table.meta.name.clone(),
                score,
            });
        }
        out.sort_by(candidate_order);
        out.truncate(params.k);
        Ok(out)
    }

    /// Columns of a table in catalog order with counts from the index's sample.
    pub fn list_candidate_columns(&self, table: &TableId) -> Result<Vec<ColumnSummary>> {
        let t = self.catalog.table(table)?;
        t.column_refs()
            .map(|c| {
                let values = self.catalog.sample_column(&c, &self.sample)?;
                Ok(ColumnSummary {
                    name: c.column_name.clone(),
                    index: c.column_index,
                    distinct_count: values.distinct_count,
                    null_count: values.null_count,
                    sampled_values: values.values.len(),
                })
            })
            .collect()
    }

    pub fn join_preview(&self, request: &PreviewRequest) -> Result<JoinPreview> {
        preview::join_preview(&self.catalog, request)
    }
}

impl SearchTiming {
    pub fn zero() -> Self {
        Self {
            lookup: Duration::ZERO,
            end_to_end: Duration::ZERO,
        }
    }
}
