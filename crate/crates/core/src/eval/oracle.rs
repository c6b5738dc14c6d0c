//! Exhaustive top-k used as ground truth for the LSH search.
//!
//! Shares only sampling and embedding with the engine: no LSH, and its own
//! scoring loop and sort.

use crate::embed::ColumnEmbedder;
use crate::engine::{JoinCandidate, SearchParams};
use crate::ingest::{Catalog, ColumnRef, SampleSpec};

struct Entry {
    column: ColumnRef,
    database: String,
    table: String,
    vector: Vec<f64>,
}

/// Every catalog column embedded once, scored exhaustively per query.
pub struct BruteForceOracle<'a> {
    catalog: &'a Catalog,
    embedder: &'a dyn ColumnEmbedder,
    sample: SampleSpec,
    entries: Vec<Entry>,
}

fn plain_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

impl<'a> BruteForceOracle<'a> {
    pub fn new(catalog: &'a Catalog, embedder: &'a dyn ColumnEmbedder, sample: SampleSpec) -> Self {
        let mut entries = Vec::new();
        for table in catalog.tables() {
            for column in table.column_refs() {
                let Ok(values) = catalog.sample_column(&column, &sample) else {
                    continue;
                };
                let v = embedder.embed_column(&values);
                if v.is_zero() {
                    continue;
                }
                entries.push(Entry {
                    column,
                    database: table.meta.database.clone(),
                    table: table.meta.name.clone(),
                    vector: v.components().to_vec(),
                });
            }
        }
        Self {
            catalog,
            embedder,
            sample,
            entries,
        }
    }

    /// Exact top-k for `query`; `default_min_score` applies when
    /// `params.min_score` is unset.
    pub fn topk(&self, query: &ColumnRef, params: &SearchParams, default_min_score: f64) -> Vec<JoinCandidate> {
        let Ok(values) = self.catalog.sample_column(query, &self.sample) else {
            return Vec::new();
        };
        let q = self.embedder.embed_column(&values);
        let min_score = params.min_score.unwrap_or(default_min_score);

        let mut scored: Vec<(f64, &Entry)> = Vec::new();
        for e in &self.entries {
            if e.column == *query {
                continue;
            }
            if params.exclude_query_table && e.column.table_id == query.table_id {
                continue;
            }
            let s = plain_cosine(q.components(), &e.vector);
            if s >= min_score {
                scored.push((s, e));
            }
        }
        scored.sort_by(|(sa, a), (sb, b)| {
            sb.partial_cmp(sa)
                .expect("cosines are finite")
                .then(a.database.cmp(&b.database))
                .then(a.table.cmp(&b.table))
                .then(a.column.column_name.cmp(&b.column.column_name))
                .then(a.column.column_index.cmp(&b.column.column_index))
        });
        scored
            .into_iter()
            .take(params.k)
            .map(|(score, e)| JoinCandidate {
                column: e.column.clone(),
                database: e.database.clone(),
                table: e.table.clone(),
                score,
            })
            .collect()
    }
}

/// One-shot exhaustive search; prefer [`BruteForceOracle`] for many queries.
pub fn brute_force_topk(
    query: &ColumnRef,
    catalog: &Catalog,
    embedder: &dyn ColumnEmbedder,
    sample: &SampleSpec,
    params: &SearchParams,
    default_min_score: f64,
) -> Vec<JoinCandidate> {
    BruteForceOracle::new(catalog, embedder, *sample).topk(query, params, default_min_score)
}
