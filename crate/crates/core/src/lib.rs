//! Semantic join discovery over a corpus of tables.
//!
//! Columns are sampled, embedded into unit vectors, and hashed into a banded
//! SimHash index. A search embeds the query column the same way, collects
//! colliding columns, re-ranks them by exact cosine and returns the top `k`
//! above a similarity threshold.
//!
//! ```no_run
//! use std::sync::Arc;
//! use warpgate_core::{build_index, Catalog, DatabaseNaming, DiscoveryEngine, PipelineConfig, Query, SearchParams};
//!
//! # fn main() -> warpgate_core::Result<()> {
//! let mut catalog = Catalog::new();
//! catalog.register_corpus("corpus".as_ref(), DatabaseNaming::PerSubdirectory)?;
//! let catalog = Arc::new(catalog);
//! let config = PipelineConfig::default();
//! let embedder = config.embedder.build()?;
//! let build = build_index(&catalog, &config.sample, embedder.as_ref(), &config.lsh)?;
//! let engine = DiscoveryEngine::from_build(catalog, embedder, build);
//! let query = engine.resolve_column("sales.accounts", "name")?;
//! for hit in engine.search_topk(&Query::Column(query), &SearchParams::default())? {
//!     println!("{}.{}.{} {:.4}", hit.database, hit.table, hit.column.column_name, hit.score);
//! }
//! # Ok(())
//! # }
//! ```

pub mod config;
pub mod embed;
pub mod engine;
mod error;
pub mod eval;
pub mod hash;
pub mod ingest;
pub mod rng;
pub mod simhash;

pub use config::PipelineConfig;
pub use embed::{cosine, joinability, ColumnEmbedder, EmbedderConfig, EmbeddingVector, HashingEmbedder};
pub use engine::{
    build_index, DiscoveryEngine, IndexBuild, IndexManifest, JoinCandidate, JoinPreview, PreviewRequest, Query,
    SearchParams,
};
pub use error::{Error, Result};
pub use ingest::{Catalog, ColumnRef, ColumnValues, DatabaseNaming, SampleSpec, SampleStrategy, TableId, TableMeta};
pub use simhash::{LshConfig, LshIndex, SimHashSignature};
